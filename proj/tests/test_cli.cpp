#include "favorit/cli.hpp"
#include "favorit/json_io.hpp"

#include "simulate.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace favorit;

namespace {

struct Run {
	int code;
	std::string out;
	std::string err;
};

Run run(std::vector<std::string> args) {
	std::ostringstream out, err;
	const int code = run_cli(args, out, err);
	return {code, out.str(), err.str()};
}

const std::string &dataset_dir() {
	static const std::string dir = [] {
		const auto d = std::filesystem::temp_directory_path() / "favorit_cli_dataset";
		std::filesystem::remove_all(d);
		save_dataset(d, sim::seasonal_dataset());
		return d.string();
	}();
	return dir;
}

const std::string fixtures = FAVORIT_FIXTURE_DIR;

} // namespace

TEST_CASE("usage errors exit 1") {
	CHECK(run({}).code == 1);
	CHECK(run({"frobnicate"}).code == 1);
	CHECK(run({"rank", "--format", "xml", "--summaries", fixtures + "/satara_tomato_monthly.csv"}).code == 1);
	CHECK(run({"advise", "--dataset", dataset_dir(), "--market", "Satara"}).code == 1);
	CHECK(run({"rank", "--dataset", dataset_dir()}).code == 1);
	CHECK(run({"--help"}).code == 0);
}

TEST_CASE("data errors exit 2") {
	auto r = run({"rank", "--dataset", dataset_dir(), "--market", "Kolhapur", "--commodity", "Tomato"});
	CHECK(r.code == 2);
	CHECK(r.err.find("Kolhapur") != std::string::npos);
	CHECK(run({"rank", "--dataset", "/nonexistent/ds", "--market", "A", "--commodity", "B"}).code == 2);
	CHECK(run({"rank", "--dataset", dataset_dir(), "--market", "Satara", "--commodity", "Onion"}).code == 2);
}

TEST_CASE("rank from precomputed summaries") {
	const auto r = run({"rank", "--summaries", fixtures + "/satara_tomato_monthly.csv"});
	REQUIRE(r.code == 0);
	const auto j = Json::parse(r.out);
	CHECK(j["ranks"][0]["period"] == "July");
	CHECK(j["meta"]["command"] == "rank");
	CHECK(j["meta"]["version"] == "0.1.0");
	CHECK(j["meta"].contains("seed"));

	const auto csv = run({"rank", "--summaries", fixtures + "/satara_tomato_monthly.csv", "--format", "csv"});
	CHECK(csv.out.rfind("# favorit", 0) == 0);
	CHECK(csv.out.find("\n1,July,") != std::string::npos);
	const auto table = run({"rank", "--summaries", fixtures + "/satara_tomato_monthly.csv", "--format", "table"});
	CHECK(table.out.find("July") != std::string::npos);
}

TEST_CASE("rank on a dataset is deterministic") {
	const std::vector<std::string> args{"rank",   "--dataset", dataset_dir(), "--market", "Satara",
	                                    "--commodity", "Tomato", "--B",   "1000",   "--seed",
	                                    "11"};
	const auto a = run(args);
	const auto b = run(args);
	REQUIRE(a.code == 0);
	CHECK(a.out == b.out);
	const auto j = Json::parse(a.out);
	CHECK(j["ranks"][0]["period"] == "July");
	CHECK(j["meta"]["seed"] == 11);
	CHECK(j["meta"]["inputs"]["B"] == 1000);

	auto other = args;
	other.back() = "12";
	CHECK(run(other).out != a.out);

	auto env_args = args;
	env_args.erase(env_args.begin() + 1, env_args.begin() + 3);
	::setenv("FAVORIT_DATA_DIR", dataset_dir().c_str(), 1);
	const auto env = run(env_args);
	::unsetenv("FAVORIT_DATA_DIR");
	CHECK(env.code == 0);
	CHECK(Json::parse(env.out)["ranks"] == j["ranks"]);
}

TEST_CASE("intervals, advise, extremes") {
	const std::vector<std::string> base{"--dataset", dataset_dir(), "--market", "Satara", "--commodity", "Tomato",
	                                    "--B",       "500"};
	auto args = base;
	args.insert(args.begin(), "intervals");
	auto r = run(args);
	REQUIRE(r.code == 0);
	CHECK(Json::parse(r.out)["intervals"].size() == 12);

	args = base;
	args.insert(args.begin(), "advise");
	args.insert(args.end(), {"--current", "July"});
	r = run(args);
	REQUIRE(r.code == 0);
	CHECK(Json::parse(r.out)["stay"] == true);

	args = base;
	args.insert(args.begin(), "advise");
	args.insert(args.end(), {"--current", "Week 9"});
	CHECK(run(args).code == 2);

	args = base;
	args.insert(args.begin(), "advise");
	args.insert(args.end(), {"--current", "Week 2", "--granularity", "week", "--window-start", "06-20", "--weeks", "6"});
	r = run(args);
	REQUIRE(r.code == 0);
	CHECK(Json::parse(r.out)["current_period"] == "Week 2");

	r = run({"extremes", "--dataset", dataset_dir(), "--market", "Satara", "--commodity", "Tomato"});
	REQUIRE(r.code == 0);
	const auto x = Json::parse(r.out)["extremes"];
	CHECK(x.size() == 8);
	CHECK(x[0]["year"] == 2012);
}

TEST_CASE("forecast and backtest") {
	auto r = run({"forecast", "--dataset", dataset_dir(), "--market", "Pune", "--commodity", "Tomato", "--end",
	              "2019-06-30", "--horizon", "8"});
	REQUIRE(r.code == 0);
	auto j = Json::parse(r.out);
	CHECK(j["forecasts"].size() == 8);
	CHECK(j["window"]["end"] == "2019-06-30");
	CHECK(j["meta"]["inputs"]["fit_len"] == 100);
	CHECK(run({"forecast", "--dataset", dataset_dir(), "--market", "Pune", "--commodity", "Tomato", "--end",
	           "someday"})
	          .code == 1);

	r = run({"backtest", "--dataset", dataset_dir(), "--market", "Satara", "--commodity", "Onion", "--fit-len", "24",
	         "--format", "csv"});
	REQUIRE(r.code == 0);
	CHECK(r.out.find("# favorit 0.1.0 backtest") == 0);
}

TEST_CASE("prim demo reproduces the coriander windows") {
	auto r = run({"prim-demo", "--window-table", fixtures + "/solapur_coriander_window.csv"});
	REQUIRE(r.code == 0);
	auto j = Json::parse(r.out);
	CHECK(j["recommended_date"] == "2021-06-28");
	CHECK(j["benchmark"].get<double>() == doctest::Approx(444.0));
	CHECK(j["gain"].get<double>() == doctest::Approx(256.0));
	CHECK(j["success"] == true);

	r = run({"prim-demo", "--window-table", fixtures + "/kolhapur_coriander_window.csv", "--format", "csv"});
	REQUIRE(r.code == 0);
	CHECK(r.out.find("22-09-2021,5117.38,7700,5775,1925,true") != std::string::npos);
}

TEST_CASE("ingest writes a loadable dataset") {
	const auto tmp = std::filesystem::temp_directory_path() / "favorit_cli_ingest";
	std::filesystem::remove_all(tmp);
	std::filesystem::create_directories(tmp);
	const auto csv = tmp / "raw.csv";
	{
		std::ofstream f(csv);
		f << "date,market,commodity,min_price,max_price,modal_price,arrivals\n"
		     "2021-06-28,Solapur,Coriander,500,800,700,3\n"
		     "2021-06-29,Solapur,Coriander,400,600,500,2\n"
		     "2021-06-29,Solapur,Coriander,400,600,520,2\n"
		     "2021-06-30,Solapur,Coriander,,,0,\n"
		     "junk\n";
	}
	const auto out = tmp / "report.json";
	auto r = run({"ingest", "--input", csv.string(), "--date-format", "YYYY-MM-DD", "--dataset",
	              (tmp / "ds").string(), "--out", out.string()});
	REQUIRE(r.code == 0);
	CHECK(r.out.empty());
	std::ifstream rep(out);
	const auto j = Json::parse(rep);
	CHECK(j["rows"] == 5);
	CHECK(j["rejected"] == 2);
	CHECK(j["row_errors"][0]["line"] == 5);
	CHECK(j["row_errors"][0]["reason"] == csv.string() + ": nonpositive price");
	CHECK(j["series"][0]["cleaning_report"]["merged"] == 1);
	CHECK(j["series"][0]["cleaning_report"]["kept"] == 2);

	const auto ds = load_dataset(tmp / "ds");
	CHECK(ds.find("solapur", "coriander").size() == 2);
	CHECK(j["dataset_version"] == ds.version());

	CHECK(run({"ingest", "--input", (tmp / "missing.csv").string(), "--dataset", (tmp / "ds2").string()}).code == 2);
	CHECK(run({"ingest", "--input", csv.string(), "--date-format", "MM/DD/YY", "--dataset", (tmp / "ds3").string()})
	          .code == 1);
}

TEST_CASE("summary and table readers reject malformed rows") {
	std::istringstream bad("period,mean,lower,upper,flap\nJuly,abc,1,2,3\n");
	CHECK_THROWS_AS(read_summaries_csv(bad), Error);
	std::istringstream weeks("period,mean,lower,upper,flap,n_years\nWeek 2,100,90,110,3,6\n");
	const auto s = read_summaries_csv(weeks);
	REQUIRE(s.size() == 1);
	CHECK(s[0].period == 2);
	CHECK(s[0].n_years == 6);
	std::istringstream empty("date,predicted_price,actual_price\n");
	CHECK_THROWS_AS(read_predicted_actual_csv(empty), Error);
	std::istringstream bad_date("date,predicted_price,actual_price\n2021-06-28,1,2\n");
	CHECK_THROWS_AS(read_predicted_actual_csv(bad_date), Error);
}

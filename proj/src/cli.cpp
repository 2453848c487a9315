#include "favorit/cli.hpp"

#include "favorit/analysis.hpp"
#include "favorit/error.hpp"
#include "favorit/json_io.hpp"
#include "favorit/service.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace favorit {

namespace {

struct Options {
	std::string dataset;
	std::string market;
	std::string commodity;
	std::string granularity = "month";
	std::string window_start = "09-01";
	unsigned weeks = 8;
	std::size_t replicates = kDefaultReplicates;
	std::uint64_t seed = 20211;
	int fit_len = 100;
	int horizon = 8;
	int step = 8;
	std::string format = "json";
	std::string out;

	// per-command
	std::vector<std::string> inputs;
	std::string date_format = "DD-MM-YYYY";
	std::string source;
	std::string summaries;
	std::string current;
	int max_distance = -1;
	std::string end;
	bool log_transform = false;
	std::string window_table;
	std::string config;
	std::string listen;
	std::string static_dir;
	bool seed_given = false;
	bool replicates_given = false;
	bool fit_len_given = false;
};

/// What a command produced; rendered in the requested format.
struct Output {
	Json json;
	std::string csv;
	std::vector<std::vector<std::string>> table; ///< first row is the header
};

class UsageError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

std::string fmt_num(double v, int decimals = 2) {
	if (!std::isfinite(v)) {
		return v > 0 ? "inf" : "nan";
	}
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
	return buf;
}

std::string csv_num(double v) {
	if (!std::isfinite(v)) {
		return v > 0 ? "inf" : "";
	}
	char buf[64];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, ptr);
}

std::string render_table(const std::vector<std::vector<std::string>> &rows) {
	if (rows.empty()) {
		return {};
	}
	std::vector<std::size_t> width;
	for (const auto &row : rows) {
		width.resize(std::max(width.size(), row.size()), 0);
		for (std::size_t i = 0; i < row.size(); ++i) {
			width[i] = std::max(width[i], row[i].size());
		}
	}
	std::string out;
	for (std::size_t r = 0; r < rows.size(); ++r) {
		for (std::size_t i = 0; i < rows[r].size(); ++i) {
			out += rows[r][i];
			if (i + 1 < rows[r].size()) {
				out.append(width[i] - rows[r][i].size() + 2, ' ');
			}
		}
		out += '\n';
		if (r == 0) {
			for (std::size_t i = 0; i < width.size(); ++i) {
				out.append(width[i], '-');
				if (i + 1 < width.size()) {
					out += "  ";
				}
			}
			out += '\n';
		}
	}
	return out;
}

std::string dataset_path(const Options &o) {
	if (!o.dataset.empty()) {
		return o.dataset;
	}
	if (const char *env = std::getenv("FAVORIT_DATA_DIR"); env && *env) {
		return env;
	}
	throw UsageError("no dataset: pass --dataset PATH or set FAVORIT_DATA_DIR");
}

SeasonalQuery seasonal_query(const Options &o) {
	SeasonalQuery q;
	const auto g = parse_granularity(o.granularity);
	if (!g) {
		throw UsageError("--granularity must be month or week");
	}
	q.granularity = *g;
	if (q.granularity == Granularity::week) {
		q.window = parse_window_start(o.window_start, o.weeks);
		if (!q.window) {
			throw UsageError("--window-start must be MM-DD and --weeks positive");
		}
	}
	q.replicates = o.replicates;
	q.seed = o.seed;
	return q;
}

Json seasonal_inputs(const Options &o) {
	Json j = {{"market", o.market}, {"commodity", o.commodity}, {"granularity", o.granularity}, {"B", o.replicates}};
	if (o.granularity == "week") {
		j["window_start"] = o.window_start;
		j["weeks"] = o.weeks;
	}
	return j;
}

std::vector<std::string> summary_row(const FlapSummary &s) {
	return {s.period_label, std::to_string(s.n_years), fmt_num(s.mean), fmt_num(s.sd), fmt_num(s.ci.lower),
	        fmt_num(s.ci.upper), fmt_num(s.flap)};
}

std::string summary_csv_fields(const FlapSummary &s) {
	return s.period_label + ',' + std::to_string(s.n_years) + ',' + csv_num(s.mean) + ',' + csv_num(s.sd) + ',' +
	       csv_num(s.ci.lower) + ',' + csv_num(s.ci.upper) + ',' + csv_num(s.flap);
}

Output ranking_output(const Ranking &ranking) {
	Output out;
	out.json = to_json(ranking);
	out.csv = "rank,period,n_years,mean,sd,lower,upper,flap\n";
	out.table.push_back({"Rank", "Period", "Years", "Mean", "SD", "Lower", "Upper", "FLAP"});
	for (const auto &p : ranking.periods) {
		out.csv += std::to_string(p.rank) + ',' + summary_csv_fields(p.summary) + '\n';
		auto row = summary_row(p.summary);
		row.insert(row.begin(), std::to_string(p.rank));
		out.table.push_back(std::move(row));
	}
	return out;
}

Output cmd_ingest(const Options &o, Json &inputs) {
	const auto fmt = parse_date_format(o.date_format);
	if (!fmt) {
		throw UsageError("--date-format must be DD-MM-YYYY or YYYY-MM-DD");
	}
	const auto target = dataset_path(o);
	ParseResult all;
	for (const auto &path : o.inputs) {
		std::ifstream in(path, std::ios::binary);
		if (!in) {
			throw Error(ErrorKind::not_found, "input_not_found", "cannot open " + path);
		}
		auto part = parse_price_csv(in, {*fmt});
		for (auto &e : part.errors) {
			e.reason = path + ": " + e.reason;
		}
		all.rows += part.rows;
		all.records.insert(all.records.end(), part.records.begin(), part.records.end());
		all.errors.insert(all.errors.end(), part.errors.begin(), part.errors.end());
	}
	IngestReport report;
	const Dataset dataset = build_dataset(all, o.source.empty() ? "favorit ingest" : o.source, &report);
	save_dataset(target, dataset);
	inputs = {{"inputs", o.inputs}, {"date_format", o.date_format}, {"dataset", target}};

	Output out;
	Json errors = Json::array();
	for (const auto &e : report.errors) {
		errors.push_back({{"line", e.line}, {"reason", e.reason}});
	}
	Json series = Json::array();
	out.csv = "market,commodity,first,last,records_in,dropped_nonpositive,merged,kept\n";
	out.table.push_back({"Market", "Commodity", "First", "Last", "Kept", "Merged"});
	for (const auto &s : dataset.series) {
		series.push_back({{"market", s.market()},
		                  {"commodity", s.commodity()},
		                  {"first", s.first_date().iso()},
		                  {"last", s.last_date().iso()},
		                  {"cleaning_report", to_json(s.cleaning_report())}});
		const auto &r = s.cleaning_report();
		out.csv += s.market() + ',' + s.commodity() + ',' + s.first_date().iso() + ',' + s.last_date().iso() + ',' +
		           std::to_string(r.records_in) + ',' + std::to_string(r.dropped_nonpositive) + ',' +
		           std::to_string(r.merged) + ',' + std::to_string(r.kept) + '\n';
		out.table.push_back({s.market(), s.commodity(), s.first_date().iso(), s.last_date().iso(),
		                     std::to_string(r.kept), std::to_string(r.merged)});
	}
	out.json = {{"rows", report.rows},
	            {"rejected", report.rejected},
	            {"row_errors", errors},
	            {"series", series},
	            {"dataset_version", dataset.version()}};
	return out;
}

Output cmd_rank(const Options &o, Json &inputs) {
	if (!o.summaries.empty()) {
		std::ifstream in(o.summaries);
		if (!in) {
			throw Error(ErrorKind::not_found, "input_not_found", "cannot open " + o.summaries);
		}
		inputs = {{"summaries", o.summaries}};
		return ranking_output(rank_periods(read_summaries_csv(in)));
	}
	const auto query = seasonal_query(o);
	const auto path = dataset_path(o);
	const Dataset dataset = load_dataset(path);
	const auto &series = dataset.find(o.market, o.commodity);
	const auto ps = period_summaries(series, query);
	inputs = seasonal_inputs(o);
	inputs["dataset"] = path;
	Output out = ranking_output(rank_periods(ps.summaries));
	out.json["skipped_periods"] = ps.skipped;
	return out;
}

Output cmd_intervals(const Options &o, Json &inputs) {
	const auto query = seasonal_query(o);
	const auto path = dataset_path(o);
	const Dataset dataset = load_dataset(path);
	const auto ps = period_summaries(dataset.find(o.market, o.commodity), query);
	inputs = seasonal_inputs(o);
	inputs["dataset"] = path;

	Output out;
	Json rows = Json::array();
	out.csv = "period,n_years,mean,sd,lower,upper,flap\n";
	out.table.push_back({"Period", "Years", "Mean", "SD", "Lower", "Upper", "FLAP"});
	for (const auto &s : ps.summaries) {
		rows.push_back(to_json(s));
		out.csv += summary_csv_fields(s) + '\n';
		out.table.push_back(summary_row(s));
	}
	out.json = {{"intervals", rows}, {"skipped_periods", ps.skipped}};
	return out;
}

Output cmd_advise(const Options &o, Json &inputs) {
	if (o.current.empty()) {
		throw UsageError("--current PERIOD is required");
	}
	const auto query = seasonal_query(o);
	const auto path = dataset_path(o);
	const Dataset dataset = load_dataset(path);
	const auto ps = period_summaries(dataset.find(o.market, o.commodity), query);
	const auto ranking = rank_periods(ps.summaries);
	std::optional<unsigned> max_distance;
	if (o.max_distance >= 0) {
		max_distance = static_cast<unsigned>(o.max_distance);
	}
	const Advice advice = advise_for(ps, ranking, o.current, max_distance);
	inputs = seasonal_inputs(o);
	inputs["dataset"] = path;
	inputs["current"] = o.current;
	if (max_distance) {
		inputs["max_distance"] = *max_distance;
	}

	Output out;
	out.json = to_json(advice);
	out.csv = "order,period,rank\n";
	out.table.push_back({"Option", "Period", "Rank"});
	std::size_t i = 1;
	for (const auto &p : advice.better_periods) {
		out.csv += std::to_string(i) + ',' + p.summary.period_label + ',' + std::to_string(p.rank) + '\n';
		out.table.push_back({std::to_string(i++), p.summary.period_label, std::to_string(p.rank)});
	}
	if (advice.stay) {
		out.table.push_back({"-", advice.current_period + " (stay)", std::to_string(advice.current_rank)});
	}
	return out;
}

Output cmd_extremes(const Options &o, Json &inputs) {
	const auto path = dataset_path(o);
	const Dataset dataset = load_dataset(path);
	const auto panel = aggregate_panel(dataset.find(o.market, o.commodity), Granularity::month);
	inputs = {{"dataset", path}, {"market", o.market}, {"commodity", o.commodity}};

	Output out;
	Json rows = Json::array();
	out.csv = "year,min_period,min_price,max_period,max_price,ratio\n";
	out.table.push_back({"Year", "Minimum", "Month", "Maximum", "Month", "Ratio"});
	for (const auto &x : extremes_by_year(panel)) {
		rows.push_back(to_json(x, panel));
		const auto lo = panel.period_label(x.min_period);
		const auto hi = panel.period_label(x.max_period);
		out.csv += std::to_string(x.year) + ',' + lo + ',' + csv_num(x.min_price) + ',' + hi + ',' +
		           csv_num(x.max_price) + ',' + csv_num(x.ratio) + '\n';
		out.table.push_back({std::to_string(x.year), fmt_num(x.min_price), lo, fmt_num(x.max_price), hi,
		                     fmt_num(x.ratio, 1)});
	}
	out.json = {{"extremes", rows}};
	return out;
}

std::optional<Date> parse_cli_date(const std::string &text) {
	if (auto d = parse_date(text, DateFormat::yyyy_mm_dd)) {
		return d;
	}
	return parse_date(text, DateFormat::dd_mm_yyyy);
}

Output cmd_forecast(const Options &o, Json &inputs) {
	const auto path = dataset_path(o);
	std::optional<Date> end;
	if (!o.end.empty()) {
		end = parse_cli_date(o.end);
		if (!end) {
			throw UsageError("--end must be YYYY-MM-DD or DD-MM-YYYY");
		}
	}
	const Dataset dataset = load_dataset(path);
	FitOptions fit;
	fit.restart_seed = o.seed;
	fit.log_transform = o.log_transform;
	const auto fc = forecast_series(dataset.find(o.market, o.commodity), end, o.horizon, o.fit_len, fit);
	inputs = {{"dataset", path},        {"market", o.market}, {"commodity", o.commodity},
	          {"end", fc.window.end().iso()}, {"horizon", o.horizon}, {"fit_len", o.fit_len},
	          {"log", o.log_transform}};

	Output out;
	Json points = Json::array();
	out.csv = "date,predicted_price,recommended\n";
	out.table.push_back({"Date", "Predicted (Rs/quintal)", ""});
	for (const auto &f : fc.result.forecasts) {
		points.push_back(to_json(f));
		const bool rec = f.date == fc.result.recommended_date;
		out.csv += f.date.iso() + ',' + csv_num(f.predicted_price) + ',' + (rec ? "true" : "false") + '\n';
		out.table.push_back({format_date(f.date, DateFormat::dd_mm_yyyy), fmt_num(f.predicted_price),
		                     rec ? "<- recommended" : ""});
	}
	out.json = {{"window", {{"start", fc.window.start.iso()}, {"end", fc.window.end().iso()}, {"filled", fc.window.filled}}},
	            {"model", to_json(fc.result.model)},
	            {"forecasts", points},
	            {"recommended_date", fc.result.recommended_date.iso()}};
	return out;
}

Output cmd_backtest(const Options &o, Json &inputs) {
	const auto path = dataset_path(o);
	const Dataset dataset = load_dataset(path);
	BacktestConfig config;
	config.fit_len = o.fit_len;
	config.horizon = o.horizon;
	config.step = o.step;
	config.fit.restart_seed = o.seed;
	config.fit.log_transform = o.log_transform;
	const auto report = rolling_backtest(dataset.find(o.market, o.commodity), config);
	inputs = {{"dataset", path},       {"market", o.market}, {"commodity", o.commodity}, {"fit_len", o.fit_len},
	          {"horizon", o.horizon}, {"step", o.step},     {"log", o.log_transform}};

	Output out;
	out.json = to_json(report);
	out.csv = backtest_csv(report);
	out.table.push_back({"Anchor", "Order", "Recommended", "Realized", "Benchmark", "Gain"});
	for (const auto &w : report.windows) {
		out.table.push_back({w.anchor.iso(), w.order.to_string(), w.prim.recommended_date.iso(),
		                     fmt_num(w.prim.realized), fmt_num(w.prim.benchmark), fmt_num(w.prim.gain)});
	}
	out.table.push_back({"windows " + std::to_string(report.aggregates.count), "",
	                     "success " + fmt_num(100.0 * report.aggregates.success_rate, 1) + "%", "",
	                     "mean gain", fmt_num(report.aggregates.mean_gain)});
	return out;
}

Output cmd_prim_demo(const Options &o, Json &inputs) {
	std::ifstream in(o.window_table);
	if (!in) {
		throw Error(ErrorKind::not_found, "input_not_found", "cannot open " + o.window_table);
	}
	const auto table = read_predicted_actual_csv(in);
	const Date rec = recommend_market_day(table.predicted);
	double predicted = 0.0;
	for (const auto &f : table.predicted) {
		if (f.date == rec) {
			predicted = f.predicted_price;
		}
	}
	const PrimReport report = evaluate_prim(rec, table.actual, predicted);
	inputs = {{"window_table", o.window_table}};

	Output out;
	out.json = to_json(report);
	out.csv = "recommended_date,predicted,realized,benchmark,gain,success\n" +
	          format_date(rec, DateFormat::dd_mm_yyyy) + ',' + csv_num(predicted) + ',' + csv_num(report.realized) +
	          ',' + csv_num(report.benchmark) + ',' + csv_num(report.gain) + ',' +
	          (report.success ? "true" : "false") + '\n';
	out.table = {{"Recommended", "Predicted", "Realized", "Benchmark", "Gain", "Improved"},
	             {format_date(rec, DateFormat::dd_mm_yyyy), fmt_num(predicted), fmt_num(report.realized),
	              fmt_num(report.benchmark), fmt_num(report.gain), report.success ? "yes" : "no"}};
	return out;
}

int cmd_serve(const Options &o, std::ostream &out) {
	ServiceConfig config = o.config.empty() ? ServiceConfig{} : load_service_config(o.config);
	if (!o.listen.empty()) {
		apply_listen(config, o.listen);
	}
	if (!o.static_dir.empty()) {
		config.static_dir = o.static_dir;
	}
	if (o.seed_given) {
		config.seed = o.seed;
	}
	if (o.replicates_given) {
		config.replicates = o.replicates;
	}
	if (o.fit_len_given) {
		config.fit_len = o.fit_len;
	}
	Service service(load_dataset(dataset_path(o)), config);
	out << "favorit " << kVersion << " serving dataset " << service.dataset_version() << " on " << config.host << ':'
	    << config.port << std::endl;
	service.serve();
	return 0;
}

void emit(const Output &output, const std::string &command, const Json &inputs, const Options &o, std::ostream &out) {
	std::string text;
	if (o.format == "json") {
		Json doc = output.json;
		doc["meta"] = {{"command", command}, {"inputs", inputs}, {"seed", o.seed}, {"version", std::string(kVersion)}};
		text = doc.dump(2) + "\n";
	} else {
		std::string header = "# favorit " + std::string(kVersion) + " " + command + " seed=" + std::to_string(o.seed) +
		                     " inputs=" + inputs.dump() + "\n";
		text = header + (o.format == "csv" ? output.csv : render_table(output.table));
	}
	if (o.out.empty()) {
		out << text;
		return;
	}
	std::ofstream file(o.out, std::ios::binary);
	file << text;
	if (!file) {
		throw Error(ErrorKind::io, "io_error", "cannot write " + o.out);
	}
}

} // namespace

std::vector<FlapSummary> read_summaries_csv(std::istream &in) {
	std::vector<FlapSummary> out;
	std::string line;
	std::size_t line_no = 0;
	bool header = true;
	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		if (line.empty() || line[0] == '#') {
			continue;
		}
		if (header) {
			header = false;
			continue;
		}
		std::vector<std::string> f;
		std::stringstream ss(line);
		for (std::string cell; std::getline(ss, cell, ',');) {
			f.push_back(cell);
		}
		auto bad = [&] {
			return Error(ErrorKind::format, "invalid_summary_row", "bad summary row at line " + std::to_string(line_no));
		};
		if (f.size() < 5) {
			throw bad();
		}
		FlapSummary s;
		s.period_label = f[0];
		if (auto m = parse_month(f[0])) {
			s.period = *m;
			s.period_label = std::string(month_name(*m));
		} else if (f[0].rfind("Week ", 0) == 0) {
			s.period = static_cast<unsigned>(std::stoul(f[0].substr(5)));
		} else {
			throw bad();
		}
		try {
			s.mean = std::stod(f[1]);
			s.ci.lower = std::stod(f[2]);
			s.ci.upper = std::stod(f[3]);
			s.flap = std::stod(f[4]);
			s.n_years = f.size() > 5 ? std::stoul(f[5]) : 11;
		} catch (const std::exception &) {
			throw bad();
		}
		s.sd = s.flap > 0 ? s.mean / s.flap : 0.0;
		out.push_back(std::move(s));
	}
	return out;
}

PredictedActual read_predicted_actual_csv(std::istream &in) {
	PredictedActual out;
	std::string line;
	std::size_t line_no = 0;
	bool header = true;
	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		if (line.empty() || line[0] == '#') {
			continue;
		}
		if (header) {
			header = false;
			continue;
		}
		std::vector<std::string> f;
		std::stringstream ss(line);
		for (std::string cell; std::getline(ss, cell, ',');) {
			f.push_back(cell);
		}
		const auto bad = Error(ErrorKind::format, "invalid_row", "bad predicted/actual row at line " + std::to_string(line_no));
		if (f.size() < 3) {
			throw bad;
		}
		const auto date = parse_date(f[0], DateFormat::dd_mm_yyyy);
		if (!date) {
			throw bad;
		}
		try {
			out.predicted.push_back({*date, std::stod(f[1])});
			out.actual.push_back({*date, std::stod(f[2])});
		} catch (const std::exception &) {
			throw bad;
		}
	}
	if (out.predicted.empty()) {
		throw Error(ErrorKind::insufficient_data, "empty_table", "no predicted/actual rows");
	}
	return out;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
	CLI::App app{"favorit: market timing from wholesale price history", "favorit"};
	app.require_subcommand(1);
	app.set_version_flag("--version", std::string(kVersion));
	Options o;

	auto add_common = [&](CLI::App *sub) {
		sub->add_option("--dataset", o.dataset, "Dataset directory (default $FAVORIT_DATA_DIR)");
		sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
		sub->add_option("--out", o.out, "Write output to PATH instead of stdout");
		sub->add_option("--seed", o.seed, "Random seed (recorded in output)");
	};
	auto add_series = [&](CLI::App *sub) {
		sub->add_option("--market", o.market, "Market name")->required();
		sub->add_option("--commodity", o.commodity, "Commodity name")->required();
	};
	auto add_seasonal = [&](CLI::App *sub) {
		sub->add_option("--granularity", o.granularity, "month or week")->check(CLI::IsMember({"month", "week"}));
		sub->add_option("--window-start", o.window_start, "Week window start MM-DD");
		sub->add_option("--weeks", o.weeks, "Number of weeks in the window")->check(CLI::Range(1, 52));
		sub->add_option("--B", o.replicates, "Bootstrap replicates")->check(CLI::Range(1, 10000000));
	};
	auto add_forecast = [&](CLI::App *sub) {
		sub->add_option("--fit-len", o.fit_len, "Days in the fit window")->check(CLI::Range(20, 3650));
		sub->add_option("--horizon", o.horizon, "Forecast horizon in days")->check(CLI::Range(1, 60));
		sub->add_flag("--log", o.log_transform, "Fit on log prices");
	};

	auto *ingest = app.add_subcommand("ingest", "Parse, clean and store daily price CSVs as a dataset");
	add_common(ingest);
	ingest->add_option("--input", o.inputs, "Input CSV file(s)")->required()->expected(1, -1);
	ingest->add_option("--date-format", o.date_format, "DD-MM-YYYY or YYYY-MM-DD");
	ingest->add_option("--source", o.source, "Source description stored in the manifest");

	auto *rank = app.add_subcommand("rank", "Rank months or weeks by price attractiveness");
	add_common(rank);
	rank->add_option("--market", o.market, "Market name");
	rank->add_option("--commodity", o.commodity, "Commodity name");
	add_seasonal(rank);
	rank->add_option("--summaries", o.summaries, "Rank precomputed summaries (period,mean,lower,upper,flap)");

	auto *intervals = app.add_subcommand("intervals", "Per-period mean and bootstrap interval for plotting");
	add_common(intervals);
	add_series(intervals);
	add_seasonal(intervals);

	auto *advise = app.add_subcommand("advise", "Better-ranked periods near the current one");
	add_common(advise);
	add_series(advise);
	add_seasonal(advise);
	advise->add_option("--current", o.current, "Current market period (e.g. June, Week 3)")->required();
	advise->add_option("--max-distance", o.max_distance, "Only periods within N calendar steps");

	auto *extremes = app.add_subcommand("extremes", "Yearly lowest and highest monthly mean");
	add_common(extremes);
	add_series(extremes);

	auto *forecast = app.add_subcommand("forecast", "ARIMA forecast and recommended market day");
	add_common(forecast);
	add_series(forecast);
	add_forecast(forecast);
	forecast->add_option("--end", o.end, "Last day of the fit window (default: last observation)");

	auto *backtest = app.add_subcommand("backtest", "Rolling PRIM evaluation of the market-day advice");
	add_common(backtest);
	add_series(backtest);
	add_forecast(backtest);
	backtest->add_option("--step", o.step, "Days between window anchors")->check(CLI::Range(1, 365));

	auto *prim_demo = app.add_subcommand("prim-demo", "PRIM evaluation of a predicted/actual table");
	add_common(prim_demo);
	prim_demo->add_option("--window-table", o.window_table, "CSV with date,predicted_price,actual_price")->required();

	auto *serve = app.add_subcommand("serve", "Run the read-only HTTP JSON API");
	serve->add_option("--dataset", o.dataset, "Dataset directory (default $FAVORIT_DATA_DIR)");
	serve->add_option("--config", o.config, "Service config JSON");
	serve->add_option("--listen", o.listen, "HOST:PORT");
	serve->add_option("--static", o.static_dir, "Directory of UI assets served at /");
	serve->add_option("--seed", o.seed, "Bootstrap and optimizer seed");
	serve->add_option("--B", o.replicates, "Bootstrap replicates")->check(CLI::Range(1, 10000000));
	serve->add_option("--fit-len", o.fit_len, "Days in the forecast fit window")->check(CLI::Range(20, 3650));

	std::vector<const char *> argv;
	argv.push_back("favorit");
	for (const auto &a : args) {
		argv.push_back(a.c_str());
	}
	try {
		app.parse(static_cast<int>(argv.size()), argv.data());
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? 0 : 1;
	}

	const CLI::App *sub = app.get_subcommands().front();
	const std::string command = sub->get_name();
	try {
		if (command == "serve") {
			o.seed_given = sub->count("--seed") > 0;
			o.replicates_given = sub->count("--B") > 0;
			o.fit_len_given = sub->count("--fit-len") > 0;
			return cmd_serve(o, out);
		}
		if (command == "rank" && o.summaries.empty() && (o.market.empty() || o.commodity.empty())) {
			throw UsageError("rank needs --market and --commodity, or --summaries");
		}
		Json inputs;
		Output output;
		if (command == "ingest") {
			output = cmd_ingest(o, inputs);
		} else if (command == "rank") {
			output = cmd_rank(o, inputs);
		} else if (command == "intervals") {
			output = cmd_intervals(o, inputs);
		} else if (command == "advise") {
			output = cmd_advise(o, inputs);
		} else if (command == "extremes") {
			output = cmd_extremes(o, inputs);
		} else if (command == "forecast") {
			output = cmd_forecast(o, inputs);
		} else if (command == "backtest") {
			output = cmd_backtest(o, inputs);
		} else if (command == "prim-demo") {
			output = cmd_prim_demo(o, inputs);
		}
		emit(output, command, inputs, o, out);
		return 0;
	} catch (const UsageError &e) {
		err << "favorit " << command << ": " << e.what() << '\n';
		return 1;
	} catch (const Error &e) {
		err << "favorit " << command << ": " << e.what() << '\n';
		return e.kind() == ErrorKind::invalid_argument ? 1 : 2;
	}
}

} // namespace favorit

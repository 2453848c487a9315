#include "favorit/service.hpp"

#include "simulate.hpp"

#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>

using namespace favorit;

namespace {

const Service &service() {
	static const Service svc = [] {
		ServiceConfig cfg;
		cfg.replicates = 2000;
		cfg.seed = 7;
		return Service(sim::seasonal_dataset(), cfg);
	}();
	return svc;
}

Json get(const std::string &path, const QueryParams &q, int expected_status = 200) {
	const auto r = service().handle("GET", path, q, "");
	CHECK(r.status == expected_status);
	return Json::parse(r.body);
}

Json post(const std::string &path, const Json &body, int expected_status = 200) {
	const auto r = service().handle("POST", path, {}, body.dump());
	CHECK(r.status == expected_status);
	return Json::parse(r.body);
}

} // namespace

TEST_CASE("markets and commodities") {
	const auto m = get("/v1/markets", {});
	CHECK(m["markets"] == Json::array({"Pune", "Satara"}));
	CHECK(m["meta"]["seed"] == 7);
	CHECK(m["meta"]["replicates"] == 2000);
	CHECK(m["meta"]["dataset_version"] == service().dataset_version());
	CHECK(m["meta"]["version"] == std::string(kVersion));

	const auto c = get("/v1/commodities", {{"market", "satara"}});
	CHECK(c["commodities"] == Json::array({"Onion", "Tomato"}));

	const auto e = get("/v1/commodities", {{"market", "Kolhapur"}}, 404);
	CHECK(e["error"]["code"] == "unknown_market");
	CHECK(e["error"]["status"] == 404);
	CHECK(get("/v1/commodities", {}, 422)["error"]["code"] == "invalid_parameter");
}

TEST_CASE("ranking and intervals") {
	const QueryParams q{{"market", "Satara"}, {"commodity", "Tomato"}};
	const auto r = get("/v1/ranking", q);
	REQUIRE(r["ranks"].size() == 12);
	CHECK(r["ranks"][0]["period"] == "July");
	CHECK(r["ranks"][0]["rank"] == 1);
	CHECK(r["granularity"] == "month");

	const auto iv = get("/v1/intervals", q);
	REQUIRE(iv["intervals"].size() == 12);
	CHECK(iv["intervals"][0]["period"] == "January");
	for (const auto &s : iv["intervals"]) {
		CHECK(s["lower"].get<double>() <= s["mean"].get<double>());
		CHECK(s["mean"].get<double>() <= s["upper"].get<double>());
		CHECK(s["n_years"] == 8);
	}
	// identical requests give identical bodies
	CHECK(service().handle("GET", "/v1/ranking", q, "").body == service().handle("GET", "/v1/ranking", q, "").body);

	auto weekly = q;
	weekly["granularity"] = "week";
	weekly["window_start"] = "07-01";
	weekly["weeks"] = "4";
	const auto w = get("/v1/ranking", weekly);
	CHECK(w["ranks"].size() == 4);
	CHECK(w["granularity"] == "week");

	auto bad = q;
	bad["granularity"] = "fortnight";
	CHECK(get("/v1/ranking", bad, 422)["error"]["code"] == "invalid_parameter");
	CHECK(get("/v1/ranking", {{"market", "Satara"}, {"commodity", "Onion"}}, 409)["error"]["status"] == 409);
	CHECK(get("/v1/ranking", {{"market", "Satara"}, {"commodity", "Garlic"}}, 404)["error"]["code"] ==
	      "unknown_commodity");
}

TEST_CASE("advise") {
	const auto stay = post("/v1/advise", {{"market", "Satara"}, {"commodity", "Tomato"}, {"current_period", "July"}});
	CHECK(stay["stay"] == true);
	CHECK(stay["current_rank"] == 1);
	CHECK(stay["better_periods"].empty());

	const auto feb = post("/v1/advise", {{"market", "Satara"}, {"commodity", "Tomato"}, {"current_period", "Feb"}});
	CHECK(feb["stay"] == false);
	CHECK_FALSE(feb["better_periods"].empty());

	const auto near = post("/v1/advise", {{"market", "Satara"},
	                                      {"commodity", "Tomato"},
	                                      {"current_period", "February"},
	                                      {"max_distance", 1}});
	for (const auto &p : near["better_periods"]) {
		CHECK((p["period"] == "January" || p["period"] == "March"));
	}

	CHECK(post("/v1/advise", {{"market", "Satara"}, {"commodity", "Tomato"}, {"current_period", "Smarch"}}, 404)
	          ["error"]["code"] == "unknown_period");
	CHECK(post("/v1/advise", {{"market", "Satara"}, {"commodity", "Tomato"}}, 422)["error"]["code"] ==
	      "invalid_parameter");
	const auto r = service().handle("POST", "/v1/advise", {}, "{not json");
	CHECK(r.status == 422);
}

TEST_CASE("forecast is cached per key") {
	const QueryParams q{{"market", "Pune"}, {"commodity", "Tomato"}, {"end", "2019-06-30"}, {"h", "8"}};
	const auto before = service().cached_forecasts();
	const auto a = service().handle("GET", "/v1/forecast", q, "");
	REQUIRE(a.status == 200);
	CHECK(service().cached_forecasts() == before + 1);
	const auto b = service().handle("GET", "/v1/forecast", q, "");
	CHECK(a.body == b.body);
	CHECK(service().cached_forecasts() == before + 1);

	const auto j = Json::parse(a.body);
	REQUIRE(j["forecasts"].size() == 8);
	CHECK(j["forecasts"][0]["date"] == "2019-07-01");
	CHECK(j["window"]["end"] == "2019-06-30");
	CHECK(j["cache_key"] == "Pune|Tomato|2019-06-30|8|7");
	CHECK(j["recommended_date"].is_string());

	auto dmy = q;
	dmy["end"] = "30-06-2019";
	CHECK(Json::parse(service().handle("GET", "/v1/forecast", dmy, "").body)["cache_key"] == j["cache_key"]);

	auto bad = q;
	bad["end"] = "June";
	CHECK(get("/v1/forecast", bad, 422)["error"]["code"] == "invalid_parameter");
	bad = q;
	bad["h"] = "0";
	CHECK(get("/v1/forecast", bad, 422)["error"]["status"] == 422);
	bad = q;
	bad["end"] = "2011-06-30";
	CHECK(get("/v1/forecast", bad, 409)["error"]["status"] == 409);
}

TEST_CASE("concurrent requests agree") {
	const QueryParams q{{"market", "Satara"}, {"commodity", "Tomato"}, {"end", "2018-03-31"}, {"h", "5"}};
	std::vector<std::string> bodies(6);
	{
		std::vector<std::jthread> threads;
		for (std::size_t i = 0; i < bodies.size(); ++i) {
			threads.emplace_back([&, i] { bodies[i] = service().handle("GET", "/v1/forecast", q, "").body; });
		}
	}
	for (const auto &b : bodies) {
		CHECK(b == bodies[0]);
	}
}

TEST_CASE("backtest") {
	const auto r = post("/v1/backtest", {{"market", "Satara"},
	                                     {"commodity", "Onion"},
	                                     {"fit_len", 24},
	                                     {"horizon", 8},
	                                     {"step", 8}});
	CHECK(r["windows"].size() == 2);
	CHECK(r["aggregates"]["count"] == 2);
	CHECK(r["config"]["fit_len"] == 24);
	CHECK(post("/v1/backtest", {{"market", "Satara"}, {"commodity", "Onion"}, {"fit_len", 5}}, 422)["error"]["code"] ==
	      "invalid_parameter");
}

TEST_CASE("unknown routes") {
	CHECK(get("/v2/markets", {}, 404)["error"]["code"] == "unknown_route");
	const auto r = service().handle("DELETE", "/v1/markets", {}, "");
	CHECK(r.status == 404);
}

TEST_CASE("config loading") {
	const auto path = std::filesystem::temp_directory_path() / "favorit_service_config.json";
	{
		std::ofstream f(path);
		f << R"({"listen": "0.0.0.0:9000", "seed": 3, "replicates": 500, "cors_origin": "http://localhost:5173"})";
	}
	const auto cfg = load_service_config(path);
	CHECK(cfg.host == "0.0.0.0");
	CHECK(cfg.port == 9000);
	CHECK(cfg.seed == 3);
	CHECK(cfg.replicates == 500);
	CHECK(cfg.cors_origin == "http://localhost:5173");
	CHECK(cfg.fit_len == 100);

	ServiceConfig c;
	apply_listen(c, ":7000");
	CHECK(c.port == 7000);
	CHECK(c.host == "127.0.0.1");
	CHECK_THROWS_AS(apply_listen(c, "nope"), Error);
	CHECK_THROWS_AS(apply_listen(c, "host:99999"), Error);
	CHECK_THROWS_AS(load_service_config("/nonexistent/favorit.json"), Error);
}

TEST_CASE("http frontend serves the API with CORS") {
	HttpFrontend http(service());
	const int port = http.bind("127.0.0.1", 0);
	REQUIRE(port > 0);
	std::jthread runner([&] { http.run(); });

	httplib::Client client("127.0.0.1", port);
	client.set_connection_timeout(5);
	auto res = client.Get("/v1/markets");
	REQUIRE(res);
	CHECK(res->status == 200);
	CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
	CHECK(res->get_header_value("Content-Type") == "application/json");
	CHECK(Json::parse(res->body)["markets"].size() == 2);

	res = client.Get("/v1/ranking?market=Satara&commodity=Tomato");
	REQUIRE(res);
	CHECK(Json::parse(res->body)["ranks"][0]["period"] == "July");

	res = client.Post("/v1/advise", R"({"market":"Satara","commodity":"Tomato","current_period":"July"})",
	                  "application/json");
	REQUIRE(res);
	CHECK(Json::parse(res->body)["stay"] == true);

	res = client.Get("/v1/commodities?market=Nowhere");
	REQUIRE(res);
	CHECK(res->status == 404);

	res = client.Options("/v1/ranking");
	REQUIRE(res);
	CHECK(res->status == 204);
	CHECK_FALSE(res->get_header_value("Access-Control-Allow-Methods").empty());

	http.stop();
}

#include "favorit/service.hpp"

#include "favorit/analysis.hpp"

#include <httplib.h>

#include <charconv>
#include <fstream>

namespace favorit {

namespace {

Error invalid(const std::string &message) { return Error(ErrorKind::invalid_argument, "invalid_parameter", message); }

const std::string &required(const QueryParams &q, const std::string &key) {
	auto it = q.find(key);
	if (it == q.end() || it->second.empty()) {
		throw invalid("missing parameter '" + key + "'");
	}
	return it->second;
}

std::optional<std::string> optional_param(const QueryParams &q, const std::string &key) {
	auto it = q.find(key);
	if (it == q.end() || it->second.empty()) {
		return std::nullopt;
	}
	return it->second;
}

long long int_param(const QueryParams &q, const std::string &key, long long fallback, long long lo, long long hi) {
	const auto text = optional_param(q, key);
	if (!text) {
		return fallback;
	}
	long long v = 0;
	auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
	if (ec != std::errc{} || ptr != text->data() + text->size() || v < lo || v > hi) {
		throw invalid("parameter '" + key + "' must be an integer in [" + std::to_string(lo) + ", " +
		              std::to_string(hi) + "]");
	}
	return v;
}

// Flattens a JSON object body into string parameters.
QueryParams body_params(const Json &body) {
	if (!body.is_object()) {
		throw invalid("request body must be a JSON object");
	}
	QueryParams out;
	for (const auto &[key, value] : body.items()) {
		if (value.is_string()) {
			out[key] = value.get<std::string>();
		} else if (value.is_number_integer() || value.is_number_unsigned()) {
			out[key] = value.dump();
		} else if (!value.is_null()) {
			throw invalid("parameter '" + key + "' must be a string or an integer");
		}
	}
	return out;
}

SeasonalQuery seasonal_query(const QueryParams &q, const ServiceConfig &config) {
	SeasonalQuery query;
	query.seed = config.seed;
	query.replicates = config.replicates;
	const auto granularity = parse_granularity(optional_param(q, "granularity").value_or("month"));
	if (!granularity) {
		throw invalid("granularity must be 'month' or 'week'");
	}
	query.granularity = *granularity;
	if (query.granularity == Granularity::week) {
		const auto weeks = static_cast<unsigned>(int_param(q, "weeks", 8, 1, 52));
		const auto start = optional_param(q, "window_start").value_or("09-01");
		query.window = parse_window_start(start, weeks);
		if (!query.window) {
			throw invalid("window_start must be MM-DD");
		}
	}
	return query;
}

std::optional<Date> parse_any_date(std::string_view text) {
	if (auto d = parse_date(text, DateFormat::yyyy_mm_dd)) {
		return d;
	}
	return parse_date(text, DateFormat::dd_mm_yyyy);
}

} // namespace

ServiceConfig load_service_config(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw Error(ErrorKind::not_found, "config_not_found", "cannot open config " + path.string());
	}
	ServiceConfig config;
	try {
		Json j;
		in >> j;
		config.host = j.value("host", config.host);
		config.port = j.value("port", config.port);
		config.seed = j.value("seed", config.seed);
		config.replicates = j.value("replicates", config.replicates);
		config.fit_len = j.value("fit_len", config.fit_len);
		config.cors_origin = j.value("cors_origin", config.cors_origin);
		if (j.contains("static_dir") && j["static_dir"].is_string()) {
			config.static_dir = j["static_dir"].get<std::string>();
		}
		if (j.contains("listen") && j["listen"].is_string()) {
			apply_listen(config, j["listen"].get<std::string>());
		}
	} catch (const Json::exception &e) {
		throw Error(ErrorKind::format, "invalid_config", std::string("invalid config: ") + e.what());
	}
	if (config.replicates == 0 || config.fit_len < 20) {
		throw Error(ErrorKind::format, "invalid_config", "invalid config: replicates >= 1 and fit_len >= 20 required");
	}
	return config;
}

void apply_listen(ServiceConfig &config, std::string_view listen) {
	const auto colon = listen.rfind(':');
	if (colon == std::string_view::npos) {
		throw Error(ErrorKind::invalid_argument, "invalid_listen", "listen address must be HOST:PORT");
	}
	int port = 0;
	const auto port_text = listen.substr(colon + 1);
	auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
	if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
		throw Error(ErrorKind::invalid_argument, "invalid_listen", "invalid port in listen address");
	}
	if (colon > 0) {
		config.host = std::string(listen.substr(0, colon));
	}
	config.port = port;
}

Service::Service(Dataset dataset, ServiceConfig config)
    : dataset_(std::move(dataset)), config_(std::move(config)), dataset_version_(dataset_.version()) {}

std::size_t Service::cached_forecasts() const {
	std::lock_guard lock(cache_mutex_);
	return forecast_cache_.size();
}

Json Service::meta() const {
	return {{"seed", config_.seed},
	        {"replicates", config_.replicates},
	        {"dataset_version", dataset_version_},
	        {"version", std::string(kVersion)}};
}

HttpResponse Service::handle(std::string_view method, std::string_view path, const QueryParams &query,
                             std::string_view body) const {
	try {
		Json payload;
		auto parse_body = [&] {
			try {
				return body_params(Json::parse(body.empty() ? std::string_view("{}") : body));
			} catch (const Json::parse_error &e) {
				throw invalid(std::string("malformed JSON body: ") + e.what());
			}
		};
		if (method == "GET" && path == "/v1/markets") {
			payload = get_markets();
		} else if (method == "GET" && path == "/v1/commodities") {
			payload = get_commodities(query);
		} else if (method == "GET" && path == "/v1/intervals") {
			payload = get_intervals(query);
		} else if (method == "GET" && path == "/v1/ranking") {
			payload = get_ranking(query);
		} else if (method == "POST" && path == "/v1/advise") {
			payload = post_advise(parse_body());
		} else if (method == "GET" && path == "/v1/forecast") {
			payload = get_forecast(query);
		} else if (method == "POST" && path == "/v1/backtest") {
			payload = post_backtest(parse_body());
		} else {
			return {404, error_json(404, "unknown_route", "no route for " + std::string(method) + " " +
			                                                   std::string(path))
			                 .dump()};
		}
		payload["meta"] = meta();
		return {200, payload.dump()};
	} catch (const Error &e) {
		const int status = http_status(e.kind());
		return {status, error_json(status, e.code(), e.what()).dump()};
	} catch (const std::exception &e) {
		return {500, error_json(500, "internal_error", e.what()).dump()};
	}
}

Json Service::get_markets() const { return {{"markets", dataset_.markets()}}; }

Json Service::get_commodities(const QueryParams &q) const {
	const auto &market = required(q, "market");
	if (!dataset_.has_market(market)) {
		throw Error(ErrorKind::not_found, "unknown_market", "no data for market " + market);
	}
	return {{"market", market}, {"commodities", dataset_.commodities(market)}};
}

Json Service::get_intervals(const QueryParams &q) const {
	const auto &series = dataset_.find(required(q, "market"), required(q, "commodity"));
	const auto ps = period_summaries(series, seasonal_query(q, config_));
	Json intervals = Json::array();
	for (const auto &s : ps.summaries) {
		intervals.push_back(to_json(s));
	}
	return {{"market", series.market()},
	        {"commodity", series.commodity()},
	        {"granularity", granularity_name(ps.panel.granularity())},
	        {"intervals", intervals},
	        {"skipped_periods", ps.skipped}};
}

Json Service::get_ranking(const QueryParams &q) const {
	const auto &series = dataset_.find(required(q, "market"), required(q, "commodity"));
	const auto ps = period_summaries(series, seasonal_query(q, config_));
	Json out = to_json(rank_periods(ps.summaries));
	out["market"] = series.market();
	out["commodity"] = series.commodity();
	out["granularity"] = granularity_name(ps.panel.granularity());
	out["skipped_periods"] = ps.skipped;
	return out;
}

Json Service::post_advise(const Json &body) const {
	const QueryParams q = body_params(body);
	const auto &series = dataset_.find(required(q, "market"), required(q, "commodity"));
	const auto &current = required(q, "current_period");
	std::optional<unsigned> max_distance;
	if (optional_param(q, "max_distance")) {
		max_distance = static_cast<unsigned>(int_param(q, "max_distance", 0, 0, 52));
	}
	const auto ps = period_summaries(series, seasonal_query(q, config_));
	const auto ranking = rank_periods(ps.summaries);
	Json out = to_json(advise_for(ps, ranking, current, max_distance));
	out["market"] = series.market();
	out["commodity"] = series.commodity();
	return out;
}

Json Service::get_forecast(const QueryParams &q) const {
	const auto &series = dataset_.find(required(q, "market"), required(q, "commodity"));
	const int h = static_cast<int>(int_param(q, "h", 8, 1, 60));
	std::optional<Date> end;
	if (auto text = optional_param(q, "end")) {
		end = parse_any_date(*text);
		if (!end) {
			throw invalid("end must be YYYY-MM-DD or DD-MM-YYYY");
		}
	}
	const Date end_date = end.value_or(series.last_date());
	const std::string key = series.market() + "|" + series.commodity() + "|" + end_date.iso() + "|" +
	                        std::to_string(h) + "|" + std::to_string(config_.seed);
	{
		std::lock_guard lock(cache_mutex_);
		if (auto it = forecast_cache_.find(key); it != forecast_cache_.end()) {
			return Json::parse(it->second);
		}
	}

	FitOptions fit;
	fit.restart_seed = config_.seed;
	const auto fc = forecast_series(series, end_date, h, config_.fit_len, fit);
	Json forecasts = Json::array();
	for (const auto &f : fc.result.forecasts) {
		forecasts.push_back(to_json(f));
	}
	Json out = {{"market", series.market()},
	            {"commodity", series.commodity()},
	            {"window",
	             {{"start", fc.window.start.iso()}, {"end", fc.window.end().iso()}, {"filled", fc.window.filled}}},
	            {"model", to_json(fc.result.model)},
	            {"forecasts", forecasts},
	            {"recommended_date", fc.result.recommended_date.iso()},
	            {"cache_key", key}};

	std::lock_guard lock(cache_mutex_);
	// Insert-or-get: a concurrent request may have filled the slot first.
	auto [it, inserted] = forecast_cache_.try_emplace(key, out.dump());
	return inserted ? out : Json::parse(it->second);
}

Json Service::post_backtest(const Json &body) const {
	const QueryParams q = body_params(body);
	const auto &series = dataset_.find(required(q, "market"), required(q, "commodity"));
	BacktestConfig config;
	config.fit_len = static_cast<int>(int_param(q, "fit_len", 100, 20, 3650));
	config.horizon = static_cast<int>(int_param(q, "horizon", 8, 1, 60));
	config.step = static_cast<int>(int_param(q, "step", 8, 1, 365));
	config.fit.restart_seed = config_.seed;
	Json out = to_json(rolling_backtest(series, config));
	out["market"] = series.market();
	out["commodity"] = series.commodity();
	return out;
}

void Service::serve() const {
	HttpFrontend frontend(*this);
	if (frontend.bind(config_.host, config_.port) < 0) {
		throw Error(ErrorKind::io, "listen_failed",
		            "cannot listen on " + config_.host + ":" + std::to_string(config_.port));
	}
	frontend.run();
}

HttpFrontend::HttpFrontend(const Service &service) : server_(std::make_unique<httplib::Server>()) {
	const std::string origin = service.config().cors_origin;
	auto with_cors = [origin](httplib::Response &res) {
		res.set_header("Access-Control-Allow-Origin", origin);
		res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
		res.set_header("Access-Control-Allow-Headers", "Content-Type");
	};
	auto dispatch = [&service, with_cors](const httplib::Request &req, httplib::Response &res) {
		QueryParams query;
		for (const auto &[k, v] : req.params) {
			query.emplace(k, v);
		}
		const auto r = service.handle(req.method, req.path, query, req.body);
		res.status = r.status;
		res.set_content(r.body, "application/json");
		with_cors(res);
	};
	server_->Get(R"(/v1/.*)", dispatch);
	server_->Post(R"(/v1/.*)", dispatch);
	server_->Options(R"(/v1/.*)", [with_cors](const httplib::Request &, httplib::Response &res) {
		res.status = 204;
		with_cors(res);
	});
	if (service.config().static_dir) {
		server_->set_mount_point("/", service.config().static_dir->string());
	}
}

HttpFrontend::~HttpFrontend() = default;

int HttpFrontend::bind(const std::string &host, int port) {
	if (port == 0) {
		return server_->bind_to_any_port(host);
	}
	return server_->bind_to_port(host, port) ? port : -1;
}

void HttpFrontend::run() { server_->listen_after_bind(); }

void HttpFrontend::stop() { server_->stop(); }

} // namespace favorit

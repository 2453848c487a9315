#include "favorit/json_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace favorit {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string csv_number(double v) {
	char buf[64];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, ptr);
}

double number_or(const Json &j, double fallback) { return j.is_number() ? j.get<double>() : fallback; }

} // namespace

Json to_json(const FlapSummary &s) {
	return {{"period", s.period_label},
	        {"position", s.period},
	        {"n_years", s.n_years},
	        {"mean", number(s.mean)},
	        {"sd", number(s.sd)},
	        {"lower", number(s.ci.lower)},
	        {"upper", number(s.ci.upper)},
	        {"level", s.ci.level},
	        {"flap", number(s.flap)}};
}

Json to_json(const Ranking &r) {
	Json ranks = Json::array();
	for (const auto &p : r.periods) {
		Json row = to_json(p.summary);
		row["rank"] = p.rank;
		ranks.push_back(std::move(row));
	}
	Json edges = Json::array();
	for (const auto &e : r.dominance_edges) {
		edges.push_back({{"winner", e.winner}, {"loser", e.loser}, {"rule", rule_name(e.rule)}});
	}
	return {{"ranks", ranks}, {"dominance_edges", edges}};
}

Json to_json(const Advice &a) {
	Json better = Json::array();
	for (const auto &p : a.better_periods) {
		better.push_back({{"period", p.summary.period_label}, {"rank", p.rank}, {"flap", number(p.summary.flap)}});
	}
	return {{"current_period", a.current_period},
	        {"current_rank", a.current_rank},
	        {"better_periods", better},
	        {"stay", a.stay}};
}

Json to_json(const ForecastPoint &f) {
	return {{"date", f.date.iso()}, {"predicted_price", number(f.predicted_price)}};
}

Json to_json(const ArimaModel &m) {
	return {{"order", {{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}}},
	        {"ar", m.ar},
	        {"ma", m.ma},
	        {"mean", m.mean ? Json(*m.mean) : Json(nullptr)},
	        {"sigma2", number(m.sigma2)},
	        {"css", number(m.css)},
	        {"n_fit", m.n_fit},
	        {"aicc", number(m.aicc)},
	        {"log_scale", m.log_scale},
	        {"training_tail", {{"levels", m.tail.levels}, {"residuals", m.tail.residuals}}}};
}

ArimaModel arima_model_from_json(const Json &j) {
	try {
		ArimaModel m;
		const auto &o = j.at("order");
		m.order = {o.at("p").get<int>(), o.at("d").get<int>(), o.at("q").get<int>()};
		validate_order(m.order);
		m.ar = j.at("ar").get<std::vector<double>>();
		m.ma = j.at("ma").get<std::vector<double>>();
		if (j.contains("mean") && j["mean"].is_number()) {
			m.mean = j["mean"].get<double>();
		}
		m.sigma2 = number_or(j.at("sigma2"), 0.0);
		m.css = number_or(j.value("css", Json(0.0)), 0.0);
		m.n_fit = j.at("n_fit").get<std::size_t>();
		m.aicc = number_or(j.at("aicc"), std::numeric_limits<double>::infinity());
		m.log_scale = j.value("log_scale", false);
		m.tail.levels = j.at("training_tail").at("levels").get<std::vector<double>>();
		m.tail.residuals = j.at("training_tail").at("residuals").get<std::vector<double>>();
		if (m.ar.size() != static_cast<std::size_t>(m.order.p) || m.ma.size() != static_cast<std::size_t>(m.order.q) ||
		    m.tail.residuals.size() != m.ma.size() ||
		    m.tail.levels.size() < std::max<std::size_t>(1, m.ar.size() + static_cast<std::size_t>(m.order.d))) {
			throw Error(ErrorKind::format, "invalid_model", "model JSON is inconsistent with its order");
		}
		return m;
	} catch (const Json::exception &e) {
		throw Error(ErrorKind::format, "invalid_model", std::string("invalid model JSON: ") + e.what());
	}
}

Json to_json(const PrimReport &r) {
	Json window = Json::array();
	for (const auto &d : r.window) {
		window.push_back(d.iso());
	}
	return {{"window", window},
	        {"recommended_date", r.recommended_date.iso()},
	        {"predicted_at_recommendation",
	         r.predicted_at_recommendation ? number(*r.predicted_at_recommendation) : Json(nullptr)},
	        {"realized", number(r.realized)},
	        {"benchmark", number(r.benchmark)},
	        {"gain", number(r.gain)},
	        {"success", r.success}};
}

Json to_json(const BacktestReport &r) {
	Json windows = Json::array();
	for (const auto &w : r.windows) {
		Json forecasts = Json::array();
		for (const auto &f : w.forecasts) {
			forecasts.push_back(to_json(f));
		}
		Json actuals = Json::array();
		for (const auto &a : w.actuals) {
			actuals.push_back({{"date", a.date.iso()}, {"price", number(a.price)}});
		}
		windows.push_back({{"anchor", w.anchor.iso()},
		                   {"order", {{"p", w.order.p}, {"d", w.order.d}, {"q", w.order.q}}},
		                   {"forecasts", forecasts},
		                   {"actuals", actuals},
		                   {"prim", to_json(w.prim)}});
	}
	Json skipped = Json::array();
	for (const auto &s : r.skipped) {
		skipped.push_back({{"anchor", s.anchor.iso()}, {"reason", s.reason}});
	}
	return {{"config", {{"fit_len", r.config.fit_len}, {"horizon", r.config.horizon}, {"step", r.config.step}}},
	        {"windows", windows},
	        {"skipped", skipped},
	        {"aggregates",
	         {{"count", r.aggregates.count},
	          {"mean_gain", number(r.aggregates.mean_gain)},
	          {"median_gain", number(r.aggregates.median_gain)},
	          {"success_rate", number(r.aggregates.success_rate)}}}};
}

Json to_json(const YearExtremes &x, const SeasonalPanel &panel) {
	return {{"year", x.year},
	        {"min_period", panel.period_label(x.min_period)},
	        {"min_price", number(x.min_price)},
	        {"max_period", panel.period_label(x.max_period)},
	        {"max_price", number(x.max_price)},
	        {"ratio", number(x.ratio)}};
}

Json to_json(const CleaningReport &r) {
	return {{"records_in", r.records_in},
	        {"dropped_nonpositive", r.dropped_nonpositive},
	        {"merged", r.merged},
	        {"kept", r.kept}};
}

std::string backtest_csv(const BacktestReport &r) {
	std::string out = "anchor,p,d,q,recommended_date,predicted,realized,benchmark,gain,success\n";
	for (const auto &w : r.windows) {
		out += w.anchor.iso() + ',' + std::to_string(w.order.p) + ',' + std::to_string(w.order.d) + ',' +
		       std::to_string(w.order.q) + ',' + w.prim.recommended_date.iso() + ',' +
		       (w.prim.predicted_at_recommendation ? csv_number(*w.prim.predicted_at_recommendation) : "") + ',' +
		       csv_number(w.prim.realized) + ',' + csv_number(w.prim.benchmark) + ',' + csv_number(w.prim.gain) +
		       ',' + (w.prim.success ? "true" : "false") + '\n';
	}
	return out;
}

Json error_json(int status, const std::string &code, const std::string &message) {
	return {{"error", {{"status", status}, {"code", code}, {"message", message}}}};
}

int http_status(ErrorKind kind) {
	switch (kind) {
	case ErrorKind::not_found:
		return 404;
	case ErrorKind::insufficient_data:
	case ErrorKind::gap_too_large:
		return 409;
	case ErrorKind::invalid_argument:
	case ErrorKind::format:
		return 422;
	case ErrorKind::unsupported_version:
	case ErrorKind::io:
		return 500;
	}
	return 500;
}

} // namespace favorit

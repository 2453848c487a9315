#include "favorit/analysis.hpp"

#include "favorit/error.hpp"

namespace favorit {

std::uint64_t period_seed(std::uint64_t seed, unsigned period) {
	return seed + 0x9e3779b97f4a7c15ull * period;
}

PeriodSummaries period_summaries(const PriceSeries &series, const SeasonalQuery &query) {
	PeriodSummaries out{aggregate_panel(series, query.granularity, query.window), {}, {}};
	for (unsigned period = 1; period <= out.panel.period_count(); ++period) {
		const auto values = out.panel.values_for_period(period);
		const auto label = out.panel.period_label(period);
		if (values.size() < 2) {
			out.skipped.push_back(label);
			continue;
		}
		out.summaries.push_back(
		    summarize_period(label, period, values, query.replicates, period_seed(query.seed, period), query.level));
	}
	if (out.summaries.empty()) {
		throw Error(ErrorKind::insufficient_data, "insufficient_data",
		            "no period of " + series.market() + "/" + series.commodity() + " has two or more years of data");
	}
	return out;
}

CalendarShape calendar_shape(Granularity granularity) {
	return granularity == Granularity::month ? CalendarShape{12} : CalendarShape{0};
}

Advice advise_for(const PeriodSummaries &ps, const Ranking &ranking, std::string_view current_period,
                  std::optional<unsigned> max_distance) {
	const auto period = ps.panel.period_from_label(current_period);
	if (!period) {
		throw Error(ErrorKind::not_found, "unknown_period", "unknown period " + std::string(current_period));
	}
	const auto label = ps.panel.period_label(*period);
	if (!ranking.find(label)) {
		throw Error(ErrorKind::insufficient_data, "insufficient_data",
		            "period " + label + " has fewer than two years of data");
	}
	return advise_shift(ranking, label, max_distance, calendar_shape(ps.panel.granularity()));
}

SeriesForecast forecast_series(const PriceSeries &series, std::optional<Date> end, int horizon, int fit_len,
                               const FitOptions &options) {
	if (horizon < 1) {
		throw Error(ErrorKind::invalid_argument, "invalid_horizon", "horizon must be at least 1");
	}
	SeriesForecast out;
	out.window = slice_recent(series, end.value_or(series.last_date()), fit_len);
	out.result = forecast_window(out.window, horizon, options);
	return out;
}

} // namespace favorit

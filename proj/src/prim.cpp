#include "favorit/prim.hpp"

#include "favorit/error.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace favorit {

Date recommend_market_day(std::span<const ForecastPoint> forecasts) {
	if (forecasts.empty()) {
		throw Error(ErrorKind::invalid_argument, "empty_forecast", "no forecasts to choose from");
	}
	const ForecastPoint *best = &forecasts.front();
	for (const auto &f : forecasts) {
		if (f.predicted_price > best->predicted_price ||
		    (f.predicted_price == best->predicted_price && f.date < best->date)) {
			best = &f;
		}
	}
	return best->date;
}

PrimReport evaluate_prim(Date recommended_date, std::span<const PricePoint> actuals,
                         std::optional<double> predicted_at_recommendation) {
	if (actuals.empty()) {
		throw Error(ErrorKind::invalid_argument, "empty_actuals", "no actual prices for the window");
	}
	PrimReport report;
	report.recommended_date = recommended_date;
	report.predicted_at_recommendation = predicted_at_recommendation;
	double sum = 0.0;
	bool found = false;
	for (const auto &a : actuals) {
		report.window.push_back(a.date);
		sum += a.price;
		if (a.date == recommended_date) {
			report.realized = a.price;
			found = true;
		}
	}
	if (!found) {
		throw Error(ErrorKind::invalid_argument, "date_not_in_window",
		            "recommended date " + recommended_date.iso() + " has no actual price");
	}
	report.benchmark = sum / static_cast<double>(actuals.size());
	report.gain = report.realized - report.benchmark;
	report.success = report.gain > 0.0;
	return report;
}

WindowForecast forecast_window(const DailyWindow &window, int horizon, const FitOptions &options) {
	WindowForecast out;
	out.model = select_order(window.values, options).model;
	out.forecasts = forecast_h(out.model, horizon, window.end() + 1);
	if (!out.forecasts.empty()) {
		out.recommended_date = recommend_market_day(out.forecasts);
	}
	return out;
}

BacktestAggregates aggregate_windows(std::span<const BacktestWindow> windows) {
	BacktestAggregates agg;
	agg.count = windows.size();
	if (windows.empty()) {
		return agg;
	}
	std::vector<double> gains;
	std::size_t successes = 0;
	double sum = 0.0;
	for (const auto &w : windows) {
		gains.push_back(w.prim.gain);
		sum += w.prim.gain;
		successes += w.prim.success ? 1 : 0;
	}
	std::sort(gains.begin(), gains.end());
	const std::size_t n = gains.size();
	agg.mean_gain = sum / static_cast<double>(n);
	agg.median_gain = n % 2 == 1 ? gains[n / 2] : 0.5 * (gains[n / 2 - 1] + gains[n / 2]);
	agg.success_rate = static_cast<double>(successes) / static_cast<double>(n);
	return agg;
}

BacktestReport rolling_backtest(const PriceSeries &series, const BacktestConfig &config) {
	if (config.fit_len < 1 || config.horizon < 1 || config.step < 1) {
		throw Error(ErrorKind::invalid_argument, "invalid_backtest",
		            "fit_len, horizon and step must be positive");
	}
	const int span_days = (series.last_date() - series.first_date()) + 1;
	const int needed = config.fit_len + config.horizon;
	if (span_days < needed) {
		throw Error(ErrorKind::insufficient_data, "insufficient_history",
		            "series covers " + std::to_string(span_days) + " days; backtest needs at least " +
		                std::to_string(needed));
	}

	std::vector<Date> anchors;
	for (Date anchor = series.first_date() + (config.fit_len - 1); anchor + config.horizon <= series.last_date();
	     anchor += config.step) {
		anchors.push_back(anchor);
	}

	struct Slot {
		std::optional<BacktestWindow> window;
		std::optional<SkippedWindow> skipped;
	};
	std::vector<Slot> slots(anchors.size());

	auto run_one = [&](std::size_t i) {
		const Date anchor = anchors[i];
		try {
			const DailyWindow full = slice_recent(series, anchor + config.horizon, needed);
			const DailyWindow fit{full.start,
			                      std::vector<double>(full.values.begin(), full.values.begin() + config.fit_len), 0};
			WindowForecast fc = forecast_window(fit, config.horizon, config.fit);

			BacktestWindow w;
			w.anchor = anchor;
			w.order = fc.model.order;
			w.forecasts = std::move(fc.forecasts);
			for (int k = 0; k < config.horizon; ++k) {
				w.actuals.push_back({anchor + (k + 1), full.values[static_cast<std::size_t>(config.fit_len + k)]});
			}
			const auto rec = std::find_if(w.forecasts.begin(), w.forecasts.end(),
			                              [&](const ForecastPoint &f) { return f.date == fc.recommended_date; });
			w.prim = evaluate_prim(fc.recommended_date, w.actuals, rec->predicted_price);
			slots[i].window = std::move(w);
		} catch (const Error &e) {
			slots[i].skipped = SkippedWindow{anchor, e.code() + ": " + e.what()};
		}
	};

	unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
	threads = std::min<unsigned>(threads, static_cast<unsigned>(anchors.size()));
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for (std::size_t i = next++; i < anchors.size(); i = next++) {
			run_one(i);
		}
	};
	if (threads <= 1) {
		worker();
	} else {
		std::vector<std::jthread> pool;
		for (unsigned t = 0; t < threads; ++t) {
			pool.emplace_back(worker);
		}
	}

	BacktestReport report;
	report.config = config;
	for (auto &slot : slots) {
		if (slot.window) {
			report.windows.push_back(std::move(*slot.window));
		} else if (slot.skipped) {
			report.skipped.push_back(std::move(*slot.skipped));
		}
	}
	report.aggregates = aggregate_windows(report.windows);
	return report;
}

} // namespace favorit

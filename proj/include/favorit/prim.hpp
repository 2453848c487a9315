#pragma once

#include "favorit/forecast.hpp"
#include "favorit/market_data.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace favorit {

/// Date of the highest predicted price; the earliest date wins exact ties.
Date recommend_market_day(std::span<const ForecastPoint> forecasts);

/// Price realization improvement for one decision window. The benchmark is
/// the expected price of picking a day at random, i.e. the window mean.
struct PrimReport {
	std::vector<Date> window;
	Date recommended_date;
	std::optional<double> predicted_at_recommendation;
	double realized = 0.0;
	double benchmark = 0.0;
	double gain = 0.0; ///< realized - benchmark
	bool success = false; ///< gain > 0
};

PrimReport evaluate_prim(Date recommended_date, std::span<const PricePoint> actuals,
                         std::optional<double> predicted_at_recommendation = std::nullopt);

/// Selected model plus dated forecasts for the days after a fit window.
struct WindowForecast {
	ArimaModel model;
	std::vector<ForecastPoint> forecasts;
	Date recommended_date;
};

/// choose_differencing -> select_order -> forecast_h on one regular window.
WindowForecast forecast_window(const DailyWindow &window, int horizon, const FitOptions &options = {});

struct BacktestConfig {
	int fit_len = 100;
	int horizon = 8;
	int step = 8;
	FitOptions fit;
	/// 0 = hardware concurrency.
	unsigned threads = 0;
};

struct BacktestWindow {
	Date anchor; ///< last day of the fit window
	ArimaOrder order;
	std::vector<ForecastPoint> forecasts;
	std::vector<PricePoint> actuals;
	PrimReport prim;
};

struct SkippedWindow {
	Date anchor;
	std::string reason;
};

struct BacktestAggregates {
	std::size_t count = 0;
	double mean_gain = 0.0;
	double median_gain = 0.0;
	double success_rate = 0.0;
};

struct BacktestReport {
	BacktestConfig config;
	std::vector<BacktestWindow> windows; ///< ordered by anchor
	std::vector<SkippedWindow> skipped;
	BacktestAggregates aggregates;
};

BacktestAggregates aggregate_windows(std::span<const BacktestWindow> windows);

/// Slides a fit_len + horizon window across the series in steps of `step`
/// days, forecasting from the first fit_len days and scoring the
/// recommendation on the held-out horizon. Windows failing the gap rule
/// are skipped and reported.
BacktestReport rolling_backtest(const PriceSeries &series, const BacktestConfig &config = {});

} // namespace favorit

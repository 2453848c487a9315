#pragma once

#include "favorit/bootstrap.hpp"
#include "favorit/forecast.hpp"
#include "favorit/market_data.hpp"
#include "favorit/prim.hpp"
#include "favorit/ranking.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Compositions shared by the command line tool and the HTTP service.
namespace favorit {

struct SeasonalQuery {
	Granularity granularity = Granularity::month;
	std::optional<WeekWindow> window;
	std::size_t replicates = kDefaultReplicates;
	std::uint64_t seed = 0;
	double level = 0.95;
};

struct PeriodSummaries {
	SeasonalPanel panel;
	std::vector<FlapSummary> summaries;   ///< calendar order
	std::vector<std::string> skipped;     ///< periods with fewer than two years
};

/// Bootstrap seed for one period; each period gets its own stream.
std::uint64_t period_seed(std::uint64_t seed, unsigned period);

/// aggregate_panel -> summarize_period for each period with >= 2 years.
/// Throws insufficient_data when no period qualifies.
PeriodSummaries period_summaries(const PriceSeries &series, const SeasonalQuery &query);

CalendarShape calendar_shape(Granularity granularity);

/// Advice for a period label. Unknown labels throw not_found; known labels
/// lacking data throw insufficient_data.
Advice advise_for(const PeriodSummaries &ps, const Ranking &ranking, std::string_view current_period,
                  std::optional<unsigned> max_distance);

struct SeriesForecast {
	DailyWindow window;
	WindowForecast result;
};

/// slice_recent(end, fit_len) followed by forecast_window. `end` defaults
/// to the last observed date.
SeriesForecast forecast_series(const PriceSeries &series, std::optional<Date> end, int horizon, int fit_len = 100,
                               const FitOptions &options = {});

} // namespace favorit

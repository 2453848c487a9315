#pragma once

#include "favorit/bootstrap.hpp"
#include "favorit/prim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace favorit {

/// Exit codes: 0 success, 1 usage error, 2 data error.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Published-style monthly summaries: `period,mean,lower,upper,flap[,n_years]`.
/// sd is recovered as mean / flap; n_years defaults to 11.
std::vector<FlapSummary> read_summaries_csv(std::istream &in);

/// Decision-window rows: `date,predicted_price,actual_price` (DD-MM-YYYY).
struct PredictedActual {
	std::vector<ForecastPoint> predicted;
	std::vector<PricePoint> actual;
};
PredictedActual read_predicted_actual_csv(std::istream &in);

} // namespace favorit

#pragma once

#include "favorit/bootstrap.hpp"
#include "favorit/error.hpp"
#include "favorit/forecast.hpp"
#include "favorit/market_data.hpp"
#include "favorit/prim.hpp"
#include "favorit/ranking.hpp"

#include <json.hpp>

#include <string>

// JSON shapes shared by the CLI and the HTTP service. Non-finite numbers
// (an infinite FLAP index, an undefined AICc) are written as null.
namespace favorit {

using Json = nlohmann::json;

Json to_json(const FlapSummary &s);
Json to_json(const Ranking &r);
Json to_json(const Advice &a);
Json to_json(const ForecastPoint &f);
Json to_json(const ArimaModel &m);
Json to_json(const PrimReport &r);
Json to_json(const BacktestReport &r);
Json to_json(const YearExtremes &x, const SeasonalPanel &panel);
Json to_json(const CleaningReport &r);

ArimaModel arima_model_from_json(const Json &j);

/// One row per scored window.
std::string backtest_csv(const BacktestReport &r);

/// {"error": {"status", "code", "message"}}
Json error_json(int status, const std::string &code, const std::string &message);

/// HTTP status for an error kind (404, 409, 422, 500).
int http_status(ErrorKind kind);

} // namespace favorit

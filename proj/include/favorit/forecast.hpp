#pragma once

#include "favorit/date.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace favorit {

struct ArimaOrder {
	int p = 0;
	int d = 0;
	int q = 0;

	bool operator==(const ArimaOrder &) const = default;
	std::string to_string() const;
};

inline constexpr int kMaxArmaOrder = 3;
inline constexpr int kMaxDifferencing = 2;

/// Throws invalid_argument unless p, q in [0, 3] and d in [0, 2].
void validate_order(const ArimaOrder &order);

/// Levels and residuals needed to continue the recursion past the fit window.
struct TrainingTail {
	std::vector<double> levels;    ///< last p + d levels (at least one), oldest first
	std::vector<double> residuals; ///< last q one-step residuals, oldest first
};

/// ARIMA(p, d, q) on the d-times differenced series w:
///   w_t - mu = sum_i ar_i (w_{t-i} - mu) + e_t + sum_j ma_j e_{t-j}
/// with mu present only when d == 0.
struct ArimaModel {
	ArimaOrder order;
	std::vector<double> ar;
	std::vector<double> ma;
	std::optional<double> mean;
	double sigma2 = 0.0;
	double css = 0.0;
	std::size_t n_fit = 0;
	double aicc = 0.0;
	TrainingTail tail;
	bool log_scale = false;
};

struct FitOptions {
	/// Leading differenced observations excluded from the CSS sum; defaults to p.
	/// Order selection sets it to the grid's largest p so scores are comparable.
	std::optional<std::size_t> conditioning;
	std::uint64_t restart_seed = 0x5eed;
	int restarts = 3;
	/// Fit on log prices and exponentiate forecasts.
	bool log_transform = false;
};

struct ForecastPoint {
	Date date;
	double predicted_price = 0.0;

	bool operator==(const ForecastPoint &) const = default;
};

/// d-times differenced copy.
std::vector<double> difference(std::span<const double> series, int d);

/// Smallest d in {0, 1, 2} such that differencing once more would not at
/// least halve the sample variance. Needs 20 points.
int choose_differencing(std::span<const double> series);

/// Stationarity check via the step-down (Schur-Cohn) recursion: true when
/// every root of 1 - c_1 z - ... - c_k z^k lies strictly outside the unit circle.
bool is_stationary(std::span<const double> coeffs);
/// Invertibility of 1 + c_1 z + ... + c_k z^k.
bool is_invertible(std::span<const double> coeffs);

/// Maps unconstrained values to coefficients of a stationary AR polynomial
/// (tanh to partial autocorrelations, then Durbin-Levinson).
std::vector<double> partial_to_ar(std::span<const double> raw);

/// Conditional sum of squares of one-step residuals on the differenced
/// series; residuals before `conditioning` are taken as zero.
double conditional_sum_of_squares(std::span<const double> w, std::span<const double> ar, std::span<const double> ma,
                                  double mean, std::size_t conditioning, std::vector<double> *residuals = nullptr);

ArimaModel fit_arima(std::span<const double> series, const ArimaOrder &order, const FitOptions &options = {});

struct CandidateFit {
	ArimaOrder order;
	std::optional<double> aicc; ///< empty when the fit failed
	std::string error;
};

struct OrderSelection {
	ArimaModel model;
	std::vector<CandidateFit> candidates;
};

/// Full grid p, q in [0, 3] at the given d.
std::vector<ArimaOrder> default_grid(int d);

/// Fits every grid member and keeps the lowest AICc; ties go to smaller
/// p + q, then smaller q. Fits with an AR or MA root of modulus below 1.01
/// count as failed candidates.
OrderSelection select_order(std::span<const double> series, std::span<const ArimaOrder> grid,
                            const FitOptions &options = {});
/// Grid at d = choose_differencing(series).
OrderSelection select_order(std::span<const double> series, const FitOptions &options = {});

/// h point forecasts dated start_date, start_date + 1, ...
std::vector<ForecastPoint> forecast_h(const ArimaModel &model, int h, Date start_date);

} // namespace favorit

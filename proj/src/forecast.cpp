#include "favorit/forecast.hpp"

#include "favorit/error.hpp"
#include "favorit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <tuple>

namespace favorit {

namespace {

// tanh(7) = 0.9999983; keeps partial autocorrelations strictly inside (-1, 1).
constexpr double kRawLimit = 4.0;

// Candidates with an AR or MA root this close to the unit circle are
// degenerate (near-cancelling or near-non-invertible) and skipped during
// order selection.
constexpr double kRootMargin = 1.01;

bool roots_clear_margin(std::span<const double> coeffs, double sign) {
	std::vector<double> scaled(coeffs.size());
	double factor = 1.0;
	for (std::size_t i = 0; i < coeffs.size(); ++i) {
		factor *= kRootMargin;
		scaled[i] = sign * coeffs[i] * factor;
	}
	return is_stationary(scaled);
}

double sample_variance(std::span<const double> x) {
	if (x.size() < 2) {
		return 0.0;
	}
	double m = 0.0;
	for (double v : x) {
		m += v;
	}
	m /= static_cast<double>(x.size());
	double ss = 0.0;
	for (double v : x) {
		ss += (v - m) * (v - m);
	}
	return ss / static_cast<double>(x.size() - 1);
}

double uniform01(std::mt19937_64 &engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

double aicc_score(double css, std::size_t n_fit, int n_params) {
	const double n = static_cast<double>(n_fit);
	const double k = static_cast<double>(n_params);
	if (n - k - 1.0 <= 0.0) {
		return std::numeric_limits<double>::infinity();
	}
	const double sigma2 = std::max(css / n, std::numeric_limits<double>::min());
	const double loglik = -0.5 * n * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0);
	return -2.0 * loglik + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0);
}

} // namespace

std::string ArimaOrder::to_string() const {
	return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

void validate_order(const ArimaOrder &order) {
	if (order.p < 0 || order.p > kMaxArmaOrder || order.q < 0 || order.q > kMaxArmaOrder || order.d < 0 ||
	    order.d > kMaxDifferencing) {
		throw Error(ErrorKind::invalid_argument, "invalid_order", "unsupported ARIMA order " + order.to_string());
	}
}

std::vector<double> difference(std::span<const double> series, int d) {
	std::vector<double> out(series.begin(), series.end());
	for (int k = 0; k < d && !out.empty(); ++k) {
		for (std::size_t i = 0; i + 1 < out.size(); ++i) {
			out[i] = out[i + 1] - out[i];
		}
		out.pop_back();
	}
	return out;
}

int choose_differencing(std::span<const double> series) {
	if (series.size() < 20) {
		throw Error(ErrorKind::insufficient_data, "series_too_short", "series too short to choose differencing");
	}
	int d = 0;
	double var = sample_variance(series);
	std::vector<double> current(series.begin(), series.end());
	while (d < kMaxDifferencing) {
		auto next = difference(current, 1);
		const double next_var = sample_variance(next);
		if (!(next_var < 0.5 * var)) {
			break;
		}
		++d;
		var = next_var;
		current = std::move(next);
	}
	return d;
}

bool is_stationary(std::span<const double> coeffs) {
	std::vector<double> a(coeffs.begin(), coeffs.end());
	for (std::size_t k = a.size(); k > 0; --k) {
		const double kappa = a[k - 1];
		if (!(std::abs(kappa) < 1.0)) {
			return false;
		}
		const double denom = 1.0 - kappa * kappa;
		std::vector<double> next(k - 1);
		for (std::size_t i = 0; i + 1 < k; ++i) {
			next[i] = (a[i] + kappa * a[k - 2 - i]) / denom;
		}
		a = std::move(next);
	}
	return true;
}

bool is_invertible(std::span<const double> coeffs) {
	std::vector<double> negated(coeffs.size());
	std::transform(coeffs.begin(), coeffs.end(), negated.begin(), [](double c) { return -c; });
	return is_stationary(negated);
}

std::vector<double> partial_to_ar(std::span<const double> raw) {
	const std::size_t p = raw.size();
	std::vector<double> phi(p);
	for (std::size_t i = 0; i < p; ++i) {
		phi[i] = std::tanh(std::clamp(raw[i], -kRawLimit, kRawLimit));
	}
	std::vector<double> work(phi);
	for (std::size_t j = 1; j < p; ++j) {
		for (std::size_t k = 0; k < j; ++k) {
			work[k] = phi[k] - phi[j] * phi[j - k - 1];
		}
		std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(j), phi.begin());
	}
	return phi;
}

double conditional_sum_of_squares(std::span<const double> w, std::span<const double> ar, std::span<const double> ma,
                                  double mean, std::size_t conditioning, std::vector<double> *residuals) {
	const std::size_t n = w.size();
	const std::size_t p = ar.size();
	const std::size_t q = ma.size();
	std::vector<double> local;
	std::vector<double> &e = residuals ? *residuals : local;
	e.assign(n, 0.0);
	double css = 0.0;
	for (std::size_t t = std::max(conditioning, p); t < n; ++t) {
		double pred = mean;
		for (std::size_t i = 0; i < p; ++i) {
			pred += ar[i] * (w[t - 1 - i] - mean);
		}
		for (std::size_t j = 0; j < q && j < t; ++j) {
			pred += ma[j] * e[t - 1 - j];
		}
		e[t] = w[t] - pred;
		css += e[t] * e[t];
	}
	return css;
}

ArimaModel fit_arima(std::span<const double> series, const ArimaOrder &order, const FitOptions &options) {
	validate_order(order);
	const auto p = static_cast<std::size_t>(order.p);
	const auto q = static_cast<std::size_t>(order.q);
	const std::size_t min_len = static_cast<std::size_t>(order.d) + 10 * std::max<std::size_t>(1, p + q);
	if (series.size() < min_len) {
		throw Error(ErrorKind::insufficient_data, "series_too_short",
		            "series too short for ARIMA" + order.to_string() + ": need " + std::to_string(min_len) +
		                " points, have " + std::to_string(series.size()));
	}
	std::vector<double> y(series.begin(), series.end());
	for (double &v : y) {
		if (!std::isfinite(v)) {
			throw Error(ErrorKind::invalid_argument, "non_finite", "series contains non-finite values");
		}
		if (options.log_transform) {
			if (!(v > 0.0)) {
				throw Error(ErrorKind::invalid_argument, "non_positive", "log transform needs positive prices");
			}
			v = std::log(v);
		}
	}

	const std::vector<double> w = difference(y, order.d);
	const std::size_t conditioning = options.conditioning.value_or(p);
	if (conditioning < p || conditioning + 1 >= w.size()) {
		throw Error(ErrorKind::invalid_argument, "invalid_conditioning", "conditioning must lie in [p, n - 2]");
	}
	const bool has_mean = order.d == 0;
	const std::size_t dim = p + q + (has_mean ? 1 : 0);

	// The mean is searched as w_bar + scale * u so the search space is
	// invariant to affine changes of the price unit.
	double w_bar = 0.0;
	for (double v : w) {
		w_bar += v;
	}
	w_bar /= static_cast<double>(w.size());
	double scale = std::sqrt(sample_variance(w));
	if (!(scale > 0.0)) {
		scale = std::abs(w_bar) > 0.0 ? std::abs(w_bar) : 1.0;
	}

	struct Params {
		std::vector<double> ar, ma;
		double mean = 0.0;
	};
	auto unpack = [&](std::span<const double> u) {
		Params out;
		out.ar = partial_to_ar(u.subspan(0, p));
		out.ma = partial_to_ar(u.subspan(p, q));
		for (double &c : out.ma) {
			c = -c;
		}
		out.mean = has_mean ? w_bar + scale * u[p + q] : 0.0;
		return out;
	};
	const Objective objective = [&](std::span<const double> u) {
		const Params prm = unpack(u);
		return conditional_sum_of_squares(w, prm.ar, prm.ma, prm.mean, conditioning);
	};

	NelderMeadOptions nm;
	nm.rel_tol = 1e-8;
	nm.max_evaluations = 500 * (p + q + 1);

	std::vector<double> best_x(dim, 0.0);
	double best_value = objective(best_x);
	if (dim > 0) {
		std::mt19937_64 engine(options.restart_seed);
		for (int r = 0; r < std::max(1, options.restarts); ++r) {
			std::vector<double> start = best_x;
			if (r > 0) {
				for (double &v : start) {
					v += uniform01(engine) - 0.5;
				}
			}
			const auto res = nelder_mead(objective, start, nm);
			if (res.value < best_value) {
				best_value = res.value;
				best_x = res.x;
			}
		}
	}

	const Params prm = unpack(best_x);
	ArimaModel model;
	model.order = order;
	model.ar = prm.ar;
	model.ma = prm.ma;
	if (has_mean) {
		model.mean = prm.mean;
	}
	std::vector<double> residuals;
	model.css = conditional_sum_of_squares(w, model.ar, model.ma, prm.mean, conditioning, &residuals);
	model.n_fit = w.size() - conditioning;
	model.sigma2 = model.css / static_cast<double>(model.n_fit);
	model.aicc = aicc_score(model.css, model.n_fit, static_cast<int>(dim) + 1);
	model.log_scale = options.log_transform;

	const std::size_t keep_levels = std::min(y.size(), std::max<std::size_t>(1, p + static_cast<std::size_t>(order.d)));
	model.tail.levels.assign(y.end() - static_cast<std::ptrdiff_t>(keep_levels), y.end());
	model.tail.residuals.assign(residuals.end() - static_cast<std::ptrdiff_t>(q), residuals.end());

	if (!is_stationary(model.ar) || !is_invertible(model.ma)) {
		throw Error(ErrorKind::invalid_argument, "inadmissible_fit", "fitted model violates the root conditions");
	}
	return model;
}

std::vector<ArimaOrder> default_grid(int d) {
	std::vector<ArimaOrder> grid;
	for (int p = 0; p <= kMaxArmaOrder; ++p) {
		for (int q = 0; q <= kMaxArmaOrder; ++q) {
			grid.push_back({p, d, q});
		}
	}
	return grid;
}

OrderSelection select_order(std::span<const double> series, std::span<const ArimaOrder> grid,
                            const FitOptions &options) {
	if (grid.empty()) {
		throw Error(ErrorKind::invalid_argument, "empty_grid", "order grid is empty");
	}
	FitOptions opts = options;
	if (!opts.conditioning) {
		int max_p = 0;
		for (const auto &o : grid) {
			max_p = std::max(max_p, o.p);
		}
		opts.conditioning = static_cast<std::size_t>(max_p);
	}

	OrderSelection selection;
	std::optional<ArimaModel> best;
	auto key = [](const ArimaModel &m) { return std::tuple(m.aicc, m.order.p + m.order.q, m.order.q); };
	for (const auto &order : grid) {
		CandidateFit candidate{order, std::nullopt, {}};
		try {
			ArimaModel model = fit_arima(series, order, opts);
			if (!roots_clear_margin(model.ar, 1.0) || !roots_clear_margin(model.ma, -1.0)) {
				throw Error(ErrorKind::invalid_argument, "near_unit_root",
				            "ARIMA" + order.to_string() + " has a root within 1% of the unit circle");
			}
			candidate.aicc = model.aicc;
			if (!best || key(model) < key(*best)) {
				best = std::move(model);
			}
		} catch (const Error &e) {
			candidate.error = e.what();
		}
		selection.candidates.push_back(std::move(candidate));
	}
	if (!best) {
		throw Error(ErrorKind::insufficient_data, "all_fits_failed",
		            "no candidate ARIMA order could be fitted: " + selection.candidates.front().error);
	}
	selection.model = std::move(*best);
	return selection;
}

OrderSelection select_order(std::span<const double> series, const FitOptions &options) {
	const auto grid = default_grid(choose_differencing(series));
	return select_order(series, grid, options);
}

std::vector<ForecastPoint> forecast_h(const ArimaModel &model, int h, Date start_date) {
	if (h < 0) {
		throw Error(ErrorKind::invalid_argument, "invalid_horizon", "horizon must be nonnegative");
	}
	std::vector<ForecastPoint> out;
	if (h == 0) {
		return out;
	}
	const auto p = model.ar.size();
	const int d = model.order.d;
	const double mu = model.mean.value_or(0.0);

	// stage k holds the k-times differenced tail; lasts[k] is its final value.
	std::vector<double> stage = model.tail.levels;
	std::vector<double> lasts;
	for (int k = 0; k < d; ++k) {
		lasts.push_back(stage.back());
		stage = difference(stage, 1);
	}
	std::vector<double> w_hist(stage.end() - static_cast<std::ptrdiff_t>(std::min(p, stage.size())), stage.end());
	std::vector<double> e_hist = model.tail.residuals;

	for (int step = 0; step < h; ++step) {
		double w_next = mu;
		for (std::size_t i = 0; i < p; ++i) {
			w_next += model.ar[i] * (w_hist[w_hist.size() - 1 - i] - mu);
		}
		for (std::size_t j = 0; j < model.ma.size(); ++j) {
			w_next += model.ma[j] * e_hist[e_hist.size() - 1 - j];
		}
		w_hist.push_back(w_next);
		e_hist.push_back(0.0);

		double level = w_next;
		for (int k = d - 1; k >= 0; --k) {
			lasts[static_cast<std::size_t>(k)] += level;
			level = lasts[static_cast<std::size_t>(k)];
		}
		out.push_back({start_date + step, model.log_scale ? std::exp(level) : level});
	}
	return out;
}

} // namespace favorit

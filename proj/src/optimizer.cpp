#include "favorit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace favorit {

namespace {

double safe_eval(const Objective &f, std::span<const double> x, std::size_t &count) {
	++count;
	const double v = f(x);
	return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

} // namespace

NelderMeadResult nelder_mead(const Objective &f, std::vector<double> start, const NelderMeadOptions &options) {
	const std::size_t n = start.size();
	NelderMeadResult result;
	if (n == 0) {
		result.value = safe_eval(f, start, result.evaluations);
		result.converged = true;
		return result;
	}

	std::vector<std::vector<double>> simplex(n + 1, start);
	std::vector<double> values(n + 1);
	for (std::size_t i = 0; i < n; ++i) {
		simplex[i + 1][i] += options.initial_step;
	}
	for (std::size_t i = 0; i <= n; ++i) {
		values[i] = safe_eval(f, simplex[i], result.evaluations);
	}

	std::vector<std::size_t> order(n + 1);
	std::vector<double> centroid(n), trial(n), trial2(n);
	constexpr double kTiny = 1e-300;

	while (true) {
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
		const std::size_t best = order.front();
		const std::size_t worst = order.back();
		const std::size_t second = order[n - 1];

		const double fb = values[best];
		const double fw = values[worst];
		if (std::isfinite(fw) && 2.0 * std::abs(fw - fb) <= options.rel_tol * (std::abs(fw) + std::abs(fb)) + kTiny) {
			result.converged = true;
			break;
		}
		if (result.evaluations >= options.max_evaluations) {
			break;
		}

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == worst) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				centroid[j] += simplex[i][j];
			}
		}
		for (double &c : centroid) {
			c /= static_cast<double>(n);
		}

		auto along = [&](double t, std::vector<double> &out) {
			for (std::size_t j = 0; j < n; ++j) {
				out[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
			}
		};

		along(-1.0, trial);
		const double fr = safe_eval(f, trial, result.evaluations);
		if (fr < fb) {
			along(-2.0, trial2);
			const double fe = safe_eval(f, trial2, result.evaluations);
			if (fe < fr) {
				simplex[worst] = trial2;
				values[worst] = fe;
			} else {
				simplex[worst] = trial;
				values[worst] = fr;
			}
			continue;
		}
		if (fr < values[second]) {
			simplex[worst] = trial;
			values[worst] = fr;
			continue;
		}

		// Outside contraction when the reflection beat the worst point,
		// inside contraction otherwise.
		const bool outside = fr < fw;
		along(outside ? -0.5 : 0.5, trial2);
		const double fc = safe_eval(f, trial2, result.evaluations);
		if (fc < (outside ? fr : fw)) {
			simplex[worst] = trial2;
			values[worst] = fc;
			continue;
		}

		for (std::size_t i = 0; i <= n; ++i) {
			if (i == best) {
				continue;
			}
			for (std::size_t j = 0; j < n; ++j) {
				simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
			}
			values[i] = safe_eval(f, simplex[i], result.evaluations);
		}
	}

	const auto best_it = std::min_element(values.begin(), values.end());
	const auto best_index = static_cast<std::size_t>(best_it - values.begin());
	result.x = simplex[best_index];
	result.value = *best_it;
	return result;
}

} // namespace favorit

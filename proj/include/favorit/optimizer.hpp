#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace favorit {

struct NelderMeadOptions {
	/// Stop when 2|f_worst - f_best| <= rel_tol * (|f_worst| + |f_best|) + tiny.
	double rel_tol = 1e-8;
	std::size_t max_evaluations = 500;
	/// Initial simplex offset along each coordinate.
	double initial_step = 0.1;
};

struct NelderMeadResult {
	std::vector<double> x;
	double value = 0.0;
	std::size_t evaluations = 0;
	bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Derivative-free downhill simplex (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Non-finite objective values are treated
/// as +inf.
NelderMeadResult nelder_mead(const Objective &f, std::vector<double> start, const NelderMeadOptions &options = {});

} // namespace favorit

#include "favorit/bootstrap.hpp"

#include "favorit/error.hpp"
#include "favorit/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace favorit {

double mean_of(std::span<const double> values) {
	if (values.empty()) {
		throw Error(ErrorKind::insufficient_data, "empty_values", "mean of empty sample");
	}
	double sum = 0.0;
	for (double v : values) {
		sum += v;
	}
	return sum / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
	if (values.size() < 2) {
		throw Error(ErrorKind::insufficient_data, "insufficient_values", "sample sd needs at least 2 values");
	}
	const double m = mean_of(values);
	double ss = 0.0;
	for (double v : values) {
		ss += (v - m) * (v - m);
	}
	return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

ReplicateDistribution bootstrap_mean_distribution(std::span<const double> values, std::size_t replicates,
                                                  std::uint64_t seed) {
	if (values.empty()) {
		throw Error(ErrorKind::insufficient_data, "empty_values", "bootstrap needs a nonempty sample");
	}
	if (replicates == 0) {
		throw Error(ErrorKind::invalid_argument, "invalid_replicates", "replicate count must be at least 1");
	}
	const std::size_t n = values.size();
	ReplicateDistribution dist;
	dist.replicates = replicates;
	dist.seed = seed;
	dist.sample_size = n;
	dist.replicate_means.reserve(replicates);

	ResampleStream stream(seed);
	for (std::size_t b = 0; b < replicates; ++b) {
		double sum = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			sum += values[stream.next_index(n)];
		}
		dist.replicate_means.push_back(sum / static_cast<double>(n));
	}
	std::sort(dist.replicate_means.begin(), dist.replicate_means.end());
	return dist;
}

double empirical_quantile(std::span<const double> sorted, double q) {
	if (sorted.empty()) {
		throw Error(ErrorKind::insufficient_data, "empty_values", "quantile of empty sample");
	}
	const double pos = q * static_cast<double>(sorted.size() - 1);
	const auto lo = static_cast<std::size_t>(std::floor(pos));
	const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
	const double frac = pos - static_cast<double>(lo);
	if (frac == 0.0 || sorted[lo] == sorted[hi]) {
		return sorted[lo];
	}
	return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ConfidenceInterval percentile_ci(const ReplicateDistribution &dist, double level) {
	if (!(level >= 0.0 && level <= 1.0)) {
		throw Error(ErrorKind::invalid_argument, "invalid_level", "confidence level must be in [0, 1]");
	}
	const double tail = (1.0 - level) / 2.0;
	return {empirical_quantile(dist.replicate_means, tail), empirical_quantile(dist.replicate_means, 1.0 - tail),
	        level};
}

FlapSummary summarize_period(std::string label, unsigned period, std::span<const double> values,
                             std::size_t replicates, std::uint64_t seed, double level) {
	if (values.size() < 2) {
		throw Error(ErrorKind::insufficient_data, "insufficient_years",
		            "insufficient years for " + label + ": need at least 2, have " + std::to_string(values.size()));
	}
	FlapSummary s;
	s.period_label = std::move(label);
	s.period = period;
	s.n_years = values.size();
	s.mean = mean_of(values);
	s.sd = sample_sd(values);
	s.ci = percentile_ci(bootstrap_mean_distribution(values, replicates, seed), level);
	s.flap = flap_index(values);
	if (!is_valid_summary(s)) {
		throw Error(ErrorKind::insufficient_data, "interval_excludes_mean",
		            "bootstrap interval for " + s.period_label + " does not contain the sample mean");
	}
	return s;
}

bool is_valid_summary(const FlapSummary &s) {
	return s.n_years >= 2 && std::isfinite(s.mean) && std::isfinite(s.sd) && s.sd >= 0.0 &&
	       std::isfinite(s.ci.lower) && std::isfinite(s.ci.upper) && s.ci.lower <= s.mean &&
	       s.mean <= s.ci.upper && !std::isnan(s.flap);
}

} // namespace favorit

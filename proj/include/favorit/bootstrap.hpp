#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace favorit {

inline constexpr std::size_t kDefaultReplicates = 10000;

/// Portable resampling stream: std::mt19937_64 (whose output sequence is
/// fixed by the standard) mapped to [0, n) with a 128-bit multiply-high.
/// Every index consumes exactly one 64-bit draw, so replicate i of a
/// bootstrap with sample size n reads draws [i*n, (i+1)*n).
class ResampleStream {
public:
	explicit ResampleStream(std::uint64_t seed) : engine_(seed) {}

	std::size_t next_index(std::size_t n) {
		const unsigned __int128 wide = static_cast<unsigned __int128>(engine_()) * n;
		return static_cast<std::size_t>(wide >> 64);
	}

private:
	std::mt19937_64 engine_;
};

struct ReplicateDistribution {
	std::vector<double> replicate_means; ///< ascending, size == replicates
	std::size_t replicates = 0;
	std::uint64_t seed = 0;
	std::size_t sample_size = 0;
};

struct ConfidenceInterval {
	double lower = 0.0;
	double upper = 0.0;
	double level = 0.95;
};

/// Per-period price summary: yearly means condensed to mean, sample sd,
/// bootstrap interval and FLAP index (mean / sd).
struct FlapSummary {
	std::string period_label;
	unsigned period = 0; ///< calendar position (month 1..12 or week 1..K)
	std::size_t n_years = 0;
	double mean = 0.0;
	double sd = 0.0;
	ConfidenceInterval ci;
	double flap = 0.0; ///< +inf when sd == 0
};

inline constexpr double kInfiniteFlap = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> values);
/// n-1 denominator.
double sample_sd(std::span<const double> values);

ReplicateDistribution bootstrap_mean_distribution(std::span<const double> values, std::size_t replicates,
                                                  std::uint64_t seed);

/// Empirical quantile with linear interpolation at fractional index
/// q * (B - 1) of the sorted replicates.
double empirical_quantile(std::span<const double> sorted, double q);

ConfidenceInterval percentile_ci(const ReplicateDistribution &dist, double level = 0.95);

FlapSummary summarize_period(std::string label, unsigned period, std::span<const double> values,
                             std::size_t replicates, std::uint64_t seed, double level = 0.95);

/// Checks n_years >= 2, finite fields, sd >= 0 and lower <= mean <= upper.
bool is_valid_summary(const FlapSummary &s);

} // namespace favorit

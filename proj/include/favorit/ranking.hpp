#pragma once

#include "favorit/bootstrap.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace favorit {

/// mean / sample sd, the inverse coefficient of variation. +inf when sd == 0.
double flap_index(std::span<const double> values);

enum class Rule {
	interval_dominance = 1, ///< lower(A) > upper(B)
	mean_dominance = 2,     ///< mean(A) > upper(B)
	flap = 3,               ///< FLAP(A) > FLAP(B), calendar order on exact ties
};

std::string_view rule_name(Rule rule);

struct Comparison {
	bool a_better = true;
	Rule rule = Rule::flap;
};

/// Rule 1, then Rule 2, then Rule 3.
Comparison compare_periods(const FlapSummary &a, const FlapSummary &b);

/// Dominance only (Rules 1 and 2); nullopt when neither side dominates.
std::optional<Comparison> dominance(const FlapSummary &a, const FlapSummary &b);

struct RankedPeriod {
	std::size_t rank = 0; ///< 1-based
	FlapSummary summary;
};

struct DominanceEdge {
	std::string winner;
	std::string loser;
	Rule rule = Rule::mean_dominance;
};

struct Ranking {
	std::vector<RankedPeriod> periods; ///< ordered by rank
	std::vector<DominanceEdge> dominance_edges;

	const RankedPeriod *find(std::string_view label) const;
};

/// Linear extension of the mean-over-upper dominance order: repeatedly
/// take the undominated period with the highest FLAP (earlier calendar
/// period on exact ties).
Ranking rank_periods(std::span<const FlapSummary> summaries);

struct Advice {
	std::string current_period;
	std::size_t current_rank = 0;
	std::vector<RankedPeriod> better_periods; ///< nearest in calendar first, then by rank
	bool stay = false;
};

/// Period cycle used for calendar distance: 12 for months (wraps around the
/// year); 0 means linear distance, as for a week window.
struct CalendarShape {
	unsigned cycle = 12;
};

Advice advise_shift(const Ranking &ranking, std::string_view current_period,
                    std::optional<unsigned> max_calendar_distance = std::nullopt, CalendarShape shape = {});

} // namespace favorit

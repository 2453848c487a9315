#include "favorit/ranking.hpp"

#include "favorit/error.hpp"
#include "favorit/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace favorit {

double flap_index(std::span<const double> values) {
	if (values.size() < 2) {
		throw Error(ErrorKind::insufficient_data, "insufficient_values", "FLAP index needs at least 2 values");
	}
	const double sd = sample_sd(values);
	if (sd == 0.0) {
		return kInfiniteFlap;
	}
	return mean_of(values) / sd;
}

std::string_view rule_name(Rule rule) {
	switch (rule) {
	case Rule::interval_dominance:
		return "rule1";
	case Rule::mean_dominance:
		return "rule2";
	case Rule::flap:
		return "rule3";
	}
	return "unknown";
}

std::optional<Comparison> dominance(const FlapSummary &a, const FlapSummary &b) {
	if (a.ci.lower > b.ci.upper) {
		return Comparison{true, Rule::interval_dominance};
	}
	if (b.ci.lower > a.ci.upper) {
		return Comparison{false, Rule::interval_dominance};
	}
	if (a.mean > b.ci.upper) {
		return Comparison{true, Rule::mean_dominance};
	}
	if (b.mean > a.ci.upper) {
		return Comparison{false, Rule::mean_dominance};
	}
	return std::nullopt;
}

Comparison compare_periods(const FlapSummary &a, const FlapSummary &b) {
	if (auto d = dominance(a, b)) {
		return *d;
	}
	if (a.flap != b.flap) {
		return {a.flap > b.flap, Rule::flap};
	}
	return {a.period <= b.period, Rule::flap};
}

const RankedPeriod *Ranking::find(std::string_view label) const {
	for (const auto &p : periods) {
		if (same_name(p.summary.period_label, label)) {
			return &p;
		}
	}
	return nullptr;
}

Ranking rank_periods(std::span<const FlapSummary> summaries) {
	if (summaries.empty()) {
		throw Error(ErrorKind::insufficient_data, "no_periods", "nothing to rank");
	}
	std::set<std::string> labels;
	std::set<unsigned> positions;
	for (const auto &s : summaries) {
		if (!is_valid_summary(s)) {
			throw Error(ErrorKind::invalid_argument, "invalid_summary",
			            "invalid summary for " + s.period_label + " (needs lower <= mean <= upper, n >= 2)");
		}
		if (!labels.insert(s.period_label).second || !positions.insert(s.period).second) {
			throw Error(ErrorKind::invalid_argument, "duplicate_label", "duplicate period " + s.period_label);
		}
	}

	// Process in calendar order so the input order never matters.
	std::vector<FlapSummary> items(summaries.begin(), summaries.end());
	std::sort(items.begin(), items.end(), [](const auto &x, const auto &y) { return x.period < y.period; });
	const std::size_t k = items.size();

	Ranking ranking;
	// dominated_by[j] counts remaining periods that dominate j.
	std::vector<std::size_t> dominated_by(k, 0);
	std::vector<std::vector<std::size_t>> beats(k);
	for (std::size_t i = 0; i < k; ++i) {
		for (std::size_t j = 0; j < k; ++j) {
			if (i == j) {
				continue;
			}
			auto d = dominance(items[i], items[j]);
			if (d && d->a_better) {
				beats[i].push_back(j);
				++dominated_by[j];
				ranking.dominance_edges.push_back({items[i].period_label, items[j].period_label, d->rule});
			}
		}
	}

	std::vector<bool> placed(k, false);
	for (std::size_t rank = 1; rank <= k; ++rank) {
		std::optional<std::size_t> best;
		for (std::size_t i = 0; i < k; ++i) {
			if (placed[i] || dominated_by[i] > 0) {
				continue;
			}
			// Strictly greater keeps the earlier period on exact ties.
			if (!best || items[i].flap > items[*best].flap) {
				best = i;
			}
		}
		if (!best) {
			// Unreachable for valid summaries: mean dominance is acyclic.
			throw Error(ErrorKind::invalid_argument, "dominance_cycle", "dominance relation has a cycle");
		}
		placed[*best] = true;
		for (std::size_t j : beats[*best]) {
			--dominated_by[j];
		}
		ranking.periods.push_back({rank, items[*best]});
	}

	std::map<std::string, std::size_t> rank_of;
	for (const auto &p : ranking.periods) {
		rank_of[p.summary.period_label] = p.rank;
	}
	std::sort(ranking.dominance_edges.begin(), ranking.dominance_edges.end(),
	          [&](const DominanceEdge &x, const DominanceEdge &y) {
		          return std::pair(rank_of[x.winner], rank_of[x.loser]) <
		                 std::pair(rank_of[y.winner], rank_of[y.loser]);
	          });
	return ranking;
}

Advice advise_shift(const Ranking &ranking, std::string_view current_period,
                    std::optional<unsigned> max_calendar_distance, CalendarShape shape) {
	const RankedPeriod *current = ranking.find(current_period);
	if (!current) {
		throw Error(ErrorKind::not_found, "unknown_period", "unknown period " + std::string(current_period));
	}
	auto distance = [&](unsigned a, unsigned b) {
		const unsigned linear = a > b ? a - b : b - a;
		return shape.cycle == 0 ? linear : std::min(linear, shape.cycle - linear);
	};

	Advice advice;
	advice.current_period = current->summary.period_label;
	advice.current_rank = current->rank;
	for (const auto &p : ranking.periods) {
		if (p.rank >= current->rank) {
			continue;
		}
		const unsigned dist = distance(p.summary.period, current->summary.period);
		if (max_calendar_distance && dist > *max_calendar_distance) {
			continue;
		}
		advice.better_periods.push_back(p);
	}
	std::stable_sort(advice.better_periods.begin(), advice.better_periods.end(),
	                 [&](const RankedPeriod &x, const RankedPeriod &y) {
		                 const unsigned dx = distance(x.summary.period, current->summary.period);
		                 const unsigned dy = distance(y.summary.period, current->summary.period);
		                 return dx != dy ? dx < dy : x.rank < y.rank;
	                 });
	advice.stay = advice.better_periods.empty();
	return advice;
}

} // namespace favorit

#pragma once

// The matching layer under the main algorithm: the participant/slot
// eligibility graph, maximum matchings under lexicographic constraints,
// feasibility probes, and the three-stage lexicographically optimal matching.
//
// The lexicographic objective, in decreasing priority:
//   1. slot values in slot priority order, each the highest feasible, where a
//      slot's value for holding participant p is tier_count - tier_of(p) in
//      its team's order and an unmatched slot counts as minus infinity
//   2. participant outcomes in index order, each the best (lowest) feasible
//      tier, with unmatched above every tier
//   3. a greedy pass over a fixed order on participant/slot pairs, forcing
//      every pair that stays feasible
// After stage 3 the forced pairs form the unique matching consistent with all
// recorded constraints.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "fairmatch/model.hpp"
#include "fairmatch/rng.hpp"

namespace fairmatch {

inline constexpr int kMinusInfinity = std::numeric_limits<int>::min();
inline constexpr int kUnmatchedOutcome = std::numeric_limits<int>::max();

// The bipartite graph of eligible participant/slot pairs, with the slot value
// and the participant tier cached per edge. Edge lists are kept in ascending
// slot id order.
struct EligibilityGraph {
    int participant_count = 0;
    std::vector<Slot> slots;
    std::vector<std::vector<int>> edge_slots;
    std::vector<std::vector<int>> edge_values;
    std::vector<std::vector<int>> edge_tiers;

    int slot_count() const { return static_cast<int>(slots.size()); }

    // Index into the edge list of p for slot s, or -1 when not eligible.
    int edge_index(int p, int s) const {
        const auto& row = edge_slots[static_cast<std::size_t>(p)];
        auto it = std::lower_bound(row.begin(), row.end(), s);
        if (it == row.end() || *it != s) return -1;
        return static_cast<int>(it - row.begin());
    }
};

inline EligibilityGraph build_eligibility_graph(const Instance& inst,
                                                const std::vector<Slot>& slots,
                                                const EligibilitySets& elig) {
    EligibilityGraph g;
    g.participant_count = inst.participant_count();
    g.slots = slots;
    g.edge_slots.resize(static_cast<std::size_t>(g.participant_count));
    g.edge_values.resize(static_cast<std::size_t>(g.participant_count));
    g.edge_tiers.resize(static_cast<std::size_t>(g.participant_count));
    for (int p = 0; p < g.participant_count; ++p) {
        for (int s = 0; s < g.slot_count(); ++s) {
            int team = slots[static_cast<std::size_t>(s)].team;
            if (!elig.eligible(p, team)) continue;
            const auto& team_order = inst.team_prefs[static_cast<std::size_t>(team)];
            g.edge_slots[static_cast<std::size_t>(p)].push_back(s);
            g.edge_values[static_cast<std::size_t>(p)].push_back(team_order.tier_count() -
                                                                 team_order.tier_of(p));
            g.edge_tiers[static_cast<std::size_t>(p)].push_back(
                inst.participant_prefs[static_cast<std::size_t>(p)].tier_of(team));
        }
    }
    return g;
}

// Constraints accumulated by the lexicographic stages. A fixed slot value of
// kMinusInfinity pins the slot unmatched; a fixed participant tier of
// kUnmatchedOutcome pins the participant unmatched; any other fixed value
// restricts which edges the vertex may use. Forced pairs must be in the
// matching.
struct LexConstraints {
    std::vector<std::optional<int>> fixed_slot_values;
    std::vector<std::optional<int>> fixed_participant_tiers;
    std::vector<std::pair<int, int>> forced_pairs;

    static LexConstraints none(const EligibilityGraph& g) {
        LexConstraints c;
        c.fixed_slot_values.resize(static_cast<std::size_t>(g.slot_count()));
        c.fixed_participant_tiers.resize(static_cast<std::size_t>(g.participant_count));
        return c;
    }
};

namespace detail {

inline bool edge_allowed(const EligibilityGraph& g, const LexConstraints& c, int p,
                         std::size_t k) {
    int s = g.edge_slots[static_cast<std::size_t>(p)][k];
    if (const auto& fv = c.fixed_slot_values[static_cast<std::size_t>(s)]) {
        if (*fv == kMinusInfinity || g.edge_values[static_cast<std::size_t>(p)][k] != *fv)
            return false;
    }
    if (const auto& ft = c.fixed_participant_tiers[static_cast<std::size_t>(p)]) {
        if (*ft == kUnmatchedOutcome || g.edge_tiers[static_cast<std::size_t>(p)][k] != *ft)
            return false;
    }
    return true;
}

// Kuhn's augmenting-path maximum matching over the allowed edges, restricted
// to the enabled vertices. Iteration order is fixed, so the result is
// deterministic.
struct KuhnResult {
    std::vector<int> slot_of;        // per participant, -1 when unmatched
    std::vector<int> participant_of; // per slot, -1 when unmatched
    int size = 0;
};

inline KuhnResult kuhn_matching(const EligibilityGraph& g, const LexConstraints& c,
                                const std::vector<char>& enabled_p,
                                const std::vector<char>& enabled_s) {
    KuhnResult r;
    r.slot_of.assign(static_cast<std::size_t>(g.participant_count), -1);
    r.participant_of.assign(static_cast<std::size_t>(g.slot_count()), -1);
    std::vector<char> visited(static_cast<std::size_t>(g.slot_count()), 0);

    std::function<bool(int)> augment = [&](int p) -> bool {
        for (std::size_t k = 0; k < g.edge_slots[static_cast<std::size_t>(p)].size(); ++k) {
            int s = g.edge_slots[static_cast<std::size_t>(p)][k];
            if (!enabled_s[static_cast<std::size_t>(s)] || visited[static_cast<std::size_t>(s)])
                continue;
            if (!edge_allowed(g, c, p, k)) continue;
            visited[static_cast<std::size_t>(s)] = 1;
            int holder = r.participant_of[static_cast<std::size_t>(s)];
            if (holder == -1 || augment(holder)) {
                r.slot_of[static_cast<std::size_t>(p)] = s;
                r.participant_of[static_cast<std::size_t>(s)] = p;
                return true;
            }
        }
        return false;
    };

    for (int p = 0; p < g.participant_count; ++p) {
        if (!enabled_p[static_cast<std::size_t>(p)]) continue;
        std::fill(visited.begin(), visited.end(), 0);
        if (augment(p)) ++r.size;
    }
    return r;
}

// Checks the forced pairs are distinct on both sides and lie on allowed
// edges. Returns false on any structural violation.
inline bool forced_pairs_valid(const EligibilityGraph& g, const LexConstraints& c) {
    std::vector<char> fp(static_cast<std::size_t>(g.participant_count), 0);
    std::vector<char> fs(static_cast<std::size_t>(g.slot_count()), 0);
    for (auto [p, s] : c.forced_pairs) {
        if (p < 0 || p >= g.participant_count || s < 0 || s >= g.slot_count()) return false;
        if (fp[static_cast<std::size_t>(p)] || fs[static_cast<std::size_t>(s)]) return false;
        fp[static_cast<std::size_t>(p)] = 1;
        fs[static_cast<std::size_t>(s)] = 1;
        int k = g.edge_index(p, s);
        if (k == -1 || !edge_allowed(g, c, p, static_cast<std::size_t>(k))) return false;
    }
    return true;
}

}  // namespace detail

struct MaxMatchingResult {
    bool feasible = false;
    SlotMatching matching;
};

// Maximum-cardinality matching that uses allowed edges only and contains
// every forced pair. feasible is false only when the forced pairs themselves
// are invalid.
inline MaxMatchingResult max_matching(const EligibilityGraph& g, const LexConstraints& c) {
    MaxMatchingResult out;
    out.matching = SlotMatching(g.participant_count, g.slot_count());
    if (!detail::forced_pairs_valid(g, c)) return out;
    std::vector<char> enabled_p(static_cast<std::size_t>(g.participant_count), 1);
    std::vector<char> enabled_s(static_cast<std::size_t>(g.slot_count()), 1);
    for (auto [p, s] : c.forced_pairs) {
        enabled_p[static_cast<std::size_t>(p)] = 0;
        enabled_s[static_cast<std::size_t>(s)] = 0;
    }
    auto r = detail::kuhn_matching(g, c, enabled_p, enabled_s);
    for (int p = 0; p < g.participant_count; ++p)
        if (r.slot_of[static_cast<std::size_t>(p)] != -1)
            out.matching.assign(p, r.slot_of[static_cast<std::size_t>(p)]);
    for (auto [p, s] : c.forced_pairs) out.matching.assign(p, s);
    out.feasible = true;
    return out;
}

// Decides whether some matching satisfies every constraint: forced pairs
// included, every slot with a fixed finite value matched at that value, every
// participant with a fixed finite tier matched at that tier, pinned-unmatched
// vertices unmatched. By the Mendelsohn-Dulmage theorem this holds iff the
// fixed slots can be covered and, separately, the fixed participants can be
// covered, both within the allowed subgraph that excludes forced vertices.
inline bool constraints_feasible(const EligibilityGraph& g, const LexConstraints& c) {
    if (!detail::forced_pairs_valid(g, c)) return false;
    std::vector<char> free_p(static_cast<std::size_t>(g.participant_count), 1);
    std::vector<char> free_s(static_cast<std::size_t>(g.slot_count()), 1);
    for (auto [p, s] : c.forced_pairs) {
        free_p[static_cast<std::size_t>(p)] = 0;
        free_s[static_cast<std::size_t>(s)] = 0;
    }

    std::vector<char> must_s(static_cast<std::size_t>(g.slot_count()), 0);
    int must_s_count = 0;
    for (int s = 0; s < g.slot_count(); ++s) {
        const auto& fv = c.fixed_slot_values[static_cast<std::size_t>(s)];
        if (fv && *fv != kMinusInfinity && free_s[static_cast<std::size_t>(s)]) {
            must_s[static_cast<std::size_t>(s)] = 1;
            ++must_s_count;
        }
    }
    std::vector<char> must_p(static_cast<std::size_t>(g.participant_count), 0);
    int must_p_count = 0;
    for (int p = 0; p < g.participant_count; ++p) {
        const auto& ft = c.fixed_participant_tiers[static_cast<std::size_t>(p)];
        if (ft && *ft != kUnmatchedOutcome && free_p[static_cast<std::size_t>(p)]) {
            must_p[static_cast<std::size_t>(p)] = 1;
            ++must_p_count;
        }
    }

    if (must_s_count > 0) {
        auto cover = detail::kuhn_matching(g, c, free_p, must_s);
        if (cover.size != must_s_count) return false;
    }
    if (must_p_count > 0) {
        auto cover = detail::kuhn_matching(g, c, must_p, free_s);
        if (cover.size != must_p_count) return false;
    }
    return true;
}

using PairOrder = std::vector<std::pair<int, int>>;

inline PairOrder default_pair_order(int participant_count, int slot_count) {
    PairOrder order;
    order.reserve(static_cast<std::size_t>(participant_count) *
                  static_cast<std::size_t>(slot_count));
    for (int p = 0; p < participant_count; ++p)
        for (int s = 0; s < slot_count; ++s) order.emplace_back(p, s);
    return order;
}

inline PairOrder seeded_pair_order(int participant_count, int slot_count, std::uint64_t seed) {
    PairOrder order = default_pair_order(participant_count, slot_count);
    SplitMix64 rng(seed);
    fisher_yates(order, rng);
    return order;
}

struct LexoptResult {
    SlotMatching matching;
    std::vector<int> slot_values;
    std::vector<int> participant_outcomes;
};

// Computes the lexicographically optimal matching of the eligibility graph
// under the three-stage objective described at the top of this header.
inline LexoptResult lexopt_matching(const Instance& inst, const std::vector<Slot>& slots,
                                    const EligibilitySets& elig, const PairOrder& pair_order) {
    EligibilityGraph g = build_eligibility_graph(inst, slots, elig);
    LexConstraints c = LexConstraints::none(g);

    // stage 1: slot values, in slot priority order, highest feasible first
    std::vector<std::set<int, std::greater<int>>> slot_candidates(
        static_cast<std::size_t>(g.slot_count()));
    for (int p = 0; p < g.participant_count; ++p)
        for (std::size_t k = 0; k < g.edge_slots[static_cast<std::size_t>(p)].size(); ++k)
            slot_candidates[static_cast<std::size_t>(
                                g.edge_slots[static_cast<std::size_t>(p)][k])]
                .insert(g.edge_values[static_cast<std::size_t>(p)][k]);
    for (int s = 0; s < g.slot_count(); ++s) {
        int chosen = kMinusInfinity;
        for (int v : slot_candidates[static_cast<std::size_t>(s)]) {
            c.fixed_slot_values[static_cast<std::size_t>(s)] = v;
            if (constraints_feasible(g, c)) {
                chosen = v;
                break;
            }
        }
        c.fixed_slot_values[static_cast<std::size_t>(s)] = chosen;
    }

    // stage 2: participant outcomes, in index order, best feasible tier first
    for (int p = 0; p < g.participant_count; ++p) {
        std::set<int> tiers;
        for (std::size_t k = 0; k < g.edge_slots[static_cast<std::size_t>(p)].size(); ++k)
            if (detail::edge_allowed(g, c, p, k))
                tiers.insert(g.edge_tiers[static_cast<std::size_t>(p)][k]);
        int chosen = kUnmatchedOutcome;
        for (int t : tiers) {
            c.fixed_participant_tiers[static_cast<std::size_t>(p)] = t;
            if (constraints_feasible(g, c)) {
                chosen = t;
                break;
            }
        }
        c.fixed_participant_tiers[static_cast<std::size_t>(p)] = chosen;
    }

    // stage 3: greedy pair forcing along the given order, which must cover
    // the whole participant/slot product exactly once
    std::vector<char> seen_pair(static_cast<std::size_t>(g.participant_count) *
                                    static_cast<std::size_t>(g.slot_count()),
                                0);
    for (auto [p, s] : pair_order) {
        if (p < 0 || p >= g.participant_count || s < 0 || s >= g.slot_count())
            throw std::invalid_argument("pair order references an unknown participant or slot");
        auto idx = static_cast<std::size_t>(p) * static_cast<std::size_t>(g.slot_count()) +
                   static_cast<std::size_t>(s);
        if (seen_pair[idx]) throw std::invalid_argument("pair order repeats a pair");
        seen_pair[idx] = 1;
    }
    if (pair_order.size() != seen_pair.size())
        throw std::invalid_argument("pair order must cover every participant/slot pair");
    std::vector<char> done_p(static_cast<std::size_t>(g.participant_count), 0);
    std::vector<char> done_s(static_cast<std::size_t>(g.slot_count()), 0);
    for (auto [p, s] : pair_order) {
        if (done_p[static_cast<std::size_t>(p)] || done_s[static_cast<std::size_t>(s)]) continue;
        int k = g.edge_index(p, s);
        if (k == -1 || !detail::edge_allowed(g, c, p, static_cast<std::size_t>(k))) continue;
        c.forced_pairs.emplace_back(p, s);
        if (constraints_feasible(g, c)) {
            done_p[static_cast<std::size_t>(p)] = 1;
            done_s[static_cast<std::size_t>(s)] = 1;
        } else {
            c.forced_pairs.pop_back();
        }
    }

    LexoptResult out;
    out.matching = SlotMatching(g.participant_count, g.slot_count());
    for (auto [p, s] : c.forced_pairs) out.matching.assign(p, s);
    out.slot_values.reserve(static_cast<std::size_t>(g.slot_count()));
    for (int s = 0; s < g.slot_count(); ++s)
        out.slot_values.push_back(*c.fixed_slot_values[static_cast<std::size_t>(s)]);
    out.participant_outcomes.reserve(static_cast<std::size_t>(g.participant_count));
    for (int p = 0; p < g.participant_count; ++p)
        out.participant_outcomes.push_back(*c.fixed_participant_tiers[static_cast<std::size_t>(p)]);

    int expected_matched = 0;
    for (int v : out.slot_values)
        if (v != kMinusInfinity) ++expected_matched;
    int expected_participants = 0;
    for (int t : out.participant_outcomes)
        if (t != kUnmatchedOutcome) ++expected_participants;
    if (out.matching.size() != expected_matched ||
        out.matching.size() != expected_participants)
        throw std::logic_error("lexicographic stages disagree on the matched set");
    return out;
}

}  // namespace fairmatch

#pragma once

// The quota/unassigned extension. An extended instance is reduced to the base
// setting by adding dummy participants and a dummy team, solved by the main
// engine, and read back as a partial allocation. The stability and extended
// EF1 verifiers work on the extended instance directly.
//
// Augmentation layout, for n teams with quotas q_1..q_n and m participants,
// writing z for the quota sum:
//   - participants: real ids 0..m-1, dummy ids m..m+z-1
//   - teams: real ids 0..n-1, the dummy team is id n with m slots
//   - a real team's order keeps its real tiers and replaces the unassigned
//     option with all z dummy participants, tied, in the same position
//   - a real participant's order carries over unchanged, with the unassigned
//     option id n now naming the dummy team
//   - dummy parties are fully indifferent

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairmatch/engines.hpp"
#include "fairmatch/matching_core.hpp"
#include "fairmatch/model.hpp"
#include "fairmatch/relations.hpp"

namespace fairmatch {

struct AugmentedInstance {
    Instance instance;
    std::vector<int> slot_counts;
    int real_team_count = 0;
    int real_participant_count = 0;

    bool is_real_team(int team) const { return team < real_team_count; }
    bool is_real_participant(int p) const { return p < real_participant_count; }
};

inline AugmentedInstance augment_instance(const ExtendedInstance& ext) {
    validate_extended_instance(ext);
    int n = ext.team_count;
    int m = ext.participant_count();
    int z = 0;
    for (int q : ext.quotas) z += q;

    AugmentedInstance aug;
    aug.real_team_count = n;
    aug.real_participant_count = m;
    aug.instance.team_count = n + 1;
    aug.instance.participants = ext.participants;
    for (int d = 0; d < z; ++d)
        aug.instance.participants.push_back("__dummy_" + std::to_string(d + 1));

    int unassigned = ext.unassigned_participant_id();
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<int>> tiers;
        for (const auto& tier : ext.team_prefs[static_cast<std::size_t>(i)].tiers()) {
            std::vector<int> mapped;
            for (int a : tier) {
                if (a == unassigned)
                    for (int d = 0; d < z; ++d) mapped.push_back(m + d);
                else
                    mapped.push_back(a);
            }
            tiers.push_back(std::move(mapped));
        }
        aug.instance.team_prefs.emplace_back(std::move(tiers), m + z);
    }
    std::vector<int> everyone(static_cast<std::size_t>(m + z));
    for (int p = 0; p < m + z; ++p) everyone[static_cast<std::size_t>(p)] = p;
    aug.instance.team_prefs.emplace_back(std::vector<std::vector<int>>{everyone}, m + z);

    for (int p = 0; p < m; ++p)
        aug.instance.participant_prefs.push_back(ext.participant_prefs[static_cast<std::size_t>(p)]);
    std::vector<int> all_teams(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) all_teams[static_cast<std::size_t>(i)] = i;
    for (int d = 0; d < z; ++d)
        aug.instance.participant_prefs.emplace_back(std::vector<std::vector<int>>{all_teams},
                                                    n + 1);

    aug.slot_counts = ext.quotas;
    aug.slot_counts.push_back(m);
    return aug;
}

struct ExtendedResult {
    Allocation allocation;  // real teams and real participants only
    AugmentedInstance augmented;
    MainResult inner;
};

inline ExtendedResult solve_extended_full(const ExtendedInstance& ext,
                                          const PairOrder& pair_order) {
    ExtendedResult result;
    result.augmented = augment_instance(ext);
    result.inner = main_algorithm_with_slots(result.augmented.instance,
                                             result.augmented.slot_counts, pair_order);
    result.allocation = make_allocation(ext.team_count);
    for (int i = 0; i < ext.team_count; ++i)
        for (int p : result.inner.allocation.bundles[static_cast<std::size_t>(i)])
            if (result.augmented.is_real_participant(p))
                result.allocation.bundles[static_cast<std::size_t>(i)].push_back(p);
    sort_allocation(result.allocation);
    return result;
}

inline ExtendedResult solve_extended_full(const ExtendedInstance& ext) {
    AugmentedInstance aug = augment_instance(ext);
    int side = aug.instance.participant_count();
    return solve_extended_full(ext, default_pair_order(side, side));
}

inline Allocation solve_extended(const ExtendedInstance& ext, const PairOrder& pair_order) {
    return solve_extended_full(ext, pair_order).allocation;
}

inline Allocation solve_extended(const ExtendedInstance& ext) {
    return solve_extended_full(ext).allocation;
}

// Partial allocations may leave participants unassigned but must respect the
// quotas; a quota violation is a malformed input, not a property failure.
inline void validate_extended_allocation(const ExtendedInstance& ext, const Allocation& alloc) {
    if (static_cast<int>(alloc.bundles.size()) != ext.team_count)
        throw std::invalid_argument("allocation needs one bundle per team");
    std::vector<int> seen(static_cast<std::size_t>(ext.participant_count()), 0);
    for (int i = 0; i < ext.team_count; ++i) {
        const auto& bundle = alloc.bundles[static_cast<std::size_t>(i)];
        if (static_cast<int>(bundle.size()) > ext.quotas[static_cast<std::size_t>(i)])
            throw std::invalid_argument("allocation exceeds the quota of team " +
                                        std::to_string(i + 1));
        for (int p : bundle) {
            if (p < 0 || p >= ext.participant_count())
                throw std::invalid_argument("allocation contains unknown participant id " +
                                            std::to_string(p));
            if (seen[static_cast<std::size_t>(p)]++)
                throw std::invalid_argument("allocation assigns participant " + std::to_string(p) +
                                            " twice");
        }
    }
}

namespace detail {

// Tier of the alternative the participant currently holds: its team, or the
// unassigned option.
inline int own_tier(const ExtendedInstance& ext, const std::vector<int>& team_of, int p) {
    const auto& prefs = ext.participant_prefs[static_cast<std::size_t>(p)];
    int team = team_of[static_cast<std::size_t>(p)];
    return prefs.tier_of(team == -1 ? ext.unassigned_team_id() : team);
}

}  // namespace detail

// Stability of a partial allocation, in three clauses:
//   1. justified envy-freeness, counting unassigned participants as holding
//      the unassigned option
//   2. individual rationality on both sides of every assignment
//   3. non-wastefulness: no participant and team with free quota may both
//      prefer each other to what they have, the team finding the
//      participant acceptable and the participant strictly gaining
inline PropertyReport check_stability(const ExtendedInstance& ext, const Allocation& alloc) {
    validate_extended_instance(ext);
    validate_extended_allocation(ext, alloc);
    int m = ext.participant_count();
    std::vector<int> team_of(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < ext.team_count; ++i)
        for (int p : alloc.bundles[static_cast<std::size_t>(i)])
            team_of[static_cast<std::size_t>(p)] = i;

    // clause 2 first: it is the cheapest to pin down in a witness
    for (int i = 0; i < ext.team_count; ++i) {
        const auto& order = ext.team_prefs[static_cast<std::size_t>(i)];
        for (int p : alloc.bundles[static_cast<std::size_t>(i)]) {
            if (order.tier_of(p) > order.tier_of(ext.unassigned_participant_id()))
                return PropertyReport::fail(
                    "team " + std::to_string(i + 1) + " holds " +
                        ext.participants[static_cast<std::size_t>(p)] +
                        " but prefers leaving the spot empty",
                    ClauseWitness{2, p, i, -1, -1});
            const auto& prefs = ext.participant_prefs[static_cast<std::size_t>(p)];
            if (prefs.tier_of(i) > prefs.tier_of(ext.unassigned_team_id()))
                return PropertyReport::fail(
                    ext.participants[static_cast<std::size_t>(p)] + " is assigned to team " +
                        std::to_string(i + 1) + " but prefers staying unassigned",
                    ClauseWitness{2, p, i, -1, -1});
        }
    }

    // clause 1: justified envy, including envy by unassigned participants
    for (int p = 0; p < m; ++p) {
        const auto& prefs = ext.participant_prefs[static_cast<std::size_t>(p)];
        int own = detail::own_tier(ext, team_of, p);
        for (int j = 0; j < ext.team_count; ++j) {
            if (j == team_of[static_cast<std::size_t>(p)] || prefs.tier_of(j) >= own) continue;
            const auto& order = ext.team_prefs[static_cast<std::size_t>(j)];
            for (int q : alloc.bundles[static_cast<std::size_t>(j)]) {
                if (order.tier_of(p) >= order.tier_of(q)) continue;
                return PropertyReport::fail(
                    ext.participants[static_cast<std::size_t>(p)] + " justifiably envies " +
                        ext.participants[static_cast<std::size_t>(q)] + " at team " +
                        std::to_string(j + 1),
                    ClauseWitness{1, p, team_of[static_cast<std::size_t>(p)], q, j});
            }
        }
    }

    // clause 3: wasted quota
    for (int p = 0; p < m; ++p) {
        const auto& prefs = ext.participant_prefs[static_cast<std::size_t>(p)];
        int own = detail::own_tier(ext, team_of, p);
        for (int i = 0; i < ext.team_count; ++i) {
            if (i == team_of[static_cast<std::size_t>(p)] || prefs.tier_of(i) >= own) continue;
            if (static_cast<int>(alloc.bundles[static_cast<std::size_t>(i)].size()) >=
                ext.quotas[static_cast<std::size_t>(i)])
                continue;
            const auto& order = ext.team_prefs[static_cast<std::size_t>(i)];
            if (order.tier_of(p) > order.tier_of(ext.unassigned_participant_id())) continue;
            return PropertyReport::fail(
                "team " + std::to_string(i + 1) + " has free quota and accepts " +
                    ext.participants[static_cast<std::size_t>(p)] + ", who strictly prefers it",
                ClauseWitness{3, p, team_of[static_cast<std::size_t>(p)], -1, i});
        }
    }
    return PropertyReport::pass();
}

// Extended team-justified SD envy-freeness up to one participant. Team i
// with quota q_i compares against every subset, of size at most q_i, of the
// members of A_j that weakly prefer team i to team j and that team i ranks
// strictly above leaving a spot empty. The binding subset is the q_i best of
// those members in team i's order: every smaller or worse subset is
// pointwise easier to dominate, and removing the best element is the
// optimal removal. So one comparison per team pair decides the property.
inline PropertyReport check_extended_team_justified_sd_ef1(const ExtendedInstance& ext,
                                                           const Allocation& alloc) {
    validate_extended_instance(ext);
    validate_extended_allocation(ext, alloc);
    for (int i = 0; i < ext.team_count; ++i) {
        const auto& order = ext.team_prefs[static_cast<std::size_t>(i)];
        int empty_tier = order.tier_of(ext.unassigned_participant_id());
        const auto& own = alloc.bundles[static_cast<std::size_t>(i)];
        for (int j = 0; j < ext.team_count; ++j) {
            if (i == j) continue;
            std::vector<int> pool;
            for (int p : alloc.bundles[static_cast<std::size_t>(j)]) {
                const auto& prefs = ext.participant_prefs[static_cast<std::size_t>(p)];
                if (prefs.tier_of(i) > prefs.tier_of(j)) continue;
                if (order.tier_of(p) >= empty_tier) continue;
                pool.push_back(p);
            }
            std::sort(pool.begin(), pool.end(), [&](int a, int b) {
                if (order.tier_of(a) != order.tier_of(b))
                    return order.tier_of(a) < order.tier_of(b);
                return a < b;
            });
            std::size_t take = std::min<std::size_t>(
                pool.size(), static_cast<std::size_t>(ext.quotas[static_cast<std::size_t>(i)]));
            std::vector<int> target(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
            if (target.empty()) continue;
            bool ok = sd_dominates(order, own, target);
            for (std::size_t drop = 0; drop < target.size() && !ok; ++drop) {
                std::vector<int> reduced = target;
                reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(drop));
                ok = sd_dominates(order, own, reduced);
            }
            if (!ok)
                return PropertyReport::fail(
                    "team " + std::to_string(i + 1) + " SD-envies team " + std::to_string(j + 1) +
                        " beyond one removal under its quota",
                    TeamEnvyWitness{i, j, target});
        }
    }
    return PropertyReport::pass();
}

}  // namespace fairmatch

#pragma once

// Exhaustive and randomized checking machinery: allocation enumeration with
// property filters, the blocking-path detector behind the per-iteration
// optimality certificate, and the strategyproofness fuzzer. Everything here
// is deterministic given its arguments.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairmatch/engines.hpp"
#include "fairmatch/matching_core.hpp"
#include "fairmatch/model.hpp"
#include "fairmatch/relations.hpp"
#include "fairmatch/rng.hpp"

namespace fairmatch {

// Walks all n^m allocations of an instance in odometer order. Refuses to
// start past the enumeration cap.
class AllocationEnumerator {
public:
    AllocationEnumerator(int team_count, int participant_count,
                         std::uint64_t enum_cap = kDefaultEnumCap)
        : team_count_(team_count), team_of_(static_cast<std::size_t>(participant_count), 0) {
        std::uint64_t total = 1;
        for (int p = 0; p < participant_count; ++p) {
            total *= static_cast<std::uint64_t>(team_count);
            if (total > enum_cap)
                throw CapacityError("allocation enumeration needs " + std::to_string(team_count) +
                                    "^" + std::to_string(participant_count) +
                                    " allocations, above the enumeration cap of " +
                                    std::to_string(enum_cap));
        }
    }

    std::optional<Allocation> next() {
        if (exhausted_) return std::nullopt;
        Allocation a = make_allocation(team_count_);
        for (std::size_t p = 0; p < team_of_.size(); ++p)
            a.bundles[static_cast<std::size_t>(team_of_[p])].push_back(static_cast<int>(p));
        int pos = static_cast<int>(team_of_.size()) - 1;
        while (pos >= 0 && team_of_[static_cast<std::size_t>(pos)] == team_count_ - 1) {
            team_of_[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) exhausted_ = true;
        else ++team_of_[static_cast<std::size_t>(pos)];
        return a;
    }

private:
    int team_count_;
    std::vector<int> team_of_;
    bool exhausted_ = false;
};

// Searches the full allocation space for one allocation satisfying every
// listed property. Returns the first hit in odometer order, or nothing.
inline std::optional<Allocation> exists_allocation_satisfying(
    const Instance& inst, const std::vector<Prop>& props,
    std::uint64_t enum_cap = kDefaultEnumCap) {
    validate_instance(inst);
    AllocationEnumerator it(inst.team_count, inst.participant_count(), enum_cap);
    while (auto alloc = it.next()) {
        bool all = true;
        for (Prop prop : props)
            if (!check_property(inst, *alloc, prop, enum_cap).holds) {
                all = false;
                break;
            }
        if (all) return alloc;
    }
    return std::nullopt;
}

// Validates one alternating sequence against the blocking-path definition.
// steps must alternate (participant, slot) in path order.
inline bool is_blocking_path(const Instance& inst, const SlotMatching& matching,
                             const EligibilitySets& elig, const std::vector<Slot>& slots,
                             const BlockingPath& path) {
    if (path.steps.empty()) return false;
    auto slot_team = [&](int s) { return slots.at(static_cast<std::size_t>(s)).team; };
    auto participant_tier = [&](int p, int s) {
        return inst.participant_prefs.at(static_cast<std::size_t>(p)).tier_of(slot_team(s));
    };
    auto team_tier = [&](int s, int p) {
        return inst.team_prefs.at(static_cast<std::size_t>(slot_team(s))).tier_of(p);
    };

    std::vector<char> seen_p(static_cast<std::size_t>(inst.participant_count()), 0);
    std::vector<char> seen_s(slots.size(), 0);
    for (auto [p, s] : path.steps) {
        if (p < 0 || p >= inst.participant_count() || s < 0 ||
            s >= static_cast<int>(slots.size()))
            return false;
        if (seen_p[static_cast<std::size_t>(p)]++ || seen_s[static_cast<std::size_t>(s)]++)
            return false;  // all parties distinct
        if (matching.slot_of(p) == s) return false;  // (p_jl, x_l) not in S
    }
    for (std::size_t l = 1; l < path.steps.size(); ++l)
        if (matching.slot_of(path.steps[l].first) != path.steps[l - 1].second)
            return false;  // (p_jl, x_{l-1}) in S

    int j1 = path.steps.front().first;
    int x1 = path.steps.front().second;
    if (!matching.participant_matched(j1)) {
        if (!elig.eligible(j1, slot_team(x1))) return false;
    } else {
        if (participant_tier(j1, x1) >= participant_tier(j1, matching.slot_of(j1))) return false;
    }

    for (std::size_t l = 0; l + 1 < path.steps.size(); ++l) {
        int p = path.steps[l].first;
        int x = path.steps[l].second;
        int next_p = path.steps[l + 1].first;
        int next_x = path.steps[l + 1].second;
        if (team_tier(x, p) != team_tier(x, next_p)) return false;
        if (participant_tier(next_p, x) != participant_tier(next_p, next_x)) return false;
    }

    int ph = path.steps.back().first;
    int xh = path.steps.back().second;
    int occupant = matching.participant_of(xh);
    if (occupant == -1) return true;
    if (team_tier(xh, ph) < team_tier(xh, occupant)) return true;
    return team_tier(xh, ph) == team_tier(xh, occupant) && occupant > j1;
}

namespace detail {

// Depth-first search for a blocking path from one start participant, over
// simple slot sequences. The forced-successor structure leaves the next
// participant determined by the slot just entered, so the search state is
// the current participant plus the set of slots already used.
inline bool blocking_path_dfs(const Instance& inst, const SlotMatching& matching,
                              const EligibilitySets& elig, const std::vector<Slot>& slots,
                              int j1, int current, std::vector<char>& used_slot,
                              std::vector<std::pair<int, int>>& steps,
                              BlockingPath& out) {
    auto slot_team = [&](int s) { return slots[static_cast<std::size_t>(s)].team; };
    auto participant_tier = [&](int p, int s) {
        return inst.participant_prefs[static_cast<std::size_t>(p)].tier_of(slot_team(s));
    };
    auto team_tier = [&](int s, int p) {
        return inst.team_prefs[static_cast<std::size_t>(slot_team(s))].tier_of(p);
    };

    for (int x = 0; x < static_cast<int>(slots.size()); ++x) {
        if (used_slot[static_cast<std::size_t>(x)]) continue;
        if (matching.slot_of(current) == x) continue;
        if (steps.empty()) {
            if (!matching.participant_matched(current)) {
                if (!elig.eligible(current, slot_team(x))) continue;
            } else if (participant_tier(current, x) >=
                       participant_tier(current, matching.slot_of(current))) {
                continue;
            }
        } else if (participant_tier(current, steps.back().second) !=
                   participant_tier(current, x)) {
            continue;
        }

        steps.emplace_back(current, x);
        used_slot[static_cast<std::size_t>(x)] = 1;
        int occupant = matching.participant_of(x);
        bool terminal = occupant == -1 || team_tier(x, current) < team_tier(x, occupant) ||
                        (team_tier(x, current) == team_tier(x, occupant) && occupant > j1);
        if (terminal) {
            out.steps = steps;
            used_slot[static_cast<std::size_t>(x)] = 0;
            steps.pop_back();
            return true;
        }
        if (occupant != j1 && team_tier(x, current) == team_tier(x, occupant) &&
            blocking_path_dfs(inst, matching, elig, slots, j1, occupant, used_slot, steps, out)) {
            used_slot[static_cast<std::size_t>(x)] = 0;
            steps.pop_back();
            return true;
        }
        used_slot[static_cast<std::size_t>(x)] = 0;
        steps.pop_back();
    }
    return false;
}

// Breadth-first reachability over (slot, incoming participant) states. This
// relaxes the distinctness requirement, so it can only overapproximate: no
// end state reachable means no blocking path exists, and the exact search
// above only runs when this filter finds something.
inline bool blocking_path_possible(const Instance& inst, const SlotMatching& matching,
                                   const EligibilitySets& elig, const std::vector<Slot>& slots,
                                   int j1) {
    auto slot_team = [&](int s) { return slots[static_cast<std::size_t>(s)].team; };
    auto participant_tier = [&](int p, int s) {
        return inst.participant_prefs[static_cast<std::size_t>(p)].tier_of(slot_team(s));
    };
    auto team_tier = [&](int s, int p) {
        return inst.team_prefs[static_cast<std::size_t>(slot_team(s))].tier_of(p);
    };
    int slot_count = static_cast<int>(slots.size());

    std::vector<std::pair<int, int>> queue;  // (slot, incoming participant)
    std::vector<char> visited(slots.size() * static_cast<std::size_t>(inst.participant_count()),
                              0);
    auto push = [&](int s, int incoming) {
        auto idx = static_cast<std::size_t>(s) *
                       static_cast<std::size_t>(inst.participant_count()) +
                   static_cast<std::size_t>(incoming);
        if (visited[idx]) return;
        visited[idx] = 1;
        queue.emplace_back(s, incoming);
    };

    for (int x = 0; x < slot_count; ++x) {
        if (!matching.participant_matched(j1)) {
            if (elig.eligible(j1, slot_team(x)) && matching.slot_of(j1) != x) push(x, j1);
        } else if (x != matching.slot_of(j1) &&
                   participant_tier(j1, x) < participant_tier(j1, matching.slot_of(j1))) {
            push(x, j1);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [x, incoming] = queue[head];
        int occupant = matching.participant_of(x);
        if (occupant == -1 || team_tier(x, incoming) < team_tier(x, occupant) ||
            (team_tier(x, incoming) == team_tier(x, occupant) && occupant > j1))
            return true;
        if (occupant == j1 || team_tier(x, incoming) != team_tier(x, occupant)) continue;
        for (int next = 0; next < slot_count; ++next) {
            if (next == x) continue;
            if (participant_tier(occupant, x) != participant_tier(occupant, next)) continue;
            push(next, occupant);
        }
    }
    return false;
}

}  // namespace detail

// Finds a blocking path for the given matching and eligibility sets, or
// nothing if none exists. Starts are scanned in participant index order; the
// first path found in depth-first order is returned.
inline std::optional<BlockingPath> find_blocking_path(const Instance& inst,
                                                      const SlotMatching& matching,
                                                      const EligibilitySets& elig,
                                                      const std::vector<Slot>& slots) {
    for (int j1 = 0; j1 < inst.participant_count(); ++j1) {
        if (!detail::blocking_path_possible(inst, matching, elig, slots, j1)) continue;
        BlockingPath out;
        std::vector<char> used_slot(slots.size(), 0);
        std::vector<std::pair<int, int>> steps;
        if (detail::blocking_path_dfs(inst, matching, elig, slots, j1, j1, used_slot, steps, out))
            return out;
    }
    return std::nullopt;
}

// All weak orders over a universe, generated as ordered set partitions in a
// fixed recursive order. Sizes follow the Fubini numbers: 1, 1, 3, 13, 75.
inline std::vector<WeakOrder> enumerate_weak_orders(int universe_size) {
    std::vector<WeakOrder> out;
    std::vector<std::vector<int>> tiers;
    std::vector<int> remaining(static_cast<std::size_t>(universe_size));
    for (int i = 0; i < universe_size; ++i) remaining[static_cast<std::size_t>(i)] = i;

    std::function<void(std::vector<int>)> build = [&](std::vector<int> rest) {
        if (rest.empty()) {
            out.emplace_back(tiers, universe_size);
            return;
        }
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << rest.size()); ++mask) {
            std::vector<int> tier;
            std::vector<int> next;
            for (std::size_t b = 0; b < rest.size(); ++b) {
                if (mask & (std::uint64_t{1} << b)) tier.push_back(rest[b]);
                else next.push_back(rest[b]);
            }
            tiers.push_back(std::move(tier));
            build(std::move(next));
            tiers.pop_back();
        }
    };
    build(std::move(remaining));
    return out;
}

enum class FuzzMode { SingletonExhaustive, GroupRandom };

struct Deviation {
    std::vector<int> coalition;
    std::vector<WeakOrder> reports;  // parallel to coalition
};

struct ManipulationFinding {
    Deviation deviation;
    Allocation truthful;
    Allocation deviated;
};

struct FuzzReport {
    std::uint64_t deviations_tested = 0;
    std::uint64_t weak_improvements = 0;  // informational: nobody worse, someone better
    std::vector<ManipulationFinding> manipulations;
};

namespace detail {

inline WeakOrder random_weak_order(int universe_size, SplitMix64& rng) {
    std::vector<int> perm = shuffled_iota(universe_size, rng);
    std::vector<std::vector<int>> tiers;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (k == 0 || !rng.chance_per_mille(500)) tiers.push_back({perm[k]});
        else tiers.back().push_back(perm[k]);
    }
    return WeakOrder(std::move(tiers), universe_size);
}

}  // namespace detail

// Hunts for group manipulations of the main engine: a coalition misreport
// after which every coalition member is strictly better off by its true
// preference. Deviations where nobody in the coalition is worse off and at
// least one member gains are tallied separately; they are known to exist and
// do not contradict group strategyproofness.
inline FuzzReport strategyproofness_fuzz(const Instance& inst, FuzzMode mode,
                                         std::uint64_t trials, std::uint64_t seed,
                                         std::uint64_t enum_cap = kDefaultEnumCap) {
    validate_instance(inst);
    int m = inst.participant_count();
    Allocation truthful = main_algorithm(inst).allocation;
    std::vector<int> truthful_team(static_cast<std::size_t>(m));
    for (int i = 0; i < inst.team_count; ++i)
        for (int p : truthful.bundles[static_cast<std::size_t>(i)])
            truthful_team[static_cast<std::size_t>(p)] = i;

    FuzzReport report;
    auto evaluate = [&](const Deviation& deviation) {
        Instance misreported = inst;
        for (std::size_t k = 0; k < deviation.coalition.size(); ++k)
            misreported.participant_prefs[static_cast<std::size_t>(deviation.coalition[k])] =
                deviation.reports[k];
        Allocation outcome = main_algorithm(misreported).allocation;
        ++report.deviations_tested;
        bool all_strict = true;
        bool none_worse = true;
        bool some_better = false;
        for (int p : deviation.coalition) {
            const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(p)];
            int before = prefs.tier_of(truthful_team[static_cast<std::size_t>(p)]);
            int after = prefs.tier_of(outcome.team_of(p));
            if (after >= before) all_strict = false;
            if (after > before) none_worse = false;
            if (after < before) some_better = true;
        }
        if (all_strict)
            report.manipulations.push_back(ManipulationFinding{deviation, truthful, outcome});
        else if (none_worse && some_better)
            ++report.weak_improvements;
    };

    if (mode == FuzzMode::SingletonExhaustive) {
        std::vector<WeakOrder> orders = enumerate_weak_orders(inst.team_count);
        if (static_cast<std::uint64_t>(m) * orders.size() > enum_cap)
            throw CapacityError("singleton-exhaustive fuzzing needs " + std::to_string(m) + "*" +
                                std::to_string(orders.size()) +
                                " runs, above the enumeration cap of " + std::to_string(enum_cap));
        for (int p = 0; p < m; ++p)
            for (const auto& order : orders)
                evaluate(Deviation{{p}, {order}});
    } else {
        for (std::uint64_t t = 0; t < trials; ++t) {
            SplitMix64 rng(seed ^ (0x51ed270b9f912977ULL + t * 0x2545f4914f6cdd1dULL));
            int size = std::min(m, 2 + static_cast<int>(rng.next_below(2)));
            std::vector<int> pool = shuffled_iota(m, rng);
            Deviation deviation;
            deviation.coalition.assign(pool.begin(), pool.begin() + size);
            std::sort(deviation.coalition.begin(), deviation.coalition.end());
            for (int k = 0; k < size; ++k)
                deviation.reports.push_back(detail::random_weak_order(inst.team_count, rng));
            evaluate(deviation);
        }
    }
    return report;
}

}  // namespace fairmatch

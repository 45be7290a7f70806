#pragma once

// Fairness and efficiency verifiers for the base setting: stochastic
// dominance between bundles, envy-freeness notions, balancedness, swap
// stability, Pareto improvement cycles, and Pareto optimality. Every checker
// returns a PropertyReport whose witness names the violating parties, so a
// failed property is reproducible by hand.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fairmatch/model.hpp"

namespace fairmatch {

inline constexpr std::uint64_t kDefaultEnumCap = 2'000'000;

struct EnvyWitness {
    int participant = -1;
    int envied = -1;
    int own_team = -1;
    int envied_team = -1;
};

struct TeamEnvyWitness {
    int team = -1;
    int other_team = -1;
    std::vector<int> compared;  // the subset of the other bundle that resists every removal
};

struct BalanceWitness {
    int small_team = -1;
    int large_team = -1;
};

struct SwapWitness {
    int participant_a = -1;
    int participant_b = -1;
};

struct CycleWitness {
    std::vector<int> participants;
};

struct AllocationWitness {
    Allocation allocation;
};

struct ClauseWitness {
    int clause = 0;
    int participant = -1;
    int team = -1;
    int other_participant = -1;
    int other_team = -1;
};

using Witness = std::variant<std::monostate, EnvyWitness, TeamEnvyWitness, BalanceWitness,
                             SwapWitness, CycleWitness, AllocationWitness, ClauseWitness>;

struct PropertyReport {
    bool holds = true;
    std::string detail;
    Witness witness;

    static PropertyReport pass() { return PropertyReport{}; }

    static PropertyReport fail(std::string detail, Witness witness) {
        PropertyReport r;
        r.holds = false;
        r.detail = std::move(detail);
        r.witness = std::move(witness);
        return r;
    }
};

// Q weakly SD-dominates R under the given weak order iff some |R|-subset of Q
// can be matched one-to-one onto R weakly-preferred-pointwise. Sorting both
// sides best-first and comparing the top-|R| prefix elementwise decides this
// exactly: the sorted prefix is the greedy system of distinct representatives
// whose existence Hall's condition reduces to.
inline bool sd_dominates(const WeakOrder& order, const std::vector<int>& q,
                         const std::vector<int>& r) {
    if (r.size() > q.size()) return false;
    std::vector<int> qt;
    qt.reserve(q.size());
    for (int a : q) qt.push_back(order.tier_of(a));
    std::vector<int> rt;
    rt.reserve(r.size());
    for (int a : r) rt.push_back(order.tier_of(a));
    std::sort(qt.begin(), qt.end());
    std::sort(rt.begin(), rt.end());
    for (std::size_t i = 0; i < rt.size(); ++i)
        if (qt[i] > rt[i]) return false;
    return true;
}

inline void validate_allocation(const Instance& inst, const Allocation& alloc) {
    if (static_cast<int>(alloc.bundles.size()) != inst.team_count)
        throw std::invalid_argument("allocation needs one bundle per team");
    std::vector<int> seen(static_cast<std::size_t>(inst.participant_count()), 0);
    for (const auto& bundle : alloc.bundles)
        for (int p : bundle) {
            if (p < 0 || p >= inst.participant_count())
                throw std::invalid_argument("allocation contains unknown participant id " +
                                            std::to_string(p));
            if (seen[static_cast<std::size_t>(p)]++)
                throw std::invalid_argument("allocation assigns participant " + std::to_string(p) +
                                            " twice");
        }
    for (int p = 0; p < inst.participant_count(); ++p)
        if (!seen[static_cast<std::size_t>(p)])
            throw std::invalid_argument("allocation leaves participant " + std::to_string(p) +
                                        " unassigned");
}

namespace detail {

inline std::string team_label(int team) { return "team " + std::to_string(team + 1); }

inline std::string participant_label(const Instance& inst, int p) {
    return inst.participants.at(static_cast<std::size_t>(p));
}

}  // namespace detail

// Envy-freeness on the participant side. With justified = false any envy is a
// violation; with justified = true envy only counts when the envied team also
// strictly prefers the envious participant to the one it holds.
inline PropertyReport check_participant_ef(const Instance& inst, const Allocation& alloc,
                                           bool justified) {
    validate_allocation(inst, alloc);
    for (int j = 0; j < inst.team_count; ++j) {
        for (int p : alloc.bundles[static_cast<std::size_t>(j)]) {
            const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(p)];
            for (int i = 0; i < inst.team_count; ++i) {
                if (i == j || prefs.tier_of(i) >= prefs.tier_of(j)) continue;
                const auto& team_order = inst.team_prefs[static_cast<std::size_t>(i)];
                for (int q : alloc.bundles[static_cast<std::size_t>(i)]) {
                    if (justified && team_order.tier_of(p) >= team_order.tier_of(q)) continue;
                    return PropertyReport::fail(
                        detail::participant_label(inst, p) + " envies " +
                            detail::participant_label(inst, q) + " (prefers " +
                            detail::team_label(i) + " to " + detail::team_label(j) +
                            (justified ? ", and that team prefers the envier" : ""),
                        EnvyWitness{p, q, j, i});
                }
            }
        }
    }
    return PropertyReport::pass();
}

// SD envy-freeness up to one participant on the team side. Team i compares
// its bundle against B, either the whole of team j's bundle or (justified
// variant) only the members of it that weakly prefer team i to their own.
// The property asks for some removal X, of size at most one, with
// A_i weakly SD-dominating B minus X.
inline PropertyReport check_team_sd_ef1(const Instance& inst, const Allocation& alloc,
                                        bool justified) {
    validate_allocation(inst, alloc);
    for (int i = 0; i < inst.team_count; ++i) {
        const auto& order = inst.team_prefs[static_cast<std::size_t>(i)];
        const auto& own = alloc.bundles[static_cast<std::size_t>(i)];
        for (int j = 0; j < inst.team_count; ++j) {
            if (i == j) continue;
            std::vector<int> target;
            for (int p : alloc.bundles[static_cast<std::size_t>(j)]) {
                if (justified) {
                    const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(p)];
                    if (prefs.tier_of(i) > prefs.tier_of(j)) continue;
                }
                target.push_back(p);
            }
            if (target.empty()) continue;
            bool ok = sd_dominates(order, own, target);
            for (std::size_t drop = 0; drop < target.size() && !ok; ++drop) {
                std::vector<int> reduced = target;
                reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(drop));
                ok = sd_dominates(order, own, reduced);
            }
            if (!ok)
                return PropertyReport::fail(
                    detail::team_label(i) + " SD-envies " + detail::team_label(j) +
                        " beyond one removal" +
                        (justified ? " (compared against the members preferring it)" : ""),
                    TeamEnvyWitness{i, j, target});
        }
    }
    return PropertyReport::pass();
}

inline PropertyReport check_balanced(const Allocation& alloc) {
    if (alloc.bundles.empty()) return PropertyReport::pass();
    std::size_t small = 0;
    std::size_t large = 0;
    for (std::size_t i = 1; i < alloc.bundles.size(); ++i) {
        if (alloc.bundles[i].size() < alloc.bundles[small].size()) small = i;
        if (alloc.bundles[i].size() > alloc.bundles[large].size()) large = i;
    }
    if (alloc.bundles[large].size() > alloc.bundles[small].size() + 1)
        return PropertyReport::fail(
            "bundle sizes differ by more than one (" + detail::team_label(static_cast<int>(small)) +
                " has " + std::to_string(alloc.bundles[small].size()) + ", " +
                detail::team_label(static_cast<int>(large)) + " has " +
                std::to_string(alloc.bundles[large].size()) + ")",
            BalanceWitness{static_cast<int>(small), static_cast<int>(large)});
    return PropertyReport::pass();
}

// A swap of two participants from different teams is beneficial when all four
// affected parties end up weakly better off, with at least one strictly. The
// allocation is swap stable when no beneficial swap exists.
inline PropertyReport check_swap_stable(const Instance& inst, const Allocation& alloc) {
    validate_allocation(inst, alloc);
    for (int i = 0; i < inst.team_count; ++i) {
        for (int j = 0; j < inst.team_count; ++j) {
            if (i == j) continue;
            const auto& order_i = inst.team_prefs[static_cast<std::size_t>(i)];
            const auto& order_j = inst.team_prefs[static_cast<std::size_t>(j)];
            for (int a : alloc.bundles[static_cast<std::size_t>(i)]) {
                const auto& prefs_a = inst.participant_prefs[static_cast<std::size_t>(a)];
                int a_before = prefs_a.tier_of(i);
                int a_after = prefs_a.tier_of(j);
                if (a_after > a_before) continue;
                for (int b : alloc.bundles[static_cast<std::size_t>(j)]) {
                    const auto& prefs_b = inst.participant_prefs[static_cast<std::size_t>(b)];
                    int b_before = prefs_b.tier_of(j);
                    int b_after = prefs_b.tier_of(i);
                    if (b_after > b_before) continue;
                    std::vector<int> new_i;
                    for (int p : alloc.bundles[static_cast<std::size_t>(i)])
                        if (p != a) new_i.push_back(p);
                    new_i.push_back(b);
                    std::vector<int> new_j;
                    for (int p : alloc.bundles[static_cast<std::size_t>(j)])
                        if (p != b) new_j.push_back(p);
                    new_j.push_back(a);
                    const auto& old_i = alloc.bundles[static_cast<std::size_t>(i)];
                    const auto& old_j = alloc.bundles[static_cast<std::size_t>(j)];
                    if (!sd_dominates(order_i, new_i, old_i)) continue;
                    if (!sd_dominates(order_j, new_j, old_j)) continue;
                    bool strict = a_after < a_before || b_after < b_before ||
                                  !sd_dominates(order_i, old_i, new_i) ||
                                  !sd_dominates(order_j, old_j, new_j);
                    if (strict)
                        return PropertyReport::fail(
                            "swapping " + detail::participant_label(inst, a) + " and " +
                                detail::participant_label(inst, b) + " benefits all parties",
                            SwapWitness{a, b});
                }
            }
        }
    }
    return PropertyReport::pass();
}

// A Pareto improvement cycle is a sequence of at least two distinct
// participants p_{j_1}, ..., p_{j_k} where each p_{j_t} weakly prefers the
// team of p_{j_{t+1}} (cyclically) to her own, that team weakly prefers
// p_{j_t} to p_{j_{t+1}}, and at least one of these preferences is strict.
// Found, if present, by fixing a strict edge and searching a weak-edge path
// back to its tail.
inline std::optional<std::vector<int>> find_pareto_improvement_cycle(const Instance& inst,
                                                                     const Allocation& alloc) {
    validate_allocation(inst, alloc);
    int m = inst.participant_count();
    std::vector<int> team_of(static_cast<std::size_t>(m));
    for (int i = 0; i < inst.team_count; ++i)
        for (int p : alloc.bundles[static_cast<std::size_t>(i)])
            team_of[static_cast<std::size_t>(p)] = i;

    // u -> v means u would take v's spot: u must weakly prefer v's team to
    // her own and v's team must weakly prefer u to v.
    auto weak_edge = [&](int u, int v) {
        const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(u)];
        int target = team_of[static_cast<std::size_t>(v)];
        const auto& order = inst.team_prefs[static_cast<std::size_t>(target)];
        return prefs.tier_of(target) <= prefs.tier_of(team_of[static_cast<std::size_t>(u)]) &&
               order.tier_of(u) <= order.tier_of(v);
    };
    auto strict_edge = [&](int u, int v) {
        if (!weak_edge(u, v)) return false;
        const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(u)];
        int target = team_of[static_cast<std::size_t>(v)];
        const auto& order = inst.team_prefs[static_cast<std::size_t>(target)];
        return prefs.tier_of(target) < prefs.tier_of(team_of[static_cast<std::size_t>(u)]) ||
               order.tier_of(u) < order.tier_of(v);
    };

    for (int u = 0; u < m; ++u) {
        for (int v = 0; v < m; ++v) {
            if (u == v || !strict_edge(u, v)) continue;
            // BFS from v back to u along weak edges
            std::vector<int> parent(static_cast<std::size_t>(m), -2);
            std::vector<int> queue{v};
            parent[static_cast<std::size_t>(v)] = -1;
            for (std::size_t head = 0; head < queue.size(); ++head) {
                int w = queue[static_cast<std::size_t>(head)];
                if (w == u) break;
                for (int x = 0; x < m; ++x) {
                    if (parent[static_cast<std::size_t>(x)] != -2 || x == w) continue;
                    if (!weak_edge(w, x)) continue;
                    parent[static_cast<std::size_t>(x)] = w;
                    queue.push_back(x);
                }
            }
            if (parent[static_cast<std::size_t>(u)] == -2) continue;
            std::vector<int> cycle;
            for (int w = u; w != -1; w = parent[static_cast<std::size_t>(w)])
                cycle.push_back(w);
            std::reverse(cycle.begin(), cycle.end());  // v ... u
            std::rotate(cycle.begin(), cycle.end() - 1, cycle.end());  // u v ...
            return cycle;
        }
    }
    return std::nullopt;
}

namespace detail {

inline std::uint64_t allocation_space_size(int team_count, int participant_count,
                                           std::uint64_t cap) {
    std::uint64_t total = 1;
    for (int p = 0; p < participant_count; ++p) {
        total *= static_cast<std::uint64_t>(team_count);
        if (total > cap) return cap + 1;
    }
    return total;
}

// Enumerates all team_count^participant_count allocations in odometer order.
// Stops early when the callback returns false.
inline void for_each_allocation(int team_count, int participant_count,
                                const std::function<bool(const Allocation&)>& visit) {
    std::vector<int> team_of(static_cast<std::size_t>(participant_count), 0);
    while (true) {
        Allocation a = make_allocation(team_count);
        for (int p = 0; p < participant_count; ++p)
            a.bundles[static_cast<std::size_t>(team_of[static_cast<std::size_t>(p)])].push_back(p);
        if (!visit(a)) return;
        int pos = participant_count - 1;
        while (pos >= 0 && team_of[static_cast<std::size_t>(pos)] == team_count - 1) {
            team_of[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) return;
        ++team_of[static_cast<std::size_t>(pos)];
    }
}

}  // namespace detail

// Exhaustive Pareto improvement search over all allocations, balanced or not.
// Participants compare teams by tier; teams compare bundles by weak SD
// dominance and improve strictly when dominance fails in reverse.
inline std::optional<Allocation> find_pareto_improvement_bruteforce(const Instance& inst,
                                                                    const Allocation& alloc,
                                                                    std::uint64_t enum_cap) {
    validate_allocation(inst, alloc);
    if (detail::allocation_space_size(inst.team_count, inst.participant_count(), enum_cap) >
        enum_cap)
        throw CapacityError("Pareto optimality brute force needs " +
                            std::to_string(inst.team_count) + "^" +
                            std::to_string(inst.participant_count()) +
                            " allocations, above the enumeration cap of " +
                            std::to_string(enum_cap));
    std::vector<int> team_of(static_cast<std::size_t>(inst.participant_count()));
    for (int i = 0; i < inst.team_count; ++i)
        for (int p : alloc.bundles[static_cast<std::size_t>(i)])
            team_of[static_cast<std::size_t>(p)] = i;

    std::optional<Allocation> found;
    detail::for_each_allocation(
        inst.team_count, inst.participant_count(), [&](const Allocation& candidate) {
            bool weak = true;
            bool strict = false;
            for (int p = 0; p < inst.participant_count(); ++p) {
                const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(p)];
                int before = prefs.tier_of(team_of[static_cast<std::size_t>(p)]);
                int after = prefs.tier_of(candidate.team_of(p));
                if (after > before) {
                    weak = false;
                    break;
                }
                if (after < before) strict = true;
            }
            for (int i = 0; i < inst.team_count && weak; ++i) {
                const auto& order = inst.team_prefs[static_cast<std::size_t>(i)];
                const auto& before = alloc.bundles[static_cast<std::size_t>(i)];
                const auto& after = candidate.bundles[static_cast<std::size_t>(i)];
                if (!sd_dominates(order, after, before)) weak = false;
                else if (!sd_dominates(order, before, after)) strict = true;
            }
            if (weak && strict) {
                found = candidate;
                return false;
            }
            return true;
        });
    return found;
}

enum class Prop {
    ParticipantEF,
    ParticipantJustifiedEF,
    TeamSdEF1,
    TeamJustifiedSdEF1,
    Balanced,
    SwapStable,
    ParetoOptimal,
};

PropertyReport check_po(const Instance& inst, const Allocation& alloc, std::uint64_t enum_cap);

inline PropertyReport check_property(const Instance& inst, const Allocation& alloc, Prop prop,
                                     std::uint64_t enum_cap = kDefaultEnumCap) {
    switch (prop) {
        case Prop::ParticipantEF: return check_participant_ef(inst, alloc, false);
        case Prop::ParticipantJustifiedEF: return check_participant_ef(inst, alloc, true);
        case Prop::TeamSdEF1: return check_team_sd_ef1(inst, alloc, false);
        case Prop::TeamJustifiedSdEF1: return check_team_sd_ef1(inst, alloc, true);
        case Prop::Balanced: return check_balanced(alloc);
        case Prop::SwapStable: return check_swap_stable(inst, alloc);
        case Prop::ParetoOptimal: return check_po(inst, alloc, enum_cap);
    }
    throw std::logic_error("unhandled property");
}

// Pareto optimality. For participant-justified envy-free allocations the
// absence of a Pareto improvement cycle is equivalent to Pareto optimality,
// so the cycle search decides the property in polynomial time. Other
// allocations fall back to the exhaustive search, which refuses to run past
// the enumeration cap.
inline PropertyReport check_po(const Instance& inst, const Allocation& alloc,
                               std::uint64_t enum_cap = kDefaultEnumCap) {
    validate_allocation(inst, alloc);
    if (check_participant_ef(inst, alloc, true).holds) {
        if (auto cycle = find_pareto_improvement_cycle(inst, alloc)) {
            std::string names;
            for (std::size_t i = 0; i < cycle->size(); ++i) {
                if (i) names += " -> ";
                names += detail::participant_label(inst, (*cycle)[i]);
            }
            return PropertyReport::fail("Pareto improvement cycle " + names,
                                        CycleWitness{*cycle});
        }
        return PropertyReport::pass();
    }
    if (auto better = find_pareto_improvement_bruteforce(inst, alloc, enum_cap))
        return PropertyReport::fail("another allocation Pareto-dominates this one",
                                    AllocationWitness{*better});
    return PropertyReport::pass();
}

}  // namespace fairmatch

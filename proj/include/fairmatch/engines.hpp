#pragma once

// The three allocation engines and the two classical reference procedures.
//
//   round_robin_top        teams pick in index order from the participants
//                          that rank them in their top tier
//   auxiliary_gale_shapley  strict auxiliary one-to-one market over team
//                          slots, solved by participant-proposing deferred
//                          acceptance
//   main_algorithm         grows per-participant eligibility sets and
//                          recomputes the lexicographically optimal matching
//                          until it is complete
//
// round_robin_reference and gale_shapley_reference implement the textbook
// procedures the engines are compared against on restricted preference
// domains.

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "fairmatch/matching_core.hpp"
#include "fairmatch/model.hpp"
#include "fairmatch/rng.hpp"

namespace fairmatch {

// Teams take turns in index order. On its turn a team picks its most
// preferred remaining participant, lowest id first within a tier, but only
// among participants whose top tier contains that team; a team whose pool is
// exhausted is skipped.
inline Allocation round_robin_top(const Instance& inst) {
    validate_instance(inst);
    int m = inst.participant_count();
    std::vector<char> remaining(static_cast<std::size_t>(m), 1);
    int remaining_count = m;
    Allocation alloc = make_allocation(inst.team_count);
    while (remaining_count > 0) {
        int picked_this_pass = 0;
        for (int i = 0; i < inst.team_count && remaining_count > 0; ++i) {
            const auto& order = inst.team_prefs[static_cast<std::size_t>(i)];
            int best = -1;
            for (int p = 0; p < m; ++p) {
                if (!remaining[static_cast<std::size_t>(p)]) continue;
                if (inst.participant_prefs[static_cast<std::size_t>(p)].tier_of(i) != 0) continue;
                if (best == -1 || order.tier_of(p) < order.tier_of(best)) best = p;
            }
            if (best == -1) continue;
            remaining[static_cast<std::size_t>(best)] = 0;
            --remaining_count;
            ++picked_this_pass;
            alloc.bundles[static_cast<std::size_t>(i)].push_back(best);
        }
        if (picked_this_pass == 0)
            throw std::logic_error("round robin made no progress with participants remaining");
    }
    sort_allocation(alloc);
    return alloc;
}

// Plain round robin over all remaining participants, for comparison on the
// domain where every participant is indifferent between all teams.
inline Allocation round_robin_reference(const Instance& inst) {
    validate_instance(inst);
    int m = inst.participant_count();
    std::vector<char> remaining(static_cast<std::size_t>(m), 1);
    int remaining_count = m;
    Allocation alloc = make_allocation(inst.team_count);
    int turn = 0;
    while (remaining_count > 0) {
        const auto& order = inst.team_prefs[static_cast<std::size_t>(turn)];
        int best = -1;
        for (int p = 0; p < m; ++p) {
            if (!remaining[static_cast<std::size_t>(p)]) continue;
            if (best == -1 || order.tier_of(p) < order.tier_of(best)) best = p;
        }
        remaining[static_cast<std::size_t>(best)] = 0;
        --remaining_count;
        alloc.bundles[static_cast<std::size_t>(turn)].push_back(best);
        turn = (turn + 1) % inst.team_count;
    }
    sort_allocation(alloc);
    return alloc;
}

// The strict one-to-one market the auxiliary engine runs deferred acceptance
// on. Every slot of a team shares the team's tie-broken list; a participant
// ranks slots by team tier, interleaving the slots of equally preferred
// teams by slot index first and team id second.
struct AuxiliaryInstance {
    std::vector<Slot> slots;
    std::vector<std::vector<int>> slot_rankings;         // per slot, participants best first
    std::vector<std::vector<int>> participant_rankings;  // per participant, slot ids best first
};

// Tie-break seed 0 orders every tier by participant id; any other seed draws
// one Fisher-Yates shuffle per team tier, teams in id order.
inline AuxiliaryInstance build_auxiliary_instance(const Instance& inst,
                                                  std::uint64_t tie_break_seed) {
    validate_instance(inst);
    AuxiliaryInstance aux;
    aux.slots = make_slots(slot_layout(inst.team_count, inst.participant_count()));
    SplitMix64 rng(tie_break_seed);

    std::vector<std::vector<int>> team_lists(static_cast<std::size_t>(inst.team_count));
    for (int i = 0; i < inst.team_count; ++i) {
        for (const auto& tier : inst.team_prefs[static_cast<std::size_t>(i)].tiers()) {
            std::vector<int> broken = tier;
            if (tie_break_seed != 0) fisher_yates(broken, rng);
            for (int p : broken) team_lists[static_cast<std::size_t>(i)].push_back(p);
        }
    }
    aux.slot_rankings.reserve(aux.slots.size());
    for (const auto& slot : aux.slots)
        aux.slot_rankings.push_back(team_lists[static_cast<std::size_t>(slot.team)]);

    aux.participant_rankings.resize(static_cast<std::size_t>(inst.participant_count()));
    for (int p = 0; p < inst.participant_count(); ++p) {
        const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(p)];
        auto& ranking = aux.participant_rankings[static_cast<std::size_t>(p)];
        for (const auto& tier : prefs.tiers()) {
            std::vector<char> in_tier(static_cast<std::size_t>(inst.team_count), 0);
            for (int team : tier) in_tier[static_cast<std::size_t>(team)] = 1;
            // slot ids are already sorted by (index, team id)
            for (int s = 0; s < static_cast<int>(aux.slots.size()); ++s)
                if (in_tier[static_cast<std::size_t>(aux.slots[static_cast<std::size_t>(s)].team)])
                    ranking.push_back(s);
        }
    }
    return aux;
}

// Participant-proposing deferred acceptance on the auxiliary market. Both
// sides rank strictly and the slot count equals the participant count, so
// the result is a perfect matching.
inline SlotMatching run_deferred_acceptance(const AuxiliaryInstance& aux) {
    int m = static_cast<int>(aux.participant_rankings.size());
    int slot_count = static_cast<int>(aux.slots.size());
    std::vector<std::vector<int>> slot_rank_of(static_cast<std::size_t>(slot_count),
                                               std::vector<int>(static_cast<std::size_t>(m), -1));
    for (int s = 0; s < slot_count; ++s)
        for (int rank = 0; rank < static_cast<int>(aux.slot_rankings[static_cast<std::size_t>(s)].size());
             ++rank)
            slot_rank_of[static_cast<std::size_t>(s)][static_cast<std::size_t>(
                aux.slot_rankings[static_cast<std::size_t>(s)][static_cast<std::size_t>(rank)])] =
                rank;

    std::vector<int> held(static_cast<std::size_t>(slot_count), -1);
    std::vector<std::size_t> next_choice(static_cast<std::size_t>(m), 0);
    std::deque<int> free;
    for (int p = 0; p < m; ++p) free.push_back(p);
    while (!free.empty()) {
        int p = free.front();
        free.pop_front();
        const auto& ranking = aux.participant_rankings[static_cast<std::size_t>(p)];
        if (next_choice[static_cast<std::size_t>(p)] >= ranking.size())
            throw std::logic_error("deferred acceptance exhausted a preference list");
        int s = ranking[next_choice[static_cast<std::size_t>(p)]++];
        int holder = held[static_cast<std::size_t>(s)];
        if (holder == -1) {
            held[static_cast<std::size_t>(s)] = p;
        } else if (slot_rank_of[static_cast<std::size_t>(s)][static_cast<std::size_t>(p)] <
                   slot_rank_of[static_cast<std::size_t>(s)][static_cast<std::size_t>(holder)]) {
            held[static_cast<std::size_t>(s)] = p;
            free.push_back(holder);
        } else {
            free.push_back(p);
        }
    }

    SlotMatching matching(m, slot_count);
    for (int s = 0; s < slot_count; ++s)
        if (held[static_cast<std::size_t>(s)] != -1)
            matching.assign(held[static_cast<std::size_t>(s)], s);
    return matching;
}

inline Allocation auxiliary_gale_shapley(const Instance& inst, std::uint64_t tie_break_seed = 0) {
    AuxiliaryInstance aux = build_auxiliary_instance(inst, tie_break_seed);
    SlotMatching matching = run_deferred_acceptance(aux);
    return fold_to_allocation(matching, aux.slots, inst.team_count);
}

// Textbook participant-proposing deferred acceptance with capacities, defined
// for strict preferences only. Throws std::invalid_argument if any weak order
// on either side contains a tie.
inline Allocation gale_shapley_reference(const Instance& inst,
                                         const std::vector<int>& capacities) {
    validate_instance(inst);
    if (static_cast<int>(capacities.size()) != inst.team_count)
        throw std::invalid_argument("gale_shapley_reference needs one capacity per team");
    for (const auto& wo : inst.team_prefs)
        if (wo.tier_count() != wo.universe_size())
            throw std::invalid_argument("gale_shapley_reference requires strict team preferences");
    for (const auto& wo : inst.participant_prefs)
        if (wo.tier_count() != wo.universe_size())
            throw std::invalid_argument(
                "gale_shapley_reference requires strict participant preferences");

    int m = inst.participant_count();
    std::vector<std::vector<int>> held(static_cast<std::size_t>(inst.team_count));
    std::vector<std::size_t> next_choice(static_cast<std::size_t>(m), 0);
    std::deque<int> free;
    for (int p = 0; p < m; ++p) free.push_back(p);
    while (!free.empty()) {
        int p = free.front();
        free.pop_front();
        const auto& prefs = inst.participant_prefs[static_cast<std::size_t>(p)];
        if (next_choice[static_cast<std::size_t>(p)] >= static_cast<std::size_t>(prefs.tier_count()))
            continue;  // every team rejected p; p stays unassigned
        int team =
            prefs.tiers()[next_choice[static_cast<std::size_t>(p)]++][0];
        auto& members = held[static_cast<std::size_t>(team)];
        members.push_back(p);
        if (static_cast<int>(members.size()) > capacities[static_cast<std::size_t>(team)]) {
            const auto& order = inst.team_prefs[static_cast<std::size_t>(team)];
            std::size_t worst = 0;
            for (std::size_t k = 1; k < members.size(); ++k)
                if (order.tier_of(members[k]) > order.tier_of(members[worst])) worst = k;
            int rejected = members[worst];
            members.erase(members.begin() + static_cast<std::ptrdiff_t>(worst));
            free.push_back(rejected);
        }
    }

    Allocation alloc = make_allocation(inst.team_count);
    alloc.bundles = held;
    sort_allocation(alloc);
    return alloc;
}

struct IterationRecord {
    EligibilitySets eligibility;
    SlotMatching matching;
    std::vector<int> slot_values;
    std::vector<int> participant_outcomes;
};

struct MainResult {
    Allocation allocation;
    std::vector<Slot> slots;
    std::vector<IterationRecord> iterations;
};

// The main engine over an explicit slot layout whose total equals the
// participant count. Each round first extends the eligibility set of every
// still unmatched participant by its most preferred teams not yet eligible
// (the whole next tier), then recomputes the lexicographically optimal
// matching from scratch. Terminates when the matching is perfect.
inline MainResult main_algorithm_with_slots(const Instance& inst,
                                            const std::vector<int>& slot_counts,
                                            const PairOrder& pair_order) {
    validate_instance(inst);
    if (static_cast<int>(slot_counts.size()) != inst.team_count)
        throw std::invalid_argument("main algorithm needs one slot count per team");
    int total = 0;
    for (int cnt : slot_counts) total += cnt;
    int m = inst.participant_count();
    if (total != m)
        throw std::invalid_argument("main algorithm needs slot counts summing to m");

    MainResult result;
    result.slots = make_slots(slot_counts);
    EligibilitySets elig(m);
    SlotMatching matching(m, total);

    int max_iterations = inst.team_count * m + 1;
    for (int round = 0; round < max_iterations; ++round) {
        if (matching.size() == m) {
            result.allocation = fold_to_allocation(matching, result.slots, inst.team_count);
            return result;
        }
        for (int p = 0; p < m; ++p) {
            if (matching.participant_matched(p)) continue;
            auto& eset = elig.sets[static_cast<std::size_t>(p)];
            if (static_cast<int>(eset.size()) == inst.team_count) continue;
            for (const auto& tier : inst.participant_prefs[static_cast<std::size_t>(p)].tiers()) {
                bool missing = false;
                for (int team : tier)
                    if (!eset.count(team)) missing = true;
                if (!missing) continue;
                for (int team : tier) eset.insert(team);
                break;
            }
        }
        LexoptResult lex = lexopt_matching(inst, result.slots, elig, pair_order);
        matching = lex.matching;
        result.iterations.push_back(
            IterationRecord{elig, lex.matching, lex.slot_values, lex.participant_outcomes});
    }
    throw std::logic_error("main algorithm failed to complete its matching");
}

inline MainResult main_algorithm(const Instance& inst, const PairOrder& pair_order) {
    return main_algorithm_with_slots(inst, slot_layout(inst.team_count, inst.participant_count()),
                                     pair_order);
}

inline MainResult main_algorithm(const Instance& inst) {
    int m = inst.participant_count();
    return main_algorithm(inst, default_pair_order(m, m));
}

}  // namespace fairmatch

#pragma once

// Core domain types for two-sided many-to-one matching under weak preferences:
// weak orders, instances, team-slots, slot matchings, allocations, eligibility
// sets, and the quota/unassigned extension.
//
// Conventions used throughout the library:
//   - participants are dense ids 0..m-1; the id order is the tie-break order
//     p_1,...,p_m (display names live in Instance::participants)
//   - teams are dense ids 0..n-1 and are displayed 1-based
//   - slots are referenced by dense slot ids indexing a slot vector that is
//     kept in round-robin priority order (see make_slots)

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairmatch {

class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Comparison { Better, Equal, Worse };

// A complete transitive preference with ties, stored as indifference tiers.
// Tier 0 is the most preferred. The universe is the dense id range
// [0, universe_size); every alternative appears in exactly one tier.
class WeakOrder {
public:
    WeakOrder() = default;

    WeakOrder(std::vector<std::vector<int>> tiers, int universe_size)
        : tiers_(std::move(tiers)), tier_of_(static_cast<std::size_t>(universe_size), -1) {
        int seen = 0;
        for (std::size_t t = 0; t < tiers_.size(); ++t) {
            if (tiers_[t].empty())
                throw std::invalid_argument("weak order tier " + std::to_string(t) + " is empty");
            std::sort(tiers_[t].begin(), tiers_[t].end());
            for (int a : tiers_[t]) {
                if (a < 0 || a >= universe_size)
                    throw std::invalid_argument("weak order contains out-of-range alternative " +
                                                std::to_string(a));
                if (tier_of_[static_cast<std::size_t>(a)] != -1)
                    throw std::invalid_argument("weak order ranks alternative " + std::to_string(a) +
                                                " more than once");
                tier_of_[static_cast<std::size_t>(a)] = static_cast<int>(t);
                ++seen;
            }
        }
        if (seen != universe_size)
            throw std::invalid_argument("weak order does not cover its universe");
    }

    int universe_size() const { return static_cast<int>(tier_of_.size()); }
    int tier_count() const { return static_cast<int>(tiers_.size()); }

    int tier_of(int alternative) const {
        if (alternative < 0 || alternative >= universe_size())
            throw std::out_of_range("unknown alternative " + std::to_string(alternative));
        return tier_of_[static_cast<std::size_t>(alternative)];
    }

    const std::vector<std::vector<int>>& tiers() const { return tiers_; }

    bool operator==(const WeakOrder&) const = default;

private:
    std::vector<std::vector<int>> tiers_;
    std::vector<int> tier_of_;
};

inline Comparison compare(const WeakOrder& order, int a, int b) {
    int ta = order.tier_of(a);
    int tb = order.tier_of(b);
    if (ta < tb) return Comparison::Better;
    if (ta > tb) return Comparison::Worse;
    return Comparison::Equal;
}

// An instance of the base setting: n teams, m participants, and a weak order
// per party over the opposite side.
struct Instance {
    int team_count = 0;
    std::vector<std::string> participants;
    std::vector<WeakOrder> team_prefs;         // over participant ids [0, m)
    std::vector<WeakOrder> participant_prefs;  // over team ids [0, n)

    int participant_count() const { return static_cast<int>(participants.size()); }
};

inline void validate_instance(const Instance& inst) {
    if (inst.team_count < 1) throw std::invalid_argument("instance needs at least one team");
    if (inst.participant_count() < 1)
        throw std::invalid_argument("instance needs at least one participant");
    if (static_cast<int>(inst.team_prefs.size()) != inst.team_count)
        throw std::invalid_argument("instance needs one preference per team");
    if (inst.participant_prefs.size() != inst.participants.size())
        throw std::invalid_argument("instance needs one preference per participant");
    for (const auto& wo : inst.team_prefs)
        if (wo.universe_size() != inst.participant_count())
            throw std::invalid_argument("team preference does not cover the participant set");
    for (const auto& wo : inst.participant_prefs)
        if (wo.universe_size() != inst.team_count)
            throw std::invalid_argument("participant preference does not cover the team set");
}

// One unit of a team's capacity. index is the 1-based rank within the team,
// the l in the i_l notation.
struct Slot {
    int team = 0;
    int index = 1;

    bool operator==(const Slot&) const = default;
};

inline std::string slot_name(const Slot& s) {
    return std::to_string(s.team + 1) + "_" + std::to_string(s.index);
}

// Base-setting capacities: with k = floor(m/n) and r = m - kn, teams 1..r own
// k+1 slots and the rest own k. The counts always sum to m.
inline std::vector<int> slot_layout(int team_count, int participant_count) {
    if (team_count < 1) throw std::invalid_argument("slot_layout needs at least one team");
    if (participant_count < 0) throw std::invalid_argument("slot_layout needs m >= 0");
    int k = participant_count / team_count;
    int r = participant_count - k * team_count;
    std::vector<int> counts(static_cast<std::size_t>(team_count), k);
    for (int i = 0; i < r; ++i) counts[static_cast<std::size_t>(i)] = k + 1;
    return counts;
}

// Lists slots in round-robin priority order: all first slots by team id, then
// all second slots, and so on. Teams whose capacity is exhausted are skipped
// in later rounds, which also covers heterogeneous quota layouts.
inline std::vector<Slot> make_slots(const std::vector<int>& counts) {
    int max_count = 0;
    for (int c : counts) {
        if (c < 0) throw std::invalid_argument("negative slot count");
        max_count = std::max(max_count, c);
    }
    std::vector<Slot> slots;
    for (int level = 1; level <= max_count; ++level)
        for (int team = 0; team < static_cast<int>(counts.size()); ++team)
            if (counts[static_cast<std::size_t>(team)] >= level)
                slots.push_back(Slot{team, level});
    return slots;
}

// A partial one-to-one matching between participants and slots. Mutations
// preserve one-to-one-ness by construction.
class SlotMatching {
public:
    SlotMatching() = default;

    SlotMatching(int participant_count, int slot_count)
        : slot_of_(static_cast<std::size_t>(participant_count), -1),
          participant_of_(static_cast<std::size_t>(slot_count), -1) {}

    void assign(int participant, int slot) {
        if (slot_of_.at(static_cast<std::size_t>(participant)) != -1)
            throw std::invalid_argument("participant already matched");
        if (participant_of_.at(static_cast<std::size_t>(slot)) != -1)
            throw std::invalid_argument("slot already matched");
        slot_of_[static_cast<std::size_t>(participant)] = slot;
        participant_of_[static_cast<std::size_t>(slot)] = participant;
        ++size_;
    }

    void unassign_participant(int participant) {
        int slot = slot_of_.at(static_cast<std::size_t>(participant));
        if (slot == -1) return;
        slot_of_[static_cast<std::size_t>(participant)] = -1;
        participant_of_[static_cast<std::size_t>(slot)] = -1;
        --size_;
    }

    int slot_of(int participant) const { return slot_of_.at(static_cast<std::size_t>(participant)); }
    int participant_of(int slot) const { return participant_of_.at(static_cast<std::size_t>(slot)); }
    bool participant_matched(int participant) const { return slot_of(participant) != -1; }
    bool slot_matched(int slot) const { return participant_of(slot) != -1; }

    int size() const { return size_; }
    int participant_count() const { return static_cast<int>(slot_of_.size()); }
    int slot_count() const { return static_cast<int>(participant_of_.size()); }

    std::vector<std::pair<int, int>> pairs() const {
        std::vector<std::pair<int, int>> out;
        for (int p = 0; p < participant_count(); ++p)
            if (slot_of_[static_cast<std::size_t>(p)] != -1)
                out.emplace_back(p, slot_of_[static_cast<std::size_t>(p)]);
        return out;
    }

    bool operator==(const SlotMatching&) const = default;

private:
    std::vector<int> slot_of_;
    std::vector<int> participant_of_;
    int size_ = 0;
};

// An ordered list of team bundles. In the base setting the bundles partition
// the participant set; in the extended setting their union may be a strict
// subset and the leftovers are unassigned.
struct Allocation {
    std::vector<std::vector<int>> bundles;

    int team_of(int participant) const {
        for (int i = 0; i < static_cast<int>(bundles.size()); ++i)
            for (int p : bundles[static_cast<std::size_t>(i)])
                if (p == participant) return i;
        return -1;
    }

    bool operator==(const Allocation&) const = default;
};

inline Allocation make_allocation(int team_count) {
    Allocation a;
    a.bundles.resize(static_cast<std::size_t>(team_count));
    return a;
}

inline void sort_allocation(Allocation& a) {
    for (auto& b : a.bundles) std::sort(b.begin(), b.end());
}

inline Allocation fold_to_allocation(const SlotMatching& matching, const std::vector<Slot>& slots,
                                     int team_count) {
    Allocation a = make_allocation(team_count);
    for (auto [p, s] : matching.pairs())
        a.bundles.at(static_cast<std::size_t>(slots.at(static_cast<std::size_t>(s)).team)).push_back(p);
    sort_allocation(a);
    return a;
}

// The per-participant sets of teams the matching stage may use. They only
// ever grow over the run of the main algorithm.
struct EligibilitySets {
    std::vector<std::set<int>> sets;

    explicit EligibilitySets(int participant_count = 0)
        : sets(static_cast<std::size_t>(participant_count)) {}

    bool eligible(int participant, int team) const {
        return sets.at(static_cast<std::size_t>(participant)).count(team) > 0;
    }

    void add(int participant, int team) { sets.at(static_cast<std::size_t>(participant)).insert(team); }

    bool operator==(const EligibilitySets&) const = default;
};

// The quota/unassigned extension. Preferences additionally rank the
// distinguished unassigned option: participants over team ids plus id n,
// teams over participant ids plus id m.
struct ExtendedInstance {
    int team_count = 0;
    std::vector<std::string> participants;
    std::vector<WeakOrder> team_prefs;         // universe m+1, option id m
    std::vector<WeakOrder> participant_prefs;  // universe n+1, option id n
    std::vector<int> quotas;

    int participant_count() const { return static_cast<int>(participants.size()); }
    int unassigned_participant_id() const { return participant_count(); }
    int unassigned_team_id() const { return team_count; }
};

inline void validate_extended_instance(const ExtendedInstance& ext) {
    if (ext.team_count < 1) throw std::invalid_argument("instance needs at least one team");
    if (ext.participant_count() < 1)
        throw std::invalid_argument("instance needs at least one participant");
    if (static_cast<int>(ext.team_prefs.size()) != ext.team_count)
        throw std::invalid_argument("instance needs one preference per team");
    if (ext.participant_prefs.size() != ext.participants.size())
        throw std::invalid_argument("instance needs one preference per participant");
    for (const auto& wo : ext.team_prefs)
        if (wo.universe_size() != ext.participant_count() + 1)
            throw std::invalid_argument(
                "team preference must cover the participants plus the unassigned option");
    for (const auto& wo : ext.participant_prefs)
        if (wo.universe_size() != ext.team_count + 1)
            throw std::invalid_argument(
                "participant preference must cover the teams plus the unassigned option");
    if (static_cast<int>(ext.quotas.size()) != ext.team_count)
        throw std::invalid_argument("instance needs one quota per team");
    for (int q : ext.quotas)
        if (q < 1 || q > ext.participant_count())
            throw std::invalid_argument("quotas must lie in [1, m]");
}

// The alternating participant/slot sequence (p_j1, x_1, ..., p_jh, x_h) whose
// absence certifies per-iteration optimality of the computed matching.
struct BlockingPath {
    std::vector<std::pair<int, int>> steps;  // (participant id, slot id)
};

}  // namespace fairmatch

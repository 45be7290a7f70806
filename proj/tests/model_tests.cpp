#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <utility>
#include <vector>

#include "fairmatch/model.hpp"
#include "support/builders.hpp"

using namespace fairmatch;
using fairmatch::testing::make_base;
using fairmatch::testing::make_extended;

TEST_CASE("weak order stores sorted tiers and answers lookups") {
    WeakOrder order({{2, 0}, {1}}, 3);
    CHECK(order.universe_size() == 3);
    CHECK(order.tier_count() == 2);
    CHECK(order.tier_of(0) == 0);
    CHECK(order.tier_of(2) == 0);
    CHECK(order.tier_of(1) == 1);
    CHECK(order.tiers()[0] == std::vector<int>{0, 2});
    CHECK(compare(order, 0, 1) == Comparison::Better);
    CHECK(compare(order, 1, 0) == Comparison::Worse);
    CHECK(compare(order, 0, 2) == Comparison::Equal);
    CHECK_THROWS_AS(order.tier_of(3), std::out_of_range);
    CHECK_THROWS_AS(order.tier_of(-1), std::out_of_range);
}

TEST_CASE("weak order rejects malformed tier lists") {
    CHECK_THROWS_AS(WeakOrder({{0}, {}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(WeakOrder({{0, 2}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(WeakOrder({{0}, {0}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(WeakOrder({{0}}, 2), std::invalid_argument);
}

TEST_CASE("slot layout splits m over n teams with the remainder up front") {
    CHECK(slot_layout(3, 7) == std::vector<int>{3, 2, 2});
    CHECK(slot_layout(3, 6) == std::vector<int>{2, 2, 2});
    CHECK(slot_layout(4, 2) == std::vector<int>{1, 1, 0, 0});
    CHECK(slot_layout(1, 5) == std::vector<int>{5});
    CHECK_THROWS_AS(slot_layout(0, 3), std::invalid_argument);
}

TEST_CASE("slots are listed in round robin priority order") {
    auto slots = make_slots({2, 1, 2});
    REQUIRE(slots.size() == 5);
    CHECK(slots[0] == Slot{0, 1});
    CHECK(slots[1] == Slot{1, 1});
    CHECK(slots[2] == Slot{2, 1});
    CHECK(slots[3] == Slot{0, 2});
    CHECK(slots[4] == Slot{2, 2});
    CHECK(slot_name(slots[3]) == "1_2");
    CHECK(slot_name(slots[2]) == "3_1");
    CHECK(make_slots({0, 0}).empty());
    CHECK_THROWS_AS(make_slots({-1}), std::invalid_argument);
}

TEST_CASE("slot matching keeps assignments one to one") {
    SlotMatching matching(3, 2);
    matching.assign(0, 1);
    CHECK(matching.slot_of(0) == 1);
    CHECK(matching.participant_of(1) == 0);
    CHECK(matching.participant_matched(0));
    CHECK_FALSE(matching.slot_matched(0));
    CHECK(matching.size() == 1);
    CHECK_THROWS_AS(matching.assign(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(matching.assign(1, 1), std::invalid_argument);
    matching.assign(1, 0);
    CHECK(matching.pairs() == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
    matching.unassign_participant(0);
    CHECK(matching.size() == 1);
    CHECK_FALSE(matching.slot_matched(1));
    matching.unassign_participant(0);
    CHECK(matching.size() == 1);
}

TEST_CASE("folding a matching groups participants by slot team") {
    auto slots = make_slots({2, 1});
    SlotMatching matching(3, 3);
    matching.assign(2, 0);
    matching.assign(0, 1);
    matching.assign(1, 2);
    Allocation alloc = fold_to_allocation(matching, slots, 2);
    CHECK(alloc.bundles == std::vector<std::vector<int>>{{1, 2}, {0}});
    CHECK(alloc.team_of(0) == 1);
    CHECK(alloc.team_of(1) == 0);
    CHECK(alloc.team_of(2) == 0);
}

TEST_CASE("allocations answer membership queries") {
    Allocation alloc = testing::alloc_of({{2, 0}, {}, {1}});
    CHECK(alloc.bundles[0] == std::vector<int>{0, 2});
    CHECK(alloc.team_of(1) == 2);
    CHECK(alloc.team_of(3) == -1);
}

TEST_CASE("eligibility sets grow and answer membership") {
    EligibilitySets elig(2);
    CHECK_FALSE(elig.eligible(0, 1));
    elig.add(0, 1);
    elig.add(0, 1);
    CHECK(elig.eligible(0, 1));
    CHECK_FALSE(elig.eligible(1, 1));
    CHECK(elig.sets[0].size() == 1);
}

TEST_CASE("instance validation rejects mismatched shapes") {
    Instance inst = make_base({{{0, 1}}, {{1}, {0}}}, {{{0}, {1}}, {{0, 1}}});
    CHECK(inst.participant_count() == 2);
    CHECK(inst.participants == std::vector<std::string>{"p1", "p2"});

    Instance missing_team_pref = inst;
    missing_team_pref.team_prefs.pop_back();
    CHECK_THROWS_AS(validate_instance(missing_team_pref), std::invalid_argument);

    Instance wrong_universe = inst;
    wrong_universe.participant_prefs[0] = WeakOrder({{0}}, 1);
    CHECK_THROWS_AS(validate_instance(wrong_universe), std::invalid_argument);

    Instance no_teams = inst;
    no_teams.team_count = 0;
    CHECK_THROWS_AS(validate_instance(no_teams), std::invalid_argument);
}

TEST_CASE("extended instance validation enforces quota bounds") {
    ExtendedInstance ext = make_extended({{{0, 1, 2}}, {{0}, {1, 2}}},
                                         {{{0, 1, 2}}, {{1}, {0, 2}}}, {1, 2});
    CHECK(ext.unassigned_participant_id() == 2);
    CHECK(ext.unassigned_team_id() == 2);

    ExtendedInstance zero_quota = ext;
    zero_quota.quotas[0] = 0;
    CHECK_THROWS_AS(validate_extended_instance(zero_quota), std::invalid_argument);

    ExtendedInstance huge_quota = ext;
    huge_quota.quotas[1] = 3;
    CHECK_THROWS_AS(validate_extended_instance(huge_quota), std::invalid_argument);

    ExtendedInstance bad_universe = ext;
    bad_universe.team_prefs[0] = WeakOrder({{0, 1}}, 2);
    CHECK_THROWS_AS(validate_extended_instance(bad_universe), std::invalid_argument);
}

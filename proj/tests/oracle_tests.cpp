#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <variant>
#include <vector>

#include "fairmatch/io.hpp"
#include "fairmatch/oracle.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace fairmatch;
using fairmatch::testing::alloc_of;
using fairmatch::testing::data_file;
using fairmatch::testing::make_base;
using fairmatch::testing::read_text_file;

namespace {

Instance load_base(const std::string& name) {
    ParsedInstance parsed = parse_instance_text(read_text_file(data_file(name)));
    REQUIRE(std::holds_alternative<Instance>(parsed));
    return std::get<Instance>(parsed);
}

struct RandomState {
    Instance inst;
    std::vector<Slot> slots;
    EligibilitySets elig;
    SlotMatching matching;
};

RandomState random_state(std::uint64_t instance_seed, SplitMix64& rng) {
    int n = 2 + static_cast<int>(rng.next_below(2));
    int m = 2 + static_cast<int>(rng.next_below(4));
    RandomState state{generate(n, m, 0.5, instance_seed), make_slots(slot_layout(n, m)),
                      EligibilitySets(m), SlotMatching(m, m)};
    for (int p = 0; p < m; ++p) {
        state.elig.add(p, static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n))));
        for (int t = 0; t < n; ++t)
            if (rng.chance_per_mille(400)) state.elig.add(p, t);
    }
    for (int p = 0; p < m; ++p) {
        if (!rng.chance_per_mille(600)) continue;
        int s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m)));
        if (state.matching.slot_matched(s)) continue;
        if (!state.elig.eligible(p, state.slots[static_cast<std::size_t>(s)].team)) continue;
        state.matching.assign(p, s);
    }
    return state;
}

}  // namespace

TEST_CASE("weak order enumeration follows the Fubini numbers") {
    std::vector<std::size_t> sizes;
    for (int universe = 0; universe <= 4; ++universe)
        sizes.push_back(enumerate_weak_orders(universe).size());
    CHECK(sizes == std::vector<std::size_t>{1, 1, 3, 13, 75});

    std::vector<WeakOrder> pairs = enumerate_weak_orders(2);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0] == WeakOrder({{0}, {1}}, 2));
    CHECK(pairs[1] == WeakOrder({{1}, {0}}, 2));
    CHECK(pairs[2] == WeakOrder({{0, 1}}, 2));

    std::vector<WeakOrder> triples = enumerate_weak_orders(3);
    for (std::size_t a = 0; a < triples.size(); ++a)
        for (std::size_t b = a + 1; b < triples.size(); ++b)
            CHECK_FALSE(triples[a] == triples[b]);
}

TEST_CASE("allocation enumeration walks the odometer exactly once") {
    AllocationEnumerator it(2, 3);
    std::vector<Allocation> all;
    while (auto alloc = it.next()) all.push_back(*alloc);
    REQUIRE(all.size() == 8);
    CHECK(all[0] == alloc_of({{0, 1, 2}, {}}));
    CHECK(all[1] == alloc_of({{0, 1}, {2}}));
    CHECK(all.back() == alloc_of({{}, {0, 1, 2}}));
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b) CHECK_FALSE(all[a] == all[b]);
    CHECK_FALSE(it.next().has_value());

    AllocationEnumerator empty(1, 0);
    CHECK(empty.next() == alloc_of({{}}));
    CHECK_FALSE(empty.next().has_value());

    CHECK_THROWS_AS(AllocationEnumerator(3, 20, 1000), CapacityError);
}

TEST_CASE("the impossibility instance separates the two team fairness notions") {
    Instance inst = load_base("impossibility.json");
    CHECK_FALSE(exists_allocation_satisfying(
                    inst, {Prop::TeamSdEF1, Prop::ParticipantJustifiedEF})
                    .has_value());
    auto witness = exists_allocation_satisfying(
        inst, {Prop::TeamJustifiedSdEF1, Prop::ParticipantJustifiedEF});
    REQUIRE(witness.has_value());
    CHECK(*witness == alloc_of({{0, 1, 2, 3}, {}}));
}

TEST_CASE("main engine iteration states admit no blocking path") {
    SplitMix64 rng(0xfadedULL);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(3));
        int m = 2 + static_cast<int>(rng.next_below(5));
        Instance inst = generate(n, m, 0.4, 10000 + static_cast<std::uint64_t>(trial));
        MainResult result = main_algorithm(inst);
        for (std::size_t it = 0; it < result.iterations.size(); ++it) {
            const auto& record = result.iterations[it];
            INFO("trial " << trial << " iteration " << it);
            CHECK_FALSE(find_blocking_path(inst, record.matching, record.eligibility, result.slots)
                            .has_value());
            CHECK_FALSE(fairmatch::testing::oracle_find_blocking_path(
                            inst, record.matching, record.eligibility, result.slots)
                            .has_value());
        }
    }
}

TEST_CASE("blocking path search agrees with exhaustive enumeration") {
    SplitMix64 rng(0xb10cULL);
    int with_path = 0;
    for (int trial = 0; trial < 100; ++trial) {
        RandomState state = random_state(11000 + static_cast<std::uint64_t>(trial), rng);
        auto found = find_blocking_path(state.inst, state.matching, state.elig, state.slots);
        auto reference = fairmatch::testing::oracle_find_blocking_path(
            state.inst, state.matching, state.elig, state.slots);
        INFO("trial " << trial);
        CHECK(found.has_value() == reference.has_value());
        if (found)
            CHECK(is_blocking_path(state.inst, state.matching, state.elig, state.slots, *found));
        if (reference) {
            CHECK(is_blocking_path(state.inst, state.matching, state.elig, state.slots,
                                   *reference));
            ++with_path;
        }
    }
    CHECK(with_path >= 15);
}

TEST_CASE("the path validator rejects tampered sequences") {
    // p2 is unmatched and eligible for team 1, whose slot is held by the
    // indifferent p1; p1 can slide to the free team 2 slot it values equally.
    Instance inst = make_base({{{0, 1}}, {{0, 1}}}, {{{0, 1}}, {{0}, {1}}});
    std::vector<Slot> slots = make_slots(slot_layout(2, 2));
    EligibilitySets elig(2);
    elig.add(0, 0);
    elig.add(1, 0);
    SlotMatching matching(2, 2);
    matching.assign(0, 0);

    auto found = find_blocking_path(inst, matching, elig, slots);
    REQUIRE(found.has_value());
    CHECK(found->steps == std::vector<std::pair<int, int>>{{1, 0}, {0, 1}});
    CHECK(is_blocking_path(inst, matching, elig, slots, *found));

    CHECK_FALSE(is_blocking_path(inst, matching, elig, slots, BlockingPath{}));
    BlockingPath doubled = *found;
    doubled.steps.push_back(doubled.steps.front());
    CHECK_FALSE(is_blocking_path(inst, matching, elig, slots, doubled));
    BlockingPath out_of_range = *found;
    out_of_range.steps.front().second = 9;
    CHECK_FALSE(is_blocking_path(inst, matching, elig, slots, out_of_range));

    // A participant already sitting in the slot it points to is not a path.
    BlockingPath self;
    self.steps = {{0, 0}};
    CHECK_FALSE(is_blocking_path(inst, matching, elig, slots, self));

    // Dropping the first step leaves a start that gains nothing by moving.
    BlockingPath tail = *found;
    tail.steps.erase(tail.steps.begin());
    CHECK_FALSE(is_blocking_path(inst, matching, elig, slots, tail));
}

TEST_CASE("singleton fuzzing enumerates every weak order report") {
    Instance inst = make_base({{{0}, {1}}, {{1}, {0}}}, {{{0}, {1}}, {{1}, {0}}});
    FuzzReport report = strategyproofness_fuzz(inst, FuzzMode::SingletonExhaustive, 0, 0);
    CHECK(report.deviations_tested == 6);
    CHECK(report.manipulations.empty());

    Instance wider = generate(2, 3, 0.5, 11);
    FuzzReport wide_report =
        strategyproofness_fuzz(wider, FuzzMode::SingletonExhaustive, 0, 0);
    CHECK(wide_report.deviations_tested == 9);
    CHECK(wide_report.manipulations.empty());

    CHECK_THROWS_AS(strategyproofness_fuzz(inst, FuzzMode::SingletonExhaustive, 0, 0, 3),
                    CapacityError);
}

TEST_CASE("group fuzzing is deterministic and finds no manipulation") {
    Instance inst = generate(3, 4, 0.5, 13);
    FuzzReport first = strategyproofness_fuzz(inst, FuzzMode::GroupRandom, 50, 42);
    CHECK(first.deviations_tested == 50);
    CHECK(first.manipulations.empty());
    FuzzReport second = strategyproofness_fuzz(inst, FuzzMode::GroupRandom, 50, 42);
    CHECK(second.deviations_tested == first.deviations_tested);
    CHECK(second.weak_improvements == first.weak_improvements);
    CHECK(second.manipulations.empty());
}

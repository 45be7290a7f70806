#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <variant>
#include <vector>

#include "fairmatch/io.hpp"
#include "fairmatch/oracle.hpp"
#include "fairmatch/relations.hpp"
#include "fairmatch/rng.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace fairmatch;
using fairmatch::testing::alloc_of;
using fairmatch::testing::make_base;

TEST_CASE("sd dominance agrees with the permutation oracle on random triples") {
    SplitMix64 rng(0x5eed5eedULL);
    for (int trial = 0; trial < 2000; ++trial) {
        int universe = 1 + static_cast<int>(rng.next_below(7));
        WeakOrder order = detail::random_weak_order(universe, rng);
        std::vector<int> q;
        std::vector<int> r;
        for (int a = 0; a < universe; ++a) {
            if (rng.chance_per_mille(500)) q.push_back(a);
            if (rng.chance_per_mille(500)) r.push_back(a);
        }
        bool fast = sd_dominates(order, q, r);
        bool slow = testing::oracle_sd_dominates(order, q, r);
        INFO("universe " << universe << " trial " << trial);
        CHECK(fast == slow);
    }
}

TEST_CASE("sd dominance basics") {
    WeakOrder order({{0}, {1, 2}, {3}}, 4);
    CHECK(sd_dominates(order, {}, {}));
    CHECK(sd_dominates(order, {3}, {}));
    CHECK_FALSE(sd_dominates(order, {}, {3}));
    CHECK(sd_dominates(order, {0, 1}, {1, 0}));
    CHECK(sd_dominates(order, {0, 1}, {2, 3}));
    CHECK_FALSE(sd_dominates(order, {1, 3}, {0, 3}));
    CHECK(sd_dominates(order, {1}, {2}));
}

TEST_CASE("allocation validation requires a full partition") {
    Instance inst = make_base({{{0, 1}}, {{0, 1}}}, {{{0, 1}}, {{0, 1}}});
    CHECK_THROWS_AS(validate_allocation(inst, alloc_of({{0, 1}})), std::invalid_argument);
    CHECK_THROWS_AS(validate_allocation(inst, alloc_of({{0, 2}, {1}})), std::invalid_argument);
    CHECK_THROWS_AS(validate_allocation(inst, alloc_of({{0, 1}, {1}})), std::invalid_argument);
    CHECK_THROWS_AS(validate_allocation(inst, alloc_of({{0}, {}})), std::invalid_argument);
    CHECK_NOTHROW(validate_allocation(inst, alloc_of({{0, 1}, {}})));
}

TEST_CASE("participant envy checks distinguish plain and justified envy") {
    // p1 sits in team 2 but strictly prefers team 1, which holds p2.
    Instance liked = make_base({{{0}, {1}}, {{0, 1}}}, {{{0}, {1}}, {{0, 1}}});
    Allocation alloc = alloc_of({{1}, {0}});

    PropertyReport plain = check_participant_ef(liked, alloc, false);
    CHECK_FALSE(plain.holds);
    auto* envy = std::get_if<EnvyWitness>(&plain.witness);
    REQUIRE(envy != nullptr);
    CHECK(envy->participant == 0);
    CHECK(envy->envied == 1);
    CHECK(envy->own_team == 1);
    CHECK(envy->envied_team == 0);
    CHECK_FALSE(check_participant_ef(liked, alloc, true).holds);

    // Same shape, but team 1 prefers its current member, so the envy is not
    // justified.
    Instance disliked = make_base({{{1}, {0}}, {{0, 1}}}, {{{0}, {1}}, {{0, 1}}});
    CHECK_FALSE(check_participant_ef(disliked, alloc, false).holds);
    CHECK(check_participant_ef(disliked, alloc, true).holds);

    // Ties on the envied team also block justification.
    Instance tied = make_base({{{0, 1}}, {{0, 1}}}, {{{0}, {1}}, {{0, 1}}});
    CHECK_FALSE(check_participant_ef(tied, alloc, false).holds);
    CHECK(check_participant_ef(tied, alloc, true).holds);

    CHECK(check_participant_ef(liked, alloc_of({{0}, {1}}), false).holds);
}

TEST_CASE("team sd envy-freeness up to one removal") {
    // Team 1 is empty while team 2 holds two participants team 1 ranks first.
    Instance inst = make_base({{{0, 1}, {2}}, {{0, 1, 2}}},
                              {{{0, 1}}, {{0, 1}}, {{0, 1}}});
    Allocation two_better = alloc_of({{2}, {0, 1}});
    PropertyReport plain = check_team_sd_ef1(inst, two_better, false);
    CHECK_FALSE(plain.holds);
    auto* witness = std::get_if<TeamEnvyWitness>(&plain.witness);
    REQUIRE(witness != nullptr);
    CHECK(witness->team == 0);
    CHECK(witness->other_team == 1);
    CHECK(witness->compared == std::vector<int>{0, 1});

    // One removal repairs a single better participant.
    CHECK(check_team_sd_ef1(inst, alloc_of({{1, 2}, {0}}), false).holds);

    // The justified variant only compares against members that weakly prefer
    // the envious team.
    Instance opposed = make_base({{{0, 1}, {2}}, {{0, 1, 2}}},
                                 {{{1}, {0}}, {{1}, {0}}, {{0, 1}}});
    CHECK_FALSE(check_team_sd_ef1(opposed, two_better, false).holds);
    CHECK(check_team_sd_ef1(opposed, two_better, true).holds);

    // With a strict ranking p2 > p1 > p3, holding p2 survives any comparison,
    // while holding only p3 loses to {p1, p2} under every single removal.
    Instance ranked = make_base({{{1}, {0}, {2}}, {{0, 1, 2}}},
                                {{{0, 1}}, {{0, 1}}, {{0, 1}}});
    CHECK(check_team_sd_ef1(ranked, alloc_of({{1}, {0, 2}}), false).holds);
    CHECK_FALSE(check_team_sd_ef1(ranked, alloc_of({{2}, {0, 1}}), false).holds);
}

TEST_CASE("balancedness tolerates a difference of one") {
    CHECK(check_balanced(alloc_of({{0, 1}, {2}})).holds);
    CHECK(check_balanced(alloc_of({})).holds);
    PropertyReport report = check_balanced(alloc_of({{0, 1}, {}}));
    CHECK_FALSE(report.holds);
    auto* witness = std::get_if<BalanceWitness>(&report.witness);
    REQUIRE(witness != nullptr);
    CHECK(witness->small_team == 1);
    CHECK(witness->large_team == 0);
}

TEST_CASE("swap stability reproduces the beneficial swap example") {
    ParsedInstance parsed =
        parse_instance_text(testing::read_text_file(testing::data_file("swap_golden.json")));
    REQUIRE(std::holds_alternative<Instance>(parsed));
    const auto& inst = std::get<Instance>(parsed);

    Allocation unstable = alloc_of({{0, 2}, {1, 3}});
    PropertyReport report = check_swap_stable(inst, unstable);
    CHECK_FALSE(report.holds);
    auto* witness = std::get_if<SwapWitness>(&report.witness);
    REQUIRE(witness != nullptr);
    CHECK(witness->participant_a == 2);
    CHECK(witness->participant_b == 1);

    Allocation swapped = alloc_of({{0, 1}, {2, 3}});
    CHECK(check_swap_stable(inst, swapped).holds);
}

TEST_CASE("pareto improvement cycles need both sides to agree") {
    // Two participants who want to trade places between indifferent teams.
    Instance trade = make_base({{{0, 1}}, {{0, 1}}}, {{{1}, {0}}, {{0}, {1}}});
    Allocation crossed = alloc_of({{0}, {1}});
    auto cycle = find_pareto_improvement_cycle(trade, crossed);
    REQUIRE(cycle.has_value());
    CHECK(cycle->size() == 2);
    CHECK_FALSE(check_po(trade, crossed).holds);
    CHECK(check_po(trade, alloc_of({{1}, {0}})).holds);
    CHECK_FALSE(find_pareto_improvement_cycle(trade, alloc_of({{1}, {0}})).has_value());

    // A trade the teams veto: each team strictly prefers its current member.
    Instance veto = make_base({{{0}, {1}}, {{1}, {0}}}, {{{1}, {0}}, {{0}, {1}}});
    CHECK_FALSE(find_pareto_improvement_cycle(veto, crossed).has_value());
    CHECK(check_po(veto, crossed).holds);

    // Three-cycle forced by strict participant preferences.
    Instance rotation = make_base({{{0, 1, 2}}, {{0, 1, 2}}, {{0, 1, 2}}},
                                  {{{1}, {0}, {2}}, {{2}, {1}, {0}}, {{0}, {2}, {1}}});
    auto three = find_pareto_improvement_cycle(rotation, alloc_of({{0}, {1}, {2}}));
    REQUIRE(three.has_value());
    std::vector<int> sorted = *three;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2});
}

TEST_CASE("pareto optimality falls back to brute force without justified envy-freeness") {
    // p1 justifiably envies p2, so the cycle shortcut does not apply; the
    // exhaustive search still finds the swap.
    Instance inst = make_base({{{0}, {1}}, {{0, 1}}}, {{{0}, {1}}, {{0, 1}}});
    Allocation crossed = alloc_of({{1}, {0}});
    REQUIRE_FALSE(check_participant_ef(inst, crossed, true).holds);
    PropertyReport report = check_po(inst, crossed);
    CHECK_FALSE(report.holds);
    CHECK(std::get_if<AllocationWitness>(&report.witness) != nullptr);
    CHECK_THROWS_AS(check_po(inst, crossed, 2), CapacityError);
    CHECK_THROWS_AS(find_pareto_improvement_bruteforce(inst, crossed, 2), CapacityError);
}

TEST_CASE("pareto optimality agrees with the definitional oracle") {
    SplitMix64 rng(0xf00dULL);
    int checked = 0;
    for (double tie : {0.0, 0.3, 0.7, 1.0}) {
        for (int n = 2; n <= 3; ++n) {
            for (int m = 2; m <= 4; ++m) {
                for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                    Instance inst = generate(n, m, tie, seed * 977 + checked);
                    for (int draw = 0; draw < 2; ++draw) {
                        Allocation alloc = make_allocation(n);
                        for (int p = 0; p < m; ++p)
                            alloc.bundles[static_cast<std::size_t>(rng.next_below(
                                                static_cast<std::uint64_t>(n)))]
                                .push_back(p);
                        bool fast = check_po(inst, alloc).holds;
                        auto slow = testing::oracle_pareto_improvement(inst, alloc);
                        INFO("n " << n << " m " << m << " tie " << tie << " draw " << draw);
                        CHECK(fast == !slow.has_value());
                        auto direct = find_pareto_improvement_bruteforce(inst, alloc,
                                                                         kDefaultEnumCap);
                        CHECK(direct.has_value() == slow.has_value());
                        if (direct && slow) CHECK(*direct == *slow);
                        ++checked;
                    }
                }
            }
        }
    }
    CHECK(checked == 240);
}

TEST_CASE("property dispatch covers every property") {
    Instance inst = make_base({{{0, 1}}, {{0, 1}}}, {{{0, 1}}, {{0, 1}}});
    Allocation alloc = alloc_of({{0}, {1}});
    for (Prop prop : {Prop::ParticipantEF, Prop::ParticipantJustifiedEF, Prop::TeamSdEF1,
                      Prop::TeamJustifiedSdEF1, Prop::Balanced, Prop::SwapStable,
                      Prop::ParetoOptimal})
        CHECK(check_property(inst, alloc, prop).holds);
}

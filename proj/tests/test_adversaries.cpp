#include "iecc/adversaries.hpp"
#include "iecc/bitflip.hpp"
#include "iecc/errors.hpp"
#include "iecc/search.hpp"

#include <doctest.h>

#include <sstream>

using namespace iecc;

namespace {

SessionConfig cfg611(std::size_t n, Rational eps, std::size_t m) {
    SessionConfig c;
    c.protocol = ProtocolKind::P611;
    c.n = n;
    c.epsilon = eps;
    c.m = m;
    return c;
}

/// Flips needed to make Alice (input x) send `to_bob` and receive `to_alice`,
/// with Bob reacting to `to_bob`. Plain replay, independent of the generator.
std::size_t replay_cost(const FlipProtocol& p, const BitWord& x, const std::vector<BitWord>& to_bob,
                        const std::vector<BitWord>& to_alice) {
    std::size_t flips = 0;
    std::vector<BitWord> alice_heard, bob_heard;
    for (std::size_t k = 0; k < p.chunks; ++k) {
        const BitWord a = p.alice(x, alice_heard);
        for (std::size_t i = 0; i < a.size(); ++i) flips += a[i] != to_bob[k][i];
        bob_heard.push_back(to_bob[k]);
        const BitWord b = p.bob(bob_heard);
        for (std::size_t i = 0; i < b.size(); ++i) flips += b[i] != to_alice[k][i];
        alice_heard.push_back(to_alice[k]);
    }
    return flips;
}

FlipProtocol silent(std::size_t n, bool alice_talks) {
    FlipProtocol p;
    p.name = alice_talks ? "bob_silent" : "alice_silent";
    p.chunks = 3;
    p.alice_length = alice_talks ? 2 * n : 0;
    p.bob_length = alice_talks ? 0 : 4;
    p.alice = [alice_talks, n](const BitWord& x, const std::vector<BitWord>&) {
        if (!alice_talks) return BitWord(0);
        BitWord w(2 * n);
        for (std::size_t b = 0; b < n; ++b) {
            w.set(2 * b, x[b]);
            w.set(2 * b + 1, x[b]);
        }
        return w;
    };
    p.bob = [alice_talks](const std::vector<BitWord>& heard) {
        return alice_talks ? BitWord(0) : BitWord(4, heard.size() % 2 == 1);
    };
    p.output = [n](const std::vector<BitWord>& heard) {
        BitWord out(n);
        if (!heard.empty() && heard.back().size() >= 2 * n)
            for (std::size_t b = 0; b < n; ++b) out.set(b, heard.back()[2 * b]);
        return out;
    };
    return p;
}

} // namespace

TEST_CASE("random adversary spends exactly floor(budget * total)") {
    auto cfg = cfg611(3, Rational(1, 2), 16);
    for (auto budget : {Rational(0), Rational(1, 3), Rational(1)}) {
        RandomAdversary adv(budget, 9);
        auto r = run_session(cfg, BitWord::from_string("010"), adv);
        const auto want = static_cast<std::size_t>(boost::rational_cast<double>(budget) * 176 + 1e-9);
        CHECK(r.erased_alice_rounds + r.erased_bob_rounds == want);
        CHECK(r.invariant_violations.empty());
    }
    RandomAdversary none(Rational(0), 1);
    CHECK(run_session(cfg, BitWord::from_string("111"), none).success);
}

TEST_CASE("budget cap clips an over-eager adversary") {
    auto cfg = cfg611(3, Rational(1, 2), 16);
    BudgetCapped capped(std::make_unique<RandomAdversary>(Rational(1), 2), Rational(1, 4));
    auto r = run_session(cfg, BitWord::from_string("100"), capped);
    CHECK(r.erased_alice_rounds + r.erased_bob_rounds == 44);
}

TEST_CASE("chunk actions") {
    auto p = make_protocol(cfg611(2, Rational(1, 2), 32));
    const auto x = BitWord::from_string("01");

    SUBCASE("menu order") {
        auto menu = action_menu(x);
        REQUIRE(menu.size() == 9);
        CHECK(to_string(menu[0]) == "pass");
        CHECK(to_string(menu[1]) == "blind_alice");
        CHECK(to_string(menu[2]) == "blind_bob");
        CHECK(to_string(menu[3]) == "confuse(00)");
        CHECK(to_string(menu[5]) == "confuse(11)");
        CHECK(to_string(menu[6]) == "blind_bob_and_confuse(00)");
    }
    SUBCASE("blinding costs whole messages") {
        const std::size_t T = p->schedule().chunk_count;
        ChunkActionAdversary alice_blind(std::vector<ChunkAction>(T, ChunkAction::blind_alice()));
        auto r = run_session(p, x, alice_blind);
        CHECK(r.erased_alice_rounds == 32 * T);
        CHECK(r.erased_bob_rounds == 0);
        ChunkActionAdversary bob_blind(std::vector<ChunkAction>(T, ChunkAction::blind_bob()));
        r = run_session(p, x, bob_blind);
        CHECK(r.erased_bob_rounds == 12 * T);
        CHECK(r.erased_alice_rounds == 0);
    }
    SUBCASE("random action sequences are seeded") {
        CHECK(random_actions(8, 2, 4) == random_actions(8, 2, 4));
        CHECK(random_actions(8, 2, 4).size() == 8);
    }
}

TEST_CASE("plans round-trip and replay") {
    auto p = make_protocol(default_config(ProtocolKind::P35));
    RandomAdversary adv(Rational(2, 5), 3);
    const auto x = BitWord::from_string("11");
    auto r = run_session(p, x, adv);
    auto plan = AttackPlan::from_transcript(r, "random 2/5");
    CHECK(plan.total_cost == r.erased_alice_rounds + r.erased_bob_rounds);
    CHECK(plan.recompute_cost() == plan.total_cost);
    validate(plan, p->schedule());

    std::ostringstream os;
    write_plan(os, plan);
    std::istringstream is(os.str());
    auto back = read_plan(is);
    CHECK(back.total_cost == plan.total_cost);
    CHECK(back.masks.size() == plan.masks.size());
    std::ostringstream again;
    write_plan(again, back);
    CHECK(again.str() == os.str());

    PlanAdversary replay(back);
    auto r2 = run_session(p, x, replay);
    CHECK(r2.bob_output == r.bob_output);
    REQUIRE(r2.transcript.size() == r.transcript.size());
    for (std::size_t k = 0; k < r.transcript.size(); ++k) CHECK(r2.transcript[k].mask == r.transcript[k].mask);
}

TEST_CASE("plan validation and parse errors") {
    auto s = make_schedule(cfg611(2, Rational(1, 2), 32));
    AttackPlan plan;
    plan.masks.push_back({0, Speaker::Bob, BitWord(5)});
    CHECK_THROWS_AS(validate(plan, s), AdversaryProtocolError);
    plan.masks = {{s.chunk_count, Speaker::Alice, BitWord(32)}};
    CHECK_THROWS_AS(validate(plan, s), AdversaryProtocolError);

    std::istringstream no_header("{\"chunk\":0,\"speaker\":\"alice\",\"mask\":\"01\"}\n");
    CHECK_THROWS_AS(read_plan(no_header), ParseError);
    std::istringstream bad_speaker("{\"type\":\"header\",\"description\":\"\",\"total_cost\":1,\"params\":{}}\n"
                                   "{\"chunk\":0,\"speaker\":\"carol\",\"mask\":\"01\"}\n");
    CHECK_THROWS_AS(read_plan(bad_speaker), ParseError);
    std::istringstream bad_cost("{\"type\":\"header\",\"description\":\"\",\"total_cost\":5,\"params\":{}}\n"
                                "{\"chunk\":0,\"speaker\":\"alice\",\"mask\":\"01\"}\n");
    CHECK_THROWS_AS(read_plan(bad_cost), ParseError);
}

TEST_CASE("confusion attack on both protocols") {
    for (auto kind : {ProtocolKind::P611, ProtocolKind::P35}) {
        auto cfg = default_config(kind);
        auto v = erasure_confusion_attack(cfg);
        const auto sched = make_schedule(cfg);
        CHECK(v.bob_fraction == sched.bob_fraction());
        CHECK(v.cost_fraction <= v.bound);
        CHECK(v.views_identical);
        CHECK(v.input_a != v.input_b);
        CHECK(v.fooled);
        CHECK(v.plan.recompute_cost() == v.plan.total_cost);
        CHECK(Rational(static_cast<std::int64_t>(v.plan.total_cost),
                       static_cast<std::int64_t>(sched.total_rounds)) == v.cost_fraction);
        if (kind == ProtocolKind::P611) CHECK(v.bound == Rational(7, 11));
        if (kind == ProtocolKind::P35) CHECK(v.bound == Rational(3, 5));
    }
}

TEST_CASE("bit-flip attack on the repetition strawman") {
    const std::size_t n = 3;
    auto p = strawman_protocol(n);
    auto a = bitflip_attack(p, all_inputs(n));
    CHECK(a.views_identical);
    CHECK(a.fooled);
    CHECK(a.within_bound);
    CHECK(a.replay_flips_i == replay_cost(p, a.input_i, a.to_bob, a.to_alice));
    CHECK(a.replay_flips_j == replay_cost(p, a.input_j, a.to_bob, a.to_alice));
    CHECK(a.cost_i == a.replay_flips_i);
    CHECK(a.cost_j == a.cost_i + a.slack);
    CHECK(a.bound == Rational(static_cast<std::int64_t>(2 * p.bob_rounds() + p.alice_rounds()), 4));
    const auto cost = std::max(a.cost_i, a.cost_j);
    CHECK(Rational(static_cast<std::int64_t>(cost)) <= a.bound);
}

TEST_CASE("bit-flip attack edge cases") {
    auto p = strawman_protocol(2);
    CHECK_THROWS_AS(bitflip_attack(p, {BitWord::from_string("01")}), InvalidInput);
    CHECK_THROWS_AS(bitflip_attack(p, {BitWord::from_string("01"), BitWord::from_string("01")}), InvalidInput);

    auto two = bitflip_attack(p, {BitWord::from_string("01"), BitWord::from_string("10")});
    CHECK(two.views_identical);

    // With Alice silent nothing separates the inputs: Bob's words need no flips.
    auto quiet = silent(2, false);
    auto q = bitflip_attack(quiet, all_inputs(2));
    CHECK(q.cost_i == 0);
    CHECK(Rational(static_cast<std::int64_t>(q.cost_i)) <= Rational(static_cast<std::int64_t>(quiet.bob_rounds()), 2));

    // With Bob silent the cost is at most a quarter of Alice's rounds.
    auto one_way = silent(2, true);
    auto o = bitflip_attack(one_way, all_inputs(2));
    CHECK(o.views_identical);
    CHECK(4 * std::max(o.cost_i, o.cost_j) <= one_way.alice_rounds());
}

TEST_CASE("search finds nothing without budget and a plan with full budget") {
    auto cfg = cfg611(2, Rational(1, 2), 32);
    auto none = attack_search(cfg, Rational(0), SearchMethod::exhaustive());
    CHECK_FALSE(none.plan.has_value());

    auto found = attack_search(cfg, Rational(1), SearchMethod::exhaustive());
    REQUIRE(found.plan.has_value());
    CHECK(*found.wrong_output != *found.fooled_input);
    CHECK(found.plan->total_cost <= found.budget_rounds);

    // Replaying the plan reproduces the wrong output.
    PlanAdversary replay(*found.plan);
    auto r = run_session(cfg, *found.fooled_input, replay);
    CHECK(r.bob_output == *found.wrong_output);
    CHECK(r.erased_alice_rounds + r.erased_bob_rounds == found.plan->total_cost);
}

TEST_CASE("search is deterministic") {
    auto cfg = cfg611(2, Rational(1, 2), 32);
    auto a = attack_search(cfg, Rational(1, 2), SearchMethod::beam(16, 5));
    auto b = attack_search(cfg, Rational(1, 2), SearchMethod::beam(16, 5));
    CHECK(a.nodes == b.nodes);
    CHECK(a.actions == b.actions);
    CHECK(a.plan.has_value() == b.plan.has_value());
}

TEST_CASE("oversized exhaustive searches are refused") {
    auto cfg = default_config(ProtocolKind::P35);
    SearchMethod m = SearchMethod::exhaustive();
    m.node_cap = 1000;
    CHECK_THROWS_AS(attack_search(cfg, Rational(1, 2), m), SearchSpaceTooLarge);
}

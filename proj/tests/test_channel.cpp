#include "iecc/adversaries.hpp"
#include "iecc/errors.hpp"

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

class EraseAll final : public Adversary {
public:
    BitWord choose_mask(const MessageView& v) override { return BitWord(v.sent.size(), true); }
    std::string describe() const override { return "erase_all"; }
    std::unique_ptr<Adversary> clone() const override { return std::make_unique<EraseAll>(*this); }
};

class ShortMask final : public Adversary {
public:
    BitWord choose_mask(const MessageView& v) override { return BitWord(v.sent.size() - 1); }
    std::string describe() const override { return "short"; }
    std::unique_ptr<Adversary> clone() const override { return std::make_unique<ShortMask>(*this); }
};

} // namespace

TEST_CASE("6/11 schedule at n=3, eps=1/2, M=16") {
    auto s = make_schedule(cfg611(3, Rational(1, 2), 16));
    CHECK(s.chunk_count == 8);
    CHECK(s.total_rounds == 176);
    CHECK(s.bob_fraction() == Rational(3, 11));
}

TEST_CASE("3/5 schedule at n=2, eps=1/2, M=4") {
    SessionConfig c;
    c.protocol = ProtocolKind::P35;
    c.n = 2;
    c.epsilon = Rational(1, 2);
    c.m = 4;
    auto s = make_schedule(c);
    CHECK(s.chunk_count == 16);
    CHECK(s.total_rounds == 320);
    CHECK(s.bob_fraction() == Rational(1, 5));
    // Megablock 1 starts at chunk 8 (B = 4 blocks of C = 2 chunks).
    CHECK(s.label(8).megablock == 1);
    CHECK(s.label(8).megablock_start());
    CHECK(s.label(9).block == 4);
    CHECK_FALSE(s.label(9).block_start());
    CHECK(s.label(10).block_start());
    CHECK_FALSE(s.label(10).megablock_start());
}

TEST_CASE("schedule conformance: segments alternate and sum to the total") {
    for (auto kind : {ProtocolKind::P611, ProtocolKind::P35}) {
        auto s = make_schedule(default_config(kind));
        std::size_t sum = 0;
        for (std::size_t k = 0; k < s.segments.size(); ++k) {
            CHECK(s.segments[k].speaker == (k % 2 == 0 ? Speaker::Alice : Speaker::Bob));
            CHECK(s.segments[k].first_round == sum);
            sum += s.segments[k].length;
        }
        CHECK(sum == s.total_rounds);
    }
}

TEST_CASE("invalid configurations") {
    CHECK_THROWS_AS(make_schedule(cfg611(3, Rational(1, 2), 12)), InvalidConfig);
    CHECK_THROWS_AS(make_schedule(cfg611(0, Rational(1, 2), 16)), InvalidConfig);
    CHECK_THROWS_AS(make_schedule(cfg611(3, Rational(0), 16)), InvalidConfig);
    CHECK_THROWS_AS(make_schedule(cfg611(3, Rational(3, 2), 16)), InvalidConfig);
    SessionConfig c = cfg611(3, Rational(1, 2), 16);
    c.code_epsilon = Rational(1, 4);
    CHECK_THROWS_AS(validate(c), InvalidConfig);
    CHECK_THROWS_AS(parse_protocol("47"), InvalidConfig);
}

TEST_CASE("null adversary: success at zero cost") {
    auto cfg = cfg611(3, Rational(1, 2), 16);
    NullAdversary adv;
    auto r = run_session(cfg, BitWord::from_string("101"), adv);
    CHECK(r.success);
    CHECK(r.total_erasure_fraction == Rational(0));
    CHECK(budget_fraction(r) == Rational(0));
    CHECK(r.invariant_violations.empty());
}

TEST_CASE("erasing everything costs the whole budget and violates nothing") {
    for (auto kind : {ProtocolKind::P611, ProtocolKind::P35}) {
        EraseAll adv;
        auto r = run_session(default_config(kind), BitWord::from_uint(1, default_config(kind).n), adv);
        CHECK(r.total_erasure_fraction == Rational(1));
        CHECK(r.erased_alice_rounds + r.erased_bob_rounds == r.total_rounds);
        CHECK(r.invariant_violations.empty());
        CHECK(std::find(r.flags.begin(), r.flags.end(), "finalize_fallback") != r.flags.end());
    }
}

TEST_CASE("budget accounting is split by speaker") {
    auto cfg = cfg611(3, Rational(1, 2), 16);
    RandomAdversary adv(Rational(1, 2), 4);
    auto r = run_session(cfg, BitWord::from_string("011"), adv);
    std::size_t alice = 0, bob = 0;
    for (const auto& m : r.transcript) (m.speaker == Speaker::Alice ? alice : bob) += m.mask.weight();
    CHECK(alice == r.erased_alice_rounds);
    CHECK(bob == r.erased_bob_rounds);
    CHECK(alice + bob == 88);
    CHECK(budget_fraction(r) == Rational(1, 2));
}

TEST_CASE("a mask of the wrong length is rejected") {
    ShortMask adv;
    CHECK_THROWS_AS(run_session(cfg611(2, Rational(1, 2), 16), BitWord::from_string("01"), adv),
                    AdversaryProtocolError);
}

TEST_CASE("traces are deterministic, ordered, and round-trip") {
    auto cfg = default_config(ProtocolKind::P35);
    auto once = [&] {
        RandomAdversary adv(Rational(2, 5), 17);
        auto r = run_session(cfg, BitWord::from_string("10"), adv, {true});
        std::ostringstream os;
        write_trace(os, r.trace);
        return std::make_pair(r, os.str());
    };
    auto [r1, t1] = once();
    auto [r2, t2] = once();
    CHECK(t1 == t2);
    for (std::size_t k = 1; k < r1.trace.size(); ++k) CHECK(r1.trace[k - 1].round <= r1.trace[k].round);
    CHECK(r1.trace.back().kind == TraceEvent::Kind::Finalize);

    std::istringstream is(t1);
    auto back = read_trace(is);
    REQUIRE(back.size() == r1.trace.size());
    std::ostringstream again;
    write_trace(again, back);
    CHECK(again.str() == t1);

    const auto first = t1.substr(0, t1.find('\n'));
    CHECK(first.rfind("{\"round\":0,\"kind\":\"chunk_start\"", 0) == 0);
}

TEST_CASE("sessions can be copied mid-run") {
    auto p = make_protocol(default_config(ProtocolKind::P611));
    Session s(p, BitWord::from_string("110"));
    NullAdversary adv;
    s.step_chunk(adv);
    Session copy = s;
    while (!s.done()) s.step_chunk(adv);
    while (!copy.done()) copy.step_chunk(adv);
    CHECK(s.result().bob_output == copy.result().bob_output);
    CHECK(s.result().success);
}

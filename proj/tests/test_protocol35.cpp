#include "iecc/adversaries.hpp"
#include "iecc/errors.hpp"
#include "iecc/protocol35.hpp"

#include <doctest.h>

using namespace iecc;
using namespace iecc::p35;

namespace {

std::shared_ptr<const Protocol35> make35(std::uint64_t seed = 1) {
    SessionConfig c = default_config(ProtocolKind::P35);
    c.seed = seed;
    return std::dynamic_pointer_cast<const Protocol35>(make_protocol(c));
}

const ChunkLabel& first_label(const Protocol35& p, bool (*pred)(const ChunkLabel&)) {
    const auto& s = p.schedule();
    for (std::size_t k = 1; k < s.chunk_count; ++k)
        if (pred(s.label(k))) return s.label(k);
    FAIL("no such chunk");
    return s.label(0);
}

const ChunkLabel& inner(const Protocol35& p) {
    return first_label(p, [](const ChunkLabel& l) { return !l.block_start(); });
}
const ChunkLabel& block_only(const Protocol35& p) {
    return first_label(p, [](const ChunkLabel& l) { return l.block_start() && !l.megablock_start(); });
}
const ChunkLabel& megablock(const Protocol35& p) {
    return first_label(p, [](const ChunkLabel& l) { return l.megablock_start(); });
}

Fields stage1(const char* x, std::size_t cnt, bool cnfm, bool rec) {
    return {BitWord::from_string(x), cnt, cnfm, rec, -1, false};
}

ErasedWord confuse(const BitWord& a, const BitWord& b) {
    BitWord mask(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mask.set(i, a[i] != b[i]);
    return ErasedWord::deliver(a, mask);
}

/// First seed where every listed pair of field tuples can be confused below the decode threshold.
std::uint64_t confusable_seed(const std::vector<std::pair<Fields, Fields>>& pairs) {
    for (std::uint64_t seed = 1; seed < 200; ++seed) {
        auto p = make35(seed);
        bool ok = true;
        for (const auto& [a, b] : pairs) {
            const auto d = hamming(p->word(Message::of(a)), p->word(Message::of(b)));
            ok = ok && !erased_at_least(d, 4 * p->config().m, p->codebook().decode_erasure_threshold());
        }
        if (ok) return seed;
    }
    FAIL("no confusable seed");
    return 0;
}

} // namespace

TEST_CASE("message space") {
    auto p = make35();
    // 4 inputs x 5 counters x 4 flag pairs, plus 4 Stage-2 (x, cnt) pairs x 4 x 3.
    CHECK(p->tuples().size() == 128);
    CHECK(p->codebook().count() == 128);
    CHECK(verify_distance(p->codebook(), TripleMode::sampled(2000, 1)).certified);
    for (std::size_t k = 0; k < p->tuples().size(); ++k)
        CHECK(p->candidate(Message::of(p->tuples()[k])) == Candidate::codeword(k));
    CHECK(p->candidate(Message::beta(true)) == Candidate::extra(1));
    // Stage 2 needs x[cnt/2] = 1 (one-indexed).
    CHECK_THROWS_AS(p->candidate(Message::of({BitWord::from_string("01"), 2, true, false, 0, false})), UnknownWord);
    CHECK_THROWS_AS(p->candidate(Message::of({BitWord::from_string("10"), 2, true, false, 1, true})), UnknownWord);
}

TEST_CASE("Alice 3/5 stages") {
    auto p = make35();
    const auto x = BitWord::from_string("10");
    const auto& mid = inner(*p);

    SUBCASE("Stage 1 Case 2: a 1-bar with cnfm set advances the counter") {
        AliceState s;
        auto m = alice_advance(*p, x, s, true, mid);
        CHECK(s.rec);
        CHECK(s.cnt == 1);
        CHECK_FALSE(s.cnfm);
        CHECK(m.fields == Fields{x, 1, false, true, -1, false});
        // A second 1-bar in the same block changes nothing.
        alice_advance(*p, x, s, true, mid);
        CHECK(s.cnt == 1);
    }
    SUBCASE("after a 1-bar, a 0-bar confirms") {
        AliceState s{1, 1, false, true, -1, false, std::nullopt};
        alice_advance(*p, x, s, false, mid);
        CHECK(s.cnfm);
        CHECK(s.stage == 1);
    }
    SUBCASE("Stage 1 Case 4 at cnt 0: Stage 3 with beta 0") {
        AliceState s;
        auto m = alice_advance(*p, x, s, false, mid);
        CHECK(s.stage == 3);
        CHECK(*s.beta == false);
        CHECK(m.constant == false);
    }
    SUBCASE("odd counter answers 1") {
        AliceState s{1, 3, true, false, -1, false, std::nullopt};
        alice_advance(*p, x, s, false, mid);
        CHECK(*s.beta == true);
    }
    SUBCASE("even counter with a 0 bit answers 0") {
        AliceState s{1, 4, true, false, -1, false, std::nullopt};
        alice_advance(*p, x, s, false, mid);
        CHECK(s.stage == 3);
        CHECK(*s.beta == false);
    }
    SUBCASE("even counter with a 1 bit enters Stage 2 and freezes") {
        AliceState s{1, 2, true, false, -1, false, std::nullopt};
        auto m = alice_advance(*p, x, s, false, mid);
        CHECK(s.stage == 2);
        CHECK(s.knt == 0);
        CHECK(s.stg2);
        CHECK(m.fields == Fields{x, 2, true, false, 0, true});
        const AliceState frozen = s;
        alice_advance(*p, x, s, true, mid);
        alice_advance(*p, x, s, false, mid);
        CHECK(s == frozen);
    }
    SUBCASE("Stage 2 Case 4 with knt 1: beta 0") {
        AliceState s{2, 2, true, false, 1, false, std::nullopt};
        alice_advance(*p, x, s, false, mid);
        CHECK(s.stage == 3);
        CHECK(*s.beta == false);
    }
    SUBCASE("Stage 2 Case 4 with knt 0: beta 1") {
        AliceState s{2, 2, true, false, 0, false, std::nullopt};
        alice_advance(*p, x, s, false, mid);
        CHECK(*s.beta == true);
    }
    SUBCASE("block start clears rec and ignores the feedback") {
        AliceState s{1, 1, true, true, -1, false, std::nullopt};
        alice_advance(*p, x, s, false, block_only(*p));
        CHECK_FALSE(s.rec);
        CHECK(s.stage == 1);
        CHECK(s.cnt == 1);
    }
    SUBCASE("megablock start resets Stage 1 fully and Stage 2 partially") {
        AliceState s1{1, 3, false, true, -1, false, std::nullopt};
        alice_advance(*p, x, s1, true, megablock(*p));
        CHECK(s1 == AliceState{});
        AliceState s2{2, 2, false, true, 1, true, std::nullopt};
        alice_advance(*p, x, s2, true, megablock(*p));
        CHECK(s2 == AliceState{2, 2, true, false, 0, false, std::nullopt});
    }
    SUBCASE("Stage 3 sends its constant forever") {
        AliceState s{3, 0, true, false, -1, false, true};
        for (const auto* l : {&mid, &block_only(*p), &megablock(*p)}) {
            auto m = alice_advance(*p, x, s, false, *l);
            CHECK(m.constant == true);
        }
    }
    SUBCASE("erased feedback is a no-op") {
        AliceState s{1, 1, false, true, -1, false, std::nullopt};
        const AliceState before = s;
        alice_advance(*p, x, s, std::nullopt, mid);
        CHECK(s == before);
    }
}

TEST_CASE("Alice35 machine decodes any single symbol of Bob's word") {
    auto p = make35();
    Alice35 alice(*p, BitWord::from_string("11"));
    const auto& mid = inner(*p);
    auto first = alice.step(std::nullopt, p->schedule().label(0));
    CHECK(first == p->word(Message::of(stage1("11", 0, true, false))));
    BitWord mask(p->config().m, true);
    mask.set(5, false);
    alice.step(ErasedWord::deliver(BitWord(p->config().m, true), mask), mid);
    CHECK(alice.state().cnt == 1);
}

TEST_CASE("simulate_alice_step") {
    auto p = make35();
    const auto& mid = inner(*p);

    SUBCASE("constant words repeat") {
        for (bool b : {false, true})
            for (bool hears : {false, true})
                CHECK(simulate_alice_step(*p, p->candidate(Message::beta(b)), hears, true, mid) ==
                      p->candidate(Message::beta(b)));
    }
    SUBCASE("Stage 1 increment at a non-boundary chunk") {
        auto next = simulate_alice_step(*p, p->word(Message::of(stage1("01", 1, true, false))), true, true, mid);
        CHECK(p->message(next).fields == stage1("01", 2, false, true));
        // Oracle: the machine on the reconstructed state.
        AliceState s{1, 1, true, false, -1, false, std::nullopt};
        CHECK(p->candidate(alice_advance(*p, BitWord::from_string("01"), s, true, mid)) == next);
    }
    SUBCASE("Stage 2 entry") {
        // x[1] = 1 (one-indexed); cnt 2 unconfirmed and no 1-bar this block, so a 0-bar decides.
        auto next = simulate_alice_step(*p, p->word(Message::of(stage1("10", 2, false, false))), true, false, mid);
        const Fields f = p->message(next).fields;
        CHECK(f == Fields{BitWord::from_string("10"), 2, false, false, 0, true});
        AliceState s{1, 2, false, false, -1, false, std::nullopt};
        CHECK(p->candidate(alice_advance(*p, BitWord::from_string("10"), s, false, mid)) == next);
    }
    SUBCASE("hearing nothing keeps the message") {
        auto c = p->candidate(Message::of(stage1("10", 2, false, true)));
        CHECK(simulate_alice_step(*p, c, false, true, mid) == c);
    }
    SUBCASE("unknown words") {
        BitWord w = p->word(Message::beta(false));
        w.set(0, true);
        CHECK_THROWS_AS(simulate_alice_step(*p, w, true, true, mid), UnknownWord);
    }
}

TEST_CASE("Bob 3/5 initialization and Phase 1 cases") {
    const Fields a = stage1("00", 1, false, true);
    const Fields b = stage1("10", 1, false, true);
    const Fields a2 = stage1("00", 1, false, false);
    const Fields b2 = stage1("10", 2, false, true);
    const auto seed = confusable_seed({{a, b}, {a2, b2}});
    auto p = make35(seed);
    const std::size_t M = p->config().m;
    const auto& mid = inner(*p);

    SUBCASE("first 2-decode initializes both worlds, then Case 7 sends 0-bar") {
        Bob35 bob(*p);
        auto out = bob.step(confuse(p->word(Message::of(a)), p->word(Message::of(b))), mid);
        const auto& s = bob.state();
        REQUIRE(s.initialized);
        CHECK(s.xhat_w[0]->to_string() == "00");
        CHECK(s.xhat_w[1]->to_string() == "10");
        CHECK(*s.target_cnt == 2);
        CHECK(s.last_case == "7");
        CHECK(out == BitWord(M, false));
        CHECK_FALSE(s.xhat.has_value());
        // Each world grew by at most a factor of two.
        CHECK(s.S[0].size() <= 2);
        CHECK(s.S[1].size() <= 2);
        CHECK(bob.violations().empty());
    }
    SUBCASE("Case 5: counters differ, so 0-bar until the megablock ends") {
        BobState s;
        s.initialized = true;
        s.xhat_w = {BitWord::from_string("00"), BitWord::from_string("10")};
        s.S = {WorldSet{p->candidate(Message::of(a2))}, WorldSet{p->candidate(Message::of(b2))}};
        s.target_cnt = 2;
        Bob35 bob(*p, s);
        auto out = bob.step(confuse(p->word(Message::of(a2)), p->word(Message::of(b2))), mid);
        CHECK(bob.state().last_case == "5");
        CHECK(out == BitWord(M, false));
        REQUIRE(bob.state().forced);
        CHECK(bob.state().forced->until == Until::EndOfMegablock);
        // Still 0-bar at the next block start inside the megablock.
        CHECK(bob.step(ErasedWord::all_erased(4 * M), block_only(*p)) == BitWord(M, false));
        // Released at the megablock boundary.
        CHECK(bob.step(ErasedWord::all_erased(4 * M), megablock(*p)) == BitWord(M, true));
    }
    SUBCASE("a unique first decode fixes the output") {
        Bob35 bob(*p);
        auto out = bob.step(ErasedWord::clean(p->word(Message::of(b))), mid);
        CHECK(bob.state().xhat->to_string() == "10");
        CHECK(bob.unique_decode_seen());
        CHECK(out == BitWord(M, true));
        CHECK(bob.finalize().x.to_string() == "10");
    }
}

TEST_CASE("Bob 3/5 finalize") {
    auto p = make35();
    BobState s;
    s.xhat_w = {BitWord::from_string("01"), BitWord::from_string("11")};

    s.phase = 2;
    s.stage2_world = 1;
    s.last_received_bit = true;
    CHECK(Bob35(*p, s).finalize().x.to_string() == "11");
    s.last_received_bit = false;
    CHECK(Bob35(*p, s).finalize().x.to_string() == "01");

    s.phase = 3;
    s.stage2_world.reset();
    s.stage3_world = 0;
    s.beta1 = false;
    s.last_received_bit = true;
    CHECK(Bob35(*p, s).finalize().x.to_string() == "11");
    s.last_received_bit = false;
    CHECK(Bob35(*p, s).finalize().x.to_string() == "01");

    s.last_received_bit.reset();
    auto out = Bob35(*p, s).finalize();
    CHECK(out.fallback);
}

TEST_CASE("noiseless sessions succeed for every input") {
    auto p = make35();
    for (const auto& x : all_inputs(p->config().n)) {
        NullAdversary adv;
        auto r = run_session(p, x, adv);
        CHECK(r.success);
        CHECK(r.invariant_violations.empty());
    }
}

TEST_CASE("property: random and chunk-action noise never breaks the invariants") {
    auto p = make35();
    const auto inputs = all_inputs(p->config().n);
    const std::size_t chunks = p->schedule().chunk_count;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto& x = inputs[seed % inputs.size()];
        RandomAdversary random(Rational(static_cast<std::int64_t>(1 + seed % 3), 5), seed);
        auto r1 = run_session(p, x, random);
        CHECK(r1.invariant_violations.empty());

        ChunkActionAdversary chunky(random_actions(chunks, p->config().n, seed));
        auto r2 = run_session(p, x, chunky);
        CHECK(r2.invariant_violations.empty());
        if (r2.unique_decode) CHECK(r2.success);
    }
}

TEST_CASE("property: decoys that miss Bob's messages reach the later phases without breaking the invariants") {
    SessionConfig cfg = default_config(ProtocolKind::P35);
    cfg.epsilon = Rational(1, 4);
    auto p = make_protocol(cfg);
    const auto inputs = all_inputs(cfg.n);
    int furthest = 1;
    for (std::uint64_t seed = 0; seed < 24; ++seed) {
        const auto& x = inputs[seed % 4];
        const auto& decoy = inputs[(seed % 4 + 1 + (seed / 4) % 3) % 4];
        ChunkActionAdversary adv(std::vector<ChunkAction>(p->schedule().chunk_count, ChunkAction::confuse(decoy)));
        adv.set_decoy_deafness(Rational(1, 4), seed);
        Session s(p, x);
        while (!s.done()) {
            s.step_chunk(adv);
            furthest = std::max(furthest, dynamic_cast<const Bob35&>(s.bob()).state().phase);
        }
        auto r = s.result();
        CHECK(r.invariant_violations.empty());
        if (r.unique_decode) CHECK(r.success);
    }
    CHECK(furthest >= 2);
}

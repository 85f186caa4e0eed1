#include "iecc/protocol35.hpp"

#include "iecc/errors.hpp"

#include <algorithm>

namespace iecc::p35 {

namespace {

nlohmann::json opt_word(const std::optional<BitWord>& w) {
    return w ? nlohmann::json(w->to_string()) : nlohmann::json(nullptr);
}

template <class T> nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

bool contains(const WorldSet& s, const Candidate& c) { return std::binary_search(s.begin(), s.end(), c); }

std::string until_name(Until u) {
    switch (u) {
    case Until::EndOfBlock: return "block";
    case Until::EndOfMegablock: return "megablock";
    case Until::Forever: return "forever";
    }
    return "?";
}

} // namespace

std::string to_string(const Fields& f) {
    return "(x=" + f.x.to_string() + ",cnt=" + std::to_string(f.cnt) + ",cnfm=" + (f.cnfm ? "T" : "F") +
           ",rec=" + (f.rec ? "T" : "F") + ",knt=" + std::to_string(f.knt) + ",stg2=" + (f.stg2 ? "T" : "F") + ")";
}

// ---------------------------------------------------------------------------

Protocol35::Protocol35(const SessionConfig& cfg) : Protocol(cfg, make_schedule(cfg)) {
    const std::size_t n = cfg.n;
    const auto inputs = all_inputs(n);
    for (const auto& x : inputs)
        for (std::size_t cnt = 0; cnt <= 2 * n; ++cnt)
            for (bool cnfm : {false, true})
                for (bool rec : {false, true}) tuples_.push_back({x, cnt, cnfm, rec, -1, false});
    for (const auto& x : inputs)
        for (std::size_t cnt = 2; cnt <= 2 * n; cnt += 2) {
            if (!x[cnt / 2 - 1]) continue;
            for (bool cnfm : {false, true})
                for (bool rec : {false, true})
                    for (auto [knt, stg2] : {std::pair{0, false}, std::pair{1, false}, std::pair{0, true}})
                        tuples_.push_back({x, cnt, cnfm, rec, knt, stg2});
        }
    for (std::size_t k = 0; k < tuples_.size(); ++k) index_.emplace(key(tuples_[k]), k);

    const std::size_t len = 4 * cfg.m;
    extras_ = {BitWord(len, false), BitWord(len, true)};
    codebook_ = build_codebook(tuples_.size(), len, cfg.code_epsilon, extras_, cfg.seed);
}

Candidate Protocol35::candidate(const Message& m) const {
    if (m.constant) return Candidate::extra(*m.constant ? 1 : 0);
    auto it = index_.find(key(m.fields));
    if (it == index_.end()) throw UnknownWord("fields " + to_string(m.fields) + " are outside the message space");
    return Candidate::codeword(it->second);
}

Message Protocol35::message(const Candidate& c) const {
    if (!c.is_codeword()) {
        if (c.index > 1) throw UnknownWord("no extra word " + std::to_string(c.index));
        return Message::beta(c.index == 1);
    }
    if (c.index >= tuples_.size()) throw UnknownWord("no codeword " + std::to_string(c.index));
    return Message::of(tuples_[c.index]);
}

const BitWord& Protocol35::word(const Candidate& c) const {
    if (c.is_codeword()) return iecc::encode(codebook_, c.index);
    if (c.index > 1) throw UnknownWord("no extra word " + std::to_string(c.index));
    return extras_[c.index];
}

std::unique_ptr<AliceMachine> Protocol35::make_alice(const BitWord& x) const {
    return std::make_unique<Alice35>(*this, x);
}

std::unique_ptr<BobMachine> Protocol35::make_bob() const { return std::make_unique<Bob35>(*this); }

std::vector<Candidate> Protocol35::decode_alice(const ErasedWord& received) const {
    return erasure_list_decode(codebook_, received, extras_);
}

std::optional<Candidate> Protocol35::alice_candidate(const BitWord& w) const {
    for (std::size_t k = 0; k < extras_.size(); ++k)
        if (w == extras_[k]) return Candidate::extra(k);
    const auto& words = codebook_.words();
    for (std::size_t i = 0; i < words.size(); ++i)
        if (words[i] == w) return Candidate::codeword(i);
    return std::nullopt;
}

std::vector<std::string> Protocol35::check_alice_sent(const BobMachine& bob, const BitWord& x,
                                                      const BitWord& w) const {
    auto cand = alice_candidate(w);
    if (!cand) return {"alice_word_outside_message_space"};
    const auto* b35 = dynamic_cast<const Bob35*>(&bob);
    if (!b35) return {};
    const auto& st = b35->state();
    if (!st.initialized || st.xhat) return {};
    for (int b = 0; b < 2; ++b)
        if (st.xhat_w[b] == x) return contains(st.S[b], *cand) ? std::vector<std::string>{}
                                                                : std::vector<std::string>{"true_world_containment"};
    return {"true_input_not_tracked"};
}

// ---------------------------------------------------------------------------

Message alice_advance(const Protocol35& protocol, const BitWord& x, AliceState& s, std::optional<bool> heard,
                      const ChunkLabel& pos, std::vector<std::string>* flags) {
    auto note = [&](const char* f) {
        if (flags) flags->push_back(f);
    };
    auto current = [&] {
        if (s.stage == 3) return Message::beta(*s.beta);
        return Message::of({x, s.cnt, s.cnfm, s.rec, s.knt, s.stg2});
    };
    const std::size_t n = protocol.config().n;

    if (pos.chunk == 0 || s.stage == 3) return current();
    if (pos.megablock_start()) {
        if (s.stage == 1) {
            s = AliceState{};
        } else {
            s.cnfm = true;
            s.rec = false;
            s.knt = 0;
            s.stg2 = false;
        }
        return current();
    }
    if (pos.block_start()) {
        s.rec = false;
        return current();
    }
    if (s.stage == 2 && s.stg2) return current();
    if (!heard) return current();

    if (*heard) {
        s.rec = true;
        if (s.cnfm) {
            if (s.stage == 1) {
                if (s.cnt < 2 * n)
                    ++s.cnt;
                else
                    note("alice_cnt_clamped");
            } else {
                if (s.knt < 1)
                    ++s.knt;
                else
                    note("alice_knt_clamped");
            }
            s.cnfm = false;
        }
        return current();
    }
    if (s.rec) {
        s.cnfm = true;
        return current();
    }
    if (s.stage == 1) {
        if (s.cnt % 2 == 1) {
            s.stage = 3;
            s.beta = true;
        } else if (s.cnt == 0 || !x[s.cnt / 2 - 1]) {
            s.stage = 3;
            s.beta = false;
        } else {
            s.stage = 2;
            s.knt = 0;
            s.stg2 = true;
        }
    } else {
        s.stage = 3;
        s.beta = s.knt == 0;
    }
    return current();
}

Candidate simulate_alice_step(const Protocol35& protocol, const Candidate& message, bool hears, bool bob_one,
                              const ChunkLabel& position) {
    Message m = protocol.message(message);
    if (m.constant) return message;
    const Fields& f = m.fields;
    AliceState s{f.knt < 0 ? 1 : 2, f.cnt, f.cnfm, f.rec, f.knt, f.stg2, std::nullopt};
    return protocol.candidate(
        alice_advance(protocol, f.x, s, hears ? std::optional<bool>(bob_one) : std::nullopt, position));
}

Candidate simulate_alice_step(const Protocol35& protocol, const BitWord& message, bool hears, bool bob_one,
                              const ChunkLabel& position) {
    auto c = protocol.alice_candidate(message);
    if (!c) throw UnknownWord("word is not one of Alice's messages");
    return simulate_alice_step(protocol, *c, hears, bob_one, position);
}

// ---------------------------------------------------------------------------

Alice35::Alice35(const Protocol35& protocol, BitWord x, AliceState state)
    : protocol_(&protocol), x_(std::move(x)), state_(state) {}

BitWord Alice35::step(const std::optional<ErasedWord>& from_bob, const ChunkLabel& label) {
    std::optional<bool> heard;
    if (from_bob)
        for (std::size_t k = 0; k < from_bob->size() && !heard; ++k) heard = from_bob->symbol(k);
    return protocol_->word(alice_advance(*protocol_, x_, state_, heard, label, &flags_));
}

nlohmann::json Alice35::snapshot() const {
    return {{"stage", state_.stage}, {"cnt", state_.cnt},   {"cnfm", state_.cnfm},     {"rec", state_.rec},
            {"knt", state_.knt},     {"stg2", state_.stg2}, {"beta", opt(state_.beta)}};
}

// ---------------------------------------------------------------------------

Bob35::Bob35(const Protocol35& protocol, BobState state) : protocol_(&protocol), state_(std::move(state)) {}

BitWord Bob35::step(const ErasedWord& m, const ChunkLabel& label) {
    const std::size_t M = protocol_->config().m;
    last_decode_.reset();

    if (!state_.xhat) {
        if (label.megablock_start()) {
            if (state_.pending) {
                const auto p = *state_.pending;
                state_.pending.reset();
                state_.phase = p.phase;
                state_.last_received_bit.reset();
                if (p.phase == 2) {
                    state_.stage2_world = p.world;
                    state_.forced = ForcedSend{false, Until::Forever, "phase2"};
                } else {
                    state_.stage3_world = p.world;
                    state_.beta1 = p.beta1;
                    state_.j = p.j;
                    if (p.j == 0) state_.forced = ForcedSend{false, Until::Forever, "phase3_j0"};
                }
            }
            if (state_.forced && state_.forced->until != Until::Forever) state_.forced.reset();
        } else if (label.block_start() && state_.forced && state_.forced->until == Until::EndOfBlock) {
            state_.forced.reset();
        }
    }
    if (auto bit = m.last_symbol()) state_.last_received_bit = *bit;

    bool one = true;
    if (state_.xhat) {
        state_.last_case = "fixed";
    } else {
        one = choose(m, label);
        if (state_.xhat)
            one = true;
        else if (state_.initialized)
            expand(one, label);
    }
    state_.last_sent_one = one;
    return BitWord(M, one);
}

bool Bob35::idle_reply(const ChunkLabel& label) const {
    if (state_.forced) return state_.forced->one;
    if (label.block_start()) return true;
    return state_.last_sent_one;
}

void Bob35::force(bool one, Until until, std::string source, bool override_active) {
    if (state_.forced && !override_active) return;
    state_.forced = ForcedSend{one, until, std::move(source)};
}

bool Bob35::choose(const ErasedWord& m, const ChunkLabel& label) {
    const Rational threshold = protocol_->codebook().decode_erasure_threshold();
    std::optional<std::array<Candidate, 2>> pair;

    if (!erased_at_least(m.erasure_count(), m.size(), threshold)) {
        auto list = protocol_->decode_alice(m);
        last_decode_ = list;
        if (list.empty() || list.size() > 2) {
            violations_.push_back("decoded_list_size_" + std::to_string(list.size()));
        } else if (!state_.initialized) {
            if (initialize(list, label)) pair = std::array<Candidate, 2>{state_.S[0][0], state_.S[1][0]};
            if (state_.xhat) return true;
        } else {
            std::array<bool, 2> hit{};
            for (int b = 0; b < 2; ++b)
                hit[b] = std::any_of(list.begin(), list.end(), [&](const Candidate& c) { return contains(state_.S[b], c); });
            if (!hit[0] && !hit[1]) {
                violations_.push_back("no_world_consistent");
            } else if (!hit[0] || !hit[1]) {
                const int b = hit[0] ? 1 : 0;
                state_.last_case = "2";
                if (list.size() == 1) state_.unique_decode = true;
                fix(*state_.xhat_w[1 - b]);
                return true;
            } else if (list.size() == 1) {
                violations_.push_back("single_candidate_in_both_worlds");
            } else {
                const Candidate& a = list[0];
                const Candidate& c = list[1];
                if (contains(state_.S[0], a) && contains(state_.S[1], c)) {
                    pair = std::array<Candidate, 2>{a, c};
                } else if (contains(state_.S[0], c) && contains(state_.S[1], a)) {
                    pair = std::array<Candidate, 2>{c, a};
                } else {
                    violations_.push_back("pair_assignment_ambiguous");
                }
                if (pair) {
                    state_.S[0] = {(*pair)[0]};
                    state_.S[1] = {(*pair)[1]};
                    check_world_sets();
                }
            }
        }
    }

    if (!state_.initialized) {
        state_.last_case = "1";
        return idle_reply(label);
    }
    switch (state_.phase) {
    case 1: return phase1(pair, label);
    case 2: state_.last_case = "phase2"; return false;
    default: return phase3(pair, label);
    }
}

bool Bob35::initialize(const std::vector<Candidate>& list, const ChunkLabel&) {
    std::vector<Candidate> valid;
    for (const auto& c : list) {
        if (!c.is_codeword()) continue;
        const Fields& f = protocol_->tuples()[c.index];
        const bool fresh = f.cnt == 0 && f.cnfm && !f.rec;
        const bool confirmed_valid = !f.cnfm && !(f.cnt == 0 && f.rec);
        if (f.knt == -1 && !f.stg2 && (confirmed_valid || fresh)) valid.push_back(c);
    }
    if (valid.empty()) {
        flags_.push_back("non_initializing_decode");
        return false;
    }
    const BitWord& x0 = protocol_->tuples()[valid[0].index].x;
    if (valid.size() == 1 || protocol_->tuples()[valid[1].index].x == x0) {
        state_.last_case = "init_unique";
        if (list.size() == 1) state_.unique_decode = true;
        fix(x0);
        return false;
    }
    const BitWord& x1 = protocol_->tuples()[valid[1].index].x;
    state_.initialized = true;
    state_.xhat_w = {x0, x1};
    state_.S = {WorldSet{valid[0]}, WorldSet{valid[1]}};
    std::size_t i = 0;
    while (x0[i] == x1[i]) ++i;
    state_.target_cnt = 2 * (i + 1);
    check_world_sets();
    return true;
}

bool Bob35::phase1(const std::optional<std::array<Candidate, 2>>& pair, const ChunkLabel& label) {
    if (!pair) {
        state_.last_case = "1";
        return idle_reply(label);
    }
    const std::array<Message, 2> w = {protocol_->message((*pair)[0]), protocol_->message((*pair)[1])};

    if (w[0].advanced() || w[1].advanced()) {
        state_.last_case = "4";
        PendingTransition p;
        if (w[0].constant || w[1].constant) {
            const int b = w[0].constant ? 0 : 1;
            const Message& other = w[1 - b];
            if (other.constant) violations_.push_back("both_worlds_constant");
            p.phase = 3;
            p.world = b;
            p.beta1 = *w[b].constant;
            const int knt_other = other.constant ? 0 : other.fields.knt;
            p.j = knt_other == -1 ? (p.beta1 ? 0 : 1) : (p.beta1 ? 1 : 0);
        } else {
            if (w[0].fields.knt >= 0 && w[1].fields.knt >= 0) violations_.push_back("both_worlds_stage2");
            p.phase = 2;
            p.world = w[0].fields.knt >= 0 ? 0 : 1;
        }
        state_.pending = p;
        force(true, Until::EndOfMegablock, "case4", true);
        return true;
    }

    const Fields& f0 = w[0].fields;
    const Fields& f1 = w[1].fields;
    bool one;
    if ((f0.cnt == f1.cnt && f0.cnt == *state_.target_cnt) || f0.cnt != f1.cnt) {
        state_.last_case = "5";
        force(false, Until::EndOfMegablock, "case5", false);
        one = false;
    } else if (!f0.rec && !f1.rec) {
        state_.last_case = "6";
        one = true;
    } else {
        state_.last_case = "7";
        one = false;
    }
    if (state_.forced) return state_.forced->one;
    if (label.megablock_start()) return true;
    return one;
}

bool Bob35::phase3(const std::optional<std::array<Candidate, 2>>& pair, const ChunkLabel& label) {
    if (*state_.j == 0) {
        state_.last_case = "phase3_j0";
        return false;
    }
    if (!pair) {
        state_.last_case = "p3_1";
        return idle_reply(label);
    }
    const int o = 1 - *state_.stage3_world;
    const Message mo = protocol_->message((*pair)[o]);
    if (mo.constant) {
        violations_.push_back("phase3_other_world_constant");
        return idle_reply(label);
    }
    const std::size_t counter0 = mo.fields.knt == -1 ? mo.fields.cnt : static_cast<std::size_t>(mo.fields.knt);
    if (counter0 == 0) {
        state_.last_case = "p3_4";
        return state_.forced ? state_.forced->one : true;
    }
    state_.last_case = "p3_5";
    force(false, Until::EndOfMegablock, "p3_case5", false);
    return state_.forced->one;
}

void Bob35::expand(bool sent_one, const ChunkLabel& label) {
    const auto& sched = protocol_->schedule();
    if (label.chunk + 1 >= sched.chunk_count) return;
    const ChunkLabel& next = sched.label(label.chunk + 1);
    for (auto& S : state_.S) {
        WorldSet grown;
        try {
            for (const auto& m : S)
                for (bool hears : {true, false}) grown.push_back(simulate_alice_step(*protocol_, m, hears, sent_one, next));
        } catch (const UnknownWord&) {
            violations_.push_back("simulation_left_message_space");
        }
        std::sort(grown.begin(), grown.end());
        grown.erase(std::unique(grown.begin(), grown.end()), grown.end());
        S = std::move(grown);
    }
    check_world_sets();
}

void Bob35::check_world_sets() {
    const auto& S0 = state_.S[0];
    const auto& S1 = state_.S[1];
    if (std::any_of(S0.begin(), S0.end(), [&](const Candidate& c) { return contains(S1, c); }))
        violations_.push_back("world_sets_overlap");
    auto stage2 = [&](const WorldSet& s) {
        return std::any_of(s.begin(), s.end(), [&](const Candidate& c) {
            return c.is_codeword() && protocol_->tuples()[c.index].knt >= 0;
        });
    };
    if (stage2(S0) && stage2(S1)) violations_.push_back("world_sets_both_stage2");
}

FinalOutput Bob35::finalize() const {
    if (state_.xhat) return {*state_.xhat, false};
    if (state_.last_received_bit) {
        const bool d = *state_.last_received_bit;
        if (state_.phase == 2) {
            const int w = *state_.stage2_world;
            return {*state_.xhat_w[d ? w : 1 - w], false};
        }
        if (state_.phase == 3) {
            const int w = *state_.stage3_world;
            return {*state_.xhat_w[d == *state_.beta1 ? w : 1 - w], false};
        }
    }
    if (state_.xhat_w[0]) return {*state_.xhat_w[0], true};
    return {BitWord(protocol_->config().n), true};
}

nlohmann::json Bob35::snapshot() const {
    nlohmann::json forced = nullptr;
    if (state_.forced)
        forced = std::string(state_.forced->one ? "1bar" : "0bar") + ":" + until_name(state_.forced->until);
    nlohmann::json pending = nullptr;
    if (state_.pending) pending = state_.pending->phase;
    return {{"phase", state_.phase},
            {"S0_size", state_.S[0].size()},
            {"S1_size", state_.S[1].size()},
            {"forced", forced},
            {"pending", pending},
            {"xhat", opt_word(state_.xhat)},
            {"xhat0", opt_word(state_.xhat_w[0])},
            {"xhat1", opt_word(state_.xhat_w[1])},
            {"stage2_world", opt(state_.stage2_world)},
            {"stage3_world", opt(state_.stage3_world)},
            {"beta1", opt(state_.beta1)},
            {"j", opt(state_.j)},
            {"target", opt(state_.target_cnt)},
            {"case", state_.last_case}};
}

} // namespace iecc::p35

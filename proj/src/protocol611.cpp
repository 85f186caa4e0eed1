#include "iecc/protocol611.hpp"

#include "iecc/errors.hpp"

namespace iecc::p611 {

namespace {

constexpr std::array<const char*, 4> kPatterns = {"000", "011", "101", "110"};

std::string word_name(BobWord w) { return std::to_string(static_cast<int>(w)) + "bar"; }

nlohmann::json opt_json(const std::optional<BitWord>& w) {
    return w ? nlohmann::json(w->to_string()) : nlohmann::json(nullptr);
}

} // namespace

BitWord bob_word(BobWord w, std::size_t m) { return BitWord::repeat(kPatterns[static_cast<int>(w)], m / 8); }

std::optional<BobWord> unique_bob_word(const ErasedWord& received, std::size_t m) {
    std::optional<BobWord> found;
    for (int k = 0; k < 4; ++k) {
        auto w = static_cast<BobWord>(k);
        if (consistent(bob_word(w, m), received)) {
            if (found) return std::nullopt;
            found = w;
        }
    }
    return found;
}

// ---------------------------------------------------------------------------

Protocol611::Protocol611(const SessionConfig& cfg) : Protocol(cfg, make_schedule(cfg)) {
    const std::size_t count = (std::size_t{1} << cfg.n) * (cfg.n + 1);
    extras_ = {BitWord(cfg.m, false), BitWord(cfg.m, true)};
    codebook_ = build_codebook(count, cfg.m, cfg.code_epsilon, extras_, cfg.seed);
}

std::size_t Protocol611::index(const BitWord& x, std::size_t cnt) const {
    const std::size_t n = config().n;
    if (x.size() != n) throw LengthMismatch("input length differs from n");
    if (cnt > n) throw IndexOutOfRange("cnt " + std::to_string(cnt) + " above n");
    return static_cast<std::size_t>(x.to_uint()) * (n + 1) + cnt;
}

MessageFields Protocol611::fields(std::size_t index) const {
    const std::size_t n = config().n;
    if (index >= codebook_.count()) throw IndexOutOfRange("no 6/11 message with index " + std::to_string(index));
    return {BitWord::from_uint(index / (n + 1), n), index % (n + 1)};
}

const BitWord& Protocol611::encode(const BitWord& x, std::size_t cnt) const {
    return iecc::encode(codebook_, index(x, cnt));
}

std::unique_ptr<AliceMachine> Protocol611::make_alice(const BitWord& x) const {
    return std::make_unique<Alice611>(*this, x);
}

std::unique_ptr<BobMachine> Protocol611::make_bob() const { return std::make_unique<Bob611>(*this); }

std::vector<Candidate> Protocol611::decode_alice(const ErasedWord& received) const {
    return erasure_list_decode(codebook_, received, extras_);
}

std::optional<Candidate> Protocol611::alice_candidate(const BitWord& word) const {
    for (std::size_t k = 0; k < extras_.size(); ++k)
        if (word == extras_[k]) return Candidate::extra(k);
    const auto& words = codebook_.words();
    for (std::size_t i = 0; i < words.size(); ++i)
        if (words[i] == word) return Candidate::codeword(i);
    return std::nullopt;
}

std::vector<std::string> Protocol611::check_alice_sent(const BobMachine&, const BitWord&, const BitWord& word) const {
    if (!alice_candidate(word)) return {"alice_word_outside_message_space"};
    return {};
}

// ---------------------------------------------------------------------------

Alice611::Alice611(const Protocol611& protocol, BitWord x) : protocol_(&protocol), x_(std::move(x)) {
    state_.last_sent = protocol_->encode(x_, 0);
}

Alice611::Alice611(const Protocol611& protocol, BitWord x, AliceState state)
    : protocol_(&protocol), x_(std::move(x)), state_(std::move(state)) {
    if (state_.last_sent.empty()) state_.last_sent = protocol_->encode(x_, state_.cnt);
}

BitWord Alice611::step(const std::optional<ErasedWord>& from_bob, const ChunkLabel&) {
    if (from_bob) state_.last_sent = respond(*from_bob);
    return state_.last_sent;
}

BitWord Alice611::respond(const ErasedWord& m) {
    const std::size_t M = protocol_->config().m;
    const std::size_t n = protocol_->config().n;
    if (state_.terminal) return state_.last_sent;

    // Case 1.
    if (erased_at_least(m.erasure_count(), m.size(), Rational(2, 3))) return state_.last_sent;

    auto s = unique_bob_word(m, M);
    if (!s) {
        flags_.push_back("alice_ambiguous_bob_word");
        return state_.last_sent;
    }
    switch (*s) {
    case BobWord::Zero:
    case BobWord::One:
        if (*s != state_.mes) {
            if (state_.cnt < n) {
                ++state_.cnt;
            } else {
                flags_.push_back("alice_cnt_clamped");
            }
            state_.mes = *s;
            return protocol_->encode(x_, state_.cnt);
        }
        return state_.last_sent;
    case BobWord::Two: {
        std::size_t at = state_.cnt;
        if (at >= n) {
            flags_.push_back("alice_value_index_clamped");
            at = n - 1;
        }
        state_.terminal = x_[at];
        break;
    }
    case BobWord::Three: state_.terminal = state_.cnt % 2 == 1; break;
    }
    return BitWord(M, *state_.terminal);
}

nlohmann::json Alice611::snapshot() const {
    return {{"cnt", state_.cnt},
            {"mes", word_name(state_.mes)},
            {"terminal", state_.terminal ? nlohmann::json(*state_.terminal ? 1 : 0) : nlohmann::json(nullptr)}};
}

// ---------------------------------------------------------------------------

Bob611::Bob611(const Protocol611& protocol) : protocol_(&protocol) {}
Bob611::Bob611(const Protocol611& protocol, BobState state) : protocol_(&protocol), state_(std::move(state)) {}

BitWord Bob611::step(const ErasedWord& m, const ChunkLabel&) {
    const std::size_t M = protocol_->config().m;
    if (auto bit = m.last_symbol()) state_.last_received_bit = *bit;
    last_decode_.reset();

    if (state_.xhat) {
        state_.last_case = "fixed";
        return bob_word(BobWord::One, M);
    }
    if (state_.phase == 2) {
        state_.last_case = "phase2";
        return bob_word(static_cast<BobWord>(*state_.ques), M);
    }
    phase1(m);
    if (state_.xhat) return bob_word(BobWord::One, M);
    if (state_.phase == 2) return bob_word(static_cast<BobWord>(*state_.ques), M);
    return bob_word(state_.mes, M);
}

void Bob611::phase1(const ErasedWord& m) {
    const Rational threshold = protocol_->codebook().decode_erasure_threshold();
    if (erased_at_least(m.erasure_count(), m.size(), threshold)) {
        state_.last_case = "1";
        return;
    }
    auto list = protocol_->decode_alice(m);
    last_decode_ = list;

    std::vector<MessageFields> ecc;
    for (const auto& c : list)
        if (c.is_codeword()) ecc.push_back(protocol_->fields(c.index));

    if (list.empty() || list.size() > 2) {
        violations_.push_back("decoded_list_size_" + std::to_string(list.size()));
        state_.last_case = "1";
        return;
    }
    if (ecc.size() == 0) {
        violations_.push_back("no_codeword_candidate_in_phase1");
        state_.last_case = "1";
        return;
    }
    if (ecc.size() == 1) {
        state_.last_case = "2";
        state_.unique_decode = true;
        fix(ecc[0].x);
        return;
    }

    auto& a = ecc[0];
    auto& b = ecc[1];
    if (!state_.xhat0) {
        state_.last_case = "3";
        if (a.cnt != 0 || b.cnt != 0) {
            if (a.cnt == 0 && b.cnt != 0) {
                fix(a.x);
            } else if (b.cnt == 0 && a.cnt != 0) {
                fix(b.x);
            } else {
                violations_.push_back("first_pair_without_zero_counter");
            }
            return;
        }
        state_.xhat0 = a.x;
        state_.xhat1 = b.x;
        std::size_t i = 0;
        while (i < a.x.size() && a.x[i] == b.x[i]) ++i;
        state_.i = i;
        if (i == state_.last) {
            state_.phase = 2;
            state_.ques = 2;
        } else {
            state_.mes = BobWord::One;
        }
        return;
    }

    state_.last_case = "4";
    const auto& h0 = *state_.xhat0;
    const auto& h1 = *state_.xhat1;
    const int straight = (a.x == h0) + (b.x == h1);
    const int swapped = (b.x == h0) + (a.x == h1);
    if (swapped > straight) std::swap(a, b);
    const std::array<const MessageFields*, 2> w = {&a, &b};
    const std::array<const BitWord*, 2> h = {&h0, &h1};
    for (int k = 0; k < 2; ++k) {
        const auto& f = *w[k];
        if (!(f.x == *h[k]) || (f.cnt != state_.last && f.cnt != state_.last + 1)) {
            fix(w[1 - k]->x);
            return;
        }
    }
    if (a.cnt == b.cnt && a.cnt == state_.last) return;
    if (a.cnt == b.cnt) {
        state_.last = a.cnt;
        if (state_.last == *state_.i) {
            state_.phase = 2;
            state_.ques = 2;
        } else {
            state_.mes = state_.mes == BobWord::Zero ? BobWord::One : BobWord::Zero;
        }
        return;
    }
    state_.phase = 2;
    state_.ques = 3;
    state_.par = b.cnt % 2 == 1;
}

FinalOutput Bob611::finalize() const {
    if (state_.xhat) return {*state_.xhat, false};
    if (state_.phase == 2 && state_.last_received_bit) {
        const bool d = *state_.last_received_bit;
        if (*state_.ques == 2) return {(*state_.xhat0)[*state_.i] == d ? *state_.xhat0 : *state_.xhat1, false};
        return {d == *state_.par ? *state_.xhat1 : *state_.xhat0, false};
    }
    if (state_.xhat0) return {*state_.xhat0, true};
    return {BitWord(protocol_->config().n), true};
}

nlohmann::json Bob611::snapshot() const {
    return {{"phase", state_.phase},
            {"mes", word_name(state_.mes)},
            {"last", state_.last},
            {"ques", state_.ques ? nlohmann::json(*state_.ques) : nlohmann::json(nullptr)},
            {"par", state_.par ? nlohmann::json(*state_.par ? 1 : 0) : nlohmann::json(nullptr)},
            {"i", state_.i ? nlohmann::json(*state_.i) : nlohmann::json(nullptr)},
            {"xhat", opt_json(state_.xhat)},
            {"xhat0", opt_json(state_.xhat0)},
            {"xhat1", opt_json(state_.xhat1)},
            {"case", state_.last_case}};
}

} // namespace iecc::p611

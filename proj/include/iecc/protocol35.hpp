#pragma once

#include "iecc/channel.hpp"

#include <array>
#include <map>
#include <tuple>

namespace iecc::p35 {

/// Field tuple carried by one of Alice's codewords.
struct Fields {
    BitWord x;
    std::size_t cnt = 0;
    bool cnfm = true;
    bool rec = false;
    int knt = -1;
    bool stg2 = false;

    friend bool operator==(const Fields&, const Fields&) = default;
};

std::string to_string(const Fields& f);

/// One of Alice's messages: a codeword with fields, or the constant beta^{4M}.
struct Message {
    std::optional<bool> constant;
    Fields fields;

    static Message of(Fields f) { return {std::nullopt, std::move(f)}; }
    static Message beta(bool b) { return {b, {}}; }
    bool advanced() const { return constant.has_value() || fields.knt >= 0; }
};

struct AliceState {
    int stage = 1;
    std::size_t cnt = 0;
    bool cnfm = true;
    bool rec = false;
    int knt = -1;
    bool stg2 = false;
    std::optional<bool> beta;

    friend bool operator==(const AliceState&, const AliceState&) = default;
};

class Protocol35;

/// Alice's step as a pure function of her state. `heard` is the value of Bob's
/// last message (true for 1-bar) or nullopt when it arrived fully erased.
Message alice_advance(const Protocol35& protocol, const BitWord& x, AliceState& state, std::optional<bool> heard,
                      const ChunkLabel& position, std::vector<std::string>* flags = nullptr);

/// Next message Alice sends given she last sent `message` and then heard (or
/// missed) Bob's word `bob_one`. Throws UnknownWord.
Candidate simulate_alice_step(const Protocol35& protocol, const Candidate& message, bool hears, bool bob_one,
                              const ChunkLabel& position);
Candidate simulate_alice_step(const Protocol35& protocol, const BitWord& message, bool hears, bool bob_one,
                              const ChunkLabel& position);

class Alice35 final : public AliceMachine {
public:
    Alice35(const Protocol35& protocol, BitWord x, AliceState state = {});

    BitWord step(const std::optional<ErasedWord>& from_bob, const ChunkLabel& label) override;
    nlohmann::json snapshot() const override;
    const std::vector<std::string>& flags() const override { return flags_; }
    std::unique_ptr<AliceMachine> clone() const override { return std::make_unique<Alice35>(*this); }

    const AliceState& state() const { return state_; }

private:
    const Protocol35* protocol_;
    BitWord x_;
    AliceState state_;
    std::vector<std::string> flags_;
};

enum class Until { EndOfBlock, EndOfMegablock, Forever };

struct ForcedSend {
    bool one = false;
    Until until = Until::EndOfMegablock;
    std::string source;
};

struct PendingTransition {
    int phase = 2;
    /// Phase 2: the world whose Alice is in Stage 2. Phase 3: the world whose Alice sends beta1.
    int world = 0;
    bool beta1 = false;
    int j = 0;
};

using WorldSet = std::vector<Candidate>;

struct BobState {
    int phase = 1;
    std::optional<BitWord> xhat;
    bool initialized = false;
    std::array<std::optional<BitWord>, 2> xhat_w;
    std::array<WorldSet, 2> S;
    std::optional<int> stage2_world;
    std::optional<int> stage3_world;
    std::optional<bool> beta1;
    std::optional<int> j;
    std::optional<PendingTransition> pending;
    std::optional<ForcedSend> forced;
    bool last_sent_one = true;
    std::optional<bool> last_received_bit;
    std::optional<std::size_t> target_cnt;
    bool unique_decode = false;
    std::string last_case;
};

class Bob35 final : public BobMachine {
public:
    explicit Bob35(const Protocol35& protocol, BobState state = {});

    BitWord step(const ErasedWord& from_alice, const ChunkLabel& label) override;
    FinalOutput finalize() const override;
    nlohmann::json snapshot() const override;
    const std::optional<std::vector<Candidate>>& last_decode() const override { return last_decode_; }
    bool unique_decode_seen() const override { return state_.unique_decode; }
    const std::optional<BitWord>& committed() const override { return state_.xhat; }
    const std::vector<std::string>& violations() const override { return violations_; }
    const std::vector<std::string>& flags() const override { return flags_; }
    std::unique_ptr<BobMachine> clone() const override { return std::make_unique<Bob35>(*this); }

    const BobState& state() const { return state_; }

private:
    bool choose(const ErasedWord& m, const ChunkLabel& label);
    bool initialize(const std::vector<Candidate>& list, const ChunkLabel& label);
    bool phase1(const std::optional<std::array<Candidate, 2>>& pair, const ChunkLabel& label);
    bool phase3(const std::optional<std::array<Candidate, 2>>& pair, const ChunkLabel& label);
    bool idle_reply(const ChunkLabel& label) const;
    void force(bool one, Until until, std::string source, bool override_active);
    void expand(bool sent_one, const ChunkLabel& label);
    void check_world_sets();
    void fix(const BitWord& x) {
        if (!state_.xhat) state_.xhat = x;
    }

    const Protocol35* protocol_;
    BobState state_;
    std::optional<std::vector<Candidate>> last_decode_;
    std::vector<std::string> violations_;
    std::vector<std::string> flags_;
};

class Protocol35 final : public Protocol {
public:
    explicit Protocol35(const SessionConfig& cfg);

    std::unique_ptr<AliceMachine> make_alice(const BitWord& x) const override;
    std::unique_ptr<BobMachine> make_bob() const override;
    std::vector<Candidate> decode_alice(const ErasedWord& received) const override;
    std::optional<Candidate> alice_candidate(const BitWord& word) const override;
    std::vector<std::string> check_alice_sent(const BobMachine& bob, const BitWord& x,
                                              const BitWord& word) const override;
    std::string name() const override { return "35"; }

    const Codebook& codebook() const { return codebook_; }
    /// 0^{4M} then 1^{4M}.
    const std::vector<BitWord>& extras() const { return extras_; }
    const std::vector<Fields>& tuples() const { return tuples_; }

    /// Throws UnknownWord for tuples outside the message space.
    Candidate candidate(const Message& m) const;
    Message message(const Candidate& c) const;
    const BitWord& word(const Candidate& c) const;
    const BitWord& word(const Message& m) const { return word(candidate(m)); }

private:
    using Key = std::tuple<std::uint64_t, std::size_t, bool, bool, int, bool>;
    static Key key(const Fields& f) { return {f.x.to_uint(), f.cnt, f.cnfm, f.rec, f.knt, f.stg2}; }

    std::vector<Fields> tuples_;
    std::map<Key, std::size_t> index_;
    Codebook codebook_;
    std::vector<BitWord> extras_;
};

} // namespace iecc::p35

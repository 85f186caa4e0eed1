#pragma once

#include "iecc/channel.hpp"

#include <array>

namespace iecc::p611 {

/// Bob's four words of length 3M/8: (000), (011), (101), (110) each repeated M/8 times.
enum class BobWord : std::uint8_t { Zero = 0, One = 1, Two = 2, Three = 3 };

BitWord bob_word(BobWord w, std::size_t m);

/// The single Bob word consistent with `received`, if exactly one is.
std::optional<BobWord> unique_bob_word(const ErasedWord& received, std::size_t m);

/// Alice's codeword index for (x, cnt): x_value * (n + 1) + cnt.
struct MessageFields {
    BitWord x;
    std::size_t cnt = 0;
    friend bool operator==(const MessageFields&, const MessageFields&) = default;
};

class Protocol611;

struct AliceState {
    std::size_t cnt = 0;
    BobWord mes = BobWord::Zero;
    std::optional<bool> terminal;
    BitWord last_sent;
};

class Alice611 final : public AliceMachine {
public:
    Alice611(const Protocol611& protocol, BitWord x);
    Alice611(const Protocol611& protocol, BitWord x, AliceState state);

    BitWord step(const std::optional<ErasedWord>& from_bob, const ChunkLabel& label) override;
    nlohmann::json snapshot() const override;
    const std::vector<std::string>& flags() const override { return flags_; }
    std::unique_ptr<AliceMachine> clone() const override { return std::make_unique<Alice611>(*this); }

    const AliceState& state() const { return state_; }

private:
    BitWord respond(const ErasedWord& m);

    const Protocol611* protocol_;
    BitWord x_;
    AliceState state_;
    std::vector<std::string> flags_;
};

struct BobState {
    int phase = 1;
    std::optional<BitWord> xhat;
    std::optional<BitWord> xhat0, xhat1;
    std::optional<std::size_t> i;
    BobWord mes = BobWord::Zero;
    std::size_t last = 0;
    std::optional<int> ques;
    std::optional<bool> par;
    std::optional<bool> last_received_bit;
    bool unique_decode = false;
    /// Which listed case handled the latest message ("1".."4", "2-phase", "fixed").
    std::string last_case;
};

class Bob611 final : public BobMachine {
public:
    explicit Bob611(const Protocol611& protocol);
    Bob611(const Protocol611& protocol, BobState state);

    BitWord step(const ErasedWord& from_alice, const ChunkLabel& label) override;
    FinalOutput finalize() const override;
    nlohmann::json snapshot() const override;
    const std::optional<std::vector<Candidate>>& last_decode() const override { return last_decode_; }
    bool unique_decode_seen() const override { return state_.unique_decode; }
    const std::optional<BitWord>& committed() const override { return state_.xhat; }
    const std::vector<std::string>& violations() const override { return violations_; }
    const std::vector<std::string>& flags() const override { return flags_; }
    std::unique_ptr<BobMachine> clone() const override { return std::make_unique<Bob611>(*this); }

    const BobState& state() const { return state_; }

private:
    void phase1(const ErasedWord& m);
    void fix(const BitWord& x) {
        if (!state_.xhat) state_.xhat = x;
    }

    const Protocol611* protocol_;
    BobState state_;
    std::optional<std::vector<Candidate>> last_decode_;
    std::vector<std::string> violations_;
    std::vector<std::string> flags_;
};

class Protocol611 final : public Protocol {
public:
    explicit Protocol611(const SessionConfig& cfg);

    std::unique_ptr<AliceMachine> make_alice(const BitWord& x) const override;
    std::unique_ptr<BobMachine> make_bob() const override;
    std::vector<Candidate> decode_alice(const ErasedWord& received) const override;
    std::optional<Candidate> alice_candidate(const BitWord& word) const override;
    std::vector<std::string> check_alice_sent(const BobMachine& bob, const BitWord& x,
                                              const BitWord& word) const override;
    std::string name() const override { return "611"; }

    const Codebook& codebook() const { return codebook_; }
    /// 0^M then 1^M, Alice's terminal words.
    const std::vector<BitWord>& extras() const { return extras_; }
    std::size_t index(const BitWord& x, std::size_t cnt) const;
    MessageFields fields(std::size_t index) const;
    const BitWord& encode(const BitWord& x, std::size_t cnt) const;

private:
    Codebook codebook_;
    std::vector<BitWord> extras_;
};

} // namespace iecc::p611

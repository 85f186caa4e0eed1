#pragma once

#include "iecc/bits.hpp"
#include "iecc/ecc.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace iecc {

enum class ProtocolKind { P611, P35 };
enum class Speaker { Alice, Bob };

std::string to_string(ProtocolKind p);
std::string to_string(Speaker s);
ProtocolKind parse_protocol(std::string_view text);

/// Position of a chunk in the nested chunk/block/megablock grouping. Block and
/// megablock indices are global. The 6/11 schedule has a single block.
struct ChunkLabel {
    std::size_t chunk = 0;
    std::size_t block = 0;
    std::size_t megablock = 0;
    std::size_t chunk_in_block = 0;
    std::size_t block_in_megablock = 0;

    bool block_start() const { return chunk_in_block == 0; }
    bool megablock_start() const { return chunk_in_block == 0 && block_in_megablock == 0; }
};

struct Segment {
    Speaker speaker = Speaker::Alice;
    std::size_t length = 0;
    std::size_t first_round = 0;
    ChunkLabel label;
};

struct RoundSchedule {
    std::size_t total_rounds = 0;
    std::size_t chunk_count = 0;
    std::size_t alice_length = 0;
    std::size_t bob_length = 0;
    /// Alice, Bob, Alice, Bob, ... one pair per chunk.
    std::vector<Segment> segments;

    std::size_t alice_rounds() const { return chunk_count * alice_length; }
    std::size_t bob_rounds() const { return chunk_count * bob_length; }
    /// Fraction of rounds in which Bob speaks.
    Rational bob_fraction() const;
    const ChunkLabel& label(std::size_t chunk) const { return segments[2 * chunk].label; }
};

struct SessionConfig {
    ProtocolKind protocol = ProtocolKind::P611;
    std::size_t n = 3;
    /// Drives the schedule sizes (T; A, B, C).
    Rational epsilon{1, 2};
    std::size_t m = 64;
    /// Drives codebook distance and the list-decoding erasure threshold.
    Rational code_epsilon{1, 8};
    std::uint64_t seed = 1;
};

/// Default desk parameters per protocol.
SessionConfig default_config(ProtocolKind protocol);

/// Throws InvalidConfig.
void validate(const SessionConfig& cfg);
RoundSchedule make_schedule(const SessionConfig& cfg);

// ---------------------------------------------------------------------------
// Party machines. Each protocol supplies concrete machines; the runner drives
// them through these interfaces. Machines are deterministic and cloneable.

class AliceMachine {
public:
    virtual ~AliceMachine() = default;
    /// Message for this chunk. `from_bob` is Bob's delivered message from the
    /// previous chunk, absent in chunk 0.
    virtual BitWord step(const std::optional<ErasedWord>& from_bob, const ChunkLabel& label) = 0;
    virtual nlohmann::json snapshot() const = 0;
    virtual const std::vector<std::string>& flags() const = 0;
    virtual std::unique_ptr<AliceMachine> clone() const = 0;
};

struct FinalOutput {
    BitWord x;
    bool fallback = false;
};

class BobMachine {
public:
    virtual ~BobMachine() = default;
    virtual BitWord step(const ErasedWord& from_alice, const ChunkLabel& label) = 0;
    virtual FinalOutput finalize() const = 0;
    virtual nlohmann::json snapshot() const = 0;
    /// Candidates of the most recent decode attempt made in `step`; empty
    /// optional when the message was too erased to decode.
    virtual const std::optional<std::vector<Candidate>>& last_decode() const = 0;
    /// True once Bob fixed his output from a uniquely decoded message.
    virtual bool unique_decode_seen() const = 0;
    /// Output fixed mid-protocol, if any. Every rule that fixes it early is a
    /// deduction, so a wrong value here is an invariant violation.
    virtual const std::optional<BitWord>& committed() const = 0;
    /// Entries are appended; the runner reads the tail after each step.
    virtual const std::vector<std::string>& violations() const = 0;
    virtual const std::vector<std::string>& flags() const = 0;
    virtual std::unique_ptr<BobMachine> clone() const = 0;
};

/// Immutable protocol context: schedule, codebooks, machine factories, and the
/// analysis invariants that need both parties' state to check.
class Protocol {
public:
    virtual ~Protocol() = default;

    const SessionConfig& config() const { return cfg_; }
    const RoundSchedule& schedule() const { return schedule_; }

    virtual std::unique_ptr<AliceMachine> make_alice(const BitWord& x) const = 0;
    virtual std::unique_ptr<BobMachine> make_bob() const = 0;

    /// Candidates for an erased Alice message over her whole message space.
    virtual std::vector<Candidate> decode_alice(const ErasedWord& received) const = 0;
    /// Candidate naming an exact Alice message, if it is in her message space.
    virtual std::optional<Candidate> alice_candidate(const BitWord& word) const = 0;

    /// Checks run right after Alice sends `word`, before Bob reads it.
    /// Returns the names of violated invariants.
    virtual std::vector<std::string> check_alice_sent(const BobMachine& bob, const BitWord& x,
                                                      const BitWord& word) const = 0;
    /// "611" or "35".
    virtual std::string name() const = 0;

protected:
    Protocol(SessionConfig cfg, RoundSchedule schedule) : cfg_(std::move(cfg)), schedule_(std::move(schedule)) {}

private:
    SessionConfig cfg_;
    RoundSchedule schedule_;
};

/// Builds the protocol for `cfg` (codebook construction included). Results are
/// memoized per configuration.
std::shared_ptr<const Protocol> make_protocol(const SessionConfig& cfg);

// ---------------------------------------------------------------------------
// Adversaries.

struct MessageView {
    Speaker speaker;
    const ChunkLabel& label;
    std::size_t round;
    const BitWord& sent;
    const BitWord& x;
    const AliceMachine& alice;
    const BobMachine& bob;
    const Protocol& protocol;
};

/// Online, white-box erasure adversary: sees the history and both machines
/// before committing a mask (1 = erased) for each message.
class Adversary {
public:
    virtual ~Adversary() = default;
    virtual BitWord choose_mask(const MessageView& view) = 0;
    virtual void on_delivered(const MessageView& /*view*/, const ErasedWord& /*delivered*/) {}
    virtual std::string describe() const = 0;
    virtual std::unique_ptr<Adversary> clone() const = 0;
};

// ---------------------------------------------------------------------------
// Results and traces.

struct TraceEvent {
    enum class Kind { ChunkStart, MessageSent, MessageDelivered, DecodeResult, StateSnapshot, Finalize };
    Kind kind = Kind::ChunkStart;
    std::size_t round = 0;
    ChunkLabel label;
    std::optional<Speaker> speaker;
    std::optional<std::string> bits;
    std::optional<std::string> mask;
    std::optional<std::vector<std::string>> candidates;
    nlohmann::json state;
};

std::string to_string(TraceEvent::Kind k);
/// Fields in the documented order: round, kind, chunk, block, megablock,
/// speaker, bits, mask, candidates, state.
nlohmann::ordered_json to_json(const TraceEvent& e);
void write_trace(std::ostream& os, const std::vector<TraceEvent>& trace);
std::vector<TraceEvent> read_trace(std::istream& is);

struct MessageRecord {
    ChunkLabel label;
    Speaker speaker = Speaker::Alice;
    std::size_t round = 0;
    BitWord sent;
    BitWord mask;
};

struct SessionResult {
    BitWord input_x;
    BitWord bob_output;
    bool success = false;
    std::size_t total_rounds = 0;
    std::size_t erased_alice_rounds = 0;
    std::size_t erased_bob_rounds = 0;
    Rational total_erasure_fraction{0};
    std::vector<std::string> invariant_violations;
    /// Non-violation notes: finalize_fallback, clamps, non-initializing decodes.
    std::vector<std::string> flags;
    bool unique_decode = false;
    std::vector<MessageRecord> transcript;
    std::vector<TraceEvent> trace;

    /// What Bob received from Alice, message by message.
    std::vector<ErasedWord> bob_view() const;
};

/// Exact erased fraction of the whole communication.
Rational budget_fraction(const SessionResult& result);

struct SessionOptions {
    bool record_trace = false;
};

/// Step-wise session. Copyable, so searches can branch on a partial run.
class Session {
public:
    Session(std::shared_ptr<const Protocol> protocol, BitWord x, SessionOptions options = {});
    Session(const Session& other);
    Session& operator=(const Session& other);
    Session(Session&&) noexcept = default;
    Session& operator=(Session&&) noexcept = default;

    bool done() const { return next_chunk_ >= protocol_->schedule().chunk_count; }
    std::size_t next_chunk() const { return next_chunk_; }
    std::size_t erased_rounds() const { return erased_alice_ + erased_bob_; }
    const BobMachine& bob() const { return *bob_; }
    const AliceMachine& alice() const { return *alice_; }
    const Protocol& protocol() const { return *protocol_; }
    const BitWord& input() const { return x_; }

    /// Runs one chunk (Alice's message, then Bob's) against `adversary`.
    void step_chunk(Adversary& adversary);
    /// Finalizes Bob and assembles the result. The session stays usable.
    SessionResult result() const;

private:
    std::shared_ptr<const Protocol> protocol_;
    BitWord x_;
    SessionOptions options_;
    std::unique_ptr<AliceMachine> alice_;
    std::unique_ptr<BobMachine> bob_;
    std::optional<ErasedWord> to_alice_;
    std::size_t next_chunk_ = 0;
    std::size_t erased_alice_ = 0;
    std::size_t erased_bob_ = 0;
    std::vector<std::string> violations_;
    std::vector<MessageRecord> transcript_;
    std::vector<TraceEvent> trace_;
};

/// Runs the whole schedule. Throws AdversaryProtocolError on a bad mask.
SessionResult run_session(std::shared_ptr<const Protocol> protocol, const BitWord& x, Adversary& adversary,
                          SessionOptions options = {});
SessionResult run_session(const SessionConfig& cfg, const BitWord& x, Adversary& adversary,
                          SessionOptions options = {});

/// All inputs of length n in ascending numeric order (x[0] most significant).
std::vector<BitWord> all_inputs(std::size_t n);

} // namespace iecc

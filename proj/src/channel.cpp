#include "iecc/channel.hpp"

#include "iecc/errors.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace iecc {

namespace {

std::size_t ceil_ratio(const Rational& r) {
    auto q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0) ++q;
    return static_cast<std::size_t>(q);
}

Speaker parse_speaker(const std::string& s) {
    if (s == "alice") return Speaker::Alice;
    if (s == "bob") return Speaker::Bob;
    throw ParseError("unknown speaker '" + s + "'");
}

TraceEvent::Kind parse_kind(const std::string& s) {
    using K = TraceEvent::Kind;
    for (K k : {K::ChunkStart, K::MessageSent, K::MessageDelivered, K::DecodeResult, K::StateSnapshot, K::Finalize})
        if (to_string(k) == s) return k;
    throw ParseError("unknown trace event kind '" + s + "'");
}

} // namespace

std::string to_string(ProtocolKind p) { return p == ProtocolKind::P611 ? "611" : "35"; }
std::string to_string(Speaker s) { return s == Speaker::Alice ? "alice" : "bob"; }

ProtocolKind parse_protocol(std::string_view text) {
    if (text == "611" || text == "6/11" || text == "P611") return ProtocolKind::P611;
    if (text == "35" || text == "3/5" || text == "P35") return ProtocolKind::P35;
    throw InvalidConfig("unknown protocol '" + std::string(text) + "' (expected 611 or 35)");
}

Rational RoundSchedule::bob_fraction() const {
    if (total_rounds == 0) return Rational(0);
    return Rational(static_cast<std::int64_t>(bob_rounds()), static_cast<std::int64_t>(total_rounds));
}

SessionConfig default_config(ProtocolKind protocol) {
    SessionConfig cfg;
    cfg.protocol = protocol;
    if (protocol == ProtocolKind::P611) {
        cfg.n = 3;
        cfg.m = 64;
    } else {
        cfg.n = 2;
        cfg.m = 32;
    }
    return cfg;
}

void validate(const SessionConfig& cfg) {
    if (cfg.n == 0) throw InvalidConfig("n must be positive");
    if (cfg.n > 16) throw InvalidConfig("n above 16 is beyond the brute-force codebook scale");
    if (cfg.epsilon <= Rational(0) || cfg.epsilon > Rational(1))
        throw InvalidConfig("epsilon must lie in (0, 1], got " + to_string(cfg.epsilon));
    if (cfg.code_epsilon <= Rational(0) || cfg.code_epsilon >= Rational(1, 4))
        throw InvalidConfig("code epsilon must lie in (0, 1/4), got " + to_string(cfg.code_epsilon));
    if (cfg.m < 1) throw InvalidConfig("M must be at least 1");
    if (cfg.protocol == ProtocolKind::P611 && cfg.m % 8 != 0)
        throw InvalidConfig("the 6/11 protocol needs M divisible by 8 (3M/8 must be integral), got M=" +
                            std::to_string(cfg.m));
}

RoundSchedule make_schedule(const SessionConfig& cfg) {
    validate(cfg);
    RoundSchedule s;
    const auto n = static_cast<std::int64_t>(cfg.n);
    std::size_t megablocks = 1, blocks = 1, chunks_per_block = 0;
    if (cfg.protocol == ProtocolKind::P611) {
        chunks_per_block = ceil_ratio(Rational(n + 1) / cfg.epsilon);
        s.alice_length = cfg.m;
        s.bob_length = 3 * cfg.m / 8;
    } else {
        megablocks = ceil_ratio(Rational(1) / cfg.epsilon);
        blocks = ceil_ratio(Rational(n) / cfg.epsilon);
        chunks_per_block = ceil_ratio(Rational(1) / cfg.epsilon);
        s.alice_length = 4 * cfg.m;
        s.bob_length = cfg.m;
    }
    s.chunk_count = megablocks * blocks * chunks_per_block;
    s.segments.reserve(2 * s.chunk_count);
    std::size_t round = 0, chunk = 0;
    for (std::size_t a = 0; a < megablocks; ++a)
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::size_t c = 0; c < chunks_per_block; ++c, ++chunk) {
                ChunkLabel label{chunk, a * blocks + b, a, c, b};
                s.segments.push_back({Speaker::Alice, s.alice_length, round, label});
                round += s.alice_length;
                s.segments.push_back({Speaker::Bob, s.bob_length, round, label});
                round += s.bob_length;
            }
    s.total_rounds = round;
    return s;
}

// ---------------------------------------------------------------------------

std::string to_string(TraceEvent::Kind k) {
    switch (k) {
    case TraceEvent::Kind::ChunkStart: return "chunk_start";
    case TraceEvent::Kind::MessageSent: return "message_sent";
    case TraceEvent::Kind::MessageDelivered: return "message_delivered";
    case TraceEvent::Kind::DecodeResult: return "decode_result";
    case TraceEvent::Kind::StateSnapshot: return "state_snapshot";
    case TraceEvent::Kind::Finalize: return "finalize";
    }
    return "?";
}

nlohmann::ordered_json to_json(const TraceEvent& e) {
    using oj = nlohmann::ordered_json;
    oj j;
    j["round"] = e.round;
    j["kind"] = to_string(e.kind);
    j["chunk"] = e.label.chunk;
    j["block"] = e.label.block;
    j["megablock"] = e.label.megablock;
    j["speaker"] = e.speaker ? oj(to_string(*e.speaker)) : oj(nullptr);
    j["bits"] = e.bits ? oj(*e.bits) : oj(nullptr);
    j["mask"] = e.mask ? oj(*e.mask) : oj(nullptr);
    j["candidates"] = e.candidates ? oj(*e.candidates) : oj(nullptr);
    j["state"] = oj::parse(e.state.dump());
    return j;
}

void write_trace(std::ostream& os, const std::vector<TraceEvent>& trace) {
    for (const auto& e : trace) os << to_json(e).dump() << "\n";
}

std::vector<TraceEvent> read_trace(std::istream& is) {
    std::vector<TraceEvent> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(std::string("bad trace line: ") + ex.what());
        }
        TraceEvent e;
        e.round = j.at("round").get<std::size_t>();
        e.kind = parse_kind(j.at("kind").get<std::string>());
        e.label.chunk = j.at("chunk").get<std::size_t>();
        e.label.block = j.at("block").get<std::size_t>();
        e.label.megablock = j.at("megablock").get<std::size_t>();
        if (!j.at("speaker").is_null()) e.speaker = parse_speaker(j["speaker"].get<std::string>());
        if (!j.at("bits").is_null()) e.bits = j["bits"].get<std::string>();
        if (!j.at("mask").is_null()) e.mask = j["mask"].get<std::string>();
        if (!j.at("candidates").is_null()) e.candidates = j["candidates"].get<std::vector<std::string>>();
        e.state = j.at("state");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ErasedWord> SessionResult::bob_view() const {
    std::vector<ErasedWord> view;
    for (const auto& r : transcript)
        if (r.speaker == Speaker::Alice) view.push_back(ErasedWord::deliver(r.sent, r.mask));
    return view;
}

Rational budget_fraction(const SessionResult& result) { return result.total_erasure_fraction; }

// ---------------------------------------------------------------------------

Session::Session(std::shared_ptr<const Protocol> protocol, BitWord x, SessionOptions options)
    : protocol_(std::move(protocol)), x_(std::move(x)), options_(options) {
    if (x_.size() != protocol_->config().n)
        throw InvalidConfig("input length " + std::to_string(x_.size()) + " differs from n = " +
                            std::to_string(protocol_->config().n));
    alice_ = protocol_->make_alice(x_);
    bob_ = protocol_->make_bob();
}

Session::Session(const Session& other)
    : protocol_(other.protocol_), x_(other.x_), options_(other.options_), alice_(other.alice_->clone()),
      bob_(other.bob_->clone()), to_alice_(other.to_alice_), next_chunk_(other.next_chunk_),
      erased_alice_(other.erased_alice_), erased_bob_(other.erased_bob_), violations_(other.violations_),
      transcript_(other.transcript_), trace_(other.trace_) {}

Session& Session::operator=(const Session& other) {
    if (this != &other) {
        Session copy(other);
        *this = std::move(copy);
    }
    return *this;
}

namespace {

BitWord checked_mask(Adversary& adversary, const MessageView& view) {
    BitWord mask = adversary.choose_mask(view);
    if (mask.size() != view.sent.size())
        throw AdversaryProtocolError("adversary '" + adversary.describe() + "' returned a mask of length " +
                                     std::to_string(mask.size()) + " for a message of length " +
                                     std::to_string(view.sent.size()));
    return mask;
}

std::vector<std::string> candidate_names(const std::vector<Candidate>& cs) {
    std::vector<std::string> out;
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back(to_string(c));
    return out;
}

} // namespace

void Session::step_chunk(Adversary& adversary) {
    if (done()) throw InvalidInput("session already ran every chunk");
    const auto& schedule = protocol_->schedule();
    const auto& alice_seg = schedule.segments[2 * next_chunk_];
    const auto& bob_seg = schedule.segments[2 * next_chunk_ + 1];
    const ChunkLabel& label = alice_seg.label;
    const std::string where = "chunk " + std::to_string(label.chunk) + ": ";

    auto record = [&](TraceEvent e) {
        if (options_.record_trace) trace_.push_back(std::move(e));
    };
    record({TraceEvent::Kind::ChunkStart, alice_seg.first_round, label, {}, {}, {}, {}, nlohmann::json::object()});

    // Alice speaks.
    BitWord alice_word = alice_->step(to_alice_, label);
    if (alice_word.size() != alice_seg.length)
        throw Error("Alice produced " + std::to_string(alice_word.size()) + " bits, schedule expects " +
                    std::to_string(alice_seg.length));
    for (auto& v : protocol_->check_alice_sent(*bob_, x_, alice_word)) violations_.push_back(where + v);

    MessageView alice_view{Speaker::Alice, label, alice_seg.first_round, alice_word, x_, *alice_, *bob_, *protocol_};
    BitWord alice_mask = checked_mask(adversary, alice_view);
    ErasedWord to_bob = ErasedWord::deliver(alice_word, alice_mask);
    adversary.on_delivered(alice_view, to_bob);
    erased_alice_ += alice_mask.weight();
    transcript_.push_back({label, Speaker::Alice, alice_seg.first_round, alice_word, alice_mask});
    record({TraceEvent::Kind::MessageSent, alice_seg.first_round, label, Speaker::Alice, alice_word.to_string(), {},
            {}, nlohmann::json::object()});
    record({TraceEvent::Kind::MessageDelivered, alice_seg.first_round, label, Speaker::Alice, to_bob.to_string(),
            alice_mask.to_string(), {}, nlohmann::json::object()});

    // Bob reads and replies.
    const std::size_t old_violations = bob_->violations().size();
    BitWord bob_word = bob_->step(to_bob, label);
    if (bob_word.size() != bob_seg.length)
        throw Error("Bob produced " + std::to_string(bob_word.size()) + " bits, schedule expects " +
                    std::to_string(bob_seg.length));
    for (std::size_t k = old_violations; k < bob_->violations().size(); ++k)
        violations_.push_back(where + bob_->violations()[k]);

    if (const auto& decoded = bob_->last_decode()) {
        record({TraceEvent::Kind::DecodeResult, alice_seg.first_round, label, Speaker::Bob, {}, {},
                candidate_names(*decoded), nlohmann::json::object()});
        auto truth = protocol_->alice_candidate(alice_word);
        if (!truth || std::find(decoded->begin(), decoded->end(), *truth) == decoded->end())
            violations_.push_back(where + "true_message_not_decoded");
    }
    if (const auto& fixed = bob_->committed(); fixed && !(*fixed == x_)) {
        const std::string v = "committed_wrong_output";
        if (std::none_of(violations_.begin(), violations_.end(),
                         [&](const std::string& s) { return s.ends_with(v); }))
            violations_.push_back(where + v);
    }

    MessageView bob_view{Speaker::Bob, label, bob_seg.first_round, bob_word, x_, *alice_, *bob_, *protocol_};
    BitWord bob_mask = checked_mask(adversary, bob_view);
    ErasedWord to_alice = ErasedWord::deliver(bob_word, bob_mask);
    adversary.on_delivered(bob_view, to_alice);
    erased_bob_ += bob_mask.weight();
    transcript_.push_back({label, Speaker::Bob, bob_seg.first_round, bob_word, bob_mask});
    record({TraceEvent::Kind::MessageSent, bob_seg.first_round, label, Speaker::Bob, bob_word.to_string(), {}, {},
            nlohmann::json::object()});
    record({TraceEvent::Kind::MessageDelivered, bob_seg.first_round, label, Speaker::Bob, to_alice.to_string(),
            bob_mask.to_string(), {}, nlohmann::json::object()});
    record({TraceEvent::Kind::StateSnapshot, bob_seg.first_round, label, Speaker::Alice, {}, {}, {},
            alice_->snapshot()});
    record({TraceEvent::Kind::StateSnapshot, bob_seg.first_round, label, Speaker::Bob, {}, {}, {},
            bob_->snapshot()});

    to_alice_ = std::move(to_alice);
    ++next_chunk_;
}

SessionResult Session::result() const {
    SessionResult r;
    r.input_x = x_;
    FinalOutput out = bob_->finalize();
    r.bob_output = out.x;
    r.success = out.x == x_;
    r.total_rounds = protocol_->schedule().total_rounds;
    r.erased_alice_rounds = erased_alice_;
    r.erased_bob_rounds = erased_bob_;
    r.total_erasure_fraction = r.total_rounds == 0 ? Rational(0)
                                                   : Rational(static_cast<std::int64_t>(erased_alice_ + erased_bob_),
                                                              static_cast<std::int64_t>(r.total_rounds));
    r.invariant_violations = violations_;
    r.unique_decode = bob_->unique_decode_seen();
    if (r.unique_decode && !r.success) r.invariant_violations.push_back("final: unique_decode_output_wrong");
    r.flags = alice_->flags();
    const auto& bob_flags = bob_->flags();
    r.flags.insert(r.flags.end(), bob_flags.begin(), bob_flags.end());
    if (out.fallback) r.flags.push_back("finalize_fallback");
    r.transcript = transcript_;
    r.trace = trace_;
    if (options_.record_trace) {
        const auto& sched = protocol_->schedule();
        ChunkLabel last = sched.chunk_count ? sched.label(sched.chunk_count - 1) : ChunkLabel{};
        nlohmann::json state = {{"output", out.x.to_string()},
                                {"success", r.success},
                                {"fallback", out.fallback},
                                {"erased_alice", erased_alice_},
                                {"erased_bob", erased_bob_},
                                {"fraction", to_string(r.total_erasure_fraction)}};
        r.trace.push_back({TraceEvent::Kind::Finalize, sched.total_rounds, last, Speaker::Bob, out.x.to_string(), {},
                           {}, state});
    }
    return r;
}

SessionResult run_session(std::shared_ptr<const Protocol> protocol, const BitWord& x, Adversary& adversary,
                          SessionOptions options) {
    Session session(std::move(protocol), x, options);
    while (!session.done()) session.step_chunk(adversary);
    return session.result();
}

SessionResult run_session(const SessionConfig& cfg, const BitWord& x, Adversary& adversary, SessionOptions options) {
    return run_session(make_protocol(cfg), x, adversary, options);
}

std::vector<BitWord> all_inputs(std::size_t n) {
    if (n >= 63) throw InvalidConfig("input enumeration needs n < 63");
    std::vector<BitWord> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) out.push_back(BitWord::from_uint(v, n));
    return out;
}

} // namespace iecc

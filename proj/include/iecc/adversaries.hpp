#pragma once

#include "iecc/channel.hpp"

#include <iosfwd>
#include <map>
#include <random>

namespace iecc {

class NullAdversary final : public Adversary {
public:
    BitWord choose_mask(const MessageView& view) override { return BitWord(view.sent.size()); }
    std::string describe() const override { return "null"; }
    std::unique_ptr<Adversary> clone() const override { return std::make_unique<NullAdversary>(*this); }
};

/// Erases floor(budget * total_rounds) rounds chosen uniformly at random up
/// front (seeded), then commits them message by message.
class RandomAdversary final : public Adversary {
public:
    RandomAdversary(Rational budget, std::uint64_t seed);
    BitWord choose_mask(const MessageView& view) override;
    std::string describe() const override;
    std::unique_ptr<Adversary> clone() const override { return std::make_unique<RandomAdversary>(*this); }

private:
    Rational budget_;
    std::uint64_t seed_;
    std::vector<bool> erased_;
};

/// Clips another adversary's masks so the running total never exceeds
/// floor(budget * total_rounds). Erasures past the cap are dropped from the end
/// of each mask.
class BudgetCapped final : public Adversary {
public:
    BudgetCapped(std::unique_ptr<Adversary> inner, Rational budget);
    BudgetCapped(const BudgetCapped& other);
    BitWord choose_mask(const MessageView& view) override;
    void on_delivered(const MessageView& view, const ErasedWord& delivered) override {
        inner_->on_delivered(view, delivered);
    }
    std::string describe() const override;
    std::unique_ptr<Adversary> clone() const override { return std::make_unique<BudgetCapped>(*this); }

private:
    std::unique_ptr<Adversary> inner_;
    Rational budget_;
    std::size_t spent_ = 0;
};

// ---------------------------------------------------------------------------

struct ChunkAction {
    enum class Kind { Pass, Confuse, BlindAlice, BlindBob, BlindBobAndConfuse };
    Kind kind = Kind::Pass;
    /// Input of the fake Alice for the confusing kinds.
    BitWord decoy;

    static ChunkAction pass() { return {}; }
    static ChunkAction blind_alice() { return {Kind::BlindAlice, {}}; }
    static ChunkAction blind_bob() { return {Kind::BlindBob, {}}; }
    static ChunkAction confuse(BitWord decoy) { return {Kind::Confuse, std::move(decoy)}; }
    static ChunkAction blind_bob_and_confuse(BitWord decoy) { return {Kind::BlindBobAndConfuse, std::move(decoy)}; }

    bool confuses() const { return kind == Kind::Confuse || kind == Kind::BlindBobAndConfuse; }
    bool blinds_bob() const { return kind == Kind::BlindBob || kind == Kind::BlindBobAndConfuse; }

    friend bool operator==(const ChunkAction&, const ChunkAction&) = default;
};

std::string to_string(const ChunkAction& a);

/// Every action available for an input of length n when the true input is `x`:
/// pass, blind_alice, blind_bob, then confuse and blind_bob_and_confuse for each
/// other input in ascending order.
std::vector<ChunkAction> action_menu(const BitWord& x);

/// Seeded random action sequence over the menus of all inputs of length n.
std::vector<ChunkAction> random_actions(std::size_t chunks, std::size_t n, std::uint64_t seed);

/// Realizes chunk actions white-box. A shadow Alice per decoy input receives the
/// same Bob words as the real Alice; confusing erases exactly the positions where
/// the real and shadow messages differ, provided Bob's list is then exactly those
/// two messages. Otherwise the action falls back to blind_alice and the fallback
/// is recorded.
class ChunkActionAdversary final : public Adversary {
public:
    explicit ChunkActionAdversary(std::vector<ChunkAction> actions = {});
    ChunkActionAdversary(const ChunkActionAdversary& other);
    ChunkActionAdversary(ChunkActionAdversary&&) noexcept = default;
    ChunkActionAdversary& operator=(const ChunkActionAdversary& other);
    ChunkActionAdversary& operator=(ChunkActionAdversary&&) noexcept = default;

    /// Overrides the action for the next chunk (used by searches).
    void set_next(ChunkAction action) { next_ = std::move(action); }
    /// Decoy Alices miss each of Bob's messages with probability `rate`
    /// (seeded), instead of hearing exactly what the real Alice heard.
    void set_decoy_deafness(Rational rate, std::uint64_t seed) {
        deaf_rate_ = rate;
        deaf_rng_.seed(seed);
    }

    BitWord choose_mask(const MessageView& view) override;
    void on_delivered(const MessageView& view, const ErasedWord& delivered) override;
    std::string describe() const override;
    std::unique_ptr<Adversary> clone() const override { return std::make_unique<ChunkActionAdversary>(*this); }

    const std::vector<std::string>& fallbacks() const { return fallbacks_; }

private:
    ChunkAction action_for(std::size_t chunk) const;
    void advance_shadows(const MessageView& view);

    std::vector<ChunkAction> actions_;
    std::optional<ChunkAction> next_;
    std::optional<ChunkAction> current_;
    std::map<std::string, std::unique_ptr<AliceMachine>> shadows_;
    std::map<std::string, BitWord> shadow_words_;
    std::optional<ErasedWord> to_alice_;
    std::vector<std::string> fallbacks_;
    Rational deaf_rate_{0};
    std::mt19937_64 deaf_rng_;
};

// ---------------------------------------------------------------------------

struct PlanEntry {
    std::size_t chunk = 0;
    Speaker speaker = Speaker::Alice;
    BitWord mask;
};

struct AttackPlan {
    std::vector<PlanEntry> masks;
    std::size_t total_cost = 0;
    std::string description;
    nlohmann::json params = nlohmann::json::object();

    /// Plan that reproduces the masks of a finished session.
    static AttackPlan from_transcript(const SessionResult& result, std::string description);
    std::size_t recompute_cost() const;
};

/// Checks masks against the schedule. Throws AdversaryProtocolError.
void validate(const AttackPlan& plan, const RoundSchedule& schedule);

/// JSON lines: a header {"type":"header",...} then one record per mask.
void write_plan(std::ostream& os, const AttackPlan& plan);
AttackPlan read_plan(std::istream& is);

class PlanAdversary final : public Adversary {
public:
    explicit PlanAdversary(AttackPlan plan);
    BitWord choose_mask(const MessageView& view) override;
    std::string describe() const override { return "plan: " + plan_.description; }
    std::unique_ptr<Adversary> clone() const override { return std::make_unique<PlanAdversary>(*this); }

private:
    AttackPlan plan_;
    std::map<std::pair<std::size_t, int>, BitWord> lookup_;
};

// ---------------------------------------------------------------------------

struct ConfusionVerdict {
    AttackPlan plan;
    /// Bob's share of the rounds.
    Rational bob_fraction{0};
    bool erase_bob_branch = true;
    BitWord input_a, input_b;
    /// Hamming distance between the two Alice transcripts (erase-Bob branch).
    std::size_t distance = 0;
    Rational cost_fraction{0};
    /// (1 + r) / 2 in the erase-Bob branch, 1 - r otherwise.
    Rational bound{0};
    bool views_identical = false;
    BitWord output_a, output_b;
    bool fooled = false;
};

/// The erase-Bob-or-erase-Alice confusion construction, replayed on both inputs.
ConfusionVerdict erasure_confusion_attack(const SessionConfig& cfg);

} // namespace iecc

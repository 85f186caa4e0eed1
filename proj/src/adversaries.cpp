#include "iecc/adversaries.hpp"

#include "iecc/errors.hpp"

#include <algorithm>
#include <numeric>

namespace iecc {

namespace {

std::size_t floor_budget(const Rational& budget, std::size_t total) {
    if (budget <= 0) return 0;
    const auto rounds = static_cast<std::int64_t>(total);
    const Rational exact = budget * rounds;
    return static_cast<std::size_t>(std::min<std::int64_t>(rounds, exact.numerator() / exact.denominator()));
}

BitWord full_mask(std::size_t length) { return BitWord(length, true); }

} // namespace

// ---------------------------------------------------------------------------

RandomAdversary::RandomAdversary(Rational budget, std::uint64_t seed) : budget_(budget), seed_(seed) {}

BitWord RandomAdversary::choose_mask(const MessageView& view) {
    const std::size_t total = view.protocol.schedule().total_rounds;
    if (erased_.size() != total) {
        erased_.assign(total, false);
        std::vector<std::size_t> rounds(total);
        std::iota(rounds.begin(), rounds.end(), std::size_t{0});
        std::mt19937_64 rng(seed_);
        std::shuffle(rounds.begin(), rounds.end(), rng);
        const std::size_t k = floor_budget(budget_, total);
        for (std::size_t i = 0; i < k; ++i) erased_[rounds[i]] = true;
    }
    BitWord mask(view.sent.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask.set(i, erased_[view.round + i]);
    return mask;
}

std::string RandomAdversary::describe() const {
    return "random(budget=" + to_string(budget_) + ",seed=" + std::to_string(seed_) + ")";
}

// ---------------------------------------------------------------------------

BudgetCapped::BudgetCapped(std::unique_ptr<Adversary> inner, Rational budget)
    : inner_(std::move(inner)), budget_(budget) {}

BudgetCapped::BudgetCapped(const BudgetCapped& other)
    : inner_(other.inner_->clone()), budget_(other.budget_), spent_(other.spent_) {}

BitWord BudgetCapped::choose_mask(const MessageView& view) {
    BitWord mask = inner_->choose_mask(view);
    const std::size_t cap = floor_budget(budget_, view.protocol.schedule().total_rounds);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        if (spent_ < cap)
            ++spent_;
        else
            mask.set(i, false);
    }
    return mask;
}

std::string BudgetCapped::describe() const {
    return "capped(" + inner_->describe() + ",budget=" + to_string(budget_) + ")";
}

// ---------------------------------------------------------------------------

std::string to_string(const ChunkAction& a) {
    switch (a.kind) {
    case ChunkAction::Kind::Pass: return "pass";
    case ChunkAction::Kind::BlindAlice: return "blind_alice";
    case ChunkAction::Kind::BlindBob: return "blind_bob";
    case ChunkAction::Kind::Confuse: return "confuse(" + a.decoy.to_string() + ")";
    case ChunkAction::Kind::BlindBobAndConfuse: return "blind_bob_and_confuse(" + a.decoy.to_string() + ")";
    }
    return "?";
}

std::vector<ChunkAction> action_menu(const BitWord& x) {
    std::vector<ChunkAction> menu = {ChunkAction::pass(), ChunkAction::blind_alice(), ChunkAction::blind_bob()};
    const auto inputs = all_inputs(x.size());
    for (const auto& d : inputs)
        if (!(d == x)) menu.push_back(ChunkAction::confuse(d));
    for (const auto& d : inputs)
        if (!(d == x)) menu.push_back(ChunkAction::blind_bob_and_confuse(d));
    return menu;
}

std::vector<ChunkAction> random_actions(std::size_t chunks, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto inputs = all_inputs(n);
    std::uniform_int_distribution<int> kind(0, 4);
    std::uniform_int_distribution<std::size_t> pick(0, inputs.size() - 1);
    std::vector<ChunkAction> out;
    out.reserve(chunks);
    for (std::size_t k = 0; k < chunks; ++k) {
        switch (kind(rng)) {
        case 0: out.push_back(ChunkAction::pass()); break;
        case 1: out.push_back(ChunkAction::blind_alice()); break;
        case 2: out.push_back(ChunkAction::blind_bob()); break;
        case 3: out.push_back(ChunkAction::confuse(inputs[pick(rng)])); break;
        default: out.push_back(ChunkAction::blind_bob_and_confuse(inputs[pick(rng)])); break;
        }
    }
    return out;
}

ChunkActionAdversary::ChunkActionAdversary(std::vector<ChunkAction> actions) : actions_(std::move(actions)) {}

ChunkActionAdversary::ChunkActionAdversary(const ChunkActionAdversary& other)
    : actions_(other.actions_), next_(other.next_), current_(other.current_), shadow_words_(other.shadow_words_),
      to_alice_(other.to_alice_), fallbacks_(other.fallbacks_), deaf_rate_(other.deaf_rate_),
      deaf_rng_(other.deaf_rng_) {
    for (const auto& [key, machine] : other.shadows_) shadows_.emplace(key, machine->clone());
}

ChunkActionAdversary& ChunkActionAdversary::operator=(const ChunkActionAdversary& other) {
    if (this != &other) {
        ChunkActionAdversary copy(other);
        *this = std::move(copy);
    }
    return *this;
}

ChunkAction ChunkActionAdversary::action_for(std::size_t chunk) const {
    if (next_) return *next_;
    if (chunk < actions_.size()) return actions_[chunk];
    return ChunkAction::pass();
}

void ChunkActionAdversary::advance_shadows(const MessageView& view) {
    if (view.label.chunk == 0 && shadows_.empty())
        for (const auto& d : all_inputs(view.x.size())) shadows_.emplace(d.to_string(), view.protocol.make_alice(d));
    std::optional<ErasedWord> heard = to_alice_;
    if (heard && deaf_rate_ > Rational(0)) {
        const auto draw = static_cast<std::int64_t>(deaf_rng_() % 1'000'000);
        if (Rational(draw, 1'000'000) < deaf_rate_) heard = ErasedWord::all_erased(heard->size());
    }
    for (auto& [key, machine] : shadows_) shadow_words_[key] = machine->step(heard, view.label);
}

BitWord ChunkActionAdversary::choose_mask(const MessageView& view) {
    if (view.speaker == Speaker::Alice) {
        advance_shadows(view);
        current_ = action_for(view.label.chunk);
        next_.reset();
        const ChunkAction& a = *current_;
        if (a.kind == ChunkAction::Kind::BlindAlice) return full_mask(view.sent.size());
        if (!a.confuses()) return BitWord(view.sent.size());

        const BitWord& fake = shadow_words_.at(a.decoy.to_string());
        BitWord mask(view.sent.size());
        for (std::size_t i = 0; i < mask.size(); ++i) mask.set(i, view.sent[i] != fake[i]);
        if (fake == view.sent) return mask;

        // Bob must then see exactly the real and the fake message.
        const ErasedWord preview = ErasedWord::deliver(view.sent, mask);
        auto list = view.protocol.decode_alice(preview);
        auto real_c = view.protocol.alice_candidate(view.sent);
        auto fake_c = view.protocol.alice_candidate(fake);
        const Rational threshold = Rational(3, 4) - Rational(3, 2) * view.protocol.config().code_epsilon;
        const bool exact = !erased_at_least(mask.weight(), mask.size(), threshold) && real_c && fake_c && list.size() == 2 &&
                     std::find(list.begin(), list.end(), *real_c) != list.end() &&
                     std::find(list.begin(), list.end(), *fake_c) != list.end();
        if (!exact) {
            fallbacks_.push_back("chunk " + std::to_string(view.label.chunk) + ": " + to_string(a) +
                                 " -> blind_alice");
            return full_mask(view.sent.size());
        }
        return mask;
    }
    if (current_ && current_->blinds_bob()) return full_mask(view.sent.size());
    return BitWord(view.sent.size());
}

void ChunkActionAdversary::on_delivered(const MessageView& view, const ErasedWord& delivered) {
    if (view.speaker == Speaker::Bob) to_alice_ = delivered;
}

std::string ChunkActionAdversary::describe() const {
    std::string s = "chunk_actions[";
    for (std::size_t k = 0; k < actions_.size(); ++k) {
        if (k) s += ",";
        s += to_string(actions_[k]);
    }
    s += "]";
    if (!fallbacks_.empty()) s += " fallbacks=" + std::to_string(fallbacks_.size());
    return s;
}

// ---------------------------------------------------------------------------

AttackPlan AttackPlan::from_transcript(const SessionResult& result, std::string description) {
    AttackPlan plan;
    plan.description = std::move(description);
    for (const auto& m : result.transcript) {
        if (m.mask.weight() == 0) continue;
        plan.masks.push_back({m.label.chunk, m.speaker, m.mask});
    }
    plan.total_cost = plan.recompute_cost();
    return plan;
}

std::size_t AttackPlan::recompute_cost() const {
    std::size_t c = 0;
    for (const auto& e : masks) c += e.mask.weight();
    return c;
}

void validate(const AttackPlan& plan, const RoundSchedule& schedule) {
    for (const auto& e : plan.masks) {
        if (e.chunk >= schedule.chunk_count)
            throw AdversaryProtocolError("plan names chunk " + std::to_string(e.chunk) + " of " +
                                         std::to_string(schedule.chunk_count));
        const std::size_t len = e.speaker == Speaker::Alice ? schedule.alice_length : schedule.bob_length;
        if (e.mask.size() != len)
            throw AdversaryProtocolError("plan mask for chunk " + std::to_string(e.chunk) + " has length " +
                                         std::to_string(e.mask.size()) + ", expected " + std::to_string(len));
    }
    if (plan.recompute_cost() != plan.total_cost)
        throw AdversaryProtocolError("plan total_cost " + std::to_string(plan.total_cost) +
                                     " does not match its masks (" + std::to_string(plan.recompute_cost()) + ")");
}

PlanAdversary::PlanAdversary(AttackPlan plan) : plan_(std::move(plan)) {
    for (const auto& e : plan_.masks) {
        auto key = std::make_pair(e.chunk, static_cast<int>(e.speaker));
        if (!lookup_.emplace(key, e.mask).second)
            throw AdversaryProtocolError("plan has two masks for chunk " + std::to_string(e.chunk));
    }
}

BitWord PlanAdversary::choose_mask(const MessageView& view) {
    auto it = lookup_.find({view.label.chunk, static_cast<int>(view.speaker)});
    if (it == lookup_.end()) return BitWord(view.sent.size());
    if (it->second.size() != view.sent.size())
        throw AdversaryProtocolError("plan mask for chunk " + std::to_string(view.label.chunk) +
                                     " does not fit the message");
    return it->second;
}

// ---------------------------------------------------------------------------

namespace {

/// Alice's messages when every Bob message arrives fully erased.
std::vector<BitWord> alice_alone(const Protocol& protocol, const BitWord& x) {
    const auto& sched = protocol.schedule();
    auto alice = protocol.make_alice(x);
    std::vector<BitWord> out;
    std::optional<ErasedWord> heard;
    for (std::size_t k = 0; k < sched.chunk_count; ++k) {
        out.push_back(alice->step(heard, sched.label(k)));
        heard = ErasedWord::all_erased(sched.bob_length);
    }
    return out;
}

} // namespace

ConfusionVerdict erasure_confusion_attack(const SessionConfig& cfg) {
    auto protocol = make_protocol(cfg);
    const auto& sched = protocol->schedule();
    const auto inputs = all_inputs(cfg.n);
    if (inputs.size() < 2) throw InvalidInput("need at least two inputs");

    ConfusionVerdict v;
    v.bob_fraction = sched.bob_fraction();
    v.erase_bob_branch = v.bob_fraction <= Rational(1, 3);
    AttackPlan& plan = v.plan;

    if (v.erase_bob_branch) {
        std::vector<std::vector<BitWord>> transcripts;
        for (const auto& x : inputs) transcripts.push_back(alice_alone(*protocol, x));
        std::size_t best = SIZE_MAX;
        std::size_t bi = 0, bj = 1;
        for (std::size_t i = 0; i < inputs.size(); ++i)
            for (std::size_t j = i + 1; j < inputs.size(); ++j) {
                std::size_t d = 0;
                for (std::size_t k = 0; k < sched.chunk_count; ++k) d += hamming(transcripts[i][k], transcripts[j][k]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        v.input_a = inputs[bi];
        v.input_b = inputs[bj];
        v.distance = best;
        for (std::size_t k = 0; k < sched.chunk_count; ++k) {
            const BitWord& a = transcripts[bi][k];
            const BitWord& b = transcripts[bj][k];
            BitWord mask(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) mask.set(i, a[i] != b[i]);
            if (mask.weight()) plan.masks.push_back({k, Speaker::Alice, mask});
            plan.masks.push_back({k, Speaker::Bob, full_mask(sched.bob_length)});
        }
        v.bound = (Rational(1) + v.bob_fraction) / 2;
        plan.description = "erase every Bob message and the positions where Alice's " + v.input_a.to_string() +
                           " and " + v.input_b.to_string() + " transcripts differ";
    } else {
        v.input_a = inputs[0];
        v.input_b = inputs[1];
        for (std::size_t k = 0; k < sched.chunk_count; ++k)
            plan.masks.push_back({k, Speaker::Alice, full_mask(sched.alice_length)});
        v.bound = Rational(1) - v.bob_fraction;
        plan.description = "erase every Alice message";
    }
    plan.total_cost = plan.recompute_cost();
    plan.params = {{"protocol", protocol->name()},
                   {"n", cfg.n},
                   {"epsilon", to_string(cfg.epsilon)},
                   {"m", cfg.m},
                   {"code_epsilon", to_string(cfg.code_epsilon)},
                   {"seed", cfg.seed}};
    v.cost_fraction = Rational(static_cast<std::int64_t>(plan.total_cost), static_cast<std::int64_t>(sched.total_rounds));

    PlanAdversary adv_a(plan), adv_b(plan);
    const SessionResult ra = run_session(protocol, v.input_a, adv_a);
    const SessionResult rb = run_session(protocol, v.input_b, adv_b);
    v.views_identical = ra.bob_view() == rb.bob_view();
    v.output_a = ra.bob_output;
    v.output_b = rb.bob_output;
    v.fooled = !ra.success || !rb.success;
    return v;
}

} // namespace iecc

#include "iecc/search.hpp"

#include "iecc/errors.hpp"

#include <algorithm>
#include <random>

namespace iecc {

namespace {

struct Node {
    Session session;
    ChunkActionAdversary adversary;
    std::vector<ChunkAction> actions;
};

std::size_t floor_rounds(const Rational& budget, std::size_t total) {
    if (budget <= 0) return 0;
    const Rational exact = budget * static_cast<std::int64_t>(total);
    return std::min<std::size_t>(total, static_cast<std::size_t>(exact.numerator() / exact.denominator()));
}

void finish_passing(Node& node) {
    while (!node.session.done()) {
        node.adversary.set_next(ChunkAction::pass());
        node.session.step_chunk(node.adversary);
        node.actions.push_back(ChunkAction::pass());
    }
}

class Searcher {
public:
    Searcher(const SessionConfig& cfg, Rational budget, const SearchMethod& method)
        : cfg_(cfg), budget_(budget), method_(method), protocol_(make_protocol(cfg)) {
        const auto& sched = protocol_->schedule();
        result_.budget_rounds = floor_rounds(budget, sched.total_rounds);
        depth_ = method.depth == 0 ? sched.chunk_count : std::min(method.depth, sched.chunk_count);
    }

    SearchResult run() {
        const auto inputs = all_inputs(cfg_.n);
        if (method_.kind == SearchMethod::Kind::Exhaustive) {
            const double menu = static_cast<double>(action_menu(inputs[0]).size());
            double tree = static_cast<double>(inputs.size());
            for (std::size_t d = 0; d < depth_; ++d) tree *= menu;
            if (tree > static_cast<double>(method_.node_cap))
                throw SearchSpaceTooLarge("exhaustive search over " + std::to_string(depth_) + " chunks needs about " +
                                          std::to_string(static_cast<std::uint64_t>(tree)) + " leaves, cap is " +
                                          std::to_string(method_.node_cap));
            result_.scope = "exhaustive over chunk actions, depth " + std::to_string(depth_);
            for (const auto& x : inputs) {
                Node root{Session(protocol_, x), ChunkActionAdversary{}, {}};
                if (dfs(root)) break;
            }
        } else {
            result_.scope = "beam search, width " + std::to_string(method_.beam_width) + ", seed " +
                            std::to_string(method_.seed) + " (evidence only)";
            std::mt19937_64 rng(method_.seed);
            for (const auto& x : inputs)
                if (beam(x, rng)) break;
        }
        return result_;
    }

private:
    bool over_budget(const Node& node) const { return node.session.erased_rounds() > result_.budget_rounds; }

    /// Records `node` as a success for the adversary if its run ends wrong.
    bool settle(Node& node) {
        finish_passing(node);
        SessionResult r = node.session.result();
        if (r.success) return false;
        std::string desc;
        for (std::size_t k = 0; k < node.actions.size(); ++k) desc += (k ? "," : "") + to_string(node.actions[k]);
        AttackPlan plan = AttackPlan::from_transcript(r, desc);
        plan.params = {{"protocol", protocol_->name()},
                       {"n", cfg_.n},
                       {"epsilon", to_string(cfg_.epsilon)},
                       {"m", cfg_.m},
                       {"code_epsilon", to_string(cfg_.code_epsilon)},
                       {"seed", cfg_.seed},
                       {"budget", to_string(budget_)},
                       {"input", r.input_x.to_string()}};
        result_.plan = std::move(plan);
        result_.fooled_input = r.input_x;
        result_.wrong_output = r.bob_output;
        result_.actions = node.actions;
        return true;
    }

    /// True when the node is decided: a wrong commitment wins, a right one can
    /// never be overturned.
    std::optional<bool> decided(Node& node) {
        const auto& fixed = node.session.bob().committed();
        if (!fixed) return std::nullopt;
        if (*fixed == node.session.input()) return false;
        return settle(node);
    }

    bool dfs(Node& node) {
        ++result_.nodes;
        if (over_budget(node)) return false;
        if (auto d = decided(node)) return *d;
        if (node.session.done() || node.session.next_chunk() >= depth_) return settle(node);
        for (const auto& action : action_menu(node.session.input())) {
            Node child = node;
            child.adversary.set_next(action);
            child.session.step_chunk(child.adversary);
            child.actions.push_back(action);
            if (dfs(child)) return true;
        }
        return false;
    }

    bool beam(const BitWord& x, std::mt19937_64& rng) {
        std::vector<Node> frontier;
        frontier.push_back({Session(protocol_, x), ChunkActionAdversary{}, {}});
        const auto menu = action_menu(x);
        for (std::size_t level = 0; level < depth_ && !frontier.empty(); ++level) {
            std::vector<std::pair<std::uint64_t, Node>> next;
            for (const auto& node : frontier)
                for (const auto& action : menu) {
                    Node child = node;
                    child.adversary.set_next(action);
                    child.session.step_chunk(child.adversary);
                    child.actions.push_back(action);
                    ++result_.nodes;
                    if (over_budget(child)) continue;
                    if (auto d = decided(child)) {
                        if (*d) return true;
                        continue;
                    }
                    next.emplace_back(rng(), std::move(child));
                }
            std::stable_sort(next.begin(), next.end(), [](const auto& a, const auto& b) {
                const auto ca = a.second.session.erased_rounds();
                const auto cb = b.second.session.erased_rounds();
                return ca != cb ? ca < cb : a.first < b.first;
            });
            if (next.size() > method_.beam_width) next.erase(next.begin() + static_cast<std::ptrdiff_t>(method_.beam_width), next.end());
            frontier.clear();
            for (auto& [key, node] : next) frontier.push_back(std::move(node));
        }
        for (auto& node : frontier)
            if (settle(node)) return true;
        return false;
    }

    SessionConfig cfg_;
    Rational budget_;
    SearchMethod method_;
    std::shared_ptr<const Protocol> protocol_;
    std::size_t depth_ = 0;
    SearchResult result_;
};

} // namespace

SearchResult attack_search(const SessionConfig& cfg, Rational budget, const SearchMethod& method) {
    return Searcher(cfg, budget, method).run();
}

} // namespace iecc

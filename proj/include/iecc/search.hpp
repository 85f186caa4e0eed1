#pragma once

#include "iecc/adversaries.hpp"

namespace iecc {

struct SearchMethod {
    enum class Kind { Exhaustive, Beam };
    Kind kind = Kind::Exhaustive;
    /// Chunks searched over; later chunks pass. 0 means every chunk.
    std::size_t depth = 0;
    std::size_t beam_width = 64;
    std::uint64_t seed = 1;
    /// Exhaustive searches whose tree (menu^depth per input) is larger throw
    /// SearchSpaceTooLarge.
    std::uint64_t node_cap = 10'000'000;

    static SearchMethod exhaustive(std::size_t depth = 0) { return {Kind::Exhaustive, depth, 64, 1, 10'000'000}; }
    static SearchMethod beam(std::size_t width, std::uint64_t seed) { return {Kind::Beam, 0, width, seed, 10'000'000}; }
};

struct SearchResult {
    /// Set when some input ends with a wrong output within the budget.
    std::optional<AttackPlan> plan;
    std::optional<BitWord> fooled_input;
    std::optional<BitWord> wrong_output;
    std::vector<ChunkAction> actions;
    std::size_t nodes = 0;
    std::size_t budget_rounds = 0;
    /// Exhaustive runs cover the chunk-action family only; beam runs are evidence.
    std::string scope;
};

/// Searches chunk-action sequences, on every input, for a run whose erasures
/// stay within floor(budget * total_rounds) and whose final output is wrong.
SearchResult attack_search(const SessionConfig& cfg, Rational budget, const SearchMethod& method);

} // namespace iecc

#pragma once

#include "iecc/bits.hpp"

#include <functional>
#include <string>
#include <vector>

namespace iecc {

/// A deterministic chunked protocol over a bit-flip channel. In each chunk
/// Alice speaks `alice_length` bits, then Bob speaks `bob_length` bits.
struct FlipProtocol {
    std::string name;
    std::size_t chunks = 0;
    std::size_t alice_length = 0;
    std::size_t bob_length = 0;
    /// Alice's message for chunk k = heard.size(), given Bob's received messages.
    std::function<BitWord(const BitWord& x, const std::vector<BitWord>& heard)> alice;
    /// Bob's message for chunk k = heard.size() - 1, given Alice's received messages.
    std::function<BitWord(const std::vector<BitWord>& heard)> bob;
    std::function<BitWord(const std::vector<BitWord>& heard)> output;

    std::size_t alice_rounds() const { return chunks * alice_length; }
    std::size_t bob_rounds() const { return chunks * bob_length; }
};

/// Repetition-code strawman: each chunk Alice sends an acknowledgement bit
/// followed by `repetitions` copies of x; Bob answers with the parity of his
/// running majority estimate, repeated `bob_length` times. The acknowledgement
/// is 1 when Bob's last answer matched parity(x).
FlipProtocol strawman_protocol(std::size_t n, std::size_t chunks = 4, std::size_t repetitions = 5,
                               std::size_t bob_length = 2);

struct BitFlipAttack {
    std::size_t i = 0;
    std::size_t j = 0;
    BitWord input_i, input_j;
    /// Alice-to-Bob words Bob receives, one per chunk.
    std::vector<BitWord> to_bob;
    /// Bob-to-Alice words Alice receives, one per chunk.
    std::vector<BitWord> to_alice;
    /// Flips needed when Alice holds input_i (resp. input_j).
    std::size_t cost_i = 0;
    std::size_t cost_j = 0;
    /// Chunks where the two Alice messages differ in an odd number of places.
    std::size_t slack = 0;
    std::size_t alice_rounds = 0;
    std::size_t bob_rounds = 0;
    /// B/2 + A/4 in rounds.
    Rational bound{0};
    /// Average over ordered pairs: B/2 + A*N / (4(N-1)).
    Rational averaging_bound{0};
    bool within_bound = false;
    /// Replay of both inputs gives Bob the same received words.
    bool views_identical = false;
    std::size_t replay_flips_i = 0;
    std::size_t replay_flips_j = 0;
    BitWord output_i, output_j;
    bool fooled = false;
};

/// Builds the pairwise-halfway transcript attack against `protocol` over the
/// given inputs and replays it on both chosen inputs. Throws InvalidInput for
/// fewer than two or duplicate inputs, and NonDeterministicMachine when the
/// replay diverges from the generated transcript.
BitFlipAttack bitflip_attack(const FlipProtocol& protocol, const std::vector<BitWord>& inputs);

} // namespace iecc

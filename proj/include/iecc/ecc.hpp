#pragma once

#include "iecc/bits.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace iecc {

/// A decoding candidate: a codebook index, or the k-th extra word supplied to
/// the decoder. Codebook indices order before extra words.
struct Candidate {
    enum class Kind : std::uint8_t { Codeword, Extra };
    Kind kind = Kind::Codeword;
    std::size_t index = 0;

    static Candidate codeword(std::size_t i) { return {Kind::Codeword, i}; }
    static Candidate extra(std::size_t k) { return {Kind::Extra, k}; }
    bool is_codeword() const { return kind == Kind::Codeword; }

    friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

std::string to_string(const Candidate& c);

/// Equal-length words with certified pairwise distance and distance from a
/// forbidden set. Immutable once built.
class Codebook {
public:
    Codebook() = default;
    /// Wraps explicit words; no distance check happens here (see verify_distance).
    Codebook(std::vector<BitWord> words, Rational epsilon, std::vector<BitWord> forbidden,
             std::uint64_t seed = 0);

    std::size_t count() const { return words_.size(); }
    std::size_t length() const { return length_; }
    const Rational& epsilon() const { return epsilon_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<BitWord>& words() const { return words_; }
    const std::vector<BitWord>& forbidden() const { return forbidden_; }

    /// ceil((1/2 - epsilon) * length)
    std::size_t required_distance() const;
    /// floor((1/4 + 3/2 epsilon) * length)
    std::size_t allowed_triple_overlap() const;
    /// (3/4 - 3/2 epsilon): received words with at least this fraction erased
    /// are not decoded by the protocols.
    Rational decode_erasure_threshold() const;

    friend bool operator==(const Codebook&, const Codebook&) = default;

private:
    std::vector<BitWord> words_;
    std::size_t length_ = 0;
    Rational epsilon_{0};
    std::vector<BitWord> forbidden_;
    std::uint64_t seed_ = 0;
};

/// Seeded randomized greedy construction followed by a certification pass.
/// Deterministic in its arguments. Throws ConstructionFailed.
Codebook build_codebook(std::size_t message_count, std::size_t length, const Rational& epsilon,
                        const std::vector<BitWord>& forbidden, std::uint64_t seed);

/// Throws IndexOutOfRange.
const BitWord& encode(const Codebook& cb, std::size_t index);

/// All candidates consistent with `received`, codewords ascending then extras
/// in declaration order. Throws LengthMismatch.
std::vector<Candidate> erasure_list_decode(const Codebook& cb, const ErasedWord& received,
                                           const std::vector<BitWord>& extra_words = {});

struct TripleMode {
    bool exhaustive = true;
    std::size_t samples = 0;
    std::uint64_t seed = 0;

    static TripleMode all() { return {}; }
    static TripleMode sampled(std::size_t count, std::uint64_t seed) { return {false, count, seed}; }
    /// Exhaustive below 200 words, otherwise 200000 seeded samples.
    static TripleMode automatic(std::size_t word_count);
};

struct DistanceReport {
    std::size_t min_pairwise = 0;
    std::size_t min_forbidden = 0;
    std::size_t max_triple_overlap = 0;
    /// 0 when exhaustive.
    std::size_t triple_samples = 0;
    bool triple_exhaustive = true;
    bool certified = false;
};

/// Recomputes the distance profile. Triples range over codewords and forbidden
/// words together, since both are decoding candidates. A single-word codebook
/// reports min_pairwise = length.
DistanceReport verify_distance(const Codebook& cb, TripleMode mode);
DistanceReport verify_distance(const Codebook& cb);

/// Text format: header `iecc-codebook v1 count=<c> length=<p> epsilon=<e> seed=<s>`,
/// one 0/1 word per line, then `forbidden:` and the forbidden words.
void write_codebook(std::ostream& os, const Codebook& cb);
Codebook read_codebook(std::istream& is);

} // namespace iecc

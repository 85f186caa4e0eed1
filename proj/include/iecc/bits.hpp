#pragma once

#include <boost/dynamic_bitset.hpp>
#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iecc {

using Rational = boost::rational<std::int64_t>;

/// Parses "p/q", an integer, or a finite decimal ("0.25") into an exact rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

/// Fixed-length word over {0, 1}. Index 0 is the leftmost character of the
/// string form.
class BitWord {
public:
    BitWord() = default;
    explicit BitWord(std::size_t length, bool value = false);

    static BitWord from_string(std::string_view text);
    static BitWord constant(std::size_t length, bool bit) { return BitWord(length, bit); }
    /// `pattern` repeated `times` times, e.g. repeat("011", 8) = (011)^8.
    static BitWord repeat(std::string_view pattern, std::size_t times);
    /// Big-endian bits of `value`: bit 0 of the word is the most significant.
    static BitWord from_uint(std::uint64_t value, std::size_t length);

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, bool value) { bits_[i] = value; }
    std::size_t weight() const { return bits_.count(); }
    std::uint64_t to_uint() const;

    std::string to_string() const;
    const boost::dynamic_bitset<std::uint64_t>& bits() const { return bits_; }

    BitWord concat(const BitWord& tail) const;

    friend bool operator==(const BitWord& a, const BitWord& b) { return a.bits_ == b.bits_; }
    /// Strict weak order: shorter words first, then by string form.
    friend bool operator<(const BitWord& a, const BitWord& b);

private:
    boost::dynamic_bitset<std::uint64_t> bits_;
};

/// Hamming distance. Throws LengthMismatch on unequal lengths.
std::size_t hamming(const BitWord& a, const BitWord& b);

/// Number of positions where all three words agree.
std::size_t triple_overlap(const BitWord& a, const BitWord& b, const BitWord& c);

/// Word over {0, 1, erased}. Erased positions carry a 0 in the bit plane.
class ErasedWord {
public:
    ErasedWord() = default;

    /// Applies an erasure mask (1 = erased) to a sent word.
    static ErasedWord deliver(const BitWord& sent, const BitWord& mask);
    static ErasedWord clean(const BitWord& sent);
    static ErasedWord all_erased(std::size_t length);
    /// '0', '1', and '_' for an erased symbol.
    static ErasedWord from_string(std::string_view text);

    std::size_t size() const { return bits_.size(); }
    std::size_t erasure_count() const { return erased_.weight(); }
    bool is_erased(std::size_t i) const { return erased_[i]; }
    std::optional<bool> symbol(std::size_t i) const;
    /// Rightmost non-erased symbol, if any.
    std::optional<bool> last_symbol() const;

    const BitWord& bits() const { return bits_; }
    const BitWord& mask() const { return erased_; }
    std::string to_string() const;

    friend bool operator==(const ErasedWord&, const ErasedWord&) = default;

private:
    BitWord bits_;
    BitWord erased_;
};

/// True iff every non-erased symbol of `received` equals the matching bit of `word`.
bool consistent(const BitWord& word, const ErasedWord& received);

/// erased >= fraction * length, evaluated exactly.
bool erased_at_least(std::size_t erased, std::size_t length, const Rational& fraction);

} // namespace iecc

#include "iecc/bits.hpp"

#include "iecc/errors.hpp"

#include <charconv>

namespace iecc {

namespace {

std::int64_t parse_int(std::string_view text) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ParseError("not an integer: '" + std::string(text) + "'");
    return value;
}

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b)
        throw LengthMismatch("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

} // namespace

Rational parse_rational(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto den = parse_int(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        return Rational(parse_int(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        bool negative = !text.empty() && text.front() == '-';
        auto whole_part = text.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
        auto frac_part = text.substr(dot + 1);
        if (frac_part.size() > 15) throw ParseError("too many decimals in '" + std::string(text) + "'");
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
        std::int64_t whole = whole_part.empty() ? 0 : parse_int(whole_part);
        std::int64_t frac = frac_part.empty() ? 0 : parse_int(frac_part);
        if (whole < 0 || frac < 0) throw ParseError("malformed decimal '" + std::string(text) + "'");
        Rational r(whole * scale + frac, scale);
        return negative ? -r : r;
    }
    return Rational(parse_int(text));
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

BitWord::BitWord(std::size_t length, bool value) : bits_(length) {
    if (value) bits_.set();
}

BitWord BitWord::from_string(std::string_view text) {
    BitWord w(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1')
            w.bits_[i] = true;
        else if (text[i] != '0')
            throw ParseError("invalid bit character '" + std::string(1, text[i]) + "'");
    }
    return w;
}

BitWord BitWord::repeat(std::string_view pattern, std::size_t times) {
    std::string s;
    s.reserve(pattern.size() * times);
    for (std::size_t t = 0; t < times; ++t) s.append(pattern);
    return from_string(s);
}

BitWord BitWord::from_uint(std::uint64_t value, std::size_t length) {
    BitWord w(length);
    for (std::size_t i = 0; i < length; ++i) w.bits_[length - 1 - i] = (value >> i) & 1U;
    return w;
}

std::uint64_t BitWord::to_uint() const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < size(); ++i) v = (v << 1) | static_cast<std::uint64_t>(bits_[i]);
    return v;
}

std::string BitWord::to_string() const {
    std::string s(size(), '0');
    for (std::size_t i = 0; i < size(); ++i)
        if (bits_[i]) s[i] = '1';
    return s;
}

BitWord BitWord::concat(const BitWord& tail) const {
    BitWord out(size() + tail.size());
    for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i];
    for (std::size_t i = 0; i < tail.size(); ++i) out.bits_[size() + i] = tail.bits_[i];
    return out;
}

bool operator<(const BitWord& a, const BitWord& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return !a[i];
    return false;
}

std::size_t hamming(const BitWord& a, const BitWord& b) {
    require_same_length(a.size(), b.size());
    return (a.bits() ^ b.bits()).count();
}

std::size_t triple_overlap(const BitWord& a, const BitWord& b, const BitWord& c) {
    require_same_length(a.size(), b.size());
    require_same_length(a.size(), c.size());
    auto differs = (a.bits() ^ b.bits()) | (a.bits() ^ c.bits());
    return a.size() - differs.count();
}

ErasedWord ErasedWord::deliver(const BitWord& sent, const BitWord& mask) {
    require_same_length(sent.size(), mask.size());
    ErasedWord w;
    w.bits_ = sent;
    for (std::size_t i = 0; i < sent.size(); ++i)
        if (mask[i]) w.bits_.set(i, false);
    w.erased_ = mask;
    return w;
}

ErasedWord ErasedWord::clean(const BitWord& sent) { return deliver(sent, BitWord(sent.size())); }

ErasedWord ErasedWord::all_erased(std::size_t length) {
    ErasedWord w;
    w.bits_ = BitWord(length);
    w.erased_ = BitWord(length, true);
    return w;
}

ErasedWord ErasedWord::from_string(std::string_view text) {
    ErasedWord w;
    w.bits_ = BitWord(text.size());
    w.erased_ = BitWord(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        switch (text[i]) {
        case '0': break;
        case '1': w.bits_.set(i, true); break;
        case '_': w.erased_.set(i, true); break;
        default: throw ParseError("invalid symbol '" + std::string(1, text[i]) + "'");
        }
    }
    return w;
}

std::optional<bool> ErasedWord::symbol(std::size_t i) const {
    if (erased_[i]) return std::nullopt;
    return bits_[i];
}

std::optional<bool> ErasedWord::last_symbol() const {
    for (std::size_t i = size(); i-- > 0;)
        if (!erased_[i]) return bits_[i];
    return std::nullopt;
}

std::string ErasedWord::to_string() const {
    std::string s(size(), '0');
    for (std::size_t i = 0; i < size(); ++i) {
        if (erased_[i])
            s[i] = '_';
        else if (bits_[i])
            s[i] = '1';
    }
    return s;
}

bool consistent(const BitWord& word, const ErasedWord& received) {
    require_same_length(word.size(), received.size());
    return (word.bits() ^ received.bits().bits()).is_subset_of(received.mask().bits());
}

bool erased_at_least(std::size_t erased, std::size_t length, const Rational& fraction) {
    return Rational(static_cast<std::int64_t>(erased)) >= fraction * static_cast<std::int64_t>(length);
}

} // namespace iecc

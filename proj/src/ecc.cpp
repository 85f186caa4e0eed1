#include "iecc/ecc.hpp"

#include "iecc/errors.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace iecc {

namespace {

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
    auto q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t num, std::int64_t den) { return -floor_div(-num, den); }

std::size_t clamp_nonneg(std::int64_t v) { return v < 0 ? 0 : static_cast<std::size_t>(v); }

BitWord random_word(std::mt19937_64& rng, std::size_t length) {
    BitWord w(length);
    std::uint64_t chunk = 0;
    for (std::size_t i = 0; i < length; ++i) {
        if (i % 64 == 0) chunk = rng();
        w.set(i, (chunk >> (i % 64)) & 1U);
    }
    return w;
}

constexpr std::size_t kDrawsPerWord = 20000;
constexpr std::size_t kRestarts = 16;

} // namespace

std::string to_string(const Candidate& c) {
    return (c.is_codeword() ? "c" : "e") + std::to_string(c.index);
}

Codebook::Codebook(std::vector<BitWord> words, Rational epsilon, std::vector<BitWord> forbidden,
                   std::uint64_t seed)
    : words_(std::move(words)), epsilon_(epsilon), forbidden_(std::move(forbidden)), seed_(seed) {
    length_ = words_.empty() ? (forbidden_.empty() ? 0 : forbidden_.front().size()) : words_.front().size();
    for (const auto& w : words_)
        if (w.size() != length_) throw LengthMismatch("codebook words must share one length");
    for (const auto& f : forbidden_)
        if (f.size() != length_) throw LengthMismatch("forbidden words must match the codeword length");
}

std::size_t Codebook::required_distance() const {
    Rational target = (Rational(1, 2) - epsilon_) * static_cast<std::int64_t>(length_);
    return clamp_nonneg(ceil_div(target.numerator(), target.denominator()));
}

std::size_t Codebook::allowed_triple_overlap() const {
    Rational bound = (Rational(1, 4) + Rational(3, 2) * epsilon_) * static_cast<std::int64_t>(length_);
    return clamp_nonneg(floor_div(bound.numerator(), bound.denominator()));
}

Rational Codebook::decode_erasure_threshold() const { return Rational(3, 4) - Rational(3, 2) * epsilon_; }

Codebook build_codebook(std::size_t message_count, std::size_t length, const Rational& epsilon,
                        const std::vector<BitWord>& forbidden, std::uint64_t seed) {
    if (length == 0) throw ConstructionFailed("codeword length must be positive");
    for (const auto& f : forbidden)
        if (f.size() != length) throw LengthMismatch("forbidden word length differs from codeword length");

    const std::size_t need = Codebook(std::vector<BitWord>{BitWord(length)}, epsilon, {}, seed).required_distance();

    std::mt19937_64 rng(seed);
    for (std::size_t attempt = 0; attempt < kRestarts; ++attempt) {
        std::vector<BitWord> accepted;
        accepted.reserve(message_count);
        bool stuck = false;
        while (accepted.size() < message_count && !stuck) {
            stuck = true;
            for (std::size_t draw = 0; draw < kDrawsPerWord; ++draw) {
                BitWord candidate = random_word(rng, length);
                auto far = [&](const BitWord& other) { return hamming(candidate, other) >= need; };
                // Distinct words are required even when the distance target is 0.
                auto distinct = [&](const BitWord& other) { return !(candidate == other); };
                if (std::all_of(accepted.begin(), accepted.end(), far) &&
                    std::all_of(accepted.begin(), accepted.end(), distinct) &&
                    std::all_of(forbidden.begin(), forbidden.end(), far) &&
                    std::all_of(forbidden.begin(), forbidden.end(), distinct)) {
                    accepted.push_back(std::move(candidate));
                    stuck = false;
                    break;
                }
            }
        }
        if (accepted.size() < message_count) continue;

        Codebook cb(std::move(accepted), epsilon, forbidden, seed);
        if (verify_distance(cb).certified) return cb;
    }
    throw ConstructionFailed("could not place " + std::to_string(message_count) + " words of length " +
                             std::to_string(length) + " at epsilon " + to_string(epsilon));
}

const BitWord& encode(const Codebook& cb, std::size_t index) {
    if (index >= cb.count())
        throw IndexOutOfRange("codebook index " + std::to_string(index) + " out of range (count " +
                              std::to_string(cb.count()) + ")");
    return cb.words()[index];
}

std::vector<Candidate> erasure_list_decode(const Codebook& cb, const ErasedWord& received,
                                           const std::vector<BitWord>& extra_words) {
    if (received.size() != cb.length())
        throw LengthMismatch("received length " + std::to_string(received.size()) + " vs codeword length " +
                             std::to_string(cb.length()));
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < cb.count(); ++i)
        if (consistent(cb.words()[i], received)) out.push_back(Candidate::codeword(i));
    for (std::size_t k = 0; k < extra_words.size(); ++k)
        if (consistent(extra_words[k], received)) out.push_back(Candidate::extra(k));
    return out;
}

TripleMode TripleMode::automatic(std::size_t word_count) {
    return word_count < 200 ? all() : sampled(200000, 0);
}

DistanceReport verify_distance(const Codebook& cb) {
    return verify_distance(cb, TripleMode::automatic(cb.count() + cb.forbidden().size()));
}

DistanceReport verify_distance(const Codebook& cb, TripleMode mode) {
    DistanceReport r;
    const auto& words = cb.words();
    const std::size_t p = cb.length();

    r.min_pairwise = p;
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j) r.min_pairwise = std::min(r.min_pairwise, hamming(words[i], words[j]));

    r.min_forbidden = p;
    for (const auto& w : words)
        for (const auto& f : cb.forbidden()) r.min_forbidden = std::min(r.min_forbidden, hamming(w, f));

    std::vector<BitWord> pool = words;
    pool.insert(pool.end(), cb.forbidden().begin(), cb.forbidden().end());
    r.max_triple_overlap = 0;
    r.triple_exhaustive = mode.exhaustive;
    if (mode.exhaustive) {
        for (std::size_t a = 0; a < pool.size(); ++a)
            for (std::size_t b = a + 1; b < pool.size(); ++b) {
                auto ab = pool[a].bits() ^ pool[b].bits();
                for (std::size_t c = b + 1; c < pool.size(); ++c) {
                    auto differs = ab | (pool[a].bits() ^ pool[c].bits());
                    r.max_triple_overlap = std::max(r.max_triple_overlap, p - differs.count());
                }
            }
    } else if (pool.size() >= 3) {
        std::mt19937_64 rng(mode.seed);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (std::size_t s = 0; s < mode.samples; ++s) {
            std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
            if (a == b || b == c || a == c) continue;
            r.max_triple_overlap = std::max(r.max_triple_overlap, triple_overlap(pool[a], pool[b], pool[c]));
        }
        r.triple_samples = mode.samples;
    }

    // Exact duplicates never decode uniquely, whatever epsilon says.
    bool distinct = words.size() < 2 || r.min_pairwise > 0;
    bool distinct_forbidden = words.empty() || cb.forbidden().empty() || r.min_forbidden > 0;
    r.certified = distinct && distinct_forbidden && r.min_pairwise >= cb.required_distance() &&
                  r.min_forbidden >= cb.required_distance() &&
                  r.max_triple_overlap <= cb.allowed_triple_overlap();
    return r;
}

void write_codebook(std::ostream& os, const Codebook& cb) {
    os << "iecc-codebook v1 count=" << cb.count() << " length=" << cb.length()
       << " epsilon=" << to_string(cb.epsilon()) << " seed=" << cb.seed() << "\n";
    for (const auto& w : cb.words()) os << w.to_string() << "\n";
    os << "forbidden:\n";
    for (const auto& f : cb.forbidden()) os << f.to_string() << "\n";
}

Codebook read_codebook(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty codebook file");
    std::istringstream header(line);
    std::string magic, version;
    header >> magic >> version;
    if (magic != "iecc-codebook" || version != "v1") throw ParseError("not an iecc-codebook v1 file");

    std::size_t count = 0, length = 0;
    Rational epsilon{0};
    std::uint64_t seed = 0;
    bool have_count = false, have_length = false, have_eps = false;
    std::string field;
    while (header >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw ParseError("malformed header field '" + field + "'");
        auto key = field.substr(0, eq);
        auto value = field.substr(eq + 1);
        if (key == "count") {
            count = std::stoull(value);
            have_count = true;
        } else if (key == "length") {
            length = std::stoull(value);
            have_length = true;
        } else if (key == "epsilon") {
            epsilon = parse_rational(value);
            have_eps = true;
        } else if (key == "seed") {
            seed = std::stoull(value);
        } else {
            throw ParseError("unknown header field '" + key + "'");
        }
    }
    if (!have_count || !have_length || !have_eps) throw ParseError("codebook header is missing fields");

    std::vector<BitWord> words, forbidden;
    bool in_forbidden = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line == "forbidden:") {
            in_forbidden = true;
            continue;
        }
        auto w = BitWord::from_string(line);
        if (w.size() != length) throw ParseError("word length disagrees with header");
        (in_forbidden ? forbidden : words).push_back(std::move(w));
    }
    if (words.size() != count) throw ParseError("word count disagrees with header");
    return Codebook(std::move(words), epsilon, std::move(forbidden), seed);
}

} // namespace iecc

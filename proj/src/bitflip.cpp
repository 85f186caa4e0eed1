#include "iecc/bitflip.hpp"

#include "iecc/errors.hpp"

#include <algorithm>
#include <set>

namespace iecc {

namespace {

bool majority_bit(const std::vector<bool>& votes) {
    const auto ones = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), true));
    return 2 * ones > votes.size();
}

BitWord parity_estimate(const std::vector<BitWord>& heard, std::size_t n, std::size_t repetitions) {
    BitWord estimate(n);
    for (std::size_t b = 0; b < n; ++b) {
        std::vector<bool> votes;
        for (const auto& msg : heard)
            for (std::size_t r = 0; r < repetitions; ++r) votes.push_back(msg[1 + r * n + b]);
        estimate.set(b, majority_bit(votes));
    }
    return estimate;
}

/// Agrees with both words where they agree; on the differing positions takes
/// `a`'s bit at even occurrences and `b`'s at odd ones, so it lies within
/// floor(d/2) of `a` and ceil(d/2) of `b`.
BitWord halfway(const BitWord& a, const BitWord& b) {
    BitWord out = a;
    std::size_t seen = 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (a[p] == b[p]) continue;
        if (seen % 2 == 1) out.set(p, b[p]);
        ++seen;
    }
    return out;
}

} // namespace

FlipProtocol strawman_protocol(std::size_t n, std::size_t chunks, std::size_t repetitions, std::size_t bob_length) {
    if (n == 0 || chunks == 0 || repetitions == 0 || bob_length == 0)
        throw InvalidConfig("strawman needs positive n, chunks, repetitions and bob_length");
    FlipProtocol p;
    p.name = "repetition_strawman";
    p.chunks = chunks;
    p.alice_length = 1 + repetitions * n;
    p.bob_length = bob_length;
    p.alice = [n, repetitions](const BitWord& x, const std::vector<BitWord>& heard) {
        bool ack = false;
        if (!heard.empty()) {
            const BitWord& last = heard.back();
            std::vector<bool> votes;
            for (std::size_t k = 0; k < last.size(); ++k) votes.push_back(last[k]);
            ack = majority_bit(votes) == (x.weight() % 2 == 1);
        }
        BitWord msg(1 + repetitions * n);
        msg.set(0, ack);
        for (std::size_t r = 0; r < repetitions; ++r)
            for (std::size_t b = 0; b < n; ++b) msg.set(1 + r * n + b, x[b]);
        return msg;
    };
    p.bob = [n, repetitions, bob_length](const std::vector<BitWord>& heard) {
        return BitWord(bob_length, parity_estimate(heard, n, repetitions).weight() % 2 == 1);
    };
    p.output = [n, repetitions](const std::vector<BitWord>& heard) { return parity_estimate(heard, n, repetitions); };
    return p;
}

BitFlipAttack bitflip_attack(const FlipProtocol& protocol, const std::vector<BitWord>& inputs) {
    const std::size_t N = inputs.size();
    if (N < 2) throw InvalidInput("the attack needs at least two inputs");
    {
        std::set<std::string> seen;
        for (const auto& x : inputs)
            if (!seen.insert(x.to_string()).second) throw InvalidInput("duplicate input " + x.to_string());
    }

    // Per ordered pair (i, j), i != j: the words Bob has received so far.
    std::vector<std::vector<std::vector<BitWord>>> bob_heard(N, std::vector<std::vector<BitWord>>(N));
    std::vector<std::vector<std::size_t>> cost(N, std::vector<std::size_t>(N, 0));
    std::vector<std::vector<std::size_t>> odd(N, std::vector<std::size_t>(N, 0));
    std::vector<BitWord> to_alice;

    for (std::size_t k = 0; k < protocol.chunks; ++k) {
        std::vector<BitWord> sent(N);
        for (std::size_t i = 0; i < N; ++i) {
            sent[i] = protocol.alice(inputs[i], to_alice);
            if (sent[i].size() != protocol.alice_length) throw Error("Alice message has the wrong length");
        }
        std::vector<std::vector<BitWord>> bob_msg(N, std::vector<BitWord>(N));
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) {
                if (i == j) continue;
                const BitWord r = halfway(sent[i], sent[j]);
                cost[i][j] += hamming(r, sent[i]);
                odd[i][j] += hamming(sent[i], sent[j]) % 2;
                bob_heard[i][j].push_back(r);
                bob_msg[i][j] = protocol.bob(bob_heard[i][j]);
                if (bob_msg[i][j].size() != protocol.bob_length) throw Error("Bob message has the wrong length");
            }
        BitWord s(protocol.bob_length);
        for (std::size_t p = 0; p < protocol.bob_length; ++p) {
            std::size_t ones = 0;
            for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = 0; j < N; ++j)
                    if (i != j && bob_msg[i][j][p]) ++ones;
            s.set(p, 2 * ones > N * (N - 1));
        }
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                if (i != j) cost[i][j] += hamming(s, bob_msg[i][j]);
        to_alice.push_back(s);
    }

    BitFlipAttack out;
    std::size_t best = SIZE_MAX;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (i != j && cost[i][j] < best) {
                best = cost[i][j];
                out.i = i;
                out.j = j;
            }
    out.input_i = inputs[out.i];
    out.input_j = inputs[out.j];
    out.to_bob = bob_heard[out.i][out.j];
    out.to_alice = to_alice;
    out.cost_i = best;
    out.slack = odd[out.i][out.j];
    out.cost_j = best + out.slack;
    out.alice_rounds = protocol.alice_rounds();
    out.bob_rounds = protocol.bob_rounds();
    const auto A = static_cast<std::int64_t>(out.alice_rounds);
    const auto B = static_cast<std::int64_t>(out.bob_rounds);
    const auto NN = static_cast<std::int64_t>(N);
    out.bound = Rational(B, 2) + Rational(A, 4);
    out.averaging_bound = Rational(B, 2) + Rational(A * NN, 4 * (NN - 1));
    out.within_bound = Rational(static_cast<std::int64_t>(out.cost_i)) <= out.bound + static_cast<std::int64_t>(out.slack);

    // Replay each side as a real flip attack.
    auto replay = [&](const BitWord& x, std::size_t& flips) {
        std::vector<BitWord> alice_heard, bob_received;
        flips = 0;
        for (std::size_t k = 0; k < protocol.chunks; ++k) {
            const BitWord a = protocol.alice(x, alice_heard);
            flips += hamming(a, out.to_bob[k]);
            bob_received.push_back(out.to_bob[k]);
            const BitWord b = protocol.bob(bob_received);
            flips += hamming(b, out.to_alice[k]);
            alice_heard.push_back(out.to_alice[k]);
        }
        return bob_received;
    };
    const auto view_i = replay(out.input_i, out.replay_flips_i);
    const auto view_j = replay(out.input_j, out.replay_flips_j);
    if (out.replay_flips_i != out.cost_i || out.replay_flips_j != out.cost_j)
        throw NonDeterministicMachine("replayed flip counts differ from the generated transcript");
    out.views_identical = view_i == view_j;
    out.output_i = protocol.output(view_i);
    out.output_j = protocol.output(view_j);
    out.fooled = !(out.output_i == out.input_i) || !(out.output_j == out.input_j);
    return out;
}

} // namespace iecc

// Command-line front end: run sessions, sweep budgets, generate attacks and
// manage codebooks.

#include "iecc/adversaries.hpp"
#include "iecc/bitflip.hpp"
#include "iecc/errors.hpp"
#include "iecc/protocol35.hpp"
#include "iecc/protocol611.hpp"
#include "iecc/search.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace iecc;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAttack = 3;
constexpr int kExitConstruction = 4;

/// Errors raised by attack generators; mapped to their own exit status.
struct AttackFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string protocol = "611";
    std::optional<std::size_t> n;
    std::optional<std::string> epsilon;
    std::optional<std::size_t> m;
    std::optional<std::string> code_epsilon;
    std::optional<std::uint64_t> seed;

    SessionConfig config() const {
        SessionConfig cfg = default_config(parse_protocol(protocol));
        if (n) cfg.n = *n;
        if (epsilon) cfg.epsilon = parse_rational(*epsilon);
        if (m) cfg.m = *m;
        if (code_epsilon) cfg.code_epsilon = parse_rational(*code_epsilon);
        if (seed) cfg.seed = *seed;
        validate(cfg);
        return cfg;
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InvalidConfig("cannot write '" + path + "'");
    return os;
}

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? sep : "") + items[i];
    return s;
}

ChunkAction parse_action(const std::string& text) {
    auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    if (name == "pass") return ChunkAction::pass();
    if (name == "blind_alice") return ChunkAction::blind_alice();
    if (name == "blind_bob") return ChunkAction::blind_bob();
    if (colon == std::string::npos) throw InvalidConfig("action '" + text + "' needs a decoy input, e.g. confuse:01");
    BitWord decoy = BitWord::from_string(text.substr(colon + 1));
    if (name == "confuse") return ChunkAction::confuse(decoy);
    if (name == "blind_bob_and_confuse") return ChunkAction::blind_bob_and_confuse(decoy);
    throw InvalidConfig("unknown chunk action '" + name + "'");
}

// --- run -------------------------------------------------------------------

struct RunOptions {
    std::string adversary = "null";
    std::string budget = "0";
    std::string x;
    std::string inputs;
    std::size_t sample_count = 4;
    std::uint64_t sample_seed = 1;
    std::string actions;
    std::uint64_t action_seed = 1;
    std::string plan;
    std::string trace;
    std::string trace_dir;
};

std::vector<BitWord> run_inputs(const RunOptions& o, const SessionConfig& cfg) {
    std::string mode = o.inputs.empty() ? (o.x.empty() ? "all" : "single") : o.inputs;
    if (mode == "single") {
        if (o.x.empty()) throw InvalidConfig("--inputs single needs --x");
        BitWord x = BitWord::from_string(o.x);
        if (x.size() != cfg.n) throw InvalidConfig("--x has length " + std::to_string(x.size()) + ", n is " +
                                                   std::to_string(cfg.n));
        return {x};
    }
    auto all = all_inputs(cfg.n);
    if (mode == "all") return all;
    if (mode == "sampled") {
        std::mt19937_64 rng(o.sample_seed);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        std::vector<BitWord> out;
        for (std::size_t k = 0; k < o.sample_count; ++k) out.push_back(all[pick(rng)]);
        return out;
    }
    throw InvalidConfig("unknown --inputs mode '" + mode + "' (single, all, sampled)");
}

std::unique_ptr<Adversary> make_adversary(const RunOptions& o, const SessionConfig& cfg, std::size_t chunks) {
    const Rational budget = parse_rational(o.budget);
    if (budget < 0 || budget > 1) throw InvalidConfig("--budget must lie in [0, 1]");
    if (o.adversary == "null") return std::make_unique<NullAdversary>();
    if (o.adversary == "random") return std::make_unique<RandomAdversary>(budget, cfg.seed);
    if (o.adversary == "chunk") {
        std::vector<ChunkAction> actions;
        if (o.actions.empty() || o.actions == "random") {
            actions = random_actions(chunks, cfg.n, o.action_seed);
        } else {
            std::stringstream ss(o.actions);
            for (std::string item; std::getline(ss, item, ',');) actions.push_back(parse_action(item));
            if (actions.size() != chunks)
                throw InvalidConfig("--actions lists " + std::to_string(actions.size()) + " actions for " +
                                    std::to_string(chunks) + " chunks");
        }
        auto inner = std::make_unique<ChunkActionAdversary>(std::move(actions));
        if (o.budget == "0") return inner;
        return std::make_unique<BudgetCapped>(std::move(inner), budget);
    }
    if (o.adversary == "plan") {
        std::ifstream is(o.plan);
        if (!is) throw InvalidConfig("cannot read plan '" + o.plan + "'");
        return std::make_unique<PlanAdversary>(read_plan(is));
    }
    throw InvalidConfig("unknown adversary '" + o.adversary + "' (null, random, chunk, plan)");
}

int cmd_run(const CommonOptions& common, RunOptions o) {
    const SessionConfig cfg = common.config();
    auto protocol = make_protocol(cfg);
    const auto inputs = run_inputs(o, cfg);
    if (o.trace_dir.empty())
        if (const char* env = std::getenv("IECC_TRACE_DIR")) o.trace_dir = env;
    if (!o.trace.empty() && inputs.size() > 1) throw InvalidConfig("--trace takes a single input; use --trace-dir");
    auto prototype = make_adversary(o, cfg, protocol->schedule().chunk_count);
    if (auto* plan = dynamic_cast<PlanAdversary*>(prototype.get()); plan) {
        std::ifstream is(o.plan);
        validate(read_plan(is), protocol->schedule());
    }

    bool all_ok = true;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const BitWord& x = inputs[k];
        auto adversary = prototype->clone();
        SessionOptions opts;
        opts.record_trace = !o.trace.empty() || !o.trace_dir.empty();
        const SessionResult r = run_session(protocol, x, *adversary, opts);
        std::cout << "x=" << x.to_string() << " output=" << r.bob_output.to_string()
                  << " success=" << (r.success ? "true" : "false") << " fraction=" << to_string(r.total_erasure_fraction)
                  << " violations=" << r.invariant_violations.size()
                  << " unique_decode=" << (r.unique_decode ? "true" : "false");
        if (!r.flags.empty()) std::cout << " flags=" << join(r.flags);
        std::cout << '\n';
        for (const auto& v : r.invariant_violations) std::cout << "  violation: " << v << '\n';
        all_ok = all_ok && r.success && r.invariant_violations.empty();

        if (opts.record_trace) {
            std::string path = o.trace;
            if (path.empty()) {
                std::filesystem::create_directories(o.trace_dir);
                path = (std::filesystem::path(o.trace_dir) /
                        ("trace_" + protocol->name() + "_" + x.to_string() + "_" + std::to_string(k) + ".jsonl"))
                           .string();
            }
            auto os = open_out(path);
            write_trace(os, r.trace);
        }
    }
    return all_ok ? 0 : kExitFailure;
}

// --- sweep -----------------------------------------------------------------

struct SweepOptions {
    std::string start = "0";
    std::string stop = "1";
    std::string step = "1/10";
    std::size_t repetitions = 3;
    std::string out;
};

int cmd_sweep(const CommonOptions& common, const SweepOptions& o) {
    const SessionConfig cfg = common.config();
    const Rational start = parse_rational(o.start), stop = parse_rational(o.stop), step = parse_rational(o.step);
    if (step <= 0) throw InvalidConfig("--step must be positive");
    if (start > stop) throw InvalidConfig("empty budget grid: start exceeds stop");
    if (start < 0 || stop > 1) throw InvalidConfig("budgets must lie in [0, 1]");
    if (o.repetitions == 0) throw InvalidConfig("--repetitions must be positive");

    auto protocol = make_protocol(cfg);
    const auto inputs = all_inputs(cfg.n);
    const std::size_t chunks = protocol->schedule().chunk_count;

    std::ostringstream csv;
    csv << "budget,runs,failures,violations,mean_fraction\n";
    for (Rational budget = start; budget <= stop; budget += step) {
        std::size_t runs = 0, failures = 0, violations = 0;
        Rational sum(0);
        for (std::size_t rep = 0; rep < o.repetitions; ++rep) {
            const std::uint64_t s = cfg.seed * 1'000'003ULL + rep;
            for (const auto& x : inputs) {
                RandomAdversary random(budget, s);
                BudgetCapped chunked(std::make_unique<ChunkActionAdversary>(random_actions(chunks, cfg.n, s)), budget);
                for (Adversary* adv : {static_cast<Adversary*>(&random), static_cast<Adversary*>(&chunked)}) {
                    const SessionResult r = run_session(protocol, x, *adv);
                    ++runs;
                    failures += r.success ? 0 : 1;
                    violations += r.invariant_violations.size();
                    sum += r.total_erasure_fraction;
                }
            }
        }
        csv << to_string(budget) << ',' << runs << ',' << failures << ',' << violations << ','
            << to_string(sum / static_cast<std::int64_t>(runs)) << '\n';
    }
    if (o.out.empty()) {
        std::cout << csv.str();
    } else {
        auto os = open_out(o.out);
        os << csv.str();
    }
    return 0;
}

// --- attack ----------------------------------------------------------------

struct AttackOptions {
    std::string kind;
    std::string out;
    // bitflip
    std::string target = "strawman";
    std::size_t chunks = 4;
    std::size_t repetitions = 5;
    std::size_t bob_length = 2;
    std::size_t input_count = 0;
    // search
    std::string budget = "0";
    std::string method = "exhaustive";
    std::size_t depth = 0;
    std::size_t width = 64;
    std::uint64_t search_seed = 1;
};

void emit_plan(const AttackPlan& plan, const std::string& out) {
    if (out.empty()) return;
    auto os = open_out(out);
    write_plan(os, plan);
}

int attack_confusion(const CommonOptions& common, const AttackOptions& o) {
    const SessionConfig cfg = common.config();
    const ConfusionVerdict v = erasure_confusion_attack(cfg);
    const bool within = v.cost_fraction <= v.bound;
    std::cout << "attack=confusion protocol=" << to_string(cfg.protocol) << " bob_fraction=" << to_string(v.bob_fraction)
              << " branch=" << (v.erase_bob_branch ? "erase_bob" : "erase_alice") << '\n'
              << "pair=" << v.input_a.to_string() << "," << v.input_b.to_string() << " distance=" << v.distance
              << " cost=" << v.plan.total_cost << " cost_fraction=" << to_string(v.cost_fraction)
              << " bound=" << to_string(v.bound) << " within_bound=" << (within ? "true" : "false") << '\n'
              << "views_identical=" << (v.views_identical ? "true" : "false") << " outputs="
              << v.output_a.to_string() << "," << v.output_b.to_string() << " fooled=" << (v.fooled ? "true" : "false")
              << '\n';
    emit_plan(v.plan, o.out);
    return v.views_identical && v.fooled ? 0 : kExitFailure;
}

int attack_bitflip(const CommonOptions& common, const AttackOptions& o) {
    if (o.target != "strawman") throw InvalidConfig("unknown bit-flip target '" + o.target + "'");
    const std::size_t n = common.n.value_or(3);
    if (n == 0 || n > 16) throw InvalidConfig("--n must be in [1, 16]");
    const FlipProtocol p = strawman_protocol(n, o.chunks, o.repetitions, o.bob_length);
    auto inputs = all_inputs(n);
    if (o.input_count) {
        if (o.input_count > inputs.size()) throw InvalidConfig("--inputs exceeds 2^n");
        inputs.resize(o.input_count);
    }
    const BitFlipAttack a = bitflip_attack(p, inputs);
    std::cout << "attack=bitflip target=" << p.name << " n=" << n << " inputs=" << inputs.size()
              << " alice_rounds=" << a.alice_rounds << " bob_rounds=" << a.bob_rounds << '\n'
              << "pair=" << a.input_i.to_string() << "," << a.input_j.to_string() << " cost_i=" << a.cost_i
              << " cost_j=" << a.cost_j << " slack=" << a.slack << " bound=" << to_string(a.bound)
              << " averaging_bound=" << to_string(a.averaging_bound)
              << " within_bound=" << (a.within_bound ? "true" : "false") << '\n'
              << "views_identical=" << (a.views_identical ? "true" : "false") << " replay_flips=" << a.replay_flips_i
              << "," << a.replay_flips_j << " outputs=" << a.output_i.to_string() << "," << a.output_j.to_string()
              << " fooled=" << (a.fooled ? "true" : "false") << '\n';
    if (!o.out.empty()) {
        nlohmann::ordered_json j;
        j["pair"] = {a.i, a.j};
        j["inputs"] = {a.input_i.to_string(), a.input_j.to_string()};
        for (std::size_t k = 0; k < a.to_bob.size(); ++k) {
            j["R"].push_back(a.to_bob[k].to_string());
            j["S"].push_back(a.to_alice[k].to_string());
        }
        j["cost_i"] = a.cost_i;
        j["cost_j"] = a.cost_j;
        j["slack"] = a.slack;
        j["bound"] = to_string(a.bound);
        j["views_identical"] = a.views_identical;
        auto os = open_out(o.out);
        os << j.dump() << '\n';
    }
    return a.views_identical && a.within_bound ? 0 : kExitFailure;
}

int attack_search_cmd(const CommonOptions& common, const AttackOptions& o) {
    const SessionConfig cfg = common.config();
    const Rational budget = parse_rational(o.budget);
    if (budget < 0 || budget > 1) throw InvalidConfig("--budget must lie in [0, 1]");
    SearchMethod method;
    if (o.method == "exhaustive")
        method = SearchMethod::exhaustive(o.depth);
    else if (o.method == "beam")
        method = SearchMethod::beam(o.width, o.search_seed);
    else
        throw InvalidConfig("unknown --method '" + o.method + "' (exhaustive, beam)");
    const SearchResult r = attack_search(cfg, budget, method);
    std::cout << "attack=search protocol=" << to_string(cfg.protocol) << " budget=" << to_string(budget)
              << " budget_rounds=" << r.budget_rounds << " nodes=" << r.nodes << '\n'
              << "scope: " << r.scope << "; absence of a plan is evidence, not proof\n";
    if (r.plan) {
        std::cout << "found=true input=" << r.fooled_input->to_string() << " output=" << r.wrong_output->to_string()
                  << " cost=" << r.plan->total_cost << '\n'
                  << "actions=" << r.plan->description << '\n';
        emit_plan(*r.plan, o.out);
    } else {
        std::cout << "found=false\n";
    }
    return 0;
}

int cmd_attack(const CommonOptions& common, const AttackOptions& o) {
    try {
        if (o.kind == "confusion") return attack_confusion(common, o);
        if (o.kind == "bitflip") return attack_bitflip(common, o);
        if (o.kind == "search") return attack_search_cmd(common, o);
    } catch (const SearchSpaceTooLarge& e) {
        throw AttackFailure(e.what());
    } catch (const NonDeterministicMachine& e) {
        throw AttackFailure(e.what());
    } catch (const AdversaryProtocolError& e) {
        throw AttackFailure(e.what());
    } catch (const InvalidInput& e) {
        throw AttackFailure(e.what());
    }
    throw InvalidConfig("unknown attack '" + o.kind + "' (confusion, bitflip, search)");
}

// --- codebook --------------------------------------------------------------

struct CodebookOptions {
    std::string action;
    std::string file;
    std::string out;
    std::size_t count = 0;
    std::size_t length = 0;
    bool no_extras = false;
    std::string triples = "auto";
    bool bob_set = false;
};

Codebook load_codebook(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidConfig("cannot read codebook '" + path + "'");
    return read_codebook(is);
}

Codebook protocol_codebook(const SessionConfig& cfg) {
    auto p = make_protocol(cfg);
    if (auto* p611 = dynamic_cast<const p611::Protocol611*>(p.get())) return p611->codebook();
    return dynamic_cast<const p35::Protocol35&>(*p).codebook();
}

int cmd_codebook(const CommonOptions& common, const CodebookOptions& o) {
    if (o.action == "build") {
        Codebook cb;
        if (o.count || o.length) {
            if (!o.count || !o.length) throw InvalidConfig("--count and --length go together");
            const Rational eps = parse_rational(common.code_epsilon.value_or("1/8"));
            std::vector<BitWord> extras;
            if (!o.no_extras) extras = {BitWord(o.length, false), BitWord(o.length, true)};
            cb = build_codebook(o.count, o.length, eps, extras, common.seed.value_or(1));
        } else {
            cb = protocol_codebook(common.config());
        }
        if (o.out.empty()) {
            write_codebook(std::cout, cb);
        } else {
            auto os = open_out(o.out);
            write_codebook(os, cb);
        }
        return 0;
    }
    if (o.action == "verify") {
        const Codebook cb = o.file.empty() ? protocol_codebook(common.config()) : load_codebook(o.file);
        TripleMode mode = TripleMode::automatic(cb.count() + cb.forbidden().size());
        if (o.triples == "all") {
            mode = TripleMode::all();
        } else if (o.triples != "auto") {
            mode = TripleMode::sampled(std::stoull(o.triples), common.seed.value_or(1));
        }
        const DistanceReport r = verify_distance(cb, mode);
        std::cout << "count=" << cb.count() << " length=" << cb.length() << " epsilon=" << to_string(cb.epsilon())
                  << '\n'
                  << "min_pairwise=" << r.min_pairwise << " min_forbidden=" << r.min_forbidden
                  << " required=" << cb.required_distance() << '\n'
                  << "max_triple_overlap=" << r.max_triple_overlap << " allowed=" << cb.allowed_triple_overlap()
                  << " triples=" << (r.triple_exhaustive ? std::string("exhaustive")
                                                         : "sampled(" + std::to_string(r.triple_samples) + ")")
                  << '\n'
                  << "certified=" << (r.certified ? "true" : "false") << '\n';
        return r.certified ? 0 : kExitFailure;
    }
    if (o.action == "show") {
        if (o.bob_set) {
            const std::size_t m = common.m.value_or(64);
            if (m % 8 != 0) throw InvalidConfig("--m must be divisible by 8");
            for (int k = 0; k < 4; ++k)
                std::cout << k << "bar " << p611::bob_word(static_cast<p611::BobWord>(k), m).to_string() << '\n';
            return 0;
        }
        const Codebook cb = o.file.empty() ? protocol_codebook(common.config()) : load_codebook(o.file);
        for (std::size_t i = 0; i < cb.count(); ++i) std::cout << "c" << i << ' ' << cb.words()[i].to_string() << '\n';
        for (std::size_t k = 0; k < cb.forbidden().size(); ++k)
            std::cout << "forbidden" << k << ' ' << cb.forbidden()[k].to_string() << '\n';
        return 0;
    }
    throw InvalidConfig("unknown codebook action '" + o.action + "' (build, verify, show)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interactive error-correcting code simulator over adversarial erasure channels"};
    app.set_config("--config", "", "Flat key=value file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    app.add_option("--protocol", common.protocol, "611 or 35")->capture_default_str();
    app.add_option("--n", common.n, "Input length");
    app.add_option("--epsilon", common.epsilon, "Schedule epsilon, exact (p/q or decimal)");
    app.add_option("--m", common.m, "Chunk scale M");
    app.add_option("--code-epsilon", common.code_epsilon, "Codebook epsilon");
    app.add_option("--seed", common.seed, "Seed for codebooks and adversaries");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run sessions and print one verdict line per input");
    run_cmd->add_option("--adversary", run.adversary, "null, random, chunk or plan")->capture_default_str();
    run_cmd->add_option("--budget", run.budget, "Erasure budget fraction")->capture_default_str();
    run_cmd->add_option("--x", run.x, "Input bits");
    run_cmd->add_option("--inputs", run.inputs, "single, all or sampled");
    run_cmd->add_option("--sample-count", run.sample_count);
    run_cmd->add_option("--sample-seed", run.sample_seed);
    run_cmd->add_option("--actions", run.actions, "Comma-separated chunk actions, or 'random'");
    run_cmd->add_option("--action-seed", run.action_seed);
    run_cmd->add_option("--plan", run.plan, "Attack plan file (JSON lines)");
    run_cmd->add_option("--trace", run.trace, "Trace file for a single run");
    run_cmd->add_option("--trace-dir", run.trace_dir, "Trace directory (default $IECC_TRACE_DIR)");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep a budget grid and emit a CSV summary");
    sweep_cmd->add_option("--start", sweep.start)->capture_default_str();
    sweep_cmd->add_option("--stop", sweep.stop)->capture_default_str();
    sweep_cmd->add_option("--step", sweep.step)->capture_default_str();
    sweep_cmd->add_option("--repetitions", sweep.repetitions)->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out, "CSV path (default stdout)");

    AttackOptions attack;
    auto* attack_cmd = app.add_subcommand("attack", "Generate and verify an attack");
    attack_cmd->add_option("kind", attack.kind, "confusion, bitflip or search")->required();
    attack_cmd->add_option("--out", attack.out, "Write the plan or result here");
    attack_cmd->add_option("--target", attack.target)->capture_default_str();
    attack_cmd->add_option("--chunks", attack.chunks)->capture_default_str();
    attack_cmd->add_option("--repetitions", attack.repetitions)->capture_default_str();
    attack_cmd->add_option("--bob-length", attack.bob_length)->capture_default_str();
    attack_cmd->add_option("--inputs", attack.input_count, "Number of inputs N (default 2^n)");
    attack_cmd->add_option("--budget", attack.budget)->capture_default_str();
    attack_cmd->add_option("--method", attack.method, "exhaustive or beam")->capture_default_str();
    attack_cmd->add_option("--depth", attack.depth, "Chunks searched (0 = all)");
    attack_cmd->add_option("--width", attack.width)->capture_default_str();
    attack_cmd->add_option("--search-seed", attack.search_seed)->capture_default_str();

    CodebookOptions codebook;
    auto* codebook_cmd = app.add_subcommand("codebook", "Build, verify or show codebooks");
    codebook_cmd->add_option("action", codebook.action, "build, verify or show")->required();
    codebook_cmd->add_option("--file", codebook.file);
    codebook_cmd->add_option("--out", codebook.out);
    codebook_cmd->add_option("--count", codebook.count);
    codebook_cmd->add_option("--length", codebook.length);
    codebook_cmd->add_flag("--no-extras", codebook.no_extras, "Skip the all-zero and all-one forbidden words");
    codebook_cmd->add_option("--triples", codebook.triples, "auto, all, or a sample count")->capture_default_str();
    codebook_cmd->add_flag("--bob-set", codebook.bob_set, "Show the four Bob words of the 6/11 protocol");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(common, run);
        if (*sweep_cmd) return cmd_sweep(common, sweep);
        if (*attack_cmd) return cmd_attack(common, attack);
        if (*codebook_cmd) return cmd_codebook(common, codebook);
    } catch (const AttackFailure& e) {
        std::cerr << "attack error: " << e.what() << '\n';
        return kExitAttack;
    } catch (const ConstructionFailed& e) {
        std::cerr << "codebook construction failed: " << e.what() << '\n';
        return kExitConstruction;
    } catch (const InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

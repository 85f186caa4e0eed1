#include "iecc/adversaries.hpp"
#include "iecc/ecc.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace iecc;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int status = -1;
    std::string out;
};

CliRun cli(const std::string& args) {
    const std::string cmd = std::string(IECC_CLI) + " " + args + " 2>&1";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (auto got = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ScratchDir {
    fs::path path = fs::temp_directory_path() / ("iecc_cli_test_" + std::to_string(::getpid()));
    ~ScratchDir() {
        std::error_code ignored;
        fs::remove_all(path, ignored);
    }
};

fs::path scratch(const std::string& name) {
    static ScratchDir dir;
    fs::create_directories(dir.path);
    return dir.path / name;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, sep);) out.push_back(part);
    return out;
}

} // namespace

TEST_CASE("sweep CSV has the fixed header and one row per budget") {
    auto r = cli("sweep --protocol 611 --n 2 --m 16 --start 0 --stop 1/2 --step 1/4 --repetitions 1");
    REQUIRE(r.status == 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    CHECK(line == "budget,runs,failures,violations,mean_fraction");
    std::vector<std::string> budgets;
    while (std::getline(is, line)) {
        auto cols = split(line, ',');
        REQUIRE(cols.size() == 5);
        budgets.push_back(cols[0]);
        CHECK(cols[3] == "0");
        CHECK(parse_rational(cols[4]) <= parse_rational(cols[0]));
    }
    CHECK(budgets == std::vector<std::string>{"0", "1/4", "1/2"});
}

TEST_CASE("sweep output file matches stdout byte for byte") {
    const auto path = scratch("sweep.csv");
    auto a = cli("sweep --protocol 35 --start 1/4 --stop 1/2 --step 1/4 --repetitions 2 --out " + path.string());
    REQUIRE(a.status == 0);
    auto b = cli("sweep --protocol 35 --start 1/4 --stop 1/2 --step 1/4 --repetitions 2");
    CHECK(slurp(path) == b.out);
}

TEST_CASE("exit codes") {
    CHECK(cli("run --protocol 611 --n 3 --epsilon 1/2 --m 16 --adversary null --x 101").status == 0);
    CHECK(cli("run --protocol 611 --n 3 --m 12 --adversary null --x 101").status == 2);
    CHECK(cli("run --protocol 47").status == 2);
    CHECK(cli("run --config /nonexistent/file.cfg").status == 2);
    CHECK(cli("attack search --protocol 35 --method exhaustive --budget 1/2").status == 3);
    CHECK(cli("codebook build --count 64 --length 8 --out " + scratch("tiny.txt").string()).status == 4);
}

TEST_CASE("key=value config files feed the global options") {
    const auto path = scratch("run.cfg");
    {
        std::ofstream out(path);
        out << "protocol=611\nn=2\nepsilon=1/2\nm=16\n";
    }
    auto r = cli("--config " + path.string() + " run --adversary null --x 10");
    CHECK(r.status == 0);
    CHECK(r.out.find("x=10 output=10 success=true") != std::string::npos);
}

TEST_CASE("confusion plan written by the CLI replays through the library") {
    const auto path = scratch("confusion.jsonl");
    auto r = cli("attack confusion --protocol 611 --n 2 --m 32 --out " + path.string());
    REQUIRE(r.status == 0);
    std::ifstream in(path);
    auto plan = read_plan(in);
    CHECK(plan.recompute_cost() == plan.total_cost);

    auto cfg = default_config(ProtocolKind::P611);
    cfg.n = 2;
    cfg.m = 32;
    validate(plan, make_schedule(cfg));
    auto v = erasure_confusion_attack(cfg);
    CHECK(plan.total_cost == v.plan.total_cost);

    // Both inputs of the pair give Bob the same view under the plan.
    PlanAdversary pa(plan), pb(plan);
    auto ra = run_session(cfg, v.input_a, pa);
    auto rb = run_session(cfg, v.input_b, pb);
    CHECK(ra.bob_output == rb.bob_output);

    auto replay = cli("run --protocol 611 --n 2 --m 32 --adversary plan --plan " + path.string() + " --x " +
                      v.input_a.to_string());
    CHECK(replay.out.find("output=" + ra.bob_output.to_string()) != std::string::npos);
}

TEST_CASE("traces from the CLI are deterministic JSON lines") {
    const auto a = scratch("a.jsonl"), b = scratch("b.jsonl");
    const std::string base = "run --protocol 35 --adversary random --budget 2/5 --seed 4 --x 01 --trace ";
    REQUIRE(cli(base + a.string()).status <= 1);
    REQUIRE(cli(base + b.string()).status <= 1);
    const auto text = slurp(a);
    CHECK(!text.empty());
    CHECK(text == slurp(b));
    std::istringstream is(text);
    CHECK(read_trace(is).size() > 0);
}

TEST_CASE("codebook files written by the CLI verify") {
    const auto path = scratch("cb.txt");
    REQUIRE(cli("codebook build --count 16 --length 64 --out " + path.string()).status == 0);
    std::ifstream in(path);
    auto cb = read_codebook(in);
    CHECK(cb.count() == 16);
    CHECK(verify_distance(cb).certified);
    CHECK(cli("codebook verify --file " + path.string()).status == 0);
}

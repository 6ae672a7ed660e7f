#include <doctest.h>

#include "simbeam/cli.hpp"
#include "simbeam/experiments.hpp"

#include <algorithm>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace simbeam;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_scenario()
{
    ScenarioConfig sc;
    sc.n_tx = 2;
    sc.n_users = 2;
    sc.n_meta = 9;
    sc.n_layers = 2;
    return sc;
}

SweepSpec small_sweep(const fs::path& out, unsigned threads)
{
    SweepSpec spec;
    spec.experiment = Experiment::rate_vs_layers;
    spec.values = {1, 2};
    spec.seeds = {1, 2, 3};
    spec.base = small_scenario();
    spec.out_dir = out;
    spec.threads = threads;
    return spec;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("simbeam_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string cli_path()
{
    const char* p = std::getenv("SIMBEAM_CLI");
    return p ? p : "";
}

int run_cli(const std::string& args)
{
    const std::string cmd = "\"" + cli_path() + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_small_config(const fs::path& dir)
{
    fs::create_directories(dir);
    const fs::path p = dir / "small.json";
    std::ofstream(p) << scenario_to_json(small_scenario());
    return p;
}

} // namespace

TEST_CASE("seed ranges")
{
    CHECK(parse_seed_range("1..3") == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(parse_seed_range("7") == std::vector<std::uint64_t>{7});
    CHECK_THROWS_AS(parse_seed_range("3..1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_seed_range("a..b"), std::invalid_argument);
}

TEST_CASE("spec validation rejects infeasible sweeps")
{
    SweepSpec spec = small_sweep({}, 1);
    CHECK_NOTHROW(spec.validate());

    SweepSpec atoms = spec;
    atoms.experiment = Experiment::rate_vs_atoms;
    atoms.values = {9, 10};
    CHECK_THROWS_AS(atoms.validate(), std::invalid_argument);

    SweepSpec wodb = spec;
    wodb.architecture = Architecture::simwodb;
    wodb.base.n_tx = 3;
    CHECK_THROWS_AS(wodb.validate(), std::invalid_argument);

    SweepSpec dup = spec;
    dup.seeds = {1, 1};
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

    SweepSpec bad = spec;
    bad.schemes = {"theta_iter", "nope"};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sweep rows, summary and determinism across thread counts")
{
    const fs::path a = scratch("sweep_a");
    const fs::path b = scratch("sweep_b");
    const ExperimentOutput out = run_sweep(small_sweep(a, 1));
    run_sweep(small_sweep(b, 3));

    CHECK(out.results.size() == 3 * 4 * 2);
    CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));

    // Re-aggregate the raw rows independently.
    std::map<std::pair<std::string, Index>, std::vector<double>> groups;
    for (const ResultRow& r : out.results)
        groups[{r.scheme, r.sweep_value}].push_back(r.asr_bits);
    REQUIRE(out.summary.size() == groups.size());
    for (const SummaryRow& s : out.summary) {
        const auto& x = groups.at({s.scheme, s.sweep_value});
        double mean = 0.0;
        for (double v : x)
            mean += v / static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x)
            ss += (v - mean) * (v - mean);
        CHECK(s.mean_asr_bits == doctest::Approx(mean).epsilon(1e-12));
        CHECK(s.stderr_bits == doctest::Approx(std::sqrt(ss / (x.size() - 1) / x.size())).epsilon(1e-12));
        if (s.scheme == "theta_iter") {
            CHECK(s.gain_vs.size() == 3);
            const auto& base = groups.at({"w_single", s.sweep_value});
            double bm = 0.0;
            for (double v : base)
                bm += v / static_cast<double>(base.size());
            CHECK(s.gain_vs.at("w_single") == doctest::Approx(100.0 * (mean - bm) / bm).epsilon(1e-9));
        } else {
            CHECK(s.gain_vs.empty());
        }
    }

    const std::string header = slurp(a / "summary.csv").substr(0, slurp(a / "summary.csv").find('\n'));
    CHECK(header == "scheme,sweep_value,mean_asr_bits,stderr,gain_vs_w_iter,gain_vs_theta_single,gain_vs_w_single");
}

TEST_CASE("convergence output shares the initial point")
{
    SweepSpec spec = small_sweep({}, 1);
    spec.experiment = Experiment::convergence;
    spec.seeds = {4};
    const ExperimentOutput out = run_convergence(spec);
    REQUIRE(out.drops.size() == 1);
    const auto& traces = out.drops.front().traces;
    REQUIRE(traces.size() == 4);
    for (const AoTrace& t : traces) {
        CHECK(t.initial_fingerprint == traces.front().initial_fingerprint);
        CHECK(t.initial_rate == traces.front().initial_rate);
    }
    std::size_t zero_rows = 0;
    for (const ConvergenceRow& r : out.convergence)
        if (r.iteration == 0)
            ++zero_rows;
    CHECK(zero_rows == 4);
    CHECK(out.convergence.size() == 4 + out.results[0].outer_iterations + out.results[1].outer_iterations +
                                        out.results[2].outer_iterations + out.results[3].outer_iterations);
}

TEST_CASE("convergence CSV is byte-identical across runs and thread counts")
{
    const fs::path a = scratch("conv_a");
    const fs::path b = scratch("conv_b");
    SweepSpec spec = small_sweep(a, 1);
    spec.experiment = Experiment::convergence;
    spec.seeds = {5, 6};
    run_convergence(spec);
    spec.out_dir = b;
    spec.threads = 2;
    run_convergence(spec);
    const std::string first = slurp(a / "convergence.csv");
    CHECK(first.rfind("scheme,drop,iteration,asr_nats,asr_bits\n", 0) == 0);
    CHECK(first == slurp(b / "convergence.csv"));
}

TEST_CASE("cli exit codes")
{
    if (cli_path().empty()) {
        MESSAGE("SIMBEAM_CLI not set; skipping");
        return;
    }
    const fs::path dir = scratch("cli");
    const fs::path cfg = write_small_config(dir);
    CHECK(run_cli("validate") == 0);
    CHECK(run_cli("sweep-layers --seeds 1..2") == 2);
    CHECK(run_cli("sweep-layers --config " + cfg.string() + " --bogus 1") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("sweep-atoms --config " + cfg.string() + " --values 9,10 --seeds 1..1 --out " +
                  (dir / "x").string()) == 2);
    CHECK(run_cli("sweep-layers --config " + cfg.string() + " --arch simwodb --seeds 1..1 --values 1 --out " +
                  (dir / "x").string()) == 0);

    const std::string run = "sweep-layers --config " + cfg.string() + " --drops 2 --seeds 1..2 --values 1,2 --out ";
    CHECK(run_cli(run + (dir / "r1").string()) == 0);
    CHECK(run_cli(run + (dir / "r2").string()) == 0);
    const std::string rows = slurp(dir / "r1" / "results.csv");
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 1 + 2 * 4 * 2);
    CHECK(rows == slurp(dir / "r2" / "results.csv"));
    CHECK(slurp(dir / "r1" / "summary.csv") == slurp(dir / "r2" / "summary.csv"));

    if (const char* cdir = std::getenv("SIMBEAM_CONFIG_DIR"))
        CHECK(load_scenario(fs::path(cdir) / "default.json").n_meta == 49);
}

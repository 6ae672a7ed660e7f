#include "simbeam/cli.hpp"

#include "simbeam/experiments.hpp"
#include "simbeam/validation.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace simbeam {

std::vector<std::uint64_t> parse_seed_range(const std::string& text)
{
    auto parse = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("invalid seed range '" + text + "'");
        return static_cast<std::uint64_t>(std::stoull(s));
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos)
        return {parse(text)};
    const std::uint64_t lo = parse(text.substr(0, dots));
    const std::uint64_t hi = parse(text.substr(dots + 2));
    if (hi < lo)
        throw std::invalid_argument("empty seed range '" + text + "'");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = lo; s <= hi; ++s)
        seeds.push_back(s);
    return seeds;
}

namespace {

struct Options {
    std::string config;
    std::string seeds;
    std::string schemes;
    std::string out = ".";
    std::string arch = "simwdb";
    std::vector<Index> values;
    int drops = 0;
};

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

SweepSpec make_spec(const Options& o, Experiment experiment)
{
    SweepSpec spec;
    spec.experiment = experiment;
    spec.base = load_scenario(o.config);
    spec.architecture = architecture_from_name(o.arch);
    if (!o.schemes.empty())
        spec.schemes = split_list(o.schemes);
    spec.out_dir = o.out;

    if (o.drops < 0)
        throw std::invalid_argument("--drops must be positive");
    if (!o.seeds.empty()) {
        spec.seeds = parse_seed_range(o.seeds);
        if (o.drops > 0 && static_cast<std::size_t>(o.drops) != spec.seeds.size())
            throw std::invalid_argument("--drops disagrees with the --seeds range");
    } else {
        const int drops = o.drops > 0 ? o.drops : (experiment == Experiment::convergence ? 1 : 50);
        for (int i = 0; i < drops; ++i)
            spec.seeds.push_back(spec.base.seed + static_cast<std::uint64_t>(i));
    }

    if (!o.values.empty())
        spec.values = o.values;
    else if (experiment == Experiment::rate_vs_layers)
        spec.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    else if (experiment == Experiment::rate_vs_atoms)
        spec.values = {16, 25, 36, 49, 64, 81, 100};
    spec.validate();
    return spec;
}

void print_summary(const ExperimentOutput& out, const SweepSpec& spec)
{
    std::map<std::string, std::pair<double, int>> timing;
    for (const ResultRow& r : out.results) {
        auto& t = timing[r.scheme];
        t.first += r.wall_seconds;
        ++t.second;
    }
    for (const std::string& s : spec.schemes)
        if (auto it = timing.find(s); it != timing.end())
            std::cerr << s << ": mean wall-clock " << it->second.first / it->second.second << " s per run\n";
    std::cerr << "wrote results to " << spec.out_dir.string() << '\n';
}

} // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"SIM-aided multiuser MISO sum-rate experiments"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* cfg = sub->add_option("--config", o.config, "Scenario JSON file")->check(CLI::ExistingFile);
        if (needs_config)
            cfg->required();
        sub->add_option("--seeds", o.seeds, "Drop seeds, a..b inclusive");
        sub->add_option("--schemes", o.schemes, "Comma list of theta_iter,w_iter,theta_single,w_single");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--drops", o.drops, "Number of Monte Carlo drops");
        sub->add_option("--arch", o.arch, "simwdb or simwodb")->check(CLI::IsMember({"simwdb", "simwodb"}));
    };

    auto* conv = app.add_subcommand("convergence", "Per-iteration ASR of each scheme");
    add_common(conv, true);
    auto* layers = app.add_subcommand("sweep-layers", "ASR versus number of SIM layers");
    add_common(layers, true);
    layers->add_option("--values", o.values, "Layer counts to sweep")->delimiter(',');
    auto* atoms = app.add_subcommand("sweep-atoms", "ASR versus meta-atoms per layer");
    add_common(atoms, true);
    atoms->add_option("--values", o.values, "Meta-atom counts (perfect squares)")->delimiter(',');
    auto* validate = app.add_subcommand("validate", "Check library invariants on a small instance");
    add_common(validate, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    SweepSpec spec;
    try {
        if (*conv)
            spec = make_spec(o, Experiment::convergence);
        else if (*layers)
            spec = make_spec(o, Experiment::rate_vs_layers);
        else if (*atoms)
            spec = make_spec(o, Experiment::rate_vs_atoms);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*validate) {
            ScenarioConfig scenario = o.config.empty() ? tiny_scenario() : load_scenario(o.config);
            const std::uint64_t seed = o.seeds.empty() ? scenario.seed : parse_seed_range(o.seeds).front();
            bool ok = true;
            for (const CheckResult& c : run_invariant_suite(scenario, seed)) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
                if (!c.detail.empty())
                    std::cout << "  " << c.detail;
                std::cout << '\n';
                ok = ok && c.passed;
            }
            return ok ? 0 : 1;
        }
        const ExperimentOutput out = spec.experiment == Experiment::convergence ? run_convergence(spec) : run_sweep(spec);
        print_summary(out, spec);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace simbeam

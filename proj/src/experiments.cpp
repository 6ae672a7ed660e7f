#include "simbeam/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace simbeam {

std::string_view experiment_name(Experiment e)
{
    switch (e) {
    case Experiment::convergence:
        return "convergence";
    case Experiment::rate_vs_layers:
        return "rate_vs_layers";
    case Experiment::rate_vs_atoms:
        return "rate_vs_atoms";
    }
    return "unknown";
}

void SweepSpec::validate() const
{
    base.validate();
    if (seeds.empty())
        throw std::invalid_argument("sweep: no drop seeds");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        throw std::invalid_argument("sweep: duplicate drop seeds");
    if (schemes.empty())
        throw std::invalid_argument("sweep: no schemes");
    std::set<std::string> seen;
    for (const std::string& s : schemes) {
        scheme_from_name(s, architecture);
        if (!seen.insert(s).second)
            throw std::invalid_argument("sweep: duplicate scheme '" + s + "'");
    }
    if (architecture == Architecture::simwodb && base.n_tx != base.n_users)
        throw std::invalid_argument("sweep: simwodb requires n_tx == n_users");
    if (experiment != Experiment::convergence) {
        if (values.empty())
            throw std::invalid_argument("sweep: no sweep values");
        for (Index v : values) {
            if (v < 1)
                throw std::invalid_argument("sweep: sweep values must be positive");
            if (experiment == Experiment::rate_vs_atoms) {
                const auto s = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v))));
                if (s * s != v)
                    throw std::invalid_argument("sweep: N=" + std::to_string(v) + " is not a perfect square");
            }
        }
    }
}

unsigned resolve_threads(unsigned requested)
{
    if (requested == 0) {
        if (const char* env = std::getenv("SIMBEAM_THREADS")) {
            char* end = nullptr;
            const unsigned long v = std::strtoul(env, &end, 10);
            if (end != env && *end == '\0')
                requested = static_cast<unsigned>(v);
        }
    }
    if (requested == 0)
        requested = std::max(1u, std::thread::hardware_concurrency());
    return requested;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
    }
    if (failure)
        std::rethrow_exception(failure);
}

DropOutcome run_drop(const ScenarioConfig& scenario, std::uint64_t drop_seed, const std::vector<Scheme>& schemes,
                     const AoConfig& ao, Index sweep_value)
{
    if (schemes.empty())
        throw std::invalid_argument("run_drop: no schemes");
    const ProblemInstance inst = make_instance(scenario, drop_seed);
    const InitialPoint start = initialize(drop_seed, inst.channels, inst.power_budget, schemes.front().architecture);

    DropOutcome out;
    out.sweep_value = sweep_value;
    out.drop_seed = drop_seed;
    for (const Scheme& s : schemes) {
        if (s.architecture != schemes.front().architecture)
            throw std::invalid_argument("run_drop: schemes must share one architecture");
        out.traces.push_back(run_ao(s, inst.channels, start, ao).trace);
    }
    for (const AoTrace& t : out.traces)
        if (t.initial_fingerprint != out.traces.front().initial_fingerprint)
            throw std::logic_error("run_drop: schemes did not share the initial point");
    return out;
}

namespace {

std::vector<Scheme> resolve_schemes(const SweepSpec& spec)
{
    std::vector<Scheme> out;
    for (const std::string& s : spec.schemes)
        out.push_back(scheme_from_name(s, spec.architecture));
    return out;
}

ScenarioConfig scenario_for(const SweepSpec& spec, Index value)
{
    ScenarioConfig c = spec.base;
    if (spec.experiment == Experiment::rate_vs_layers)
        c.n_layers = value;
    else if (spec.experiment == Experiment::rate_vs_atoms)
        c.n_meta = value;
    return c;
}

std::vector<DropOutcome> run_all(const SweepSpec& spec, const std::vector<Index>& values)
{
    const std::vector<Scheme> schemes = resolve_schemes(spec);
    std::vector<DropOutcome> outcomes(values.size() * spec.seeds.size());
    parallel_for(outcomes.size(), resolve_threads(spec.threads), [&](std::size_t i) {
        const Index value = values[i / spec.seeds.size()];
        const std::uint64_t seed = spec.seeds[i % spec.seeds.size()];
        outcomes[i] = run_drop(scenario_for(spec, value), seed, schemes, spec.ao, value);
    });
    return outcomes;
}

std::vector<ResultRow> result_rows(const SweepSpec& spec, const std::vector<DropOutcome>& outcomes)
{
    std::vector<ResultRow> rows;
    for (const DropOutcome& d : outcomes)
        for (const AoTrace& t : d.traces)
            rows.push_back({std::string(experiment_name(spec.experiment)), t.scheme.name(), d.sweep_value,
                            d.drop_seed, nats_to_bits(t.final_rate()), static_cast<int>(t.records.size()),
                            t.inner_pg_steps(), t.records.empty() ? 0.0 : t.records.back().wall_seconds});
    return rows;
}

std::filesystem::path prepare_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    body(os);
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

ExperimentOutput run_convergence(const SweepSpec& spec)
{
    spec.validate();
    ExperimentOutput out;
    out.drops = run_all(spec, {spec.base.n_layers});
    for (const DropOutcome& d : out.drops)
        for (const AoTrace& t : d.traces) {
            const std::string name = t.scheme.name();
            out.convergence.push_back({name, d.drop_seed, 0, t.initial_rate, nats_to_bits(t.initial_rate)});
            for (const AoRecord& r : t.records)
                out.convergence.push_back({name, d.drop_seed, r.iteration, r.rate, r.rate_bits()});
        }
    std::stable_sort(out.convergence.begin(), out.convergence.end(), [&](const auto& a, const auto& b) {
        const auto rank = [&](const std::string& s) {
            return std::find(spec.schemes.begin(), spec.schemes.end(), s) - spec.schemes.begin();
        };
        return std::tuple(rank(a.scheme), a.drop, a.iteration) < std::tuple(rank(b.scheme), b.drop, b.iteration);
    });
    out.results = result_rows(spec, out.drops);

    if (!spec.out_dir.empty()) {
        const auto dir = prepare_dir(spec.out_dir);
        write_file(dir / "convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, out.convergence); });
    }
    return out;
}

ExperimentOutput run_sweep(const SweepSpec& spec)
{
    spec.validate();
    if (spec.experiment == Experiment::convergence)
        throw std::invalid_argument("run_sweep: use run_convergence for the convergence experiment");
    ExperimentOutput out;
    out.drops = run_all(spec, spec.values);
    out.results = result_rows(spec, out.drops);
    out.summary = summarize(out.results, spec.schemes);

    if (!spec.out_dir.empty()) {
        const auto dir = prepare_dir(spec.out_dir);
        write_file(dir / "results.csv", [&](std::ostream& os) { write_results_csv(os, out.results); });
        write_file(dir / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, out.summary, spec.schemes); });
    }
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows, const std::vector<std::string>& schemes)
{
    std::vector<Index> values;
    for (const ResultRow& r : rows)
        if (std::find(values.begin(), values.end(), r.sweep_value) == values.end())
            values.push_back(r.sweep_value);
    std::sort(values.begin(), values.end());

    std::vector<SummaryRow> out;
    for (const std::string& scheme : schemes)
        for (Index v : values) {
            std::vector<double> x;
            for (const ResultRow& r : rows)
                if (r.scheme == scheme && r.sweep_value == v)
                    x.push_back(r.asr_bits);
            if (x.empty())
                continue;
            SummaryRow s;
            s.scheme = scheme;
            s.sweep_value = v;
            s.drops = x.size();
            double sum = 0.0;
            for (double a : x)
                sum += a;
            s.mean_asr_bits = sum / static_cast<double>(x.size());
            if (x.size() > 1) {
                double ss = 0.0;
                for (double a : x)
                    ss += (a - s.mean_asr_bits) * (a - s.mean_asr_bits);
                s.stderr_bits = std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
            }
            out.push_back(std::move(s));
        }

    for (SummaryRow& s : out) {
        if (s.scheme != "theta_iter")
            continue;
        for (const SummaryRow& b : out)
            if (b.scheme != "theta_iter" && b.sweep_value == s.sweep_value)
                s.gain_vs[b.scheme] = 100.0 * (s.mean_asr_bits - b.mean_asr_bits) / b.mean_asr_bits;
    }
    return out;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    os << "scheme,drop,iteration,asr_nats,asr_bits\n";
    for (const ConvergenceRow& r : rows)
        os << r.scheme << ',' << r.drop << ',' << r.iteration << ',' << fmt_double(r.asr_nats) << ','
           << fmt_double(r.asr_bits) << '\n';
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    os << "experiment,scheme,sweep_value,drop_seed,asr_bits,outer_iterations,inner_pg_steps\n";
    for (const ResultRow& r : rows)
        os << r.experiment << ',' << r.scheme << ',' << r.sweep_value << ',' << r.drop_seed << ','
           << fmt_double(r.asr_bits) << ',' << r.outer_iterations << ',' << r.inner_pg_steps << '\n';
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows, const std::vector<std::string>& schemes)
{
    std::vector<std::string> benchmarks;
    if (std::find(schemes.begin(), schemes.end(), "theta_iter") != schemes.end())
        for (const std::string& s : schemes)
            if (s != "theta_iter")
                benchmarks.push_back(s);

    os << "scheme,sweep_value,mean_asr_bits,stderr";
    for (const std::string& b : benchmarks)
        os << ",gain_vs_" << b;
    os << '\n';
    for (const SummaryRow& r : rows) {
        os << r.scheme << ',' << r.sweep_value << ',' << fmt_double(r.mean_asr_bits) << ','
           << fmt_double(r.stderr_bits);
        for (const std::string& b : benchmarks) {
            os << ',';
            if (auto it = r.gain_vs.find(b); it != r.gain_vs.end())
                os << fmt_double(it->second);
        }
        os << '\n';
    }
}

} // namespace simbeam

#include "simbeam/validation.hpp"

#include "simbeam/ao_driver.hpp"
#include "simbeam/core_math.hpp"
#include "simbeam/rng.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace simbeam {

namespace {

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

CheckResult check(std::string name, bool ok, std::string detail)
{
    return {std::move(name), ok, std::move(detail)};
}

} // namespace

ScenarioConfig tiny_scenario()
{
    ScenarioConfig c;
    c.n_tx = 2;
    c.n_users = 2;
    c.n_meta = 9;
    c.n_layers = 2;
    return c;
}

std::vector<CheckResult> run_invariant_suite(const ScenarioConfig& scenario, std::uint64_t seed)
{
    std::vector<CheckResult> out;
    const ProblemInstance inst = make_instance(scenario, seed);
    const ChannelSet& ch = inst.channels;
    const InitialPoint start = initialize(seed, ch, inst.power_budget, Architecture::simwdb);
    const ComplexVector& theta = start.theta.values();
    const ComplexMatrix& w = start.precoder.w;

    {
        const RealMatrix& r = ch.correlation;
        const double asym = (r - r.transpose()).cwiseAbs().maxCoeff();
        const double diag = (r.diagonal().array() - 1.0).abs().maxCoeff();
        const double min_eig = Eigen::SelfAdjointEigenSolver<RealMatrix>(r).eigenvalues().minCoeff();
        out.push_back(check("correlation_psd", asym == 0.0 && diag == 0.0 && min_eig >= -1e-9,
                            "min eigenvalue " + sci(min_eig)));
    }

    const CascadeCache cache = cascade_cache(theta, w, ch, CacheDepth::full);
    {
        double worst = 0.0;
        const double scale = cache.g_full.norm();
        for (Index l = 0; l < ch.n_layers(); ++l) {
            const auto ul = static_cast<std::size_t>(l);
            const ComplexMatrix rebuilt =
                cache.g_plus[ul] * theta.segment(l * ch.n_meta(), ch.n_meta()).asDiagonal() * cache.g_minus[ul];
            worst = std::max(worst, (rebuilt - cache.g_full).norm() / scale);
        }
        out.push_back(check("cascade_identity", worst <= 1e-9, "max relative error " + sci(worst)));
    }
    {
        const ComplexMatrix z = ch.user_channels.adjoint() * wb_matrix(theta, ch) * w;
        double worst = 0.0;
        for (Index l = 0; l < ch.n_layers(); ++l)
            for (Index k = 0; k < ch.users(); ++k)
                for (Index j = 0; j < ch.users(); ++j) {
                    const Complex v = theta.segment(l * ch.n_meta(), ch.n_meta()).transpose() * cache.e(l, k, j);
                    worst = std::max(worst, std::abs(v - z(k, j)) / std::max(std::abs(z(k, j)), 1e-300));
                }
        out.push_back(check("e_vector_identity", worst <= 1e-10, "max relative error " + sci(worst)));
    }
    {
        const ComplexVector grad = grad_theta(theta, w, ch, cache);
        auto rng = make_rng(seed, Stream::test);
        std::normal_distribution<double> normal;
        const double h = 1e-6;
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            ComplexVector delta(theta.size());
            for (Index i = 0; i < delta.size(); ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                delta[i] = Complex(re, im);
            }
            delta.normalize();
            const double fd =
                (sum_rate(theta + h * delta, w, ch) - sum_rate(theta - h * delta, w, ch)) / (2.0 * h);
            const double analytic = 2.0 * grad.dot(delta).real();
            worst = std::max(worst, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-8));
        }
        out.push_back(check("gradient_finite_difference", worst <= 1e-5, "max relative error " + sci(worst)));
    }

    AoConfig ao;
    ao.keep_inner_traces = true;
    bool monotone = true;
    bool modulus = true;
    bool power = true;
    std::string detail;
    for (Architecture arch : {Architecture::simwdb, Architecture::simwodb}) {
        const InitialPoint s = initialize(seed, ch, inst.power_budget, arch);
        for (const Scheme& scheme : all_schemes(arch)) {
            const AoTrace t = run_ao(scheme, ch, s, ao).trace;
            double prev = t.initial_rate;
            for (const AoRecord& r : t.records) {
                monotone = monotone && r.rate >= prev - 1e-10;
                prev = r.rate;
                for (std::size_t i = 1; i < r.inner_objectives.size(); ++i)
                    monotone = monotone && r.inner_objectives[i] >= r.inner_objectives[i - 1];
            }
            modulus = modulus && t.max_modulus_error <= 1e-12;
            power = power && t.max_power_excess <= 1e-9 * inst.power_budget && t.max_off_diagonal == 0.0;
            detail += std::string(architecture_name(arch)) + "/" + scheme.name() + "=" +
                      sci(nats_to_bits(t.final_rate())) + " ";
        }
    }
    out.push_back(check("monotone_ascent", monotone, detail));
    out.push_back(check("unit_modulus", modulus, ""));
    out.push_back(check("power_feasibility", power, ""));

    {
        const Scheme proposed = all_schemes(Architecture::simwdb).front();
        const AoResult a = run_ao(proposed, ch, start, ao);
        const AoResult b = run_ao(proposed, ch, start, ao);
        const bool same = a.theta.values() == b.theta.values() && a.precoder.w == b.precoder.w &&
                          a.trace.records.size() == b.trace.records.size();
        out.push_back(check("determinism", same, ""));
    }
    return out;
}

} // namespace simbeam

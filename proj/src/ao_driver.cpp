#include "simbeam/ao_driver.hpp"

#include "simbeam/rng.hpp"

#include <chrono>
#include <stdexcept>

namespace simbeam {

std::string Scheme::name() const
{
    std::string s = order == BlockOrder::theta_first ? "theta_" : "w_";
    s += pg_variant == PgVariant::iterative ? "iter" : "single";
    return s;
}

std::vector<Scheme> all_schemes(Architecture arch)
{
    return {
        {BlockOrder::theta_first, PgVariant::iterative, arch},
        {BlockOrder::w_first, PgVariant::iterative, arch},
        {BlockOrder::theta_first, PgVariant::single_step, arch},
        {BlockOrder::w_first, PgVariant::single_step, arch},
    };
}

Scheme scheme_from_name(std::string_view name, Architecture arch)
{
    for (const Scheme& s : all_schemes(arch))
        if (s.name() == name)
            return s;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view architecture_name(Architecture arch)
{
    return arch == Architecture::simwdb ? "simwdb" : "simwodb";
}

Architecture architecture_from_name(std::string_view name)
{
    if (name == "simwdb")
        return Architecture::simwdb;
    if (name == "simwodb")
        return Architecture::simwodb;
    throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

std::uint64_t InitialPoint::fingerprint() const
{
    return simbeam::fingerprint(precoder.w, simbeam::fingerprint(theta.values()));
}

InitialPoint initialize(std::uint64_t seed, const ChannelSet& channels, double power_budget, Architecture arch)
{
    const Index n = channels.n_meta();
    const Index layers = channels.n_layers();
    const Index n_tx = channels.n_tx();
    const Index users = channels.users();

    auto phase_rng = make_rng(seed, Stream::initial_phases);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    RealVector angles(n * layers);
    for (Index i = 0; i < angles.size(); ++i)
        angles[i] = angle(phase_rng);

    InitialPoint p{PhaseState::from_angles(angles, n), {}};
    p.precoder.power_budget = power_budget;

    if (arch == Architecture::simwodb) {
        if (n_tx != users)
            throw std::invalid_argument("initialize: SIMwoDB needs n_tx == users");
        p.precoder.mode = PrecoderMode::diagonal;
        p.precoder.w = ComplexMatrix::Zero(n_tx, users);
        p.precoder.w.diagonal().setConstant(Complex(std::sqrt(power_budget / static_cast<double>(users)), 0.0));
        return p;
    }

    auto w_rng = make_rng(seed, Stream::initial_precoder);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrix w(n_tx, users);
    for (Index j = 0; j < users; ++j)
        for (Index i = 0; i < n_tx; ++i) {
            const double re = normal(w_rng);
            const double im = normal(w_rng);
            w(i, j) = Complex(re, im);
        }
    w *= std::sqrt(power_budget / w.squaredNorm());
    p.precoder.mode = PrecoderMode::full;
    p.precoder.w = std::move(w);
    return p;
}

namespace {

struct BlockState {
    PhaseState theta;
    Precoder precoder;
    double rate = 0.0;
};

} // namespace

AoResult run_ao(const Scheme& scheme, const ChannelSet& channels, const InitialPoint& start, const AoConfig& cfg)
{
    if (scheme.architecture == Architecture::simwodb && channels.n_tx() != channels.users())
        throw std::invalid_argument("run_ao: SIMwoDB needs n_tx == users");
    if (!(cfg.eps > 0.0) || cfg.max_outer_iters < 1)
        throw std::invalid_argument("run_ao: eps must be positive and max_outer_iters >= 1");

    PgConfig pg = cfg.pg;
    pg.variant = scheme.pg_variant;

    const auto clock_start = std::chrono::steady_clock::now();
    BlockState state{start.theta, start.precoder, 0.0};
    state.rate = sum_rate(state.theta.values(), state.precoder.w, channels);

    AoResult out;
    out.trace.scheme = scheme;
    out.trace.initial_rate = state.rate;
    out.trace.initial_fingerprint = start.fingerprint();
    out.trace.max_modulus_error = state.theta.max_modulus_error();
    out.trace.max_power_excess = state.precoder.power() - state.precoder.power_budget;
    out.trace.max_off_diagonal = state.precoder.mode == PrecoderMode::diagonal ? state.precoder.off_diagonal_mass() : 0.0;

    int gradient_evaluations = 0;
    int inner_steps = 0;

    auto theta_block = [&](AoRecord& rec) {
        PgResult r = optimize_phases(state.theta, state.precoder.w, channels, pg);
        gradient_evaluations += r.gradient_evaluations;
        inner_steps += static_cast<int>(r.trace.size());
        out.trace.max_modulus_error = std::max(out.trace.max_modulus_error, r.max_modulus_error);
        if (cfg.keep_inner_traces)
            for (const PgStepRecord& s : r.trace)
                rec.inner_objectives.push_back(s.objective);
        state.theta = std::move(r.theta);
        state.rate = r.objective;
        rec.rate_after_theta = state.rate;
    };

    auto w_block = [&](AoRecord& rec) {
        PrecoderResult r;
        if (scheme.architecture == Architecture::simwdb) {
            r = optimize_precoder(state.theta.values(), state.precoder.w, channels, state.precoder.power_budget,
                                  cfg.precoder);
        } else {
            const RealVector p0 = state.precoder.w.diagonal().cwiseAbs2();
            r = optimize_power_allocation(state.theta.values(), p0, channels, state.precoder.power_budget,
                                          cfg.precoder);
            out.trace.max_off_diagonal = std::max(out.trace.max_off_diagonal, r.precoder.off_diagonal_mass());
        }
        out.trace.max_power_excess = std::max(out.trace.max_power_excess, r.max_power_excess);
        // The block solvers evaluate the rate through the effective channel;
        // re-evaluate on the common path so the outer sequence is comparable.
        const double rate = sum_rate(state.theta.values(), r.precoder.w, channels);
        if (rate >= state.rate) {
            state.precoder = std::move(r.precoder);
            state.rate = rate;
        }
        rec.rate_after_w = state.rate;
    };

    for (int q = 0; q < cfg.max_outer_iters; ++q) {
        const double previous = state.rate;
        AoRecord rec;
        rec.iteration = q + 1;
        if (scheme.order == BlockOrder::theta_first) {
            theta_block(rec);
            w_block(rec);
        } else {
            w_block(rec);
            theta_block(rec);
        }
        rec.rate = state.rate;
        rec.gradient_evaluations = gradient_evaluations;
        rec.inner_pg_steps = inner_steps;
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
        out.trace.records.push_back(std::move(rec));
        if (state.rate - previous <= cfg.eps) {
            out.trace.status = AoStatus::converged;
            break;
        }
    }

    out.theta = std::move(state.theta);
    out.precoder = std::move(state.precoder);
    return out;
}

} // namespace simbeam

#include "simbeam/phase_optimizer.hpp"

#include <algorithm>
#include <stdexcept>

namespace simbeam {

void PgConfig::validate() const
{
    if (!(alpha0 > 0.0) || !(beta > 0.0 && beta < 1.0) || !(eta >= 0.0) || !(eps_theta > 0.0))
        throw std::invalid_argument("PgConfig: require alpha0 > 0, 0 < beta < 1, eta >= 0, eps_theta > 0");
    if (max_inner_iters < 1 || max_backtracks < 0)
        throw std::invalid_argument("PgConfig: iteration caps must be positive");
}

ComplexVector project_unit_modulus(const ComplexVector& a)
{
    ComplexVector out(a.size());
    for (Index i = 0; i < a.size(); ++i) {
        const double mag = std::abs(a[i]);
        out[i] = mag > 0.0 ? a[i] / mag : Complex(1.0, 0.0);
    }
    return out;
}

PhaseState pg_step(const PhaseState& theta, const ComplexVector& grad, double alpha)
{
    return PhaseState::project(theta.values() + alpha * grad, theta.n_meta());
}

bool backtracking_accept(double r_new, double r_old, const ComplexVector& theta_new,
                         const ComplexVector& theta_old, double eta)
{
    return r_new >= r_old + eta * (theta_new - theta_old).squaredNorm();
}

PgResult optimize_phases(const PhaseState& theta0, const ComplexMatrix& w, const ChannelSet& channels,
                         const PgConfig& cfg)
{
    cfg.validate();
    if (theta0.max_modulus_error() > 1e-9)
        throw std::invalid_argument("optimize_phases: theta0 is not unit modulus");

    PgResult out;
    out.theta = theta0;
    out.objective = out.initial_objective = sum_rate(theta0.values(), w, channels);
    out.objective_evaluations = 1;
    out.max_modulus_error = theta0.max_modulus_error();

    const int max_steps = cfg.variant == PgVariant::single_step ? 1 : cfg.max_inner_iters;
    double alpha = cfg.alpha0;

    for (int m = 0; m < max_steps; ++m) {
        const CascadeCache cache = cascade_cache(out.theta.values(), w, channels, CacheDepth::compact);
        const ComplexVector grad = grad_theta(out.theta.values(), w, channels, cache);
        ++out.gradient_evaluations;

        bool accepted = false;
        int backtracks = 0;
        PhaseState candidate;
        double r_candidate = 0.0;
        for (;;) {
            candidate = pg_step(out.theta, grad, alpha);
            r_candidate = sum_rate(candidate.values(), w, channels);
            ++out.objective_evaluations;
            if (backtracking_accept(r_candidate, out.objective, candidate.values(), out.theta.values(), cfg.eta)) {
                accepted = true;
                break;
            }
            if (backtracks == cfg.max_backtracks)
                break;
            alpha *= cfg.beta;
            ++backtracks;
        }
        if (!accepted) {
            out.stalled = true;
            break;
        }

        const double improvement = r_candidate - out.objective;
        out.theta = std::move(candidate);
        out.objective = r_candidate;
        out.max_modulus_error = std::max(out.max_modulus_error, out.theta.max_modulus_error());
        out.trace.push_back({m, r_candidate, alpha, backtracks, grad.norm()});
        if (improvement <= cfg.eps_theta)
            break;
    }
    return out;
}

} // namespace simbeam

#include "simbeam/digital_beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace simbeam {

void WmmseConfig::validate() const
{
    if (!(eps_w > 0.0) || max_iters < 1)
        throw std::invalid_argument("WmmseConfig: eps_w must be positive and max_iters >= 1");
    if (!(alpha0 > 0.0) || !(beta > 0.0 && beta < 1.0) || !(eta >= 0.0) || max_backtracks < 0)
        throw std::invalid_argument("WmmseConfig: invalid step parameters");
}

EffectiveChannels effective_channels(const ComplexVector& theta, const ChannelSet& channels)
{
    EffectiveChannels eff;
    eff.b = wb_matrix(theta, channels).adjoint() * channels.user_channels;
    eff.theta_fingerprint = fingerprint(theta);
    return eff;
}

double effective_sum_rate(const EffectiveChannels& eff, const ComplexMatrix& w, double noise_power)
{
    return sum_rate_from_gains(eff.b.adjoint() * w, noise_power);
}

ComplexMatrix solve_power_constrained(const ComplexMatrix& a, const ComplexMatrix& rhs, double budget)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(a);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("solve_power_constrained: eigendecomposition failed");
    const RealVector lambda = eig.eigenvalues().cwiseMax(0.0);
    const ComplexMatrix c = eig.eigenvectors().adjoint() * rhs;
    const RealVector weight = c.rowwise().squaredNorm();

    const double lambda_max = lambda.maxCoeff();
    const double mu_floor = 1e-12 * std::max(lambda_max, std::numeric_limits<double>::min());

    auto power = [&](double mu) {
        double p = 0.0;
        for (Index i = 0; i < lambda.size(); ++i) {
            if (weight[i] == 0.0)
                continue;
            const double d = lambda[i] + mu;
            p += weight[i] / (d * d);
        }
        return p;
    };

    double mu = 0.0;
    if (lambda.minCoeff() <= mu_floor)
        mu = mu_floor;
    if (power(mu) > budget) {
        double lo = mu;
        double hi = 1.0;
        while (power(hi) > budget) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 1000; ++it) {
            if (budget - power(hi) <= 1e-9 * budget)
                break;
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            (power(mid) > budget ? lo : hi) = mid;
        }
        mu = hi;
    }

    RealVector inv(lambda.size());
    for (Index i = 0; i < lambda.size(); ++i)
        inv[i] = weight[i] == 0.0 ? 0.0 : 1.0 / (lambda[i] + mu);
    ComplexMatrix w = eig.eigenvectors() * (inv.asDiagonal() * c);
    const double p = w.squaredNorm();
    if (p > budget)
        w *= std::sqrt(budget / p);
    return w;
}

namespace {

ComplexMatrix matched_filter_start(const EffectiveChannels& eff, double budget)
{
    const Index users = eff.users();
    ComplexMatrix w(eff.b.rows(), users);
    const double per_user = budget / static_cast<double>(users);
    for (Index k = 0; k < users; ++k) {
        const double norm = eff.b.col(k).norm();
        if (norm > 0.0)
            w.col(k) = eff.b.col(k) * (std::sqrt(per_user) / norm);
        else
            w.col(k) = ComplexVector::Constant(eff.b.rows(), Complex(std::sqrt(per_user / eff.b.rows()), 0.0));
    }
    return w;
}

ComplexMatrix wmmse_update(const EffectiveChannels& eff, const ComplexMatrix& w, double noise_power, double budget)
{
    const Index users = eff.users();
    const ComplexMatrix z = eff.b.adjoint() * w;
    ComplexMatrix a = ComplexMatrix::Zero(eff.b.rows(), eff.b.rows());
    ComplexMatrix rhs(eff.b.rows(), users);
    for (Index k = 0; k < users; ++k) {
        const double total = z.row(k).squaredNorm() + noise_power;
        const Complex u = z(k, k) / total;
        // MSE at the MMSE receiver: 1 - |z_kk|^2 / total
        const double mse = (total - std::norm(z(k, k))) / total;
        const double v = 1.0 / mse;
        a.noalias() += (v * std::norm(u)) * (eff.b.col(k) * eff.b.col(k).adjoint());
        rhs.col(k) = (v * u) * eff.b.col(k);
    }
    a = 0.5 * (a + a.adjoint()).eval();
    return solve_power_constrained(a, rhs, budget);
}

} // namespace

PrecoderResult optimize_precoder(const ComplexVector& theta, const ComplexMatrix& w0, const ChannelSet& channels,
                                 double power_budget, const WmmseConfig& cfg)
{
    cfg.validate();
    if (!(power_budget > 0.0))
        throw std::invalid_argument("optimize_precoder: power budget must be positive");
    if (w0.rows() != channels.n_tx() || w0.cols() != channels.users())
        throw std::invalid_argument("optimize_precoder: W0 must be n_tx x users");
    if (w0.squaredNorm() > power_budget * (1.0 + 1e-9))
        throw std::invalid_argument("optimize_precoder: W0 exceeds the power budget");

    const EffectiveChannels eff = effective_channels(theta, channels);
    const double sigma2 = channels.noise_power;

    PrecoderResult out;
    out.precoder = {w0, PrecoderMode::full, power_budget};
    out.objective = out.initial_objective = effective_sum_rate(eff, w0, sigma2);

    ComplexMatrix w = w0;
    if (w.squaredNorm() <= 1e-12 * power_budget) {
        w = matched_filter_start(eff, power_budget);
        const double r = effective_sum_rate(eff, w, sigma2);
        if (r >= out.objective) {
            out.precoder.w = w;
            out.objective = r;
        }
    }

    double current = effective_sum_rate(eff, w, sigma2);
    for (int it = 0; it < cfg.max_iters; ++it) {
        ComplexMatrix next = wmmse_update(eff, w, sigma2, power_budget);
        const double r = effective_sum_rate(eff, next, sigma2);
        out.max_power_excess = std::max(out.max_power_excess, next.squaredNorm() - power_budget);
        out.trace.push_back({it, r, next.squaredNorm()});
        const double improvement = r - current;
        w = std::move(next);
        current = r;
        if (r > out.objective) {
            out.objective = r;
            out.precoder.w = w;
        }
        if (improvement <= cfg.eps_w)
            break;
    }
    return out;
}

RealVector project_power(const RealVector& p, double budget)
{
    RealVector q = p.cwiseMax(0.0);
    if (q.sum() <= budget)
        return q;
    // Projection onto the scaled simplex {q >= 0, sum q = budget}.
    std::vector<double> sorted(p.data(), p.data() + p.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        const double t = (cumulative - budget) / static_cast<double>(i + 1);
        if (sorted[i] - t > 0.0)
            tau = t;
    }
    return (p.array() - tau).cwiseMax(0.0).matrix();
}

namespace {

double split_rate(const RealMatrix& gains, const RealVector& p, double sigma2)
{
    double r = 0.0;
    for (Index k = 0; k < gains.rows(); ++k) {
        const double total = gains.row(k).dot(p) + sigma2;
        const double desired = gains(k, k) * p[k];
        r += std::log(total) - std::log(total - desired);
    }
    return r;
}

RealVector split_gradient(const RealMatrix& gains, const RealVector& p, double sigma2)
{
    RealVector g = RealVector::Zero(p.size());
    for (Index k = 0; k < gains.rows(); ++k) {
        const double total = gains.row(k).dot(p) + sigma2;
        const double interference = total - gains(k, k) * p[k];
        for (Index j = 0; j < p.size(); ++j) {
            g[j] += gains(k, j) / total;
            if (j != k)
                g[j] -= gains(k, j) / interference;
        }
    }
    return g;
}

} // namespace

RealVector maximize_power_split(const RealMatrix& gains, const RealVector& p0, double noise_power,
                                double power_budget, const WmmseConfig& cfg, std::vector<PrecoderStep>* trace)
{
    cfg.validate();
    if (gains.rows() != gains.cols() || p0.size() != gains.rows())
        throw std::invalid_argument("maximize_power_split: need square gains and matching p0");
    if ((p0.array() < 0.0).any() || p0.sum() > power_budget * (1.0 + 1e-9))
        throw std::invalid_argument("maximize_power_split: p0 infeasible");

    // Work in x = p / P_T so that step sizes are independent of the budget.
    const RealMatrix scaled = gains * power_budget;
    RealVector x = project_power(p0 / power_budget, 1.0);
    double r = split_rate(scaled, x, noise_power);
    double alpha = cfg.alpha0;

    for (int it = 0; it < cfg.max_iters; ++it) {
        const RealVector grad = split_gradient(scaled, x, noise_power);
        bool accepted = false;
        RealVector candidate;
        double r_candidate = 0.0;
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            candidate = project_power(x + alpha * grad, 1.0);
            r_candidate = split_rate(scaled, candidate, noise_power);
            if (r_candidate >= r + cfg.eta * (candidate - x).squaredNorm()) {
                accepted = true;
                break;
            }
            alpha *= cfg.beta;
        }
        if (!accepted)
            break;
        const double improvement = r_candidate - r;
        const bool moved = (candidate - x).squaredNorm() > 0.0;
        x = candidate;
        r = r_candidate;
        if (trace)
            trace->push_back({it, r, x.sum() * power_budget});
        if (improvement <= cfg.eps_w || !moved)
            break;
        // Let the step recover after a run of shrinks.
        alpha = std::min(alpha / cfg.beta, cfg.alpha0);
    }
    return x * power_budget;
}

PrecoderResult optimize_power_allocation(const ComplexVector& theta, const RealVector& p0,
                                         const ChannelSet& channels, double power_budget,
                                         const WmmseConfig& cfg)
{
    if (channels.n_tx() != channels.users())
        throw std::invalid_argument("optimize_power_allocation: diagonal mode needs n_tx == users");
    if (!(power_budget > 0.0))
        throw std::invalid_argument("optimize_power_allocation: power budget must be positive");

    const EffectiveChannels eff = effective_channels(theta, channels);
    // gains(k, j) = |b_k^H e_j|^2
    const RealMatrix gains = eff.b.adjoint().cwiseAbs2();

    PrecoderResult out;
    out.precoder.mode = PrecoderMode::diagonal;
    out.precoder.power_budget = power_budget;
    out.initial_objective = split_rate(gains, p0, channels.noise_power);

    const RealVector p = maximize_power_split(gains, p0, channels.noise_power, power_budget, cfg, &out.trace);
    out.precoder.w = ComplexMatrix::Zero(channels.n_tx(), channels.users());
    for (Index k = 0; k < p.size(); ++k)
        out.precoder.w(k, k) = std::sqrt(p[k]);
    out.objective = effective_sum_rate(eff, out.precoder.w, channels.noise_power);
    out.max_power_excess = out.precoder.power() - power_budget;
    return out;
}

} // namespace simbeam

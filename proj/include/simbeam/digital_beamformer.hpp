#pragma once

#include "simbeam/core_math.hpp"
#include "simbeam/types.hpp"

#include <vector>

namespace simbeam {

/// Columns b_k = G^H h_k: the channel each user sees from the BS ports.
struct EffectiveChannels {
    ComplexMatrix b;
    std::uint64_t theta_fingerprint = 0;

    Index users() const { return b.cols(); }
};

EffectiveChannels effective_channels(const ComplexVector& theta, const ChannelSet& channels);

struct WmmseConfig {
    double eps_w = 1e-6;
    int max_iters = 500;
    /// Step parameters used by the diagonal power-allocation solver.
    double alpha0 = 1.0;
    double beta = 0.5;
    double eta = 1e-7;
    int max_backtracks = 60;

    void validate() const;
};

struct PrecoderStep {
    int iteration = 0;
    double objective = 0.0;
    double power = 0.0;
};

struct PrecoderResult {
    Precoder precoder;
    double initial_objective = 0.0;
    double objective = 0.0;
    std::vector<PrecoderStep> trace;
    /// Largest sum_k ||w_k||^2 - P_T seen over all iterates.
    double max_power_excess = 0.0;
};

/// Sum rate (nats) of W against effective channels.
double effective_sum_rate(const EffectiveChannels& eff, const ComplexMatrix& w, double noise_power);

/// Minimises over mu >= 0 the power mismatch of W(mu) = (A + mu I)^{-1} rhs so
/// that ||W||_F^2 <= budget, with equality whenever the unregularised solution
/// exceeds it. A must be Hermitian positive semidefinite.
ComplexMatrix solve_power_constrained(const ComplexMatrix& a, const ComplexMatrix& rhs, double budget);

/// Full digital beamforming by WMMSE iterations, warm-started at w0.
PrecoderResult optimize_precoder(const ComplexVector& theta, const ComplexMatrix& w0, const ChannelSet& channels,
                                 double power_budget, const WmmseConfig& cfg);

/// Diagonal W = diag(sqrt(p)) (SIMwoDB); projected-gradient ascent on p.
PrecoderResult optimize_power_allocation(const ComplexVector& theta, const RealVector& p0,
                                         const ChannelSet& channels, double power_budget,
                                         const WmmseConfig& cfg);

/// Same solver on a raw gain matrix gains(k, j) = |h_k^H G e_j|^2.
RealVector maximize_power_split(const RealMatrix& gains, const RealVector& p0, double noise_power,
                                double power_budget, const WmmseConfig& cfg, std::vector<PrecoderStep>* trace = nullptr);

/// Euclidean projection onto {p >= 0, sum p <= budget}.
RealVector project_power(const RealVector& p, double budget);

} // namespace simbeam

#pragma once

#include "simbeam/core_math.hpp"
#include "simbeam/types.hpp"

#include <vector>

namespace simbeam {

enum class PgVariant { iterative, single_step };

struct PgConfig {
    double alpha0 = 1.0;
    double beta = 0.5;
    double eta = 1e-7;
    double eps_theta = 1e-6;
    int max_inner_iters = 500;
    int max_backtracks = 60;
    PgVariant variant = PgVariant::iterative;

    void validate() const;
};

struct PgStepRecord {
    int iteration = 0;
    double objective = 0.0;
    double step_size = 0.0;
    int backtracks = 0;
    double gradient_norm = 0.0;
};

struct PgResult {
    PhaseState theta;
    double initial_objective = 0.0;
    double objective = 0.0;
    /// One record per accepted step.
    std::vector<PgStepRecord> trace;
    int gradient_evaluations = 0;
    int objective_evaluations = 0;
    /// Backtracking ran out of shrinks; the current iterate was kept.
    bool stalled = false;
    double max_modulus_error = 0.0;
};

ComplexVector project_unit_modulus(const ComplexVector& a);

/// Pi_Q(theta + alpha * grad).
PhaseState pg_step(const PhaseState& theta, const ComplexVector& grad, double alpha);

/// Sufficient-increase test R_new >= R_old + eta ||theta_new - theta_old||^2.
bool backtracking_accept(double r_new, double r_old, const ComplexVector& theta_new,
                         const ComplexVector& theta_old, double eta);

/// Projected-gradient ascent on theta with W held fixed.
PgResult optimize_phases(const PhaseState& theta0, const ComplexMatrix& w, const ChannelSet& channels,
                         const PgConfig& cfg);

} // namespace simbeam

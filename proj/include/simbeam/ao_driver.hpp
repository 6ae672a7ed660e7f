#pragma once

#include "simbeam/digital_beamformer.hpp"
#include "simbeam/phase_optimizer.hpp"
#include "simbeam/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace simbeam {

enum class BlockOrder { theta_first, w_first };
enum class Architecture { simwdb, simwodb };

struct Scheme {
    BlockOrder order = BlockOrder::theta_first;
    PgVariant pg_variant = PgVariant::iterative;
    Architecture architecture = Architecture::simwdb;

    /// "theta_iter", "w_iter", "theta_single" or "w_single".
    std::string name() const;
    friend bool operator==(const Scheme&, const Scheme&) = default;
};

/// The four (order x pg_variant) curves, proposed scheme first.
std::vector<Scheme> all_schemes(Architecture arch);
Scheme scheme_from_name(std::string_view name, Architecture arch);
std::string_view architecture_name(Architecture arch);
Architecture architecture_from_name(std::string_view name);

struct AoConfig {
    PgConfig pg;
    WmmseConfig precoder;
    double eps = 1e-6;
    int max_outer_iters = 200;
    /// Keep every accepted inner PG objective (memory grows with iterations).
    bool keep_inner_traces = false;
};

struct AoRecord {
    int iteration = 0;
    double rate_after_theta = 0.0;
    double rate_after_w = 0.0;
    /// Objective at the end of the outer iteration (nats).
    double rate = 0.0;
    int gradient_evaluations = 0;
    int inner_pg_steps = 0;
    double wall_seconds = 0.0;
    std::vector<double> inner_objectives;

    double rate_bits() const { return nats_to_bits(rate); }
};

enum class AoStatus { converged, iteration_cap };

struct AoTrace {
    Scheme scheme;
    double initial_rate = 0.0;
    std::vector<AoRecord> records;
    AoStatus status = AoStatus::iteration_cap;
    double max_modulus_error = 0.0;
    double max_power_excess = 0.0;
    double max_off_diagonal = 0.0;
    std::uint64_t initial_fingerprint = 0;

    double final_rate() const { return records.empty() ? initial_rate : records.back().rate; }
    int inner_pg_steps() const { return records.empty() ? 0 : records.back().inner_pg_steps; }
};

struct InitialPoint {
    PhaseState theta;
    Precoder precoder;

    std::uint64_t fingerprint() const;
};

/// Random phases uniform on [0, 2pi) and a full-power starting precoder
/// (i.i.d. Gaussian columns, or diag(sqrt(P_T/K)) for SIMwoDB).
InitialPoint initialize(std::uint64_t seed, const ChannelSet& channels, double power_budget, Architecture arch);

struct AoResult {
    PhaseState theta;
    Precoder precoder;
    AoTrace trace;
};

AoResult run_ao(const Scheme& scheme, const ChannelSet& channels, const InitialPoint& start, const AoConfig& cfg);

} // namespace simbeam

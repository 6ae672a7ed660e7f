#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace simbeam {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Stacked phase-shift vector, blocked per layer: [theta^1; ...; theta^L].
/// Every entry has unit modulus; the only ways in are construction from
/// angles or projection of an arbitrary complex vector.
class PhaseState {
public:
    PhaseState() = default;

    /// All-ones (zero phase) state.
    PhaseState(Index n_meta, Index n_layers);

    static PhaseState from_angles(const RealVector& angles, Index n_meta);

    /// Element-wise projection onto the unit circle; zeros map to 1.
    static PhaseState project(const ComplexVector& raw, Index n_meta);

    const ComplexVector& values() const { return values_; }
    Index n_meta() const { return n_meta_; }
    Index n_layers() const { return n_meta_ == 0 ? 0 : values_.size() / n_meta_; }

    auto layer(Index l) const { return values_.segment(l * n_meta_, n_meta_); }

    /// max_i ||theta_i| - 1|
    double max_modulus_error() const;

private:
    ComplexVector values_;
    Index n_meta_ = 0;
};

enum class PrecoderMode { full, diagonal };

/// Digital beamforming matrix W (n_tx x users) under a sum-power budget.
struct Precoder {
    ComplexMatrix w;
    PrecoderMode mode = PrecoderMode::full;
    double power_budget = 0.0;

    double power() const { return w.squaredNorm(); }

    /// Largest off-diagonal magnitude; 0 for a structurally diagonal W.
    double off_diagonal_mass() const;
};

/// FNV-1a over the raw bytes of a complex array. Used to tie caches and
/// initial points to the exact values they were built from.
std::uint64_t fingerprint(std::span<const Complex> values,
                          std::uint64_t seed = 1469598103934665603ULL);
std::uint64_t fingerprint(const ComplexVector& v, std::uint64_t seed = 1469598103934665603ULL);
std::uint64_t fingerprint(const ComplexMatrix& m, std::uint64_t seed = 1469598103934665603ULL);

inline double nats_to_bits(double nats) { return nats / 0.69314718055994530942; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace simbeam

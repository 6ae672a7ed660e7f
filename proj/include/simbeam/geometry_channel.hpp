#pragma once

#include "simbeam/types.hpp"

#include <array>
#include <random>
#include <vector>

namespace simbeam {

using Point3 = std::array<double, 3>;

double distance(const Point3& a, const Point3& b);

/// Physical layout parameters needed to place the BS array and SIM layers.
struct GeometryParams {
    Index n_tx = 4;
    Index n_meta = 49;
    Index n_layers = 10;
    double wavelength = kSpeedOfLight / 28e9;
    double sim_thickness = 10.0 * (kSpeedOfLight / 28e9);
};

/// BS antennas sit in the plane z = 0; layer l (1-based) sits at z = l * layer_spacing.
/// Everything is centered on the boresight (z) axis.
struct SimGeometry {
    Index n_tx = 0;
    Index n_meta = 0;
    Index n_layers = 0;
    double wavelength = 0.0;
    double sim_thickness = 0.0;
    double layer_spacing = 0.0;
    double atom_pitch = 0.0;
    double atom_area = 0.0;
    /// atom_positions[l][n], row-major over the sqrt(N) x sqrt(N) grid.
    std::vector<std::vector<Point3>> atom_positions;
    std::vector<Point3> tx_positions;

    Index grid_side() const;
    double layer_side_length() const { return static_cast<double>(grid_side()) * atom_pitch; }
};

/// Deployment and large-scale fading parameters for one Monte Carlo drop.
struct DropConfig {
    std::uint64_t seed = 1;
    Index users = 4;
    double user_ring_center_distance = 100.0;
    double user_ring_radius = 10.0;
    double bs_height = 15.0;
    double ue_height = 1.6;
    double ref_distance = 1.0;
    double pathloss_c1 = 2.0;
    double pathloss_c2 = 3.5;

    void validate() const;
};

struct ChannelSet {
    /// F^1 is N x N_t, F^2..F^L are N x N.
    std::vector<ComplexMatrix> inter_layer;
    /// Column k is h_k.
    ComplexMatrix user_channels;
    RealMatrix correlation;
    /// Linear-scale channel variance multipliers (10^(-loss_dB/10)).
    std::vector<double> path_gains;
    double noise_power = 1.0;

    Index n_tx() const { return inter_layer.empty() ? 0 : inter_layer.front().cols(); }
    Index n_meta() const { return inter_layer.empty() ? 0 : inter_layer.front().rows(); }
    Index n_layers() const { return static_cast<Index>(inter_layer.size()); }
    Index users() const { return user_channels.cols(); }
};

/// Throws std::invalid_argument for a non-square N, L < 1 or non-positive lengths.
SimGeometry build_geometry(const GeometryParams& params);

/// Single Rayleigh-Sommerfeld transmission coefficient between two elements.
Complex rayleigh_sommerfeld_entry(double d, double cos_psi, double atom_area, double wavelength);

/// F^1 (BS -> layer 1) followed by F^2..F^L (layer l-1 -> layer l).
std::vector<ComplexMatrix> build_inter_layer_matrices(const SimGeometry& geom);

/// [R]_{n,n'} = sinc(2 d_{n,n'} / lambda) over the last layer, sinc(x) = sin(pi x)/(pi x).
RealMatrix build_correlation(const SimGeometry& geom);

double path_loss_db(double d_k, const DropConfig& cfg, double wavelength);

/// Linear variance multiplier for a user at 3-D distance d_k.
double path_gain(double d_k, const DropConfig& cfg, double wavelength);

/// 3-D BS-to-user distances for users placed uniformly on the deployment disk.
std::vector<double> sample_user_distances(const DropConfig& cfg, std::mt19937_64& rng);

/// Symmetric square root with negative eigenvalues clamped to zero.
RealMatrix psd_sqrt(const RealMatrix& r);

/// h_k = sqrt(gain_k) R^{1/2} g_k with g_k ~ CN(0, I).
ComplexMatrix sample_user_channels(const RealMatrix& correlation, const std::vector<double>& path_gains,
                                   std::mt19937_64& rng);

/// Same as above with a precomputed square root, for repeated draws.
ComplexMatrix sample_user_channels_with_sqrt(const RealMatrix& correlation_sqrt,
                                             const std::vector<double>& path_gains, std::mt19937_64& rng);

} // namespace simbeam

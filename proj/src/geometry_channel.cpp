#include "simbeam/geometry_channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simbeam {

double distance(const Point3& a, const Point3& b)
{
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace {

Index exact_sqrt(Index n)
{
    if (n <= 0)
        return -1;
    auto s = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
    return s * s == n ? s : -1;
}

} // namespace

Index SimGeometry::grid_side() const
{
    return exact_sqrt(n_meta);
}

void DropConfig::validate() const
{
    if (users < 1)
        throw std::invalid_argument("DropConfig: need at least one user");
    if (!(user_ring_center_distance > 0.0) || !(user_ring_radius >= 0.0) || !(bs_height > 0.0) ||
        !(ue_height > 0.0) || !(ref_distance > 0.0))
        throw std::invalid_argument("DropConfig: distances must be positive");
    if (user_ring_radius >= user_ring_center_distance)
        throw std::invalid_argument("DropConfig: user disk must not contain the BS");
    if (ref_distance > user_ring_center_distance - user_ring_radius)
        throw std::invalid_argument("DropConfig: reference distance exceeds nearest user distance");
}

SimGeometry build_geometry(const GeometryParams& params)
{
    const Index side = exact_sqrt(params.n_meta);
    if (side < 0)
        throw std::invalid_argument("build_geometry: n_meta=" + std::to_string(params.n_meta) +
                                    " is not a perfect square");
    if (params.n_layers < 1)
        throw std::invalid_argument("build_geometry: need at least one layer");
    if (params.n_tx < 1)
        throw std::invalid_argument("build_geometry: need at least one BS antenna");
    if (!(params.wavelength > 0.0) || !(params.sim_thickness > 0.0))
        throw std::invalid_argument("build_geometry: wavelength and thickness must be positive");

    SimGeometry g;
    g.n_tx = params.n_tx;
    g.n_meta = params.n_meta;
    g.n_layers = params.n_layers;
    g.wavelength = params.wavelength;
    g.sim_thickness = params.sim_thickness;
    g.layer_spacing = params.sim_thickness / static_cast<double>(params.n_layers);
    g.atom_pitch = params.wavelength / 2.0;
    g.atom_area = g.atom_pitch * g.atom_pitch;

    const double centre = (static_cast<double>(side) - 1.0) / 2.0;
    g.atom_positions.resize(static_cast<std::size_t>(g.n_layers));
    for (Index l = 0; l < g.n_layers; ++l) {
        auto& layer = g.atom_positions[static_cast<std::size_t>(l)];
        layer.reserve(static_cast<std::size_t>(g.n_meta));
        const double z = static_cast<double>(l + 1) * g.layer_spacing;
        for (Index row = 0; row < side; ++row)
            for (Index col = 0; col < side; ++col)
                layer.push_back({(static_cast<double>(col) - centre) * g.atom_pitch,
                                 (static_cast<double>(row) - centre) * g.atom_pitch, z});
    }

    const double tx_centre = (static_cast<double>(g.n_tx) - 1.0) / 2.0;
    for (Index i = 0; i < g.n_tx; ++i)
        g.tx_positions.push_back({(static_cast<double>(i) - tx_centre) * g.atom_pitch, 0.0, 0.0});
    return g;
}

Complex rayleigh_sommerfeld_entry(double d, double cos_psi, double atom_area, double wavelength)
{
    if (!(d > 0.0))
        throw std::invalid_argument("rayleigh_sommerfeld_entry: coincident elements (d <= 0)");
    if (!(cos_psi > 0.0) || cos_psi > 1.0 + 1e-12)
        throw std::invalid_argument("rayleigh_sommerfeld_entry: cos_psi outside (0, 1]");
    const Complex obliquity(1.0 / (2.0 * kPi * d), -1.0 / wavelength);
    return (atom_area * cos_psi / d) * obliquity * std::polar(1.0, 2.0 * kPi * d / wavelength);
}

namespace {

ComplexMatrix propagation_matrix(const std::vector<Point3>& to, const std::vector<Point3>& from,
                                 const SimGeometry& g)
{
    ComplexMatrix f(static_cast<Index>(to.size()), static_cast<Index>(from.size()));
    for (Index c = 0; c < f.cols(); ++c)
        for (Index r = 0; r < f.rows(); ++r) {
            const auto& a = to[static_cast<std::size_t>(r)];
            const auto& b = from[static_cast<std::size_t>(c)];
            const double d = distance(a, b);
            const double cos_psi = std::abs(a[2] - b[2]) / d;
            f(r, c) = rayleigh_sommerfeld_entry(d, cos_psi, g.atom_area, g.wavelength);
        }
    return f;
}

} // namespace

std::vector<ComplexMatrix> build_inter_layer_matrices(const SimGeometry& geom)
{
    std::vector<ComplexMatrix> mats;
    mats.reserve(static_cast<std::size_t>(geom.n_layers));
    mats.push_back(propagation_matrix(geom.atom_positions.front(), geom.tx_positions, geom));
    if (geom.n_layers > 1) {
        // Every adjacent pair of layers has the same relative geometry.
        const ComplexMatrix between = propagation_matrix(geom.atom_positions[1], geom.atom_positions[0], geom);
        for (Index l = 1; l < geom.n_layers; ++l)
            mats.push_back(between);
    }
    return mats;
}

RealMatrix build_correlation(const SimGeometry& geom)
{
    const auto& layer = geom.atom_positions.back();
    const Index n = geom.n_meta;
    RealMatrix r(n, n);
    for (Index i = 0; i < n; ++i) {
        r(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double x = 2.0 * kPi * distance(layer[static_cast<std::size_t>(i)],
                                                  layer[static_cast<std::size_t>(j)]) / geom.wavelength;
            r(i, j) = r(j, i) = std::sin(x) / x;
        }
    }
    return r;
}

double path_loss_db(double d_k, const DropConfig& cfg, double wavelength)
{
    if (!(cfg.ref_distance > 0.0) || d_k < cfg.ref_distance)
        throw std::invalid_argument("path_loss_db: link distance below reference distance");
    return 10.0 * cfg.pathloss_c1 * std::log10(4.0 * kPi * cfg.ref_distance / wavelength) +
           10.0 * cfg.pathloss_c2 * std::log10(d_k / cfg.ref_distance);
}

double path_gain(double d_k, const DropConfig& cfg, double wavelength)
{
    return std::pow(10.0, -path_loss_db(d_k, cfg, wavelength) / 10.0);
}

std::vector<double> sample_user_distances(const DropConfig& cfg, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double dz = cfg.bs_height - cfg.ue_height;
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(cfg.users));
    for (Index k = 0; k < cfg.users; ++k) {
        const double rho = cfg.user_ring_radius * std::sqrt(unit(rng));
        const double phi = 2.0 * kPi * unit(rng);
        const double x = cfg.user_ring_center_distance + rho * std::cos(phi);
        const double y = rho * std::sin(phi);
        d.push_back(std::sqrt(x * x + y * y + dz * dz));
    }
    return d;
}

RealMatrix psd_sqrt(const RealMatrix& r)
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(r);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    const RealVector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

ComplexMatrix sample_user_channels_with_sqrt(const RealMatrix& correlation_sqrt,
                                             const std::vector<double>& path_gains, std::mt19937_64& rng)
{
    const Index n = correlation_sqrt.rows();
    const auto users = static_cast<Index>(path_gains.size());
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    ComplexMatrix g(n, users);
    for (Index k = 0; k < users; ++k)
        for (Index i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, k) = Complex(re, im);
        }
    ComplexMatrix h = correlation_sqrt.cast<Complex>() * g;
    for (Index k = 0; k < users; ++k) {
        if (path_gains[static_cast<std::size_t>(k)] < 0.0)
            throw std::invalid_argument("sample_user_channels: negative path gain");
        h.col(k) *= std::sqrt(path_gains[static_cast<std::size_t>(k)]);
    }
    return h;
}

ComplexMatrix sample_user_channels(const RealMatrix& correlation, const std::vector<double>& path_gains,
                                   std::mt19937_64& rng)
{
    return sample_user_channels_with_sqrt(psd_sqrt(correlation), path_gains, rng);
}

} // namespace simbeam

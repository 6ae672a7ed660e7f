#include "simbeam/types.hpp"

#include <cstring>
#include <stdexcept>

namespace simbeam {

PhaseState::PhaseState(Index n_meta, Index n_layers)
    : values_(ComplexVector::Ones(n_meta * n_layers)), n_meta_(n_meta)
{
    if (n_meta <= 0 || n_layers <= 0)
        throw std::invalid_argument("PhaseState: dimensions must be positive");
}

PhaseState PhaseState::from_angles(const RealVector& angles, Index n_meta)
{
    if (n_meta <= 0 || angles.size() % n_meta != 0)
        throw std::invalid_argument("PhaseState: angle count is not a multiple of n_meta");
    PhaseState s;
    s.n_meta_ = n_meta;
    s.values_.resize(angles.size());
    for (Index i = 0; i < angles.size(); ++i)
        s.values_[i] = std::polar(1.0, angles[i]);
    return s;
}

PhaseState PhaseState::project(const ComplexVector& raw, Index n_meta)
{
    if (n_meta <= 0 || raw.size() % n_meta != 0)
        throw std::invalid_argument("PhaseState: length is not a multiple of n_meta");
    PhaseState s;
    s.n_meta_ = n_meta;
    s.values_.resize(raw.size());
    for (Index i = 0; i < raw.size(); ++i) {
        const double mag = std::abs(raw[i]);
        s.values_[i] = mag > 0.0 ? raw[i] / mag : Complex(1.0, 0.0);
    }
    return s;
}

double PhaseState::max_modulus_error() const
{
    double worst = 0.0;
    for (Index i = 0; i < values_.size(); ++i)
        worst = std::max(worst, std::abs(std::abs(values_[i]) - 1.0));
    return worst;
}

double Precoder::off_diagonal_mass() const
{
    double worst = 0.0;
    for (Index j = 0; j < w.cols(); ++j)
        for (Index i = 0; i < w.rows(); ++i)
            if (i != j)
                worst = std::max(worst, std::abs(w(i, j)));
    return worst;
}

std::uint64_t fingerprint(std::span<const Complex> values, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (const Complex& c : values) {
        double parts[2] = {c.real(), c.imag()};
        unsigned char bytes[sizeof(parts)];
        std::memcpy(bytes, parts, sizeof(parts));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::uint64_t fingerprint(const ComplexVector& v, std::uint64_t seed)
{
    return fingerprint(std::span<const Complex>(v.data(), static_cast<std::size_t>(v.size())), seed);
}

std::uint64_t fingerprint(const ComplexMatrix& m, std::uint64_t seed)
{
    return fingerprint(std::span<const Complex>(m.data(), static_cast<std::size_t>(m.size())), seed);
}

} // namespace simbeam

#include <doctest.h>

#include "simbeam/core_math.hpp"
#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

using namespace simbeam;
using namespace simbeam::testing;

namespace {

// G built entry by entry with explicit loops, without Eigen products.
ComplexMatrix chain_oracle(const ComplexVector& theta, const ChannelSet& ch)
{
    const Index n = ch.n_meta();
    ComplexMatrix g = ch.inter_layer[0];
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < g.cols(); ++c)
            g(r, c) *= theta[r];
    for (Index l = 1; l < ch.n_layers(); ++l) {
        const ComplexMatrix& f = ch.inter_layer[static_cast<std::size_t>(l)];
        ComplexMatrix next(n, g.cols());
        for (Index r = 0; r < n; ++r)
            for (Index c = 0; c < g.cols(); ++c) {
                Complex acc = 0.0;
                for (Index m = 0; m < n; ++m)
                    acc += f(r, m) * g(m, c);
                next(r, c) = theta[l * n + r] * acc;
            }
        g = next;
    }
    return g;
}

double rate_oracle(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& ch)
{
    const ComplexMatrix g = chain_oracle(theta, ch);
    double rate = 0.0;
    for (Index k = 0; k < ch.users(); ++k) {
        double signal = 0.0;
        double interference = 0.0;
        for (Index j = 0; j < ch.users(); ++j) {
            Complex z = 0.0;
            for (Index r = 0; r < g.rows(); ++r)
                for (Index c = 0; c < g.cols(); ++c)
                    z += std::conj(ch.user_channels(r, k)) * g(r, c) * w(c, j);
            (j == k ? signal : interference) += std::norm(z);
        }
        rate += std::log(1.0 + signal / (interference + ch.noise_power));
    }
    return rate;
}

} // namespace

TEST_CASE("wb_matrix")
{
    SUBCASE("single layer with identity phases is F^1")
    {
        const ChannelSet ch = random_channels(4, 1, 2, 2, 1);
        CHECK(wb_matrix(ComplexVector::Ones(4), ch) == ch.inter_layer[0]);
    }
    SUBCASE("common phase on one layer factors out")
    {
        const ChannelSet ch = random_channels(4, 3, 2, 2, 2);
        auto rng = make_rng(2, Stream::test);
        const ComplexVector theta = random_phases(12, rng);
        ComplexVector rotated = theta;
        const Complex phase = std::polar(1.0, 0.7);
        rotated.segment(4, 4) *= phase;
        CHECK((wb_matrix(rotated, ch) - phase * wb_matrix(theta, ch)).norm() <= 1e-13 * wb_matrix(theta, ch).norm());
    }
    SUBCASE("matches the matrix-chain oracle")
    {
        const ChannelSet ch = random_channels(4, 3, 2, 2, 3);
        auto rng = make_rng(3, Stream::test);
        const ComplexVector theta = random_phases(12, rng);
        const ComplexMatrix g = wb_matrix(theta, ch);
        CHECK((g - chain_oracle(theta, ch)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("dimension mismatch")
    {
        const ChannelSet ch = random_channels(4, 3, 2, 2, 4);
        CHECK_THROWS_AS(wb_matrix(ComplexVector::Ones(11), ch), std::invalid_argument);
    }
}

TEST_CASE("cascade cache factorisation")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const ChannelSet ch = random_channels(5, 4, 3, 3, seed);
        auto rng = make_rng(seed, Stream::test);
        const ComplexVector theta = random_phases(20, rng);
        const ComplexMatrix w = random_precoder(3, 3, 1.0, rng);
        const CascadeCache c = cascade_cache(theta, w, ch, CacheDepth::full);

        CHECK(c.g_plus.back() == ComplexMatrix::Identity(5, 5));
        CHECK(c.g_minus.front() == ch.inter_layer.front());

        const ComplexMatrix g = wb_matrix(theta, ch);
        const ComplexMatrix z = ch.user_channels.adjoint() * g * w;
        for (Index l = 0; l < 4; ++l) {
            const auto ul = static_cast<std::size_t>(l);
            const ComplexMatrix rebuilt = c.g_plus[ul] * theta.segment(l * 5, 5).asDiagonal() * c.g_minus[ul];
            CHECK((rebuilt - g).norm() <= 1e-9 * g.norm());
            for (Index k = 0; k < 3; ++k)
                for (Index j = 0; j < 3; ++j) {
                    const Complex v = theta.segment(l * 5, 5).transpose() * c.e(l, k, j);
                    CHECK(std::abs(v - z(k, j)) <= 1e-10 * std::max(1.0, std::abs(z(k, j))));
                }
        }

        const CascadeCache compact = cascade_cache(theta, w, ch, CacheDepth::compact);
        CHECK(compact.g_plus.empty());
        for (std::size_t l = 0; l < 4; ++l)
            CHECK((compact.e_vectors[l] - c.e_vectors[l]).norm() <= 1e-12 * c.e_vectors[l].norm());
    }
}

TEST_CASE("sinr")
{
    const ChannelSet ch = random_channels(4, 2, 2, 2, 7);
    auto rng = make_rng(7, Stream::test);
    const ComplexVector theta = random_phases(8, rng);
    const ComplexMatrix w = random_precoder(2, 2, 1.0, rng);

    CHECK(sinr(0, theta, ComplexMatrix::Zero(2, 2), ch) == 0.0);
    CHECK(sinr(1, theta, 2.0 * w, ch) > sinr(1, theta, w, ch));

    const ChannelSet single = random_channels(4, 2, 2, 1, 8);
    const ComplexMatrix w1 = random_precoder(2, 1, 1.0, rng);
    const Complex z = (single.user_channels.col(0).adjoint() * wb_matrix(theta, single) * w1)(0, 0);
    CHECK(sinr(0, theta, w1, single) == doctest::Approx(std::norm(z) / single.noise_power).epsilon(1e-12));

    ChannelSet noiseless = ch;
    noiseless.noise_power = 0.0;
    CHECK_THROWS_AS(sinr(0, theta, w, noiseless), std::invalid_argument);
}

TEST_CASE("sum rate")
{
    SUBCASE("zero precoder gives zero rate")
    {
        const ChannelSet ch = random_channels(4, 2, 2, 2, 9);
        CHECK(sum_rate(ComplexVector::Ones(8), ComplexMatrix::Zero(2, 2), ch) == 0.0);
    }
    SUBCASE("single user with SINR e - 1 gives one nat")
    {
        ChannelSet ch = random_channels(4, 2, 2, 1, 10);
        const ComplexMatrix w = ComplexMatrix::Constant(2, 1, Complex(0.5, 0.5));
        const Complex z = (ch.user_channels.col(0).adjoint() * wb_matrix(ComplexVector::Ones(8), ch) * w)(0, 0);
        ch.noise_power = std::norm(z) / (std::exp(1.0) - 1.0);
        CHECK(sum_rate(ComplexVector::Ones(8), w, ch) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("independent reimplementation")
    {
        for (std::uint64_t seed = 20; seed < 25; ++seed) {
            const ChannelSet ch = random_channels(6, 3, 3, 3, seed);
            auto rng = make_rng(seed, Stream::test);
            const ComplexVector theta = random_phases(18, rng);
            const ComplexMatrix w = random_precoder(3, 3, 2.0, rng);
            const double r = sum_rate(theta, w, ch);
            CHECK(r >= 0.0);
            CHECK(std::abs(r - rate_oracle(theta, w, ch)) <= 1e-10 * std::max(1.0, r));
        }
    }
    SUBCASE("compensating layer rotations cancel")
    {
        const ChannelSet ch = random_channels(4, 3, 2, 2, 30);
        auto rng = make_rng(30, Stream::test);
        const ComplexVector theta = random_phases(12, rng);
        const ComplexMatrix w = random_precoder(2, 2, 1.0, rng);
        ComplexVector rotated = theta;
        rotated.segment(0, 4) *= std::polar(1.0, 1.1);
        rotated.segment(8, 4) *= std::polar(1.0, -1.1);
        CHECK(sum_rate(rotated, w, ch) == doctest::Approx(sum_rate(theta, w, ch)).epsilon(1e-12));
        // A single-layer rotation is a global phase, which |.|^2 also removes.
        rotated = theta;
        rotated.segment(4, 4) *= std::polar(1.0, 2.3);
        CHECK(sum_rate(rotated, w, ch) == doctest::Approx(sum_rate(theta, w, ch)).epsilon(1e-12));
    }
}

TEST_CASE("gradient against central finite differences")
{
    const double h = 1e-6;
    for (std::uint64_t seed = 40; seed < 50; ++seed) {
        const ChannelSet ch = random_channels(8, 2, 2, 2, seed);
        auto rng = make_rng(seed, Stream::test);
        const ComplexVector theta = random_phases(16, rng);
        const ComplexMatrix w = random_precoder(2, 2, 1.0, rng);
        const ComplexVector grad = grad_theta(theta, w, ch, cascade_cache(theta, w, ch));
        for (int trial = 0; trial < 4; ++trial) {
            const ComplexVector delta = random_complex(16, 1, rng).col(0).normalized();
            const double fd = (sum_rate(theta + h * delta, w, ch) - sum_rate(theta - h * delta, w, ch)) / (2.0 * h);
            const double analytic = 2.0 * grad.dot(delta).real();
            CHECK(std::abs(fd - analytic) <= 1e-5 * std::abs(analytic));
        }
    }
}

TEST_CASE("gradient edge cases")
{
    auto rng = make_rng(60, Stream::test);
    const ComplexVector theta = random_phases(16, rng);

    SUBCASE("zero precoder")
    {
        const ChannelSet ch = random_channels(8, 2, 2, 2, 60);
        const ComplexMatrix w = ComplexMatrix::Zero(2, 2);
        CHECK(grad_theta(theta, w, ch, cascade_cache(theta, w, ch)).norm() == 0.0);
    }
    SUBCASE("single user, overwhelming noise")
    {
        ChannelSet ch = random_channels(8, 2, 2, 1, 61);
        const ComplexMatrix w = random_precoder(2, 1, 1.0, rng);
        ch.noise_power = 1.0;
        const double base = grad_theta(theta, w, ch, cascade_cache(theta, w, ch)).norm();
        ch.noise_power = 1e12;
        const double flat = grad_theta(theta, w, ch, cascade_cache(theta, w, ch)).norm();
        CHECK(flat < 1e-10 * base);
    }
    SUBCASE("stale cache is rejected")
    {
        const ChannelSet ch = random_channels(8, 2, 2, 2, 62);
        const ComplexMatrix w = random_precoder(2, 2, 1.0, rng);
        const CascadeCache c = cascade_cache(theta, w, ch);
        ComplexVector moved = theta;
        moved[3] *= std::polar(1.0, 0.1);
        CHECK_THROWS_AS(grad_theta(moved, w, ch, c), std::logic_error);
        CHECK_THROWS_AS(grad_theta(theta, 2.0 * w, ch, c), std::logic_error);
    }
}

#include "simbeam/core_math.hpp"

#include <cmath>
#include <stdexcept>

namespace simbeam {

namespace {

void check_dimensions(const ComplexVector& theta, const ChannelSet& ch)
{
    if (ch.inter_layer.empty())
        throw std::invalid_argument("cascade: no layers");
    if (theta.size() != ch.n_meta() * ch.n_layers())
        throw std::invalid_argument("cascade: theta length does not match N*L");
}

void check_precoder(const ComplexMatrix& w, const ChannelSet& ch)
{
    if (w.rows() != ch.n_tx() || w.cols() != ch.users())
        throw std::invalid_argument("cascade: W must be n_tx x users");
}

auto layer_of(const ComplexVector& theta, Index n, Index l)
{
    return theta.segment(l * n, n);
}

} // namespace

ComplexMatrix wb_matrix(const ComplexVector& theta, const ChannelSet& channels)
{
    check_dimensions(theta, channels);
    const Index n = channels.n_meta();
    ComplexMatrix g = layer_of(theta, n, 0).asDiagonal() * channels.inter_layer[0];
    for (Index l = 1; l < channels.n_layers(); ++l)
        g = layer_of(theta, n, l).asDiagonal() * (channels.inter_layer[static_cast<std::size_t>(l)] * g);
    return g;
}

ComplexMatrix propagate_precoder(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels)
{
    check_dimensions(theta, channels);
    check_precoder(w, channels);
    const Index n = channels.n_meta();
    ComplexMatrix x = layer_of(theta, n, 0).asDiagonal() * (channels.inter_layer[0] * w);
    for (Index l = 1; l < channels.n_layers(); ++l)
        x = layer_of(theta, n, l).asDiagonal() * (channels.inter_layer[static_cast<std::size_t>(l)] * x);
    return x;
}

ComplexMatrix received_gains(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels)
{
    return channels.user_channels.adjoint() * propagate_precoder(theta, w, channels);
}

double sinr(Index k, const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels)
{
    if (!(channels.noise_power > 0.0))
        throw std::invalid_argument("sinr: noise power must be positive");
    if (k < 0 || k >= channels.users())
        throw std::out_of_range("sinr: user index");
    const ComplexMatrix z = received_gains(theta, w, channels);
    const double total = z.row(k).squaredNorm();
    const double desired = std::norm(z(k, k));
    return desired / (total - desired + channels.noise_power);
}

double sum_rate_from_gains(const ComplexMatrix& z, double noise_power)
{
    double rate = 0.0;
    for (Index k = 0; k < z.rows(); ++k) {
        const double desired = std::norm(z(k, k));
        double interference = 0.0;
        for (Index j = 0; j < z.cols(); ++j)
            if (j != k)
                interference += std::norm(z(k, j));
        rate += std::log1p(desired / (interference + noise_power));
    }
    return rate;
}

double sum_rate(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels)
{
    if (!(channels.noise_power > 0.0))
        throw std::invalid_argument("sum_rate: noise power must be positive");
    return sum_rate_from_gains(received_gains(theta, w, channels), channels.noise_power);
}

bool CascadeCache::matches(const ComplexVector& theta, const ComplexMatrix& w) const
{
    return theta_fingerprint == fingerprint(theta) && precoder_fingerprint == fingerprint(w);
}

CascadeCache cascade_cache(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels,
                           CacheDepth depth)
{
    check_dimensions(theta, channels);
    check_precoder(w, channels);
    const Index n = channels.n_meta();
    const Index layers = channels.n_layers();
    const Index users = channels.users();
    const auto L = static_cast<std::size_t>(layers);

    CascadeCache c;
    c.users = users;
    c.theta_fingerprint = fingerprint(theta);
    c.precoder_fingerprint = fingerprint(w);

    // Prefix products: G^{1-} = F^1, G^{l-} = F^l Theta^{l-1} G^{(l-1)-}.
    c.g_minus.resize(L);
    c.g_minus[0] = channels.inter_layer[0];
    for (std::size_t l = 1; l < L; ++l)
        c.g_minus[l] = channels.inter_layer[l] *
                       (layer_of(theta, n, static_cast<Index>(l - 1)).asDiagonal() * c.g_minus[l - 1]);
    c.g_full = layer_of(theta, n, layers - 1).asDiagonal() * c.g_minus[L - 1];

    // Suffix side: G^{L+} = I, G^{(l-1)+} = G^{l+} Theta^l F^l.
    const ComplexMatrix h_adj = channels.user_channels.adjoint();
    c.user_rows.resize(L);
    if (depth == CacheDepth::full) {
        c.g_plus.resize(L);
        c.g_plus[L - 1] = ComplexMatrix::Identity(n, n);
        for (std::size_t l = L - 1; l > 0; --l)
            c.g_plus[l - 1] = (c.g_plus[l] * layer_of(theta, n, static_cast<Index>(l)).asDiagonal()) *
                              channels.inter_layer[l];
        for (std::size_t l = 0; l < L; ++l)
            c.user_rows[l] = h_adj * c.g_plus[l];
    } else {
        c.user_rows[L - 1] = h_adj;
        for (std::size_t l = L - 1; l > 0; --l)
            c.user_rows[l - 1] = (c.user_rows[l] * layer_of(theta, n, static_cast<Index>(l)).asDiagonal()) *
                                 channels.inter_layer[l];
    }

    c.e_vectors.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        const ComplexMatrix forward = c.g_minus[l] * w; // columns G^{l-} w_j
        ComplexMatrix& e = c.e_vectors[l];
        e.resize(n, users * users);
        for (Index k = 0; k < users; ++k)
            for (Index j = 0; j < users; ++j)
                e.col(k * users + j) = c.user_rows[l].row(k).transpose().cwiseProduct(forward.col(j));
    }
    return c;
}

ComplexVector grad_theta(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels,
                         const CascadeCache& cache)
{
    check_dimensions(theta, channels);
    check_precoder(w, channels);
    if (!cache.matches(theta, w))
        throw std::logic_error("grad_theta: cascade cache is stale");
    if (!(channels.noise_power > 0.0))
        throw std::invalid_argument("grad_theta: noise power must be positive");

    const Index n = channels.n_meta();
    const Index users = channels.users();
    const double sigma2 = channels.noise_power;
    ComplexVector grad = ComplexVector::Zero(theta.size());

    for (Index l = 0; l < channels.n_layers(); ++l) {
        const auto theta_l = layer_of(theta, n, l);
        const ComplexMatrix& e = cache.e_vectors[static_cast<std::size_t>(l)];
        // proj(k*K + j) = (theta^l)^T e^l_{k,j} = h_k^H G w_j
        const ComplexVector proj = e.transpose() * theta_l;
        ComplexVector coeff(users * users);
        for (Index k = 0; k < users; ++k) {
            double total = sigma2;
            double interference = sigma2;
            for (Index j = 0; j < users; ++j) {
                const double p = std::norm(proj[k * users + j]);
                total += p;
                if (j != k)
                    interference += p;
            }
            for (Index j = 0; j < users; ++j) {
                double c = 1.0 / total;
                if (j != k)
                    c -= 1.0 / interference;
                coeff[k * users + j] = c * proj[k * users + j];
            }
        }
        // sum_{k,j} coeff_{kj} conj(e^l_{k,j})
        grad.segment(l * n, n) = e.conjugate() * coeff;
    }
    return grad;
}

} // namespace simbeam

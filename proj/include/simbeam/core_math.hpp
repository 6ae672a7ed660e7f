#pragma once

#include "simbeam/geometry_channel.hpp"
#include "simbeam/types.hpp"

#include <cstdint>
#include <vector>

namespace simbeam {

/// G = Theta^L F^L ... Theta^1 F^1 (N x N_t). theta may be any complex
/// vector of length N*L; unit modulus is not required here.
ComplexMatrix wb_matrix(const ComplexVector& theta, const ChannelSet& channels);

/// G W computed by pushing the K columns of W through the cascade, which is
/// much cheaper than forming G when K << N.
ComplexMatrix propagate_precoder(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels);

/// Z with Z(k, j) = h_k^H G w_j.
ComplexMatrix received_gains(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels);

double sinr(Index k, const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels);

/// Sum rate in nats from a precomputed Z = H^H G W.
double sum_rate_from_gains(const ComplexMatrix& z, double noise_power);

/// R(theta, W) = sum_k ln(1 + SINR_k), in nats.
double sum_rate(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels);

enum class CacheDepth {
    /// Also store the N x N suffix products G^{l+}; O(L N^3).
    full,
    /// Store only what the gradient needs; O(L N^2 K).
    compact,
};

/// Prefix/suffix factorization of the cascade around each layer:
///   G = G^{l+} Theta^l G^{l-},  G^{1-} = F^1,  G^{L+} = I_N,
/// and the vectors e^l_{k,j} = diag(h_k^H G^{l+}) G^{l-} w_j, which satisfy
/// (theta^l)^T e^l_{k,j} = h_k^H G w_j.
struct CascadeCache {
    std::vector<ComplexMatrix> g_minus;
    /// Empty under CacheDepth::compact.
    std::vector<ComplexMatrix> g_plus;
    ComplexMatrix g_full;
    /// user_rows[l] = H^H G^{l+} (K x N).
    std::vector<ComplexMatrix> user_rows;
    /// e^l_{k,j} stored as column k*K + j of e_vectors[l] (N x K^2).
    std::vector<ComplexMatrix> e_vectors;
    Index users = 0;
    std::uint64_t theta_fingerprint = 0;
    std::uint64_t precoder_fingerprint = 0;

    auto e(Index l, Index k, Index j) const { return e_vectors[static_cast<std::size_t>(l)].col(k * users + j); }
    bool matches(const ComplexVector& theta, const ComplexMatrix& w) const;
};

CascadeCache cascade_cache(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels,
                           CacheDepth depth = CacheDepth::full);

/// Closed-form gradient of R with respect to conj(theta), blocked per layer.
/// The directional derivative along delta is 2 Re{grad^H delta}.
/// Throws std::logic_error when the cache was built from different theta or W.
ComplexVector grad_theta(const ComplexVector& theta, const ComplexMatrix& w, const ChannelSet& channels,
                         const CascadeCache& cache);

} // namespace simbeam

#pragma once

#include "cbtau/linalg.hpp"
#include "cbtau/series.hpp"
#include "cbtau/verma.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace cbtau {

struct VirParams {
    Scalar c;
    Scalar delta;

    static VirParams from_b(const Scalar& b, const Scalar& delta);
    // Delta = Q^2/4 - P^2
    static VirParams from_b_momentum(const Scalar& b, const Scalar& p);
};

Scalar vir_central_charge(const Scalar& b);
// Delta_{m,n} = (Q^2 - (m/b + n b)^2)/4
Scalar vir_degenerate_weight(const Scalar& b, long m, long n);

// Throws DegenerateWeightError if delta equals some Delta_{m,n} with m n <= level.
// Works from c alone: each pair Delta_{m,n}, Delta_{n,m} is symmetric in b <-> 1/b.
void vir_kac_guard(const VirParams& p, long level);

// Product formula for the Kac determinant at the given level, up to a nonzero constant:
// prod_{mn <= level} (Delta - Delta_{m,n})^{p(level - mn)}, from c and delta only.
Scalar vir_kac_product(const VirParams& p, long level);

Matrix gram_matrix(const VirParams& p, long level);

// Level-graded vector; levels[N] lives in the level-N subspace of the Verma module.
struct ChainVector {
    std::vector<State> levels;
};

// rho(k, N): L_k |N> = rho(k, N) |N-k>
using ChainRule = std::function<Scalar(long k, long n)>;

ChainRule vir_chain_rule(const Scalar& delta, const Scalar& d1, const Scalar& d2);
ChainRule vir_whittaker_rule();

// <w|N> for a basis word w at level N, from the chain rule alone.
Scalar vir_chain_projection(const Word& w, long n, const ChainRule& rule);

ChainVector chain_vector(const VirParams& p, const Scalar& d1, const Scalar& d2, long n_max);
ChainVector whittaker_vector(const VirParams& p, long n_max);

// B(0..n_max). Regular: <N|_{34} |N>_{21} with the conjugate chain from (d4, d3).
std::vector<Scalar> block_regular_coeffs(const VirParams& p, const std::array<Scalar, 4>& ext, long n_max);
std::vector<Scalar> block_irregular_coeffs(const VirParams& p, long n_max);

// q^Delta sum B(N) q^N; requires a real rational Delta.
Series block_regular(const VirParams& p, const std::array<Scalar, 4>& ext, long n_max);
Series block_irregular(const VirParams& p, long n_max);

// Helper: q^e0 sum_N coeffs[N] q^{N*step}, cutoff at e0 + (size-1)*step.
Series series_from_coeffs(const Rational& e0, const std::vector<Scalar>& coeffs, const Rational& step = 1);
Rational real_exponent(const Scalar& s, const char* what);

}  // namespace cbtau

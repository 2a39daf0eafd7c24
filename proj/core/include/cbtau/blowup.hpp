#pragma once

#include "cbtau/scalar.hpp"

#include <array>
#include <map>
#include <vector>

namespace cbtau {

// coeff * 2^log2. The odd s-products carry a factor 2^{1/8}; these only ever occur in
// combinations whose total power of two is integral, which exact() asserts.
struct Surd2 {
    Scalar coeff{1};
    Rational log2{0};

    Scalar exact() const;  // throws ParamError unless log2 is an integer
    friend Surd2 operator*(const Surd2& a, const Surd2& b) { return {a.coeff * b.coeff, a.log2 + b.log2}; }
};

// Index pairs (i, j >= 0) with i + j < bound and i + j = parity mod 2.
struct LatticePoint {
    int i, j;
};
std::vector<LatticePoint> lattice_points(long bound, int parity);

// prod over i+j < 2m of the given parity of (x + i e1 + j e2), m >= 0.
Scalar lattice_product(const Scalar& x, long two_m, int parity, const Scalar& e1, const Scalar& e2);

// s_even(x, m) for integer m, with s_even(x, m) = (-1)^m s_even(Q - x, -m) for m < 0.
Scalar s_even(const Scalar& x, const Rational& m, const Scalar& b);
// s_odd(x, m) for m in Z + 1/2, including the 2^{1/8}; s_odd(x, m) = s_odd(Q - x, -m) for m < 0.
Surd2 s_odd(const Scalar& x, const Rational& m, const Scalar& b);

// Omega_n^2(P) fixed by <P,n|P,n> = 1; negative n uses Omega_n(P) = Omega_{-n}(-P).
Scalar omega_sq(const Scalar& p, const Rational& n, const Scalar& b);

// l_{nn'}(P, alpha, P') / (Omega_n(P) Omega_{n'}(P')), exact.
Scalar l_reduced(const Scalar& b, const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n,
                 const Rational& np);
Scalar l_squared(const Scalar& b, const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n,
                 const Rational& np);

// Chain-vector coefficient l_n = <P,n|Phi_{alpha}(1)|P_1> with alpha = P_2 + Q/2. The ket momentum only
// enters through P_1^2, so it is passed squared and stays rational for rational weights.
Scalar l_n21_squared(const Scalar& p, const Scalar& b, const Scalar& p1_sq, const Scalar& p2, const Rational& n);
// The product l_n(P_1, P_2) l_n(P_4, P_3) of two such coefficients, taken on a common root branch.
Scalar l_n21_pair(const Scalar& p, const Scalar& b, const Scalar& p1_sq, const Scalar& p2, const Scalar& p4_sq,
                  const Scalar& p3, const Rational& n);

// Whittaker coefficient l_n(P, b)^2 = coeff * beta1^{-exp1} * beta2^{-exp2}; the beta powers are
// kept symbolic since Delta_n^{(eta)} are generally not integers.
struct IrregularSquared {
    Scalar coeff;
    Scalar beta1, beta2;
    Scalar exp1, exp2;  // Delta_n^{(1)}, Delta_n^{(2)}
};
IrregularSquared l_n_irr_squared(const Scalar& p, const Scalar& b, const Rational& n);

// (-1)^{2n} s_e(2a, 2n) s_e(2a + e1 + e2, 2n) with the equivariant parameters (e1, e2).
Scalar blowup_factor(const Scalar& a, const Scalar& e1, const Scalar& e2, const Rational& n);

// Exact ratios of products of Barnes G(1 + y + r) and Gamma(y + r) factors, where every base y
// appears with shifts r whose net multiplicity in each class r mod 1 vanishes. Such ratios
// telescope through G(z+1) = Gamma(z) G(z) and Gamma(z+1) = z Gamma(z) into rational functions.
class BarnesRatio {
public:
    void add_barnes(const Scalar& y, const Rational& r, int mult);
    void add_gamma(const Scalar& y, const Rational& r, int mult);
    Scalar evaluate() const;  // ParamError if not elementary, PoleError on a vanishing factor

private:
    std::map<Scalar, std::map<Rational, long>> barnes_, gamma_;
};

// C(sigma) = 1 / (G(1 - 2 sigma) G(1 + 2 sigma)).
void add_c_p3(BarnesRatio& r, const Scalar& sigma, const Rational& shift, int mult);
// C(sigma, theta) with theta = (theta_0, theta_t, theta_1, theta_inf).
void add_c_p6(BarnesRatio& r, const Scalar& sigma, const std::array<Scalar, 4>& theta, const Rational& shift, int mult);

// C(sigma + m + n) C(sigma - n) / (C(sigma) C(sigma + m)).
Scalar c_ratio_p3(const Scalar& sigma, const Rational& n, long m = 0);
// C(sigma + n) C(sigma - n) / C(sigma)^2 for integer n; for half-integer n the Barnes ratio is not
// elementary and the normalization C(sigma + 1/2) C(sigma - 1/2) is used instead.
Scalar c_ratio_p6(const Scalar& sigma, const std::array<Scalar, 4>& theta, const Rational& n);

// The product forms of the two ratios above.
Scalar c_ratio_p3_product(const Scalar& sigma, const Rational& n);
Scalar c_ratio_p6_product(const Scalar& sigma, const std::array<Scalar, 4>& theta, const Rational& n);

// Mutation hook for the acceptance self-test: when set, s-products use i + j <= 2m.
void set_lattice_bound_mutation(bool on);

}  // namespace cbtau

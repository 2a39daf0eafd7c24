#pragma once

#include "cbtau/series.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cbtau {

// q^delta * body(q). The prefactor exponent is kept symbolic because block weights are
// Gaussian rationals; body exponents are real rationals.
struct GradedSeries {
    Scalar delta;
    Series body;

    // Re-expresses the series over the base exponent `base`; the difference must be real.
    GradedSeries rebased(const Scalar& base) const;
    GradedSeries& operator+=(const GradedSeries& o);
    GradedSeries& operator-=(const GradedSeries& o);
    GradedSeries& operator*=(const Scalar& c);
    friend GradedSeries operator+(GradedSeries a, const GradedSeries& b) { return a += b; }
    friend GradedSeries operator-(GradedSeries a, const GradedSeries& b) { return a -= b; }
    friend GradedSeries operator*(const Scalar& c, GradedSeries a) { return a *= c; }
};

GradedSeries graded_mul(const GradedSeries& f, const GradedSeries& g);
// q d/dq
GradedSeries graded_theta(const GradedSeries& f);
// Multiplies by a polynomial sum_i poly[i] q^i.
GradedSeries graded_poly_mul(const std::vector<Scalar>& poly, const GradedSeries& f);

// D^k_{e1,e2}: f(e^{e1 a} q) g(e^{e2 a} q) = sum_k D^k(f, g) a^k / k!
struct HirotaSpec {
    long k = 0;
    Scalar e1{1};
    Scalar e2{-1};
};

GradedSeries hirota(const HirotaSpec& spec, const GradedSeries& f, const GradedSeries& g);

// poly(q) (q d/dq)^theta D^k_{e1,e2}
struct BilinearTerm {
    std::vector<Scalar> poly;
    long theta = 0;
    HirotaSpec hirota;
};

class BilinearOperator {
public:
    BilinearOperator() = default;
    explicit BilinearOperator(std::vector<BilinearTerm> terms) : terms_(std::move(terms)) {}

    const std::vector<BilinearTerm>& terms() const { return terms_; }
    GradedSeries apply(const GradedSeries& f, const GradedSeries& g) const;
    // Image of (q^a, q^b): sum_i out[i] q^{a+b+i}.
    std::vector<Scalar> symbol(const Scalar& a, const Scalar& b) const;
    Scalar symbol_at(const Scalar& a, const Scalar& b, long i) const;
    long degree() const;

private:
    std::vector<BilinearTerm> terms_;
};

// 1/2 D^4 - t d/dt D^2 + 1/2 D^2 + 2t D^0
BilinearOperator op_DIII();
// D^4 + 2 q d/dq D^2 - (1+Q^2) D^2 + q D^0, all with weights (b, 1/b)
BilinearOperator op_DIII_b(const Scalar& b);
// weights ordered (Delta_0, Delta_t, Delta_1, Delta_inf)
BilinearOperator op_DVI(const std::array<Scalar, 4>& delta);
// NS weights ordered (Delta_1, Delta_2, Delta_3, Delta_4)
BilinearOperator op_DVI_b(const Scalar& b, const std::array<Scalar, 4>& delta_ns);

// Mutation hook for the acceptance self-test: when set, D^III carries 3t D^0 instead of 2t D^0.
void set_operator_mutation(bool on);

GradedSeries apply_DIII(const GradedSeries& f, const GradedSeries& g);
GradedSeries apply_DIII_b(const Scalar& b, const GradedSeries& f, const GradedSeries& g);
GradedSeries apply_DVI(const std::array<Scalar, 4>& delta, const GradedSeries& f, const GradedSeries& g);
GradedSeries apply_DVI_b(const Scalar& b, const std::array<Scalar, 4>& delta_ns, const GradedSeries& f,
                         const GradedSeries& g);

// ---- identity catalog ----

enum class Identity {
    blockdecomp,   // F_NS = sum l^2 F1 F2 (irregular)
    bilin,         // sum l^2 D^III_b = 0
    bilin0,        // integer n only
    bilin1,        // half-integer n only
    relsh20,       // sum l^2 D^2 = -q^{1/2} sum l^2 F1 F2
    t1,            // sum l^2 D^1 = 0
    hat_f3,        // sum l^2 D^3 = -Q q^{1/2} F_NS
    relsh32,       // sum l^2 D^3 = Q sum l^2 D^2
    s0,            // c = 1 Painleve III, s^0 coefficient
    s1,            // s^1 coefficient
    sm,            // s^m coefficient for params.m
    s0_p6,         // c = 1 Painleve VI, s^0 coefficient
    s1_p6,
    chdecomp,      // F_NS = sum l21 l34 F1 F2 (regular)
    pvi_bilin,     // sum l21 l34 D^VI_b = 0
    t1g,           // sum l21 l34 D^1 = 0
    t2g,           // (1-q) sum l21 l34 D^2 = -q^{1/2} F~_NS
    t3g,           // (1-q)^2 sum l21 l34 D^3 = -Q q^{1/2}(1+q) F~_NS
    relsh32g,      // (1-q) sum D^3 = Q (1+q) sum D^2
};

const std::vector<std::pair<std::string, Identity>>& identity_names();
Identity parse_identity(const std::string& name);
std::string identity_name(Identity id);

struct IdentityParams {
    Scalar b{2};
    Scalar p{rat(1, 3)};
    // momenta P_1..P_4 of the external fields; NS weights are (Q^2/4 - P_k^2)/2
    std::array<Scalar, 4> momenta{Scalar(rat(1, 5)), Scalar(rat(2, 7)), Scalar(rat(3, 11)), Scalar(rat(1, 13))};
    Scalar sigma{rat(1, 5)};
    // theta_0, theta_t, theta_1, theta_inf
    std::array<Scalar, 4> theta{Scalar(rat(1, 7)), Scalar(rat(2, 9)), Scalar(rat(1, 11)), Scalar(rat(3, 13))};
    long m = 0;
    // Additional n-shells beyond the truncation rule; they must not change retained coefficients.
    long extra_shells = 0;
};

struct Residual {
    GradedSeries value;
    Rational order;  // relative to value.delta
    bool vanishes() const;
};

// Residual (lhs - rhs) of the identity, exact to relative order n_max above its leading exponent.
Residual verify_identity(Identity id, const IdentityParams& params, const Rational& n_max);

// sum_n C(sigma+n+m) C(sigma-n) Op(F((sigma+n+m)^2|t), F((sigma-n)^2|t)) / (C(sigma) C(sigma+m)) at c = 1
// with irregular (Painleve III) or regular (Painleve VI) blocks, for an arbitrary operator.
// The s^m identities are this sum with D^III or D^VI.
GradedSeries c1_lattice_sum(const BilinearOperator& op, const IdentityParams& params, long m, bool regular,
                            const Rational& n_max);

// ---- fast expansion ----

enum class FastScheme { c1_irregular, c1_regular, generic_irregular, generic_regular };

FastScheme parse_scheme(const std::string& name);
std::string scheme_name(FastScheme s);

struct FastParams {
    Scalar sigma{rat(1, 5)};
    std::array<Scalar, 4> theta{Scalar(rat(1, 7)), Scalar(rat(2, 9)), Scalar(rat(1, 11)), Scalar(rat(3, 13))};
    Scalar b{2};
    Scalar p{rat(1, 3)};
    std::array<Scalar, 4> momenta{Scalar(rat(1, 5)), Scalar(rat(2, 7)), Scalar(rat(3, 11)), Scalar(rat(1, 13))};
    unsigned threads = 1;
};

// Lattice point (i, k): for c = 1 the center sigma + i (k = 0); for generic b the momentum
// P + 2 i b + 2 k / b. `first` holds the block at that point (c = 1, or charge c1 at weight
// Delta^(1)_0), `second` the charge-c2 block (generic schemes only).
struct CoeffTable {
    FastScheme scheme;
    Scalar center;
    long n_max = 0;
    std::map<std::pair<long, long>, std::vector<Scalar>> first;
    std::map<std::pair<long, long>, std::vector<Scalar>> second;

    const std::vector<Scalar>& at(long i, long k = 0) const;
    Scalar lattice_momentum(long i, long k, const Scalar& b) const;
};

CoeffTable fast_block(FastScheme scheme, const FastParams& params, long n_max);

// Recomputes B(n, sigma+1) from the s^1 relation centered between sigma and sigma+1, using
// the table's values at sigma; the table itself obtained it from the relation centered at sigma+1.
Scalar c1_irregular_shifted_value(const CoeffTable& table, const FastParams& params, long n);

}  // namespace cbtau

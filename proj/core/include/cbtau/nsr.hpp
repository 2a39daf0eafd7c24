#pragma once

#include "cbtau/linalg.hpp"
#include "cbtau/series.hpp"
#include "cbtau/verma.hpp"

#include <array>
#include <map>
#include <tuple>
#include <vector>

namespace cbtau {

struct NsrParams {
    Scalar b;
    Scalar delta;  // NS highest weight

    Scalar Q() const { return b + b.inverse(); }
    Scalar c() const;  // 1 + 2 Q^2

    static NsrParams from_momentum(const Scalar& b, const Scalar& p);
};

// Delta^NS(P) = (Q^2/4 - P^2)/2
Scalar nsr_weight(const Scalar& b, const Scalar& p);

// Throws DegenerateWeightError when delta hits (Q^2 - (m/b + n b)^2)/8, m - n even,
// m n / 2 <= level; also rejects b^2 in {0, 1}.
void nsr_guard(const NsrParams& p, const Rational& level);

Matrix nsr_gram_matrix(const NsrParams& p, const Rational& level);

// The two chain families, indexed by level in steps of 1/2.
struct NsrChainPair {
    std::vector<State> plain;
    std::vector<State> tilded;
};

enum class ChainFamily { plain, tilded };

// <w|N> (or <w|N~>) from the recursions alone; w must have level n.
// The seeds are the normalizations of |0> and |0~> (both 1 by default).
Scalar nsr_chain_projection(const Scalar& delta, const Scalar& d1, const Scalar& d2, const Word& w, Rational n,
                            ChainFamily family, const Scalar& plain_seed = Scalar(1),
                            const Scalar& tilde_seed = Scalar(1));
// Whittaker limit: G_{1/2}|N> = |N-1/2>, G_{3/2}|N> = 0.
Scalar nsr_whittaker_projection(const Word& w);

NsrChainPair nsr_chain_pair(const NsrParams& p, const Scalar& d1, const Scalar& d2, const Rational& n_max);

// Sign relating <w2|Phi(1)|w1> to <w1|Phi(1)|w2> for states at levels n1, n2.
Scalar conjugation_sign(const Rational& n1, const Rational& n2);

// Coefficients at levels 0, 1/2, 1, ... of F and F~.
struct NsrBlockCoeffs {
    std::vector<Scalar> plain;
    std::vector<Scalar> tilded;
};
NsrBlockCoeffs nsr_block_coeffs(const NsrParams& p, const std::array<Scalar, 4>& ext, const Rational& n_max);
std::pair<Series, Series> nsr_blocks(const NsrParams& p, const std::array<Scalar, 4>& ext, const Rational& n_max);

std::vector<Scalar> nsr_block_irregular_coeffs(const NsrParams& p, const Rational& n_max);
Series nsr_block_irregular(const NsrParams& p, const Rational& n_max);

// Matrix elements <A|O(1)|B> of the primary Phi_alpha (weight h) and its superpartner
// Psi (weight h + 1/2) between descendants A of |delta_left> and B of |delta_right>,
// normalized by <left|Phi|right> = <left|Psi|right> = 1, obtained from the Ward identities.
// With AlgebraKind::virasoro only L modes occur and Psi is never reached.
class VertexMatrixElements {
public:
    enum class Field { phi, psi };

    VertexMatrixElements(const Scalar& c, const Scalar& delta_left, const Scalar& h, const Scalar& delta_right,
                         AlgebraKind kind = AlgebraKind::neveu_schwarz)
        : left_(kind, c, delta_left), h_(h), delta_right_(delta_right)
    {
    }

    Scalar element(Field f, const Word& a, const Word& b);

private:
    VermaModule left_;
    Scalar h_, delta_right_;
    std::map<std::tuple<Field, Word, Word>, Scalar> cache_;
};

}  // namespace cbtau

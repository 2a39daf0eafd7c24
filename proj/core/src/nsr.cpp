#include "cbtau/nsr.hpp"

#include "cbtau/errors.hpp"
#include "cbtau/virasoro.hpp"

namespace cbtau {

Scalar NsrParams::c() const
{
    Scalar q = Q();
    return Scalar(1) + Scalar(2) * q * q;
}

Scalar nsr_weight(const Scalar& b, const Scalar& p)
{
    Scalar q = b + b.inverse();
    return (q * q / Scalar(4) - p * p) / Scalar(2);
}

NsrParams NsrParams::from_momentum(const Scalar& b, const Scalar& p) { return NsrParams{b, nsr_weight(b, p)}; }

void nsr_guard(const NsrParams& p, const Rational& level)
{
    if (p.b.is_zero() || (p.b * p.b).is_one()) throw ParamError("b^2 must differ from 0 and 1");
    const Scalar q = p.Q();
    const Scalar binv = p.b.inverse();
    const long twice = to_long(2 * level);
    for (long m = 1; m <= twice; ++m)
        for (long n = 1; m * n <= twice; ++n) {
            if ((m - n) % 2) continue;
            Scalar x = Scalar(m) * binv + Scalar(n) * p.b;
            if (p.delta == (q * q - x * x) / Scalar(8))
                throw DegenerateWeightError("NS weight " + p.delta.str() + " is degenerate at (m,n) = (" + std::to_string(m) +
                                            "," + std::to_string(n) + ")");
        }
}

Matrix nsr_gram_matrix(const NsrParams& p, const Rational& level)
{
    nsr_guard(p, level);
    VermaModule mod(AlgebraKind::neveu_schwarz, p.c(), p.delta);
    return mod.gram(level);
}

Scalar nsr_chain_projection(const Scalar& delta, const Scalar& d1, const Scalar& d2, const Word& w, Rational n,
                            ChainFamily family, const Scalar& plain_seed, const Scalar& tilde_seed)
{
    Scalar acc(1);
    for (const Gen& g : w) {
        const Rational k = -g.mode();
        const bool tilde = family == ChainFamily::tilded;
        if (g.kind == 'L') {
            acc *= Scalar(k) * d2 - d1 + delta + Scalar(n - (tilde ? k / 2 : k));
        } else if (tilde) {
            acc *= Scalar(2 * k) * d2 - d1 + delta + Scalar(n - k);
            family = ChainFamily::plain;
        } else {
            family = ChainFamily::tilded;
        }
        if (acc.is_zero()) return acc;
        n -= k;
    }
    return acc * (family == ChainFamily::plain ? plain_seed : tilde_seed);
}

Scalar nsr_whittaker_projection(const Word& w)
{
    for (const Gen& g : w)
        if (!((g.kind == 'L' && g.mode2 == -2) || (g.kind == 'G' && g.mode2 == -1))) return Scalar(0);
    return Scalar(1);
}

NsrChainPair nsr_chain_pair(const NsrParams& p, const Scalar& d1, const Scalar& d2, const Rational& n_max)
{
    nsr_guard(p, n_max);
    VermaModule mod(AlgebraKind::neveu_schwarz, p.c(), p.delta);
    NsrChainPair out;
    for (Rational n = 0; n <= n_max; n += rat(1, 2)) {
        auto basis = mod.basis(n);
        Matrix g = mod.gram(n);
        for (ChainFamily fam : {ChainFamily::plain, ChainFamily::tilded}) {
            Vector rhs;
            for (const Word& w : basis) rhs.push_back(nsr_chain_projection(p.delta, d1, d2, w, n, fam));
            Vector x = solve(g, rhs);
            State s;
            for (size_t k = 0; k < basis.size(); ++k)
                if (!x[k].is_zero()) s.emplace(basis[k], x[k]);
            (fam == ChainFamily::plain ? out.plain : out.tilded).push_back(std::move(s));
        }
    }
    return out;
}

Scalar conjugation_sign(const Rational& n1, const Rational& n2)
{
    return Scalar(is_integer(n1 + n2) ? 1 : -1);
}

NsrBlockCoeffs nsr_block_coeffs(const NsrParams& p, const std::array<Scalar, 4>& ext, const Rational& n_max)
{
    nsr_guard(p, n_max);
    VermaModule mod(AlgebraKind::neveu_schwarz, p.c(), p.delta);
    NsrBlockCoeffs out;
    for (Rational n = 0; n <= n_max; n += rat(1, 2)) {
        auto basis = mod.basis(n);
        Matrix g = mod.gram(n);
        for (ChainFamily fam : {ChainFamily::plain, ChainFamily::tilded}) {
            Vector right, left;
            for (const Word& w : basis) {
                right.push_back(nsr_chain_projection(p.delta, ext[0], ext[1], w, n, fam));
                left.push_back(nsr_chain_projection(p.delta, ext[3], ext[2], w, n, fam));
            }
            // <Delta4|Phi(1)|w> = sign * <w|Phi(1)|Delta4>, with |w> at level n and |Delta4> at level 0
            Scalar value = conjugation_sign(n, 0) * dot(left, solve(g, right));
            (fam == ChainFamily::plain ? out.plain : out.tilded).push_back(value);
        }
    }
    return out;
}

std::pair<Series, Series> nsr_blocks(const NsrParams& p, const std::array<Scalar, 4>& ext, const Rational& n_max)
{
    NsrBlockCoeffs c = nsr_block_coeffs(p, ext, n_max);
    Rational e0 = real_exponent(p.delta, "Delta");
    return {series_from_coeffs(e0, c.plain, rat(1, 2)), series_from_coeffs(e0, c.tilded, rat(1, 2))};
}

std::vector<Scalar> nsr_block_irregular_coeffs(const NsrParams& p, const Rational& n_max)
{
    nsr_guard(p, n_max);
    VermaModule mod(AlgebraKind::neveu_schwarz, p.c(), p.delta);
    std::vector<Scalar> out;
    for (Rational n = 0; n <= n_max; n += rat(1, 2)) {
        auto basis = mod.basis(n);
        Vector v;
        for (const Word& w : basis) v.push_back(nsr_whittaker_projection(w));
        out.push_back(dot(v, solve(mod.gram(n), v)));
    }
    return out;
}

Series nsr_block_irregular(const NsrParams& p, const Rational& n_max)
{
    return series_from_coeffs(real_exponent(p.delta, "Delta"), nsr_block_irregular_coeffs(p, n_max), rat(1, 2));
}

Scalar VertexMatrixElements::element(Field f, const Word& a, const Word& b)
{
    auto key = std::make_tuple(f, a, b);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    const Scalar h_field = f == Field::phi ? h_ : h_ + Scalar(1, 2);
    Scalar value;
    if (b.empty()) {
        if (a.empty()) {
            value = Scalar(1);
        } else {
            // peel the leftmost letter of A: its adjoint sits next to the field
            const Gen z = a.front();
            const Word rest(a.begin() + 1, a.end());
            const Scalar k(-z.mode());
            const Scalar h_rest = left_.weight() + Scalar(word_level(rest));
            if (z.kind == 'L')
                value = (h_rest - delta_right_ + k * h_field) * element(f, rest, b);
            else if (f == Field::phi)
                value = element(Field::psi, rest, b);
            else
                value = (h_rest - delta_right_ + Scalar(2) * k * h_) * element(Field::phi, rest, b);
        }
    } else {
        // move the leftmost creator of B onto the bra
        const Gen x = b.front();
        const Word rest(b.begin() + 1, b.end());
        const Scalar k(-x.mode());
        const Scalar h_a = left_.weight() + Scalar(word_level(a));
        const Scalar h_b = delta_right_ + Scalar(word_level(rest));
        Scalar moved;
        const State bra = left_.apply(x.adjoint(), a);
        if (x.kind == 'L') {
            for (const auto& [w, c] : bra) moved += c * element(f, w, rest);
            value = moved - (h_a - h_b - k * h_field) * element(f, a, rest);
        } else if (f == Field::phi) {
            for (const auto& [w, c] : bra) moved += c * element(Field::phi, w, rest);
            value = moved - element(Field::psi, a, rest);
        } else {
            for (const auto& [w, c] : bra) moved += c * element(Field::psi, w, rest);
            value = -moved + (h_a - h_b - Scalar(2) * k * h_) * element(Field::phi, a, rest);
        }
    }
    cache_.emplace(std::move(key), value);
    return value;
}

}  // namespace cbtau

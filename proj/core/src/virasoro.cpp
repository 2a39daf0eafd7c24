#include "cbtau/virasoro.hpp"

#include "cbtau/errors.hpp"
#include "cbtau/partitions.hpp"

namespace cbtau {

Scalar vir_central_charge(const Scalar& b)
{
    Scalar q = b + b.inverse();
    return Scalar(1) + Scalar(6) * q * q;
}

VirParams VirParams::from_b(const Scalar& b, const Scalar& delta) { return VirParams{vir_central_charge(b), delta}; }

VirParams VirParams::from_b_momentum(const Scalar& b, const Scalar& p)
{
    Scalar q = b + b.inverse();
    return from_b(b, q * q / Scalar(4) - p * p);
}

Scalar vir_degenerate_weight(const Scalar& b, long m, long n)
{
    Scalar q = b + b.inverse();
    Scalar x = Scalar(m) / b + Scalar(n) * b;
    return (q * q - x * x) / Scalar(4);
}

namespace {

// Product of 4(Delta - Delta_{m,n}) over {(m,n),(n,m)} (a single factor when m = n),
// written through Q^2 = (c-1)/6 only.
Scalar kac_pair_factor(const VirParams& p, long m, long n)
{
    Scalar q2 = (p.c - Scalar(1)) / Scalar(6);
    Scalar s = q2 - Scalar(2);  // b^2 + b^-2
    Scalar k = Scalar(4) * p.delta - q2 + Scalar(2 * m * n);
    if (m == n) return k + Scalar(m * m) * s;
    Scalar m2(m * m), n2(n * n);
    return k * k + k * (m2 + n2) * s + m2 * n2 * (s * s - Scalar(2)) + m2 * m2 + n2 * n2;
}

long partition_count(long n) { return static_cast<long>(partitions_of(Rational(n), Flavor::bosonic).size()); }

}  // namespace

void vir_kac_guard(const VirParams& p, long level)
{
    if (p.delta.is_zero() && level >= 1) throw DegenerateWeightError("Delta = 0 is degenerate at level 1");
    for (long m = 1; m <= level; ++m)
        for (long n = m; m * n <= level; ++n)
            if (kac_pair_factor(p, m, n).is_zero())
                throw DegenerateWeightError("Delta = " + p.delta.str() + " is degenerate (Delta_{" + std::to_string(m) + "," +
                                            std::to_string(n) + "}) at c = " + p.c.str());
}

Scalar vir_kac_product(const VirParams& p, long level)
{
    Scalar acc(1);
    for (long m = 1; m <= level; ++m)
        for (long n = m; m * n <= level; ++n) acc *= kac_pair_factor(p, m, n).pow(partition_count(level - m * n));
    return acc;
}

Matrix gram_matrix(const VirParams& p, long level)
{
    vir_kac_guard(p, level);
    VermaModule mod(AlgebraKind::virasoro, p.c, p.delta);
    return mod.gram(Rational(level));
}

ChainRule vir_chain_rule(const Scalar& delta, const Scalar& d1, const Scalar& d2)
{
    return [=](long k, long n) { return Scalar(k) * d2 - d1 + delta + Scalar(n - k); };
}

ChainRule vir_whittaker_rule()
{
    return [](long k, long) { return Scalar(k == 1 ? 1 : 0); };
}

Scalar vir_chain_projection(const Word& w, long n, const ChainRule& rule)
{
    // <w|N> = <Delta| ... L_{k2} L_{k1} |N>, with L_{k1} acting first
    Scalar acc(1);
    for (const Gen& g : w) {
        long k = -g.mode2 / 2;
        acc *= rule(k, n);
        if (acc.is_zero()) return acc;
        n -= k;
    }
    return acc;
}

namespace {

ChainVector solve_chain(const VirParams& p, const ChainRule& rule, long n_max)
{
    vir_kac_guard(p, n_max);
    VermaModule mod(AlgebraKind::virasoro, p.c, p.delta);
    ChainVector out;
    for (long n = 0; n <= n_max; ++n) {
        auto basis = mod.basis(Rational(n));
        Vector rhs;
        for (const Word& w : basis) rhs.push_back(vir_chain_projection(w, n, rule));
        Vector x = solve(mod.gram(Rational(n)), rhs);
        State s;
        for (size_t k = 0; k < basis.size(); ++k)
            if (!x[k].is_zero()) s.emplace(basis[k], x[k]);
        out.levels.push_back(std::move(s));
    }
    return out;
}

std::vector<Scalar> pair_blocks(const VirParams& p, const ChainRule& left, const ChainRule& right, long n_max)
{
    vir_kac_guard(p, n_max);
    VermaModule mod(AlgebraKind::virasoro, p.c, p.delta);
    std::vector<Scalar> out;
    for (long n = 0; n <= n_max; ++n) {
        auto basis = mod.basis(Rational(n));
        Vector vr, vl;
        for (const Word& w : basis) {
            vr.push_back(vir_chain_projection(w, n, right));
            vl.push_back(vir_chain_projection(w, n, left));
        }
        out.push_back(dot(vl, solve(mod.gram(Rational(n)), vr)));
    }
    return out;
}

}  // namespace

ChainVector chain_vector(const VirParams& p, const Scalar& d1, const Scalar& d2, long n_max)
{
    return solve_chain(p, vir_chain_rule(p.delta, d1, d2), n_max);
}

ChainVector whittaker_vector(const VirParams& p, long n_max) { return solve_chain(p, vir_whittaker_rule(), n_max); }

std::vector<Scalar> block_regular_coeffs(const VirParams& p, const std::array<Scalar, 4>& ext, long n_max)
{
    return pair_blocks(p, vir_chain_rule(p.delta, ext[3], ext[2]), vir_chain_rule(p.delta, ext[0], ext[1]), n_max);
}

std::vector<Scalar> block_irregular_coeffs(const VirParams& p, long n_max)
{
    return pair_blocks(p, vir_whittaker_rule(), vir_whittaker_rule(), n_max);
}

Rational real_exponent(const Scalar& s, const char* what)
{
    if (!s.is_real()) throw ParamError(std::string(what) + " must be real to serve as a series exponent, got " + s.str());
    return s.re();
}

Series series_from_coeffs(const Rational& e0, const std::vector<Scalar>& coeffs, const Rational& step)
{
    Series s = Series::zero(e0 + step * Rational(static_cast<long>(coeffs.size()) - 1));
    for (size_t n = 0; n < coeffs.size(); ++n) s.add_term(e0 + step * Rational(static_cast<long>(n)), coeffs[n]);
    return s;
}

Series block_regular(const VirParams& p, const std::array<Scalar, 4>& ext, long n_max)
{
    return series_from_coeffs(real_exponent(p.delta, "Delta"), block_regular_coeffs(p, ext, n_max));
}

Series block_irregular(const VirParams& p, long n_max)
{
    return series_from_coeffs(real_exponent(p.delta, "Delta"), block_irregular_coeffs(p, n_max));
}

}  // namespace cbtau

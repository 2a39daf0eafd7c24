#include "cbtau/bilinear.hpp"

#include "cbtau/blowup.hpp"
#include "cbtau/errors.hpp"
#include "cbtau/fock.hpp"
#include "cbtau/nsr.hpp"
#include "cbtau/virasoro.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>

namespace cbtau {

// ---- graded series ----

GradedSeries GradedSeries::rebased(const Scalar& base) const
{
    Scalar d = delta - base;
    if (!d.is_real()) throw ParamError("graded series exponents differ by a non-real amount");
    return {base, body.shifted(d.re())};
}

GradedSeries& GradedSeries::operator+=(const GradedSeries& o)
{
    if (body.exact() && body.empty()) {
        *this = o;
        return *this;
    }
    body += o.rebased(delta).body;
    return *this;
}

GradedSeries& GradedSeries::operator-=(const GradedSeries& o) { return *this += Scalar(-1) * o; }

GradedSeries& GradedSeries::operator*=(const Scalar& c)
{
    body *= c;
    return *this;
}

namespace {

std::optional<Rational> product_cutoff(const Series& f, const Series& g)
{
    std::optional<Rational> cut;
    if (f.cutoff()) cut = *f.cutoff() + *g.min_exponent();
    if (g.cutoff()) cut = min_cutoff(cut, *g.cutoff() + *f.min_exponent());
    return cut;
}

bool exact_zero(const Series& s) { return s.exact() && s.empty(); }

}  // namespace

GradedSeries graded_mul(const GradedSeries& f, const GradedSeries& g)
{
    return {f.delta + g.delta, series_mul(f.body, g.body)};
}

GradedSeries graded_theta(const GradedSeries& f)
{
    Series out(f.body.cutoff());
    for (const auto& [e, c] : f.body.terms()) out.add_term(e, c * (f.delta + Scalar(e)));
    return {f.delta, out};
}

GradedSeries graded_poly_mul(const std::vector<Scalar>& poly, const GradedSeries& f)
{
    Series p;
    for (std::size_t i = 0; i < poly.size(); ++i) p.add_term(Rational(static_cast<long>(i)), poly[i]);
    return {f.delta, series_mul(p, f.body)};
}

GradedSeries hirota(const HirotaSpec& spec, const GradedSeries& f, const GradedSeries& g)
{
    const Scalar delta = f.delta + g.delta;
    if (exact_zero(f.body) || exact_zero(g.body)) return {delta, Series()};
    auto cut = product_cutoff(f.body, g.body);
    Series out(cut);
    for (const auto& [ea, ca] : f.body.terms()) {
        const Scalar wa = spec.e1 * (f.delta + Scalar(ea));
        for (const auto& [eb, cb] : g.body.terms()) {
            Rational e = ea + eb;
            if (cut && e > *cut) break;
            Scalar w = wa + spec.e2 * (g.delta + Scalar(eb));
            out.add_term(e, ca * cb * w.pow(spec.k));
        }
    }
    return {delta, out};
}

// ---- operators ----

GradedSeries BilinearOperator::apply(const GradedSeries& f, const GradedSeries& g) const
{
    GradedSeries out{f.delta + g.delta, Series()};
    for (const BilinearTerm& t : terms_) {
        GradedSeries h = hirota(t.hirota, f, g);
        for (long i = 0; i < t.theta; ++i) h = graded_theta(h);
        out += graded_poly_mul(t.poly, h);
    }
    return out;
}

std::vector<Scalar> BilinearOperator::symbol(const Scalar& a, const Scalar& b) const
{
    std::vector<Scalar> out(static_cast<std::size_t>(degree() + 1));
    const Scalar sum = a + b;
    for (const BilinearTerm& t : terms_) {
        Scalar w = (t.hirota.e1 * a + t.hirota.e2 * b).pow(t.hirota.k) * sum.pow(t.theta);
        if (w.is_zero()) continue;
        for (std::size_t i = 0; i < t.poly.size(); ++i)
            if (!t.poly[i].is_zero()) out[i] += t.poly[i] * w;
    }
    return out;
}

Scalar BilinearOperator::symbol_at(const Scalar& a, const Scalar& b, long i) const
{
    Scalar out;
    for (const BilinearTerm& t : terms_) {
        if (i >= static_cast<long>(t.poly.size()) || t.poly[i].is_zero()) continue;
        out += t.poly[i] * (t.hirota.e1 * a + t.hirota.e2 * b).pow(t.hirota.k) * (a + b).pow(t.theta);
    }
    return out;
}

long BilinearOperator::degree() const
{
    long d = 0;
    for (const BilinearTerm& t : terms_) d = std::max(d, static_cast<long>(t.poly.size()) - 1);
    return d;
}

namespace {

using Poly = std::vector<Scalar>;

Poly padd(const Poly& a, const Poly& b)
{
    Poly out(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Poly pmul(const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly pscale(const Scalar& c, Poly a)
{
    for (Scalar& x : a) x *= c;
    return a;
}

const Poly kQ{Scalar(0), Scalar(1)};
const Poly kOneMinusQ{Scalar(1), Scalar(-1)};
const Poly kOnePlusQ{Scalar(1), Scalar(1)};

std::atomic<bool> operator_mutation{false};

HirotaSpec plain(long k) { return {k, Scalar(1), Scalar(-1)}; }
HirotaSpec weighted(long k, const Scalar& b) { return {k, b, b.inverse()}; }

}  // namespace

BilinearOperator op_DIII()
{
    return BilinearOperator({
        {{Scalar(rat(1, 2))}, 0, plain(4)},
        {{Scalar(-1)}, 1, plain(2)},
        {{Scalar(rat(1, 2))}, 0, plain(2)},
        {{Scalar(0), Scalar(operator_mutation ? 3 : 2)}, 0, plain(0)},
    });
}

void set_operator_mutation(bool on) { operator_mutation = on; }

BilinearOperator op_DIII_b(const Scalar& b)
{
    Scalar q = b + b.inverse();
    return BilinearOperator({
        {{Scalar(1)}, 0, weighted(4, b)},
        {{Scalar(2)}, 1, weighted(2, b)},
        {{-(Scalar(1) + q * q)}, 0, weighted(2, b)},
        {kQ, 0, weighted(0, b)},
    });
}

BilinearOperator op_DVI(const std::array<Scalar, 4>& delta)
{
    const Scalar& d0 = delta[0];
    const Scalar& dt = delta[1];
    const Scalar& d1 = delta[2];
    const Scalar& dinf = delta[3];
    const Poly one_minus_t_sq = pmul(kOneMinusQ, kOneMinusQ);
    const Poly one_minus_t_cube = pmul(one_minus_t_sq, kOneMinusQ);

    Poly c4 = pscale(Scalar(rat(-1, 2)), one_minus_t_cube);
    Poly c2_theta = pmul(one_minus_t_sq, kOnePlusQ);
    // 2t(D_t + D_1) - 2(1-t)t(D_0 + D_inf) - (1 - t + t^2)/2
    Poly inner = padd(pscale(Scalar(2) * (dt + d1), kQ), pscale(Scalar(-2) * (d0 + dinf), pmul(kOneMinusQ, kQ)));
    inner = padd(inner, {Scalar(rat(-1, 2)), Scalar(rat(1, 2)), Scalar(rat(-1, 2))});
    Poly c2 = pmul(kOneMinusQ, inner);
    Poly c0_theta2 = pscale(Scalar(rat(-1, 2)), pmul(kQ, kOneMinusQ));
    Poly c0_theta =
        pmul(kQ, padd(pscale(d0 + dinf, kOneMinusQ), pscale(-(dt + d1), kOnePlusQ)));
    Poly c0 = pscale(Scalar(2), pmul(kQ, padd({(d0 - dt) * (d1 - dinf)}, pscale((d0 + dt) * (d1 + dinf), kQ))));

    return BilinearOperator({
        {c4, 0, plain(4)},
        {c2_theta, 1, plain(2)},
        {c2, 0, plain(2)},
        {c0_theta2, 2, plain(0)},
        {c0_theta, 1, plain(0)},
        {c0, 0, plain(0)},
    });
}

BilinearOperator op_DVI_b(const Scalar& b, const std::array<Scalar, 4>& delta_ns)
{
    const Scalar& d1 = delta_ns[0];
    const Scalar& d2 = delta_ns[1];
    const Scalar& d3 = delta_ns[2];
    const Scalar& d4 = delta_ns[3];
    const Scalar q = b + b.inverse();
    const Poly one_minus_q_sq = pmul(kOneMinusQ, kOneMinusQ);

    Poly c4 = pscale(Scalar(rat(-1, 2)), pmul(one_minus_q_sq, kOneMinusQ));
    Poly c2_theta = pscale(Scalar(-1), pmul(kOnePlusQ, one_minus_q_sq));
    // -q(D2 + D3) + q(1-q)(D1 + D4) + (Q^2(1 + 4q + q^2) + (1 - q + q^2))/2
    Poly inner = padd(pscale(-(d2 + d3), kQ), pscale(d1 + d4, pmul(kQ, kOneMinusQ)));
    Poly tail = padd(pscale(q * q, {Scalar(1), Scalar(4), Scalar(1)}), {Scalar(1), Scalar(-1), Scalar(1)});
    inner = padd(inner, pscale(Scalar(rat(1, 2)), tail));
    Poly c2 = pmul(kOneMinusQ, inner);
    // The printed operator has a dangling "-" at the end of the D^2 line followed by "+" on the
    // next; "+" is the reading that reduces to the c = 1 operator at b = i.
    Poly c0 = pscale(Scalar(rat(1, 2)),
                     pmul(kQ, padd(pscale((d2 + d1) * (d3 + d4), kQ), {-(d2 - d1) * (d3 - d4)})));
    Poly c0_theta = pscale(Scalar(rat(1, 2)),
                           pmul(kQ, padd(pscale(d1 + d4, kOneMinusQ), pscale(-(d2 + d3), kOnePlusQ))));
    Poly c0_theta2 = pscale(Scalar(rat(-1, 2)), pmul(kQ, kOneMinusQ));

    return BilinearOperator({
        {c4, 0, weighted(4, b)},
        {c2_theta, 1, weighted(2, b)},
        {c2, 0, weighted(2, b)},
        {c0, 0, weighted(0, b)},
        {c0_theta, 1, weighted(0, b)},
        {c0_theta2, 2, weighted(0, b)},
    });
}

GradedSeries apply_DIII(const GradedSeries& f, const GradedSeries& g) { return op_DIII().apply(f, g); }
GradedSeries apply_DIII_b(const Scalar& b, const GradedSeries& f, const GradedSeries& g)
{
    return op_DIII_b(b).apply(f, g);
}
GradedSeries apply_DVI(const std::array<Scalar, 4>& delta, const GradedSeries& f, const GradedSeries& g)
{
    return op_DVI(delta).apply(f, g);
}
GradedSeries apply_DVI_b(const Scalar& b, const std::array<Scalar, 4>& delta_ns, const GradedSeries& f,
                         const GradedSeries& g)
{
    return op_DVI_b(b, delta_ns).apply(f, g);
}

// ---- identity catalog ----

const std::vector<std::pair<std::string, Identity>>& identity_names()
{
    static const std::vector<std::pair<std::string, Identity>> names{
        {"blockdecomp", Identity::blockdecomp}, {"bilin", Identity::bilin},       {"bilin0", Identity::bilin0},
        {"bilin1", Identity::bilin1},           {"relsh20", Identity::relsh20},   {"t1", Identity::t1},
        {"hatF3", Identity::hat_f3},            {"relsh32", Identity::relsh32},   {"s0", Identity::s0},
        {"s1", Identity::s1},                   {"sm", Identity::sm},             {"s0PVI", Identity::s0_p6},
        {"s1PVI", Identity::s1_p6},             {"chdecomp", Identity::chdecomp}, {"PVIbilin", Identity::pvi_bilin},
        {"t1g", Identity::t1g},                 {"t2g", Identity::t2g},           {"t3g", Identity::t3g},
        {"relsh32g", Identity::relsh32g},
    };
    return names;
}

Identity parse_identity(const std::string& name)
{
    for (const auto& [n, id] : identity_names())
        if (n == name) return id;
    throw ParamError("unknown identity '" + name + "'");
}

std::string identity_name(Identity id)
{
    for (const auto& [n, i] : identity_names())
        if (i == id) return n;
    return "?";
}

bool Residual::vanishes() const
{
    if (value.body.cutoff() && *value.body.cutoff() < order) return false;
    return value.body.truncated(order).empty();
}

namespace {

long floor_long(const Rational& r)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return f.get_si();
}

// q^delta sum_{N <= cutoff} coeffs[N] scale^N q^N, trusted to `cutoff`.
GradedSeries graded_block(const Scalar& delta, const std::vector<Scalar>& coeffs, const Rational& cutoff,
                          const Scalar& scale = Scalar(1))
{
    Series body{std::optional<Rational>(cutoff)};
    Scalar power(1);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        body.add_term(Rational(static_cast<long>(i)), coeffs[i] * power);
        power *= scale;
    }
    return {delta, body};
}

// half-step coefficients q^delta sum_k coeffs[k] q^{k/2}
GradedSeries graded_half_block(const Scalar& delta, const std::vector<Scalar>& coeffs, const Rational& cutoff)
{
    Series body{std::optional<Rational>(cutoff)};
    for (std::size_t i = 0; i < coeffs.size(); ++i) body.add_term(rat(static_cast<long>(i), 2), coeffs[i]);
    return {delta, body};
}

std::vector<Scalar> irregular_coeffs(const Scalar& c, const Scalar& delta, long order)
{
    if (order < 0) return {};
    return block_irregular_coeffs(VirParams{c, delta}, order);
}

std::vector<Scalar> regular_coeffs(const Scalar& c, const Scalar& delta, const std::array<Scalar, 4>& ext,
                                   long order)
{
    if (order < 0) return {};
    return block_regular_coeffs(VirParams{c, delta}, ext, order);
}

// A lattice term starting at relative exponent `rel` needs its blocks to n_max - rel. Shells
// lying wholly beyond n_max keep their leading coefficient so they do not lower the sum's cutoff.
Rational term_cutoff(const Rational& n_max, const Rational& rel)
{
    Rational c = n_max - rel;
    return c < 0 ? Rational(0) : c;
}

// One lattice term w * Op(F1, F2) of a bilinear sum.
struct LatticeTerm {
    Rational n;
    Scalar weight;
    GradedSeries f1, f2;
};

GradedSeries lattice_sum(const std::vector<LatticeTerm>& terms, const Scalar& base,
                         const std::function<GradedSeries(const GradedSeries&, const GradedSeries&)>& op,
                         const std::function<bool(const Rational&)>& keep = nullptr)
{
    GradedSeries out{base, Series()};
    for (const LatticeTerm& t : terms) {
        if (keep && !keep(t.n)) continue;
        out += (t.weight * op(t.f1, t.f2)).rebased(base);
    }
    return out;
}

// Half-integer n with 2|n| <= the largest value allowed by 2 n^2 <= n_max, plus extra shells.
std::vector<Rational> half_lattice(const Rational& n_max, long extra)
{
    long two_n = 0;
    while (Rational(2) * rat(two_n + 1, 2) * rat(two_n + 1, 2) <= n_max) ++two_n;
    two_n += extra;
    std::vector<Rational> out;
    for (long k = -two_n; k <= two_n; ++k) out.push_back(rat(k, 2));
    return out;
}

std::array<Scalar, 4> ns_weights(const Scalar& b, const std::array<Scalar, 4>& momenta)
{
    std::array<Scalar, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = nsr_weight(b, momenta[i]);
    return out;
}

std::vector<LatticeTerm> irregular_terms(const IdentityParams& ps, const Rational& n_max)
{
    const Scalar c1 = vir12_central_charge(ps.b, 1), c2 = vir12_central_charge(ps.b, 2);
    std::vector<LatticeTerm> out;
    for (const Rational& n : half_lattice(n_max, ps.extra_shells)) {
        IrregularSquared l = l_n_irr_squared(ps.p, ps.b, n);
        const Scalar d1 = vir12_weight(ps.b, ps.p, n, 1), d2 = vir12_weight(ps.b, ps.p, n, 2);
        // the beta^{-Delta} factors of l^2 cancel the beta^{Delta} prefactors of the rescaled blocks
        if (!(l.exp1 == d1) || !(l.exp2 == d2))
            throw std::logic_error("Whittaker coefficient exponents do not match the block weights");
        const Rational cutoff = term_cutoff(n_max, 2 * n * n);
        const long order = floor_long(cutoff);
        out.push_back({n, l.coeff, graded_block(d1, irregular_coeffs(c1, d1, order), cutoff, l.beta1),
                       graded_block(d2, irregular_coeffs(c2, d2, order), cutoff, l.beta2)});
    }
    return out;
}

std::vector<LatticeTerm> regular_terms(const IdentityParams& ps, const Rational& n_max)
{
    const Scalar b2 = ps.b * ps.b;
    const Scalar c1 = vir12_central_charge(ps.b, 1), c2 = vir12_central_charge(ps.b, 2);
    const auto dns = ns_weights(ps.b, ps.momenta);
    std::array<Scalar, 4> ext1, ext2;
    for (int i = 0; i < 4; ++i) {
        ext1[i] = dns[i] / (Scalar(1) - b2);
        ext2[i] = dns[i] * b2 / (b2 - Scalar(1));
    }
    const auto& m = ps.momenta;
    std::vector<LatticeTerm> out;
    for (const Rational& n : half_lattice(n_max, ps.extra_shells)) {
        Scalar w = l_n21_pair(ps.p, ps.b, m[0] * m[0], m[1], m[3] * m[3], m[2], n);
        const Scalar d1 = vir12_weight(ps.b, ps.p, n, 1), d2 = vir12_weight(ps.b, ps.p, n, 2);
        const Rational cutoff = term_cutoff(n_max, 2 * n * n);
        const long order = floor_long(cutoff);
        out.push_back({n, w, graded_block(d1, regular_coeffs(c1, d1, ext1, order), cutoff),
                       graded_block(d2, regular_coeffs(c2, d2, ext2, order), cutoff)});
    }
    return out;
}

// Ratio C(sigma + n + m) C(sigma - n) / (C(sigma) C(sigma + m)) for the Painleve VI constants.
Scalar c_ratio_p6_shift(const Scalar& sigma, const std::array<Scalar, 4>& theta, const Rational& n, long m)
{
    if (m == 0) return c_ratio_p6(sigma, theta, n);
    BarnesRatio r;
    add_c_p6(r, sigma, theta, n + m, 1);
    add_c_p6(r, sigma, theta, -n, 1);
    add_c_p6(r, sigma, theta, Rational(0), -1);
    add_c_p6(r, sigma, theta, Rational(m), -1);
    return r.evaluate();
}

// sum_n C(sigma+n+m) C(sigma-n) Op(F((sigma+n+m)^2), F((sigma-n)^2)) at c = 1, normalized by
// C(sigma) C(sigma+m); returned over the base exponent of its leading lattice terms.
}  // namespace

GradedSeries c1_shift_sum(const BilinearOperator* custom, const IdentityParams& ps, long m, bool regular,
                          const Rational& n_max)
{
    const Scalar& s = ps.sigma;
    // 2 sigma in Z: the c = 1 blocks at (sigma + n)^2 are degenerate and the coefficient ratios have poles
    if (s.is_real() && is_integer(Rational(2 * s.re())))
        throw ResonanceError("sigma = " + s.str() + " is resonant: 2 sigma is an integer");
    std::array<Scalar, 4> ext;
    for (int i = 0; i < 4; ++i) ext[i] = ps.theta[i] * ps.theta[i];
    // relative exponent of the n-term: 2n(n+m) - min_n 2n(n+m)
    auto e_of = [m](long n) { return 2 * n * (n + m); };
    long nmin = m >= 0 ? -(m / 2) : (-m) / 2;
    long emin = std::min(e_of(nmin), e_of(nmin - 1));
    emin = std::min(emin, e_of(nmin + 1));
    const Scalar base = Scalar(2) * s * s + Scalar(2 * m) * s + Scalar(m * m) + Scalar(emin);

    std::vector<LatticeTerm> terms;
    long lo = nmin, hi = nmin;
    while (Rational(e_of(lo - 1) - emin) <= n_max) --lo;
    while (Rational(e_of(hi + 1) - emin) <= n_max) ++hi;
    for (long n = lo - ps.extra_shells; n <= hi + ps.extra_shells; ++n) {
        const Rational rel(e_of(n) - emin);
        const Rational cutoff = term_cutoff(n_max, rel);
        const long order = floor_long(cutoff);
        const Scalar a = s + Scalar(n + m), b = s - Scalar(n);
        Scalar w = regular ? c_ratio_p6_shift(s, ps.theta, Rational(n), m) : c_ratio_p3(s, Rational(n), m);
        auto coeffs = [&](const Scalar& x) {
            return regular ? regular_coeffs(Scalar(1), x * x, ext, order) : irregular_coeffs(Scalar(1), x * x, order);
        };
        terms.push_back({Rational(n), w, graded_block(a * a, coeffs(a), cutoff), graded_block(b * b, coeffs(b), cutoff)});
    }
    BilinearOperator op = custom ? *custom : regular ? op_DVI(ext) : op_DIII();
    return lattice_sum(terms, base, [&](const GradedSeries& f, const GradedSeries& g) { return op.apply(f, g); });
}

GradedSeries c1_lattice_sum(const BilinearOperator& op, const IdentityParams& params, long m, bool regular,
                            const Rational& n_max)
{
    return c1_shift_sum(&op, params, m, regular, n_max);
}

namespace {

GradedSeries q_half(const GradedSeries& f) { return {f.delta, f.body.shifted(rat(1, 2))}; }

}  // namespace

Residual verify_identity(Identity id, const IdentityParams& ps, const Rational& n_max)
{
    const Scalar& b = ps.b;
    const Scalar q_ns = b + b.inverse();
    auto dk = [&b](long k) {
        return [k, &b](const GradedSeries& f, const GradedSeries& g) { return hirota(weighted(k, b), f, g); };
    };
    auto product = [](const GradedSeries& f, const GradedSeries& g) { return graded_mul(f, g); };
    auto integer_n = [](const Rational& n) { return is_integer(n); };
    auto half_n = [](const Rational& n) { return !is_integer(n); };

    switch (id) {
    case Identity::blockdecomp:
    case Identity::bilin:
    case Identity::bilin0:
    case Identity::bilin1:
    case Identity::relsh20:
    case Identity::t1:
    case Identity::hat_f3:
    case Identity::relsh32: {
        const Scalar base = nsr_weight(b, ps.p);
        auto terms = irregular_terms(ps, n_max);
        auto f_ns = [&] {
            NsrParams np{b, base};
            return graded_half_block(base, nsr_block_irregular_coeffs(np, n_max), n_max);
        };
        GradedSeries r;
        switch (id) {
        case Identity::blockdecomp:
            r = lattice_sum(terms, base, product) - f_ns();
            break;
        case Identity::bilin:
        case Identity::bilin0:
        case Identity::bilin1: {
            BilinearOperator op = op_DIII_b(b);
            auto keep = id == Identity::bilin0   ? std::function<bool(const Rational&)>(integer_n)
                        : id == Identity::bilin1 ? std::function<bool(const Rational&)>(half_n)
                                                 : nullptr;
            r = lattice_sum(terms, base, [&](const GradedSeries& f, const GradedSeries& g) { return op.apply(f, g); },
                            keep);
            break;
        }
        case Identity::relsh20:
            r = lattice_sum(terms, base, dk(2)) + q_half(lattice_sum(terms, base, product));
            break;
        case Identity::t1:
            r = lattice_sum(terms, base, dk(1));
            break;
        case Identity::hat_f3:
            r = lattice_sum(terms, base, dk(3)) + q_ns * q_half(f_ns());
            break;
        default:
            r = lattice_sum(terms, base, dk(3)) - q_ns * lattice_sum(terms, base, dk(2));
            break;
        }
        return {r, n_max};
    }
    case Identity::s0:
        return {c1_shift_sum(nullptr, ps, 0, false, n_max), n_max};
    case Identity::s1:
        return {c1_shift_sum(nullptr, ps, 1, false, n_max), n_max};
    case Identity::sm:
        return {c1_shift_sum(nullptr, ps, ps.m, false, n_max), n_max};
    case Identity::s0_p6:
        return {c1_shift_sum(nullptr, ps, 0, true, n_max), n_max};
    case Identity::s1_p6:
        return {c1_shift_sum(nullptr, ps, 1, true, n_max), n_max};
    case Identity::chdecomp:
    case Identity::pvi_bilin:
    case Identity::t1g:
    case Identity::t2g:
    case Identity::t3g:
    case Identity::relsh32g: {
        const Scalar base = nsr_weight(b, ps.p);
        const auto dns = ns_weights(b, ps.momenta);
        auto terms = regular_terms(ps, n_max);
        auto f_ns = [&](bool tilded) {
            NsrBlockCoeffs c = nsr_block_coeffs(NsrParams{b, base}, dns, n_max);
            std::vector<Scalar> v = tilded ? c.tilded : c.plain;
            // the decomposition pairs the two chains directly: undo the vertex conjugation sign
            for (std::size_t k = 0; k < v.size(); ++k) v[k] *= conjugation_sign(rat(static_cast<long>(k), 2), 0);
            return graded_half_block(base, v, n_max);
        };
        GradedSeries r;
        switch (id) {
        case Identity::chdecomp:
            r = lattice_sum(terms, base, product) - f_ns(false);
            break;
        case Identity::pvi_bilin: {
            BilinearOperator op = op_DVI_b(b, dns);
            r = lattice_sum(terms, base, [&](const GradedSeries& f, const GradedSeries& g) { return op.apply(f, g); });
            break;
        }
        case Identity::t1g:
            r = lattice_sum(terms, base, dk(1));
            break;
        case Identity::t2g:
            r = graded_poly_mul(kOneMinusQ, lattice_sum(terms, base, dk(2))) + q_half(f_ns(true));
            break;
        case Identity::t3g:
            r = graded_poly_mul(pmul(kOneMinusQ, kOneMinusQ), lattice_sum(terms, base, dk(3))) +
                q_ns * q_half(graded_poly_mul(kOnePlusQ, f_ns(true)));
            break;
        default:
            r = graded_poly_mul(kOneMinusQ, lattice_sum(terms, base, dk(3))) -
                q_ns * graded_poly_mul(kOnePlusQ, lattice_sum(terms, base, dk(2)));
            break;
        }
        return {r, n_max};
    }
    }
    throw ParamError("unhandled identity");
}

// ---- fast expansion ----

FastScheme parse_scheme(const std::string& name)
{
    if (name == "c1-irregular") return FastScheme::c1_irregular;
    if (name == "c1-regular") return FastScheme::c1_regular;
    if (name == "generic-irregular") return FastScheme::generic_irregular;
    if (name == "generic-regular") return FastScheme::generic_regular;
    throw ParamError("unknown scheme '" + name + "'");
}

std::string scheme_name(FastScheme s)
{
    switch (s) {
    case FastScheme::c1_irregular: return "c1-irregular";
    case FastScheme::c1_regular: return "c1-regular";
    case FastScheme::generic_irregular: return "generic-irregular";
    case FastScheme::generic_regular: return "generic-regular";
    }
    return "?";
}

const std::vector<Scalar>& CoeffTable::at(long i, long k) const
{
    auto it = first.find({i, k});
    if (it == first.end()) throw CutoffError("lattice point outside the table");
    return it->second;
}

Scalar CoeffTable::lattice_momentum(long i, long k, const Scalar& b) const
{
    if (scheme == FastScheme::c1_irregular || scheme == FastScheme::c1_regular) return center + Scalar(i);
    return center + Scalar(2 * i) * b + Scalar(2 * k) * b.inverse();
}

namespace {

using Lattice = std::pair<long, long>;

// Runs body(point) for every point; points are independent within one order.
void parallel_for(const std::vector<Lattice>& points, unsigned threads, const std::function<void(const Lattice&)>& body)
{
    if (threads <= 1 || points.size() < 2) {
        for (const Lattice& pt : points) body(pt);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < points.size(); i += threads) body(points[i]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string lattice_label(const CoeffTable& t, const Lattice& pt, const Scalar& b)
{
    return "(" + std::to_string(pt.first) + "," + std::to_string(pt.second) + ") = " +
           t.lattice_momentum(pt.first, pt.second, b).str();
}

// Coefficient at relative order `order` of sum_n w_n Op(F_{n}, G_{n}) where F_n, G_n are given by
// coefficient vectors (scaled by s1^N, s2^N) and leading exponents a_n, b_n with a_n + b_n = base + rel_n.
struct PairSource {
    const std::vector<Scalar>* f;
    const std::vector<Scalar>* g;
    Scalar a, b;
    long rel;
    Scalar weight;
};

Scalar order_coefficient(const BilinearOperator& op, const std::vector<PairSource>& src, long order,
                         const std::vector<Scalar>& s1_pow, const std::vector<Scalar>& s2_pow)
{
    Scalar total;
    const long deg = op.degree();
    for (const PairSource& ps : src) {
        for (long i = 0; i <= deg; ++i) {
            long rest = order - ps.rel - i;
            if (rest < 0) continue;
            Scalar acc;
            for (long n1 = 0; n1 <= rest; ++n1) {
                long n2 = rest - n1;
                if (n1 >= static_cast<long>(ps.f->size()) || n2 >= static_cast<long>(ps.g->size()))
                    throw std::logic_error("fast scheme dependency outside the table");
                const Scalar& x = (*ps.f)[n1];
                const Scalar& y = (*ps.g)[n2];
                if (x.is_zero() || y.is_zero()) continue;
                Scalar sym = op.symbol_at(ps.a + Scalar(n1), ps.b + Scalar(n2), i);
                if (sym.is_zero()) continue;
                acc += x * y * s1_pow[n1] * s2_pow[n2] * sym;
            }
            total += ps.weight * acc;
        }
    }
    return total;
}

std::vector<Scalar> powers(const Scalar& x, long n)
{
    std::vector<Scalar> out(static_cast<std::size_t>(n + 1));
    out[0] = Scalar(1);
    for (long i = 1; i <= n; ++i) out[i] = out[i - 1] * x;
    return out;
}

CoeffTable fast_c1(FastScheme scheme, const FastParams& ps, long n_max)
{
    const bool regular = scheme == FastScheme::c1_regular;
    CoeffTable t{scheme, ps.sigma, n_max, {}, {}};
    std::array<Scalar, 4> ext;
    for (int i = 0; i < 4; ++i) ext[i] = ps.theta[i] * ps.theta[i];
    const BilinearOperator op = regular ? op_DVI(ext) : op_DIII();
    // each step of the relation lattice costs at least 2 orders: R(j) = n_max - 2|j|
    const long jmax = n_max / 2;
    for (long j = -jmax; j <= jmax; ++j) {
        std::vector<Scalar> v(static_cast<std::size_t>(n_max - 2 * std::labs(j) + 1));
        v[0] = Scalar(1);
        t.first[{j, 0}] = std::move(v);
    }
    long nshell = 0;
    while (2 * (nshell + 1) * (nshell + 1) <= n_max) ++nshell;
    std::map<Lattice, Scalar> weight;  // (j, n) -> C-ratio at center sigma + j, filled as orders need them
    const std::vector<Scalar> ones(static_cast<std::size_t>(n_max + 1), Scalar(1));
    std::map<long, Scalar> kappa;

    for (long order = 1; order <= n_max; ++order) {
        std::vector<Lattice> points;
        for (long j = -jmax; j <= jmax; ++j)
            if (n_max - 2 * std::labs(j) >= order) points.push_back({j, 0});
        // serial pass: the coefficient of the unknown first, so a resonance is reported before
        // any pole of the C-ratios it comes with
        for (const Lattice& pt : points) {
            const long j = pt.first;
            const Scalar s = ps.sigma + Scalar(j);
            const Scalar s2 = s * s;
            Scalar k = op.symbol_at(s2 + Scalar(order), s2, 0) + op.symbol_at(s2, s2 + Scalar(order), 0);
            if (k.is_zero())
                throw ResonanceError("resonance at order " + std::to_string(order) + ", lattice point " +
                                     lattice_label(t, pt, Scalar(1)));
            kappa[j] = k;
            for (long n = -nshell; n <= nshell; ++n)
                if (2 * n * n <= order && !weight.count({j, n}))
                    weight[{j, n}] = regular ? c_ratio_p6(s, ps.theta, Rational(n)) : c_ratio_p3(s, Rational(n));
        }
        parallel_for(points, ps.threads, [&](const Lattice& pt) {
            const long j = pt.first;
            const Scalar s = ps.sigma + Scalar(j);
            std::vector<PairSource> src;
            for (long n = -nshell; n <= nshell; ++n) {
                if (2 * n * n > order) continue;
                const Scalar a = s + Scalar(n), b = s - Scalar(n);
                src.push_back({&t.first.at({j + n, 0}), &t.first.at({j - n, 0}), a * a, b * b, 2 * n * n,
                               weight.at({j, n})});
            }
            Scalar r0 = order_coefficient(op, src, order, ones, ones);
            // only this point's own slot at `order` is written; other threads read lower orders
            const_cast<std::vector<Scalar>&>(t.first.at(pt))[order] = -r0 / kappa.at(j);
        });
    }
    return t;
}

CoeffTable fast_generic(FastScheme scheme, const FastParams& ps, long n_max)
{
    const bool regular = scheme == FastScheme::generic_regular;
    const Scalar& b = ps.b;
    const Scalar b2 = b * b;
    if (b2 == Scalar(1)) throw ParamError("generic schemes need b^2 != 1");
    CoeffTable t{scheme, ps.p, n_max, {}, {}};
    const Scalar q_ns = b + b.inverse();
    const auto dns = ns_weights(b, ps.momenta);

    // two relations per order; the standard pair degenerates at order 1 (its determinant carries
    // a factor (N - 1)), where the second-order relation is replaced by the full D^III_b / D^VI_b one
    const BilinearOperator rel_a({{Poly{Scalar(1)}, 0, weighted(1, b)}});
    BilinearOperator rel_b, rel_low;
    if (regular) {
        rel_b = BilinearOperator({{kOneMinusQ, 0, weighted(3, b)}, {pscale(-q_ns, kOnePlusQ), 0, weighted(2, b)}});
        rel_low = op_DVI_b(b, dns);
    } else {
        rel_b = BilinearOperator({{Poly{Scalar(1)}, 0, weighted(3, b)}, {{-q_ns}, 0, weighted(2, b)}});
        rel_low = op_DIII_b(b);
    }

    const long kmax = n_max / 2;
    std::vector<Lattice> all;
    for (long i = -kmax; i <= kmax; ++i)
        for (long k = -kmax; k <= kmax; ++k) {
            long r = n_max - 2 * (std::labs(i) + std::labs(k));
            if (r < 0) continue;
            all.push_back({i, k});
            std::vector<Scalar> v(static_cast<std::size_t>(r + 1));
            v[0] = Scalar(1);
            t.first[{i, k}] = v;
            t.second[{i, k}] = v;
        }
    auto reach = [&](const Lattice& pt) { return n_max - 2 * (std::labs(pt.first) + std::labs(pt.second)); };

    long nshell = 0;
    while (2 * (nshell + 1) * (nshell + 1) <= n_max) ++nshell;

    // per center: weights l_n^2 (or l21 l34), and the beta rescalings of the two charges
    struct CenterData {
        std::map<long, Scalar> weight;
        std::map<long, std::pair<Scalar, Scalar>> delta;
    };
    std::map<Lattice, CenterData> centers;
    Scalar beta1(1), beta2(1);
    const auto& m = ps.momenta;
    for (const Lattice& pt : all) {
        CenterData cd;
        const Scalar pc = t.lattice_momentum(pt.first, pt.second, b);
        for (long n = -nshell; n <= nshell; ++n) {
            if (!t.first.count({pt.first + n, pt.second}) || !t.second.count({pt.first, pt.second + n})) continue;
            if (regular) {
                cd.weight[n] = l_n21_pair(pc, b, m[0] * m[0], m[1], m[3] * m[3], m[2], Rational(n));
            } else {
                IrregularSquared l = l_n_irr_squared(pc, b, Rational(n));
                cd.weight[n] = l.coeff;
                beta1 = l.beta1;
                beta2 = l.beta2;
            }
            cd.delta[n] = {vir12_weight(b, pc, Rational(n), 1), vir12_weight(b, pc, Rational(n), 2)};
        }
        centers[pt] = std::move(cd);
    }
    const auto s1_pow = powers(beta1, n_max), s2_pow = powers(beta2, n_max);

    for (long order = 1; order <= n_max; ++order) {
        std::vector<Lattice> points;
        for (const Lattice& pt : all)
            if (reach(pt) >= order) points.push_back(pt);
        parallel_for(points, ps.threads, [&](const Lattice& pt) {
            const CenterData& cd = centers.at(pt);
            std::vector<PairSource> src;
            for (const auto& [n, w] : cd.weight) {
                if (2 * n * n > order) continue;
                src.push_back({&t.first.at({pt.first + n, pt.second}), &t.second.at({pt.first, pt.second + n}),
                               cd.delta.at(n).first, cd.delta.at(n).second, 2 * n * n, w});
            }
            const BilinearOperator& second_rel = order == 1 ? rel_low : rel_b;
            const Scalar ra = order_coefficient(rel_a, src, order, s1_pow, s2_pow);
            const Scalar rb = order_coefficient(second_rel, src, order, s1_pow, s2_pow);
            const Scalar d1 = cd.delta.at(0).first, d2 = cd.delta.at(0).second, w0 = cd.weight.at(0);
            const Scalar no = Scalar(order);
            auto kx = [&](const BilinearOperator& op) { return w0 * s1_pow[order] * op.symbol(d1 + no, d2)[0]; };
            auto ky = [&](const BilinearOperator& op) { return w0 * s2_pow[order] * op.symbol(d1, d2 + no)[0]; };
            const Scalar a11 = kx(rel_a), a12 = ky(rel_a), a21 = kx(second_rel), a22 = ky(second_rel);
            const Scalar det = a11 * a22 - a12 * a21;
            if (det.is_zero())
                throw SingularSystemError("singular 2x2 system at order " + std::to_string(order) + ", lattice point " +
                                          lattice_label(t, pt, b));
            const Scalar x = (-ra * a22 + rb * a12) / det;
            const Scalar y = (-rb * a11 + ra * a21) / det;
            const_cast<std::vector<Scalar>&>(t.first.at(pt))[order] = x;
            const_cast<std::vector<Scalar>&>(t.second.at(pt))[order] = y;
        });
    }
    return t;
}

}  // namespace

CoeffTable fast_block(FastScheme scheme, const FastParams& params, long n_max)
{
    if (n_max < 0) throw ParamError("order must be nonnegative");
    if (params.threads == 0) throw ParamError("thread count must be positive");
    if (scheme == FastScheme::c1_irregular || scheme == FastScheme::c1_regular) return fast_c1(scheme, params, n_max);
    return fast_generic(scheme, params, n_max);
}

Scalar c1_irregular_shifted_value(const CoeffTable& table, const FastParams& params, long n)
{
    if (table.scheme != FastScheme::c1_irregular) throw ParamError("cross-check needs a c1-irregular table");
    // s^1 relation centered between sigma and sigma + 1: sum_k C(s+k+1) C(s-k) D^III(F(s+k+1), F(s-k))
    const Scalar& s = params.sigma;
    const BilinearOperator op = op_DIII();
    std::vector<Scalar> own = table.at(1);
    if (static_cast<long>(own.size()) <= n) throw CutoffError("table too short for the cross-check");
    own[n] = Scalar(0);
    const std::vector<Scalar> ones(static_cast<std::size_t>(n + 1), Scalar(1));
    auto lookup = [&](long j) -> const std::vector<Scalar>* { return j == 1 ? &own : &table.at(j); };
    std::vector<PairSource> src;
    for (long k = -n; k <= n; ++k) {
        const long rel = 2 * k * (k + 1);
        if (rel > n) continue;
        const Scalar a = s + Scalar(k + 1), b = s - Scalar(k);
        src.push_back({lookup(k + 1), lookup(-k), a * a, b * b, rel, c_ratio_p3(s, Rational(k), 1)});
    }
    Scalar r0 = order_coefficient(op, src, n, ones, ones);
    const Scalar a0 = (s + Scalar(1)) * (s + Scalar(1)), b0 = s * s, no = Scalar(n);
    Scalar kappa = c_ratio_p3(s, Rational(0), 1) * op.symbol(a0 + no, b0)[0] +
                   c_ratio_p3(s, Rational(-1), 1) * op.symbol(b0, a0 + no)[0];
    if (kappa.is_zero()) throw ResonanceError("shifted relation is resonant at order " + std::to_string(n));
    return -r0 / kappa;
}

}  // namespace cbtau

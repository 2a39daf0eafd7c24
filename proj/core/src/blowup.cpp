#include "cbtau/blowup.hpp"

#include "cbtau/errors.hpp"
#include "cbtau/fock.hpp"

#include <atomic>
#include <cstdlib>

namespace cbtau {

namespace {

std::atomic<bool> lattice_mutation{false};

Scalar two_pow(long k)
{
    return k >= 0 ? Scalar(2).pow(k) : Scalar(2).pow(-k).inverse();
}

long doubled(const Rational& n) { return to_long(2 * n); }

Scalar q_of(const Scalar& b) { return b + b.inverse(); }

// (-1)^{sg}: -1 exactly when n is an integer and n' is not
int melem_sign(const Rational& n, const Rational& np) { return (is_integer(n) && !is_integer(np)) ? -1 : 1; }

// prod over eps of s(A + eps X, m), returned for X^2 only; the lattice sets agree for both eps
Surd2 paired_s(const Scalar& a, const Scalar& x_sq, const Rational& m, const Scalar& b)
{
    bool even = is_integer(m);
    Scalar base = sgn(m) >= 0 ? a : q_of(b) - a;
    long two_m = doubled(abs(m));
    Scalar out(1);
    for (const auto& pt : lattice_points(two_m, even ? 0 : 1)) {
        Scalar y = base + Scalar(pt.i) * b + Scalar(pt.j) * b.inverse();
        out *= y * y - x_sq;
    }
    // reflection signs (-1)^m appear twice for even products and cancel
    return Surd2{out, even ? Rational(0) : rat(1, 4)};
}

}  // namespace

void set_lattice_bound_mutation(bool on) { lattice_mutation = on; }

Scalar Surd2::exact() const
{
    if (!is_integer(log2)) throw ParamError("power of two is not integral: 2^" + rational_str(log2));
    return coeff * two_pow(to_long(log2));
}

std::vector<LatticePoint> lattice_points(long bound, int parity)
{
    std::vector<LatticePoint> out;
    long top = lattice_mutation ? bound + 1 : bound;
    for (long s = parity; s < top; s += 2)
        for (long i = 0; i <= s; ++i) out.push_back({static_cast<int>(i), static_cast<int>(s - i)});
    return out;
}

Scalar lattice_product(const Scalar& x, long two_m, int parity, const Scalar& e1, const Scalar& e2)
{
    Scalar out(1);
    for (const auto& pt : lattice_points(two_m, parity)) out *= x + Scalar(pt.i) * e1 + Scalar(pt.j) * e2;
    return out;
}

Scalar s_even(const Scalar& x, const Rational& m, const Scalar& b)
{
    if (!is_integer(m)) throw ParamError("s_even needs an integer index");
    if (sgn(m) < 0) {
        Scalar r = s_even(q_of(b) - x, -m, b);
        return to_long(m) % 2 ? -r : r;
    }
    return lattice_product(x, doubled(m), 0, b, b.inverse());
}

Surd2 s_odd(const Scalar& x, const Rational& m, const Scalar& b)
{
    if (is_integer(m) || !is_half_integer(m)) throw ParamError("s_odd needs a half-odd index");
    if (sgn(m) < 0) return s_odd(q_of(b) - x, -m, b);
    return Surd2{lattice_product(x, doubled(m), 1, b, b.inverse()), rat(1, 8)};
}

Scalar omega_sq(const Scalar& p, const Rational& n, const Scalar& b)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    if (sgn(n) < 0) return omega_sq(-p, -n, b);
    long two_n = doubled(n);
    if (two_n == 0) return Scalar(1);
    Scalar binv = b.inverse(), two_p = Scalar(2) * p;
    Scalar num(two_n % 2 ? -1 : 1);
    for (long i = 1; i < 2 * two_n; ++i) num *= two_p + Scalar(i) * b + Scalar(2 * two_n - i) * binv;
    Scalar den = two_pow(two_n) * two_p;
    for (long i = 1; i < two_n; ++i) den *= (two_p + Scalar(2 * i) * b) * (two_p + Scalar(2 * i) * binv);
    if (den.is_zero()) throw PoleError("Omega^2 has a pole at this momentum");
    return num / den;
}

Scalar l_reduced(const Scalar& b, const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n,
                 const Rational& np)
{
    if (!is_half_integer(n) || !is_half_integer(np)) throw ParamError("n, n' must be multiples of 1/2");
    // the product form holds for n, n' >= 0; |P,n> = |-P,-n> covers the rest
    if (sgn(n) < 0) return l_reduced(b, -p, alpha, pp, -n, np);
    if (sgn(np) < 0) return l_reduced(b, p, alpha, -pp, n, -np);
    Scalar q = q_of(b);
    Surd2 num{Scalar(melem_sign(n, np)), n + np};
    bool even = is_integer(n + np);
    for (int e : {1, -1})
        for (int ep : {1, -1}) {
            Scalar x = alpha + Scalar(e) * pp + Scalar(ep) * p;
            Rational m = e * np + ep * n;
            num = num * (even ? Surd2{s_even(x, m, b), 0} : s_odd(x, m, b));
        }
    Scalar den = s_even(Scalar(2) * p + q, 2 * n, b) * s_even(Scalar(2) * pp + q, 2 * np, b);
    if (den.is_zero()) throw PoleError("matrix element has a pole at this momentum");
    return num.exact() / den;
}

Scalar l_squared(const Scalar& b, const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n,
                 const Rational& np)
{
    Scalar r = l_reduced(b, p, alpha, pp, n, np);
    return r * r * omega_sq(p, n, b) * omega_sq(pp, np, b);
}

namespace {

// prod_{eps, eps'} s(P_2 + Q/2 + eps' P + eps P_1, eps' n) together with 1 / (s_e(2P, 2n) s_e(2P+Q, 2n))
Surd2 l21_numerator(const Scalar& p, const Scalar& b, const Scalar& p1_sq, const Scalar& p2, const Rational& n)
{
    Scalar a0 = p2 + q_of(b) * Scalar(rat(1, 2));
    Surd2 out;
    for (int ep : {1, -1}) out = out * paired_s(a0 + Scalar(ep) * p, p1_sq, ep * n, b);
    return out;
}

Scalar l21_denominator(const Scalar& p, const Scalar& b, const Rational& n)
{
    Scalar den = s_even(Scalar(2) * p, 2 * n, b) * s_even(Scalar(2) * p + q_of(b), 2 * n, b);
    if (den.is_zero()) throw PoleError("chain coefficient has a pole at this momentum");
    return den;
}

}  // namespace

Scalar l_n21_squared(const Scalar& p, const Scalar& b, const Scalar& p1_sq, const Scalar& p2, const Rational& n)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    Surd2 num = l21_numerator(p, b, p1_sq, p2, n);
    Surd2 sq = num * num;
    Scalar sign(doubled(n) % 2 ? -1 : 1);
    return sign * sq.exact() / l21_denominator(p, b, n);
}

Scalar l_n21_pair(const Scalar& p, const Scalar& b, const Scalar& p1_sq, const Scalar& p2, const Scalar& p4_sq,
                  const Scalar& p3, const Rational& n)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    Surd2 num = l21_numerator(p, b, p1_sq, p2, n) * l21_numerator(p, b, p4_sq, p3, n);
    Scalar sign(doubled(n) % 2 ? -1 : 1);
    return sign * num.exact() / l21_denominator(p, b, n);
}

IrregularSquared l_n_irr_squared(const Scalar& p, const Scalar& b, const Rational& n)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    Scalar b2 = b * b;
    if (b2 == Scalar(1)) throw ParamError("b^2 = 1 is excluded");
    long four_n_sq = to_long(4 * n * n);
    Scalar sign(doubled(n) % 2 ? -1 : 1);
    IrregularSquared out;
    out.coeff = sign * two_pow(four_n_sq) / l21_denominator(p, b, n);
    Scalar one(1);
    out.beta1 = ((one - b2).inverse()) * ((one - b2).inverse());
    Scalar r = b2 / (b2 - one);
    out.beta2 = r * r;
    out.exp1 = vir12_weight(b, p, n, 1);
    out.exp2 = vir12_weight(b, p, n, 2);
    return out;
}

Scalar blowup_factor(const Scalar& a, const Scalar& e1, const Scalar& e2, const Rational& n)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    // s_eps(x, m) with the reflection (-1)^m s_eps(e1 + e2 - x, -m), m = 2n
    long m = doubled(n);
    auto s = [&](const Scalar& x) {
        if (m >= 0) return lattice_product(x, 2 * m, 0, e1, e2);
        Scalar r = lattice_product(e1 + e2 - x, -2 * m, 0, e1, e2);
        return (-m) % 2 ? -r : r;
    };
    Scalar v = s(Scalar(2) * a) * s(Scalar(2) * a + e1 + e2);
    return m % 2 ? -v : v;
}

// ---- Barnes ratios ----

namespace {

// floor of a rational
mpz_class floor_q(const Rational& r)
{
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return f;
}

void bump(std::map<Scalar, long>& factors, const Scalar& f, long mult)
{
    if (f.is_zero()) throw PoleError("Barnes ratio has a vanishing factor");
    factors[f] += mult;
}

}  // namespace

void BarnesRatio::add_barnes(const Scalar& y, const Rational& r, int mult) { barnes_[y][r] += mult; }
void BarnesRatio::add_gamma(const Scalar& y, const Rational& r, int mult) { gamma_[y][r] += mult; }

Scalar BarnesRatio::evaluate() const
{
    // Gamma(y + s) factors after reducing every G to the representative of its shift class
    std::map<Scalar, std::map<Rational, long>> gamma = gamma_;
    for (const auto& [y, shifts] : barnes_) {
        std::map<Rational, long> net;
        for (const auto& [r, mult] : shifts) {
            if (mult == 0) continue;
            mpz_class fl = floor_q(r);
            Rational r0 = r - Rational(fl);
            net[r0] += mult;
            long steps = fl.get_si();
            // G(1+y+r0+k) = G(1+y+r0) prod_{j<k} Gamma(1+y+r0+j); negative k divides
            if (steps >= 0)
                for (long j = 0; j < steps; ++j) gamma[y][r0 + 1 + j] += mult;
            else
                for (long j = 1; j <= -steps; ++j) gamma[y][r0 + 1 - j] -= mult;
        }
        for (const auto& [r0, m] : net)
            if (m != 0) throw ParamError("Barnes ratio is not elementary");
    }
    std::map<Scalar, long> factors;
    for (const auto& [y, shifts] : gamma) {
        std::map<Rational, long> net;
        for (const auto& [s, mult] : shifts) {
            if (mult == 0) continue;
            mpz_class fl = floor_q(s);
            Rational s0 = s - Rational(fl);
            net[s0] += mult;
            long steps = fl.get_si();
            // Gamma(y+s0+k) = Gamma(y+s0) prod_{j<k} (y+s0+j)
            if (steps >= 0)
                for (long j = 0; j < steps; ++j) bump(factors, y + Scalar(s0 + j), mult);
            else
                for (long j = 1; j <= -steps; ++j) bump(factors, y + Scalar(s0 - j), -mult);
        }
        for (const auto& [s0, m] : net)
            if (m != 0) throw ParamError("Gamma ratio is not elementary");
    }
    Scalar out(1);
    for (const auto& [f, e] : factors) {
        if (e > 0) out *= f.pow(e);
        else if (e < 0) out /= f.pow(-e);
    }
    return out;
}

void add_c_p3(BarnesRatio& r, const Scalar& sigma, const Rational& shift, int mult)
{
    r.add_barnes(Scalar(2) * sigma, 2 * shift, -mult);
    r.add_barnes(Scalar(-2) * sigma, -2 * shift, -mult);
}

void add_c_p6(BarnesRatio& r, const Scalar& sigma, const std::array<Scalar, 4>& theta, const Rational& shift, int mult)
{
    const auto& [t0, tt, t1, ti] = theta;
    for (int e : {1, -1})
        for (int ep : {1, -1}) {
            r.add_barnes(tt + Scalar(e) * t0 + Scalar(ep) * sigma, ep * shift, mult);
            r.add_barnes(t1 + Scalar(e) * ti + Scalar(ep) * sigma, ep * shift, mult);
        }
    add_c_p3(r, sigma, shift, mult);
}

Scalar c_ratio_p3(const Scalar& sigma, const Rational& n, long m)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    BarnesRatio r;
    add_c_p3(r, sigma, n + m, 1);
    add_c_p3(r, sigma, -n, 1);
    add_c_p3(r, sigma, 0, -1);
    add_c_p3(r, sigma, Rational(m), -1);
    return r.evaluate();
}

Scalar c_ratio_p6(const Scalar& sigma, const std::array<Scalar, 4>& theta, const Rational& n)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    BarnesRatio r;
    add_c_p6(r, sigma, theta, n, 1);
    add_c_p6(r, sigma, theta, -n, 1);
    if (is_integer(n)) {
        add_c_p6(r, sigma, theta, 0, -2);
    } else {
        add_c_p6(r, sigma, theta, rat(1, 2), -1);
        add_c_p6(r, sigma, theta, rat(-1, 2), -1);
    }
    return r.evaluate();
}

Scalar c_ratio_p3_product(const Scalar& sigma, const Rational& n)
{
    long two_n = doubled(abs(n));
    Scalar s2 = Scalar(4) * sigma * sigma;
    Scalar den = s2.pow(two_n);
    for (long k = 1; k < two_n; ++k) den *= (Scalar(k * k) - s2).pow(2 * (two_n - k));
    if (den.is_zero()) throw PoleError("resonant sigma");
    Scalar v = den.inverse();
    return two_n % 2 ? -v : v;
}

Scalar c_ratio_p6_product(const Scalar& sigma, const std::array<Scalar, 4>& theta, const Rational& n)
{
    if (!is_integer(n)) throw ParamError("the product form holds for integer n only");
    long an = std::labs(to_long(n));
    const auto& [t0, tt, t1, ti] = theta;
    Scalar num(1), s2 = sigma * sigma;
    for (int e : {1, -1})
        for (long i = 1 - an; i <= an - 1; ++i) {
            long ex = an - std::labs(i);
            Scalar a = tt + Scalar(e) * t0 + Scalar(i), c = t1 + Scalar(e) * ti + Scalar(i);
            num *= (a * a - s2).pow(ex) * (c * c - s2).pow(ex);
        }
    return num * c_ratio_p3_product(sigma, n);
}

}  // namespace cbtau

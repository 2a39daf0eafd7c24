#include "cbtau/painleve.hpp"

#include "cbtau/blowup.hpp"
#include "cbtau/errors.hpp"
#include "cbtau/virasoro.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/numeric/odeint.hpp>

#include <cmath>

// mpfr numbers expose a value_type of their own; stop odeint's scalar lookup at the number type
template <>
struct boost::numeric::odeint::detail::extract_value_type<cbtau::Real, void> {
    using type = cbtau::Real;
};

namespace cbtau {

namespace {

std::array<Scalar, 4> squares(const std::array<Scalar, 4>& theta)
{
    std::array<Scalar, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = theta[i] * theta[i];
    return out;
}

BilinearOperator tau_operator(const TauSpec& spec)
{
    return spec.kind == TauKind::p3 ? op_DIII() : op_DVI(squares(spec.theta));
}

void check_spec(const TauSpec& spec)
{
    if (spec.n_range < 0) throw ParamError("n_range must be non-negative");
    if (spec.n_max < 0) throw ParamError("n_max must be non-negative");
}

// pairs (a, m - a) with |a|, |m - a| <= r
std::pair<long, long> pair_interval(long m, long r) { return {std::max(-r, m - r), std::min(r, m + r)}; }

long pair_exponent(long a, long m) { return a * a + (m - a) * (m - a); }

long floor_div2(long m) { return m >= 0 ? m / 2 : -((1 - m) / 2); }

// min over all integers a of a^2 + (m - a)^2
long sector_emin(long m) { return pair_exponent(floor_div2(m), m); }

// Smallest pair exponent missing from sector m, relative to its emin.
long sector_missing(long m, long r)
{
    auto [lo, hi] = pair_interval(m, r);
    if (lo > hi) return 0;
    return std::min(pair_exponent(lo - 1, m), pair_exponent(hi + 1, m)) - sector_emin(m);
}

void require_real_sigma(const TauSpec& spec)
{
    if (!spec.sigma.is_real()) throw ParamError("flattening the s-sum needs a real sigma");
}

// Exponent grid of the flattened sums: 2 sigma n + integers.
Rational grid_step(const Scalar& sigma)
{
    Rational two_sigma = 2 * sigma.re();
    two_sigma.canonicalize();
    return Rational(1) / Rational(two_sigma.get_den());
}

}  // namespace

Scalar tau_weight(const TauSpec& spec, long n)
{
    const Scalar& s = spec.sigma;
    BarnesRatio r;
    const Rational rn(n);
    // each G(1 + y + k) carries Gamma(1 + y)^k relative to G(1 + y); those powers form g^n
    if (spec.kind == TauKind::p6) {
        add_c_p6(r, s, spec.theta, rn, 1);
        add_c_p6(r, s, spec.theta, Rational(0), -1);
        const auto& [t0, tt, t1, ti] = spec.theta;
        for (int e : {1, -1})
            for (int ep : {1, -1}) {
                r.add_gamma(tt + Scalar(e) * t0 + Scalar(ep) * s, Rational(1), static_cast<int>(-ep * n));
                r.add_gamma(t1 + Scalar(e) * ti + Scalar(ep) * s, Rational(1), static_cast<int>(-ep * n));
            }
    } else {
        add_c_p3(r, s, rn, 1);
        add_c_p3(r, s, Rational(0), -1);
    }
    r.add_gamma(Scalar(2) * s, Rational(1), static_cast<int>(2 * n));
    r.add_gamma(Scalar(-2) * s, Rational(1), static_cast<int>(-2 * n));
    return r.evaluate();
}

SectorSeries tau_series(const TauSpec& spec)
{
    check_spec(spec);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), spec.n_max.get_num_mpz_t(), spec.n_max.get_den_mpz_t());
    const long order = fl.get_si();
    const auto ext = squares(spec.theta);
    SectorSeries out;
    for (long n = -spec.n_range; n <= spec.n_range; ++n) {
        const Scalar x = spec.sigma + Scalar(n), delta = x * x;
        const Scalar w = tau_weight(spec, n);
        std::vector<Scalar> b = spec.kind == TauKind::p3 ? block_irregular_coeffs(VirParams{Scalar(1), delta}, order)
                                                         : block_regular_coeffs(VirParams{Scalar(1), delta}, ext, order);
        Series body{std::optional<Rational>(spec.n_max)};
        for (std::size_t k = 0; k < b.size(); ++k) body.add_term(Rational(static_cast<long>(k)), w * b[k]);
        out.sectors.emplace(n, GradedSeries{delta, body});
    }
    return out;
}

GradedSeries tau_series_flat(const TauSpec& spec, const Scalar& s_hat)
{
    require_real_sigma(spec);
    const Scalar base = spec.sigma * spec.sigma;
    GradedSeries out{base, Series()};
    for (const auto& [n, g] : tau_series(spec).sectors) out += s_hat.pow(n) * g;
    out = out.rebased(base);
    // the first missing shells start at 2 sigma n + n^2
    const Rational step = grid_step(spec.sigma);
    for (long n : {-spec.n_range - 1, spec.n_range + 1}) {
        Rational e = 2 * spec.sigma.re() * n + n * n;
        out.body = out.body.truncated(e - step);
    }
    return out;
}

SectorSeries tau_residual(const TauSpec& spec) { return tau_residual(spec, tau_series(spec)); }

SectorSeries tau_residual(const TauSpec& spec, const SectorSeries& tau)
{
    const BilinearOperator op = tau_operator(spec);
    const long r = spec.n_range;
    const Scalar s2 = Scalar(2) * spec.sigma * spec.sigma;
    SectorSeries out;
    for (long m = -2 * r; m <= 2 * r; ++m) {
        const Scalar base = s2 + Scalar(2 * m) * spec.sigma + Scalar(sector_emin(m));
        GradedSeries acc{base, Series()};
        auto [lo, hi] = pair_interval(m, r);
        for (long a = lo; a <= hi; ++a) acc += op.apply(tau.sectors.at(a), tau.sectors.at(m - a));
        acc = acc.rebased(base);
        acc.body = acc.body.truncated(Rational(sector_missing(m, r) - 1));
        out.sectors.emplace(m, acc);
    }
    return out;
}

GradedSeries tau_residual_flat(const TauSpec& spec, const Scalar& s_hat, const Rational& order)
{
    return flatten_residual(spec, tau_residual(spec), s_hat, order);
}

GradedSeries flatten_residual(const TauSpec& spec, const SectorSeries& res, const Scalar& s_hat,
                              const Rational& order)
{
    require_real_sigma(spec);
    const Rational sig = spec.sigma.re();
    const Scalar base = Scalar(2) * spec.sigma * spec.sigma;
    const Rational step = grid_step(spec.sigma);
    GradedSeries out{base, Series::zero(order)};
    // sector m starts at 2 sigma m + emin(m) >= m^2/2 - 2|sigma m| above the base
    const double sd = std::fabs(sig.get_d()), od = std::max(0.0, order.get_d());
    const long reach = 2 * spec.n_range + 2 + static_cast<long>(std::ceil(4 * sd + std::sqrt(2 * od + 16 * sd * sd)));
    for (long m = -reach; m <= reach; ++m) {
        auto it = res.sectors.find(m);
        if (it != res.sectors.end()) {
            out += s_hat.pow(m) * it->second;
            continue;
        }
        Rational rel = 2 * sig * m + sector_emin(m);
        if (rel <= order) out.body = out.body.truncated(rel - step);
    }
    out.body = out.body.truncated(order);
    return out;
}

long shell_bound(const Scalar& sigma, const Rational& n_max)
{
    const Rational re = sigma.re();
    // Re (sigma+n)^2 - Re sigma^2 = 2 n Re sigma + n^2
    long best = 0;
    for (long n = 1;; ++n) {
        bool any = false;
        for (long sgn : {1, -1})
            if (2 * re * (sgn * n) + n * n <= n_max) any = true;
        if (!any) break;
        best = n;
    }
    return best;
}

// ---- numeric evaluation ----

namespace {

class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned digits) : old_(Real::default_precision()) { Real::default_precision(digits); }
    ~PrecisionGuard() { Real::default_precision(old_); }
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned old_;
};

Real to_real(const Rational& q)
{
    Real x;
    mpfr_set_q(x.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return x;
}

Real to_real(const Scalar& s)
{
    if (!s.is_real()) throw ParamError("numeric evaluation needs real parameters");
    return to_real(s.re());
}

// e (e-1) ... (e-k+1)
Real falling(const Real& e, int k)
{
    Real out = 1;
    for (int j = 0; j < k; ++j) out *= e - j;
    return out;
}

struct Term {
    Real coeff, exponent;
};

std::vector<Real> derivatives(const std::vector<Term>& terms, const Real& t)
{
    std::vector<Real> d(4, Real(0));
    for (const Term& x : terms) {
        Real tp = pow(t, x.exponent - 3);
        for (int k = 3; k >= 0; --k) {
            d[k] += x.coeff * falling(x.exponent, k) * tp;
            tp *= t;
        }
    }
    return d;
}

// |k-th derivative| of c t^e at t, summed geometrically as a conservative tail bound
std::array<Real, 4> tail_bound(const Real& c, const Real& e, const Real& t)
{
    std::array<Real, 4> out;
    const Real geo = 1 / (1 - t);
    for (int k = 0; k < 4; ++k) out[k] = abs(c * falling(e, k)) * pow(t, e - k) * geo;
    return out;
}

}  // namespace

Real tau_gauge(const TauSpec& spec, unsigned digits)
{
    PrecisionGuard guard(digits);
    using boost::math::tgamma;
    const Real sg = to_real(spec.sigma);
    Real g = pow(tgamma(1 - 2 * sg) / tgamma(1 + 2 * sg), 2);
    if (spec.kind == TauKind::p6) {
        std::array<Real, 4> th;
        for (int i = 0; i < 4; ++i) th[i] = to_real(spec.theta[i]);
        for (int e : {1, -1})
            for (int ep : {1, -1}) {
                Real f = tgamma(1 + th[1] + e * th[0] + ep * sg) * tgamma(1 + th[2] + e * th[3] + ep * sg);
                if (ep > 0)
                    g *= f;
                else
                    g /= f;
            }
    }
    return g;
}

ZetaValues zeta_eval(const TauSpec& spec, const Rational& t_exact, unsigned digits, double tolerance)
{
    PrecisionGuard guard(digits);
    if (t_exact <= 0 || (spec.kind == TauKind::p6 && t_exact >= 1))
        throw TrustRegionError("t outside the expansion domain");
    const Real t = to_real(t_exact);
    const Real s = to_real(spec.s) * tau_gauge(spec, digits);
    std::array<Real, 4> delta;
    for (int i = 0; i < 4; ++i) delta[i] = to_real(spec.theta[i] * spec.theta[i]);

    std::vector<Term> terms;
    std::array<Real, 4> tail{};
    auto add_tail = [&](const std::array<Real, 4>& b) {
        for (int k = 0; k < 4; ++k) tail[k] += b[k];
    };
    for (const auto& [n, g] : tau_series(spec).sectors) {
        const Real sn = pow(s, n), e0 = to_real(g.delta.re());
        std::vector<Term> shell;
        for (const auto& [N, c] : g.body.terms()) shell.push_back({sn * to_real(c), e0 + to_real(N)});
        terms.insert(terms.end(), shell.begin(), shell.end());
        // next coefficient estimated from the last retained one
        const Term& last = shell.back();
        add_tail(tail_bound(last.coeff * t, last.exponent, t));
    }
    for (long n : {-spec.n_range - 1, spec.n_range + 1}) {
        const Scalar x = spec.sigma + Scalar(n);
        add_tail(tail_bound(pow(s, n) * to_real(tau_weight(spec, n)), to_real((x * x).re()), t));
    }

    std::vector<Real> d = derivatives(terms, t);
    ZetaValues out;
    out.tail = 0;
    for (int k = 0; k < 4; ++k) {
        if (d[k] == 0) continue;
        Real rel = tail[k] / abs(d[k]);
        if (rel > out.tail) out.tail = rel;
    }
    if (out.tail > tolerance)
        throw TrustRegionError("series tail estimate " + out.tail.str(3, std::ios::scientific) +
                               " exceeds the tolerance at t = " + rational_str(t_exact));

    Real l1 = d[1] / d[0];
    Real l2 = d[2] / d[0] - l1 * l1;
    Real l3 = d[3] / d[0] - 3 * d[1] * d[2] / (d[0] * d[0]) + 2 * l1 * l1 * l1;
    if (spec.kind == TauKind::p3) {
        out.zeta = t * l1;
        out.dzeta = l1 + t * l2;
        out.d2zeta = 2 * l2 + t * l3;
        out.q = -1 / out.dzeta;
        out.p = t * out.d2zeta / 2;
    } else {
        // tau = t^{-(Delta_0 + Delta_t)} tau~
        const Real a = delta[0] + delta[1];
        l1 -= a / t;
        l2 += a / (t * t);
        l3 -= 2 * a / (t * t * t);
        const Real w = t * t - t;
        out.zeta = w * l1;
        out.dzeta = (2 * t - 1) * l1 + w * l2;
        out.d2zeta = 2 * l1 + 2 * (2 * t - 1) * l2 + w * l3;
    }
    return out;
}

namespace {

// value and one directional derivative
struct Dual {
    Real v, d;
    Dual(const Real& value = Real(0), const Real& deriv = Real(0)) : v(value), d(deriv) {}
};
Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }

template <class T>
T sigma_form_t(TauKind kind, const std::array<Real, 4>& delta, const T& t, const T& z, const T& z1, const T& z2)
{
    const T two(Real(2)), four(Real(4)), one(Real(1));
    if (kind == TauKind::p3) {
        const T tz2 = t * z2;
        return tz2 * tz2 - four * z1 * z1 * (z - t * z1) + four * z1;
    }
    const T d0(2 * delta[0]), dt(2 * delta[1]), d1(2 * delta[2]);
    const T shift(delta[0] + delta[1] + delta[2] - delta[3]);
    const T a = t * z1 - z, b = z1 + shift, c = (t - one) * z1 - z;
    const T det = d0 * (dt * d1 - c * c) - a * (a * d1 - c * b) + b * (a * c - dt * b);
    const T lhs = t * (t - one) * z2;
    return lhs * lhs + two * det;
}

// zeta''' from the derivative of the sigma form along a solution
Real third_derivative(TauKind kind, const std::array<Real, 4>& delta, const Real& t, const Real& z, const Real& z1,
                      const Real& z2)
{
    Dual along = sigma_form_t<Dual>(kind, delta, {t, 1}, {z, z1}, {z1, z2}, {z2, 0});
    Dual across = sigma_form_t<Dual>(kind, delta, {t, 0}, {z, 0}, {z1, 0}, {z2, 1});
    if (across.d == 0) throw ParamError("sigma form is degenerate (zeta'' = 0) along the integration path");
    return -along.d / across.d;
}

}  // namespace

Real sigma_form(TauKind kind, const std::array<Real, 4>& delta, const Real& t, const Real& z, const Real& z1,
                const Real& z2)
{
    return sigma_form_t<Real>(kind, delta, t, z, z1, z2);
}

SigmaFormProblem sigma_problem_from_series(const TauSpec& spec, const Rational& t0, unsigned digits)
{
    ZetaValues v = zeta_eval(spec, t0, digits);
    SigmaFormProblem p;
    p.kind = spec.kind;
    p.delta = squares(spec.theta);
    p.t0 = t0;
    p.zeta0 = v.zeta;
    p.dzeta0 = v.dzeta;
    p.d2zeta0 = v.d2zeta;
    p.digits = digits;
    return p;
}

SigmaReport sigma_form_residual(const SigmaFormProblem& problem, const TauSpec& spec,
                                const std::vector<Rational>& t_samples, double tolerance)
{
    namespace ode = boost::numeric::odeint;
    PrecisionGuard guard(problem.digits);
    std::array<Real, 4> delta;
    for (int i = 0; i < 4; ++i) delta[i] = to_real(problem.delta[i]);

    using State = std::vector<Real>;
    auto rhs = [&](const State& x, State& dx, const Real& t) {
        dx[0] = x[1];
        dx[1] = x[2];
        dx[2] = third_derivative(problem.kind, delta, t, x[0], x[1], x[2]);
    };
    using Stepper = ode::runge_kutta_fehlberg78<State, Real, State, Real>;
    const Real tol = problem.rk_tolerance;

    SigmaReport report;
    report.max_residual = 0;
    report.max_rk_deviation = 0;
    const Real t0 = to_real(problem.t0);
    for (const Rational& ts : t_samples) {
        ZetaValues v = zeta_eval(spec, ts, problem.digits, tolerance);
        const Real t = to_real(ts);
        SigmaSample smp{ts, v.zeta, sigma_form(problem.kind, delta, t, v.zeta, v.dzeta, v.d2zeta), v.zeta, Real(0)};
        if (ts != problem.t0) {
            State x{problem.zeta0, problem.dzeta0, problem.d2zeta0};
            Real dt = (t - t0) / 64;
            ode::integrate_adaptive(ode::make_controlled<Stepper>(tol, tol), rhs, x, t0, t, dt);
            smp.rk_zeta = x[0];
        } else {
            smp.rk_zeta = problem.zeta0;
        }
        smp.rk_deviation = abs(smp.rk_zeta - v.zeta);
        if (abs(smp.residual) > report.max_residual) report.max_residual = abs(smp.residual);
        if (smp.rk_deviation > report.max_rk_deviation) report.max_rk_deviation = smp.rk_deviation;
        report.samples.push_back(smp);
    }
    return report;
}

}  // namespace cbtau

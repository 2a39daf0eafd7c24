#include "doctest.h"

#include "cbtau/blowup.hpp"
#include "cbtau/errors.hpp"
#include "cbtau/painleve.hpp"
#include "cbtau/virasoro.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <random>

using namespace cbtau;

namespace {

Real real_of(const Rational& q)
{
    Real x;
    mpfr_set_q(x.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return x;
}

bool zero_through(const GradedSeries& g, const Rational& order)
{
    return g.body.cutoff() && *g.body.cutoff() >= order && g.body.truncated(order).empty();
}

TauSpec p6_spec()
{
    TauSpec s;
    s.kind = TauKind::p6;
    s.theta = {Scalar(rat(1, 7)), Scalar(rat(1, 11)), Scalar(rat(1, 13)), Scalar(rat(1, 3))};
    return s;
}

}  // namespace

TEST_CASE("a single shell is the normalized block")
{
    TauSpec spec;
    spec.n_range = 0;
    spec.n_max = 5;
    SectorSeries sectors = tau_series(spec);
    REQUIRE(sectors.sectors.size() == 1);
    GradedSeries tau = sectors.sectors.at(0);
    CHECK(tau.delta == spec.sigma * spec.sigma);
    auto b = block_irregular_coeffs(VirParams{Scalar(1), spec.sigma * spec.sigma}, 5);
    for (long k = 0; k <= 5; ++k) CHECK(tau.body.coeff(Rational(k)) == b[k]);
    // flattened, the missing shell n = -1 at 1 - 2 sigma caps the trusted range
    GradedSeries flat = tau_series_flat(spec, Scalar(1));
    CHECK(*flat.body.cutoff() < 1 - 2 * spec.sigma.re());
    CHECK(flat.body.coeff(Rational(0)) == Scalar(1));

    TauSpec p6 = p6_spec();
    p6.n_range = 0;
    p6.n_max = 3;
    std::array<Scalar, 4> ext;
    for (int i = 0; i < 4; ++i) ext[i] = p6.theta[i] * p6.theta[i];
    auto r = block_regular_coeffs(VirParams{Scalar(1), p6.sigma * p6.sigma}, ext, 3);
    GradedSeries t6 = tau_series(p6).sectors.at(0);
    for (long k = 0; k <= 3; ++k) CHECK(t6.body.coeff(Rational(k)) == r[k]);
}

TEST_CASE("shells start at (sigma + n)^2 and carry s^n")
{
    TauSpec spec;
    spec.n_max = 2;
    SectorSeries tau = tau_series(spec);
    for (long n = -2; n <= 2; ++n) {
        Scalar x = spec.sigma + Scalar(n);
        CHECK(tau.sectors.at(n).delta == x * x);
        CHECK(tau.sectors.at(n).body.min_exponent() == Rational(0));
    }
    const Scalar sh(rat(2, 3));
    GradedSeries flat = tau_series_flat(spec, sh);
    // (sigma+1)^2 - sigma^2 = 2 sigma + 1
    Rational e = 2 * spec.sigma.re() + 1;
    CHECK(flat.body.coeff(e) == sh * tau_weight(spec, 1));
    Rational em = -2 * spec.sigma.re() + 1;
    CHECK(flat.body.coeff(em) == sh.pow(-1) * tau_weight(spec, -1));
}

TEST_CASE("shell weights reproduce the coefficient ratios")
{
    for (const Scalar& sigma : {Scalar(rat(1, 5)), Scalar(rat(2, 7)), Scalar(rat(1, 9), rat(1, 4))}) {
        TauSpec p3;
        p3.sigma = sigma;
        TauSpec p6 = p6_spec();
        p6.sigma = sigma;
        CHECK(tau_weight(p3, 0) == Scalar(1));
        for (long n = -2; n <= 2; ++n) {
            for (long m = -2; m <= 2; ++m)
                CHECK(tau_weight(p3, n + m) * tau_weight(p3, -n) / tau_weight(p3, m) == c_ratio_p3(sigma, Rational(n), m));
            CHECK(tau_weight(p6, n) * tau_weight(p6, -n) == c_ratio_p6(sigma, p6.theta, Rational(n)));
        }
    }
}

TEST_CASE("gauge factor against Gamma-function values of C(sigma+1)/C(sigma)")
{
    using boost::math::tgamma;
    Real::default_precision(50);
    TauSpec p3;
    const Real s = real_of(p3.sigma.re());
    // G(z+1) = Gamma(z) G(z)
    Real c3 = tgamma(-1 - 2 * s) * tgamma(-2 * s) / (tgamma(1 + 2 * s) * tgamma(2 + 2 * s));
    Real mine = real_of(tau_weight(p3, 1).re()) * tau_gauge(p3, 50);
    CHECK(abs(mine / c3 - 1) < Real("1e-40"));

    TauSpec p6 = p6_spec();
    std::array<Real, 4> th;
    for (int i = 0; i < 4; ++i) th[i] = real_of(p6.theta[i].re());
    Real c6 = c3;
    for (int e : {1, -1})
        c6 *= tgamma(1 + th[1] + e * th[0] + s) / tgamma(th[1] + e * th[0] - s) * tgamma(1 + th[2] + e * th[3] + s) /
              tgamma(th[2] + e * th[3] - s);
    Real mine6 = real_of(tau_weight(p6, 1).re()) * tau_gauge(p6, 50);
    CHECK(abs(mine6 / c6 - 1) < Real("1e-40"));
}

TEST_CASE("Painleve III tau residual vanishes")
{
    TauSpec spec;  // sigma = 1/5
    spec.n_range = 2;
    spec.n_max = 6;
    CHECK(zero_through(tau_residual_flat(spec, Scalar(1), Rational(6)), Rational(6)));
    for (const auto& [m, g] : tau_residual(spec).sectors) {
        CAPTURE(m);
        CHECK(g.body.empty());
        if (std::labs(m) <= 2) CHECK(*g.body.cutoff() >= Rational(6));
    }
}

TEST_CASE("Painleve III tau residual vanishes at generic points")
{
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> num(1, 12), den(13, 29);
    int done = 0;
    while (done < 3) {
        TauSpec spec;
        spec.sigma = Scalar(rat(num(rng), den(rng)));
        spec.n_range = 2;
        spec.n_max = 4;
        Scalar sh(rat(num(rng), num(rng)));
        try {
            CAPTURE(spec.sigma);
            CHECK(zero_through(tau_residual_flat(spec, sh, Rational(4)), Rational(4)));
            ++done;
        } catch (const ParamError&) {
        }
    }
    // complex sigma: only the sector form exists
    TauSpec c;
    c.sigma = Scalar(rat(1, 6), rat(1, 5));
    c.n_max = 3;
    c.n_range = 1;
    for (const auto& [m, g] : tau_residual(c).sectors) CHECK(g.body.empty());
    CHECK_THROWS_AS(tau_residual_flat(c, Scalar(1), Rational(3)), ParamError);
}

TEST_CASE("Painleve VI tau residual vanishes")
{
    TauSpec spec = p6_spec();
    spec.n_range = 2;
    spec.n_max = 4;
    CHECK(zero_through(tau_residual_flat(spec, Scalar(1), Rational(4)), Rational(4)));

    TauSpec other = p6_spec();
    other.sigma = Scalar(rat(3, 10));
    other.theta = {Scalar(rat(2, 9)), Scalar(rat(1, 4)), Scalar(rat(1, 6)), Scalar(rat(2, 5))};
    other.n_range = 2;
    other.n_max = 3;
    CHECK(zero_through(tau_residual_flat(other, Scalar(rat(5, 4)), Rational(3)), Rational(3)));
}

TEST_CASE("full residual sectors equal the per-power-of-s sums")
{
    for (TauKind kind : {TauKind::p3, TauKind::p6}) {
        TauSpec spec = kind == TauKind::p3 ? TauSpec{} : p6_spec();
        spec.sigma = Scalar(rat(2, 7));
        spec.n_range = 2;
        spec.n_max = 3;
        IdentityParams ip;
        ip.sigma = spec.sigma;
        ip.theta = spec.theta;
        // compare the bilinear sums with a non-vanishing operator so the check is not 0 = 0
        BilinearOperator d2({{{Scalar(1)}, 0, {2, 1, -1}}, {{Scalar(0), Scalar(1)}, 0, {0, 1, -1}}});
        SectorSeries tau = tau_series(spec);
        for (long m : {0L, 1L, 2L}) {
            CAPTURE(m);
            GradedSeries full{Scalar(0), Series()};
            for (long a = std::max(-2L, m - 2); a <= std::min(2L, m + 2); ++a)
                full += d2.apply(tau.sectors.at(a), tau.sectors.at(m - a));
            GradedSeries per = tau_weight(spec, m) * c1_lattice_sum(d2, ip, m, kind == TauKind::p6, Rational(2));
            full = full.rebased(per.delta);
            CHECK_FALSE(per.body.truncated(Rational(2)).empty());
            CHECK(full.body.truncated(Rational(2)) == per.body.truncated(Rational(2)));
        }
        // and with the tau-form operator both vanish
        for (const auto& [m, g] : tau_residual(spec).sectors) CHECK(g.body.empty());
    }
    IdentityParams ip;
    ip.sigma = Scalar(rat(2, 7));
    CHECK(verify_identity(Identity::s0, ip, Rational(4)).vanishes());
    CHECK(verify_identity(Identity::s1, ip, Rational(4)).vanishes());
}

TEST_CASE("a corrupted coefficient ratio is detected at the first affected order")
{
    TauSpec spec;
    spec.n_range = 2;
    spec.n_max = 4;
    SectorSeries tau = tau_series(spec);
    tau.sectors.at(1) = Scalar(2) * tau.sectors.at(1);
    SectorSeries res = tau_residual(spec, tau);
    // sectors without the n = 1 shell are untouched
    CHECK(res.sectors.at(-4).body.empty());
    CHECK(res.sectors.at(0).body.truncated(Rational(1)).empty());
    // sector 0 first sees (1, -1) at 2 sigma^2 + 2
    CHECK_FALSE(res.sectors.at(0).body.coeff(Rational(2)).is_zero());
    // the s^1 sector starts at 2 sigma^2 + 2 sigma + 1 but its leading term cancels for any weight,
    // so the flattened residual first moves at 2 sigma^2 + 2
    GradedSeries flat = flatten_residual(spec, res, Scalar(1), Rational(4));
    REQUIRE(flat.body.min_exponent());
    CHECK(*flat.body.min_exponent() == Rational(2));
    CHECK_FALSE(res.sectors.at(1).body.empty());
    CHECK(*res.sectors.at(1).body.min_exponent() > Rational(0));
}

TEST_CASE("operator mutation breaks the tau form")
{
    TauSpec spec;
    spec.n_range = 1;
    spec.n_max = 2;
    set_operator_mutation(true);
    GradedSeries bad = tau_residual_flat(spec, Scalar(1), Rational(2));
    set_operator_mutation(false);
    CHECK_FALSE(bad.body.truncated(Rational(2)).empty());
}

TEST_CASE("resonant sigma is rejected")
{
    TauSpec spec;
    spec.sigma = Scalar(rat(1, 2));
    spec.n_max = 2;
    CHECK_THROWS_AS(tau_series(spec), ParamError);
    spec.sigma = Scalar(rat(1, 5));
    spec.n_range = -1;
    CHECK_THROWS_AS(tau_series(spec), ParamError);
}

TEST_CASE("shell bound")
{
    CHECK(shell_bound(Scalar(rat(1, 5)), Rational(8)) == 3);  // (1/5 - 3)^2 = 7.84 <= 8.04
    CHECK(shell_bound(Scalar(rat(1, 5)), Rational(6)) == 2);
    CHECK(shell_bound(Scalar(0), Rational(0)) == 0);
}

TEST_CASE("zeta derivatives agree with finite differences")
{
    TauSpec spec;
    spec.n_max = 8;
    spec.n_range = shell_bound(spec.sigma, spec.n_max);
    const Rational t = rat(3, 100), h = rat(1, 1000000);
    ZetaValues v = zeta_eval(spec, t, 60, 1e-10);
    ZetaValues up = zeta_eval(spec, t + h, 60, 1e-10), dn = zeta_eval(spec, t - h, 60, 1e-10);
    const Real hr = real_of(h);
    CHECK(abs((up.dzeta - dn.dzeta) / (2 * hr) / v.d2zeta - 1) < Real("1e-6"));
    CHECK(abs((up.zeta - dn.zeta) / (2 * hr) / v.dzeta - 1) < Real("1e-6"));
    REQUIRE(v.q);
    CHECK(abs(*v.q * v.dzeta + 1) < Real("1e-40"));
    CHECK(abs(*v.p - real_of(t) * v.d2zeta / 2) < Real("1e-40"));

    TauSpec p6 = p6_spec();
    p6.n_max = 6;
    p6.n_range = shell_bound(p6.sigma, p6.n_max);
    ZetaValues w = zeta_eval(p6, t, 60, 1e-8);
    ZetaValues wu = zeta_eval(p6, t + h, 60, 1e-8), wd = zeta_eval(p6, t - h, 60, 1e-8);
    CHECK(abs((wu.dzeta - wd.dzeta) / (2 * hr) / w.d2zeta - 1) < Real("1e-6"));
    CHECK_FALSE(w.q);
}

TEST_CASE("zeta trust region")
{
    TauSpec spec;
    spec.n_max = 3;
    spec.n_range = 2;
    CHECK_THROWS_AS(zeta_eval(spec, rat(1, 2), 60, 1e-12), TrustRegionError);
    CHECK_THROWS_AS(zeta_eval(spec, Rational(0)), TrustRegionError);
    TauSpec p6 = p6_spec();
    CHECK_THROWS_AS(zeta_eval(p6, Rational(1)), TrustRegionError);

    // a value accepted at one truncation does not move when the truncation doubles
    for (const Rational& t : {rat(1, 200), rat(1, 100)}) {
        const double tol = 1e-6;
        TauSpec lo;
        lo.n_max = 4;
        lo.n_range = shell_bound(lo.sigma, lo.n_max);
        TauSpec hi = lo;
        hi.n_max = 8;
        hi.n_range = shell_bound(hi.sigma, hi.n_max);
        ZetaValues a = zeta_eval(lo, t, 60, tol), b = zeta_eval(hi, t, 60, tol);
        CHECK(abs(a.zeta - b.zeta) <= tol * abs(b.zeta));
    }
}

TEST_CASE("constant factors in tau do not change zeta")
{
    // s and the shells are fixed; rescaling tau by t-independent data leaves zeta alone. A change of
    // the integration constant s does move zeta.
    TauSpec spec;
    spec.n_max = 8;
    spec.n_range = shell_bound(spec.sigma, spec.n_max);
    ZetaValues a = zeta_eval(spec, rat(1, 40), 60, 1e-10);
    TauSpec other = spec;
    other.s = Scalar(rat(1, 2));
    ZetaValues b = zeta_eval(other, rat(1, 40), 60, 1e-10);
    CHECK(abs(a.zeta - b.zeta) > Real("1e-6"));
    // tau(s) at sigma and tau(s') at sigma + 1 differ by s^{-1} C(sigma+1)/C(sigma): the same zeta
    TauSpec shifted = spec;
    shifted.sigma = spec.sigma + Scalar(1);
    shifted.n_range = spec.n_range + 1;
    ZetaValues c = zeta_eval(shifted, rat(1, 40), 60, 1e-10);
    CHECK(abs(a.zeta - c.zeta) < Real("1e-10"));
}

TEST_CASE("sigma forms: Painleve III")
{
    TauSpec spec;  // sigma = 1/5, s = 1
    spec.n_max = 8;
    spec.n_range = shell_bound(spec.sigma, spec.n_max);
    const std::vector<Rational> ts{rat(1, 100), rat(1, 50), rat(1, 20)};
    SigmaFormProblem prob = sigma_problem_from_series(spec, ts.front());
    SigmaReport rep = sigma_form_residual(prob, spec, ts, 1e-10);
    REQUIRE(rep.samples.size() == 3);
    CHECK(rep.max_residual < Real("1e-8"));
    CHECK(rep.max_rk_deviation < Real("1e-6"));
    // a wrong initial slope is visible to the integrator
    prob.dzeta0 *= Real("1.001");
    CHECK(sigma_form_residual(prob, spec, ts, 1e-10).max_rk_deviation > Real("1e-6"));
}

TEST_CASE("sigma forms: Painleve VI")
{
    TauSpec spec = p6_spec();
    spec.n_max = 8;
    spec.n_range = shell_bound(spec.sigma, spec.n_max);
    const std::vector<Rational> ts{rat(1, 100), rat(1, 50), rat(1, 20)};
    SigmaReport rep = sigma_form_residual(sigma_problem_from_series(spec, ts.front()), spec, ts, 1e-10);
    CHECK(rep.max_residual < Real("1e-8"));
    CHECK(rep.max_rk_deviation < Real("1e-6"));
    // the same zeta with a different theta_inf violates the determinant form
    std::array<Real, 4> d;
    for (int i = 0; i < 4; ++i) d[i] = real_of((spec.theta[i] * spec.theta[i]).re());
    d[3] += Real("0.01");
    ZetaValues v = zeta_eval(spec, rat(1, 50), 60, 1e-10);
    CHECK(abs(sigma_form(TauKind::p6, d, Real("0.02"), v.zeta, v.dzeta, v.d2zeta)) > Real("1e-6"));
}

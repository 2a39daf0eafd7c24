#pragma once

#include "cbtau/bilinear.hpp"
#include "cbtau/errors.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <array>
#include <map>
#include <optional>
#include <vector>

namespace cbtau {

using Real = boost::multiprecision::mpfr_float;

enum class TauKind { p3, p6 };

// tau = sum_{|n| <= n_range} s^n C(sigma+n) F((sigma+n)^2 | t), each block to relative order n_max.
// P6 builds t^{Delta_0 + Delta_t} tau with c = 1 four-point blocks, Delta_nu = theta_nu^2.
//
// C(sigma+n)/C(sigma) = w_n g^n with w_n rational and g a product of Gamma values (tau_gauge).
// The exact series therefore run in the variable s_hat = s g; only numeric evaluation needs g.
struct TauSpec {
    TauKind kind = TauKind::p3;
    Scalar sigma{rat(1, 5)};
    Scalar s{1};
    std::array<Scalar, 4> theta{Scalar(rat(1, 7)), Scalar(rat(1, 11)), Scalar(rat(1, 13)), Scalar(rat(1, 3))};
    long n_range = 2;
    Rational n_max{6};
};

// w_n = C(sigma+n)/C(sigma) / g^n; w_0 = 1 and w_{n+m} w_{-n} / w_m = c_ratio(sigma, n, m).
Scalar tau_weight(const TauSpec& spec, long n);

// Terms grouped by the power of s. For complex sigma the exponents of different shells differ by
// non-real amounts, so only the sector form exists; flatten needs real sigma.
struct SectorSeries {
    std::map<long, GradedSeries> sectors;
};

// s_hat^n sector of tau/C(sigma) is w_n F((sigma+n)^2|t).
SectorSeries tau_series(const TauSpec& spec);
// tau/C(sigma) at s_hat as one series over sigma^2, trusted below the first missing shell.
GradedSeries tau_series_flat(const TauSpec& spec, const Scalar& s_hat);

// D^III(tau, tau) or D^VI(tau~, tau~), grouped by the power of s. Every sector carries the cutoff
// below which its pairs are complete, including sectors with no retained pair.
SectorSeries tau_residual(const TauSpec& spec);
// The residual of given sectors, e.g. a deliberately corrupted tau.
SectorSeries tau_residual(const TauSpec& spec, const SectorSeries& tau);
// Same at s_hat, over 2 sigma^2 and trusted to at most `order` above it.
GradedSeries tau_residual_flat(const TauSpec& spec, const Scalar& s_hat, const Rational& order);
GradedSeries flatten_residual(const TauSpec& spec, const SectorSeries& residual, const Scalar& s_hat,
                              const Rational& order);

// Largest |n| with Re (sigma+n)^2 <= Re sigma^2 + n_max.
long shell_bound(const Scalar& sigma, const Rational& n_max);

// g = Gamma(1-2 sigma)^2 / Gamma(1+2 sigma)^2 (P3), times prod Gamma(1 + theta_t +- theta_0 + e sigma)^e
// Gamma(1 + theta_1 +- theta_inf + e sigma)^e over e = +-1 (P6). Needs real parameters.
Real tau_gauge(const TauSpec& spec, unsigned digits = 60);

class TrustRegionError : public ParamError {
public:
    using ParamError::ParamError;
};

struct ZetaValues {
    Real zeta, dzeta, d2zeta;
    Real tail;  // estimated relative truncation error
    // P3 only: q = -1/zeta', p = t zeta''/2
    std::optional<Real> q, p;
};

// zeta = t dlog tau/dt (P3) or t(t-1) dlog tau/dt (P6) at the integration constant spec.s, by
// term-wise differentiation of the exact series. Throws TrustRegionError when the tail estimate exceeds `tolerance`.
ZetaValues zeta_eval(const TauSpec& spec, const Rational& t, unsigned digits = 60, double tolerance = 1e-12);

// The sigma-form left side minus right side at (t, zeta, zeta', zeta'').
Real sigma_form(TauKind kind, const std::array<Real, 4>& delta, const Real& t, const Real& z, const Real& z1,
                const Real& z2);

struct SigmaFormProblem {
    TauKind kind = TauKind::p3;
    std::array<Scalar, 4> delta{};  // Delta_0, Delta_t, Delta_1, Delta_inf (P6)
    Rational t0;
    Real zeta0, dzeta0, d2zeta0;
    unsigned digits = 60;
    double rk_tolerance = 1e-20;
};

// Initial data from the exact series at t0.
SigmaFormProblem sigma_problem_from_series(const TauSpec& spec, const Rational& t0, unsigned digits = 60);

struct SigmaSample {
    Rational t;
    Real zeta;
    Real residual;     // sigma form at the series values
    Real rk_zeta;      // integrated from t0
    Real rk_deviation;
};

struct SigmaReport {
    std::vector<SigmaSample> samples;
    Real max_residual;
    Real max_rk_deviation;
};

// Series residuals at every sample plus an adaptive Runge-Kutta integration of the
// differentiated sigma form from the problem's initial point.
SigmaReport sigma_form_residual(const SigmaFormProblem& problem, const TauSpec& spec,
                                const std::vector<Rational>& t_samples, double tolerance = 1e-12);

}  // namespace cbtau

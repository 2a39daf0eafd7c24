#include "cbtau_tools/acceptance.hpp"

#include "cbtau/bilinear.hpp"
#include "cbtau/blowup.hpp"
#include "cbtau/characters.hpp"
#include "cbtau/errors.hpp"
#include "cbtau/fock.hpp"
#include "cbtau/nsr.hpp"
#include "cbtau/painleve.hpp"
#include "cbtau/partitions.hpp"
#include "cbtau/virasoro.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace cbtau::tools {

namespace {

using Clock = std::chrono::steady_clock;

class Checks {
public:
    void record(bool ok, const std::string& what) { (ok ? passed_ : failed_).push_back(what); }

    // A throwing check counts as failed; the exception text is kept.
    void guarded(const std::string& what, const std::function<bool()>& f)
    {
        try {
            record(f(), what);
        } catch (const std::exception& e) {
            record(false, what + ": " + e.what());
        }
    }

    bool pass() const { return failed_.empty() && !passed_.empty(); }

    std::vector<std::string> details() const
    {
        std::vector<std::string> out;
        for (const auto& f : failed_) out.push_back("FAIL " + f);
        for (const auto& p : passed_) out.push_back("ok   " + p);
        return out;
    }

private:
    std::vector<std::string> passed_, failed_;
};

std::string str(const Scalar& s) { return s.str(); }
std::string str(const Rational& r) { return rational_str(r); }

class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    // positive rational num/den with num in [1, 9], den in [2, 11]
    Scalar positive()
    {
        std::uniform_int_distribution<int> num(1, 9), den(2, 11);
        return Scalar(rat(num(rng_), den(rng_)));
    }
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// ---- 1: character identities ----

void characters(Checks& c)
{
    const Rational order(20);
    c.guarded("triple product to order 20", [&] { return character_check(jtp_product_side(order), jtp_sum_side(order), order); });
    c.guarded("F+NSR character equals the Vir+Vir sum to order 20",
              [&] { return character_check(fnsr_character(order), vir_pair_character_sum(order), order); });
    c.guarded("vacuum identity to order 20",
              [&] { return character_check(vacuum_product_side(order), vacuum_sum_side(order), order); });
}

// ---- 2: free-field oracle ----

FockState random_vector(const FreeField& ff, std::mt19937_64& rng, int max_level2)
{
    std::uniform_int_distribution<int> coef(-5, 5), kind(0, 2), mode(1, max_level2);
    FockState out;
    for (int t = 0; t < 6; ++t) {
        FockState s = fock_vacuum();
        int budget = max_level2;
        for (int step = 0; step < 4 && budget > 0; ++step) {
            int k = kind(rng);
            int m2 = mode(rng);
            if (k == 0) m2 = 2 * std::max(1, m2 / 2);
            else if (m2 % 2 == 0) m2 -= 1;
            if (m2 > budget) break;
            budget -= m2;
            if (k == 0) s = ff.boson(-m2 / 2, s);
            else if (k == 1) s = ff.psi(-m2, s);
            else s = ff.fermion_f(-m2, s);
        }
        add_to(out, s, Scalar(rat(coef(rng), 1 + t)));
    }
    return out;
}

FockState combine(const FockState& a, const FockState& b, const Scalar& fb)
{
    FockState out = a;
    add_to(out, b, fb);
    return out;
}

bool replay_fnsr(const FreeField& ff, const FockState& v)
{
    const Scalar q = ff.Q(), c = Scalar(1) + Scalar(2) * q * q;
    for (int m = -3; m <= 3; ++m)
        for (int n = -3; n <= 3; ++n) {
            FockState rhs;
            add_to(rhs, ff.L(m + n, v), Scalar(m - n));
            if (m + n == 0) add_to(rhs, v, c * Scalar(rat(m * m * m - m, 8)));
            if (combine(ff.L(m, ff.L(n, v)), ff.L(n, ff.L(m, v)), Scalar(-1)) != rhs) return false;
        }
    for (int r2 = -5; r2 <= 5; r2 += 2)
        for (int s2 = -5; s2 <= 5; s2 += 2) {
            FockState rhs;
            add_to(rhs, ff.L((r2 + s2) / 2, v), Scalar(2));
            if (r2 + s2 == 0) add_to(rhs, v, c * Scalar(rat(r2 * r2 - 1, 8)));
            if (combine(ff.G(r2, ff.G(s2, v)), ff.G(s2, ff.G(r2, v)), Scalar(1)) != rhs) return false;
            FockState ff_anti = combine(ff.fermion_f(r2, ff.fermion_f(s2, v)), ff.fermion_f(s2, ff.fermion_f(r2, v)), Scalar(1));
            if (ff_anti != (r2 + s2 == 0 ? v : FockState{})) return false;
            if (!combine(ff.fermion_f(r2, ff.G(s2, v)), ff.G(s2, ff.fermion_f(r2, v)), Scalar(1)).empty()) return false;
        }
    for (int m = -3; m <= 3; ++m)
        for (int r2 = -5; r2 <= 5; r2 += 2) {
            FockState rhs;
            add_to(rhs, ff.G(2 * m + r2, v), Scalar(rat(m - r2, 2)));
            if (combine(ff.L(m, ff.G(r2, v)), ff.G(r2, ff.L(m, v)), Scalar(-1)) != rhs) return false;
            if (!combine(ff.L(m, ff.fermion_f(r2, v)), ff.fermion_f(r2, ff.L(m, v)), Scalar(-1)).empty()) return false;
        }
    return true;
}

bool replay_vir_pair(const FreeField& ff, const FockState& v)
{
    for (int eta = 1; eta <= 2; ++eta) {
        Scalar c = vir12_central_charge(ff.b(), eta);
        for (int m = -2; m <= 2; ++m)
            for (int n = -2; n <= 2; ++n) {
                FockState rhs;
                add_to(rhs, ff.vir(eta, m + n, v), Scalar(m - n));
                if (m + n == 0) add_to(rhs, v, c * Scalar(rat(m * m * m - m, 12)));
                if (combine(ff.vir(eta, m, ff.vir(eta, n, v)), ff.vir(eta, n, ff.vir(eta, m, v)), Scalar(-1)) != rhs)
                    return false;
            }
    }
    for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n)
            if (!combine(ff.vir(1, m, ff.vir(2, n, v)), ff.vir(2, n, ff.vir(1, m, v)), Scalar(-1)).empty()) return false;
    // L^(1) + L^(2) = L + L^f
    for (int n = -2; n <= 2; ++n)
        if (combine(ff.vir(1, n, v), ff.vir(2, n, v), Scalar(1)) != combine(ff.L(n, v), ff.fermion_bilinear(n, v), Scalar(rat(1, 2))))
            return false;
    return true;
}

void oracle(Checks& c, const AcceptanceOptions& opts)
{
    Draw d(opts.seed + 2);
    for (int k = 0; k < 3; ++k) {
        Scalar b = d.positive() + Scalar(1), p = d.positive();
        std::string at = " at (b, P) = (" + str(b) + ", " + str(p) + ")";
        for (int sign : {-1, 1}) {
            FreeField ff(b, p, sign);
            std::string real = sign < 0 ? " [- realization]" : " [+ realization]";
            for (int trial = 0; trial < 2; ++trial) {
                FockState v = random_vector(ff, d.rng(), 6);
                c.guarded("F+NSR relations on a random level<=3 vector" + at + real, [&] { return replay_fnsr(ff, v); });
                c.guarded("Vir+Vir relations on a random level<=3 vector" + at + real, [&] { return replay_vir_pair(ff, v); });
            }
        }
        Scalar q = b + b.inverse();
        c.record(vir12_central_charge(b, 1) + vir12_central_charge(b, 2) ==
                     Scalar(rat(3, 2)) * (Scalar(1) + Scalar(2) * q * q) + Scalar(rat(1, 2)),
                 "c1 + c2 = 3c/2 + 1/2" + at);
        FnsrOracle orc(b);
        for (Rational n : {rat(1, 2), rat(-1, 2), rat(1), rat(-1)}) {
            c.guarded("|P," + str(n) + "> highest weight with lattice weights" + at, [&] {
                auto rep = orc.verify_highest_weight(p, n, 3);
                return rep.pass && rep.eigen1 == vir12_weight(b, p, n, 1) && rep.eigen2 == vir12_weight(b, p, n, 2);
            });
        }
    }
}

// ---- 3: blow-up closed forms ----

// Omega^2_{n+1/2} Omega^2_{n-1/2} / Omega^4_n as a ratio of linear factors in P
Scalar omega_relation_rhs(const Scalar& b, const Scalar& p, const Rational& n)
{
    Scalar binv = b.inverse(), q = b + binv, two_p = Scalar(2) * p;
    long m = to_long(4 * n);
    Scalar num(1), den(1);
    for (long i = 0; i <= m - 2; ++i) num *= two_p + Scalar(i) * b + Scalar(m - 2 - i) * binv;
    for (long i = 0; i <= m; ++i) num *= two_p + q + Scalar(i) * b + Scalar(m - i) * binv;
    for (long i = 0; i <= m - 1; ++i)
        den *= (two_p + Scalar(i) * b + Scalar(m - i) * binv) * (two_p + Scalar(i) * binv + Scalar(m - i) * b);
    return num / den;
}

void blowup(Checks& c, const AcceptanceOptions& opts)
{
    Draw d(opts.seed + 3);
    const Rational ns[] = {rat(0), rat(1, 2), rat(1)};
    for (int k = 0; k < 5; ++k) {
        Scalar b = d.positive() + Scalar(1), p = d.positive(), alpha = d.positive(), pp = -d.positive();
        std::string at = " at (P, alpha, P', b) = (" + str(p) + ", " + str(alpha) + ", " + str(pp) + ", " + str(b) + ")";
        FnsrOracle orc(b);
        for (const Rational& n : ns)
            for (const Rational& np : ns)
                c.guarded("l^2_{" + str(n) + "," + str(np) + "} closed form equals the oracle" + at,
                          [&] { return l_squared(b, p, alpha, pp, n, np) == orc.l_squared(p, alpha, pp, n, np); });
        for (Rational n : {rat(1, 2), rat(1), rat(3, 2)})
            c.guarded("Omega^2 three-term relation at n = " + str(n) + at, [&] {
                Scalar lhs = omega_sq(p, n + rat(1, 2), b) * omega_sq(p, n - rat(1, 2), b) / omega_sq(p, n, b).pow(2);
                return lhs == omega_relation_rhs(b, p, n);
            });
        Scalar q = b + b.inverse();
        c.guarded("printed values l_00, l^2_{1/2,1/2}, l^2_{0,1/2}, l^2_{1/2,0}, Omega^2_{1/2}" + at, [&] {
            Scalar top = (q + p + pp - alpha) * (p + pp + alpha);
            return l_reduced(b, p, alpha, pp, 0, 0) == Scalar(1) &&
                   l_squared(b, p, alpha, pp, rat(1, 2), rat(1, 2)) ==
                       top * top / (Scalar(4) * p * pp * (q + Scalar(2) * p) * (q + Scalar(2) * pp)) &&
                   l_squared(b, p, alpha, pp, 0, rat(1, 2)) == -(((q + Scalar(2) * pp) * pp).inverse()) &&
                   l_squared(b, p, alpha, pp, rat(1, 2), 0) == -(((q + Scalar(2) * p) * p).inverse()) &&
                   omega_sq(p, rat(1, 2), b) == -(q + Scalar(2) * p) / (Scalar(4) * p);
        });
    }
}

// ---- 4, 5: identities at random generic points ----

IdentityParams random_identity_params(Draw& d)
{
    IdentityParams ps;
    ps.b = d.positive() + Scalar(1);
    ps.p = d.positive();
    for (auto& m : ps.momenta) m = d.positive();
    ps.sigma = d.positive() * Scalar(rat(1, 3));
    for (auto& t : ps.theta) t = d.positive() * Scalar(rat(1, 2));
    return ps;
}

std::string describe(const IdentityParams& ps)
{
    std::ostringstream os;
    os << "(b, P) = (" << ps.b << ", " << ps.p << "), momenta (" << ps.momenta[0] << ", " << ps.momenta[1] << ", "
       << ps.momenta[2] << ", " << ps.momenta[3] << ")";
    return os.str();
}

// Verifies the identities at `points` draws; a draw where any of them hits a pole or degenerate
// weight is replaced.
void identities_at_random_points(Checks& c, std::uint64_t seed, const std::vector<Identity>& ids, const Rational& order,
                                 int points)
{
    Draw d(seed);
    int done = 0;
    for (int attempt = 0; attempt < 40 && done < points; ++attempt) {
        IdentityParams ps = random_identity_params(d);
        std::vector<std::pair<std::string, bool>> results;
        try {
            for (Identity id : ids) results.emplace_back(identity_name(id), verify_identity(id, ps, order).vanishes());
        } catch (const ParamError&) {
            continue;
        }
        for (const auto& [name, ok] : results)
            c.record(ok, name + " residual vanishes to relative order " + str(order) + " at " + describe(ps));
        ++done;
    }
    c.record(done == points, "found " + std::to_string(points) + " generic parameter points");
}

void blockdecomp(Checks& c, const AcceptanceOptions& opts)
{
    identities_at_random_points(c, opts.seed + 4, {Identity::blockdecomp}, Rational(4), 3);
}

void bilinear(Checks& c, const AcceptanceOptions& opts)
{
    identities_at_random_points(c, opts.seed + 5,
                                {Identity::bilin0, Identity::bilin1, Identity::bilin, Identity::relsh20, Identity::t1,
                                 Identity::hat_f3, Identity::relsh32},
                                Rational(4), 2);
    identities_at_random_points(c, opts.seed + 50,
                                {Identity::chdecomp, Identity::pvi_bilin, Identity::t1g, Identity::t2g, Identity::t3g,
                                 Identity::relsh32g},
                                rat(5, 2), 2);
}

// ---- 6: tau-function forms ----

bool zero_through(const GradedSeries& g, const Rational& order)
{
    return g.body.cutoff() && *g.body.cutoff() >= order && g.body.truncated(order).empty();
}

void tau_forms(Checks& c)
{
    for (Rational sigma : {rat(1, 5), rat(2, 7)}) {
        IdentityParams ps;
        ps.sigma = Scalar(sigma);
        for (Identity id : {Identity::s0, Identity::s1})
            c.guarded(identity_name(id) + " vanishes to 2 sigma^2 + 6 at sigma = " + str(sigma),
                      [&] { return verify_identity(id, ps, Rational(6)).vanishes(); });
        TauSpec spec;
        spec.sigma = Scalar(sigma);
        spec.n_range = 2;
        spec.n_max = 6;
        c.guarded("D^III(tau, tau) vanishes with n_range = 2 at sigma = " + str(sigma), [&] {
            for (const auto& [m, g] : tau_residual(spec).sectors) {
                if (!g.body.empty()) return false;
                if (std::labs(m) <= 2 && !(g.body.cutoff() && *g.body.cutoff() >= Rational(6))) return false;
            }
            return zero_through(tau_residual_flat(spec, Scalar(1), Rational(6)), Rational(6));
        });
    }
    IdentityParams ps;
    ps.sigma = Scalar(rat(3, 10));
    ps.theta = {Scalar(rat(2, 9)), Scalar(rat(1, 4)), Scalar(rat(1, 6)), Scalar(rat(2, 5))};
    for (Identity id : {Identity::s0_p6, Identity::s1_p6})
        c.guarded(identity_name(id) + " vanishes to 2 sigma^2 + 4 at sigma = 3/10",
                  [&] { return verify_identity(id, ps, Rational(4)).vanishes(); });
    TauSpec spec;
    spec.kind = TauKind::p6;
    spec.sigma = ps.sigma;
    spec.theta = ps.theta;
    spec.n_range = 2;
    spec.n_max = 4;
    c.guarded("D^VI(tau~, tau~) vanishes with n_range = 2 at sigma = 3/10", [&] {
        for (const auto& [m, g] : tau_residual(spec).sectors)
            if (!g.body.empty()) return false;
        return zero_through(tau_residual_flat(spec, Scalar(1), Rational(4)), Rational(4));
    });
}

// ---- 7: sigma forms ----

void sigma_forms(Checks& c)
{
    const std::vector<Rational> ts{rat(1, 100), rat(1, 50), rat(1, 20)};
    for (TauKind kind : {TauKind::p3, TauKind::p6}) {
        TauSpec spec;
        spec.kind = kind;
        spec.n_max = 8;
        spec.n_range = shell_bound(spec.sigma, spec.n_max);
        std::string label = kind == TauKind::p3 ? "Painleve III" : "Painleve VI";
        c.guarded(label + " sigma form at t = 1/100, 1/50, 1/20: residual < 1e-8, RK deviation < 1e-6", [&] {
            SigmaReport rep = sigma_form_residual(sigma_problem_from_series(spec, ts.front()), spec, ts, 1e-10);
            return rep.samples.size() == ts.size() && rep.max_residual < Real("1e-8") && rep.max_rk_deviation < Real("1e-6");
        });
    }
}

// ---- 8: fast expansion ----

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double best_time(FastScheme scheme, const FastParams& fp, long n, int repeats)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = Clock::now();
        fast_block(scheme, fp, n);
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

// p(0..n) from Euler's pentagonal recurrence
std::vector<double> partition_counts(long n)
{
    std::vector<double> p(n + 1, 0);
    p[0] = 1;
    for (long m = 1; m <= n; ++m)
        for (long k = 1;; ++k) {
            long g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
            if (g1 > m) break;
            double sign = k % 2 ? 1 : -1;
            p[m] += sign * p[m - g1];
            if (g2 <= m) p[m] += sign * p[m - g2];
        }
    return p;
}

void fast_expansion(Checks& c, const AcceptanceOptions& opts)
{
    for (Rational sigma : {rat(1, 5), rat(3, 11)}) {
        FastParams fp;
        fp.sigma = Scalar(sigma);
        fp.threads = opts.threads;
        c.guarded("c1-irregular equals the Gram block to N = 8 at sigma = " + str(sigma), [&] {
            CoeffTable t = fast_block(FastScheme::c1_irregular, fp, 8);
            for (const auto& [pt, v] : t.first) {
                Scalar s = fp.sigma + Scalar(pt.first);
                if (v != block_irregular_coeffs(VirParams{Scalar(1), s * s}, static_cast<long>(v.size()) - 1)) return false;
            }
            return t.at(0).size() == 9;
        });
    }
    const std::array<Scalar, 4> thetas[] = {
        {Scalar(rat(1, 7)), Scalar(rat(2, 9)), Scalar(rat(1, 11)), Scalar(rat(3, 13))},
        {Scalar(rat(1, 4)), Scalar(rat(1, 6)), Scalar(rat(2, 5)), Scalar(rat(1, 9))},
    };
    const Rational regular_sigmas[] = {rat(2, 9), rat(1, 7)};
    for (int k = 0; k < 2; ++k) {
        FastParams fp;
        fp.sigma = Scalar(regular_sigmas[k]);
        fp.theta = thetas[k];
        fp.threads = opts.threads;
        c.guarded("c1-regular equals the Gram block to N = 8 at sigma = " + str(regular_sigmas[k]), [&] {
            CoeffTable t = fast_block(FastScheme::c1_regular, fp, 8);
            std::array<Scalar, 4> ext;
            for (int i = 0; i < 4; ++i) ext[i] = fp.theta[i] * fp.theta[i];
            for (const auto& [pt, v] : t.first) {
                Scalar s = fp.sigma + Scalar(pt.first);
                if (v != block_regular_coeffs(VirParams{Scalar(1), s * s}, ext, static_cast<long>(v.size()) - 1)) return false;
            }
            return t.at(0).size() == 9;
        });
    }
    const std::pair<Scalar, Scalar> generic[] = {{Scalar(2), Scalar(rat(1, 3))}, {Scalar(rat(3, 2)), Scalar(rat(2, 7))}};
    for (const auto& [b, p] : generic) {
        FastParams fp;
        fp.b = b;
        fp.p = p;
        fp.threads = opts.threads;
        c.guarded("generic irregular equals the Gram blocks of both charges to N = 8 at (b, P) = (" + str(b) + ", " +
                      str(p) + ")",
                  [&] {
                      CoeffTable t = fast_block(FastScheme::generic_irregular, fp, 8);
                      Scalar c1 = vir12_central_charge(b, 1), c2 = vir12_central_charge(b, 2);
                      for (const auto& [pt, v] : t.first) {
                          Scalar x = t.lattice_momentum(pt.first, pt.second, b);
                          long order = static_cast<long>(v.size()) - 1;
                          if (v != block_irregular_coeffs(VirParams{c1, vir12_weight(b, x, 0, 1)}, order)) return false;
                          if (t.second.at(pt) != block_irregular_coeffs(VirParams{c2, vir12_weight(b, x, 0, 2)}, order))
                              return false;
                      }
                      return t.at(0).size() == 9;
                  });
    }

    const long top = opts.quick ? 30 : 50;
    FastParams fp;
    fp.sigma = Scalar(rat(3, 11));
    fp.threads = opts.threads;
    c.guarded("c1-irregular reaches N = " + std::to_string(top) + " and B(" + std::to_string(top) +
                  ", sigma + 1) agrees between the two relation centerings",
              [&] {
                  CoeffTable t = fast_block(FastScheme::c1_irregular, fp, top + 2);
                  return static_cast<long>(t.at(0).size()) > top && static_cast<long>(t.at(1).size()) > top &&
                         c1_irregular_shifted_value(t, fp, top) == t.at(1)[top];
              });

    std::vector<double> ns, times;
    for (long n = top / 5; n <= top; n += top / 5) {
        ns.push_back(static_cast<double>(n));
        times.push_back(best_time(FastScheme::c1_irregular, fp, n, n <= top / 2 ? 3 : 1));
    }
    double slope = loglog_slope(ns, times);
    std::ostringstream os;
    os.precision(3);
    os << "fitted runtime exponent " << slope << " <= 5 over N = " << ns.front() << ".." << ns.back();
    c.record(slope <= 5, os.str());

    // Level-N basis size of the Gram route: local exponents d log p / d log N keep growing.
    std::vector<double> p = partition_counts(top);
    c.guarded("Gram basis size is the partition count", [&] {
        for (long n = 0; n <= 20; ++n)
            if (partitions_of(Rational(n), Flavor::bosonic).size() != static_cast<size_t>(p[n])) return false;
        return true;
    });
    std::vector<double> local;
    for (size_t i = 1; i < ns.size(); ++i)
        local.push_back(std::log(p[static_cast<long>(ns[i])] / p[static_cast<long>(ns[i - 1])]) / std::log(ns[i] / ns[i - 1]));
    bool growing = std::is_sorted(local.begin(), local.end()) && std::adjacent_find(local.begin(), local.end()) == local.end();
    std::ostringstream ps;
    ps.precision(3);
    ps << "partition-count local exponents increase (last " << local.back() << ", above the fast exponent)";
    c.record(growing && local.back() > slope, ps.str());
}

struct MutationGuard {
    MutationGuard(bool lattice, bool op)
    {
        set_lattice_bound_mutation(lattice);
        set_operator_mutation(op);
    }
    ~MutationGuard()
    {
        set_lattice_bound_mutation(false);
        set_operator_mutation(false);
    }
};

void mutations(Checks& c, const AcceptanceOptions& opts)
{
    for (auto [lattice, op] : {std::pair{true, false}, std::pair{false, true}}) {
        CriterionResult r = run_mutated(lattice, op, opts);
        std::string which = lattice ? "s_even index bound" : "D^III coefficient";
        std::string caught;
        for (const auto& d : r.details)
            if (d.rfind("FAIL", 0) != 0) caught += (caught.empty() ? "" : "; ") + d;
        c.record(r.pass, "mutated " + which + " is caught by " + (caught.empty() ? "nothing" : caught));
    }
}

}  // namespace

const std::vector<int>& all_criteria()
{
    static const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9};
    return ids;
}

std::string criterion_name(int id)
{
    switch (id) {
    case 1: return "character identities";
    case 2: return "free-field oracle";
    case 3: return "blow-up closed forms";
    case 4: return "block decomposition";
    case 5: return "bilinear identities";
    case 6: return "tau forms";
    case 7: return "sigma forms";
    case 8: return "fast expansion";
    case 9: return "mutation sensitivity";
    default: throw ParamError("no acceptance criterion " + std::to_string(id));
    }
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts)
{
    CriterionResult r;
    r.id = id;
    r.name = criterion_name(id);
    auto t0 = Clock::now();
    Checks c;
    try {
        switch (id) {
        case 1: characters(c); break;
        case 2: oracle(c, opts); break;
        case 3: blowup(c, opts); break;
        case 4: blockdecomp(c, opts); break;
        case 5: bilinear(c, opts); break;
        case 6: tau_forms(c); break;
        case 7: sigma_forms(c); break;
        case 8: fast_expansion(c, opts); break;
        case 9: mutations(c, opts); break;
        }
    } catch (const std::exception& e) {
        c.record(false, std::string("aborted: ") + e.what());
    }
    r.pass = c.pass();
    r.details = c.details();
    r.seconds = seconds_since(t0);
    return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts)
{
    std::vector<CriterionResult> out;
    for (int id : ids) out.push_back(run_criterion(id, opts));
    return out;
}

CriterionResult run_mutated(bool lattice_bound, bool operator_coefficient, const AcceptanceOptions& opts)
{
    CriterionResult r;
    r.id = 9;
    r.name = criterion_name(9);
    auto t0 = Clock::now();
    {
        MutationGuard guard(lattice_bound, operator_coefficient);
        // cheapest first; stop at the first criterion that notices
        for (int id : {3, 6, 4, 5}) {
            CriterionResult inner = run_criterion(id, opts);
            if (!inner.pass) {
                r.pass = true;
                r.details.push_back("criterion " + std::to_string(id));
                break;
            }
            r.details.push_back("FAIL criterion " + std::to_string(id) + " still passes");
        }
    }
    r.seconds = seconds_since(t0);
    return r;
}

}  // namespace cbtau::tools

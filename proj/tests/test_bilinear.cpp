#include "doctest.h"

#include "cbtau/bilinear.hpp"
#include "cbtau/blowup.hpp"
#include "cbtau/errors.hpp"
#include "cbtau/fock.hpp"
#include "cbtau/nsr.hpp"
#include "cbtau/virasoro.hpp"

#include <random>

using namespace cbtau;

namespace {

Scalar rnd(std::mt19937& rng, bool complex = false)
{
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
    Scalar s(rat(num(rng), den(rng)));
    if (complex) s += Scalar(Rational(0), rat(num(rng), den(rng)));
    return s;
}

// q^delta (c_0 + c_1 q + ... ) trusted to `order`
GradedSeries random_series(std::mt19937& rng, long order, bool complex_delta = true)
{
    GradedSeries g{rnd(rng, complex_delta), Series::zero(Rational(order))};
    for (long i = 0; i <= order; ++i) g.body.add_term(Rational(i), rnd(rng, true));
    g.body.add_term(Rational(0), Scalar(1));
    return g;
}

bool same(const GradedSeries& a, const GradedSeries& b)
{
    GradedSeries d = a - b;
    return d.body.empty() && a.body.cutoff() == b.body.cutoff();
}

long binom(long n, long k)
{
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Leibniz form: D^k_{e1,e2}(f, g) = sum_j C(k, j) e1^j e2^{k-j} (theta^j f)(theta^{k-j} g)
GradedSeries hirota_leibniz(const HirotaSpec& h, const GradedSeries& f, const GradedSeries& g)
{
    std::vector<GradedSeries> tf{f}, tg{g};
    for (long j = 1; j <= h.k; ++j) {
        tf.push_back(graded_theta(tf.back()));
        tg.push_back(graded_theta(tg.back()));
    }
    GradedSeries out{f.delta + g.delta, Series()};
    for (long j = 0; j <= h.k; ++j)
        out += Scalar(binom(h.k, j)) * h.e1.pow(j) * h.e2.pow(h.k - j) * graded_mul(tf[j], tg[h.k - j]);
    return out;
}

// f(q) -> f(q/4) up to the overall constant 4^{-delta}
GradedSeries rescale_quarter(const GradedSeries& f)
{
    GradedSeries out{f.delta, Series(f.body.cutoff())};
    for (const auto& [e, c] : f.body.terms()) out.body.add_term(e, c * Scalar(4).pow(-to_long(e)));
    return out;
}

IdentityParams random_identity_params(std::mt19937& rng)
{
    std::uniform_int_distribution<int> num(1, 9), den(2, 11);
    auto r = [&] { return Scalar(rat(num(rng), den(rng))); };
    IdentityParams ps;
    ps.b = r() + Scalar(1);
    ps.p = r();
    for (auto& m : ps.momenta) m = r();
    ps.sigma = r() * Scalar(rat(1, 3));
    for (auto& t : ps.theta) t = r() * Scalar(rat(1, 2));
    return ps;
}

}  // namespace

TEST_CASE("hirota on monomials and small orders")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        Scalar a = rnd(rng, true), b = rnd(rng, true), e1 = rnd(rng, true), e2 = rnd(rng, true);
        for (long k = 0; k <= 5; ++k) {
            GradedSeries f{a, Series::monomial(Scalar(1), Rational(0))};
            GradedSeries g{b, Series::monomial(Scalar(1), Rational(0))};
            GradedSeries h = hirota({k, e1, e2}, f, g);
            CHECK(h.delta == a + b);
            CHECK(h.body.coeff(Rational(0)) == (e1 * a + e2 * b).pow(k));
            CHECK(h.body.terms().size() <= 1);
        }
    }
    GradedSeries f = random_series(rng, 4), g = random_series(rng, 4);
    CHECK(same(hirota({0, 1, -1}, f, g), graded_mul(f, g)));
    CHECK(same(hirota({1, 1, -1}, f, g), graded_mul(graded_theta(f), g) - graded_mul(f, graded_theta(g))));
}

TEST_CASE("hirota agrees with the Leibniz expansion and is antisymmetric")
{
    std::mt19937 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        GradedSeries f = random_series(rng, 3), g = random_series(rng, 3);
        HirotaSpec w{0, rnd(rng, true), rnd(rng, true)};
        for (long k = 0; k <= 4; ++k) {
            w.k = k;
            CHECK(same(hirota(w, f, g), hirota_leibniz(w, f, g)));
            HirotaSpec p{k, 1, -1};
            Scalar sign(k % 2 ? -1 : 1);
            CHECK(same(hirota(p, f, g), sign * hirota(p, g, f)));
        }
    }
}

TEST_CASE("cutoffs propagate through hirota products")
{
    GradedSeries f{Scalar(0), Series::zero(Rational(3))}, g{Scalar(0), Series::zero(Rational(5))};
    f.body.add_term(Rational(1), Scalar(2));
    g.body.add_term(Rational(0), Scalar(1));
    GradedSeries h = hirota({2, 1, -1}, f, g);
    REQUIRE(h.body.cutoff());
    CHECK(*h.body.cutoff() == Rational(3));
}

TEST_CASE("D^III on constants and equal monomials")
{
    GradedSeries one{Scalar(0), Series::constant(Scalar(1))};
    GradedSeries r = apply_DIII(one, one);
    CHECK(r.body.terms().size() == 1);
    CHECK(r.body.coeff(Rational(1)) == Scalar(2));

    Scalar d(rat(3, 7));
    GradedSeries m{d, Series::constant(Scalar(1))};
    GradedSeries r2 = apply_DIII(m, m);
    CHECK(r2.delta == Scalar(2) * d);
    CHECK(r2.body.terms().size() == 1);
    CHECK(r2.body.coeff(Rational(1)) == Scalar(2));
}

TEST_CASE("D^III_b at b = i is twice D^III after q = 4t")
{
    std::mt19937 rng(13);
    for (int trial = 0; trial < 4; ++trial) {
        GradedSeries f = random_series(rng, 4), g = random_series(rng, 4);
        GradedSeries lhs = apply_DIII_b(Scalar::i(), rescale_quarter(f), rescale_quarter(g));
        GradedSeries rhs = Scalar(2) * rescale_quarter(apply_DIII(f, g));
        CHECK(same(lhs, rhs));
    }
}

TEST_CASE("D^VI_b at b = i is D^VI with NS weights doubled")
{
    std::mt19937 rng(14);
    for (int trial = 0; trial < 4; ++trial) {
        std::array<Scalar, 4> d, dns;
        for (int i = 0; i < 4; ++i) {
            d[i] = rnd(rng, true);
            dns[i] = Scalar(2) * d[i];
        }
        GradedSeries f = random_series(rng, 4), g = random_series(rng, 4);
        CHECK(same(apply_DVI_b(Scalar::i(), dns, f, g), apply_DVI(d, f, g)));
    }
}

TEST_CASE("coefficient of the unknown in the c = 1 recursions")
{
    // D^III(t^{s^2+N}, t^{s^2}) + D^III(t^{s^2}, t^{s^2+N}) at t^0: N^2((N-1)^2 - 4 s^2)
    Scalar s(rat(1, 5));
    std::array<Scalar, 4> d{Scalar(rat(1, 3)), Scalar(rat(2, 5)), Scalar(rat(1, 7)), Scalar(rat(3, 4))};
    for (long n = 1; n <= 6; ++n) {
        Scalar s2 = s * s, nn(n);
        Scalar expect = nn * nn * ((nn - 1) * (nn - 1) - Scalar(4) * s2);
        BilinearOperator d3 = op_DIII();
        CHECK(d3.symbol_at(s2 + nn, s2, 0) + d3.symbol_at(s2, s2 + nn, 0) == expect);
        BilinearOperator d6 = op_DVI(d);
        CHECK(d6.symbol_at(s2 + nn, s2, 0) + d6.symbol_at(s2, s2 + nn, 0) == -expect);
    }
}

TEST_CASE("symbol matches the operator on monomials")
{
    std::mt19937 rng(15);
    std::array<Scalar, 4> d{rnd(rng), rnd(rng), rnd(rng), rnd(rng)};
    Scalar b(rat(3, 2));
    for (const BilinearOperator& op : {op_DIII(), op_DIII_b(b), op_DVI(d), op_DVI_b(b, d)}) {
        Scalar a = rnd(rng, true), c = rnd(rng, true);
        GradedSeries f{a, Series::constant(Scalar(1))}, g{c, Series::constant(Scalar(1))};
        GradedSeries img = op.apply(f, g);
        auto sym = op.symbol(a, c);
        for (std::size_t i = 0; i < sym.size(); ++i) {
            CHECK(img.body.coeff(Rational(static_cast<long>(i))) == sym[i]);
            CHECK(op.symbol_at(a, c, static_cast<long>(i)) == sym[i]);
        }
    }
}

TEST_CASE("identity catalog vanishes at the reference points")
{
    IdentityParams ps;  // b = 2, P = 1/3, sigma = 1/5
    CHECK(verify_identity(Identity::blockdecomp, ps, Rational(3)).vanishes());
    CHECK(verify_identity(Identity::s0, ps, Rational(6)).vanishes());
    CHECK(verify_identity(Identity::t2g, ps, rat(5, 2)).vanishes());
    for (const auto& [name, id] : identity_names()) {
        CAPTURE(name);
        IdentityParams p = ps;
        p.m = 2;
        Residual r = verify_identity(id, p, Rational(3));
        CHECK(r.vanishes());
        REQUIRE(r.value.body.cutoff());
        CHECK(*r.value.body.cutoff() >= Rational(3));
    }
}

TEST_CASE("identity catalog vanishes at random generic points")
{
    std::mt19937 rng(2024);
    int done = 0;
    while (done < 3) {
        IdentityParams ps = random_identity_params(rng);
        ps.m = -1;
        try {
            for (const auto& [name, id] : identity_names()) {
                CAPTURE(name);
                CAPTURE(ps.b);
                CAPTURE(ps.p);
                CHECK(verify_identity(id, ps, rat(5, 2)).vanishes());
            }
            ++done;
        } catch (const ParamError&) {
            // non-generic draw (pole or degenerate weight); draw again
        }
    }
}

TEST_CASE("complex momenta")
{
    IdentityParams ps;
    ps.b = Scalar(rat(3, 2));
    ps.p = Scalar(rat(1, 4), rat(2, 3));
    ps.momenta = {Scalar(rat(1, 3), rat(1, 2)), Scalar(rat(-2, 5)), Scalar(Rational(0), rat(3, 7)), Scalar(rat(5, 6))};
    ps.sigma = Scalar(rat(1, 7), rat(1, 5));
    for (Identity id : {Identity::bilin, Identity::relsh20, Identity::hat_f3, Identity::pvi_bilin, Identity::t3g,
                        Identity::s0, Identity::s1_p6}) {
        CAPTURE(identity_name(id));
        CHECK(verify_identity(id, ps, Rational(2)).vanishes());
    }
}

TEST_CASE("extra n-shells change no retained coefficient")
{
    IdentityParams ps;
    const Rational order(3);
    // nonzero lattice sums, so the comparison is not between zeros
    BilinearOperator prod({{{Scalar(1)}, 0, {0, 1, -1}}});
    BilinearOperator d2({{{Scalar(1)}, 0, {2, 1, -1}}});
    for (bool regular : {false, true})
        for (const BilinearOperator* op : {&prod, &d2}) {
            GradedSeries a = c1_lattice_sum(*op, ps, 0, regular, order);
            IdentityParams more = ps;
            more.extra_shells = 1;
            GradedSeries b = c1_lattice_sum(*op, more, 0, regular, order);
            CHECK_FALSE(a.body.truncated(order).empty());
            CHECK(a.body.truncated(order) == b.rebased(a.delta).body.truncated(order));
        }
    IdentityParams more = ps;
    more.extra_shells = 1;
    for (Identity id : {Identity::bilin, Identity::pvi_bilin, Identity::s0})
        CHECK(verify_identity(id, more, order).vanishes());
}

TEST_CASE("s^m coefficient at sigma equals the s^(m-2) coefficient at sigma + 1")
{
    IdentityParams ps;
    IdentityParams up = ps;
    up.sigma = ps.sigma + Scalar(1);
    const Rational order(3);
    BilinearOperator prod({{{Scalar(1)}, 0, {0, 1, -1}}});
    BilinearOperator d4({{{Scalar(1)}, 0, {4, 1, -1}}, {{Scalar(0), Scalar(1)}, 0, {0, 1, -1}}});
    for (const BilinearOperator* op : {&prod, &d4}) {
        for (long m : {2, 3}) {
            // same lattice terms, normalized by C(s)C(s+m) versus C(s+1)C(s+m-1)
            GradedSeries hi = c1_lattice_sum(*op, ps, m, false, order);
            GradedSeries lo = c1_lattice_sum(*op, up, m - 2, false, order);
            Scalar ratio = c_ratio_p3(ps.sigma + Scalar(1), Rational(1), m - 2);
            CHECK(hi.delta == lo.delta);
            CHECK_FALSE(lo.body.truncated(order).empty());
            CHECK((ratio * hi).body.truncated(order) == lo.body.truncated(order));
        }
    }
    IdentityParams p2 = ps;
    p2.m = 2;
    CHECK(verify_identity(Identity::sm, p2, Rational(4)).vanishes());
    CHECK(verify_identity(Identity::s0, up, Rational(4)).vanishes());
}

TEST_CASE("relsh20 as stated: D^2-sum equals -q^{1/2} times the product sum")
{
    IdentityParams ps;
    ps.b = Scalar(rat(5, 3));
    ps.p = Scalar(rat(2, 7));
    Residual r = verify_identity(Identity::relsh20, ps, Rational(4));
    CHECK(r.vanishes());
    // and the two sides are separately nonzero: the product sum is the NSR block
    CHECK(verify_identity(Identity::blockdecomp, ps, Rational(4)).vanishes());
}

TEST_CASE("identities detect a corrupted coefficient")
{
    IdentityParams ps;
    set_lattice_bound_mutation(true);
    bool bilin = verify_identity(Identity::bilin, ps, Rational(2)).vanishes();
    bool pvi = verify_identity(Identity::pvi_bilin, ps, Rational(2)).vanishes();
    bool t2g = verify_identity(Identity::t2g, ps, Rational(2)).vanishes();
    set_lattice_bound_mutation(false);
    CHECK_FALSE(bilin);
    CHECK_FALSE(pvi);
    CHECK_FALSE(t2g);
    CHECK(verify_identity(Identity::bilin, ps, Rational(2)).vanishes());
}

TEST_CASE("identity names round-trip")
{
    for (const auto& [name, id] : identity_names()) CHECK(identity_name(parse_identity(name)) == name);
    CHECK_THROWS_AS(parse_identity("nope"), ParamError);
}

TEST_CASE("fast c1-irregular matches the Gram oracle")
{
    FastParams fp;
    CoeffTable t = fast_block(FastScheme::c1_irregular, fp, 8);
    CHECK(t.at(0)[1] == Scalar(1) / (Scalar(2) * fp.sigma * fp.sigma));
    for (const auto& [pt, v] : t.first) CHECK(v[0] == Scalar(1));
    for (long j = -2; j <= 2; ++j) {
        const std::vector<Scalar>& v = t.at(j);
        Scalar s = fp.sigma + Scalar(j);
        CAPTURE(j);
        CHECK(v == block_irregular_coeffs(VirParams{Scalar(1), s * s}, static_cast<long>(v.size()) - 1));
    }
}

TEST_CASE("fast c1-regular matches the Gram oracle")
{
    FastParams fp;
    fp.sigma = Scalar(rat(2, 9));
    CoeffTable t = fast_block(FastScheme::c1_regular, fp, 7);
    std::array<Scalar, 4> ext;
    for (int i = 0; i < 4; ++i) ext[i] = fp.theta[i] * fp.theta[i];
    for (long j = -1; j <= 1; ++j) {
        Scalar s = fp.sigma + Scalar(j);
        const auto& v = t.at(j);
        CHECK(v == block_regular_coeffs(VirParams{Scalar(1), s * s}, ext, static_cast<long>(v.size()) - 1));
    }
}

TEST_CASE("fast generic schemes match the Gram oracle at both central charges")
{
    FastParams fp;  // b = 2, P = 1/3
    const Scalar b = fp.b, b2 = b * b;
    const Scalar c1 = vir12_central_charge(b, 1), c2 = vir12_central_charge(b, 2);
    const long n = 6;

    CoeffTable irr = fast_block(FastScheme::generic_irregular, fp, n);
    for (const auto& [pt, v] : irr.first) {
        Scalar x = irr.lattice_momentum(pt.first, pt.second, b);
        long order = static_cast<long>(v.size()) - 1;
        CHECK(v == block_irregular_coeffs(VirParams{c1, vir12_weight(b, x, 0, 1)}, order));
        CHECK(irr.second.at(pt) == block_irregular_coeffs(VirParams{c2, vir12_weight(b, x, 0, 2)}, order));
    }
    // the pair at the center, order 1
    CHECK(irr.at(0)[1] == block_irregular_coeffs(VirParams{c1, vir12_weight(b, fp.p, 0, 1)}, 1)[1]);

    CoeffTable reg = fast_block(FastScheme::generic_regular, fp, n);
    std::array<Scalar, 4> e1, e2;
    for (int i = 0; i < 4; ++i) {
        Scalar d = nsr_weight(b, fp.momenta[i]);
        e1[i] = d / (Scalar(1) - b2);
        e2[i] = d * b2 / (b2 - Scalar(1));
    }
    for (const auto& [pt, v] : reg.first) {
        Scalar x = reg.lattice_momentum(pt.first, pt.second, b);
        long order = static_cast<long>(v.size()) - 1;
        CHECK(v == block_regular_coeffs(VirParams{c1, vir12_weight(b, x, 0, 1)}, e1, order));
        CHECK(reg.second.at(pt) == block_regular_coeffs(VirParams{c2, vir12_weight(b, x, 0, 2)}, e2, order));
    }
}

TEST_CASE("fast schemes report resonances and singular systems")
{
    FastParams fp;
    fp.sigma = Scalar(rat(1, 2));
    try {
        fast_block(FastScheme::c1_irregular, fp, 4);
        FAIL("expected a resonance");
    } catch (const ResonanceError& e) {
        CHECK(std::string(e.what()).find("order 2") != std::string::npos);
    }
    FastParams g;
    g.b = Scalar::i();
    g.p = Scalar(Rational(0), rat(2, 5));
    CHECK_THROWS_AS(fast_block(FastScheme::generic_irregular, g, 3), SingularSystemError);
    CHECK_THROWS_AS(fast_block(FastScheme::c1_irregular, fp, -1), ParamError);
}

TEST_CASE("fast tables do not depend on the thread count")
{
    FastParams one, four;
    four.threads = 4;
    CHECK(fast_block(FastScheme::c1_irregular, one, 12).first == fast_block(FastScheme::c1_irregular, four, 12).first);
    CoeffTable a = fast_block(FastScheme::generic_irregular, one, 4);
    CoeffTable b = fast_block(FastScheme::generic_irregular, four, 4);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}

TEST_CASE("two relation centerings agree")
{
    FastParams fp;
    fp.sigma = Scalar(rat(3, 11));
    CoeffTable t = fast_block(FastScheme::c1_irregular, fp, 14);
    for (long n = 1; n <= 12; ++n) {
        CAPTURE(n);
        CHECK(c1_irregular_shifted_value(t, fp, n) == t.at(1)[n]);
    }
}

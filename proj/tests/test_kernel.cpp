#include "doctest.h"

#include "cbtau/characters.hpp"
#include "cbtau/errors.hpp"
#include "cbtau/partitions.hpp"
#include "cbtau/series.hpp"

#include <random>

using namespace cbtau;

namespace {

Scalar random_scalar(std::mt19937_64& rng, bool allow_zero = true)
{
    std::uniform_int_distribution<long> num(-40, 40), den(1, 17);
    for (;;) {
        Scalar s(rat(num(rng), den(rng)), rat(num(rng), den(rng)));
        if (allow_zero || !s.is_zero()) return s;
    }
}

Series random_series(std::mt19937_64& rng, const Rational& cutoff)
{
    Series s = Series::zero(cutoff);
    std::uniform_int_distribution<long> e(0, 12);
    for (int k = 0; k < 6; ++k) s.add_term(rat(e(rng), 4), random_scalar(rng));
    return s;
}

}  // namespace

TEST_CASE("scalar field axioms on random inputs")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a * b == b * a);
        if (!a.is_zero()) CHECK(a * a.inverse() == Scalar(1));
        CHECK(a - a == Scalar(0));
    }
    CHECK_THROWS_AS(Scalar(1) / Scalar(0), PoleError);
    CHECK(Scalar::i() * Scalar::i() == Scalar(-1));
}

TEST_CASE("scalar text round trip")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        Scalar a = random_scalar(rng);
        CHECK(Scalar::parse(a.str()) == a);
    }
    CHECK(Scalar::parse("1/2-1/3*i") == Scalar(rat(1, 2), rat(-1, 3)));
    CHECK(Scalar::parse("i") == Scalar::i());
    CHECK(Scalar::parse("-i") == -Scalar::i());
    CHECK(Scalar::parse("2/4") == Scalar(1, 2));
    CHECK(Scalar(rat(-3, 2), rat(1, 5)).str() == "-3/2+1/5*i");
    CHECK_THROWS_AS(Scalar::parse("1/0"), ParamError);
    CHECK_THROWS_AS(Scalar::parse("x"), ParamError);
}

TEST_CASE("series_mul examples")
{
    Series h = Series::monomial(Scalar(1), rat(1, 2));
    Series prod = h * h;
    CHECK(prod.terms().size() == 1);
    CHECK(prod.coeff(1) == Scalar(1));

    Series f = Series::zero(2);
    f.add_term(0, Scalar(1));
    f.add_term(1, Scalar(1));
    Series g = Series::zero(2);
    g.add_term(0, Scalar(1));
    g.add_term(1, Scalar(-1));
    Series fg = f * g;
    CHECK(*fg.cutoff() == 2);
    CHECK(fg.coeff(0) == Scalar(1));
    CHECK(fg.coeff(1) == Scalar(0));
    CHECK(fg.coeff(2) == Scalar(-1));

    CHECK(f * Series::constant(Scalar(1)) == f);
}

TEST_CASE("cutoff propagation uses the minimal exponent of the partner")
{
    Series f = Series::monomial(Scalar(1), Rational(1), Rational(5));
    Series g = Series::monomial(Scalar(1), Rational(2), Rational(4));
    CHECK(*(f * g).cutoff() == 5);  // min(5+2, 4+1)
}

TEST_CASE("series_mul is commutative and associative")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        Series a = random_series(rng, 3), b = random_series(rng, rat(5, 2)), c = random_series(rng, 4);
        CHECK(a * b == b * a);
        CHECK((a * b) * c == a * (b * c));
    }
}

TEST_CASE("log_derivative_weighted")
{
    CHECK(log_derivative_weighted(Series::monomial(Scalar(1), 3)).coeff(3) == Scalar(3));
    CHECK(log_derivative_weighted(Series::constant(Scalar(5))).empty());
    CHECK(log_derivative_weighted(Series::monomial(Scalar(1), rat(1, 4))).coeff(rat(1, 4)) == Scalar(1, 4));
}

TEST_CASE("partitions")
{
    auto p3 = partitions_of(3, Flavor::bosonic);
    REQUIRE(p3.size() == 3);
    CHECK(p3[0].parts2 == std::vector<int>{6});
    CHECK(p3[1].parts2 == std::vector<int>{4, 2});
    CHECK(p3[2].parts2 == std::vector<int>{2, 2, 2});
    auto p0 = partitions_of(0, Flavor::bosonic);
    REQUIRE(p0.size() == 1);
    CHECK(p0[0].parts2.empty());
    auto f2 = partitions_of(2, Flavor::fermionic);
    REQUIRE(f2.size() == 1);
    CHECK(f2[0].parts2 == std::vector<int>{3, 1});
}

TEST_CASE("partition counts match the generating function")
{
    Series gen = q_product(0, -1, -1, 12);
    for (long n = 0; n <= 12; ++n)
        CHECK(Scalar(static_cast<long>(partitions_of(n, Flavor::bosonic).size())) == gen.coeff(n));
    Series fgen = q_product(rat(1, 2), 1, 1, 8);
    for (Rational n = 0; n <= 8; n += rat(1, 2))
        CHECK(Scalar(static_cast<long>(partitions_of(n, Flavor::fermionic).size())) == fgen.coeff(n));
}

TEST_CASE("character identities")
{
    CHECK(character_check(jtp_product_side(10), jtp_sum_side(10), 10));
    CHECK(character_check(jtp_product_side(20), jtp_sum_side(20), 20));
    CHECK(character_check(fnsr_character(20), vir_pair_character_sum(20), 20));
    CHECK(character_check(vacuum_product_side(20), vacuum_sum_side(20), 20));
}

TEST_CASE("character_check cutoff semantics")
{
    Series one = Series::monomial(Scalar(1), 0, Rational(20));
    Series other = one;
    other.add_term(11, Scalar(1));
    CHECK(character_check(one, other, 10));
    CHECK_FALSE(character_check(one, other, 11));
    CHECK_THROWS_AS(character_check(Series::monomial(Scalar(1), 0, Rational(5)), one, 10), CutoffError);
}

#include "doctest.h"

#include "cbtau/errors.hpp"
#include "cbtau/nsr.hpp"
#include "cbtau/virasoro.hpp"
#include "ref_evaluator.hpp"

using namespace cbtau;

namespace {

std::vector<ref::Mode> vev_word(const Word& bra, const Word& ket)
{
    std::vector<ref::Mode> ops;
    for (auto it = bra.rbegin(); it != bra.rend(); ++it) ops.push_back({it->kind, -it->mode2});
    for (const Gen& g : ket) ops.push_back({g.kind, g.mode2});
    return ops;
}

const VirParams generic{Scalar(rat(7, 3)), Scalar(rat(2, 11))};

}  // namespace

TEST_CASE("Virasoro Gram small levels")
{
    VirParams p{Scalar(rat(1, 2)), Scalar(rat(3, 7))};
    CHECK(gram_matrix(p, 0) == Matrix{{Scalar(1)}});
    CHECK(gram_matrix(p, 1) == Matrix{{Scalar(2) * p.delta}});
}

TEST_CASE("Virasoro Gram matrices agree with the reference evaluator and are symmetric")
{
    ref::Evaluator ev(false, generic.c, generic.delta);
    VermaModule mod(AlgebraKind::virasoro, generic.c, generic.delta);
    for (long n = 0; n <= 5; ++n) {
        Matrix g = gram_matrix(generic, n);
        CHECK(is_symmetric(g));
        auto basis = mod.basis(n);
        for (size_t r = 0; r < basis.size(); ++r)
            for (size_t c = 0; c < basis.size(); ++c) CHECK(g[r][c] == ev.vev(vev_word(basis[r], basis[c])));
    }
}

TEST_CASE("level-2 Kac determinant at c = 1")
{
    // det = 2 Delta (16 Delta^2 + (2c - 10) Delta + c) = 32 Delta (Delta - Delta_{1,2})(Delta - Delta_{2,1})
    Scalar b = Scalar::i();
    VirParams p = VirParams::from_b(b, Scalar(rat(1, 25)));
    CHECK(p.c == Scalar(1));
    Scalar expected = Scalar(32) * p.delta * (p.delta - vir_degenerate_weight(b, 1, 2)) * (p.delta - vir_degenerate_weight(b, 2, 1));
    CHECK(determinant(gram_matrix(p, 2)) == expected);
}

TEST_CASE("Gram determinant over the Kac product is independent of Delta and c")
{
    for (long n = 1; n <= 4; ++n) {
        Scalar ratio;
        bool first = true;
        for (auto [c, d] : {std::pair{rat(7, 3), rat(2, 11)}, std::pair{rat(-5, 2), rat(9, 4)}, std::pair{rat(1), rat(1, 13)}}) {
            VirParams p{Scalar(c), Scalar(d)};
            Scalar r = determinant(gram_matrix(p, n)) / vir_kac_product(p, n);
            if (first) ratio = r;
            CHECK(r == ratio);
            first = false;
        }
    }
}

TEST_CASE("determinant vanishes at degenerate weights and the guard catches them")
{
    Scalar b(2);
    for (auto [m, n] : {std::pair{1L, 1L}, {1L, 2L}, {2L, 1L}, {1L, 3L}, {2L, 2L}, {4L, 1L}}) {
        VirParams p = VirParams::from_b(b, vir_degenerate_weight(b, m, n));
        VermaModule mod(AlgebraKind::virasoro, p.c, p.delta);
        CHECK(determinant(mod.gram(m * n)).is_zero());
        CHECK_THROWS_AS(gram_matrix(p, m * n), DegenerateWeightError);
    }
    CHECK_THROWS_AS(block_irregular(VirParams{Scalar(1), Scalar(0)}, 2), DegenerateWeightError);
}

TEST_CASE("chain vector")
{
    Scalar d1(rat(1, 3)), d2(rat(2, 5));
    ChainVector cv = chain_vector(generic, d1, d2, 4);
    CHECK(cv.levels[0] == State{{Word{}, Scalar(1)}});
    CHECK(cv.levels[1].at(Word{L(-1)}) == (generic.delta + d2 - d1) / (Scalar(2) * generic.delta));
    VermaModule mod(AlgebraKind::virasoro, generic.c, generic.delta);
    auto rule = vir_chain_rule(generic.delta, d1, d2);
    for (long n = 1; n <= 4; ++n)
        for (long k = 1; k <= n; ++k) {
            State lhs = mod.apply(L(k), cv.levels[n]);
            State rhs;
            add_to(rhs, cv.levels[n - k], rule(k, n));
            CHECK(lhs == rhs);
        }
    State l2 = mod.apply(L(2), cv.levels[2]);
    CHECK(l2 == State{{Word{}, Scalar(2) * d2 - d1 + generic.delta}});
}

TEST_CASE("chain projections agree with the Ward-identity matrix elements")
{
    Scalar d1(rat(1, 3)), d2(rat(2, 5));
    VertexMatrixElements me(generic.c, generic.delta, d2, d1, AlgebraKind::virasoro);
    VermaModule mod(AlgebraKind::virasoro, generic.c, generic.delta);
    auto rule = vir_chain_rule(generic.delta, d1, d2);
    for (long n = 0; n <= 5; ++n)
        for (const Word& w : mod.basis(n))
            CHECK(vir_chain_projection(w, n, rule) == me.element(VertexMatrixElements::Field::phi, w, Word{}));
}

TEST_CASE("Whittaker vector")
{
    ChainVector wv = whittaker_vector(generic, 4);
    CHECK(wv.levels[1].at(Word{L(-1)}) == Scalar(1) / (Scalar(2) * generic.delta));
    VermaModule mod(AlgebraKind::virasoro, generic.c, generic.delta);
    CHECK(mod.apply(L(2), wv.levels[3]).empty());
    for (long n = 1; n <= 4; ++n) CHECK(mod.apply(L(1), wv.levels[n]) == wv.levels[n - 1]);
}

TEST_CASE("Whittaker limit of the chain vector")
{
    // |N>_{21} ~ (-Delta1)^N |N>_W as Delta1 -> infinity; at fixed level the ratio is a
    // polynomial in 1/Delta1, so a large rational Delta1 pins the leading term
    Scalar big(rat(1000000));
    ChainVector cv = chain_vector(generic, big, Scalar(rat(2, 5)), 3);
    ChainVector wv = whittaker_vector(generic, 3);
    for (long n = 1; n <= 3; ++n)
        for (const auto& [w, c] : wv.levels[n]) {
            Scalar scaled = cv.levels[n].at(w) / (-big).pow(n);
            Scalar diff = scaled - c;
            // relative deviation O(1/Delta1)
            CHECK(diff.norm() < c.norm() * rat(1, 10000));
        }
}

TEST_CASE("regular and irregular Virasoro blocks")
{
    std::array<Scalar, 4> ext{Scalar(rat(1, 3)), Scalar(rat(2, 5)), Scalar(rat(1, 7)), Scalar(rat(3, 4))};
    auto b = block_regular_coeffs(generic, ext, 3);
    const Scalar& d = generic.delta;
    CHECK(b[0] == Scalar(1));
    CHECK(b[1] == (d + ext[1] - ext[0]) * (d + ext[2] - ext[3]) / (Scalar(2) * d));
    auto zero = block_regular_coeffs(generic, {Scalar(0), Scalar(0), Scalar(0), Scalar(0)}, 1);
    CHECK(zero[1] == d / Scalar(2));
    auto irr = block_irregular_coeffs(generic, 3);
    CHECK(irr[0] == Scalar(1));
    CHECK(irr[1] == Scalar(1) / (Scalar(2) * d));
    Series s = block_irregular(generic, 3);
    CHECK(s.coeff(generic.delta.re() + 1) == irr[1]);
    CHECK(*s.cutoff() == generic.delta.re() + 3);
}

TEST_CASE("real rational parameters give rational block coefficients")
{
    std::array<Scalar, 4> ext{Scalar(rat(1, 9)), Scalar(rat(1, 9)), Scalar(rat(1, 9)), Scalar(rat(1, 9))};
    for (const Scalar& c : block_regular_coeffs(generic, ext, 4)) CHECK(c.is_real());
}

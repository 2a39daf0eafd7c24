#include "cbtau/characters.hpp"

#include <cstdlib>

namespace cbtau {

namespace {

Series one(const Rational& order) { return Series::monomial(Scalar(1), Rational(0), order); }

Series binomial_factor(const Rational& e, int sign, const Rational& order)
{
    Series s = one(order);
    s.add_term(e, Scalar(sign));
    return s;
}

}  // namespace

Series q_product(const Rational& shift, int sign, int power, const Rational& order)
{
    Series acc = one(order);
    for (Rational k = 1; k - shift <= order; k += 1) {
        Rational e = k - shift;
        Series factor;
        if (power > 0) {
            factor = binomial_factor(e, sign, order);
        } else {
            // 1/(1 + sign q^e) = sum_j (-sign)^j q^{je}
            factor = Series::zero(order);
            int j = 0;
            for (Rational x = 0; x <= order; x += e, ++j) factor.add_term(x, Scalar((j % 2 && sign > 0) ? -1 : 1));
        }
        for (int p = 0; p < std::abs(power); ++p) acc = acc * factor;
    }
    return acc;
}

Series jtp_product_side(const Rational& order)
{
    return q_product(0, -1, 1, order) * q_product(rat(1, 2), 1, 2, order);
}

Series jtp_sum_side(const Rational& order)
{
    Series s = Series::zero(order);
    for (long n = 0; rat(n * n, 2) <= order; ++n) s.add_term(rat(n * n, 2), Scalar(n == 0 ? 1 : 2));
    return s;
}

Series fnsr_character(const Rational& order)
{
    return q_product(rat(1, 2), 1, 2, order) * q_product(0, -1, -1, order);
}

Series vir_pair_character_sum(const Rational& order)
{
    Series lattice = Series::zero(order);
    // 2n in Z, exponent 2n^2 = m^2/2 with m = 2n
    for (long m = 0; rat(m * m, 2) <= order; ++m) lattice.add_term(rat(m * m, 2), Scalar(m == 0 ? 1 : 2));
    return lattice * q_product(0, -1, -2, order);
}

Series vacuum_product_side(const Rational& order)
{
    return binomial_factor(rat(1, 2), -1, order) * q_product(rat(1, 2), 1, 2, order) * q_product(0, -1, 1, order);
}

Series vacuum_sum_side(const Rational& order)
{
    Series s = Series::zero(order);
    for (long m = 1; rat((m - 1) * (m - 1), 2) <= order; ++m) {
        Rational base((m - 1) * (m - 1), 2);
        s.add_term(base, Scalar(1));
        s.add_term(base + m, Scalar(-2));
        s.add_term(base + 2 * m, Scalar(1));
    }
    return s;
}

}  // namespace cbtau

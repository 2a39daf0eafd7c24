#pragma once

#include "cbtau/series.hpp"

namespace cbtau {

// Formal q-products and sums used by the character identities, all truncated at `order`.

// prod_{k>=1} (1 + sign*q^{k-shift})^power, shift in {0, 1/2}
Series q_product(const Rational& shift, int sign, int power, const Rational& order);

// Jacobi triple product at y=1 with q -> q^{1/2}:
//   prod (1-q^m)(1+q^{m-1/2})^2  and  sum_{n in Z} q^{n^2/2}
Series jtp_product_side(const Rational& order);
Series jtp_sum_side(const Rational& order);

// Character of the free fermion + NSR Verma module relative to q^Delta,
//   prod (1+q^{k-1/2})^2 / (1-q^k),
// against the sum over 2n in Z of q^{2n^2} prod (1-q^k)^{-2}.
Series fnsr_character(const Rational& order);
Series vir_pair_character_sum(const Rational& order);

// (1-q^{1/2}) prod (1+q^{k-1/2})^2 (1-q^k)  against  sum_{m>=1} q^{(m-1)^2/2} (1-q^m)^2
Series vacuum_product_side(const Rational& order);
Series vacuum_sum_side(const Rational& order);

}  // namespace cbtau

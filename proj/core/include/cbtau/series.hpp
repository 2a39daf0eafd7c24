#pragma once

#include "cbtau/scalar.hpp"

#include <map>
#include <optional>
#include <vector>

namespace cbtau {

// Sparse formal series  sum_e a_e x^e  over rational exponents e, trusted for e <= cutoff.
// An empty cutoff means the series is exact (a polynomial with nothing hidden beyond it).
class Series {
public:
    using Terms = std::map<Rational, Scalar>;

    Series() = default;  // exact zero
    explicit Series(std::optional<Rational> cutoff) : cutoff_(std::move(cutoff)) {}

    static Series exact_zero() { return Series(); }
    static Series zero(const Rational& cutoff) { return Series(std::optional<Rational>(cutoff)); }
    static Series monomial(const Scalar& c, const Rational& e, std::optional<Rational> cutoff = std::nullopt);
    static Series constant(const Scalar& c) { return monomial(c, Rational(0)); }

    const Terms& terms() const { return terms_; }
    const std::optional<Rational>& cutoff() const { return cutoff_; }
    bool exact() const { return !cutoff_.has_value(); }

    // Adds c x^e; terms beyond the cutoff are dropped and zero results are erased.
    void add_term(const Rational& e, const Scalar& c);
    Scalar coeff(const Rational& e) const;  // throws CutoffError beyond the cutoff
    bool empty() const { return terms_.empty(); }

    // Lower bound for the smallest exponent that can occur (the cutoff of an empty inexact series).
    std::optional<Rational> min_exponent() const;

    Series truncated(const Rational& e) const;

    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(const Scalar& c);
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, const Scalar& c) { return a *= c; }
    friend Series operator*(const Scalar& c, Series a) { return a *= c; }
    Series operator-() const { return *this * Scalar(-1); }

    // multiply by x^e
    Series shifted(const Rational& e) const;

    friend bool operator==(const Series& a, const Series& b) { return a.terms_ == b.terms_ && a.cutoff_ == b.cutoff_; }

private:
    Terms terms_;
    std::optional<Rational> cutoff_;
};

std::optional<Rational> min_cutoff(const std::optional<Rational>& a, const std::optional<Rational>& b);

// Convolution with cutoff min(cf + minexp g, cg + minexp f).
Series series_mul(const Series& f, const Series& g);
inline Series operator*(const Series& f, const Series& g) { return series_mul(f, g); }

// x d/dx : a x^e -> e a x^e
Series log_derivative_weighted(const Series& f);

// True iff all coefficients with exponent <= order agree. Throws CutoffError when either
// side is not trusted that far.
bool character_check(const Series& lhs, const Series& rhs, const Rational& order);

// Largest exponent with a nonzero coefficient, or nullopt for the zero series.
std::optional<Rational> max_exponent(const Series& f);

}  // namespace cbtau

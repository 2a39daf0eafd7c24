#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <string>

namespace cbtau {

using Rational = mpq_class;

// Exact Gaussian rational re + im*i.
class Scalar {
public:
    Scalar() = default;
    Scalar(long v) : re_(v) {}
    Scalar(int v) : re_(v) {}
    // mpq_class(num, den) does not reduce, so constructors canonicalize
    Scalar(const Rational& re) : re_(re) { re_.canonicalize(); }
    Scalar(const Rational& re, const Rational& im) : re_(re), im_(im)
    {
        re_.canonicalize();
        im_.canonicalize();
    }
    Scalar(long num, long den) : re_(num, den) { re_.canonicalize(); }

    static Scalar i() { return Scalar(Rational(0), Rational(1)); }
    static Scalar parse(const std::string& text);

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return is_real() && re_ == 1; }

    Scalar conj() const { return Scalar(re_, -im_); }
    Rational norm() const { return re_ * re_ + im_ * im_; }
    Scalar inverse() const;
    Scalar pow(long e) const;

    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    Scalar operator-() const { return Scalar(-re_, -im_); }

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    // Lexicographic (re, im); only meant for use as a map key.
    friend bool operator<(const Scalar& a, const Scalar& b)
    {
        int c = cmp(a.re_, b.re_);
        return c < 0 || (c == 0 && a.im_ < b.im_);
    }

    std::string str() const;

private:
    Rational re_{0};
    Rational im_{0};
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

// Reduced n/d. Never build a two-argument mpq_class directly: it is not canonicalized,
// and non-canonical values break equality and map keys.
inline Rational rat(long n, long d = 1)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

Rational parse_rational(const std::string& text);
std::string rational_str(const Rational& r);

// Half-integer helpers; levels and lattice labels are Rationals with denominator 1 or 2.
bool is_integer(const Rational& r);
bool is_half_integer(const Rational& r);  // true for integers too
long to_long(const Rational& r);          // throws unless integral

}  // namespace cbtau

#include "cbtau/scalar.hpp"

#include "cbtau/errors.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

namespace cbtau {

Scalar& Scalar::operator+=(const Scalar& o)
{
    re_ += o.re_;
    if (sgn(o.im_) != 0) im_ += o.im_;
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o)
{
    re_ -= o.re_;
    if (sgn(o.im_) != 0) im_ -= o.im_;
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o)
{
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

Scalar Scalar::inverse() const
{
    if (is_zero()) throw PoleError("division by zero");
    if (sgn(im_) == 0) return Scalar(Rational(1) / re_);
    Rational n = norm();
    return Scalar(re_ / n, -im_ / n);
}

Scalar& Scalar::operator/=(const Scalar& o)
{
    if (o.is_zero()) throw PoleError("division by zero");
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ /= o.re_;
        return *this;
    }
    return *this *= o.inverse();
}

Scalar Scalar::pow(long e) const
{
    if (e < 0) return inverse().pow(-e);
    Scalar result(1), base(*this);
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

std::string rational_str(const Rational& r) { return r.get_str(); }

Rational parse_rational(const std::string& text)
{
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw ParamError("empty rational");
    if (t[0] == '+') t.erase(0, 1);
    auto ok = [](const std::string& s, bool allow_sign) {
        if (s.empty()) return false;
        size_t k = (allow_sign && s[0] == '-') ? 1 : 0;
        if (k == s.size()) return false;
        return std::all_of(s.begin() + k, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    auto slash = t.find('/');
    std::string num = t.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
    if (!ok(num, true) || !ok(den, false)) throw ParamError("malformed rational '" + text + "'");
    mpz_class n(num), d(den);
    if (d == 0) throw ParamError("zero denominator in '" + text + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// Accepts "a", "a+b*i", "a-b*i", "b*i", "i", "-i".
Scalar Scalar::parse(const std::string& text)
{
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw ParamError("empty scalar");
    if (t.back() != 'i') return Scalar(parse_rational(t));
    std::string body = t.substr(0, t.size() - 1);
    if (!body.empty() && body.back() == '*') body.pop_back();
    // split at the last sign that is not leading
    size_t split = std::string::npos;
    for (size_t k = body.size(); k-- > 1;)
        if (body[k] == '+' || body[k] == '-') {
            split = k;
            break;
        }
    auto imag = [](std::string s) {
        if (s.empty() || s == "+") return Rational(1);
        if (s == "-") return Rational(-1);
        return parse_rational(s);
    };
    if (split == std::string::npos) return Scalar(Rational(0), imag(body));
    return Scalar(parse_rational(body.substr(0, split)), imag(body.substr(split)));
}

std::string Scalar::str() const
{
    if (is_real()) return rational_str(re_);
    std::string s = rational_str(re_);
    s += sgn(im_) < 0 ? "-" : "+";
    s += rational_str(abs(im_));
    s += "*i";
    return s;
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

bool is_integer(const Rational& r) { return r.get_den() == 1; }
bool is_half_integer(const Rational& r) { return r.get_den() == 1 || r.get_den() == 2; }

long to_long(const Rational& r)
{
    if (!is_integer(r) || !r.get_num().fits_slong_p()) throw ParamError("expected an integer, got " + r.get_str());
    return r.get_num().get_si();
}

}  // namespace cbtau

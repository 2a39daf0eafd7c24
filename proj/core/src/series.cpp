#include "cbtau/series.hpp"

#include "cbtau/errors.hpp"

namespace cbtau {

std::optional<Rational> min_cutoff(const std::optional<Rational>& a, const std::optional<Rational>& b)
{
    if (!a) return b;
    if (!b) return a;
    return *a < *b ? a : b;
}

Series Series::monomial(const Scalar& c, const Rational& e, std::optional<Rational> cutoff)
{
    Series s(std::move(cutoff));
    s.add_term(e, c);
    return s;
}

void Series::add_term(const Rational& e, const Scalar& c)
{
    if (c.is_zero()) return;
    if (cutoff_ && e > *cutoff_) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Scalar Series::coeff(const Rational& e) const
{
    if (cutoff_ && e > *cutoff_)
        throw CutoffError("coefficient at " + e.get_str() + " beyond cutoff " + cutoff_->get_str());
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar() : it->second;
}

std::optional<Rational> Series::min_exponent() const
{
    if (!terms_.empty()) return terms_.begin()->first;
    return cutoff_;
}

Series Series::truncated(const Rational& e) const
{
    Series s(std::optional<Rational>(cutoff_ && *cutoff_ < e ? *cutoff_ : e));
    for (const auto& [k, v] : terms_) {
        if (k > e) break;
        s.terms_.emplace(k, v);
    }
    return s;
}

Series& Series::operator+=(const Series& o)
{
    cutoff_ = min_cutoff(cutoff_, o.cutoff_);
    if (cutoff_) {
        while (!terms_.empty() && std::prev(terms_.end())->first > *cutoff_) terms_.erase(std::prev(terms_.end()));
    }
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Series& Series::operator-=(const Series& o) { return *this += -o; }

Series& Series::operator*=(const Scalar& c)
{
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

Series Series::shifted(const Rational& e) const
{
    Series s(cutoff_ ? std::optional<Rational>(*cutoff_ + e) : std::nullopt);
    for (const auto& [k, v] : terms_) s.terms_.emplace(k + e, v);
    return s;
}

Series series_mul(const Series& f, const Series& g)
{
    auto mf = f.min_exponent(), mg = g.min_exponent();
    std::optional<Rational> cut;
    if (f.exact() && f.empty()) return Series::exact_zero();
    if (g.exact() && g.empty()) return Series::exact_zero();
    if (f.cutoff()) cut = *f.cutoff() + *mg;
    if (g.cutoff()) cut = min_cutoff(cut, *g.cutoff() + *mf);
    Series out(cut);
    for (const auto& [ea, ca] : f.terms()) {
        for (const auto& [eb, cb] : g.terms()) {
            Rational e = ea + eb;
            if (cut && e > *cut) break;
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Series log_derivative_weighted(const Series& f)
{
    Series out(f.cutoff());
    for (const auto& [e, c] : f.terms()) out.add_term(e, c * Scalar(e));
    return out;
}

bool character_check(const Series& lhs, const Series& rhs, const Rational& order)
{
    for (const Series* s : {&lhs, &rhs})
        if (s->cutoff() && *s->cutoff() < order)
            throw CutoffError("series trusted only to " + s->cutoff()->get_str() + ", asked for " + order.get_str());
    Series d = lhs.truncated(order) - rhs.truncated(order);
    return d.empty();
}

std::optional<Rational> max_exponent(const Series& f)
{
    if (f.empty()) return std::nullopt;
    return std::prev(f.terms().end())->first;
}

}  // namespace cbtau

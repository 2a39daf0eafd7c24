#include "cbtau/verma.hpp"

#include "cbtau/errors.hpp"
#include "cbtau/partitions.hpp"

namespace cbtau {

Rational word_level(const Word& w)
{
    long s = 0;
    for (const Gen& g : w) s -= g.mode2;
    return rat(s, 2);
}

void add_to(State& acc, const State& s, const Scalar& factor)
{
    if (factor.is_zero()) return;
    for (const auto& [w, c] : s) {
        auto [it, inserted] = acc.try_emplace(w, c * factor);
        if (!inserted) {
            it->second += c * factor;
            if (it->second.is_zero()) acc.erase(it);
        }
    }
}

bool normal_before(Gen a, Gen b)
{
    if (a.kind != b.kind) return a.kind == 'L';
    return a.mode2 < b.mode2;
}

VermaModule::Bracket VermaModule::bracket(Gen x, Gen y) const
{
    Bracket br;
    const Rational m = x.mode(), n = y.mode();
    const bool vir = kind_ == AlgebraKind::virasoro;
    if (x.kind == 'L' && y.kind == 'L') {
        Rational coef = m - n;
        if (sgn(coef) != 0) br.modes.push_back({Gen{'L', x.mode2 + y.mode2}, Scalar(coef)});
        if (m + n == 0) br.central = c_ * Scalar((m * m * m - m) / (vir ? 12 : 8));
    } else if (x.kind == 'L' && y.kind == 'G') {
        Rational coef = m / 2 - n;
        if (sgn(coef) != 0) br.modes.push_back({Gen{'G', x.mode2 + y.mode2}, Scalar(coef)});
    } else if (x.kind == 'G' && y.kind == 'L') {
        Rational coef = n / 2 - m;
        if (sgn(coef) != 0) br.modes.push_back({Gen{'G', x.mode2 + y.mode2}, Scalar(-coef)});
    } else {
        br.modes.push_back({Gen{'L', x.mode2 + y.mode2}, Scalar(2)});
        if (m + n == 0) br.central = c_ * Scalar((m * m - rat(1, 4)) / 2);
    }
    return br;
}

State VermaModule::apply_mode(Gen g, const Word& w)
{
    if (g.mode2 == 0) {
        if (g.kind != 'L') throw std::logic_error("G_0 does not exist in the NS sector");
        return State{{w, h_ + Scalar(word_level(w))}};
    }
    return apply(g, w);
}

State VermaModule::apply_bracket(Gen x, Gen y, const Word& rest)
{
    Bracket br = bracket(x, y);
    State out;
    for (const auto& [g, coef] : br.modes) add_to(out, apply_mode(g, rest), coef);
    if (!br.central.is_zero()) add_to(out, State{{rest, Scalar(1)}}, br.central);
    return out;
}

const State& VermaModule::apply(Gen x, const Word& w)
{
    auto key = std::make_pair(x, w);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    State out;
    if (x.mode2 == 0) {
        out = apply_mode(x, w);
    } else if (w.empty()) {
        if (x.mode2 < 0) out.emplace(Word{x}, Scalar(1));
    } else {
        const Gen y = w.front();
        const Word rest(w.begin() + 1, w.end());
        if (x.mode2 < 0 && (normal_before(x, y) || (x == y && !x.odd()))) {
            Word nw;
            nw.reserve(w.size() + 1);
            nw.push_back(x);
            nw.insert(nw.end(), w.begin(), w.end());
            out.emplace(std::move(nw), Scalar(1));
        } else if (x == y && x.odd()) {
            // x x = {x, x}/2
            out = apply_bracket(x, x, rest);
            for (auto& [k, v] : out) v *= Scalar(1, 2);
        } else {
            // x y rest = (+-) y (x rest) + [x, y} rest
            const Scalar sign(x.odd() && y.odd() ? -1 : 1);
            State xr = apply(x, rest);
            for (const auto& [word, coef] : xr) add_to(out, apply(y, word), coef * sign);
            add_to(out, apply_bracket(x, y, rest), Scalar(1));
        }
    }
    return cache_.emplace(std::move(key), std::move(out)).first->second;
}

State VermaModule::apply(Gen x, const State& v)
{
    State out;
    for (const auto& [w, c] : v) add_to(out, apply(x, w), c);
    return out;
}

std::vector<Word> VermaModule::basis(const Rational& level) const
{
    std::vector<Word> out;
    if (kind_ == AlgebraKind::virasoro) {
        for (const Partition& p : partitions_of(level, Flavor::bosonic)) {
            Word w;
            for (int part2 : p.parts2) w.push_back(Gen{'L', -part2});
            out.push_back(std::move(w));
        }
        return out;
    }
    for (Rational fw = 0; fw <= level; fw += rat(1, 2)) {
        Rational bw = level - fw;
        if (!is_integer(bw)) continue;
        for (const Partition& lam : partitions_of(bw, Flavor::bosonic))
            for (const Partition& mu : partitions_of(fw, Flavor::fermionic)) {
                Word w;
                for (int part2 : lam.parts2) w.push_back(Gen{'L', -part2});
                for (int part2 : mu.parts2) w.push_back(Gen{'G', -part2});
                out.push_back(std::move(w));
            }
    }
    return out;
}

Scalar VermaModule::pairing(const Word& u, const Word& v)
{
    if (word_level(u) != word_level(v)) return Scalar(0);
    State s{{v, Scalar(1)}};
    for (const Gen& g : u) {
        s = apply(g.adjoint(), s);
        if (s.empty()) return Scalar(0);
    }
    auto it = s.find(Word{});
    return it == s.end() ? Scalar(0) : it->second;
}

Matrix VermaModule::gram(const Rational& level)
{
    auto b = basis(level);
    Matrix m(b.size(), Vector(b.size()));
    for (size_t r = 0; r < b.size(); ++r)
        for (size_t c = 0; c < b.size(); ++c) m[r][c] = pairing(b[r], b[c]);
    return m;
}

}  // namespace cbtau

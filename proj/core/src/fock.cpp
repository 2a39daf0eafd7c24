#include "cbtau/fock.hpp"

#include "cbtau/errors.hpp"

#include <algorithm>
#include <cstdlib>

namespace cbtau {

namespace {

Rational half_sum(const std::vector<int>& v)
{
    long s = 0;
    for (int x : v) s += x;
    return rat(s, 2);
}

long int_sum(const std::vector<int>& v)
{
    long s = 0;
    for (int x : v) s += x;
    return s;
}

// Fermionic creation/annihilation on a strictly decreasing list of doubled positive modes.
// `before` is the number of fermions standing to the left of the list.
// Returns false when the result vanishes.
bool fermion_op(std::vector<int>& list, int mode2, size_t before, int& sign)
{
    if (mode2 < 0) {
        int a = -mode2;
        auto it = std::find_if(list.begin(), list.end(), [a](int x) { return x <= a; });
        if (it != list.end() && *it == a) return false;
        size_t j = static_cast<size_t>(it - list.begin());
        sign = ((before + j) % 2) ? -1 : 1;
        list.insert(it, a);
        return true;
    }
    auto it = std::find(list.begin(), list.end(), mode2);
    if (it == list.end()) return false;
    size_t j = static_cast<size_t>(it - list.begin());
    sign = ((before + j) % 2) ? -1 : 1;
    list.erase(it);
    return true;
}

template <class F>
FockState map_monomials(const FockState& v, F&& op)
{
    FockState out;
    for (const auto& [m, coef] : v) {
        FockMonomial copy = m;
        Scalar factor;
        if (op(copy, factor)) add_to(out, FockState{{copy, Scalar(1)}}, coef * factor);
    }
    return out;
}

// Loop bound for mode sums: beyond it every term annihilates the state.
int mode_bound(const FockState& v, int n)
{
    Rational top = 0;
    for (const auto& [m, c] : v) top = std::max(top, m.level());
    mpz_class t = top.get_num() / top.get_den();
    return static_cast<int>(t.get_si()) + std::abs(n) + 2;
}

}  // namespace

Rational FockMonomial::level() const { return half_sum(f2) + nsr_level(); }
Rational FockMonomial::nsr_level() const { return Rational(int_sum(c)) + half_sum(psi2); }

void add_to(FockState& acc, const FockState& s, const Scalar& factor)
{
    if (factor.is_zero()) return;
    for (const auto& [m, c] : s) {
        auto [it, inserted] = acc.try_emplace(m, c * factor);
        if (!inserted) {
            it->second += c * factor;
            if (it->second.is_zero()) acc.erase(it);
        } else if (it->second.is_zero()) {
            acc.erase(it);
        }
    }
}

FockState fock_vacuum() { return FockState{{FockMonomial{}, Scalar(1)}}; }

FockState FreeField::boson(int k, const FockState& v) const
{
    if (k == 0) {
        FockState out;
        add_to(out, v, p_);
        return out;
    }
    return map_monomials(v, [k](FockMonomial& m, Scalar& factor) {
        if (k < 0) {
            auto it = std::find_if(m.c.begin(), m.c.end(), [k](int x) { return x <= -k; });
            m.c.insert(it, -k);
            factor = Scalar(1);
            return true;
        }
        long mult = std::count(m.c.begin(), m.c.end(), k);
        if (mult == 0) return false;
        m.c.erase(std::find(m.c.begin(), m.c.end(), k));
        factor = Scalar(k * mult);
        return true;
    });
}

FockState FreeField::psi(int r2, const FockState& v) const
{
    return map_monomials(v, [r2](FockMonomial& m, Scalar& factor) {
        int sign = 1;
        if (!fermion_op(m.psi2, r2, m.f2.size(), sign)) return false;
        factor = Scalar(sign);
        return true;
    });
}

FockState FreeField::fermion_f(int r2, const FockState& v) const
{
    return map_monomials(v, [r2](FockMonomial& m, Scalar& factor) {
        int sign = 1;
        if (!fermion_op(m.f2, r2, 0, sign)) return false;
        factor = Scalar(sign);
        return true;
    });
}

FockState FreeField::L(int n, const FockState& v) const
{
    FockState out;
    if (n == 0) {
        Scalar d = delta();
        for (const auto& [m, c] : v) add_to(out, FockState{{m, Scalar(1)}}, c * (d + Scalar(m.nsr_level())));
        return out;
    }
    int bound = mode_bound(v, n);
    for (int k = -bound; k <= bound; ++k) {
        if (k == 0 || k == n) continue;
        add_to(out, boson(k, boson(n - k, v)), rat(1, 2));
    }
    for (int r2 = -2 * bound - 1; r2 <= 2 * bound + 1; r2 += 2) {
        // (r - n/2)/2
        Scalar w(rat(r2 - n, 4));
        add_to(out, psi(2 * n - r2, psi(r2, v)), w);
    }
    Scalar lin = Scalar::i() * (q_ * Scalar(n) + Scalar(2 * sign_) * p_) * Scalar(rat(1, 2));
    add_to(out, boson(n, v), lin);
    return out;
}

FockState FreeField::G(int r2, const FockState& v) const
{
    FockState out;
    int bound = mode_bound(v, (r2 + 1) / 2);
    for (int k = -bound; k <= bound; ++k) {
        if (k == 0) continue;
        add_to(out, boson(k, psi(r2 - 2 * k, v)), Scalar(1));
    }
    Scalar lin = Scalar::i() * (q_ * Scalar(rat(r2, 2)) + Scalar(sign_) * p_);
    add_to(out, psi(r2, v), lin);
    return out;
}

FockState FreeField::fermion_bilinear(int n, const FockState& v) const
{
    FockState out;
    int bound = mode_bound(v, n);
    for (int r2 = -2 * bound - 1; r2 <= 2 * bound + 1; r2 += 2) {
        int a2 = 2 * n - r2;
        Scalar r(rat(r2, 2));
        if (a2 > 0 && r2 < 0)
            add_to(out, fermion_f(r2, fermion_f(a2, v)), -r);
        else
            add_to(out, fermion_f(a2, fermion_f(r2, v)), r);
    }
    return out;
}

FockState FreeField::fermion_supercurrent(int n, const FockState& v) const
{
    FockState out;
    int bound = mode_bound(v, n);
    for (int r2 = -2 * bound - 1; r2 <= 2 * bound + 1; r2 += 2) add_to(out, fermion_f(2 * n - r2, G(r2, v)), Scalar(1));
    return out;
}

FockState FreeField::vir(int eta, int n, const FockState& v) const
{
    Scalar beta = eta == 1 ? b_ : b_.inverse();
    Scalar denom = (Scalar(1) - beta * beta).inverse();
    Scalar a = denom;
    Scalar bcoef = (Scalar(1) + Scalar(2) * beta * beta) * denom * Scalar(rat(1, 2));
    Scalar ccoef = beta * denom;
    FockState out;
    add_to(out, L(n, v), a);
    add_to(out, fermion_bilinear(n, v), -bcoef);
    add_to(out, fermion_supercurrent(n, v), ccoef);
    return out;
}

Scalar vir12_central_charge(const Scalar& b, int eta)
{
    Scalar beta = eta == 1 ? b : b.inverse();
    Scalar q = b + b.inverse();
    Scalar q_eta_sq = q * q * (Scalar(2) * (Scalar(1) - beta * beta)).inverse();
    return Scalar(1) + Scalar(6) * q_eta_sq;
}

Scalar vir12_weight(const Scalar& b, const Scalar& p, const Rational& n, int eta)
{
    Scalar beta = eta == 1 ? b : b.inverse();
    Scalar q = b + b.inverse();
    Scalar shifted = p + Scalar(2 * n) * beta;
    return (q * q * Scalar(rat(1, 4)) - shifted * shifted) * (Scalar(2) * (Scalar(1) - beta * beta)).inverse();
}

FreeField FnsrOracle::realization(const Scalar& p, const Rational& n) const
{
    return FreeField(b_, p, sgn(n) < 0 ? 1 : -1);
}

PnVector FnsrOracle::build_pn(const Scalar& p, const Rational& n)
{
    if (!is_half_integer(n)) throw ParamError("n must be a multiple of 1/2");
    FreeField ff = realization(p, n);
    FockState state = fock_vacuum();
    Rational an = abs(n);
    mpq_class top2 = 4 * an - 1;  // doubled top mode
    long top = sgn(an) == 0 ? -1 : to_long(top2);
    // chi_{-1/2} chi_{-3/2} ... chi_{-top/2}: the rightmost factor acts first
    for (long r2 = top; r2 >= 1; r2 -= 2) {
        FockState next = ff.fermion_f(static_cast<int>(-r2), state);
        add_to(next, ff.psi(static_cast<int>(-r2), state), -Scalar::i());
        state = std::move(next);
    }
    PnVector out{n, p, state, Scalar(1), Scalar(1)};
    out.norm = pairing(ff, state);
    if (out.norm.is_zero()) throw PoleError("|P,n> has zero norm at this momentum");
    out.omega_sq = out.norm.inverse();
    return out;
}

const std::vector<FockState>& FnsrOracle::images(const FreeField& ff, const Rational& level)
{
    auto key = std::make_tuple(ff.momentum(), ff.sign(), level);
    if (auto it = image_cache_.find(key); it != image_cache_.end()) return it->second;
    VermaModule verma(AlgebraKind::neveu_schwarz, Scalar(0), Scalar(0));
    std::vector<FockState> cols;
    for (const Word& w : verma.basis(level)) {
        FockState s = fock_vacuum();
        for (auto g = w.rbegin(); g != w.rend(); ++g) s = ff.apply(*g, s);
        cols.push_back(std::move(s));
    }
    return image_cache_.emplace(key, std::move(cols)).first->second;
}

FnsrOracle::Expansion FnsrOracle::expand(const FreeField& ff, const FockState& v)
{
    // group by (f-part, NSR level)
    std::map<std::pair<std::vector<int>, Rational>, FockState> groups;
    for (const auto& [m, c] : v) {
        FockMonomial rest{{}, m.c, m.psi2};
        groups[{m.f2, m.nsr_level()}].emplace(rest, c);
    }
    Expansion out;
    VermaModule verma(AlgebraKind::neveu_schwarz, Scalar(0), Scalar(0));
    for (const auto& [key, part] : groups) {
        const auto& [f2, level] = key;
        const auto& cols = images(ff, level);
        auto words = verma.basis(level);
        std::map<FockMonomial, size_t> row_index;
        for (const auto& col : cols)
            for (const auto& [m, c] : col) row_index.try_emplace(m, row_index.size());
        for (const auto& [m, c] : part)
            if (!row_index.count(m)) throw ParamError("Fock vector outside the span of the NSR descendants");
        if (row_index.size() != cols.size()) throw DegenerateWeightError("free-field images are not independent");
        Matrix a(cols.size(), Vector(cols.size()));
        Vector rhs(cols.size());
        for (size_t j = 0; j < cols.size(); ++j)
            for (const auto& [m, c] : cols[j]) a[row_index[m]][j] = c;
        for (const auto& [m, c] : part) rhs[row_index[m]] = c;
        Vector x = solve(a, rhs);
        auto& dst = out.terms[f2];
        for (size_t j = 0; j < words.size(); ++j)
            if (!x[j].is_zero()) dst[words[j]] = x[j];
    }
    return out;
}

Scalar FnsrOracle::pairing(const FreeField& ff, const FockState& v)
{
    Expansion e = expand(ff, v);
    VermaModule verma(AlgebraKind::neveu_schwarz, NsrParams{b_, Scalar(0)}.c(), ff.delta());
    Scalar total;
    for (const auto& [f2, coeffs] : e.terms) {
        Scalar part;
        for (const auto& [u, xu] : coeffs)
            for (const auto& [w, xw] : coeffs) part += xu * xw * verma.pairing(u, w);
        total += (f2.size() % 2 ? -part : part);
    }
    return total;
}

Scalar FnsrOracle::reduced_l(const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n,
                             const Rational& np)
{
    PnVector bra = build_pn(p, n);
    PnVector ket = build_pn(pp, np);
    Expansion eb = expand(realization(p, n), bra.state);
    Expansion ek = expand(realization(pp, np), ket.state);
    Scalar q = b_ + b_.inverse();
    Scalar h = alpha * (q - alpha) * Scalar(rat(1, 2));
    VertexMatrixElements vme(NsrParams{b_, Scalar(0)}.c(), nsr_weight(b_, p), h, nsr_weight(b_, pp));
    Scalar total;
    for (const auto& [f2, xb] : eb.terms) {
        auto it = ek.terms.find(f2);
        if (it == ek.terms.end()) continue;
        Scalar part;
        for (const auto& [u, xu] : xb)
            for (const auto& [w, xw] : it->second)
                part += xu * xw * vme.element(VertexMatrixElements::Field::phi, u, w);
        total += (f2.size() % 2 ? -part : part);
    }
    return total;
}

Scalar FnsrOracle::l_squared(const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n,
                             const Rational& np)
{
    Scalar r = reduced_l(p, alpha, pp, n, np);
    return r * r * build_pn(p, n).omega_sq * build_pn(pp, np).omega_sq;
}

FnsrOracle::HighestWeightReport FnsrOracle::verify_highest_weight(const Scalar& p, const Rational& n, int k_max)
{
    HighestWeightReport rep;
    PnVector u = build_pn(p, n);
    FreeField ff = realization(p, n);
    for (int eta = 1; eta <= 2; ++eta) {
        for (int k = 1; k <= k_max; ++k) {
            if (!ff.vir(eta, k, u.state).empty()) {
                rep.pass = false;
                rep.failing_eta = eta;
                rep.failing_k = k;
                return rep;
            }
        }
        FockState l0 = ff.vir(eta, 0, u.state);
        const auto& [m0, c0] = *u.state.begin();
        auto it = l0.find(m0);
        Scalar lambda = it == l0.end() ? Scalar(0) : it->second / c0;
        FockState diff = l0;
        add_to(diff, u.state, -lambda);
        if (!diff.empty()) {
            rep.pass = false;
            rep.failing_eta = eta;
            rep.failing_k = 0;
            return rep;
        }
        (eta == 1 ? rep.eigen1 : rep.eigen2) = lambda;
    }
    return rep;
}

}  // namespace cbtau

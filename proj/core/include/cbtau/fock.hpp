#pragma once

#include "cbtau/linalg.hpp"
#include "cbtau/nsr.hpp"
#include "cbtau/scalar.hpp"

#include <compare>
#include <map>
#include <vector>

namespace cbtau {

// Monomial f_{-a1}..f_{-ak} c_{-k1}..c_{-km} psi_{-s1}..psi_{-sl} |P> of the external fermion
// f, the boson c and the fermion psi. Fermion modes are stored doubled and positive, strictly
// decreasing; boson modes positive, weakly decreasing.
struct FockMonomial {
    std::vector<int> f2;
    std::vector<int> c;
    std::vector<int> psi2;

    Rational level() const;
    Rational nsr_level() const;
    friend auto operator<=>(const FockMonomial&, const FockMonomial&) = default;
};

using FockState = std::map<FockMonomial, Scalar>;

void add_to(FockState& acc, const FockState& s, const Scalar& factor);
FockState fock_vacuum();

// One free-field realization of the NSR algebra on the Fock module with momentum P:
//   L_n = 1/2 sum c_k c_{n-k} + 1/2 sum (r - n/2) psi_{n-r} psi_r + (i/2)(Q n + 2 s P) c_n
//   G_r = sum c_n psi_{r-n} + i (Q r + s P) psi_r
// with sign s = -1 for the "-" realization and s = +1 for the "+" one.
class FreeField {
public:
    FreeField(Scalar b, Scalar p, int sign) : b_(b), q_(b + b.inverse()), p_(p), sign_(sign) {}

    const Scalar& b() const { return b_; }
    const Scalar& Q() const { return q_; }
    const Scalar& momentum() const { return p_; }
    int sign() const { return sign_; }
    Scalar delta() const { return nsr_weight(b_, p_); }

    // elementary modes; mode arguments are doubled for fermions
    FockState boson(int k, const FockState& v) const;
    FockState psi(int r2, const FockState& v) const;
    FockState fermion_f(int r2, const FockState& v) const;

    FockState L(int n, const FockState& v) const;
    FockState G(int r2, const FockState& v) const;
    FockState apply(Gen g, const FockState& v) const { return g.kind == 'L' ? L(g.mode2 / 2, v) : G(g.mode2, v); }

    // sum_r r :f_{n-r} f_r:
    FockState fermion_bilinear(int n, const FockState& v) const;
    // sum_r f_{n-r} G_r
    FockState fermion_supercurrent(int n, const FockState& v) const;
    // L_n^{(eta)}, eta = 1 or 2
    FockState vir(int eta, int n, const FockState& v) const;

private:
    Scalar b_, q_, p_;
    int sign_;
};

// Q_eta^2 = Q^2 / (2 (1 - b^2)) for eta = 1 and Q^2 / (2 (1 - b^-2)) for eta = 2; c = 1 + 6 Q_eta^2.
Scalar vir12_central_charge(const Scalar& b, int eta);
// Delta_n^{(1)} = [Q^2/4 - (P + 2 n b)^2] / (2(1 - b^2)),  Delta_n^{(2)} = same with b -> 1/b.
Scalar vir12_weight(const Scalar& b, const Scalar& p, const Rational& n, int eta);

// The vector prod_{r=1/2}^{(4|n|-1)/2} chi_{-r} |P> with chi_r = f_r - i psi_r, before
// normalization, built in the "-" realization for n > 0 and the "+" one for n < 0.
struct PnVector {
    Rational n;
    Scalar p;
    FockState state;   // unnormalized
    Scalar norm;       // <P,n|P,n> of the unnormalized vector
    Scalar omega_sq;   // 1 / norm
};

class FnsrOracle {
public:
    explicit FnsrOracle(Scalar b) : b_(b) {}

    FreeField realization(const Scalar& p, const Rational& n) const;
    PnVector build_pn(const Scalar& p, const Rational& n);

    // Expansion of a Fock vector over f-monomials times NSR basis words applied to |P>.
    struct Expansion {
        std::map<std::vector<int>, std::map<Word, Scalar>> terms;  // f-part -> word coefficients
    };
    Expansion expand(const FreeField& ff, const FockState& v);

    // Bilinear pairing on F (x) NSR, using the NSR Gram form and <f_A|f_A> = (-1)^{|A|}.
    Scalar pairing(const FreeField& ff, const FockState& v);

    // <U_n(P)| Phi_alpha(1) |U_{n'}(P')> for the unnormalized vectors; l_{nn'} is this times
    // Omega_n(P) Omega_{n'}(P').
    Scalar reduced_l(const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n, const Rational& np);
    // l_{nn'}^2, exact
    Scalar l_squared(const Scalar& p, const Scalar& alpha, const Scalar& pp, const Rational& n, const Rational& np);

    struct HighestWeightReport {
        bool pass = true;
        int failing_eta = 0;
        int failing_k = 0;
        Scalar eigen1, eigen2;
    };
    HighestWeightReport verify_highest_weight(const Scalar& p, const Rational& n, int k_max);

private:
    // columns: Fock images of the basis words at `level`, in basis order
    const std::vector<FockState>& images(const FreeField& ff, const Rational& level);

    Scalar b_;
    std::map<std::tuple<Scalar, int, Rational>, std::vector<FockState>> image_cache_;
};

}  // namespace cbtau

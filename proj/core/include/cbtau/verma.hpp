#pragma once

#include "cbtau/linalg.hpp"
#include "cbtau/scalar.hpp"

#include <compare>
#include <map>
#include <vector>

namespace cbtau {

// A mode of the Virasoro (L) or Neveu-Schwarz (L, G) algebra. Modes are stored doubled.
struct Gen {
    char kind;  // 'L' or 'G'
    int mode2;

    bool odd() const { return kind == 'G'; }
    Rational mode() const { return rat(mode2, 2); }
    Gen adjoint() const { return Gen{kind, -mode2}; }
    friend auto operator<=>(const Gen&, const Gen&) = default;
};

inline Gen L(int m) { return Gen{'L', 2 * m}; }
inline Gen G2(int mode2) { return Gen{'G', mode2}; }

// Ordered creation operators acting on |Delta>; the empty word is the highest-weight vector.
// Normal order: L modes first, most negative leftmost; then strictly ordered G modes.
using Word = std::vector<Gen>;
using State = std::map<Word, Scalar>;

Rational word_level(const Word& w);
void add_to(State& acc, const State& s, const Scalar& factor);

enum class AlgebraKind { virasoro, neveu_schwarz };

// Verma module with central charge c and highest weight h. The action of any mode on
// a normal-ordered word is obtained by commuting it through and is memoized, so one
// instance must not be shared across threads.
class VermaModule {
public:
    VermaModule(AlgebraKind kind, Scalar c, Scalar h) : kind_(kind), c_(std::move(c)), h_(std::move(h)) {}

    AlgebraKind kind() const { return kind_; }
    const Scalar& central_charge() const { return c_; }
    const Scalar& weight() const { return h_; }

    const State& apply(Gen x, const Word& w);
    State apply(Gen x, const State& v);

    // Basis of the level-n subspace, in canonical order.
    std::vector<Word> basis(const Rational& level) const;

    // <u|v> with L_n^+ = L_{-n}, G_r^+ = G_{-r}.
    Scalar pairing(const Word& u, const Word& v);
    Matrix gram(const Rational& level);

    // [x, y} as a combination of modes plus a central constant.
    struct Bracket {
        std::vector<std::pair<Gen, Scalar>> modes;
        Scalar central;
    };
    Bracket bracket(Gen x, Gen y) const;

private:
    State apply_bracket(Gen x, Gen y, const Word& rest);
    State apply_mode(Gen g, const Word& w);

    AlgebraKind kind_;
    Scalar c_, h_;
    std::map<std::pair<Gen, Word>, State> cache_;
};

// Rank used for normal ordering.
bool normal_before(Gen a, Gen b);

}  // namespace cbtau

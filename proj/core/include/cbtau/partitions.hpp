#pragma once

#include "cbtau/scalar.hpp"

#include <vector>

namespace cbtau {

enum class Flavor { bosonic, fermionic };

// Parts are stored doubled so that half-integer (fermionic) parts stay integral.
// Bosonic: weakly decreasing positive integers. Fermionic: strictly decreasing positive
// half-integers.
struct Partition {
    std::vector<int> parts2;

    Rational weight() const;
    Rational part(size_t k) const { return rat(parts2[k], 2); }
    size_t size() const { return parts2.size(); }
    friend bool operator==(const Partition&, const Partition&) = default;
};

// Canonical order: reverse lexicographic, e.g. 3 -> (3), (2,1), (1,1,1).
std::vector<Partition> partitions_of(const Rational& n, Flavor flavor);

}  // namespace cbtau

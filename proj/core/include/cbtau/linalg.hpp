#pragma once

#include "cbtau/scalar.hpp"

#include <vector>

namespace cbtau {

using Vector = std::vector<Scalar>;
using Matrix = std::vector<Vector>;  // row-major, square unless stated otherwise

// Exact Gaussian elimination; the pivot is the first nonzero entry of the column.
// Throws DegenerateWeightError when A is singular.
Vector solve(Matrix a, Vector b);
Scalar determinant(Matrix a);

Scalar dot(const Vector& a, const Vector& b);
bool is_symmetric(const Matrix& a);

}  // namespace cbtau

#include "cbtau/linalg.hpp"

#include "cbtau/errors.hpp"

#include <utility>

namespace cbtau {

Vector solve(Matrix a, Vector b)
{
    const size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("solve: size mismatch");
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col].is_zero()) ++piv;
        if (piv == n) throw DegenerateWeightError("singular linear system (degenerate weight)");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        Scalar inv = a[col][col].inverse();
        for (size_t r = col + 1; r < n; ++r) {
            if (a[r][col].is_zero()) continue;
            Scalar f = a[r][col] * inv;
            for (size_t k = col; k < n; ++k)
                if (!a[col][k].is_zero()) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    Vector x(n);
    for (size_t r = n; r-- > 0;) {
        Scalar acc = b[r];
        for (size_t k = r + 1; k < n; ++k)
            if (!a[r][k].is_zero()) acc -= a[r][k] * x[k];
        x[r] = acc / a[r][r];
    }
    return x;
}

Scalar determinant(Matrix a)
{
    const size_t n = a.size();
    Scalar det(1);
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col].is_zero()) ++piv;
        if (piv == n) return Scalar(0);
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        Scalar inv = a[col][col].inverse();
        for (size_t r = col + 1; r < n; ++r) {
            if (a[r][col].is_zero()) continue;
            Scalar f = a[r][col] * inv;
            for (size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
        }
    }
    return det;
}

Scalar dot(const Vector& a, const Vector& b)
{
    Scalar s;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

bool is_symmetric(const Matrix& a)
{
    for (size_t r = 0; r < a.size(); ++r)
        for (size_t c = r + 1; c < a.size(); ++c)
            if (!(a[r][c] == a[c][r])) return false;
    return true;
}

}  // namespace cbtau

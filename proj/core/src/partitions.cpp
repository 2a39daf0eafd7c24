#include "cbtau/partitions.hpp"

#include "cbtau/errors.hpp"

namespace cbtau {

Rational Partition::weight() const
{
    long s = 0;
    for (int p : parts2) s += p;
    return rat(s, 2);
}

namespace {

// Extend `cur` with parts (doubled) <= max2 summing to rest2.
void grow(int rest2, int max2, Flavor flavor, std::vector<int>& cur, std::vector<Partition>& out)
{
    if (rest2 == 0) {
        out.push_back(Partition{cur});
        return;
    }
    int first = std::min(max2, rest2);
    // bosonic parts are even, fermionic parts odd (doubled)
    if (flavor == Flavor::bosonic && first % 2) --first;
    if (flavor == Flavor::fermionic && first % 2 == 0) --first;
    for (int p = first; p > 0; p -= 2) {
        cur.push_back(p);
        grow(rest2 - p, flavor == Flavor::bosonic ? p : p - 2, flavor, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Partition> partitions_of(const Rational& n, Flavor flavor)
{
    if (n < 0) throw ParamError("partitions_of: negative weight");
    Rational twice = 2 * n;
    if (!is_integer(twice)) throw ParamError("partitions_of: weight must be a half-integer");
    if (flavor == Flavor::bosonic && !is_integer(n)) return {};
    int n2 = static_cast<int>(to_long(twice));
    std::vector<Partition> out;
    std::vector<int> cur;
    grow(n2, n2, flavor, cur, out);
    return out;
}

}  // namespace cbtau

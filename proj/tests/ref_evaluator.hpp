#pragma once

// Reference evaluator for <h| X1 X2 ... Xn |h> written directly on unordered mode strings:
// the rightmost annihilating mode is commuted to the right until it hits |h>.
// It shares nothing with the normal-ordering engine of the library.

#include "cbtau/scalar.hpp"

#include <map>
#include <vector>

namespace ref {

struct Mode {
    char kind;  // 'L' or 'G'
    int m2;     // doubled mode
    bool operator<(const Mode& o) const { return kind != o.kind ? kind < o.kind : m2 < o.m2; }
    bool operator==(const Mode& o) const { return kind == o.kind && m2 == o.m2; }
};

class Evaluator {
public:
    Evaluator(bool super, cbtau::Scalar c, cbtau::Scalar h) : super_(super), c_(c), h_(h) {}

    cbtau::Scalar vev(const std::vector<Mode>& ops)
    {
        if (auto it = memo_.find(ops); it != memo_.end()) return it->second;
        cbtau::Scalar result = compute(ops);
        memo_.emplace(ops, result);
        return result;
    }

private:
    cbtau::Scalar compute(const std::vector<Mode>& ops)
    {
        using cbtau::Scalar;
        if (ops.empty()) return Scalar(1);
        long total = 0;
        for (const Mode& x : ops) total += x.m2;
        if (total != 0) return Scalar(0);
        if (ops.back().m2 > 0 || ops.front().m2 < 0) return Scalar(0);
        if (ops.back().m2 == 0) return h_ * vev(std::vector<Mode>(ops.begin(), ops.end() - 1));
        if (ops.front().m2 == 0) return h_ * vev(std::vector<Mode>(ops.begin() + 1, ops.end()));
        {
            // find rightmost positive mode with something to its right
            size_t j = ops.size() - 1;
            while (ops[j].m2 <= 0) --j;
            const Mode x = ops[j], y = ops[j + 1];
            std::vector<Mode> swapped = ops;
            std::swap(swapped[j], swapped[j + 1]);
            Scalar sign(x.kind == 'G' && y.kind == 'G' ? -1 : 1);
            Scalar acc = sign * vev(swapped);
            std::vector<Mode> head(ops.begin(), ops.begin() + j), tail(ops.begin() + j + 2, ops.end());
            const cbtau::Rational m = cbtau::rat(x.m2, 2), n = cbtau::rat(y.m2, 2);
            auto with = [&](Mode z) {
                std::vector<Mode> w = head;
                w.push_back(z);
                w.insert(w.end(), tail.begin(), tail.end());
                return vev(w);
            };
            std::vector<Mode> both = head;
            both.insert(both.end(), tail.begin(), tail.end());
            if (x.kind == 'L' && y.kind == 'L') {
                acc += Scalar(m - n) * with({'L', x.m2 + y.m2});
                if (m + n == 0) acc += c_ * Scalar((m * m * m - m) / (super_ ? 8 : 12)) * vev(both);
            } else if (x.kind == 'L') {
                acc += Scalar(m / 2 - n) * with({'G', x.m2 + y.m2});
            } else if (y.kind == 'L') {
                acc -= Scalar(n / 2 - m) * with({'G', x.m2 + y.m2});
            } else {
                acc += Scalar(2) * with({'L', x.m2 + y.m2});
                if (m + n == 0) acc += c_ * Scalar((m * m - cbtau::rat(1, 4)) / 2) * vev(both);
            }
            return acc;
        }
    }

    bool super_;
    cbtau::Scalar c_, h_;
    std::map<std::vector<Mode>, cbtau::Scalar> memo_;
};

}  // namespace ref

// Test-side oracles for the Milnor basis, written from the textbook formulas
// and independent of src/milnor.cpp.
#pragma once
#include <set>
#include <vector>

#include "extsq/milnor.hpp"

namespace extsq::oracle {

inline bool binom2(int n, int k) { return n >= 0 && k >= 0 && k <= n && (n & k) == k; }

// Sq^a Sq^b in the Milnor basis from the two-row Milnor matrices, written out
// by hand: sum over j of C(a + b - 3j, a - 2j) Sq(a + b - 3j, j).
inline AlgebraElement two_squares(int a, int b)
{
    AlgebraElement out(a + b);
    for (int j = 0; 2 * j <= a && j <= b; ++j)
        if (binom2(a + b - 3 * j, a - 2 * j))
            out += AlgebraElement(MilnorMonomial(std::vector<int>{a + b - 3 * j, j}));
    return out;
}

// Right side of the Adem relation for a < 2b, expanded with two_squares().
inline AlgebraElement adem(int a, int b)
{
    AlgebraElement out(a + b);
    for (int c = 0; 2 * c <= a; ++c)
        if (binom2(b - c - 1, a - 2 * c))
            out += two_squares(a + b - c, c);
    return out;
}

// Exponent sequences of every monomial in degree d, found by brute search
// over sum r_i (2^i - 1) = d.
inline void enumerate(int d, std::size_t slot, std::vector<int>& r, std::set<std::vector<int>>& out)
{
    const int w = (1 << (slot + 1)) - 1;
    if (d == 0) {
        auto t = r;
        while (!t.empty() && t.back() == 0)
            t.pop_back();
        out.insert(t);
        return;
    }
    if (w > d)
        return;
    for (int k = 0; k * w <= d; ++k) {
        r.push_back(k);
        enumerate(d - k * w, slot + 1, r, out);
        r.pop_back();
    }
}

}  // namespace extsq::oracle

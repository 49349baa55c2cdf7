#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ample/symbolic.hpp"

namespace ample {

// Explicit groupoid on a finite arrow table. Units are arrows 0..n_units-1
// (unit i is the identity at object i).
struct FiniteGroupoid {
    int n_units = 0;
    std::vector<int> src, dst;               // per arrow
    std::vector<std::vector<int>> comp;      // comp[a][b] = a∘b, -1 if not composable
    std::vector<int> inv;                    // per arrow
    std::vector<std::string> unit_names;

    int num_arrows() const { return (int)src.size(); }
    bool is_unit(int a) const { return a < n_units; }

    struct CheckReport {
        bool valid = true;
        bool principal = false;
        bool effective = false;  // equals principal for a discrete groupoid
        std::string violation;   // first violation, if any
    };
    CheckReport check() const;

    std::vector<int> fiber_at(int unit) const;  // arrows with src == unit

    static FiniteGroupoid pair_groupoid(int n);
    static FiniteGroupoid cyclic_group(int n);  // one unit, Z/n
    static FiniteGroupoid disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b);
};

// Length table on a finite groupoid; constructor verifies the length axioms.
struct FiniteLength {
    std::vector<Rat> len;  // per arrow
    FiniteLength() = default;
    FiniteLength(const FiniteGroupoid& g, std::vector<Rat> values);
};

// Truncation E_r = {(y,z) : d(y,z) <= r} of the coarse groupoid of a finite
// metric space. Arrows are ordered pairs; composition (y,z)∘(z,w) = (y,w) is
// kept partial: it exists in this truncation only when d(y,w) <= r, and the
// radius bookkeeping below tracks the honest product radius.
struct CoarseTruncation {
    FiniteMetricSpace space;
    Rat radius;

    CoarseTruncation(FiniteMetricSpace s, Rat r) : space(std::move(s)), radius(std::move(r)) {}

    bool has_arrow(int y, int z) const { return space.d(y, z) <= radius; }
    std::vector<int> fiber_points(int u) const;  // y with (y,u) in E_r

    // compose (y,z)∘(z,w); returns the pair and the radius r+s it certifiably
    // lives in; in_truncation reports whether it already lies in E_r.
    struct Product {
        int y, w;
        Rat certified_radius;
        bool in_truncation;
    };
    Product compose(int y, int z, int z2, int w) const;
};

}  // namespace ample

#include "ample/finite_groupoid.hpp"

#include <stdexcept>

namespace ample {

FiniteGroupoid::CheckReport FiniteGroupoid::check() const {
    CheckReport rep;
    auto fail = [&](const std::string& why) {
        rep.valid = false;
        if (rep.violation.empty()) rep.violation = why;
    };
    int m = num_arrows();
    if ((int)dst.size() != m || (int)inv.size() != m || (int)comp.size() != m) {
        fail("table sizes inconsistent");
        return rep;
    }
    for (int a = 0; a < m; ++a)
        if ((int)comp[a].size() != m) {
            fail("composition table not square");
            return rep;
        }
    for (int u = 0; u < n_units; ++u)
        if (src[u] != u || dst[u] != u) fail("unit " + std::to_string(u) + " not an identity arrow");
    // composability domain and src/dst of products
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            bool composable = src[a] == dst[b];
            int c = comp[a][b];
            if (composable != (c >= 0))
                fail("composability mismatch at (" + std::to_string(a) + "," +
                     std::to_string(b) + ")");
            if (c >= 0 && (src[c] != src[b] || dst[c] != dst[a]))
                fail("product endpoints wrong at (" + std::to_string(a) + "," +
                     std::to_string(b) + ")");
        }
    if (!rep.valid) return rep;
    // units neutral
    for (int a = 0; a < m; ++a) {
        if (comp[a][src[a]] != a || comp[dst[a]][a] != a)
            fail("unit not neutral for arrow " + std::to_string(a));
        if (comp[a][inv[a]] != dst[a] || comp[inv[a]][a] != src[a])
            fail("inverse law fails for arrow " + std::to_string(a));
    }
    // associativity
    for (int a = 0; a < m && rep.valid; ++a)
        for (int b = 0; b < m && rep.valid; ++b) {
            if (comp[a][b] < 0) continue;
            for (int c = 0; c < m; ++c) {
                if (comp[b][c] < 0) continue;
                if (comp[comp[a][b]][c] != comp[a][comp[b][c]]) {
                    fail("associativity fails at triple (" + std::to_string(a) + "," +
                         std::to_string(b) + "," + std::to_string(c) + ")");
                    break;
                }
            }
        }
    if (!rep.valid) return rep;
    rep.principal = true;
    for (int a = n_units; a < m; ++a)
        if (src[a] == dst[a]) rep.principal = false;
    // in the discrete topology the isotropy bundle is open, so effectiveness
    // coincides with principality
    rep.effective = rep.principal;
    return rep;
}

std::vector<int> FiniteGroupoid::fiber_at(int unit) const {
    std::vector<int> out;
    for (int a = 0; a < num_arrows(); ++a)
        if (src[a] == unit) out.push_back(a);
    return out;
}

FiniteGroupoid FiniteGroupoid::pair_groupoid(int n) {
    FiniteGroupoid g;
    g.n_units = n;
    // arrow (i,j) means j -> i; id arrows first
    auto id_of = [&](int i, int j) {
        if (i == j) return i;
        // non-unit arrows enumerated after the units
        int k = n;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                if (a == i && b == j) return k;
                ++k;
            }
        return -1;
    };
    int m = n * n;
    g.src.resize(m);
    g.dst.resize(m);
    g.inv.resize(m);
    std::vector<std::pair<int, int>> pairs(m);
    for (int i = 0; i < n; ++i) pairs[i] = {i, i};
    {
        int k = n;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) pairs[k++] = {a, b};
    }
    for (int a = 0; a < m; ++a) {
        g.dst[a] = pairs[a].first;
        g.src[a] = pairs[a].second;
        g.inv[a] = id_of(pairs[a].second, pairs[a].first);
    }
    g.comp.assign(m, std::vector<int>(m, -1));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (g.src[a] == g.dst[b]) g.comp[a][b] = id_of(g.dst[a], g.src[b]);
    for (int i = 0; i < n; ++i) g.unit_names.push_back("u" + std::to_string(i));
    return g;
}

FiniteGroupoid FiniteGroupoid::cyclic_group(int n) {
    FiniteGroupoid g;
    g.n_units = 1;
    g.src.assign(n, 0);
    g.dst.assign(n, 0);
    g.inv.resize(n);
    for (int a = 0; a < n; ++a) g.inv[a] = (n - a) % n;
    g.comp.assign(n, std::vector<int>(n, -1));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) g.comp[a][b] = (a + b) % n;
    g.unit_names.push_back("u0");
    return g;
}

FiniteGroupoid FiniteGroupoid::disjoint_union(const FiniteGroupoid& a,
                                              const FiniteGroupoid& b) {
    FiniteGroupoid g;
    g.n_units = a.n_units + b.n_units;
    int ma = a.num_arrows(), mb = b.num_arrows();
    // relabel: a-units, b-units, a-non-units, b-non-units
    auto amap = [&](int x) { return x < a.n_units ? x : x + b.n_units; };
    auto bmap = [&](int x) {
        return x < b.n_units ? x + a.n_units : x + ma;
    };
    int m = ma + mb;
    g.src.resize(m);
    g.dst.resize(m);
    g.inv.resize(m);
    g.comp.assign(m, std::vector<int>(m, -1));
    for (int x = 0; x < ma; ++x) {
        int y = amap(x);
        g.src[y] = amap(a.src[x]);
        g.dst[y] = amap(a.dst[x]);
        g.inv[y] = amap(a.inv[x]);
    }
    for (int x = 0; x < mb; ++x) {
        int y = bmap(x);
        g.src[y] = bmap(b.src[x]);
        g.dst[y] = bmap(b.dst[x]);
        g.inv[y] = bmap(b.inv[x]);
    }
    for (int x = 0; x < ma; ++x)
        for (int y = 0; y < ma; ++y)
            if (a.comp[x][y] >= 0) g.comp[amap(x)][amap(y)] = amap(a.comp[x][y]);
    for (int x = 0; x < mb; ++x)
        for (int y = 0; y < mb; ++y)
            if (b.comp[x][y] >= 0) g.comp[bmap(x)][bmap(y)] = bmap(b.comp[x][y]);
    for (auto& nm : a.unit_names) g.unit_names.push_back("a." + nm);
    for (auto& nm : b.unit_names) g.unit_names.push_back("b." + nm);
    return g;
}

FiniteLength::FiniteLength(const FiniteGroupoid& g, std::vector<Rat> values)
    : len(std::move(values)) {
    if ((int)len.size() != g.num_arrows())
        throw std::invalid_argument("length table size mismatch");
    for (int a = 0; a < g.num_arrows(); ++a) {
        if (len[a] < 0) throw std::invalid_argument("negative length");
        if ((len[a] == 0) != g.is_unit(a))
            throw std::invalid_argument("length zero must hold exactly on units");
        if (len[a] != len[g.inv[a]]) throw std::invalid_argument("length not symmetric");
    }
    for (int a = 0; a < g.num_arrows(); ++a)
        for (int b = 0; b < g.num_arrows(); ++b)
            if (g.comp[a][b] >= 0 && len[g.comp[a][b]] > len[a] + len[b])
                throw std::invalid_argument("length not subadditive at (" +
                                            std::to_string(a) + "," + std::to_string(b) + ")");
}

std::vector<int> CoarseTruncation::fiber_points(int u) const {
    std::vector<int> out;
    for (int y = 0; y < space.size(); ++y)
        if (has_arrow(y, u)) out.push_back(y);
    return out;
}

CoarseTruncation::Product CoarseTruncation::compose(int y, int z, int z2, int w) const {
    if (z != z2) throw std::invalid_argument("pairs not composable");
    if (!has_arrow(y, z) || !has_arrow(z2, w))
        throw std::invalid_argument("factor outside the truncation");
    Product p;
    p.y = y;
    p.w = w;
    p.certified_radius = radius + radius;  // E_r ∘ E_r ⊆ E_{2r}
    p.in_truncation = has_arrow(y, w);
    return p;
}

}  // namespace ample

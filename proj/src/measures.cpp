#include "ample/measures.hpp"

#include <numeric>
#include <set>
#include <stdexcept>

namespace ample {

void CylinderMeasure::validate() const {
    if ((long long)w.size() != num_words(alpha, depth))
        throw std::invalid_argument("measure weight count does not match depth");
    Rat total = 0;
    for (auto& x : w) {
        if (x < 0) throw std::invalid_argument("negative measure weight");
        total += x;
    }
    if (total != 1) throw std::invalid_argument("measure weights do not sum to 1");
}

Rat evaluate(const CylinderMeasure& mu, const ClopenSet& s) {
    if (s.alphabet() != mu.alpha)
        throw std::invalid_argument("alphabet mismatch in measure evaluation");
    if (s.is_empty()) return Rat(0);
    ClopenSet r = s.depth() < mu.depth ? s.refined(mu.depth) : s;
    if (r.depth() == mu.depth) {
        Rat total = 0;
        for (auto& word : r.words()) total += mu.w[(size_t)word_index(mu.alpha, word)];
        return total;
    }
    // set is finer than the measure: every touched depth-d cylinder must be
    // fully covered, otherwise the weights do not determine the value
    long long fanout = 1;
    for (int k = mu.depth; k < r.depth(); ++k) fanout *= mu.alpha.size();
    std::string cur;
    long long run = 0;
    Rat total = 0;
    auto flush = [&]() {
        if (cur.empty() && run == 0) return;
        if (run != fanout)
            throw std::invalid_argument("set finer than measure resolution at cylinder " + cur);
        total += mu.w[(size_t)word_index(mu.alpha, cur)];
    };
    for (auto& word : r.words()) {
        std::string p = word.substr(0, (size_t)mu.depth);
        if (p != cur) {
            flush();
            cur = p;
            run = 0;
        }
        ++run;
    }
    flush();
    return total;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// compress union-find roots to class ids 0..k-1, return k
long long number_classes(UnionFind& uf, std::vector<int>& class_of) {
    std::vector<int> remap(uf.parent.size(), -1);
    long long k = 0;
    class_of.resize(uf.parent.size());
    for (size_t i = 0; i < uf.parent.size(); ++i) {
        int r = uf.find((int)i);
        if (remap[r] < 0) remap[r] = (int)k++;
        class_of[i] = remap[r];
    }
    return k;
}

}  // namespace

MeasureFeasibility invariant_measure_feasibility(const TransformationGroupoid& g, int depth) {
    for (auto& gen : g.generators())
        for (auto& rule : gen.rules)
            if ((int)rule.first.size() > depth)
                throw std::invalid_argument("rule " + rule.first + " -> " + rule.second +
                                            " of generator " + gen.name +
                                            " not representable at depth " +
                                            std::to_string(depth));

    long long n = num_words(g.alphabet(), depth);
    UnionFind uf((size_t)n);
    for (int gi = 0; gi < g.num_generators(); ++gi) {
        const auto& table = g.gen_table(gi + 1, depth);
        const auto& rules = g.generators()[gi].rules;
        for (long long c = 0; c < n; ++c) {
            std::string word = index_word(g.alphabet(), depth, c);
            bool in_source = false;
            for (auto& rule : rules)
                if (word.compare(0, rule.first.size(), rule.first) == 0) {
                    in_source = true;
                    break;
                }
            if (!in_source) continue;  // exceptional points carry no mass
            if (table[(size_t)c] < 0)
                throw std::logic_error("rule image not cylinder-shaped at its own depth");
            uf.unite((int)c, (int)table[(size_t)c]);
        }
    }

    MeasureFeasibility out;
    out.depth = depth;
    out.num_classes = number_classes(uf, out.class_of);
    out.affine_dim = out.num_classes - 1;
    if (out.num_classes == 1) {
        out.kind = FeasKind::Unique;
        CylinderMeasure mu{g.alphabet(), depth, std::vector<Rat>((size_t)n, Rat(1) / n)};
        mu.validate();
        out.unique = std::move(mu);
    } else {
        out.kind = FeasKind::FeasibleRegion;
    }
    return out;
}

FiniteMeasureFeasibility invariant_measure_feasibility(const FiniteGroupoid& g) {
    UnionFind uf((size_t)g.n_units);
    for (int a = 0; a < g.num_arrows(); ++a) uf.unite(g.src[a], g.dst[a]);
    FiniteMeasureFeasibility out;
    out.num_classes = number_classes(uf, out.class_of);
    out.affine_dim = out.num_classes - 1;
    if (out.num_classes == 1) {
        out.kind = FeasKind::Unique;
        out.unique = std::vector<Rat>((size_t)g.n_units, Rat(1) / g.n_units);
    } else {
        out.kind = FeasKind::FeasibleRegion;
    }
    return out;
}

AveragingMeasure folner_averaging(const TransformationGroupoid& g,
                                  const FolnerCertificate& cert) {
    if (cert.F.empty()) throw std::invalid_argument("empty Folner set");
    (void)g;
    return AveragingMeasure{cert.base, cert.F};
}

Rat evaluate(const TransformationGroupoid& g, const AveragingMeasure& mu,
             const ClopenSet& s) {
    long long hits = 0;
    for (auto& w : mu.F)
        if (member(g.apply(w, mu.base), s)) ++hits;
    return Rat(hits) / Rat((long long)mu.F.size());
}

AveragingDefect averaging_defect(const TransformationGroupoid& g,
                                 const AveragingMeasure& mu, const Bisection& U) {
    AveragingDefect d;
    if (U.is_empty()) {
        d.indicator_defect = 0;
        d.bound = 0;
        return d;
    }
    Rat s_side = evaluate(g, mu, U.source());
    Rat r_side = evaluate(g, mu, U.range(g));
    d.indicator_defect = s_side > r_side ? s_side - r_side : r_side - s_side;

    // |{U, U^-1} F  delta  F| / |F|, with units implicitly in K (so the
    // difference is exactly the escaping translates)
    std::set<std::string> inF;
    for (auto& w : mu.F) inF.insert(w.key());
    Bisection Uinv = U.inverse(g);
    std::set<std::string> escapes;
    for (auto& w : mu.F) {
        Point r = g.apply(w, mu.base);
        for (const Bisection* b : {&U, (const Bisection*)&Uinv})
            if (member(r, b->dom)) {
                Word moved = b->w * w;
                if (!inF.count(moved.key())) escapes.insert(moved.key());
            }
    }
    d.bound = Rat((long long)escapes.size()) / Rat((long long)mu.F.size());
    return d;
}

Rat invariance_defect(const TransformationGroupoid& g, const CylinderMeasure& mu,
                      const Bisection& U) {
    if (U.is_empty()) return Rat(0);
    Rat s = evaluate(mu, U.source());
    Rat r = evaluate(mu, U.range(g));
    return s > r ? s - r : r - s;
}

CylinderMeasure project(const TransformationGroupoid& g, const AveragingMeasure& mu,
                        int depth) {
    long long n = num_words(g.alphabet(), depth);
    CylinderMeasure out{g.alphabet(), depth, std::vector<Rat>((size_t)n, Rat(0))};
    Rat atom = Rat(1) / Rat((long long)mu.F.size());
    for (auto& w : mu.F) {
        Point r = g.apply(w, mu.base);
        out.w[(size_t)word_index(g.alphabet(), r.prefix((size_t)depth))] += atom;
    }
    out.validate();
    return out;
}

}  // namespace ample

#include "ample/coarse.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ample {

namespace {

// caches range points of fiber arrows at a fixed base
class FiberContext {
  public:
    FiberContext(const TransformationGroupoid& g, Point base)
        : g_(g), base_(std::move(base)) {}

    const Point& range_of(const Word& w) {
        auto key = w.key();
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(key, g_.apply(w, base_)).first->second;
    }

  private:
    const TransformationGroupoid& g_;
    Point base_;
    std::map<std::string, Point> cache_;
};

std::set<std::string> key_set(const std::vector<Word>& ws) {
    std::set<std::string> out;
    for (auto& w : ws) out.insert(w.key());
    return out;
}

FiberBoundaries boundaries_ctx(const TransformationGroupoid& g, FiberContext& ctx,
                               const std::vector<Word>& A, const KSpec& K) {
    FiberBoundaries out;
    auto inA = key_set(A);
    std::set<std::string> plus_seen, minus_seen;
    for (auto& w : A) {
        bool escapes = false;
        for (auto& b : K.elems) {
            if (!member(ctx.range_of(w), b.dom)) continue;
            Word kw = b.w * w;
            if (inA.count(kw.key())) continue;
            escapes = true;
            if (plus_seen.insert(kw.key()).second) out.plus.push_back(kw);
        }
        if (escapes && minus_seen.insert(w.key()).second) out.minus.push_back(w);
    }
    out.all = out.plus;
    out.all.insert(out.all.end(), out.minus.begin(), out.minus.end());
    return out;
}

bool check_folner(const TransformationGroupoid& g, FiberContext& ctx,
                  const std::vector<Word>& F, const KSpec& K, const Rat& eps,
                  FiberBoundaries* bd_out = nullptr) {
    auto bd = boundaries_ctx(g, ctx, F, K);
    bool ok = Rat((long long)bd.all.size()) <= eps * Rat((long long)F.size());
    if (bd_out) *bd_out = bd;
    return ok;
}

}  // namespace

void FiberSet::canonicalize() {
    std::sort(words.begin(), words.end(),
              [](const Word& a, const Word& b) { return a.key() < b.key(); });
    words.erase(std::unique(words.begin(), words.end()), words.end());
}

bool FiberSet::contains(const Word& w) const {
    for (auto& x : words)
        if (x == w) return true;
    return false;
}

ExtRat rho(const TransformationGroupoid& g, const WordLength& l, const TArrow& x,
           const TArrow& y) {
    if (x.base != y.base) return ExtRat::inf();
    return ExtRat::fin(l.len(x.w * y.w.inverse()));
}

std::vector<Word> word_ball(const WordLength& l, const Word& center, const Rat& R,
                            int num_gens) {
    if (R < 0) return {};
    std::vector<Word> prefixes = {Word::identity()};
    std::vector<Word> out = {center};
    std::set<std::string> seen = {center.key()};
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Word> next;
        for (auto& v : prefixes)
            for (int gi = 0; gi < num_gens; ++gi)
                for (int sgn : {1, -1}) {
                    Word cand = Word::gen(gi, sgn) * v;
                    if (cand.length() != v.length() + 1) continue;
                    if (l.len(cand) > R) continue;
                    next.push_back(cand);
                    Word w = cand * center;
                    if (seen.insert(w.key()).second) out.push_back(w);
                }
        if (!next.empty()) grew = true;
        prefixes = std::move(next);
    }
    return out;
}

FiberBoundaries boundaries(const TransformationGroupoid& g, const FiberSet& A,
                           const KSpec& K) {
    FiberContext ctx(g, A.base);
    return boundaries_ctx(g, ctx, A.words, K);
}

std::optional<FolnerCertificate> folner_search(const TransformationGroupoid& g,
                                               const Point& u, const KSpec& K,
                                               const Rat& eps, long long budget) {
    FiberContext ctx(g, u);
    auto accept = [&](const std::vector<Word>& F) -> std::optional<FolnerCertificate> {
        FiberBoundaries bd;
        if (!check_folner(g, ctx, F, K, eps, &bd)) return std::nullopt;
        FolnerCertificate c;
        c.base = u;
        c.F = F;
        c.bplus = bd.plus.size();
        c.bminus = bd.minus.size();
        c.btotal = bd.all.size();
        c.eps = eps;
        return c;
    };
    if (g.num_generators() == 1) {
        // interval shapes, minimal length first
        for (long long L = 1; L <= budget; ++L) {
            for (long long a = -budget; a + L - 1 <= budget; ++a) {
                std::vector<Word> F;
                for (long long j = 0; j < L; ++j) {
                    long long e = a + j;
                    F.push_back(e == 0 ? Word::identity() : Word::gen(0, e));
                }
                if (auto c = accept(F)) return c;
            }
        }
        return std::nullopt;
    }
    // multi-generator fallback: balls around the unit
    WordLength l = WordLength::unit(g);
    for (long long R = 0; R <= budget; ++R) {
        auto F = word_ball(l, Word::identity(), Rat(R), g.num_generators());
        if ((long long)F.size() > budget) break;
        if (auto c = accept(F)) return c;
    }
    return std::nullopt;
}

bool revalidate(const TransformationGroupoid& g, const FolnerCertificate& c,
                const KSpec& K) {
    if (c.F.empty()) return false;
    FiberSet A{c.base, c.F};
    A.canonicalize();
    auto bd = boundaries(g, A, K);
    return bd.plus.size() == c.bplus && bd.minus.size() == c.bminus &&
           bd.all.size() == c.btotal &&
           Rat((long long)bd.all.size()) <= c.eps * Rat((long long)A.words.size());
}

std::vector<ClassVerdict> ubiquitous_check(const TransformationGroupoid& g, const KSpec& K,
                                           const Rat& eps, const KSpec& L, int depth) {
    std::vector<ClassVerdict> out;
    auto full = ClopenSet::full(g.alphabet(), depth);
    for (auto& cw : full.words()) {
        Point u(cw, std::string(1, g.alphabet().symbols[0]));
        FiberContext ctx(g, u);
        // candidate pool: the unit plus the L-arrows at u
        std::vector<Word> pool = {Word::identity()};
        std::set<std::string> seen = {Word::identity().key()};
        for (auto& b : L.elems)
            if (member(u, b.dom) && seen.insert(b.w.key()).second) pool.push_back(b.w);
        ClassVerdict v;
        v.cylinder = cw;
        if (pool.size() <= 16) {
            size_t m = pool.size();
            for (size_t mask = 1; mask < (size_t(1) << m) && !v.pass; ++mask) {
                std::vector<Word> F;
                for (size_t i = 0; i < m; ++i)
                    if (mask & (size_t(1) << i)) F.push_back(pool[i]);
                if (check_folner(g, ctx, F, K, eps)) {
                    v.pass = true;
                    v.folner_size = F.size();
                }
            }
        } else {
            if (check_folner(g, ctx, pool, K, eps)) {
                v.pass = true;
                v.folner_size = pool.size();
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

GrowResult grow_to_folner(const TransformationGroupoid& g, const WordLength& l,
                          const FiberSet& M, const Rat& R, const Rat& eps,
                          const Rat& S_budget) {
    GrowResult res;
    res.best_ratio = -1;
    if (M.words.empty() || R <= 0) return res;
    std::vector<Word> F = M.words;
    Rat S = 0;
    while (true) {
        // closed R-neighborhood of F in the fiber metric, tracking both sides
        // of the R-boundary
        std::set<std::string> inF = key_set(F);
        std::set<std::string> seen = inF;
        std::vector<Word> grown = F;
        size_t bminus = 0;
        for (auto& w : F) {
            bool escapes = false;
            for (auto& x : word_ball(l, w, R, g.num_generators())) {
                if (!inF.count(x.key())) escapes = true;
                if (seen.insert(x.key()).second) grown.push_back(x);
            }
            if (escapes) ++bminus;
        }
        size_t bplus = grown.size() - F.size();
        Rat ratio = Rat((long long)(bplus + bminus)) / Rat((long long)F.size());
        if (res.best_ratio < 0 || ratio < res.best_ratio) res.best_ratio = ratio;
        if (ratio <= eps) {
            res.found = true;
            res.F = F;
            res.inflation = S;
            return res;
        }
        if (S + R > S_budget) return res;  // budget exhausted, best_ratio reported
        F = std::move(grown);
        S += R;
    }
}

std::vector<int> separated_net_indices(int size, const std::function<Rat(int, int)>& dist,
                                       const Rat& s, int n) {
    // probed capacity: the largest closed s-ball among the given points
    long long cap = 0;
    for (int i = 0; i < size; ++i) {
        long long c = 0;
        for (int j = 0; j < size; ++j)
            if (dist(i, j) <= s) ++c;
        cap = std::max(cap, c);
    }
    if ((long long)size < (long long)n * cap)
        throw std::runtime_error("separated net precondition fails: |F| < n * capacity(s)");
    std::vector<int> picked;
    std::vector<char> alive(size, 1);
    while ((int)picked.size() < n) {
        int i = 0;
        while (i < size && !alive[i]) ++i;
        if (i == size) throw std::logic_error("separated net ran out of points");
        picked.push_back(i);
        for (int j = 0; j < size; ++j)
            if (alive[j] && dist(i, j) <= s) alive[j] = 0;
    }
    return picked;
}

std::vector<Word> separated_net(const WordLength& l, const std::vector<Word>& F,
                                const Rat& s, int n) {
    auto dist = [&](int i, int j) { return l.len(F[i] * F[j].inverse()); };
    auto idx = separated_net_indices((int)F.size(), dist, s, n);
    std::vector<Word> out;
    for (int i : idx) out.push_back(F[i]);
    return out;
}

PackingResult disjoint_ball_packing(const TransformationGroupoid& g, const WordLength& l,
                                    const FiberSet& M, const Rat& R, int n,
                                    const Rat& S_budget) {
    PackingResult res;
    if (n == 0) {
        res.found = true;
        res.diagnostic = "empty packing";
        return res;
    }
    if (M.words.empty()) {
        res.diagnostic = "empty seed set";
        return res;
    }
    long long cap2R = (long long)word_ball(l, Word::identity(), R + R, g.num_generators()).size();
    long long need = (long long)n * (long long)M.words.size() * cap2R;
    std::vector<Word> F = M.words;
    Rat S = 0;
    Rat step = R > 0 ? R : Rat(1);
    const Rat growth_eps = Rat(1) / 2;  // sustained-growth threshold
    while ((long long)F.size() < need) {
        if (S + step > S_budget) {
            res.diagnostic = "budget exhausted before reaching capacity target";
            return res;
        }
        std::set<std::string> seen = key_set(F);
        std::vector<Word> grown = F;
        for (auto& w : F)
            for (auto& x : word_ball(l, w, step, g.num_generators()))
                if (seen.insert(x.key()).second) grown.push_back(x);
        Rat ratio = Rat((long long)(grown.size() - F.size())) / Rat((long long)F.size());
        if (ratio <= growth_eps) {
            res.diagnostic = "growth ratio collapsed";
            return res;
        }
        F = std::move(grown);
        S += step;
    }
    auto centers = separated_net(l, F, R + R, n * (int)M.words.size());
    // verify: closed R-balls around centers pairwise disjoint
    for (size_t i = 0; i < centers.size(); ++i)
        for (size_t j = i + 1; j < centers.size(); ++j)
            if (l.len(centers[i] * centers[j].inverse()) <= R + R) {
                res.diagnostic = "net verification failed";
                return res;
            }
    res.found = true;
    res.centers = centers;
    res.radius_used = S;
    res.diagnostic = "packing of " + std::to_string(centers.size()) + " disjoint balls";
    return res;
}

long long min_ball_cardinality(const TransformationGroupoid& g, const WordLength& l,
                               const Rat& R) {
    // fibers carry the word metric, so every unit ball looks the same
    return (long long)word_ball(l, Word::identity(), R, g.num_generators()).size();
}

CapacityProfile capacity_profile(const WordLength& l, int num_gens,
                                 const std::vector<Rat>& radii) {
    CapacityProfile p;
    for (auto& r : radii)
        p.samples.push_back({r, (long long)word_ball(l, Word::identity(), r, num_gens).size()});
    for (size_t i = 1; i < p.samples.size(); ++i)
        if (p.samples[i].first >= p.samples[i - 1].first &&
            p.samples[i].second < p.samples[i - 1].second)
            throw std::logic_error("capacity profile not monotone");
    return p;
}

// ---------- finite groupoids ----------

FiniteBoundaries boundaries(const FiniteGroupoid& g, const std::vector<int>& A,
                            const std::vector<int>& K) {
    FiniteBoundaries out;
    std::set<int> inA(A.begin(), A.end());
    std::set<int> plus_seen, minus_seen;
    for (int a : A) {
        bool escapes = false;
        for (int k : K) {
            int p = g.comp[k][a];
            if (p < 0 || inA.count(p)) continue;
            escapes = true;
            if (plus_seen.insert(p).second) out.plus.push_back(p);
        }
        if (escapes && minus_seen.insert(a).second) out.minus.push_back(a);
    }
    out.all = out.plus;
    out.all.insert(out.all.end(), out.minus.begin(), out.minus.end());
    return out;
}

std::optional<FiniteFolner> folner_search(const FiniteGroupoid& g, int unit,
                                          const std::vector<int>& K, const Rat& eps) {
    auto fib = g.fiber_at(unit);
    auto try_set = [&](const std::vector<int>& F) -> std::optional<FiniteFolner> {
        if (F.empty()) return std::nullopt;
        auto bd = boundaries(g, F, K);
        if (Rat((long long)bd.all.size()) <= eps * Rat((long long)F.size()))
            return FiniteFolner{unit, F, bd.all.size()};
        return std::nullopt;
    };
    if (auto r = try_set(fib)) return r;  // whole fiber often works
    if (fib.size() <= 16) {
        size_t m = fib.size();
        for (size_t mask = 1; mask < (size_t(1) << m); ++mask) {
            std::vector<int> F;
            for (size_t i = 0; i < m; ++i)
                if (mask & (size_t(1) << i)) F.push_back(fib[i]);
            if (auto r = try_set(F)) return r;
        }
    }
    return std::nullopt;
}

std::vector<std::pair<int, bool>> ubiquitous_check(const FiniteGroupoid& g,
                                                   const std::vector<int>& K,
                                                   const Rat& eps,
                                                   const std::vector<int>& L) {
    std::vector<std::pair<int, bool>> out;
    for (int u = 0; u < g.n_units; ++u) {
        std::vector<int> pool = {u};
        for (int l : L)
            if (g.src[l] == u && l != u) pool.push_back(l);
        bool pass = false;
        size_t m = pool.size();
        if (m <= 16) {
            for (size_t mask = 1; mask < (size_t(1) << m) && !pass; ++mask) {
                std::vector<int> F;
                for (size_t i = 0; i < m; ++i)
                    if (mask & (size_t(1) << i)) F.push_back(pool[i]);
                auto bd = boundaries(g, F, K);
                if (Rat((long long)bd.all.size()) <= eps * Rat((long long)F.size()))
                    pass = true;
            }
        }
        out.push_back({u, pass});
    }
    return out;
}

// ---------- metric spaces and coarse truncations ----------

MetricBoundaries metric_boundaries(const FiniteMetricSpace& Y, const std::vector<int>& A,
                                   const Rat& R) {
    MetricBoundaries out;
    std::set<int> inA(A.begin(), A.end());
    for (int x = 0; x < Y.size(); ++x) {
        bool in = inA.count(x) > 0;
        Rat best = -1;
        for (int y = 0; y < Y.size(); ++y) {
            if (inA.count(y) == (size_t)in) continue;
            if (best < 0 || Y.d(x, y) < best) best = Y.d(x, y);
        }
        if (best < 0 || best > R) continue;
        if (in)
            out.minus.push_back(x);
        else
            out.plus.push_back(x);
    }
    out.all = out.plus;
    out.all.insert(out.all.end(), out.minus.begin(), out.minus.end());
    return out;
}

std::optional<std::vector<int>> metric_folner_search(const FiniteMetricSpace& Y,
                                                     const Rat& R, const Rat& eps) {
    int n = Y.size();
    if (n > 20) throw std::invalid_argument("metric space too large for exhaustive search");
    for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
        std::vector<int> F;
        for (int i = 0; i < n; ++i)
            if (mask & (size_t(1) << i)) F.push_back(i);
        auto bd = metric_boundaries(Y, F, R);
        if (Rat((long long)bd.all.size()) <= eps * Rat((long long)F.size())) return F;
    }
    return std::nullopt;
}

std::optional<std::vector<int>> truncation_fiber_folner(const CoarseTruncation& E, int u,
                                                        const Rat& R, const Rat& eps) {
    auto pts = E.fiber_points(u);
    int n = (int)pts.size();
    if (n > 20) throw std::invalid_argument("fiber too large for exhaustive search");
    for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
        std::vector<int> F;
        std::set<int> inF;
        for (int i = 0; i < n; ++i)
            if (mask & (size_t(1) << i)) {
                F.push_back(pts[i]);
                inF.insert(pts[i]);
            }
        // boundary of the arrow set {(y,u): y in F} inside the fiber of E_r;
        // the fiber distance of (y,u),(z,u) is d(y,z), certified in E_{2r}
        long long b = 0;
        for (int y : pts) {
            bool in = inF.count(y) > 0;
            bool near = false;
            for (int z : pts)
                if ((inF.count(z) > 0) != in && E.space.d(y, z) <= R) near = true;
            if (near) ++b;
        }
        if (Rat(b) <= eps * Rat((long long)F.size())) return F;
    }
    return std::nullopt;
}

TruncationComparison coarse_truncation_amenability(
    const FiniteMetricSpace& Y, const Rat& r,
    const std::vector<std::pair<Rat, Rat>>& grid) {
    TruncationComparison cmp;
    for (auto& [R, eps] : grid) {
        TruncationComparison::Entry e;
        e.R = R;
        e.eps = eps;
        for (int u = 0; u < Y.size() && !e.fiber_witnessed; ++u)
            if (truncation_fiber_folner(CoarseTruncation(Y, r), u, R, eps))
                e.fiber_witnessed = true;
        e.direct_witnessed = metric_folner_search(Y, R, eps).has_value();
        cmp.agree = cmp.agree && (e.fiber_witnessed == e.direct_witnessed);
        cmp.entries.push_back(e);
    }
    return cmp;
}

long long min_ball_cardinality(const FiniteMetricSpace& Y, const Rat& R) {
    long long best = -1;
    for (int x = 0; x < Y.size(); ++x) {
        long long c = 0;
        for (int y = 0; y < Y.size(); ++y)
            if (Y.d(x, y) <= R) ++c;
        if (best < 0 || c < best) best = c;
    }
    return best;
}

long long min_ball_cardinality(const FiniteGroupoid& g, const FiniteLength& l,
                               const Rat& R) {
    long long best = -1;
    for (int u = 0; u < g.n_units; ++u) {
        long long c = 0;
        for (int a : g.fiber_at(u))
            if (l.len[a] <= R) ++c;  // rho(a, unit) = len(a)
        if (best < 0 || c < best) best = c;
    }
    return best;
}

}  // namespace ample

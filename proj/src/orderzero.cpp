#include "ample/orderzero.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>

namespace ample {

namespace {

std::string level_name(const ClopenSet& s) {
    return s.words().empty() ? std::string("(empty)") : s.words().front();
}

// row of m whose level equals s, or -1
int find_row(const Multisection& m, const ClopenSet& s) {
    for (int i = 0; i < m.size(); ++i)
        if (equal(m.level(i), s)) return i;
    return -1;
}

int find_level(const std::vector<LevelRef>& H0, const Castle& outer, const ClopenSet& s) {
    for (size_t h = 0; h < H0.size(); ++h)
        if (equal(outer.ms[(size_t)H0[h].ms].level(H0[h].row), s)) return (int)h;
    return -1;
}

}  // namespace

NestingSystem build_nesting_system(const TransformationGroupoid& g, const Castle& inner,
                                   const Castle& outer, std::vector<LevelRef> H0, int n,
                                   long long N) {
    if (n < 1 || N < 1) throw std::invalid_argument("block count and floor must be positive");
    auto nest = check_nesting(g, inner, outer);
    if (!nest.ok) throw std::invalid_argument("castles are not nested: " + nest.failure);
    std::sort(H0.begin(), H0.end());
    H0.erase(std::unique(H0.begin(), H0.end()), H0.end());
    for (auto& ref : H0)
        if (ref.ms < 0 || ref.ms >= (int)outer.ms.size() || ref.row < 0 ||
            ref.row >= outer.ms[(size_t)ref.ms].size())
            throw std::invalid_argument("selected level out of range");

    NestingSystem ns;
    ns.inner = &inner;
    ns.outer = &outer;
    ns.n = n;
    ns.N = N;
    ns.H0 = H0;
    ns.blocks.assign(H0.size(), std::vector<std::vector<std::vector<int>>>(
                                    inner.ms.size()));

    // base level per outer multisection: the first selected level there
    std::vector<int> base_h((size_t)outer.ms.size(), -1);
    for (size_t h = 0; h < H0.size(); ++h)
        if (base_h[(size_t)H0[h].ms] < 0) base_h[(size_t)H0[h].ms] = (int)h;

    for (size_t l = 0; l < inner.ms.size(); ++l) {
        int p = nest.assignment[l];
        if (base_h[(size_t)p] < 0)
            throw std::invalid_argument("no level selected in the hosting multisection");
        const auto& om = outer.ms[(size_t)p];
        const auto& im = inner.ms[l];
        int hb = base_h[(size_t)p];
        int tb = H0[(size_t)hb].row;
        // inner rows under the base level, in row order
        std::vector<int> P;
        for (int i = 0; i < im.size(); ++i)
            if (subset(im.level(i), om.level(tb))) P.push_back(i);
        if ((long long)P.size() < (long long)n * N)
            throw std::invalid_argument(
                "multiplicity " + std::to_string(P.size()) + " below " +
                std::to_string((long long)n * N) + " at level " +
                level_name(om.level(tb)));
        long long sz = (long long)P.size() / n;
        std::vector<std::vector<int>> base_blocks((size_t)n);
        for (int m = 0; m < n; ++m)
            base_blocks[(size_t)m].assign(P.begin() + m * sz, P.begin() + (m + 1) * sz);

        // transport the base blocks to every selected level of this fiber
        for (size_t h = 0; h < H0.size(); ++h) {
            if (H0[h].ms != p) continue;
            if ((int)h == hb) {
                ns.blocks[h][l] = base_blocks;
                continue;
            }
            Bisection lad = om.at(g, H0[h].row, tb);
            std::vector<std::vector<int>> tr((size_t)n);
            for (int m = 0; m < n; ++m)
                for (int row : base_blocks[(size_t)m]) {
                    ClopenSet img = g.apply_word(lad.w, im.level(row));
                    int r = find_row(im, img);
                    if (r < 0)
                        throw std::invalid_argument(
                            "transport of inner level " + level_name(im.level(row)) +
                            " is not an inner level");
                    tr[(size_t)m].push_back(r);
                }
            ns.blocks[h][l] = tr;
        }
    }

    // equivariance under every ladder between selected levels of one fiber
    for (size_t h1 = 0; h1 < H0.size(); ++h1)
        for (size_t h2 = 0; h2 < H0.size(); ++h2) {
            if (h1 == h2 || H0[h1].ms != H0[h2].ms) continue;
            const auto& om = outer.ms[(size_t)H0[h1].ms];
            Bisection lad = om.at(g, H0[h2].row, H0[h1].row);
            for (size_t l = 0; l < inner.ms.size(); ++l) {
                const auto& b1 = ns.blocks[h1][l];
                const auto& b2 = ns.blocks[h2][l];
                if (b1.empty()) continue;
                for (int m = 0; m < n; ++m)
                    for (size_t a = 0; a < b1[(size_t)m].size(); ++a) {
                        ClopenSet img =
                            g.apply_word(lad.w, inner.ms[l].level(b1[(size_t)m][a]));
                        if (!equal(img, inner.ms[l].level(b2[(size_t)m][a])))
                            throw std::invalid_argument(
                                "block transport is not equivariant at level " +
                                level_name(om.level(H0[h2].row)));
                    }
            }
        }
    return ns;
}

CompatibleFamilyReport build_compatible_family(const TransformationGroupoid& g,
                                               const Castle& inner) {
    CompatibleFamilyReport rep;
    for (const auto& m : inner.ms)
        for (int i = 0; i < m.size() && rep.pass; ++i)
            for (int j = 0; j < m.size() && rep.pass; ++j) {
                Bisection B = m.at(g, i, j);
                auto hB = GroupoidFunction::indicator(g, B);
                auto hs = GroupoidFunction::indicator(g, Bisection{Word::identity(), B.dom});
                auto hr = GroupoidFunction::indicator(
                    g, Bisection{Word::identity(), g.apply_word(B.w, B.dom)});
                if (!gf_equal(convolve(hr, hB), hB) || !gf_equal(convolve(hB, hs), hB)) {
                    rep.pass = false;
                    rep.violation = "compatibility fails on the ladder " + level_name(B.dom);
                }
                rep.checks += 2;
            }
    return rep;
}

// coherent target of the move O at the selected level h: the index of the
// selected level reached by a castle ladder whose germ agrees with O on the
// whole level; -1 when the move exits the selection or disagrees with every
// ladder (the routing that the final stratum absorbs)
static int coherent_target(const TransformationGroupoid& g, const Castle& outer,
                           const std::vector<LevelRef>& H0, size_t h, const Bisection& O) {
    const ClopenSet& D = outer.ms[(size_t)H0[h].ms].level(H0[h].row);
    ClopenSet img = g.apply_word(O.w, D);
    int h2 = find_level(H0, outer, img);
    if (h2 < 0 || H0[(size_t)h2].ms != H0[h].ms) return -1;
    Word lad = outer.ms[(size_t)H0[h].ms].at(g, H0[(size_t)h2].row, H0[h].row).w;
    int cap = g.max_rule_depth() + 4;
    if (!equal(germ_agreement(g, O.w, lad, D, cap), D)) return -1;
    return h2;
}

Strata kappa_stratification(const TransformationGroupoid& g, const Castle& outer,
                            const std::vector<LevelRef>& H0,
                            const std::vector<LevelRef>& base, const KSpec& F,
                            long long N) {
    if (N < 1) throw std::invalid_argument("stratum count must be positive");
    auto level_of = [&](size_t h) -> const ClopenSet& {
        return outer.ms[(size_t)H0[h].ms].level(H0[h].row);
    };
    // both directions of every supplied bisection
    std::vector<Bisection> moves;
    for (auto& O : F.elems) {
        moves.push_back(O);
        moves.push_back(Bisection{O.w.inverse(), g.apply_word(O.w, O.dom)});
    }
    // coherence edges and escaping levels
    std::vector<std::vector<size_t>> nbr(H0.size());
    std::vector<char> escapes(H0.size(), 0);
    for (size_t h = 0; h < H0.size(); ++h)
        for (auto& O : moves) {
            const ClopenSet& D = level_of(h);
            if (disjoint(D, O.dom)) continue;
            if (!subset(D, O.dom))
                throw std::invalid_argument("level " + level_name(D) +
                                            " straddles a bisection domain");
            int h2 = coherent_target(g, outer, H0, h, O);
            if (h2 < 0)
                escapes[h] = 1;
            else
                nbr[h].push_back((size_t)h2);
        }
    std::vector<int> dist(H0.size(), -1);
    std::vector<size_t> queue;
    bool any_escape = false;
    for (size_t h = 0; h < H0.size(); ++h)
        if (escapes[h]) any_escape = true;
    if (any_escape) {
        for (size_t h = 0; h < H0.size(); ++h)
            if (escapes[h]) {
                dist[h] = 0;
                queue.push_back(h);
            }
    } else {
        for (auto& b : base) {
            auto it = std::find(H0.begin(), H0.end(), b);
            if (it == H0.end())
                throw std::invalid_argument("base level is not among the selected levels");
            size_t h = (size_t)(it - H0.begin());
            if (dist[h] < 0) {
                dist[h] = 0;
                queue.push_back(h);
            }
        }
    }
    for (size_t qi = 0; qi < queue.size(); ++qi)
        for (size_t h2 : nbr[queue[qi]])
            if (dist[h2] < 0) {
                dist[h2] = dist[queue[qi]] + 1;
                queue.push_back(h2);
            }
    Strata s;
    for (size_t h = 0; h < H0.size(); ++h) {
        if (dist[h] < 0)
            throw std::invalid_argument("level " + level_name(level_of(h)) +
                                        " is not reached within the stratum count");
        // with an escaping boundary, strata count down from the boundary
        // stratum N; otherwise up from the base stratum 0; levels farther
        // than N steps saturate at the extreme stratum
        long long k = any_escape ? std::max(0LL, N - dist[h]) : std::min((long long)dist[h], N);
        s.level.push_back((int)k);
        s.kappa.push_back(Rat(1) - Rat(k) / Rat(N));
    }
    return s;
}

GroupoidFunction OrderZeroMap::diag(const TransformationGroupoid& g,
                                    const std::vector<Rat>& d) const {
    GroupoidFunction out = GroupoidFunction::zero(g);
    for (int k = 0; k < n; ++k)
        if (d[(size_t)k] != 0) out = add(out, image(k, k).scaled(d[(size_t)k]));
    return out;
}

OrderZeroMap build_psi(const TransformationGroupoid& g, const NestingSystem& ns,
                       const std::vector<Rat>& kappa) {
    if (kappa.size() != ns.H0.size())
        throw std::invalid_argument("one kappa value per selected level is required");
    OrderZeroMap psi;
    psi.n = ns.n;
    psi.im.assign((size_t)(ns.n * ns.n), GroupoidFunction::zero(g));
    for (int k = 0; k < ns.n; ++k)
        for (int m = 0; m < ns.n; ++m) {
            std::vector<GFTerm> ts;
            for (size_t h = 0; h < ns.H0.size(); ++h) {
                if (kappa[h] == 0) continue;
                for (size_t l = 0; l < ns.inner->ms.size(); ++l) {
                    const auto& bl = ns.blocks[h][l];
                    if (bl.empty()) continue;
                    for (size_t a = 0; a < bl[(size_t)m].size(); ++a) {
                        Bisection B = ns.inner->ms[l].at(g, bl[(size_t)k][a],
                                                         bl[(size_t)m][a]);
                        for (auto& c : B.dom.words()) ts.push_back({B.w, c, kappa[h]});
                    }
                }
            }
            psi.im[(size_t)(k * ns.n + m)] = GroupoidFunction(&g, std::move(ts));
        }
    psi.h0 = GroupoidFunction::zero(g);
    for (int k = 0; k < ns.n; ++k) psi.h0 = add(psi.h0, psi.image(k, k));
    return psi;
}

OrderZeroReport verify_order_zero(const TransformationGroupoid& g, const NestingSystem& ns,
                                  const std::vector<Rat>& kappa, int trials,
                                  unsigned seed) {
    OrderZeroReport rep;
    std::vector<Rat> ones(ns.H0.size(), Rat(1));
    auto phi = build_psi(g, ns, ones);
    auto psi = build_psi(g, ns, kappa);
    auto zero = GroupoidFunction::zero(g);
    int n = ns.n;
    auto fail = [&](const std::string& msg) {
        rep.pass = false;
        if (rep.violation.empty()) rep.violation = msg;
    };
    // multiplicativity of phi on all matrix-unit pairs
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    auto lhs = convolve(phi.image(k, m), phi.image(p, q));
                    const auto& rhs = (m == p) ? phi.image(k, q) : zero;
                    if (!gf_equal(lhs, rhs))
                        fail("multiplicativity fails at units (" + std::to_string(k) +
                             "," + std::to_string(m) + ")(" + std::to_string(p) + "," +
                             std::to_string(q) + ")");
                    ++rep.unit_checks;
                }
    // factorization through h0
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            if (!gf_equal(convolve(psi.h0, phi.image(k, m)), psi.image(k, m)) ||
                !gf_equal(convolve(phi.image(k, m), psi.h0), psi.image(k, m)))
                fail("factorization fails at unit (" + std::to_string(k) + "," +
                     std::to_string(m) + ")");
            ++rep.unit_checks;
        }
    // orthogonal positive diagonal pairs
    std::mt19937 rng(seed);
    for (int t = 0; t < trials; ++t) {
        std::vector<Rat> da((size_t)n, Rat(0)), db((size_t)n, Rat(0));
        bool any_a = false, any_b = false;
        for (int k = 0; k < n; ++k) {
            Rat v = Rat(1 + (long long)(rng() % 9)) / Rat(1 + (long long)(rng() % 5));
            if (rng() % 2) {
                da[(size_t)k] = v;
                any_a = true;
            } else {
                db[(size_t)k] = v;
                any_b = true;
            }
        }
        if (!any_a) da[0] = 1, db[0] = 0;
        if (!any_b && n > 1) db[(size_t)(n - 1)] = 1, da[(size_t)(n - 1)] = 0;
        auto pa = psi.diag(g, da), pb = psi.diag(g, db);
        if (!gf_equal(convolve(pa, pb), zero) || !gf_equal(convolve(pb, pa), zero))
            fail("orthogonality fails on trial " + std::to_string(t));
        ++rep.orth_trials;
    }
    return rep;
}

DefectReport defect_support(const TransformationGroupoid& g, const NestingSystem& ns,
                            const std::vector<Rat>& kappa, const CylinderMeasure& mu,
                            const ClopenSet& remainder) {
    ClopenSet ones = ClopenSet::empty(g.alphabet());
    for (size_t h = 0; h < ns.H0.size(); ++h) {
        if (kappa[h] != 1) continue;
        for (size_t l = 0; l < ns.inner->ms.size(); ++l)
            for (auto& block : ns.blocks[h][l])
                for (int row : block) ones = unite(ones, ns.inner->ms[l].level(row));
    }
    DefectReport rep;
    rep.support = complement(ones);
    rep.measure = evaluate(mu, rep.support);
    rep.bound = evaluate(mu, remainder) + Rat(1) / Rat(ns.N);
    rep.within = rep.measure <= rep.bound;
    return rep;
}

CommutatorReport commutator_norm(const TransformationGroupoid& g, const NestingSystem& ns,
                                 const std::vector<Rat>& kappa, int i, int j,
                                 const GroupoidFunction& f) {
    if (f.terms().empty()) throw std::invalid_argument("empty test function");
    const Word& fw = f.terms().front().w;
    ClopenSet fdom = ClopenSet::empty(g.alphabet());
    for (auto& t : f.terms()) {
        if (t.w.key() != fw.key())
            throw std::invalid_argument("test function is not supported on one bisection");
        fdom = unite(fdom, ClopenSet::cylinder(g.alphabet(), t.cyl));
    }
    // dichotomy and coherent routing of the selected levels, in both the
    // forward direction (for f * psi) and the backward one (for psi * f);
    // incoherently routed levels must carry zero weight
    ClopenSet frng = g.apply_word(fw, fdom);
    Bisection Of{fw, fdom}, Oinv{fw.inverse(), frng};
    std::vector<int> sigma(ns.H0.size(), -1);
    for (size_t h = 0; h < ns.H0.size(); ++h) {
        const ClopenSet& D = ns.outer->ms[(size_t)ns.H0[h].ms].level(ns.H0[h].row);
        for (const Bisection* O : {(const Bisection*)&Of, (const Bisection*)&Oinv}) {
            if (disjoint(D, O->dom)) continue;
            if (!subset(D, O->dom))
                throw std::invalid_argument("level " + level_name(D) +
                                            " straddles the support of the test function");
            int h2 = coherent_target(g, *ns.outer, ns.H0, h, *O);
            if (h2 < 0) {
                if (kappa[h] != 0)
                    throw std::invalid_argument("level " + level_name(D) +
                                                " leaves the selection with nonzero weight");
            } else if (O == &Of) {
                sigma[h] = h2;
            }
        }
    }
    auto psi = build_psi(g, ns, kappa);
    CommutatorReport rep;
    rep.max_term = 0;
    rep.jump_bound = 0;
    GroupoidFunction sum = GroupoidFunction::zero(g);
    for (size_t h = 0; h < ns.H0.size(); ++h) {
        if (sigma[h] < 0) continue;
        Rat jump = kappa[h] - kappa[(size_t)sigma[h]];
        if (jump < 0) jump = -jump;
        if (jump > rep.jump_bound) rep.jump_bound = jump;
        for (size_t l = 0; l < ns.inner->ms.size(); ++l) {
            const auto& bl = ns.blocks[h][l];
            if (bl.empty()) continue;
            const auto& im = ns.inner->ms[l];
            for (size_t a = 0; a < bl[(size_t)i].size(); ++a) {
                Bisection B = im.at(g, bl[(size_t)i][a], bl[(size_t)j][a]);
                int rs = find_row(im, g.apply_word(fw, B.dom));
                int rr = find_row(im, g.apply_word(fw, g.apply_word(B.w, B.dom)));
                if (rs < 0 || rr < 0)
                    throw std::invalid_argument(
                        "routed ladder endpoint is not an inner level");
                Bisection TB = im.at(g, rr, rs);
                auto term = sub(convolve(f, GroupoidFunction::indicator(g, B))
                                    .scaled(kappa[h]),
                                convolve(GroupoidFunction::indicator(g, TB), f)
                                    .scaled(kappa[(size_t)sigma[h]]));
                ++rep.terms;
                if (!term.is_zero()) {
                    Rat tn = reduced_norm(term);
                    if (tn > rep.max_term) rep.max_term = tn;
                }
                sum = add(sum, term);
            }
        }
    }
    rep.jump_bound *= f.sup_abs();
    auto direct = sub(convolve(f, psi.image(i, j)), convolve(psi.image(i, j), f));
    rep.recomposes = gf_equal(sum, direct);
    rep.norm = direct.is_zero() ? Rat(0) : reduced_norm(direct);
    return rep;
}

std::optional<std::string> dominating_clopen(const GroupoidFunction& a,
                                             const Rat& threshold) {
    for (auto& t : a.terms()) {
        if (!t.w.is_identity())
            throw std::invalid_argument("not a unit-space function");
        if (t.val >= threshold) return t.cyl;
    }
    return std::nullopt;
}

PipelineReport pipeline_odometer_demo(int n, int m, int matrix_n, long long N, int trials,
                                      unsigned seed) {
    if (n < 1 || m < 1 || matrix_n < 1 || N < 1)
        throw std::invalid_argument("all pipeline parameters must be positive");
    if ((1LL << m) < (long long)matrix_n * N)
        throw std::invalid_argument("nesting multiplicity " + std::to_string(1LL << m) +
                                    " is below the required " +
                                    std::to_string((long long)matrix_n * N));
    PipelineReport rep;
    rep.n = n;
    rep.m = m;
    rep.matrix_n = matrix_n;
    rep.N = N;
    auto g = TransformationGroupoid::binary_odometer(std::max(10, n + m + 2));
    auto full = ClopenSet::full(g.alphabet());
    KSpec K{{Bisection{Word::gen(0, 1), full}, Bisection{Word::gen(0, -1), full}}};
    auto mu = *invariant_measure_feasibility(
                   TransformationGroupoid::binary_odometer(n + m), n + m)
                   .unique;

    Rat ratio = Rat(2) / Rat(1LL << n);
    Rat eps = ratio < Rat(1) / 4 ? Rat(1) / 4 : ratio;
    auto conv = convert_af_to_almost_elementary(g, odometer_castle(g, n), K, eps, &mu);
    rep.conversion_ratio = conv.matui_ratio;
    rep.w_measure = conv.w_measure.value();
    rep.remainder_measure = evaluate(mu, conv.remainder);

    auto inner = odometer_castle(g, n + m);
    auto outer = odometer_castle(g, n);
    auto nest = check_nesting(g, inner, outer);
    if (!nest.ok) throw std::invalid_argument("nesting failed: " + nest.failure);
    rep.nest_multiplicity = nest.multiplicity;

    std::vector<LevelRef> H0;
    for (int t = 0; t < outer.ms[0].size(); ++t) H0.push_back({0, t});
    auto ns = build_nesting_system(g, inner, outer, H0, matrix_n, N);
    rep.family = build_compatible_family(g, inner);

    GroupoidFunction f =
        GroupoidFunction::indicator(g, Bisection{Word::gen(0, 1), full});
    auto strata = kappa_stratification(g, outer, ns.H0, {LevelRef{0, 0}},
                                       KSpec{{Bisection{Word::gen(0, 1), full}}}, N);
    rep.oz = verify_order_zero(g, ns, strata.kappa, trials, seed);

    std::vector<Rat> ones(ns.H0.size(), Rat(1));
    rep.defect = defect_support(g, ns, ones, mu, conv.remainder);

    rep.commutator_max = 0;
    rep.max_kappa_jump = 0;
    bool recomposed = true;
    for (int i = 0; i < matrix_n; ++i)
        for (int j = 0; j < matrix_n; ++j) {
            auto cr = commutator_norm(g, ns, strata.kappa, i, j, f);
            if (cr.norm > rep.commutator_max) rep.commutator_max = cr.norm;
            if (cr.jump_bound > rep.max_kappa_jump) rep.max_kappa_jump = cr.jump_bound;
            recomposed = recomposed && cr.recomposes;
        }
    rep.pass = rep.family.pass && rep.oz.pass && rep.defect.within && recomposed &&
               rep.commutator_max <= rep.max_kappa_jump;
    return rep;
}

}  // namespace ample

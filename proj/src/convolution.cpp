#include "ample/convolution.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace ample {

GroupoidFunction::GroupoidFunction(const TransformationGroupoid* g, std::vector<GFTerm> terms)
    : g_(g), terms_(std::move(terms)) {
    normalize();
}

GroupoidFunction GroupoidFunction::zero(const TransformationGroupoid& g) {
    return GroupoidFunction(&g, {});
}

GroupoidFunction GroupoidFunction::indicator(const TransformationGroupoid& g,
                                             const Bisection& b, const Rat& value) {
    std::vector<GFTerm> ts;
    for (auto& w : b.dom.words()) ts.push_back({b.w, w, value});
    return GroupoidFunction(&g, std::move(ts));
}

GroupoidFunction GroupoidFunction::scaled(const Rat& c) const {
    std::vector<GFTerm> ts = terms_;
    for (auto& t : ts) t.val *= c;
    return GroupoidFunction(g_, std::move(ts));
}

GroupoidFunction GroupoidFunction::adjoint() const {
    std::vector<GFTerm> ts;
    for (auto& t : terms_) {
        ClopenSet img =
            g_->apply_word(t.w, ClopenSet::cylinder(g_->alphabet(), t.cyl));
        for (auto& w : img.words()) ts.push_back({t.w.inverse(), w, t.val});
    }
    return GroupoidFunction(g_, std::move(ts));
}

Rat GroupoidFunction::sup_abs() const {
    Rat m = 0;
    for (auto& t : terms_) {
        Rat a = t.val < 0 ? -t.val : t.val;
        if (a > m) m = a;
    }
    return m;
}

Rat GroupoidFunction::value_at(const Word& w, const Point& u) const {
    Rat v = 0;
    for (auto& t : terms_)
        if (t.w == w && member(u, ClopenSet::cylinder(g_->alphabet(), t.cyl))) v += t.val;
    return v;
}

void GroupoidFunction::normalize(int min_depth) {
    int d = min_depth;
    for (auto& t : terms_) d = std::max(d, (int)t.cyl.size());
    std::map<std::pair<std::string, std::string>, Rat> acc;  // (word key, cylinder)
    std::map<std::string, Word> words;
    for (auto& t : terms_) {
        std::string wk = t.w.key();
        words.emplace(wk, t.w);
        ClopenSet r = ClopenSet::cylinder(g_->alphabet(), t.cyl).refined(d);
        for (auto& c : r.words()) acc[{wk, c}] += t.val;
    }
    terms_.clear();
    for (auto& [k, v] : acc)
        if (v != 0) terms_.push_back({words.at(k.first), k.second, v});
}

std::string GroupoidFunction::str() const {
    if (terms_.empty()) return "0";
    auto names = g_->generator_names();
    std::string out;
    for (size_t i = 0; i < terms_.size(); ++i) {
        if (i) out += " + ";
        out += rat_str(terms_[i].val) + "*[" + terms_[i].w.str(names) + "," +
               terms_[i].cyl + "]";
    }
    return out;
}

static void check_compatible(const GroupoidFunction& f, const GroupoidFunction& g) {
    if (f.groupoid() != g.groupoid() || !f.groupoid())
        throw std::invalid_argument("functions over different groupoids");
}

GroupoidFunction add(const GroupoidFunction& f, const GroupoidFunction& g) {
    check_compatible(f, g);
    std::vector<GFTerm> ts = f.terms();
    ts.insert(ts.end(), g.terms().begin(), g.terms().end());
    return GroupoidFunction(f.groupoid(), std::move(ts));
}

GroupoidFunction sub(const GroupoidFunction& f, const GroupoidFunction& g) {
    return add(f, g.scaled(-1));
}

GroupoidFunction convolve(const GroupoidFunction& f, const GroupoidFunction& g) {
    check_compatible(f, g);
    const auto& G = *f.groupoid();
    std::vector<GFTerm> out;
    for (auto& tf : f.terms()) {
        ClopenSet fdom = ClopenSet::cylinder(G.alphabet(), tf.cyl);
        for (auto& tg : g.terms()) {
            // support of the product term: arrows γ = αβ with β in (w_g, c_g)
            // and α in (w_f, c_f); source set = c_g ∩ w_g^{-1}(c_f)
            ClopenSet gdom = ClopenSet::cylinder(G.alphabet(), tg.cyl);
            ClopenSet mid = intersect(G.apply_word(tg.w, gdom), fdom);
            if (mid.is_empty()) continue;
            ClopenSet dom = G.apply_word(tg.w.inverse(), mid);
            Word w = tf.w * tg.w;
            for (auto& c : dom.words()) out.push_back({w, c, tf.val * tg.val});
        }
    }
    return GroupoidFunction(f.groupoid(), std::move(out));
}

bool gf_equal(const GroupoidFunction& f, const GroupoidFunction& g) {
    check_compatible(f, g);
    GroupoidFunction a = f, b = g;
    int d = 0;
    for (auto& t : a.terms()) d = std::max(d, (int)t.cyl.size());
    for (auto& t : b.terms()) d = std::max(d, (int)t.cyl.size());
    a.normalize(d);
    b.normalize(d);
    if (a.terms().size() != b.terms().size()) return false;
    for (size_t i = 0; i < a.terms().size(); ++i) {
        const auto& x = a.terms()[i];
        const auto& y = b.terms()[i];
        if (x.w != y.w || x.cyl != y.cyl || x.val != y.val) return false;
    }
    return true;
}

Rat reduced_norm(const GroupoidFunction& f) {
    if (f.is_zero()) return 0;
    const auto& G = *f.groupoid();
    // group terms by word: one group = one bisection with locally constant
    // coefficient, whose norm is its sup
    std::map<std::string, std::pair<ClopenSet, Rat>> groups;  // word key -> (domain, sup)
    std::map<std::string, Word> words;
    for (auto& t : f.terms()) {
        std::string wk = t.w.key();
        words.emplace(wk, t.w);
        ClopenSet c = ClopenSet::cylinder(G.alphabet(), t.cyl);
        Rat a = t.val < 0 ? -t.val : t.val;
        auto it = groups.find(wk);
        if (it == groups.end())
            groups.emplace(wk, std::make_pair(c, a));
        else {
            it->second.first = unite(it->second.first, c);
            if (a > it->second.second) it->second.second = a;
        }
    }
    // pairwise disjointness of sources and of ranges between groups
    std::vector<std::pair<ClopenSet, ClopenSet>> supports;
    Rat norm = 0;
    for (auto& [wk, dv] : groups) {
        ClopenSet rng = G.apply_word(words.at(wk), dv.first);
        for (auto& s : supports)
            if (!disjoint(s.first, dv.first) || !disjoint(s.second, rng))
                throw std::runtime_error(
                    "norm not computable by disjoint-support rule: overlapping "
                    "bisection supports");
        supports.push_back({dv.first, rng});
        if (dv.second > norm) norm = dv.second;
    }
    return norm;
}

}  // namespace ample

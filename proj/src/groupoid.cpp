#include "ample/groupoid.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <stdexcept>

namespace ample {

Word Word::gen(int g, long long e) {
    Word w;
    if (e != 0) w.syl.push_back({g, e});
    return w;
}

Word Word::operator*(const Word& o) const {
    Word out = *this;
    for (auto& s : o.syl) {
        if (!out.syl.empty() && out.syl.back().first == s.first) {
            out.syl.back().second += s.second;
            if (out.syl.back().second == 0) out.syl.pop_back();
        } else {
            out.syl.push_back(s);
        }
    }
    return out;
}

Word Word::inverse() const {
    Word out;
    for (auto it = syl.rbegin(); it != syl.rend(); ++it)
        out.syl.push_back({it->first, -it->second});
    return out;
}

long long Word::length() const {
    long long n = 0;
    for (auto& s : syl) n += s.second < 0 ? -s.second : s.second;
    return n;
}

Rat Word::weighted_length(const std::vector<Rat>& gen_weights) const {
    Rat n = 0;
    for (auto& s : syl) n += gen_weights[s.first] * Rat(s.second < 0 ? -s.second : s.second);
    return n;
}

std::string Word::str(const std::vector<std::string>& gen_names) const {
    if (syl.empty()) return "id";
    std::string out;
    for (size_t i = 0; i < syl.size(); ++i) {
        if (i) out += ".";
        out += gen_names[syl[i].first];
        if (syl[i].second != 1) out += "^" + std::to_string(syl[i].second);
    }
    return out;
}

std::string Word::key() const {
    if (syl.empty()) return "id";
    std::string out;
    for (auto& s : syl)
        out += "g" + std::to_string(s.first) + "^" + std::to_string(s.second) + ".";
    return out;
}

struct TransformationGroupoid::Cache {
    std::mutex mu;
    // (signed_gen, depth) -> table
    std::map<std::pair<int, int>, std::vector<long long>> gen_tables;
    // (gen, exp, depth) -> table for gen^exp
    std::map<std::tuple<int, long long, int>, std::vector<long long>> power_tables;
};

TransformationGroupoid::TransformationGroupoid(Alphabet alphabet,
                                               std::vector<GeneratorAction> generators)
    : alpha_(std::move(alphabet)), gens_(std::move(generators)),
      cache_(std::make_shared<Cache>()) {
    for (auto& g : gens_)
        for (auto& r : g.rules)
            max_rule_depth_ = std::max(max_rule_depth_, (int)r.first.size());
    validate();
}

void TransformationGroupoid::validate() const {
    std::set<std::string> names;  // empty generator list = units-only groupoid
    for (auto& g : gens_) {
        if (!names.insert(g.name).second)
            throw std::invalid_argument("duplicate generator name " + g.name);
        if (g.rules.empty()) throw std::invalid_argument("generator " + g.name + " has no rules");
        std::vector<ClopenSet> srcs, tgts;
        for (auto& r : g.rules) {
            if (r.first.size() != r.second.size())
                throw std::invalid_argument("rule " + r.first + "->" + r.second +
                                            " changes depth");
            if (!alpha_.valid_word(r.first) || !alpha_.valid_word(r.second))
                throw std::invalid_argument("rule uses foreign symbols");
            srcs.push_back(ClopenSet::cylinder(alpha_, r.first));
            tgts.push_back(ClopenSet::cylinder(alpha_, r.second));
        }
        for (size_t i = 0; i < srcs.size(); ++i)
            for (size_t j = i + 1; j < srcs.size(); ++j) {
                if (!disjoint(srcs[i], srcs[j]))
                    throw std::invalid_argument("overlapping rule sources in " + g.name);
                if (!disjoint(tgts[i], tgts[j]))
                    throw std::invalid_argument("overlapping rule targets in " + g.name);
            }
        // coverage at the deepest rule depth: every uncovered cylinder must
        // contain an exceptional source point (and dually for targets)
        int d = 0;
        for (auto& r : g.rules) d = std::max(d, (int)r.first.size());
        ClopenSet src_union = ClopenSet::empty(alpha_, d), tgt_union = src_union;
        for (size_t i = 0; i < srcs.size(); ++i) {
            src_union = unite(src_union, srcs[i]);
            tgt_union = unite(tgt_union, tgts[i]);
        }
        ClopenSet src_holes = complement(src_union);
        for (auto& w : src_holes.words()) {
            bool hit = false;
            for (auto& e : g.exceptions)
                if (member(e.first, ClopenSet::cylinder(alpha_, w))) hit = true;
            if (!hit)
                throw std::invalid_argument("generator " + g.name + " undefined on [" + w +
                                            "] and no exceptional point covers it");
        }
        ClopenSet tgt_holes = complement(tgt_union);
        for (auto& w : tgt_holes.words()) {
            bool hit = false;
            for (auto& e : g.exceptions)
                if (member(e.second, ClopenSet::cylinder(alpha_, w))) hit = true;
            if (!hit)
                throw std::invalid_argument("generator " + g.name + " misses [" + w +
                                            "] and no exceptional point lands there");
        }
        // exceptional sources must not sit inside a rule source (rules win)
        for (auto& e : g.exceptions)
            for (auto& r : g.rules)
                if (member(e.first, ClopenSet::cylinder(alpha_, r.first)))
                    throw std::invalid_argument("exceptional point of " + g.name +
                                                " inside rule source " + r.first);
    }
}

TransformationGroupoid TransformationGroupoid::binary_odometer(int rule_depth) {
    if (rule_depth < 1) throw std::invalid_argument("rule_depth must be >= 1");
    GeneratorAction T;
    T.name = "T";
    // add-one with carry: 0 -> 1, 10 -> 01, 110 -> 011, ...
    for (int k = 0; k < rule_depth; ++k) {
        std::string u(k, '1'), v(k, '0');
        T.rules.push_back({u + "0", v + "1"});
    }
    T.exceptions.push_back({Point("", "1"), Point("", "0")});
    return TransformationGroupoid(Alphabet("01"), {T});
}

std::vector<std::string> TransformationGroupoid::generator_names() const {
    std::vector<std::string> out;
    for (auto& g : gens_) out.push_back(g.name);
    return out;
}

int TransformationGroupoid::generator_index(const std::string& name) const {
    for (size_t i = 0; i < gens_.size(); ++i)
        if (gens_[i].name == name) return (int)i;
    return -1;
}

Point TransformationGroupoid::apply_gen(int signed_gen, const Point& p) const {
    int gi = (signed_gen > 0 ? signed_gen : -signed_gen) - 1;
    bool fwd = signed_gen > 0;
    const auto& g = gens_.at(gi);
    for (auto& r : g.rules) {
        const std::string& u = fwd ? r.first : r.second;
        const std::string& v = fwd ? r.second : r.first;
        if (p.prefix(u.size()) == u) {
            Point rest = p.dropped(u.size());
            return Point(v + rest.pre, rest.per);
        }
    }
    for (auto& e : g.exceptions) {
        if (fwd && p == e.first) return e.second;
        if (!fwd && p == e.second) return e.first;
    }
    throw std::runtime_error("generator " + g.name + (fwd ? "" : "^-1") +
                             " undefined at point " + p.str() +
                             " (rule depth insufficient)");
}

Point TransformationGroupoid::apply(const Word& w, const Point& p) const {
    Point q = p;
    for (auto it = w.syl.rbegin(); it != w.syl.rend(); ++it) {
        long long e = it->second;
        int step = e > 0 ? it->first + 1 : -(it->first + 1);
        for (long long k = 0; k < (e > 0 ? e : -e); ++k) q = apply_gen(step, q);
    }
    return q;
}

std::vector<long long> TransformationGroupoid::build_gen_table(int signed_gen,
                                                               int depth) const {
    int gi = (signed_gen > 0 ? signed_gen : -signed_gen) - 1;
    bool fwd = signed_gen > 0;
    const auto& g = gens_.at(gi);
    long long n = num_words(alpha_, depth);
    std::vector<long long> table(n, -1);
    std::vector<char> used(n, 0);
    long long undecided = n;
    for (long long i = 0; i < n; ++i) {
        std::string c = index_word(alpha_, depth, i);
        for (auto& r : g.rules) {
            const std::string& u = fwd ? r.first : r.second;
            const std::string& v = fwd ? r.second : r.first;
            if ((int)u.size() <= depth && c.compare(0, u.size(), u) == 0) {
                long long img = word_index(alpha_, v + c.substr(u.size()));
                table[i] = img;
                used[img] = 1;
                --undecided;
                break;
            }
        }
    }
    // Bijectivity completion: a single undetermined cylinder must map onto the
    // single unhit cylinder (the map is a bijection of the whole space).
    if (undecided == 1) {
        long long src = -1, tgt = -1;
        long long unhit = 0;
        for (long long i = 0; i < n; ++i) {
            if (table[i] < 0) src = i;
            if (!used[i]) {
                ++unhit;
                tgt = i;
            }
        }
        if (unhit == 1) table[src] = tgt;
    }
    return table;
}

const std::vector<long long>& TransformationGroupoid::gen_table(int signed_gen,
                                                                int depth) const {
    std::lock_guard<std::mutex> lk(cache_->mu);
    auto key = std::make_pair(signed_gen, depth);
    auto it = cache_->gen_tables.find(key);
    if (it != cache_->gen_tables.end()) return it->second;
    auto table = build_gen_table(signed_gen, depth);
    return cache_->gen_tables.emplace(key, std::move(table)).first->second;
}

const std::vector<long long>& TransformationGroupoid::power_table(int gen, long long exp,
                                                                  int depth) const {
    if (exp == 0) throw std::invalid_argument("power_table needs nonzero exponent");
    {
        std::lock_guard<std::mutex> lk(cache_->mu);
        auto it = cache_->power_tables.find({gen, exp, depth});
        if (it != cache_->power_tables.end()) return it->second;
    }
    long long a = exp > 0 ? exp : -exp;
    int sg = exp > 0 ? gen : -gen;
    const auto& base = gen_table(sg, depth);
    std::vector<long long> cur = base;
    for (long long k = 2; k <= a; ++k) {
        long long e = exp > 0 ? k : -k;
        {
            std::lock_guard<std::mutex> lk(cache_->mu);
            auto it = cache_->power_tables.find({gen, e, depth});
            if (it != cache_->power_tables.end()) {
                cur = it->second;
                continue;
            }
        }
        std::vector<long long> next(cur.size(), -1);
        for (size_t i = 0; i < cur.size(); ++i)
            if (cur[i] >= 0 && base[cur[i]] >= 0) next[i] = base[cur[i]];
        cur = std::move(next);
        std::lock_guard<std::mutex> lk(cache_->mu);
        cache_->power_tables.emplace(std::make_tuple(gen, e, depth), cur);
    }
    std::lock_guard<std::mutex> lk(cache_->mu);
    return cache_->power_tables.emplace(std::make_tuple(gen, exp, depth), std::move(cur))
        .first->second;
}

ClopenSet TransformationGroupoid::apply_clopen(int signed_gen, const ClopenSet& s) const {
    if (s.is_empty()) return s;
    int cap = std::max(max_rule_depth_, s.depth()) + 2;
    for (int d = std::max(1, s.depth()); d <= cap; ++d) {
        ClopenSet r = s.refined(d);
        const auto& table = gen_table(signed_gen, d);
        std::vector<std::string> out;
        bool ok = true;
        for (auto& w : r.words()) {
            long long img = table[word_index(alpha_, w)];
            if (img < 0) {
                ok = false;
                break;
            }
            out.push_back(index_word(alpha_, d, img));
        }
        if (ok) return ClopenSet(alpha_, d, std::move(out));
        // complement fallback: image(S) = X \ image(X \ S)
        ClopenSet comp = complement(r);
        std::vector<char> hit(num_words(alpha_, d), 0);
        bool cok = true;
        for (auto& w : comp.words()) {
            long long img = table[word_index(alpha_, w)];
            if (img < 0) {
                cok = false;
                break;
            }
            hit[img] = 1;
        }
        if (cok) {
            std::vector<std::string> outc;
            for (long long i = 0; i < (long long)hit.size(); ++i)
                if (!hit[i]) outc.push_back(index_word(alpha_, d, i));
            return ClopenSet(alpha_, d, std::move(outc));
        }
    }
    throw std::runtime_error("cannot compute exact clopen image (rule depth insufficient)");
}

ClopenSet TransformationGroupoid::apply_word(const Word& w, const ClopenSet& s) const {
    ClopenSet cur = s;
    for (auto it = w.syl.rbegin(); it != w.syl.rend(); ++it) {
        long long e = it->second;
        int step = e > 0 ? it->first + 1 : -(it->first + 1);
        long long a = e > 0 ? e : -e;
        // try to do the whole syllable with one cached power table
        if (!cur.is_empty() && a > 1) {
            int d = std::max(1, cur.depth());
            const auto& table = power_table(it->first + 1, e, d);
            ClopenSet r = cur.refined(d);
            std::vector<std::string> out;
            bool ok = true;
            for (auto& ww : r.words()) {
                long long img = table[word_index(alpha_, ww)];
                if (img < 0) {
                    ok = false;
                    break;
                }
                out.push_back(index_word(alpha_, d, img));
            }
            if (ok) {
                cur = ClopenSet(alpha_, d, std::move(out));
                continue;
            }
        }
        for (long long k = 0; k < a; ++k) cur = apply_clopen(step, cur);
    }
    return cur;
}

std::optional<long long> TransformationGroupoid::apply_word_cyl(const Word& w, int depth,
                                                                long long idx) const {
    long long cur = idx;
    for (auto it = w.syl.rbegin(); it != w.syl.rend(); ++it) {
        const auto& table = power_table(it->first + 1, it->second, depth);
        cur = table[cur];
        if (cur < 0) return std::nullopt;
    }
    return cur;
}

Word TransformationGroupoid::parse_word(const std::string& s) const {
    if (s == "id" || s.empty()) return Word::identity();
    Word out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t dot = s.find('.', pos);
        std::string tok = s.substr(pos, dot == std::string::npos ? std::string::npos
                                                                 : dot - pos);
        pos = dot == std::string::npos ? s.size() : dot + 1;
        long long e = 1;
        std::string name = tok;
        auto caret = tok.find('^');
        if (caret != std::string::npos) {
            name = tok.substr(0, caret);
            e = std::stoll(tok.substr(caret + 1));
        }
        int gi = generator_index(name);
        if (gi < 0) throw std::invalid_argument("unknown generator '" + name + "'");
        out = out * Word::gen(gi, e);
    }
    return out;
}

Bisection bisection_product(const TransformationGroupoid& g, const Bisection& U,
                            const Bisection& V) {
    if (U.is_empty() || V.is_empty())
        return Bisection{Word::identity(), ClopenSet::empty(g.alphabet())};
    ClopenSet mid = intersect(V.range(g), U.dom);
    if (mid.is_empty()) return Bisection{Word::identity(), ClopenSet::empty(g.alphabet())};
    ClopenSet dom = g.apply_word(V.w.inverse(), mid);
    return Bisection{U.w * V.w, std::move(dom)};
}

bool bisection_equal(const TransformationGroupoid& g, const Bisection& U,
                     const Bisection& V) {
    if (U.is_empty() && V.is_empty()) return true;
    return U.w == V.w && equal(U.dom, V.dom);
}

std::vector<TArrow> fiber(const TransformationGroupoid& g, const Point& u,
                          long long max_len) {
    // enumerate freely reduced words of length <= max_len
    std::vector<Word> cur = {Word::identity()};
    std::vector<TArrow> out = {{Word::identity(), u}};
    for (long long l = 1; l <= max_len; ++l) {
        std::vector<Word> next;
        for (auto& w : cur) {
            for (int gi = 0; gi < g.num_generators(); ++gi) {
                for (int sgn : {1, -1}) {
                    Word cand = Word::gen(gi, sgn) * w;
                    if (cand.length() != l) continue;  // cancelled
                    next.push_back(cand);
                    out.push_back({cand, u});
                }
            }
        }
        cur = std::move(next);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace ample

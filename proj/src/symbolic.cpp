#include "ample/symbolic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ample {

Alphabet::Alphabet(std::string syms) : symbols(std::move(syms)) {
    if (symbols.empty()) throw std::invalid_argument("alphabet empty");
    std::set<char> seen(symbols.begin(), symbols.end());
    if (seen.size() != symbols.size())
        throw std::invalid_argument("alphabet has repeated symbols");
}

int Alphabet::index(char c) const {
    auto pos = symbols.find(c);
    return pos == std::string::npos ? -1 : (int)pos;
}

bool Alphabet::valid_word(const std::string& w) const {
    for (char c : w)
        if (!contains(c)) return false;
    return true;
}

ClopenSet::ClopenSet(Alphabet a, int depth, std::vector<std::string> words)
    : alpha_(std::move(a)), depth_(depth), words_(std::move(words)) {
    if (depth_ < 0) throw std::invalid_argument("negative depth");
    for (auto& w : words_) {
        if ((int)w.size() != depth_)
            throw std::invalid_argument("cylinder '" + w + "' not at depth " +
                                        std::to_string(depth_));
        if (!alpha_.valid_word(w))
            throw std::invalid_argument("cylinder '" + w + "' uses foreign symbols");
    }
    std::sort(words_.begin(), words_.end());
    words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
}

ClopenSet ClopenSet::empty(const Alphabet& a, int depth) {
    return ClopenSet(a, depth, {});
}

ClopenSet ClopenSet::full(const Alphabet& a, int depth) {
    std::vector<std::string> ws = {""};
    for (int i = 0; i < depth; ++i) {
        std::vector<std::string> next;
        next.reserve(ws.size() * a.size());
        for (auto& w : ws)
            for (char c : a.symbols) next.push_back(w + c);
        ws = std::move(next);
    }
    return ClopenSet(a, depth, std::move(ws));
}

ClopenSet ClopenSet::cylinder(const Alphabet& a, const std::string& word) {
    return ClopenSet(a, (int)word.size(), {word});
}

bool ClopenSet::is_full() const {
    return (long long)words_.size() == num_words(alpha_, depth_);
}

ClopenSet ClopenSet::refined(int d) const {
    if (d < depth_) throw std::invalid_argument("cannot coarsen a clopen set");
    if (d == depth_) return *this;
    std::vector<std::string> ws = words_;
    for (int k = depth_; k < d; ++k) {
        std::vector<std::string> next;
        next.reserve(ws.size() * alpha_.size());
        for (auto& w : ws)
            for (char c : alpha_.symbols) next.push_back(w + c);
        ws = std::move(next);
    }
    return ClopenSet(alpha_, d, std::move(ws));
}

bool ClopenSet::contains_word(const std::string& w) const {
    if ((int)w.size() < depth_) throw std::invalid_argument("word shallower than set depth");
    std::string p = w.substr(0, depth_);
    return std::binary_search(words_.begin(), words_.end(), p);
}

std::string ClopenSet::str() const {
    if (words_.empty()) return "(empty)";
    if (depth_ == 0) return "(full)";
    std::string out;
    for (size_t i = 0; i < words_.size(); ++i) {
        if (i) out += ",";
        out += words_[i];
    }
    return out;
}

static void check_same_alphabet(const ClopenSet& a, const ClopenSet& b) {
    if (a.alphabet() != b.alphabet())
        throw std::invalid_argument("alphabet mismatch in clopen set operation");
}

ClopenSet unite(const ClopenSet& a, const ClopenSet& b) {
    check_same_alphabet(a, b);
    int d = std::max(a.depth(), b.depth());
    ClopenSet ra = a.refined(d), rb = b.refined(d);
    std::vector<std::string> out;
    std::set_union(ra.words().begin(), ra.words().end(), rb.words().begin(),
                   rb.words().end(), std::back_inserter(out));
    return ClopenSet(a.alphabet(), d, std::move(out));
}

ClopenSet intersect(const ClopenSet& a, const ClopenSet& b) {
    check_same_alphabet(a, b);
    int d = std::max(a.depth(), b.depth());
    ClopenSet ra = a.refined(d), rb = b.refined(d);
    std::vector<std::string> out;
    std::set_intersection(ra.words().begin(), ra.words().end(), rb.words().begin(),
                          rb.words().end(), std::back_inserter(out));
    return ClopenSet(a.alphabet(), d, std::move(out));
}

ClopenSet difference(const ClopenSet& a, const ClopenSet& b) {
    check_same_alphabet(a, b);
    int d = std::max(a.depth(), b.depth());
    ClopenSet ra = a.refined(d), rb = b.refined(d);
    std::vector<std::string> out;
    std::set_difference(ra.words().begin(), ra.words().end(), rb.words().begin(),
                        rb.words().end(), std::back_inserter(out));
    return ClopenSet(a.alphabet(), d, std::move(out));
}

ClopenSet complement(const ClopenSet& a) {
    return difference(ClopenSet::full(a.alphabet(), a.depth()), a);
}

bool subset(const ClopenSet& a, const ClopenSet& b) {
    return difference(a, b).is_empty();
}

bool disjoint(const ClopenSet& a, const ClopenSet& b) {
    return intersect(a, b).is_empty();
}

bool equal(const ClopenSet& a, const ClopenSet& b) {
    check_same_alphabet(a, b);
    int d = std::max(a.depth(), b.depth());
    return a.refined(d).words() == b.refined(d).words();
}

Point::Point(std::string preperiod, std::string period)
    : pre(std::move(preperiod)), per(std::move(period)) {
    if (per.empty()) throw std::invalid_argument("point period must be nonempty");
    // primitive period
    for (size_t p = 1; p < per.size(); ++p) {
        if (per.size() % p) continue;
        bool ok = true;
        for (size_t i = p; i < per.size() && ok; ++i) ok = per[i] == per[i - p];
        if (ok) {
            per = per.substr(0, p);
            break;
        }
    }
    // absorb trailing preperiod symbols that already match the cycle
    while (!pre.empty() && pre.back() == per.back()) {
        pre.pop_back();
        per = per.back() + per.substr(0, per.size() - 1);
    }
}

char Point::at(size_t i) const {
    if (i < pre.size()) return pre[i];
    return per[(i - pre.size()) % per.size()];
}

std::string Point::prefix(size_t n) const {
    std::string out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out += at(i);
    return out;
}

Point Point::dropped(size_t k) const {
    std::string npre = pre;
    std::string nper = per;
    size_t drop = std::min(k, npre.size());
    npre = npre.substr(drop);
    k -= drop;
    k %= nper.size();
    nper = nper.substr(k) + nper.substr(0, k);
    return Point(npre, nper);
}

std::string Point::str() const { return pre + "/" + per; }

Point Point::parse(const std::string& s, const Alphabet& a) {
    auto slash = s.find('/');
    if (slash == std::string::npos)
        throw std::invalid_argument("point must be PRE/PERIOD: '" + s + "'");
    std::string pre = s.substr(0, slash), per = s.substr(slash + 1);
    if (!a.valid_word(pre) || !a.valid_word(per) || per.empty())
        throw std::invalid_argument("bad point '" + s + "' over alphabet " + a.symbols);
    return Point(pre, per);
}

bool member(const Point& p, const ClopenSet& s) {
    if (s.is_empty()) return false;
    return s.contains_word(p.prefix(s.depth()));
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> names_,
                                     std::vector<std::vector<Rat>> dist_)
    : names(std::move(names_)), dist(std::move(dist_)) {
    int n = (int)names.size();
    if ((int)dist.size() != n) throw std::invalid_argument("distance matrix size mismatch");
    for (auto& row : dist)
        if ((int)row.size() != n) throw std::invalid_argument("distance matrix not square");
    for (int i = 0; i < n; ++i) {
        if (dist[i][i] != 0) throw std::invalid_argument("nonzero diagonal distance");
        for (int j = 0; j < n; ++j) {
            if (dist[i][j] != dist[j][i]) throw std::invalid_argument("asymmetric distance");
            if (i != j && dist[i][j] <= 0)
                throw std::invalid_argument("non-positive off-diagonal distance");
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (dist[i][k] > dist[i][j] + dist[j][k])
                    throw std::invalid_argument(
                        "triangle inequality fails at (" + names[i] + "," + names[j] + "," +
                        names[k] + ")");
}

long long word_index(const Alphabet& a, const std::string& w) {
    long long idx = 0;
    for (char c : w) {
        int s = a.index(c);
        if (s < 0) throw std::invalid_argument("foreign symbol in word");
        idx = idx * a.size() + s;
    }
    return idx;
}

std::string index_word(const Alphabet& a, int depth, long long idx) {
    std::string w(depth, a.symbols[0]);
    for (int i = depth - 1; i >= 0; --i) {
        w[i] = a.symbols[idx % a.size()];
        idx /= a.size();
    }
    return w;
}

long long num_words(const Alphabet& a, int depth) {
    long long n = 1;
    for (int i = 0; i < depth; ++i) n *= a.size();
    return n;
}

}  // namespace ample

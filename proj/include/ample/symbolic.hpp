#pragma once

#include <string>
#include <vector>

#include "ample/rat.hpp"

namespace ample {

// Ordered finite alphabet of single-character symbols, e.g. "01".
struct Alphabet {
    std::string symbols;

    Alphabet() = default;
    explicit Alphabet(std::string syms);

    int size() const { return (int)symbols.size(); }
    int index(char c) const;  // -1 if absent
    bool contains(char c) const { return index(c) >= 0; }
    bool valid_word(const std::string& w) const;

    bool operator==(const Alphabet& o) const { return symbols == o.symbols; }
    bool operator!=(const Alphabet& o) const { return !(*this == o); }
};

// A clopen subset of the full shift over an alphabet, stored as a sorted list
// of distinct cylinder words at one common depth.
class ClopenSet {
  public:
    ClopenSet() = default;
    ClopenSet(Alphabet a, int depth, std::vector<std::string> words);

    static ClopenSet empty(const Alphabet& a, int depth = 0);
    static ClopenSet full(const Alphabet& a, int depth = 0);
    static ClopenSet cylinder(const Alphabet& a, const std::string& word);

    const Alphabet& alphabet() const { return alpha_; }
    int depth() const { return depth_; }
    const std::vector<std::string>& words() const { return words_; }
    size_t count() const { return words_.size(); }
    bool is_empty() const { return words_.empty(); }
    bool is_full() const;

    ClopenSet refined(int d) const;  // throws on d < depth
    bool contains_word(const std::string& w) const;  // w at depth >= depth_

    std::string str() const;  // comma-separated words; "(empty)"/"(full)"

  private:
    Alphabet alpha_;
    int depth_ = 0;
    std::vector<std::string> words_;  // sorted, unique, all of length depth_
};

ClopenSet unite(const ClopenSet& a, const ClopenSet& b);
ClopenSet intersect(const ClopenSet& a, const ClopenSet& b);
ClopenSet difference(const ClopenSet& a, const ClopenSet& b);
ClopenSet complement(const ClopenSet& a);
bool subset(const ClopenSet& a, const ClopenSet& b);
bool disjoint(const ClopenSet& a, const ClopenSet& b);
bool equal(const ClopenSet& a, const ClopenSet& b);

// Eventually periodic point pre.per.per.per...; normalized so that the period
// is primitive and the preperiod is as short as possible.
struct Point {
    std::string pre;
    std::string per;  // nonempty

    Point() : per("?") {}
    Point(std::string preperiod, std::string period);

    char at(size_t i) const;
    std::string prefix(size_t n) const;
    Point dropped(size_t k) const;  // drop the first k symbols
    std::string str() const;       // "PRE/PERIOD"

    static Point parse(const std::string& s, const Alphabet& a);  // "PRE/PERIOD"

    bool operator==(const Point& o) const { return pre == o.pre && per == o.per; }
    bool operator!=(const Point& o) const { return !(*this == o); }
    bool operator<(const Point& o) const {
        return pre != o.pre ? pre < o.pre : per < o.per;
    }
};

bool member(const Point& p, const ClopenSet& s);

// Finite metric space with exact rational distances.
struct FiniteMetricSpace {
    std::vector<std::string> names;
    std::vector<std::vector<Rat>> dist;

    FiniteMetricSpace() = default;
    FiniteMetricSpace(std::vector<std::string> names_, std::vector<std::vector<Rat>> dist_);

    int size() const { return (int)names.size(); }
    const Rat& d(int i, int j) const { return dist[i][j]; }
};

// Index helpers for depth-d cylinders in lexicographic order.
long long word_index(const Alphabet& a, const std::string& w);
std::string index_word(const Alphabet& a, int depth, long long idx);
long long num_words(const Alphabet& a, int depth);

}  // namespace ample

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ample/symbolic.hpp"

namespace ample {

// Freely reduced group word over named generators, stored as syllables
// (generator index, nonzero exponent). Multiplication concatenates and
// cancels at the junction; no relations are imposed.
struct Word {
    std::vector<std::pair<int, long long>> syl;

    static Word identity() { return Word{}; }
    static Word gen(int g, long long e = 1);

    bool is_identity() const { return syl.empty(); }
    Word operator*(const Word& o) const;
    Word inverse() const;
    long long length() const;  // unweighted symbol count
    Rat weighted_length(const std::vector<Rat>& gen_weights) const;
    long long total_steps() const { return length(); }

    std::string str(const std::vector<std::string>& gen_names) const;
    std::string key() const;  // canonical string for hashing/sorting

    bool operator==(const Word& o) const { return syl == o.syl; }
    bool operator!=(const Word& o) const { return !(*this == o); }
    bool operator<(const Word& o) const { return syl < o.syl; }
};

// One homeomorphism of the shift space given by prefix-rewrite rules
// u.suffix -> v.suffix (|u| = |v|), plus explicit exceptional point pairs for
// points not covered by any rule (e.g. the odometer carry point).
struct GeneratorAction {
    std::string name;
    std::vector<std::pair<std::string, std::string>> rules;
    std::vector<std::pair<Point, Point>> exceptions;
};

class TransformationGroupoid {
  public:
    TransformationGroupoid(Alphabet alphabet, std::vector<GeneratorAction> generators);

    // Binary odometer (add one with carry) with rewrite rules down to
    // rule_depth and the declared exceptional pair 1^inf -> 0^inf.
    static TransformationGroupoid binary_odometer(int rule_depth);

    const Alphabet& alphabet() const { return alpha_; }
    const std::vector<GeneratorAction>& generators() const { return gens_; }
    int num_generators() const { return (int)gens_.size(); }
    int max_rule_depth() const { return max_rule_depth_; }
    std::vector<std::string> generator_names() const;
    int generator_index(const std::string& name) const;  // -1 if absent

    // Point-level action. signed_gen: +k / -k is generator k-1 forward/backward
    // (1-based magnitude). Throws if no rule or exception applies.
    Point apply_gen(int signed_gen, const Point& p) const;
    Point apply(const Word& w, const Point& p) const;

    // Cylinder-level action at a fixed depth; entry -1 means the image of that
    // cylinder is not itself a depth-d cylinder (insufficient rule coverage).
    const std::vector<long long>& gen_table(int signed_gen, int depth) const;
    // Table for gen^exp, built by repeated composition and cached.
    const std::vector<long long>& power_table(int gen /*1-based*/, long long exp,
                                              int depth) const;

    // Exact image of a clopen set; refines as needed, with a complement
    // fallback for cylinders whose image is forced by bijectivity.
    ClopenSet apply_clopen(int signed_gen, const ClopenSet& s) const;
    ClopenSet apply_word(const Word& w, const ClopenSet& s) const;

    // Image cylinder index of a depth-d cylinder under a word, or nullopt if
    // some step is not cylinder-level at this depth.
    std::optional<long long> apply_word_cyl(const Word& w, int depth, long long idx) const;

    Word parse_word(const std::string& s) const;  // "T^3", "T^-1.S^2", "id"

  private:
    Alphabet alpha_;
    std::vector<GeneratorAction> gens_;
    int max_rule_depth_ = 0;
    struct Cache;
    std::shared_ptr<Cache> cache_;  // lazy tables; value-semantics friendly

    void validate() const;
    std::vector<long long> build_gen_table(int signed_gen, int depth) const;
};

// Compact open bisection of a transformation groupoid: a word together with a
// clopen domain; the range is the exact image of the domain.
struct Bisection {
    Word w;
    ClopenSet dom;

    const ClopenSet& source() const { return dom; }
    ClopenSet range(const TransformationGroupoid& g) const { return g.apply_word(w, dom); }
    bool is_empty() const { return dom.is_empty(); }
    Bisection inverse(const TransformationGroupoid& g) const {
        return Bisection{w.inverse(), range(g)};
    }
};

Bisection bisection_product(const TransformationGroupoid& g, const Bisection& U,
                            const Bisection& V);
bool bisection_equal(const TransformationGroupoid& g, const Bisection& U, const Bisection& V);

// Arrow of a transformation groupoid: source point plus the acting word.
struct TArrow {
    Word w;
    Point base;

    Point source() const { return base; }
    Point range(const TransformationGroupoid& g) const { return g.apply(w, base); }
    bool operator==(const TArrow& o) const { return w == o.w && base == o.base; }
    bool operator<(const TArrow& o) const {
        return base != o.base ? base < o.base : w < o.w;
    }
};

// Compact-set specification: a finite union of bisections, always understood
// to contain the unit space.
struct KSpec {
    std::vector<Bisection> elems;
};

std::vector<TArrow> fiber(const TransformationGroupoid& g, const Point& u, long long max_len);

}  // namespace ample

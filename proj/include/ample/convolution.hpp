#pragma once

#include <string>
#include <vector>

#include "ample/groupoid.hpp"

namespace ample {

// Finite sum of terms value * 1_{(word, cylinder)}; each term lives on a
// single bisection with a one-cylinder domain. Locally constant coefficients
// on larger domains are represented by several terms of the same word.
struct GFTerm {
    Word w;
    std::string cyl;  // domain cylinder word
    Rat val;
};

class GroupoidFunction {
  public:
    GroupoidFunction() = default;
    GroupoidFunction(const TransformationGroupoid* g, std::vector<GFTerm> terms);

    static GroupoidFunction zero(const TransformationGroupoid& g);
    static GroupoidFunction indicator(const TransformationGroupoid& g, const Bisection& b,
                                      const Rat& value = 1);

    const TransformationGroupoid* groupoid() const { return g_; }
    const std::vector<GFTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    GroupoidFunction scaled(const Rat& c) const;
    GroupoidFunction adjoint() const;
    Rat sup_abs() const;  // max |value| over terms in normal form

    // value at the arrow (word w, base u); zero off the support
    Rat value_at(const Word& w, const Point& u) const;

    // All terms refined to one common depth, same-(word,cylinder) terms merged,
    // zeros dropped, sorted: the canonical normal form used for equality.
    void normalize(int min_depth = 0);

    std::string str() const;

  private:
    const TransformationGroupoid* g_ = nullptr;
    std::vector<GFTerm> terms_;
};

GroupoidFunction add(const GroupoidFunction& f, const GroupoidFunction& g);
GroupoidFunction sub(const GroupoidFunction& f, const GroupoidFunction& g);
GroupoidFunction convolve(const GroupoidFunction& f, const GroupoidFunction& g);
bool gf_equal(const GroupoidFunction& f, const GroupoidFunction& g);

// Reduced norm via the single-bisection rule (sup of |coefficients| on one
// bisection) extended to sums over pairwise disjoint bisections (disjoint
// sources and disjoint ranges), where it is the max of the term norms. Any
// other shape throws: no approximation is ever returned.
Rat reduced_norm(const GroupoidFunction& f);

}  // namespace ample

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ample/finite_groupoid.hpp"
#include "ample/groupoid.hpp"

namespace ample {

// Extended rational value: a finite rational or the infinity sentinel.
struct ExtRat {
    bool infinite = false;
    Rat v;

    static ExtRat inf() { return ExtRat{true, 0}; }
    static ExtRat fin(Rat r) { return ExtRat{false, std::move(r)}; }
    bool operator==(const ExtRat& o) const {
        return infinite == o.infinite && (infinite || v == o.v);
    }
};

// Word-length function on a transformation groupoid: positive integer weight
// per generator, length = weighted reduced word length.
struct WordLength {
    std::vector<Rat> weights;

    static WordLength unit(const TransformationGroupoid& g) {
        return WordLength{std::vector<Rat>((size_t)g.num_generators(), Rat(1))};
    }
    Rat len(const Word& w) const { return w.weighted_length(weights); }
};

// ---------- transformation-groupoid fibers ----------

// Finite subset of the source fiber at a base point, as a set of words.
struct FiberSet {
    Point base;
    std::vector<Word> words;  // sorted by canonical key, unique

    void canonicalize();
    bool contains(const Word& w) const;
    size_t size() const { return words.size(); }
};

ExtRat rho(const TransformationGroupoid& g, const WordLength& l, const TArrow& x,
           const TArrow& y);

// closed ball around the arrow (center, base) inside its fiber
std::vector<Word> word_ball(const WordLength& l, const Word& center, const Rat& R,
                            int num_gens);

struct FiberBoundaries {
    std::vector<Word> plus, minus, all;
};
FiberBoundaries boundaries(const TransformationGroupoid& g, const FiberSet& A,
                           const KSpec& K);

struct FolnerCertificate {
    Point base;
    std::vector<Word> F;
    size_t bplus = 0, bminus = 0, btotal = 0;
    Rat eps;
};
std::optional<FolnerCertificate> folner_search(const TransformationGroupoid& g,
                                               const Point& u, const KSpec& K,
                                               const Rat& eps, long long budget);
bool revalidate(const TransformationGroupoid& g, const FolnerCertificate& c,
                const KSpec& K);

struct ClassVerdict {
    std::string cylinder;
    bool pass = false;
    size_t folner_size = 0;
};
std::vector<ClassVerdict> ubiquitous_check(const TransformationGroupoid& g, const KSpec& K,
                                           const Rat& eps, const KSpec& L, int depth);

struct GrowResult {
    bool found = false;
    std::vector<Word> F;
    Rat inflation;   // the radius S with F ⊆ B̄(M,S)
    Rat best_ratio;  // best |∂⁺|/|F| seen (reported on failure too)
};
GrowResult grow_to_folner(const TransformationGroupoid& g, const WordLength& l,
                          const FiberSet& M, const Rat& R, const Rat& eps,
                          const Rat& S_budget);

// Greedy (s,n)-separated net in a finite index set with an abstract distance.
// Throws if |F| < n * probed capacity.
std::vector<int> separated_net_indices(int size, const std::function<Rat(int, int)>& dist,
                                       const Rat& s, int n);
std::vector<Word> separated_net(const WordLength& l, const std::vector<Word>& F,
                                const Rat& s, int n);

struct PackingResult {
    bool found = false;
    std::vector<Word> centers;
    Rat radius_used;
    std::string diagnostic;
};
PackingResult disjoint_ball_packing(const TransformationGroupoid& g, const WordLength& l,
                                    const FiberSet& M, const Rat& R, int n,
                                    const Rat& S_budget);

long long min_ball_cardinality(const TransformationGroupoid& g, const WordLength& l,
                               const Rat& R);

struct CapacityProfile {
    std::vector<std::pair<Rat, long long>> samples;  // (radius, probed sup of |ball|)
};
CapacityProfile capacity_profile(const WordLength& l, int num_gens,
                                 const std::vector<Rat>& radii);

// ---------- finite groupoids ----------

struct FiniteBoundaries {
    std::vector<int> plus, minus, all;
};
FiniteBoundaries boundaries(const FiniteGroupoid& g, const std::vector<int>& A,
                            const std::vector<int>& K);

struct FiniteFolner {
    int unit;
    std::vector<int> F;
    size_t btotal;
};
std::optional<FiniteFolner> folner_search(const FiniteGroupoid& g, int unit,
                                          const std::vector<int>& K, const Rat& eps);
// per-unit verdict with Folner sets restricted to (K-orbit) ∪ {u} shaped pools
std::vector<std::pair<int, bool>> ubiquitous_check(const FiniteGroupoid& g,
                                                   const std::vector<int>& K,
                                                   const Rat& eps,
                                                   const std::vector<int>& L);

// ---------- metric spaces and coarse truncations ----------

struct MetricBoundaries {
    std::vector<int> plus, minus, all;
};
MetricBoundaries metric_boundaries(const FiniteMetricSpace& Y, const std::vector<int>& A,
                                   const Rat& R);

std::optional<std::vector<int>> metric_folner_search(const FiniteMetricSpace& Y,
                                                     const Rat& R, const Rat& eps);

// Følner search inside one truncation fiber, phrased through the arrows of E_r.
std::optional<std::vector<int>> truncation_fiber_folner(const CoarseTruncation& E, int u,
                                                        const Rat& R, const Rat& eps);

struct TruncationComparison {
    struct Entry {
        Rat R, eps;
        bool fiber_witnessed = false;
        bool direct_witnessed = false;
    };
    std::vector<Entry> entries;
    bool agree = true;
};
TruncationComparison coarse_truncation_amenability(const FiniteMetricSpace& Y, const Rat& r,
                                                   const std::vector<std::pair<Rat, Rat>>& grid);

long long min_ball_cardinality(const FiniteMetricSpace& Y, const Rat& R);
long long min_ball_cardinality(const FiniteGroupoid& g, const FiniteLength& l, const Rat& R);

}  // namespace ample

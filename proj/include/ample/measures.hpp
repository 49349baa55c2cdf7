#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ample/coarse.hpp"
#include "ample/finite_groupoid.hpp"
#include "ample/groupoid.hpp"

namespace ample {

// Probability measure candidate given by exact rational weights on the
// depth-d cylinders (indexed by word_index order).
struct CylinderMeasure {
    Alphabet alpha;
    int depth = 0;
    std::vector<Rat> w;

    void validate() const;  // nonnegative, sums to 1, right length
};

// mu(s), exact. Throws if s is strictly finer than the measure resolution
// (partial subtrees below depth d are not determined by the weights).
Rat evaluate(const CylinderMeasure& mu, const ClopenSet& s);

enum class FeasKind { Unique, FeasibleRegion, Infeasible };

struct MeasureFeasibility {
    FeasKind kind = FeasKind::Infeasible;
    int depth = 0;
    std::optional<CylinderMeasure> unique;
    long long num_classes = 0;
    long long affine_dim = 0;         // dimension of the feasible region
    std::vector<int> class_of;        // equality class per depth-d cylinder
};

// Solves {w >= 0, sum w = 1, w(c) = w(g.c) for every generator g and depth-d
// cylinder c inside a rewrite-rule source}. Throws if some rule needs depth > d.
MeasureFeasibility invariant_measure_feasibility(const TransformationGroupoid& g, int depth);

struct FiniteMeasureFeasibility {
    FeasKind kind = FeasKind::Infeasible;
    std::optional<std::vector<Rat>> unique;  // weight per unit
    long long num_classes = 0;
    long long affine_dim = 0;
    std::vector<int> class_of;  // equality class per unit
};

FiniteMeasureFeasibility invariant_measure_feasibility(const FiniteGroupoid& g);

// Atomic averaging measure (1/|F|) sum of point masses at the ranges of the
// arrows {(w, base) : w in F}.
struct AveragingMeasure {
    Point base;
    std::vector<Word> F;
};

AveragingMeasure folner_averaging(const TransformationGroupoid& g,
                                  const FolnerCertificate& cert);

Rat evaluate(const TransformationGroupoid& g, const AveragingMeasure& mu,
             const ClopenSet& s);

struct AveragingDefect {
    Rat indicator_defect;  // |mu_F(source side) - mu_F(range side)|
    Rat bound;             // |{U, U^-1} F  delta  F| / |F|, certifies the defect
};

AveragingDefect averaging_defect(const TransformationGroupoid& g,
                                 const AveragingMeasure& mu, const Bisection& U);

// |mu(s(U)) - mu(r(U))|, exact.
Rat invariance_defect(const TransformationGroupoid& g, const CylinderMeasure& mu,
                      const Bisection& U);

// Depth-d projection of an averaging measure, for refinement diagnostics.
CylinderMeasure project(const TransformationGroupoid& g, const AveragingMeasure& mu,
                        int depth);

}  // namespace ample

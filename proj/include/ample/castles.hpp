#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ample/groupoid.hpp"
#include "ample/measures.hpp"

namespace ample {

// Exact germ comparison: the subset of c on which the words a and b act
// identically as partial homeomorphisms. Resolution is by honest rewrite-rule
// application only (never the bijectivity completion), so a resolved cylinder
// image pins down the pointwise map; cylinders that stay unresolved down to
// depth_cap are conservatively excluded.
ClopenSet germ_agreement(const TransformationGroupoid& g, const Word& a, const Word& b,
                         const ClopenSet& c, int depth_cap);

// Image of the cylinder word under w by honest rule application, if every
// syllable step is a genuine prefix rewrite at this depth.
std::optional<std::string> resolve_word_on_cylinder(const TransformationGroupoid& g,
                                                    const Word& w, const std::string& cyl);

// Matrix {C_{i,j}} of bisections with common source column: s(C_{i,j}) is the
// j-th level, r(C_{i,j}) the i-th, and C_{i,j}C_{j,k} = C_{i,k}. Stored either
// as an explicit matrix or as one column C_{i,k0} from which the rest is
// generated via C_{i,j} = C_{i,k0} C_{j,k0}^{-1}.
class Multisection {
  public:
    static Multisection from_column(const TransformationGroupoid& g,
                                    std::vector<Bisection> column, int k0 = 0);
    static Multisection from_matrix(const TransformationGroupoid& g, int n,
                                    std::vector<Bisection> entries);  // row-major

    int size() const { return n_; }
    bool lazy() const { return full_.empty(); }
    Bisection at(const TransformationGroupoid& g, int i, int j) const;
    const ClopenSet& level(int i) const { return levels_[(size_t)i]; }
    const std::vector<Bisection>& column() const { return column_; }
    int column_base() const { return k0_; }

    // original row labels (used when a multisection is carved out of a larger
    // one and the caller needs the correspondence); defaults to 0..n-1
    std::vector<int> labels;

  private:
    int n_ = 0;
    int k0_ = 0;
    std::vector<Bisection> full_;    // row-major when explicit
    std::vector<Bisection> column_;  // C_{i,k0} when lazy
    std::vector<ClopenSet> levels_;
};

struct Castle {
    std::vector<Multisection> ms;

    ClopenSet unit_union(const TransformationGroupoid& g) const;
};

// Kakutani-Rokhlin castle of the binary odometer at level n: one multisection
// whose i-th level is the depth-n cylinder with LSB-first value i and whose
// ladders are the powers T^{i-j}.
Castle odometer_castle(const TransformationGroupoid& g, int n);

struct CastleReport {
    bool valid = true;
    std::string violation;
};

CastleReport verify_castle(const TransformationGroupoid& g, const Castle& c);

CastleReport verify_extendable(const TransformationGroupoid& g, const Castle& C,
                               const Castle& D, const KSpec& K);

struct SplitResult {
    Castle A, B;
    std::vector<int> rows;  // D-rows l with nonempty routing piece O_l
};

// Routes the level C_{k,k} along M into the rows of D and splits both
// multisections accordingly; every output castle passes verify_castle and the
// unit-space unions are preserved.
SplitResult split_castle_along_bisection(const TransformationGroupoid& g,
                                         const Multisection& C, const Multisection& D,
                                         const Bisection& M, int k, int depth_cap);

struct NestingResult {
    bool ok = false;
    std::string failure;
    long long multiplicity = 0;      // min over outer levels of contained inner levels
    std::vector<int> assignment;     // inner multisection -> outer multisection
};

NestingResult check_nesting(const TransformationGroupoid& g, const Castle& inner,
                            const Castle& outer);

struct MatuiReport {
    bool covering = false;
    bool pass = false;
    Rat max_ratio;
    long long classes = 0;
    std::string violation;
};

// Fiberwise defect |K H u \ H u| / |H u|, maximized over the cylinder classes
// on which the fiber picture is constant; pre: the levels of H partition the
// unit space.
MatuiReport verify_matui(const TransformationGroupoid& g, const Castle& H,
                         const KSpec& K, const Rat& eps);

struct ConversionResult {
    Castle W;        // sub-castle with rows restricted to the stable index sets
    Castle Hdecomp;  // the matching decomposition of H (full index sets)
    ClopenSet remainder;
    Rat matui_ratio;
    std::optional<Rat> w_measure;  // mu(union of W-levels) when a measure is given
};

ConversionResult convert_af_to_almost_elementary(const TransformationGroupoid& g,
                                                 const Castle& H, const KSpec& K,
                                                 const Rat& eps,
                                                 const CylinderMeasure* mu = nullptr);

struct KerrReport {
    bool pass = false;
    std::vector<Rat> invariance_ratios;  // per tower
    bool towers_disjoint = false;
    std::string violation;
};

// Towers (S_i, V_i) of a Z-action: shape invariance of each S_i under the
// finite window K and clopen disjointness of {T^s V_i}.
KerrReport verify_kerr_towers(const TransformationGroupoid& g,
                              const std::vector<std::pair<std::vector<long long>, ClopenSet>>& towers,
                              const std::vector<long long>& K, const Rat& delta);

struct ComparisonWitness {
    ClopenSet U, V;
    std::vector<Bisection> routes;  // sources partition U, ranges disjoint in V
};

std::optional<ComparisonWitness> comparison_search(const TransformationGroupoid& g,
                                                   const ClopenSet& U, const ClopenSet& V,
                                                   int word_len, int depth);

CastleReport verify_comparison_witness(const TransformationGroupoid& g,
                                       const ComparisonWitness& w);

}  // namespace ample

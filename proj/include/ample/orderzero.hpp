#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ample/castles.hpp"
#include "ample/convolution.hpp"

namespace ample {

struct LevelRef {
    int ms = 0;
    int row = 0;
    bool operator==(const LevelRef& o) const { return ms == o.ms && row == o.row; }
    bool operator<(const LevelRef& o) const {
        return ms != o.ms ? ms < o.ms : row < o.row;
    }
};

// Disjoint blocks of inner levels under each selected outer level, together
// with the positional bijections between blocks: position a of block m
// corresponds to position a of block k. Blocks are chosen at one base level
// per outer multisection and transported along the outer ladders, so the
// correspondence is equivariant under every ladder between selected levels.
struct NestingSystem {
    const Castle* inner = nullptr;
    const Castle* outer = nullptr;
    int n = 0;        // number of blocks per (level, inner multisection)
    long long N = 0;  // multiplicity floor: every fiber carries >= n*N inner levels
    std::vector<LevelRef> H0;  // selected outer levels
    // blocks[h][l][m] = rows of inner.ms[l] under outer level H0[h], m = 0..n-1;
    // empty when inner.ms[l] does not sit inside the multisection of H0[h]
    std::vector<std::vector<std::vector<std::vector<int>>>> blocks;
};

NestingSystem build_nesting_system(const TransformationGroupoid& g, const Castle& inner,
                                   const Castle& outer, std::vector<LevelRef> H0, int n,
                                   long long N);

struct CompatibleFamilyReport {
    bool pass = true;
    long long checks = 0;
    std::string violation;
};

// The indicator family h_B = 1_B over all ladders of the castle; verifies the
// compatibility identities 1_{r(B)} * 1_B = 1_B = 1_B * 1_{s(B)} and
// supp(1_B) = B exactly under convolution.
CompatibleFamilyReport build_compatible_family(const TransformationGroupoid& g,
                                               const Castle& inner);

struct Strata {
    std::vector<int> level;  // parallel to H0: stratum index 0..N
    std::vector<Rat> kappa;  // 1 - level/N; the final stratum gets exactly 0
};

// Stratification of the selected outer levels under the given bisections and
// their inverses. A move is coherent at a level when the level sits inside
// the move's domain and the move's germ there agrees with a ladder of the
// castle into another selected level; levels with an incoherent or escaping
// move form the boundary stratum N (weight 0) and strata count down by
// breadth-first distance from that boundary. When no level escapes, strata
// are breadth-first distances from the designated base levels instead,
// saturating at stratum N. Every level must either sit inside or miss each
// move's domain, and every level must be reachable.
Strata kappa_stratification(const TransformationGroupoid& g, const Castle& outer,
                            const std::vector<LevelRef>& H0,
                            const std::vector<LevelRef>& base, const KSpec& F,
                            long long N);

struct OrderZeroMap {
    int n = 0;
    std::vector<GroupoidFunction> im;  // row-major: im[k*n+m] = image of e_{km}
    GroupoidFunction h0;               // image of the identity matrix

    const GroupoidFunction& image(int k, int m) const { return im[(size_t)(k * n + m)]; }
    // image of the diagonal matrix diag(d)
    GroupoidFunction diag(const TransformationGroupoid& g,
                          const std::vector<Rat>& d) const;
};

OrderZeroMap build_psi(const TransformationGroupoid& g, const NestingSystem& ns,
                       const std::vector<Rat>& kappa);

struct OrderZeroReport {
    bool pass = true;
    std::string violation;
    long long unit_checks = 0;  // matrix-unit identities verified
    long long orth_trials = 0;  // orthogonal positive pairs verified
};

// Exact verification: multiplicativity of the kappa-free map phi on all
// matrix-unit pairs, the factorization h0 * phi = phi * h0 = psi, and
// psi(a) psi(b) = 0 for `trials` random orthogonal positive diagonal pairs.
OrderZeroReport verify_order_zero(const TransformationGroupoid& g, const NestingSystem& ns,
                                  const std::vector<Rat>& kappa, int trials, unsigned seed);

struct DefectReport {
    ClopenSet support;  // support of 1 - psi(identity)
    Rat measure;
    Rat bound;  // measure of the supplied remainder plus 1/N
    bool within = false;
};

DefectReport defect_support(const TransformationGroupoid& g, const NestingSystem& ns,
                            const std::vector<Rat>& kappa, const CylinderMeasure& mu,
                            const ClopenSet& remainder);

struct CommutatorReport {
    Rat norm;        // reduced norm of the commutator [f, psi(e_ij)]
    Rat max_term;    // max reduced norm over the disjointly supported pieces
    Rat jump_bound;  // max |kappa(D) - kappa(sigma_f(D))| * sup|f|
    long long terms = 0;
    bool recomposes = false;  // the pieces sum back to the direct difference
};

// Expands the commutator of psi(e_ij) with a single-bisection function f into
// one piece per (selected level, ladder) pair, each supported on a single
// bisection; requires every selected level to sit inside or miss the domain
// of f, and levels routed outside the selection to carry kappa = 0.
CommutatorReport commutator_norm(const TransformationGroupoid& g, const NestingSystem& ns,
                                 const std::vector<Rat>& kappa, int i, int j,
                                 const GroupoidFunction& f);

// First cylinder on which the nonnegative unit-space function a is >= the
// threshold; a must be supported on identity-word terms only.
std::optional<std::string> dominating_clopen(const GroupoidFunction& a,
                                             const Rat& threshold);

struct PipelineReport {
    int n = 0, m = 0, matrix_n = 0;
    long long N = 0;
    Rat conversion_ratio;
    Rat w_measure;
    Rat remainder_measure;
    long long nest_multiplicity = 0;
    CompatibleFamilyReport family;
    OrderZeroReport oz;
    DefectReport defect;  // computed with kappa identically 1
    Rat commutator_max;   // stratified kappa, max over all matrix units
    Rat max_kappa_jump;
    bool pass = false;
};

// End-to-end odometer run: convert the level-n tower to an almost elementary
// sub-castle, nest the level-(n+m) tower in the level-n tower, build the
// order-zero map with the breadth-first kappa stratification, and verify all
// identities and bounds. Requires 2^m >= matrix_n * N.
PipelineReport pipeline_odometer_demo(int n, int m, int matrix_n, long long N,
                                      int trials = 50, unsigned seed = 7);

}  // namespace ample

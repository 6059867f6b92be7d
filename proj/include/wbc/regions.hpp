#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wbc/prob.hpp"

namespace wbc {

struct RatePoint {
  double r1 = 0.0;
  double r2 = 0.0;
};

// Downward-closed convex region in the nonnegative quadrant. `hull()` is the
// Pareto frontier chain sorted by r1 ascending, starting at (0, max r2) and
// ending at (max r1, 0); collinear vertices are dropped.
class RateRegion {
 public:
  RateRegion();  // the origin-only region
  static RateRegion from_points(std::vector<RatePoint> pts);

  const std::vector<RatePoint>& points() const { return points_; }
  const std::vector<RatePoint>& hull() const { return hull_; }
  double max_r1() const;
  double max_r2() const;
  double support(double lambda) const;  // max r1 + lambda*r2 (lambda=inf -> max r2)
  bool contains(const RatePoint& p, double tol = 1e-9) const;
  RateRegion merged(const RateRegion& other) const;

 private:
  std::vector<RatePoint> points_;
  std::vector<RatePoint> hull_;
};

double support(const RateRegion& r, double lambda);
// Symmetric Hausdorff distance between two regions, via frontier sampling.
double hausdorff(const RateRegion& a, const RateRegion& b, int boundary_samples = 512);
// True iff every hull vertex of `inner` lies in `outer` within tol.
bool region_contained(const RateRegion& inner, const RateRegion& outer, double tol = 1e-9);

// Polygon cut out by r1 <= b1, r2 <= b2, r1 + r2 <= s in the nonnegative
// quadrant (bounds clamped at 0; pass +inf to drop a constraint).
RateRegion polygon_from_bounds(double b1, double b2, double s);

// ---------------------------------------------------------------------------
// Bound evaluators at a fixed auxiliary joint. The joint carries only the
// auxiliary variables and X; channel outputs are appended internally, so the
// required Markov structure holds by construction.
// ---------------------------------------------------------------------------

// Inner bound; joint axes (T,Q,U1,U2,X). Returns nullopt when the
// mutual-covering side condition fails.
std::optional<RateRegion> eval_inner(const WiretapBc& ch, const JointPmf& joint);

struct InnerBounds {
  double r1 = 0, r2 = 0, sum = 0;  // clamped at 0
  bool feasible = false;
};
InnerBounds eval_inner_bounds(const WiretapBc& ch, const JointPmf& joint);

// Reduced outer bound; joint axes (T,V1,V2,U1,U2,X).
RateRegion eval_outer_cor(const WiretapBc& ch, const JointPmf& joint);
struct OuterCorBounds {
  double r1 = 0, r2 = 0, sum_a = 0, sum_b = 0;  // raw, unclamped
};
OuterCorBounds eval_outer_cor_bounds(const WiretapBc& ch, const JointPmf& joint);

// Full outer bound; joint axes (T,V1,V2,U1,U2,S1,S2,X).
struct Thm1Bounds {
  std::array<double, 4> r1{}, r2{}, sum{};  // raw, unclamped
};
Thm1Bounds eval_outer_thm1_bounds(const WiretapBc& ch, const JointPmf& joint);
RateRegion eval_outer_thm1(const WiretapBc& ch, const JointPmf& joint);

// ---------------------------------------------------------------------------
// Randomized search over auxiliary distributions.
// ---------------------------------------------------------------------------

enum class BoundKind { inner, outer_cor, outer_thm1 };

// Auxiliary alphabet sizes; names not present fall back to defaults
// (T -> 1, everything else -> 2).
struct AuxSpec {
  std::map<std::string, int> cards;
  int card(const std::string& name) const;
};

// Samples `budget` joints (seeded, factorization-respecting), evaluates the
// chosen bound, and returns the hull of the union, sharpened by coordinate
// refinement of the best point along a fixed fan of support directions
// (refinement needs budget >= 2; a single-sample run returns that sample's
// polygon unchanged). Search output approximates the true union from below.
RateRegion search_region(const WiretapBc& ch, const AuxSpec& aux, BoundKind bound,
                         int budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Specialized capacity evaluators. Each verifies its ordering premises via
// the ordering module and throws std::invalid_argument naming the failed
// check. Search-based ones share the sampling/refinement machinery.
// ---------------------------------------------------------------------------

RateRegion capacity_deterministic(const WiretapBc& ch, int grid);
RateRegion capacity_semidet(const WiretapBc& ch, const AuxSpec& aux, int budget, std::uint64_t seed);
RateRegion capacity_degraded(const WiretapBc& ch, const AuxSpec& aux, int budget, std::uint64_t seed);
RateRegion capacity_less_noisy(const WiretapBc& ch, const AuxSpec& aux, int budget, std::uint64_t seed);
RateRegion capacity_product(const WiretapBc& bc1, const WiretapBc& bc2, const AuxSpec& aux,
                            int budget, std::uint64_t seed);

// Per-joint constraint values for the specialized theorems (also the oracle
// surface used by tests to drive matched parameterizations).
struct LessNoisyBounds {
  double r2 = 0, sum = 0;  // raw, unclamped
};
LessNoisyBounds less_noisy_bounds_at(const WiretapBc& ch, const JointPmf& joint_tux);

struct SemiDetBounds {
  double r1 = 0, r2 = 0, sum = 0;
};
SemiDetBounds semidet_bounds_at(const WiretapBc& ch, const JointPmf& joint_qux);

struct DegradedBounds {
  double r1 = 0, r2 = 0;
};
DegradedBounds degraded_bounds_at(const WiretapBc& ch, const JointPmf& joint_tux);

struct ProductBounds {
  double r1 = 0, r2 = 0, sum_a = 0, sum_b = 0;
};
// Factor joints over axes (U,X) each; factorized by construction.
ProductBounds product_bounds_at(const WiretapBc& bc1, const WiretapBc& bc2,
                                const JointPmf& factor1, const JointPmf& factor2);
// Same, from a joint over (U1,X1,U2,X2); rejects joints that do not factor as
// P_{U1 X1} * P_{U2 X2} within tol.
ProductBounds product_bounds_at_joint(const WiretapBc& bc1, const WiretapBc& bc2,
                                      const JointPmf& joint, double tol = 1e-9);

}  // namespace wbc

#pragma once

#include <string>
#include <vector>

#include "wbc/regions.hpp"

namespace wbc::becbsc {

// Channel parameters of the erasure/symmetric instance: user 1 sees BEC(e),
// user 2 sees BSC(p2), the eavesdropper sees BSC(p).
struct BecBscParams {
  double e = 0.0;
  double p2 = 0.0;
  double p = 0.0;
  double a() const { return 1.0 - 2.0 * p; }
  double a2() const { return 1.0 - 2.0 * p2; }
};

struct AdmissibilityReport {
  bool admissible = false;
  std::vector<std::string> violations;  // each violated inequality, spelled out
  // Which side condition variant is enforced. The two published variants
  // disagree by a sign; the proof machinery needs a^2 + a2^2 <= 1, so that
  // "appendix form" is the one checked here.
  std::string side_condition = "a^2 + a2^2 <= 1 (appendix form)";
};

// Admissible iff 2*p2 <= e <= min{2p, 4*p2*(1-p2)} and a^2 + a2^2 <= 1.
AdmissibilityReport admissible(const BecBscParams& prm);

struct CurvePoint {
  double x = 0.0;   // input-conditional crossover in [0, 0.5]
  double r1 = 0.0;  // bits/use
  double r2 = 0.0;
};

// Secrecy frontier: r1 = (1-e) h2(x) + h2(p) - h2(p*x),
//                   r2 = h2(p*x) - h2(p2*x), x on a uniform grid of [0, 0.5].
// Throws std::invalid_argument when the parameters are inadmissible.
std::vector<CurvePoint> secrecy_curve(const BecBscParams& prm, int n_points = 257);

// Same grid without the eavesdropper: r1 = (1-e) h2(x), r2 = 1 - h2(p2*x).
std::vector<CurvePoint> standard_curve(double e, double p2, int n_points = 257);

// Closed forms evaluated without the admissibility gate (used by the sweep).
std::vector<CurvePoint> secrecy_curve_unchecked(const BecBscParams& prm, int n_points = 257);

struct Figure7Row {
  double p = 0.0;
  double e = 0.0;  // = 2p
  bool admissible = false;
  std::vector<std::string> violations;
  std::vector<CurvePoint> secrecy;
  std::vector<CurvePoint> standard;
};

// Eavesdropper sweep: for p in [p_min, p_max], e = 2p, emit both frontiers.
// Rows outside the admissible band are still produced (flagged), matching the
// published experiment; structurally invalid combinations are skipped.
std::vector<Figure7Row> figure7_data(double p2, double p_min, double p_max = 0.5, int n_p = 401,
                                     int n_points = 257);

struct ConvexityReport {
  int grid = 0;
  // max over the x grid of f2''(x) f1'(x) - f1''(x) f2'(x)  (should be <= 0)
  double max_derivative_violation = 0.0;
  // max turning-direction violation of the sampled (r1, r2) frontier
  double max_second_difference_violation = 0.0;
  double min_f1_prime = 0.0;
  bool pass = false;
};

// Checks concavity of the secrecy frontier two ways: through the analytic
// derivatives of the two corner-point coordinates, and through second
// differences of the sampled parametric curve.
ConvexityReport verify_convexity(const BecBscParams& prm, int n_grid = 257);

struct SeriesTerms {
  int k = 0;
  double s_k = 0.0;
  double t_k = 0.0;
  double v_k = 0.0;
};

// S_k by the two-step recursion (S_3 = 1), T_k = (1-e)(1 - S_{k+2}) + a^2 a2^2 S_k,
// V_k = e a^2 a2^2 S_{k-2}. Requires odd k >= 3, 0 <= a <= a2 <= 1.
SeriesTerms series_terms(double a, double a2, double e, int k);

// Ratio form of S_k; equals the sum form away from a == a2.
double s_ratio_form(double a, double a2, int k);
double s_sum_form(double a, double a2, int k);

struct SeriesReport {
  // claim (1): T_k, V_k >= 0 always; the dominance T_k >= V_k additionally
  // needs the channel-parameter band max{a, a2^2} <= 1-e <= a2 and is only
  // checked when that holds (claim1_applicable).
  bool claim1 = false;
  bool claim1_applicable = false;
  // claim (2): V_k non-increasing over odd k >= 5; needs a^2 + a2^2 <= 1.
  bool claim2 = false;
  bool claim2_applicable = false;
  // claim (3): partial sums match the telescoped value, limit -2/3.
  bool claim3 = false;
  double max_violation1 = 0.0;
  double max_violation2 = 0.0;
  double partial_sum = 0.0;
  double partial_sum_analytic = 0.0;
  double claim3_defect = 0.0;
  std::string v_k_definition = "V_k = e * a^2 * a2^2 * S_{k-2}";
  bool pass = false;  // every applicable claim holds
};

SeriesReport verify_series(double a, double a2, double e, int k_max = 41);

// Downward-closed hull of the secrecy frontier.
RateRegion secrecy_region(const BecBscParams& prm, int n_points = 257);

// The channel triple itself, for cross-module checks.
WiretapBc make_channel(const BecBscParams& prm);

}  // namespace wbc::becbsc

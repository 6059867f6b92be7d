#include "wbc/becbsc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbc::becbsc {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void check_ranges(const BecBscParams& prm) {
  if (prm.e < 0.0 || prm.e > 1.0) throw std::invalid_argument("becbsc: e outside [0,1]");
  if (prm.p2 < 0.0 || prm.p2 > 0.5) throw std::invalid_argument("becbsc: p2 outside [0,0.5]");
  if (prm.p < 0.0 || prm.p > 0.5) throw std::invalid_argument("becbsc: p outside [0,0.5]");
}

double h2p(double x) { return std::log2((1.0 - x) / x); }
double h2pp(double x) { return -1.0 / (kLn2 * x * (1.0 - x)); }

}  // namespace

AdmissibilityReport admissible(const BecBscParams& prm) {
  check_ranges(prm);
  AdmissibilityReport rep;
  const double lo = 2.0 * prm.p2;
  const double hi1 = 2.0 * prm.p;
  const double hi2 = 4.0 * prm.p2 * (1.0 - prm.p2);
  const double aa = prm.a() * prm.a() + prm.a2() * prm.a2();
  if (prm.e < lo - 1e-12)
    rep.violations.push_back("e >= 2*p2 violated (" + std::to_string(prm.e) + " < " + std::to_string(lo) + ")");
  if (prm.e > hi1 + 1e-12)
    rep.violations.push_back("e <= 2*p violated (" + std::to_string(prm.e) + " > " + std::to_string(hi1) + ")");
  if (prm.e > hi2 + 1e-12)
    rep.violations.push_back("e <= 4*p2*(1-p2) violated (" + std::to_string(prm.e) + " > " + std::to_string(hi2) + ")");
  if (aa > 1.0 + 1e-12)
    rep.violations.push_back("a^2 + a2^2 <= 1 violated (appendix form; value " + std::to_string(aa) + ")");
  rep.admissible = rep.violations.empty();
  return rep;
}

std::vector<CurvePoint> secrecy_curve_unchecked(const BecBscParams& prm, int n_points) {
  check_ranges(prm);
  if (n_points < 2) throw std::invalid_argument("secrecy_curve: need at least 2 grid points");
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(n_points));
  const double h2_p = binary_entropy(prm.p);
  for (int i = 0; i < n_points; ++i) {
    double x = 0.5 * i / (n_points - 1);
    CurvePoint pt;
    pt.x = x;
    pt.r1 = (1.0 - prm.e) * binary_entropy(x) + h2_p - binary_entropy(bconv(prm.p, x));
    pt.r2 = binary_entropy(bconv(prm.p, x)) - binary_entropy(bconv(prm.p2, x));
    if (pt.r1 < -1e-12 || pt.r2 < -1e-12)
      throw std::runtime_error("secrecy_curve: closed form produced a negative rate");
    pt.r1 = std::max(0.0, pt.r1);
    pt.r2 = std::max(0.0, pt.r2);
    out.push_back(pt);
  }
  return out;
}

std::vector<CurvePoint> secrecy_curve(const BecBscParams& prm, int n_points) {
  AdmissibilityReport rep = admissible(prm);
  if (!rep.admissible) {
    std::string msg = "secrecy_curve: inadmissible parameters:";
    for (const auto& v : rep.violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
  return secrecy_curve_unchecked(prm, n_points);
}

std::vector<CurvePoint> standard_curve(double e, double p2, int n_points) {
  BecBscParams prm{e, p2, 0.5};
  check_ranges(prm);
  if (n_points < 2) throw std::invalid_argument("standard_curve: need at least 2 grid points");
  std::vector<CurvePoint> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    double x = 0.5 * i / (n_points - 1);
    out.push_back({x, (1.0 - e) * binary_entropy(x), 1.0 - binary_entropy(bconv(p2, x))});
  }
  return out;
}

std::vector<Figure7Row> figure7_data(double p2, double p_min, double p_max, int n_p, int n_points) {
  if (p2 > p_min + 1e-12) throw std::invalid_argument("figure7_data: requires p2 <= p_min");
  if (p_min > p_max || p_max > 0.5 + 1e-12) throw std::invalid_argument("figure7_data: bad p range");
  if (n_p < 1) throw std::invalid_argument("figure7_data: n_p must be >= 1");
  std::vector<Figure7Row> rows;
  rows.reserve(static_cast<std::size_t>(n_p));
  for (int i = 0; i < n_p; ++i) {
    double p = n_p == 1 ? p_min : p_min + (p_max - p_min) * i / (n_p - 1);
    p = std::min(p, 0.5);
    Figure7Row row;
    row.p = p;
    row.e = 2.0 * p;
    BecBscParams prm{row.e, p2, p};
    AdmissibilityReport rep = admissible(prm);
    row.admissible = rep.admissible;
    row.violations = rep.violations;
    row.secrecy = secrecy_curve_unchecked(prm, n_points);
    row.standard = standard_curve(row.e, p2, n_points);
    rows.push_back(std::move(row));
  }
  return rows;
}

ConvexityReport verify_convexity(const BecBscParams& prm, int n_grid) {
  check_ranges(prm);
  if (n_grid < 16) throw std::invalid_argument("verify_convexity: grid too coarse (< 16 points)");
  const double a2sq = prm.a2() * prm.a2();
  if (prm.a() * prm.a() + a2sq > 1.0 + 1e-12)
    throw std::invalid_argument("verify_convexity: requires a^2 + a2^2 <= 1");

  ConvexityReport rep;
  rep.grid = n_grid;
  const double e = prm.e, p = prm.p, p2 = prm.p2;
  const double a = prm.a(), a2 = prm.a2();

  // interior grid: derivatives diverge at the endpoints
  double max_d = -1e300, min_f1p = 1e300;
  for (int i = 0; i < n_grid; ++i) {
    double x = 0.5 * (i + 0.5) / n_grid;
    double f1p = (1.0 - e) * h2p(x) - a * h2p(bconv(p, x));
    double f1pp = (1.0 - e) * h2pp(x) - a * a * h2pp(bconv(p, x));
    double f2p = a * h2p(bconv(p, x)) - a2 * h2p(bconv(p2, x));
    double f2pp = a * a * h2pp(bconv(p, x)) - a2sq * h2pp(bconv(p2, x));
    double d = f2pp * f1p - f1pp * f2p;
    max_d = std::max(max_d, d);
    min_f1p = std::min(min_f1p, f1p);
  }
  rep.max_derivative_violation = max_d;
  rep.min_f1_prime = min_f1p;

  // cross-check: turning direction of the sampled frontier
  std::vector<CurvePoint> curve = secrecy_curve_unchecked(prm, n_grid);
  double max_cross = -1e300;
  for (std::size_t i = 0; i + 2 < curve.size(); ++i) {
    double dx1 = curve[i + 1].r1 - curve[i].r1;
    double dy1 = curve[i + 1].r2 - curve[i].r2;
    double dx2 = curve[i + 2].r1 - curve[i + 1].r1;
    double dy2 = curve[i + 2].r2 - curve[i + 1].r2;
    max_cross = std::max(max_cross, dx1 * dy2 - dy1 * dx2);
  }
  rep.max_second_difference_violation = max_cross;
  rep.pass = max_d <= 1e-9 && max_cross <= 1e-9 && min_f1p >= -1e-9;
  return rep;
}

double s_sum_form(double a, double a2, int k) {
  int s = (k - 1) / 2;
  double total = 0.0;
  for (int j = 0; j < s; ++j)
    total += std::pow(a2, 2.0 * j) * std::pow(a, 2.0 * (s - 1 - j));
  return total;
}

double s_ratio_form(double a, double a2, int k) {
  double denom = a2 * a2 - a * a;
  if (std::abs(denom) < 1e-12) return s_sum_form(a, a2, k);  // 0/0 guard at a == a2
  return (std::pow(a2, k - 1) - std::pow(a, k - 1)) / denom;
}

SeriesTerms series_terms(double a, double a2, double e, int k) {
  if (k < 3 || k % 2 == 0) throw std::invalid_argument("series_terms: k must be odd and >= 3");
  if (!(0.0 <= a && a <= a2 && a2 <= 1.0))
    throw std::invalid_argument("series_terms: need 0 <= a <= a2 <= 1");
  if (e < 0.0 || e > 1.0) throw std::invalid_argument("series_terms: e outside [0,1]");

  // S_j by the recursion S_{j+2} = a^{j-1} + a2^2 S_j with S_1 = 0, S_3 = 1,
  // carried to k+2 for T_k. S_{k-2} is S_1 = 0 when k == 3.
  double s_cur = 1.0;  // S_3
  double s_km2 = 0.0, s_k = 0.0, s_kp2 = 0.0;
  for (int j = 3; j <= k + 2; j += 2) {
    if (j == k - 2) s_km2 = s_cur;
    if (j == k) s_k = s_cur;
    if (j == k + 2) s_kp2 = s_cur;
    s_cur = std::pow(a, j - 1) + a2 * a2 * s_cur;
  }

  SeriesTerms t;
  t.k = k;
  t.s_k = s_k;
  t.t_k = (1.0 - e) * (1.0 - s_kp2) + a * a * a2 * a2 * s_k;
  t.v_k = e * a * a * a2 * a2 * s_km2;
  return t;
}

SeriesReport verify_series(double a, double a2, double e, int k_max) {
  if (k_max < 7 || k_max % 2 == 0)
    throw std::invalid_argument("verify_series: k_max must be odd and >= 7");
  SeriesReport rep;

  // the dominance half of claim (1) rests on max{a, a2^2} <= 1-e <= a2,
  // the translated channel-parameter band; outside it counterexamples exist
  // (a = a2 = 0.7, e = 1, k = 7)
  rep.claim1_applicable = std::max(a, a2 * a2) <= 1.0 - e + 1e-12 && 1.0 - e <= a2 + 1e-12;
  double worst1 = -1e300;
  for (int k = 3; k <= k_max; k += 2) {
    SeriesTerms t = series_terms(a, a2, e, k);
    double viol = std::max(-t.v_k, -t.t_k);
    if (rep.claim1_applicable) viol = std::max(viol, t.v_k - t.t_k);
    worst1 = std::max(worst1, viol);
  }
  rep.max_violation1 = std::max(0.0, worst1);
  rep.claim1 = worst1 <= 1e-12;

  rep.claim2_applicable = a * a + a2 * a2 <= 1.0 + 1e-12;
  double worst2 = 0.0;
  if (rep.claim2_applicable) {
    double prev = series_terms(a, a2, e, 5).v_k;
    for (int k = 7; k <= k_max; k += 2) {
      double cur = series_terms(a, a2, e, k).v_k;
      worst2 = std::max(worst2, cur - prev);
      prev = cur;
    }
  }
  rep.max_violation2 = worst2;
  rep.claim2 = !rep.claim2_applicable || worst2 <= 1e-12;

  double direct = 0.0;
  for (int k = 5; k <= k_max; k += 2)
    direct += 1.0 / (k - 2) - 1.0 / k - 1.0 / (k - 4) + 1.0 / (k - 2);
  // telescoped: sum_{odd k=5..K} = (1/(K-2) - 1/K) - 2/3
  double analytic = 1.0 / (k_max - 2) - 1.0 / k_max - 2.0 / 3.0;
  rep.partial_sum = direct;
  rep.partial_sum_analytic = analytic;
  rep.claim3_defect = std::abs(direct - analytic);
  rep.claim3 = rep.claim3_defect <= 1e-9;

  rep.pass = rep.claim1 && rep.claim2 && rep.claim3;
  return rep;
}

RateRegion secrecy_region(const BecBscParams& prm, int n_points) {
  std::vector<CurvePoint> curve = secrecy_curve(prm, n_points);
  std::vector<RatePoint> pts;
  pts.reserve(curve.size());
  for (const CurvePoint& c : curve) pts.push_back({c.r1, c.r2});
  return RateRegion::from_points(std::move(pts));
}

WiretapBc make_channel(const BecBscParams& prm) {
  check_ranges(prm);
  return WiretapBc(make_bec(prm.e), make_bsc(prm.p2), make_bsc(prm.p));
}

}  // namespace wbc::becbsc

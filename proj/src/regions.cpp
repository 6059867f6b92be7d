#include "wbc/regions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>

#include "wbc/ordering.hpp"
#include "wbc/parallel.hpp"
#include "wbc/rng.hpp"

namespace wbc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const RatePoint& o, const RatePoint& a, const RatePoint& b) {
  return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
}

double clamp0(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

RateRegion::RateRegion() { hull_ = {RatePoint{0.0, 0.0}}; }

RateRegion RateRegion::from_points(std::vector<RatePoint> pts) {
  RateRegion reg;
  for (RatePoint& p : pts) {
    if (!std::isfinite(p.r1) || !std::isfinite(p.r2))
      throw std::invalid_argument("RateRegion: non-finite rate point");
    if (p.r1 < -1e-12 || p.r2 < -1e-12)
      throw std::invalid_argument("RateRegion: negative rate point");
    p.r1 = clamp0(p.r1);
    p.r2 = clamp0(p.r2);
  }
  reg.points_ = pts;
  if (pts.empty()) return reg;

  // Pareto-nondominated subset, lexicographic tie-breaking.
  std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) {
    if (a.r1 != b.r1) return a.r1 < b.r1;
    return a.r2 < b.r2;
  });
  std::vector<RatePoint> frontier;
  double best_r2 = -1.0;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {  // r1 descending
    if (it->r2 > best_r2 + 1e-15) {
      frontier.push_back(*it);
      best_r2 = it->r2;
    }
  }
  std::reverse(frontier.begin(), frontier.end());  // r1 ascending, r2 descending

  // Concave cap of the frontier (upper hull pass); collinear points dropped.
  std::vector<RatePoint> cap;
  for (const RatePoint& p : frontier) {
    while (cap.size() >= 2 && cross(cap[cap.size() - 2], cap.back(), p) >= -1e-15)
      cap.pop_back();
    cap.push_back(p);
  }
  // Close the chain onto both axes.
  std::vector<RatePoint> chain;
  if (cap.front().r1 > 0.0) chain.push_back({0.0, cap.front().r2});
  chain.insert(chain.end(), cap.begin(), cap.end());
  if (chain.back().r2 > 0.0) chain.push_back({chain.back().r1, 0.0});
  reg.hull_ = std::move(chain);
  return reg;
}

double RateRegion::max_r1() const { return hull_.back().r1; }
double RateRegion::max_r2() const { return hull_.front().r2; }

double RateRegion::support(double lambda) const {
  if (lambda < 0.0) throw std::invalid_argument("support: lambda must be >= 0");
  if (std::isinf(lambda)) return max_r2();
  double best = 0.0;
  for (const RatePoint& p : hull_) best = std::max(best, p.r1 + lambda * p.r2);
  return best;
}

bool RateRegion::contains(const RatePoint& p, double tol) const {
  if (p.r1 < -tol || p.r2 < -tol) return false;
  if (p.r1 > max_r1() + tol || p.r2 > max_r2() + tol) return false;
  for (std::size_t i = 0; i + 1 < hull_.size(); ++i) {
    const RatePoint& a = hull_[i];
    const RatePoint& b = hull_[i + 1];
    if (b.r1 <= a.r1 + 1e-15) continue;  // vertical closing edge
    if (p.r1 < a.r1 - tol || p.r1 > b.r1 + tol) continue;
    double t = (p.r1 - a.r1) / (b.r1 - a.r1);
    t = std::clamp(t, 0.0, 1.0);
    double y = a.r2 + t * (b.r2 - a.r2);
    if (p.r2 > y + tol) return false;
  }
  return true;
}

RateRegion RateRegion::merged(const RateRegion& other) const {
  std::vector<RatePoint> pts = hull_;
  pts.insert(pts.end(), other.hull_.begin(), other.hull_.end());
  return from_points(std::move(pts));
}

double support(const RateRegion& r, double lambda) { return r.support(lambda); }

namespace {

double point_segment_dist(const RatePoint& p, const RatePoint& a, const RatePoint& b) {
  double vx = b.r1 - a.r1, vy = b.r2 - a.r2;
  double wx = p.r1 - a.r1, wy = p.r2 - a.r2;
  double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
  double dx = wx - t * vx, dy = wy - t * vy;
  return std::hypot(dx, dy);
}

double dist_to_region(const RatePoint& p, const RateRegion& r) {
  if (r.contains(p, 0.0)) return 0.0;
  const auto& h = r.hull();
  double best = std::hypot(p.r1 - h.front().r1, p.r2 - h.front().r2);
  for (std::size_t i = 0; i + 1 < h.size(); ++i)
    best = std::min(best, point_segment_dist(p, h[i], h[i + 1]));
  // boundary also runs along both axes
  best = std::min(best, point_segment_dist(p, {0.0, 0.0}, {0.0, r.max_r2()}));
  best = std::min(best, point_segment_dist(p, {0.0, 0.0}, {r.max_r1(), 0.0}));
  return best;
}

double directed_hausdorff(const RateRegion& a, const RateRegion& b, int samples) {
  const auto& h = a.hull();
  double worst = 0.0;
  for (const RatePoint& v : h) worst = std::max(worst, dist_to_region(v, b));
  double total_len = 0.0;
  for (std::size_t i = 0; i + 1 < h.size(); ++i)
    total_len += std::hypot(h[i + 1].r1 - h[i].r1, h[i + 1].r2 - h[i].r2);
  if (total_len <= 0.0) return worst;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    double len = std::hypot(h[i + 1].r1 - h[i].r1, h[i + 1].r2 - h[i].r2);
    int k = std::max(1, static_cast<int>(samples * len / total_len));
    for (int s = 1; s < k; ++s) {
      double t = static_cast<double>(s) / k;
      RatePoint p{h[i].r1 + t * (h[i + 1].r1 - h[i].r1), h[i].r2 + t * (h[i + 1].r2 - h[i].r2)};
      worst = std::max(worst, dist_to_region(p, b));
    }
  }
  return worst;
}

}  // namespace

double hausdorff(const RateRegion& a, const RateRegion& b, int boundary_samples) {
  return std::max(directed_hausdorff(a, b, boundary_samples),
                  directed_hausdorff(b, a, boundary_samples));
}

bool region_contained(const RateRegion& inner, const RateRegion& outer, double tol) {
  for (const RatePoint& v : inner.hull())
    if (!outer.contains(v, tol)) return false;
  return true;
}

RateRegion polygon_from_bounds(double b1, double b2, double s) {
  b1 = clamp0(b1);
  b2 = clamp0(b2);
  s = clamp0(s);
  std::vector<RatePoint> pts;
  pts.push_back({std::min(b1, s), 0.0});
  pts.push_back({0.0, std::min(b2, s)});
  if (std::isfinite(b1)) pts.push_back({b1, std::clamp(s - b1, 0.0, b2)});
  if (std::isfinite(b2)) pts.push_back({std::clamp(s - b2, 0.0, b1), b2});
  for (RatePoint& p : pts) {
    if (!std::isfinite(p.r1)) p.r1 = s;
    if (!std::isfinite(p.r2)) p.r2 = s;
  }
  return RateRegion::from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// Bound evaluators
// ---------------------------------------------------------------------------

namespace {

JointPmf with_outputs(const WiretapBc& ch, const JointPmf& joint) {
  return joint.extend("X", ch.ch_y1, "Y1").extend("X", ch.ch_y2, "Y2").extend("X", ch.ch_z, "Z");
}

using S = std::vector<std::string>;

}  // namespace

InnerBounds eval_inner_bounds(const WiretapBc& ch, const JointPmf& joint) {
  JointPmf j = with_outputs(ch, joint);
  double i_u1y1_tq = conditional_mi(j, {"U1"}, {"Y1"}, {"T", "Q"});
  double i_u2y2_tq = conditional_mi(j, {"U2"}, {"Y2"}, {"T", "Q"});
  double i_uu_tq = conditional_mi(j, {"U1"}, {"U2"}, {"T", "Q"});

  InnerBounds out;
  out.feasible = i_u2y2_tq + i_u1y1_tq >= i_uu_tq - 1e-12;
  if (!out.feasible) return out;

  double i_qu1y1_t = conditional_mi(j, {"Q", "U1"}, {"Y1"}, {"T"});
  double i_qu1z_t = conditional_mi(j, {"Q", "U1"}, {"Z"}, {"T"});
  double i_qu2y2_t = conditional_mi(j, {"Q", "U2"}, {"Y2"}, {"T"});
  double i_qu2z_t = conditional_mi(j, {"Q", "U2"}, {"Z"}, {"T"});
  double i_quuz_t = conditional_mi(j, {"Q", "U1", "U2"}, {"Z"}, {"T"});
  double i_qz_t = conditional_mi(j, {"Q"}, {"Z"}, {"T"});

  double s1 = i_u1y1_tq + i_qu2y2_t - i_quuz_t - i_uu_tq;
  double s2 = i_u2y2_tq + i_qu1y1_t - i_quuz_t - i_uu_tq;
  double s3 = i_qu1y1_t + i_qu2y2_t - i_quuz_t - i_uu_tq - i_qz_t;

  out.r1 = clamp0(i_qu1y1_t - i_qu1z_t);
  out.r2 = clamp0(i_qu2y2_t - i_qu2z_t);
  out.sum = clamp0(std::min({s1, s2, s3}));
  return out;
}

std::optional<RateRegion> eval_inner(const WiretapBc& ch, const JointPmf& joint) {
  InnerBounds b = eval_inner_bounds(ch, joint);
  if (!b.feasible) return std::nullopt;
  return polygon_from_bounds(b.r1, b.r2, b.sum);
}

OuterCorBounds eval_outer_cor_bounds(const WiretapBc& ch, const JointPmf& joint) {
  JointPmf j = with_outputs(ch, joint);
  OuterCorBounds b;
  b.r1 = conditional_mi(j, {"U1"}, {"Y1"}, {"T", "V1"}) -
         conditional_mi(j, {"U1"}, {"Z"}, {"T", "V1"});
  b.r2 = conditional_mi(j, {"U2"}, {"Y2"}, {"T", "V2"}) -
         conditional_mi(j, {"U2"}, {"Z"}, {"T", "V2"});
  b.sum_a = conditional_mi(j, {"X"}, {"Y2"}, {"T", "Z", "V1"}) +
            conditional_mi(j, {"U1"}, {"Y1"}, {"T", "V1"}) -
            conditional_mi(j, {"U1"}, {"Z", "Y2"}, {"T", "V1"});
  b.sum_b = conditional_mi(j, {"X"}, {"Y1"}, {"T", "Z", "V2"}) +
            conditional_mi(j, {"U2"}, {"Y2"}, {"T", "V2"}) -
            conditional_mi(j, {"U2"}, {"Z", "Y1"}, {"T", "V2"});
  return b;
}

RateRegion eval_outer_cor(const WiretapBc& ch, const JointPmf& joint) {
  OuterCorBounds b = eval_outer_cor_bounds(ch, joint);
  return polygon_from_bounds(clamp0(b.r1), clamp0(b.r2), clamp0(std::min(b.sum_a, b.sum_b)));
}

Thm1Bounds eval_outer_thm1_bounds(const WiretapBc& ch, const JointPmf& joint) {
  JointPmf j = with_outputs(ch, joint);
  Thm1Bounds b;
  auto diff = [&j](const S& a, const S& y, const S& cond) {
    return conditional_mi(j, a, y, cond) - conditional_mi(j, a, {"Z"}, cond);
  };
  b.r1[0] = diff({"U1"}, {"Y1"}, {"T", "V1"});
  b.r1[1] = diff({"U1"}, {"Y1", "Y2"}, {"T", "V1", "V2"});
  b.r1[2] = diff({"U1"}, {"Y1"}, {"T", "V1", "U2"});
  b.r1[3] = diff({"U1"}, {"Y1", "Y2"}, {"T", "V1", "U2", "V2"});
  b.r2[0] = diff({"U2"}, {"Y2"}, {"T", "V2"});
  b.r2[1] = diff({"U2"}, {"Y2", "Y1"}, {"T", "V1", "V2"});
  b.r2[2] = diff({"U2"}, {"Y2"}, {"T", "V2", "U1"});
  b.r2[3] = diff({"U2"}, {"Y2", "Y1"}, {"T", "U1", "V1", "V2"});

  // sum constraints: first pair bounds via user 1's codeword (U1 S1), the
  // second pair via user 2's; the second member of each pair treats the two
  // legitimate outputs jointly.
  b.sum[0] = conditional_mi(j, {"X"}, {"Y2"}, {"T", "Z", "V1"}) +
             conditional_mi(j, {"U1", "S1"}, {"Y1"}, {"T", "V1"}) -
             conditional_mi(j, {"U1", "S1"}, {"Z", "Y2"}, {"T", "V1"});
  b.sum[1] = conditional_mi(j, {"X"}, {"Y2"}, {"T", "Z", "V1", "V2"}) +
             conditional_mi(j, {"U1", "S1"}, {"Y1", "Y2"}, {"T", "V1", "V2"}) -
             conditional_mi(j, {"U1", "S1"}, {"Z", "Y2"}, {"T", "V1", "V2"});
  b.sum[2] = conditional_mi(j, {"X"}, {"Y1"}, {"T", "Z", "V2"}) +
             conditional_mi(j, {"U2", "S2"}, {"Y2"}, {"T", "V2"}) -
             conditional_mi(j, {"U2", "S2"}, {"Z", "Y1"}, {"T", "V2"});
  b.sum[3] = conditional_mi(j, {"X"}, {"Y1"}, {"T", "Z", "V1", "V2"}) +
             conditional_mi(j, {"U2", "S2"}, {"Y2", "Y1"}, {"T", "V1", "V2"}) -
             conditional_mi(j, {"U2", "S2"}, {"Z", "Y1"}, {"T", "V1", "V2"});
  return b;
}

RateRegion eval_outer_thm1(const WiretapBc& ch, const JointPmf& joint) {
  Thm1Bounds b = eval_outer_thm1_bounds(ch, joint);
  double r1 = clamp0(*std::min_element(b.r1.begin(), b.r1.end()));
  double r2 = clamp0(*std::min_element(b.r2.begin(), b.r2.end()));
  double s = clamp0(*std::min_element(b.sum.begin(), b.sum.end()));
  return polygon_from_bounds(r1, r2, s);
}

// ---------------------------------------------------------------------------
// Randomized search over auxiliaries
// ---------------------------------------------------------------------------

int AuxSpec::card(const std::string& name) const {
  auto it = cards.find(name);
  if (it != cards.end()) {
    if (it->second < 1) throw std::invalid_argument("AuxSpec: cardinality must be >= 1");
    return it->second;
  }
  return name == "T" ? 1 : 2;
}

namespace {

struct Block {
  int begin = 0;
  int len = 0;
};

// Generic seeded search: a few canonical structured joints plus
// Dirichlet-sampled per-block weights, evaluated and unioned; the best weight
// vector per support direction is then coordinate-refined. Canonical seeds
// and the refinement-start pool do not depend on the budget, so growing the
// budget only adds sampled polygons and the union stays monotone.
class RegionSearch {
 public:
  RegionSearch(std::vector<Block> blocks,
               std::function<std::optional<RateRegion>(std::span<const double>)> eval)
      : blocks_(std::move(blocks)), eval_(std::move(eval)) {
    dim_ = 0;
    for (const Block& b : blocks_) dim_ = std::max(dim_, b.begin + b.len);
  }

  void add_canonical(std::vector<double> w) { canonical_.push_back(std::move(w)); }
  int dim() const { return dim_; }

  RateRegion run(int budget, std::uint64_t seed) {
    if (budget <= 0) throw std::invalid_argument("search: budget must be positive");
    static const double kLambdas[16] = {0.0,  0.125, 0.25, 0.375, 0.5, 0.75, 1.0, 1.5,
                                        2.0,  3.0,   4.0,  6.0,   8.0, 16.0, 32.0,
                                        kInf};
    struct Sample {
      std::vector<RatePoint> pts;
      std::array<double, 16> sup;
      bool ok = false;
    };
    const int n_canon = static_cast<int>(canonical_.size());
    const int total = n_canon + budget;
    std::vector<Sample> results(static_cast<std::size_t>(total));
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(total));

    parallel_for(total, [&](int i) {
      std::vector<double> w;
      if (i < n_canon) {
        w = canonical_[static_cast<std::size_t>(i)];
      } else {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i - n_canon)));
        w.resize(static_cast<std::size_t>(dim_));
        for (const Block& b : blocks_)
          rng.simplex(std::span<double>(w.data() + b.begin, static_cast<std::size_t>(b.len)));
      }
      auto reg = eval_(w);
      Sample& s = results[static_cast<std::size_t>(i)];
      if (reg) {
        s.ok = true;
        s.pts = reg->hull();
        for (int li = 0; li < 16; ++li) s.sup[static_cast<std::size_t>(li)] = reg->support(kLambdas[li]);
        weights[static_cast<std::size_t>(i)] = std::move(w);
      }
    });

    // refinement starts: canonical seeds plus a fixed-size sample prefix
    constexpr int kRefinePool = 64;
    const int pool = n_canon + std::min(budget, kRefinePool);
    std::vector<RatePoint> cloud;
    int best_idx[16];
    std::fill(std::begin(best_idx), std::end(best_idx), -1);
    for (int i = 0; i < total; ++i) {
      const Sample& s = results[static_cast<std::size_t>(i)];
      if (!s.ok) continue;
      cloud.insert(cloud.end(), s.pts.begin(), s.pts.end());
      if (i >= pool) continue;
      for (int li = 0; li < 16; ++li)
        if (best_idx[li] < 0 ||
            s.sup[static_cast<std::size_t>(li)] >
                results[static_cast<std::size_t>(best_idx[li])].sup[static_cast<std::size_t>(li)] + 1e-15)
          best_idx[li] = i;
    }
    if (cloud.empty()) return RateRegion();
    if (budget < 2) return RateRegion::from_points(std::move(cloud));  // nothing to refine against

    // per-direction coordinate ascent; directions are independent climbs and
    // write only their own buffers
    static const double kSteps[7] = {0.8, 0.4, 0.15, 0.05, 0.015, 0.005, 0.0015};
    std::array<std::vector<RatePoint>, 16> refined;
    parallel_for(16, [&](int li) {
      if (best_idx[li] < 0) return;
      std::vector<double> w = weights[static_cast<std::size_t>(best_idx[li])];
      double cur = results[static_cast<std::size_t>(best_idx[li])].sup[static_cast<std::size_t>(li)];
      for (int round = 0; round < 4; ++round) {
        bool improved = false;
        for (double step : kSteps) {
          for (int coord = 0; coord < dim_; ++coord) {
            for (double factor : {1.0 + step, 1.0 / (1.0 + step)}) {
              double saved = w[static_cast<std::size_t>(coord)];
              w[static_cast<std::size_t>(coord)] = saved * factor;
              auto reg = eval_(w);
              double val = reg ? reg->support(kLambdas[li]) : -1.0;
              if (val > cur + 1e-12) {
                cur = val;
                improved = true;
                refined[static_cast<std::size_t>(li)].insert(
                    refined[static_cast<std::size_t>(li)].end(), reg->hull().begin(),
                    reg->hull().end());
              } else {
                w[static_cast<std::size_t>(coord)] = saved;
              }
            }
          }
        }
        if (!improved) break;
      }
    });
    for (const auto& pts : refined) cloud.insert(cloud.end(), pts.begin(), pts.end());
    return RateRegion::from_points(std::move(cloud));
  }

 private:
  std::vector<Block> blocks_;
  std::vector<std::vector<double>> canonical_;
  std::function<std::optional<RateRegion>(std::span<const double>)> eval_;
  int dim_;
};

// Structured starting joints: identify chosen auxiliaries with X (epsilon
// smoothed so multiplicative refinement can move every cell), the rest
// pinned to their first symbol.
std::vector<double> aligned_seed(const std::vector<Axis>& axes,
                                 const std::vector<std::string>& copy_x) {
  std::size_t total = 1;
  for (const Axis& a : axes) total *= static_cast<std::size_t>(a.size);
  std::vector<double> w(total, 1e-4);
  const int x_axis = static_cast<int>(axes.size()) - 1;
  const int nx = axes[static_cast<std::size_t>(x_axis)].size;
  std::vector<std::size_t> strides(axes.size(), 1);
  for (int i = static_cast<int>(axes.size()) - 2; i >= 0; --i)
    strides[static_cast<std::size_t>(i)] =
        strides[static_cast<std::size_t>(i) + 1] * static_cast<std::size_t>(axes[static_cast<std::size_t>(i) + 1].size);
  for (int x = 0; x < nx; ++x) {
    std::size_t off = strides[static_cast<std::size_t>(x_axis)] * static_cast<std::size_t>(x);
    for (std::size_t ax = 0; ax + 1 < axes.size(); ++ax) {
      bool copies = std::find(copy_x.begin(), copy_x.end(), axes[ax].name) != copy_x.end();
      int v = copies ? x % axes[ax].size : 0;
      off += strides[ax] * static_cast<std::size_t>(v);
    }
    w[off] += 1.0;
  }
  return w;
}

std::vector<double> normalize_block(std::span<const double> w) {
  double sum = 0.0;
  for (double v : w) sum += std::max(0.0, v);
  std::vector<double> out(w.size());
  if (sum <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::max(0.0, w[i]) / sum;
  return out;
}

// One free joint over the given axes: a single Dirichlet block.
JointPmf free_joint(std::span<const double> w, std::vector<Axis> axes) {
  return JointPmf(std::move(axes), normalize_block(w));
}

}  // namespace

RateRegion search_region(const WiretapBc& ch, const AuxSpec& aux, BoundKind bound, int budget,
                         std::uint64_t seed) {
  const int nx = ch.input_size();
  switch (bound) {
    case BoundKind::inner: {
      std::vector<Axis> axes{{"T", aux.card("T")},
                             {"Q", aux.card("Q")},
                             {"U1", aux.card("U1")},
                             {"U2", aux.card("U2")},
                             {"X", nx}};
      std::size_t total = 1;
      for (const Axis& a : axes) total *= static_cast<std::size_t>(a.size);
      RegionSearch search({Block{0, static_cast<int>(total)}},
                          [&ch, axes](std::span<const double> w) {
                            return eval_inner(ch, free_joint(w, axes));
                          });
      search.add_canonical(aligned_seed(axes, {"U1", "U2"}));
      search.add_canonical(aligned_seed(axes, {"U1"}));
      search.add_canonical(aligned_seed(axes, {"U2"}));
      search.add_canonical(aligned_seed(axes, {"Q", "U1", "U2"}));
      search.add_canonical(aligned_seed(axes, {"Q", "U2"}));
      return search.run(budget, seed);
    }
    case BoundKind::outer_cor: {
      std::vector<Axis> axes{{"T", aux.card("T")},   {"V1", aux.card("V1")},
                             {"V2", aux.card("V2")}, {"U1", aux.card("U1")},
                             {"U2", aux.card("U2")}, {"X", nx}};
      std::size_t total = 1;
      for (const Axis& a : axes) total *= static_cast<std::size_t>(a.size);
      RegionSearch search({Block{0, static_cast<int>(total)}},
                          [&ch, axes](std::span<const double> w) {
                            return std::optional<RateRegion>(eval_outer_cor(ch, free_joint(w, axes)));
                          });
      search.add_canonical(aligned_seed(axes, {"U1", "U2"}));
      search.add_canonical(aligned_seed(axes, {"U1"}));
      search.add_canonical(aligned_seed(axes, {"U2"}));
      return search.run(budget, seed);
    }
    case BoundKind::outer_thm1: {
      const int ct = aux.card("T"), cv1 = aux.card("V1"), cv2 = aux.card("V2");
      const int cu1 = aux.card("U1"), cu2 = aux.card("U2");
      const int cs1 = aux.card("S1"), cs2 = aux.card("S2");
      std::vector<Axis> axes{{"T", ct},   {"V1", cv1}, {"V2", cv2}, {"U1", cu1},
                             {"U2", cu2}, {"S1", cs1}, {"S2", cs2}, {"X", nx}};
      const int head = ct * cv1 * cv2 * cu1 * cu2 * cs1 * cs2;
      const int cells = cu1 * cu2 * cs1 * cs2;  // conditioning cells of P_{X|U1 U2 S1 S2}
      std::vector<Block> blocks{Block{0, head}};
      for (int c = 0; c < cells; ++c) blocks.push_back(Block{head + c * nx, nx});

      auto eval = [&ch, axes, head, nx](std::span<const double> w) {
        // build P(t,v1,v2,u1,u2,s1,s2) * P(x|u1,u2,s1,s2); X is the last axis
        std::vector<double> p_head = normalize_block(w.subspan(0, static_cast<std::size_t>(head)));
        std::vector<double> table(static_cast<std::size_t>(head) * static_cast<std::size_t>(nx));
        std::array<int, 7> idx{};
        for (int h = 0; h < head; ++h) {
          int rem = h;
          for (int ax = 6; ax >= 0; --ax) {
            idx[static_cast<std::size_t>(ax)] = rem % axes[static_cast<std::size_t>(ax)].size;
            rem /= axes[static_cast<std::size_t>(ax)].size;
          }
          // conditioning cell (u1,u2,s1,s2) = axes 3..6
          int cell = ((idx[3] * axes[4].size + idx[4]) * axes[5].size + idx[5]) * axes[6].size + idx[6];
          std::vector<double> px = normalize_block(
              w.subspan(static_cast<std::size_t>(head + cell * nx), static_cast<std::size_t>(nx)));
          for (int x = 0; x < nx; ++x)
            table[static_cast<std::size_t>(h) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x)] =
                p_head[static_cast<std::size_t>(h)] * px[static_cast<std::size_t>(x)];
        }
        return std::optional<RateRegion>(eval_outer_thm1(ch, JointPmf(axes, std::move(table))));
      };
      RegionSearch search(std::move(blocks), eval);
      // structured seeds in the factored parameter space: the head marginal
      // of an aligned full joint plus X-conditionals that copy one U axis
      for (bool use_u1 : {true, false}) {
        std::vector<std::string> names = use_u1 ? std::vector<std::string>{"U1"}
                                                : std::vector<std::string>{"U2"};
        std::vector<double> full = aligned_seed(axes, names);
        std::vector<double> w(static_cast<std::size_t>(search.dim()), 1e-4);
        for (int h = 0; h < head; ++h) {
          double s = 0.0;
          for (int x = 0; x < nx; ++x)
            s += full[static_cast<std::size_t>(h) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x)];
          w[static_cast<std::size_t>(h)] = s;
        }
        const int c_u1 = axes[3].size, c_u2 = axes[4].size, c_s1 = axes[5].size, c_s2 = axes[6].size;
        for (int u1 = 0; u1 < c_u1; ++u1)
          for (int u2 = 0; u2 < c_u2; ++u2)
            for (int s1 = 0; s1 < c_s1; ++s1)
              for (int s2 = 0; s2 < c_s2; ++s2) {
                int cell = ((u1 * c_u2 + u2) * c_s1 + s1) * c_s2 + s2;
                int target = use_u1 ? u1 : u2;
                int cap = use_u1 ? c_u1 : c_u2;
                for (int x = 0; x < nx; ++x)
                  w[static_cast<std::size_t>(head + cell * nx + x)] =
                      1e-3 + (x % cap == target ? 1.0 : 0.0);
              }
        search.add_canonical(std::move(w));
      }
      return search.run(budget, seed);
    }
  }
  throw std::logic_error("search_region: unknown bound kind");
}

// ---------------------------------------------------------------------------
// Specialized capacity evaluators
// ---------------------------------------------------------------------------

namespace {

bool is_deterministic(const Dmc& w) {
  for (int x = 0; x < w.input_size(); ++x)
    for (int y = 0; y < w.output_size(); ++y) {
      double v = w.at(x, y);
      if (v > 1e-12 && v < 1.0 - 1e-12) return false;
    }
  return true;
}

void require_nonrefuted(const OrderingReport& rep, const std::string& what) {
  if (rep.holds == Holds::refuted)
    throw std::invalid_argument("premise failed: " + what + " (refuted)");
  if (rep.holds == Holds::undetermined)
    throw std::invalid_argument("premise failed: " + what + " (undetermined: " + rep.note + ")");
}

void require_proved(const OrderingReport& rep, const std::string& what) {
  if (rep.holds != Holds::proved)
    throw std::invalid_argument("premise failed: " + what + " (" + to_string(rep.holds) + ")");
}

// Markov-chain joint P_A * P_{B|A} * P_{X|B} over axes (a_name, b_name, "X").
JointPmf chain_joint(std::span<const double> w, const std::string& a_name, int na,
                     const std::string& b_name, int nb, int nx) {
  std::vector<double> pa = normalize_block(w.subspan(0, static_cast<std::size_t>(na)));
  std::vector<std::vector<double>> pb(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a)
    pb[static_cast<std::size_t>(a)] =
        normalize_block(w.subspan(static_cast<std::size_t>(na + a * nb), static_cast<std::size_t>(nb)));
  std::vector<std::vector<double>> px(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b)
    px[static_cast<std::size_t>(b)] = normalize_block(
        w.subspan(static_cast<std::size_t>(na + na * nb + b * nx), static_cast<std::size_t>(nx)));
  std::vector<double> table(static_cast<std::size_t>(na) * nb * nx);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b)
      for (int x = 0; x < nx; ++x)
        table[(static_cast<std::size_t>(a) * nb + b) * nx + static_cast<std::size_t>(x)] =
            pa[static_cast<std::size_t>(a)] * pb[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
            px[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)];
  return JointPmf({{a_name, na}, {b_name, nb}, {"X", nx}}, std::move(table));
}

std::vector<Block> chain_blocks(int na, int nb, int nx) {
  std::vector<Block> blocks{Block{0, na}};
  for (int a = 0; a < na; ++a) blocks.push_back(Block{na + a * nb, nb});
  for (int b = 0; b < nb; ++b) blocks.push_back(Block{na + na * nb + b * nx, nx});
  return blocks;
}

// chain seed with uniform head layers and a smoothed identity X-conditional
std::vector<double> chain_identity_seed(int na, int nb, int nx) {
  std::vector<double> w(static_cast<std::size_t>(na + na * nb + nb * nx), 1.0);
  for (int b = 0; b < nb; ++b)
    for (int x = 0; x < nx; ++x)
      w[static_cast<std::size_t>(na + na * nb + b * nx + x)] = 1e-3 + (x % nb == b ? 1.0 : 0.0);
  return w;
}

}  // namespace

SemiDetBounds semidet_bounds_at(const WiretapBc& ch, const JointPmf& joint_qux) {
  JointPmf j = with_outputs(ch, joint_qux);
  SemiDetBounds b;
  double h_y1_zq = j.entropy_of({"Y1", "Z", "Q"}) - j.entropy_of({"Z", "Q"});
  double h_y1_zqu = j.entropy_of({"Y1", "Z", "Q", "U"}) - j.entropy_of({"Z", "Q", "U"});
  double gain = conditional_mi(j, {"U"}, {"Y2"}, {"Q"}) - conditional_mi(j, {"U"}, {"Z"}, {"Q"});
  b.r1 = h_y1_zq;
  b.r2 = gain;
  b.sum = h_y1_zqu + gain;
  return b;
}

DegradedBounds degraded_bounds_at(const WiretapBc& ch, const JointPmf& joint_tux) {
  JointPmf j = with_outputs(ch, joint_tux);
  DegradedBounds b;
  b.r1 = conditional_mi(j, {"X"}, {"Y1"}, {"T", "U"}) - conditional_mi(j, {"X"}, {"Z"}, {"T", "U"});
  b.r2 = conditional_mi(j, {"U"}, {"Y2"}, {"T"}) - conditional_mi(j, {"U"}, {"Z"}, {"T"});
  return b;
}

LessNoisyBounds less_noisy_bounds_at(const WiretapBc& ch, const JointPmf& joint_tux) {
  JointPmf j = with_outputs(ch, joint_tux);
  LessNoisyBounds b;
  b.r2 = conditional_mi(j, {"U"}, {"Y2"}, {"T"}) - conditional_mi(j, {"U"}, {"Z"}, {"T"});
  // The premise makes X - Y1 - Z a chain, so I(X;Y1|Z,U,T) equals this
  // difference, which only needs the output marginals.
  b.sum = conditional_mi(j, {"X"}, {"Y1"}, {"U", "T"}) -
          conditional_mi(j, {"X"}, {"Z"}, {"U", "T"}) + b.r2;
  return b;
}

RateRegion capacity_deterministic(const WiretapBc& ch, int grid) {
  if (!is_deterministic(ch.ch_y1) || !is_deterministic(ch.ch_y2))
    throw std::invalid_argument("capacity_deterministic: legitimate channels are not deterministic");
  if (grid < 1) throw std::invalid_argument("capacity_deterministic: grid must be >= 1");
  const int nx = ch.input_size();

  std::vector<RatePoint> cloud;
  std::vector<int> comp;
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == nx - 1) {
      comp.push_back(remaining);
      std::vector<double> px(static_cast<std::size_t>(nx));
      for (int i = 0; i < nx; ++i) px[static_cast<std::size_t>(i)] = static_cast<double>(comp[static_cast<std::size_t>(i)]) / grid;
      JointPmf j = with_outputs(ch, JointPmf({{"X", nx}}, px));
      double hz = j.entropy_of({"Z"});
      double b1 = j.entropy_of({"Y1", "Z"}) - hz;
      double b2 = j.entropy_of({"Y2", "Z"}) - hz;
      double bs = j.entropy_of({"Y1", "Y2", "Z"}) - hz;
      RateRegion poly = polygon_from_bounds(clamp0(b1), clamp0(b2), clamp0(bs));
      cloud.insert(cloud.end(), poly.hull().begin(), poly.hull().end());
      comp.pop_back();
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      comp.push_back(v);
      rec(pos + 1, remaining - v);
      comp.pop_back();
    }
  };
  rec(0, grid);
  return RateRegion::from_points(std::move(cloud));
}

RateRegion capacity_semidet(const WiretapBc& ch, const AuxSpec& aux, int budget, std::uint64_t seed) {
  if (!is_deterministic(ch.ch_y1))
    throw std::invalid_argument("capacity_semidet: Y1 is not a deterministic channel");
  require_nonrefuted(check_less_noisy(ch.ch_y2, ch.ch_z), "Y2 less-noisy than Z");

  const int nq = aux.card("Q") < 2 ? 2 : aux.card("Q");
  const int nu = aux.card("U");
  const int nx = ch.input_size();
  RegionSearch search(chain_blocks(nq, nu, nx), [&ch, nq, nu, nx](std::span<const double> w) {
    SemiDetBounds b = semidet_bounds_at(ch, chain_joint(w, "Q", nq, "U", nu, nx));
    return std::optional<RateRegion>(
        polygon_from_bounds(clamp0(b.r1), clamp0(b.r2), clamp0(b.sum)));
  });
  search.add_canonical(chain_identity_seed(nq, nu, nx));
  return search.run(budget, seed);
}

RateRegion capacity_degraded(const WiretapBc& ch, const AuxSpec& aux, int budget, std::uint64_t seed) {
  require_proved(check_degraded(ch.ch_y1, ch.ch_y2), "Y2 degraded w.r.t. Y1");
  require_nonrefuted(check_less_noisy(ch.ch_y1, ch.ch_z), "Y1 less-noisy than Z");
  require_nonrefuted(check_less_noisy(ch.ch_y2, ch.ch_z), "Y2 less-noisy than Z");

  const int nt = aux.card("T");
  const int nu = aux.card("U");
  const int nx = ch.input_size();
  std::vector<Axis> axes{{"T", nt}, {"U", nu}, {"X", nx}};
  const int total = nt * nu * nx;
  RegionSearch search({Block{0, total}}, [&ch, axes](std::span<const double> w) {
    DegradedBounds b = degraded_bounds_at(ch, free_joint(w, axes));
    return std::optional<RateRegion>(polygon_from_bounds(clamp0(b.r1), clamp0(b.r2), kInf));
  });
  search.add_canonical(aligned_seed(axes, {"U"}));
  search.add_canonical(aligned_seed(axes, {}));
  return search.run(budget, seed);
}

RateRegion capacity_less_noisy(const WiretapBc& ch, const AuxSpec& aux, int budget, std::uint64_t seed) {
  require_nonrefuted(check_less_noisy(ch.ch_y1, ch.ch_y2), "Y1 less-noisy than Y2");
  require_proved(check_degraded(ch.ch_y1, ch.ch_z), "Z degraded w.r.t. Y1");

  const int nt = aux.card("T");
  const int nu = aux.card("U");
  const int nx = ch.input_size();
  RegionSearch search(chain_blocks(nt, nu, nx), [&ch, nt, nu, nx](std::span<const double> w) {
    LessNoisyBounds b = less_noisy_bounds_at(ch, chain_joint(w, "T", nt, "U", nu, nx));
    return std::optional<RateRegion>(polygon_from_bounds(kInf, clamp0(b.r2), clamp0(b.sum)));
  });
  search.add_canonical(chain_identity_seed(nt, nu, nx));
  return search.run(budget, seed);
}

ProductBounds product_bounds_at(const WiretapBc& bc1, const WiretapBc& bc2, const JointPmf& factor1,
                                const JointPmf& factor2) {
  // Component axes: Y = stronger-user output, W = weaker-user output.
  auto lift = [](const WiretapBc& bc, const JointPmf& f) {
    return f.extend("X", bc.ch_y1, "Y").extend("X", bc.ch_y2, "W").extend("X", bc.ch_z, "Z");
  };
  JointPmf j1 = lift(bc1, factor1);
  JointPmf j2 = lift(bc2, factor2);

  // Each component's premises make its eavesdropper a cascade of the
  // conditioning output, so the Z-conditioned terms reduce to differences
  // that depend only on the output marginals.
  double i_x1y1_z1 = conditional_mi(j1, {"X"}, {"Y"}) - conditional_mi(j1, {"X"}, {"Z"});
  double i_x1y1_z1u1 = conditional_mi(j1, {"X"}, {"Y"}, {"U"}) - conditional_mi(j1, {"X"}, {"Z"}, {"U"});
  double gain1 = conditional_mi(j1, {"U"}, {"W"}) - conditional_mi(j1, {"U"}, {"Z"});
  double i_x2t2_z2 = conditional_mi(j2, {"X"}, {"W"}) - conditional_mi(j2, {"X"}, {"Z"});
  double i_x2t2_z2u2 = conditional_mi(j2, {"X"}, {"W"}, {"U"}) - conditional_mi(j2, {"X"}, {"Z"}, {"U"});
  double gain2 = conditional_mi(j2, {"U"}, {"Y"}) - conditional_mi(j2, {"U"}, {"Z"});

  ProductBounds b;
  b.r1 = i_x1y1_z1 + gain2;
  b.r2 = i_x2t2_z2 + gain1;
  b.sum_a = b.r1 + i_x2t2_z2u2;
  b.sum_b = b.r2 + i_x1y1_z1u1;
  return b;
}

ProductBounds product_bounds_at_joint(const WiretapBc& bc1, const WiretapBc& bc2,
                                      const JointPmf& joint, double tol) {
  JointPmf f1 = joint.marginal({"U1", "X1"});
  JointPmf f2 = joint.marginal({"U2", "X2"});
  // factorization validator: joint must equal the product of its factors
  const auto& t = joint.table();
  std::size_t n2 = f2.table().size();
  for (std::size_t i = 0; i < t.size(); ++i) {
    double expect = f1.table()[i / n2] * f2.table()[i % n2];
    if (std::abs(t[i] - expect) > tol)
      throw std::invalid_argument("product_bounds_at_joint: joint is not a product of per-component factors");
  }
  auto rename = [](const JointPmf& f) {
    return JointPmf({{"U", f.axes()[0].size}, {"X", f.axes()[1].size}}, f.table());
  };
  return product_bounds_at(bc1, bc2, rename(f1), rename(f2));
}

RateRegion capacity_product(const WiretapBc& bc1, const WiretapBc& bc2, const AuxSpec& aux,
                            int budget, std::uint64_t seed) {
  require_nonrefuted(check_less_noisy(bc1.ch_y1, bc1.ch_y2), "component 1: Y less-noisy than T");
  require_proved(check_degraded(bc1.ch_y1, bc1.ch_z), "component 1: Z degraded w.r.t. Y");
  require_nonrefuted(check_less_noisy(bc1.ch_y2, bc1.ch_z), "component 1: Z more-noisy than T");
  require_nonrefuted(check_less_noisy(bc2.ch_y2, bc2.ch_y1), "component 2: T less-noisy than Y");
  require_proved(check_degraded(bc2.ch_y2, bc2.ch_z), "component 2: Z degraded w.r.t. T");
  require_nonrefuted(check_less_noisy(bc2.ch_y1, bc2.ch_z), "component 2: Z more-noisy than Y");

  const int nu1 = aux.card("U1");
  const int nu2 = aux.card("U2");
  const int nx1 = bc1.input_size();
  const int nx2 = bc2.input_size();
  std::vector<Block> blocks{Block{0, nu1 * nx1}, Block{nu1 * nx1, nu2 * nx2}};
  auto eval = [&bc1, &bc2, nu1, nu2, nx1, nx2](std::span<const double> w) {
    JointPmf f1({{"U", nu1}, {"X", nx1}},
                normalize_block(w.subspan(0, static_cast<std::size_t>(nu1 * nx1))));
    JointPmf f2({{"U", nu2}, {"X", nx2}},
                normalize_block(w.subspan(static_cast<std::size_t>(nu1 * nx1),
                                          static_cast<std::size_t>(nu2 * nx2))));
    ProductBounds b = product_bounds_at(bc1, bc2, f1, f2);
    return std::optional<RateRegion>(polygon_from_bounds(
        clamp0(b.r1), clamp0(b.r2), clamp0(std::min(b.sum_a, b.sum_b))));
  };
  RegionSearch search(std::move(blocks), eval);
  // identity couplings per factor
  std::vector<double> diag(static_cast<std::size_t>(nu1 * nx1 + nu2 * nx2), 1e-3);
  for (int u = 0; u < nu1; ++u)
    for (int x = 0; x < nx1; ++x)
      if (x % nu1 == u) diag[static_cast<std::size_t>(u * nx1 + x)] += 1.0;
  for (int u = 0; u < nu2; ++u)
    for (int x = 0; x < nx2; ++x)
      if (x % nu2 == u) diag[static_cast<std::size_t>(nu1 * nx1 + u * nx2 + x)] += 1.0;
  search.add_canonical(std::move(diag));
  return search.run(budget, seed);
}

}  // namespace wbc

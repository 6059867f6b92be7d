#include "wbc/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wbc/rng.hpp"

namespace wbc {

namespace {

// Dense two-phase simplex for small LPs:
//   minimize c.v  s.t.  A_eq v = b_eq,  A_le v <= b_le,  v >= 0.
// Bland's rule, so it cannot cycle. Sized for a few hundred variables.
struct SimplexLp {
  int nvar = 0;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<double> cost;

  struct Result {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> x;
  };

  Result solve() const {
    const int m = static_cast<int>(eq_rows.size() + le_rows.size());
    const int n_slack = static_cast<int>(le_rows.size());
    const int n_total = nvar + n_slack + m;  // structural + slack + artificial
    // tableau rows: constraints, rhs kept separately
    std::vector<std::vector<double>> a(static_cast<std::size_t>(m),
                                       std::vector<double>(static_cast<std::size_t>(n_total), 0.0));
    std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
    std::vector<int> basis(static_cast<std::size_t>(m), -1);

    int r = 0;
    for (std::size_t i = 0; i < eq_rows.size(); ++i, ++r) {
      for (int jv = 0; jv < nvar; ++jv) a[r][static_cast<std::size_t>(jv)] = eq_rows[i][static_cast<std::size_t>(jv)];
      rhs[static_cast<std::size_t>(r)] = eq_rhs[i];
    }
    for (std::size_t i = 0; i < le_rows.size(); ++i, ++r) {
      for (int jv = 0; jv < nvar; ++jv) a[r][static_cast<std::size_t>(jv)] = le_rows[i][static_cast<std::size_t>(jv)];
      a[r][static_cast<std::size_t>(nvar) + i] = 1.0;
      rhs[static_cast<std::size_t>(r)] = le_rhs[i];
    }
    // make rhs nonnegative, then add artificials as the starting basis
    for (int i = 0; i < m; ++i) {
      if (rhs[static_cast<std::size_t>(i)] < 0.0) {
        for (double& v : a[static_cast<std::size_t>(i)]) v = -v;
        rhs[static_cast<std::size_t>(i)] = -rhs[static_cast<std::size_t>(i)];
      }
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(nvar + n_slack + i)] = 1.0;
      basis[static_cast<std::size_t>(i)] = nvar + n_slack + i;
    }

    auto pivot = [&](int row, int col) {
      double piv = a[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
      for (double& v : a[static_cast<std::size_t>(row)]) v /= piv;
      rhs[static_cast<std::size_t>(row)] /= piv;
      for (int i = 0; i < m; ++i) {
        if (i == row) continue;
        double f = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
        if (f == 0.0) continue;
        for (int jv = 0; jv < n_total; ++jv)
          a[static_cast<std::size_t>(i)][static_cast<std::size_t>(jv)] -=
              f * a[static_cast<std::size_t>(row)][static_cast<std::size_t>(jv)];
        rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(row)];
      }
      basis[static_cast<std::size_t>(row)] = col;
    };

    auto run_phase = [&](const std::vector<double>& obj, int limit_cols) -> double {
      // reduced costs maintained implicitly: z_j - c_j computed on demand
      const double eps = 1e-11;
      for (long iter = 0; iter < 100000; ++iter) {
        // reduced cost: c_j - sum_i c_B(i) a_ij ; pick first negative (Bland)
        int enter = -1;
        for (int jv = 0; jv < limit_cols; ++jv) {
          bool in_basis = false;
          for (int i = 0; i < m; ++i)
            if (basis[static_cast<std::size_t>(i)] == jv) { in_basis = true; break; }
          if (in_basis) continue;
          double red = obj[static_cast<std::size_t>(jv)];
          for (int i = 0; i < m; ++i) {
            int bi = basis[static_cast<std::size_t>(i)];
            double cb = obj[static_cast<std::size_t>(bi)];
            if (cb != 0.0) red -= cb * a[static_cast<std::size_t>(i)][static_cast<std::size_t>(jv)];
          }
          if (red < -eps) { enter = jv; break; }
        }
        if (enter < 0) break;
        int leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
          double aij = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
          if (aij > eps) {
            double ratio = rhs[static_cast<std::size_t>(i)] / aij;
            if (ratio < best - 1e-15 ||
                (ratio < best + 1e-15 && (leave < 0 || basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]))) {
              best = ratio;
              leave = i;
            }
          }
        }
        if (leave < 0) return -std::numeric_limits<double>::infinity();  // unbounded
        pivot(leave, enter);
      }
      double val = 0.0;
      for (int i = 0; i < m; ++i) {
        int bi = basis[static_cast<std::size_t>(i)];
        val += obj[static_cast<std::size_t>(bi)] * rhs[static_cast<std::size_t>(i)];
      }
      return val;
    };

    // phase 1: minimize sum of artificials
    std::vector<double> obj1(static_cast<std::size_t>(n_total), 0.0);
    for (int i = 0; i < m; ++i) obj1[static_cast<std::size_t>(nvar + n_slack + i)] = 1.0;
    double art = run_phase(obj1, n_total);
    Result res;
    if (art > 1e-7) return res;  // infeasible

    // drive remaining artificials out of the basis where possible
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] >= nvar + n_slack) {
        for (int jv = 0; jv < nvar + n_slack; ++jv) {
          if (std::abs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(jv)]) > 1e-9) {
            pivot(i, jv);
            break;
          }
        }
      }
    }

    // phase 2 on structural + slack columns only
    std::vector<double> obj2(static_cast<std::size_t>(n_total), 0.0);
    for (int jv = 0; jv < nvar; ++jv) obj2[static_cast<std::size_t>(jv)] = cost[static_cast<std::size_t>(jv)];
    // forbid re-entering artificials by pricing them prohibitively
    for (int jv = nvar + n_slack; jv < n_total; ++jv) obj2[static_cast<std::size_t>(jv)] = 1e9;
    double opt = run_phase(obj2, n_total);

    res.feasible = true;
    res.objective = opt;
    res.x.assign(static_cast<std::size_t>(nvar), 0.0);
    for (int i = 0; i < m; ++i) {
      int bi = basis[static_cast<std::size_t>(i)];
      if (bi < nvar) res.x[static_cast<std::size_t>(bi)] = rhs[static_cast<std::size_t>(i)];
    }
    return res;
  }
};

double mi_of(const std::vector<double>& px, const Dmc& w) {
  // local copy of I(X;Y) on raw vectors (avoids Pmf validation in hot loops)
  std::vector<double> py(static_cast<std::size_t>(w.output_size()), 0.0);
  double hyx = 0.0;
  for (int x = 0; x < w.input_size(); ++x) {
    double p = px[static_cast<std::size_t>(x)];
    if (p < 1e-15) continue;
    double hr = 0.0;
    for (int y = 0; y < w.output_size(); ++y) {
      double v = w.at(x, y);
      if (v > 1e-15) hr -= v * std::log2(v);
      py[static_cast<std::size_t>(y)] += p * v;
    }
    hyx += p * hr;
  }
  double hy = 0.0;
  for (double v : py)
    if (v > 1e-15) hy -= v * std::log2(v);
  return hy - hyx;
}

// All compositions of `grid` into k nonnegative parts, as simplex points.
void simplex_grid(int k, int grid, std::vector<std::vector<double>>& out) {
  std::vector<int> comp(static_cast<std::size_t>(k), 0);
  // iterative composition enumeration
  std::vector<int> stack{grid};
  std::vector<std::vector<int>> results;
  std::vector<int> cur;
  // recursion via explicit lambda
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == k - 1) {
      cur.push_back(remaining);
      results.push_back(cur);
      cur.pop_back();
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur.push_back(v);
      self(self, pos + 1, remaining - v);
      cur.pop_back();
    }
  };
  rec(rec, 0, grid);
  out.reserve(results.size());
  for (const auto& comp_v : results) {
    std::vector<double> p(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) p[static_cast<std::size_t>(i)] = static_cast<double>(comp_v[static_cast<std::size_t>(i)]) / grid;
    out.push_back(std::move(p));
  }
}

}  // namespace

OrderingReport check_degraded(const Dmc& w_strong, const Dmc& w_weak, double tol) {
  if (w_strong.input_size() != w_weak.input_size())
    throw std::invalid_argument("check_degraded: input alphabet mismatch");
  const int nx = w_strong.input_size();
  const int ny = w_strong.output_size();
  const int nz = w_weak.output_size();

  // variables: q_{y,z} (ny*nz) then t_{x,z} (nx*nz)
  SimplexLp lp;
  lp.nvar = ny * nz + nx * nz;
  auto qv = [nz](int y, int z) { return y * nz + z; };
  auto tv = [ny, nz](int x, int z) { return ny * nz + x * nz + z; };

  for (int y = 0; y < ny; ++y) {
    std::vector<double> row(static_cast<std::size_t>(lp.nvar), 0.0);
    for (int z = 0; z < nz; ++z) row[static_cast<std::size_t>(qv(y, z))] = 1.0;
    lp.eq_rows.push_back(std::move(row));
    lp.eq_rhs.push_back(1.0);
  }
  for (int x = 0; x < nx; ++x)
    for (int z = 0; z < nz; ++z) {
      std::vector<double> pos(static_cast<std::size_t>(lp.nvar), 0.0);
      for (int y = 0; y < ny; ++y) pos[static_cast<std::size_t>(qv(y, z))] = w_strong.at(x, y);
      pos[static_cast<std::size_t>(tv(x, z))] = -1.0;
      std::vector<double> neg = pos;
      for (int y = 0; y < ny; ++y) neg[static_cast<std::size_t>(qv(y, z))] = -w_strong.at(x, y);
      lp.le_rows.push_back(std::move(pos));
      lp.le_rhs.push_back(w_weak.at(x, z));
      lp.le_rows.push_back(std::move(neg));
      lp.le_rhs.push_back(-w_weak.at(x, z));
    }
  lp.cost.assign(static_cast<std::size_t>(lp.nvar), 0.0);
  for (int x = 0; x < nx; ++x)
    for (int z = 0; z < nz; ++z) lp.cost[static_cast<std::size_t>(tv(x, z))] = 1.0;

  OrderingReport rep;
  rep.relation = Relation::degraded;
  auto sol = lp.solve();
  if (!sol.feasible) {
    rep.holds = Holds::undetermined;
    rep.note = "LP solver failed to find a feasible basis";
    return rep;
  }

  // assemble witness kernel (rows renormalized against LP rounding)
  std::vector<double> qm(static_cast<std::size_t>(ny) * nz, 0.0);
  for (int y = 0; y < ny; ++y) {
    double s = 0.0;
    for (int z = 0; z < nz; ++z) {
      double v = std::max(0.0, sol.x[static_cast<std::size_t>(qv(y, z))]);
      qm[static_cast<std::size_t>(y) * nz + z] = v;
      s += v;
    }
    if (s <= 0.0) {
      qm[static_cast<std::size_t>(y) * nz] = 1.0;
      s = 1.0;
    }
    for (int z = 0; z < nz; ++z) qm[static_cast<std::size_t>(y) * nz + z] /= s;
  }
  Dmc witness(ny, nz, std::move(qm));
  Dmc reached = cascade(w_strong, witness);
  double max_tv = 0.0;
  for (int x = 0; x < nx; ++x) {
    double tv_row = 0.0;
    for (int z = 0; z < nz; ++z) tv_row += std::abs(reached.at(x, z) - w_weak.at(x, z));
    max_tv = std::max(max_tv, 0.5 * tv_row);
  }
  rep.residual = max_tv;

  if (sol.objective <= tol) {
    rep.holds = Holds::proved;
    rep.witness = std::move(witness);
  } else if (sol.objective > 10.0 * tol) {
    rep.holds = Holds::refuted;
    rep.residual = std::max(rep.residual, 0.5 * sol.objective / std::max(1, nx));
    rep.note = "minimal L1 mismatch " + std::to_string(sol.objective);
  } else {
    rep.holds = Holds::undetermined;
    rep.note = "LP optimum in the gray zone (tol, 10*tol]";
  }
  return rep;
}

OrderingReport check_less_noisy(const Dmc& w_y, const Dmc& w_z, int samples, std::uint64_t seed) {
  if (w_y.input_size() != w_z.input_size())
    throw std::invalid_argument("check_less_noisy: input alphabet mismatch");
  const int k = w_y.input_size();
  const double viol_tol = 1e-9;

  OrderingReport rep;
  rep.relation = Relation::less_noisy;

  auto f = [&](const std::vector<double>& px) { return mi_of(px, w_y) - mi_of(px, w_z); };
  auto test_pair = [&](const std::vector<double>& p, const std::vector<double>& q) -> bool {
    std::vector<double> mid(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) mid[static_cast<std::size_t>(i)] = 0.5 * (p[static_cast<std::size_t>(i)] + q[static_cast<std::size_t>(i)]);
    double gap = 0.5 * (f(p) + f(q)) - f(mid);
    if (gap > viol_tol) {
      rep.holds = Holds::refuted;
      rep.refuting_inputs = {Pmf(p), Pmf(q)};
      rep.residual = gap;
      rep.note = "midpoint concavity violated by " + std::to_string(gap);
      return true;
    }
    return false;
  };

  // deterministic grid pairs (coarse enough to stay cheap for ternary inputs)
  if (k <= 3) {
    std::vector<std::vector<double>> pts;
    simplex_grid(k, k == 2 ? 64 : 16, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t jj = i + 1; jj < pts.size(); ++jj)
        if (test_pair(pts[i], pts[jj])) return rep;
  }

  Rng rng(mix_seed(seed, 0x6c6e));
  std::vector<double> p(static_cast<std::size_t>(k)), q(static_cast<std::size_t>(k));
  for (int s = 0; s < samples; ++s) {
    rng.simplex(p);
    rng.simplex(q);
    if (test_pair(p, q)) return rep;
  }
  rep.holds = Holds::proved;
  rep.sampled = true;
  rep.note = "no concavity violation found (sampled evidence, not a certificate)";
  return rep;
}

OrderingReport check_more_capable(const Dmc& w_y, const Dmc& w_z, int grid, std::uint64_t seed) {
  if (w_y.input_size() != w_z.input_size())
    throw std::invalid_argument("check_more_capable: input alphabet mismatch");
  const int k = w_y.input_size();
  const double viol_tol = 1e-9;

  OrderingReport rep;
  rep.relation = Relation::more_capable;

  auto test_point = [&](const std::vector<double>& px) -> bool {
    double gap = mi_of(px, w_z) - mi_of(px, w_y);
    if (gap > viol_tol) {
      rep.holds = Holds::refuted;
      rep.refuting_inputs = {Pmf(px)};
      rep.residual = gap;
      rep.note = "I(X;Z) exceeds I(X;Y) by " + std::to_string(gap);
      return true;
    }
    return false;
  };

  if (k <= 3) {
    std::vector<std::vector<double>> pts;
    simplex_grid(k, k == 2 ? grid : std::min(grid, 24), pts);
    for (const auto& px : pts)
      if (test_point(px)) return rep;
  }
  Rng rng(mix_seed(seed, 0x6d63));
  std::vector<double> p(static_cast<std::size_t>(k));
  for (int s = 0; s < 2000; ++s) {
    rng.simplex(p);
    if (test_point(p)) return rep;
  }
  rep.holds = Holds::proved;
  rep.sampled = true;
  rep.note = "no capacity-order violation found (sampled evidence)";
  return rep;
}

BecBscClass classify_bec_bsc(double e, double p) {
  if (e < -1e-12 || e > 1.0 + 1e-12 || p < -1e-12 || p > 0.5 + 1e-12)
    throw std::domain_error("classify_bec_bsc: e in [0,1], p in [0,0.5] required");
  e = std::clamp(e, 0.0, 1.0);
  p = std::clamp(p, 0.0, 0.5);
  if (e <= 2.0 * p) return BecBscClass::degraded;
  if (e <= 4.0 * p * (1.0 - p)) return BecBscClass::less_noisy;
  if (e <= binary_entropy(p)) return BecBscClass::more_capable;
  return BecBscClass::essentially_less_noisy;
}

std::string to_string(BecBscClass c) {
  switch (c) {
    case BecBscClass::degraded: return "degraded";
    case BecBscClass::less_noisy: return "less_noisy";
    case BecBscClass::more_capable: return "more_capable";
    case BecBscClass::essentially_less_noisy: return "essentially_less_noisy";
  }
  return "?";
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::degraded: return "degraded";
    case Relation::less_noisy: return "less_noisy";
    case Relation::more_capable: return "more_capable";
    case Relation::none: return "none";
  }
  return "?";
}

std::string to_string(Holds h) {
  switch (h) {
    case Holds::proved: return "proved";
    case Holds::refuted: return "refuted";
    case Holds::undetermined: return "undetermined";
  }
  return "?";
}

}  // namespace wbc

#include "wbc/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wbc {

namespace {

double check_unit_interval(double x, const char* what) {
  if (x < -1e-12 || x > 1.0 + 1e-12)
    throw std::domain_error(std::string(what) + " outside [0,1]");
  return std::clamp(x, 0.0, 1.0);
}

double plog2p(double p) {
  if (p < kEntropyZero) return 0.0;
  return p * std::log2(p);
}

}  // namespace

double binary_entropy(double x) {
  x = check_unit_interval(x, "binary_entropy argument");
  return -plog2p(x) - plog2p(1.0 - x);
}

double bconv(double x, double y) {
  x = check_unit_interval(x, "bconv x");
  y = check_unit_interval(y, "bconv y");
  return x * (1.0 - y) + (1.0 - x) * y;
}

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("Pmf: empty alphabet");
  double sum = 0.0;
  for (double& p : probs_) {
    if (p < -1e-12) throw std::invalid_argument("Pmf: negative entry");
    if (p < 0.0) p = 0.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPmfSumTol)
    throw std::invalid_argument("Pmf: entries sum to " + std::to_string(sum));
}

Pmf Pmf::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double& w : weights) {
    if (w < -1e-12) throw std::invalid_argument("Pmf::normalized: negative weight");
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("Pmf::normalized: zero total weight");
  for (double& w : weights) w /= sum;
  return Pmf(std::move(weights));
}

Pmf Pmf::uniform(int n) {
  return Pmf(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

Pmf Pmf::point_mass(int n, int at) {
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  p.at(static_cast<std::size_t>(at)) = 1.0;
  return Pmf(std::move(p));
}

double entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) h -= plog2p(v);
  return h;
}

Dmc::Dmc(int input_size, int output_size, std::vector<double> rows_row_major)
    : in_(input_size), out_(output_size), rows_(std::move(rows_row_major)) {
  if (in_ <= 0 || out_ <= 0) throw std::invalid_argument("Dmc: nonpositive size");
  if (rows_.size() != static_cast<std::size_t>(in_) * out_)
    throw std::invalid_argument("Dmc: row data size mismatch");
  for (int x = 0; x < in_; ++x) row(x);  // each row must be a valid Pmf
}

Dmc Dmc::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("Dmc: no rows");
  std::size_t out = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * out);
  for (const auto& r : rows) {
    if (r.size() != out) throw std::invalid_argument("Dmc: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Dmc(static_cast<int>(rows.size()), static_cast<int>(out), std::move(flat));
}

Pmf Dmc::row(int x) const {
  auto first = rows_.begin() + static_cast<std::ptrdiff_t>(x) * out_;
  return Pmf(std::vector<double>(first, first + out_));
}

Dmc make_bsc(double p) {
  p = check_unit_interval(p, "make_bsc p");
  return Dmc(2, 2, {1.0 - p, p, p, 1.0 - p});
}

Dmc make_bec(double e) {
  e = check_unit_interval(e, "make_bec e");
  return Dmc(2, 3, {1.0 - e, 0.0, e, 0.0, 1.0 - e, e});
}

Dmc make_deterministic(const std::vector<int>& f, int output_size) {
  if (f.empty()) throw std::invalid_argument("make_deterministic: empty map");
  std::vector<double> rows(f.size() * static_cast<std::size_t>(output_size), 0.0);
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (f[x] < 0 || f[x] >= output_size)
      throw std::invalid_argument("make_deterministic: image out of range");
    rows[x * output_size + static_cast<std::size_t>(f[x])] = 1.0;
  }
  return Dmc(static_cast<int>(f.size()), output_size, std::move(rows));
}

Dmc cascade(const Dmc& w1, const Dmc& q) {
  if (w1.output_size() != q.input_size())
    throw std::invalid_argument("cascade: dimension mismatch");
  std::vector<double> rows(static_cast<std::size_t>(w1.input_size()) * q.output_size(), 0.0);
  for (int x = 0; x < w1.input_size(); ++x)
    for (int y = 0; y < w1.output_size(); ++y) {
      double pxy = w1.at(x, y);
      if (pxy == 0.0) continue;
      for (int z = 0; z < q.output_size(); ++z)
        rows[static_cast<std::size_t>(x) * q.output_size() + z] += pxy * q.at(y, z);
    }
  return Dmc(w1.input_size(), q.output_size(), std::move(rows));
}

Dmc tensor(const Dmc& a, const Dmc& b) {
  int in = a.input_size() * b.input_size();
  int out = a.output_size() * b.output_size();
  std::vector<double> rows(static_cast<std::size_t>(in) * out);
  for (int xa = 0; xa < a.input_size(); ++xa)
    for (int xb = 0; xb < b.input_size(); ++xb) {
      int x = xa * b.input_size() + xb;
      for (int ya = 0; ya < a.output_size(); ++ya)
        for (int yb = 0; yb < b.output_size(); ++yb) {
          int y = ya * b.output_size() + yb;
          rows[static_cast<std::size_t>(x) * out + y] = a.at(xa, ya) * b.at(xb, yb);
        }
    }
  return Dmc(in, out, std::move(rows));
}

double mutual_information(const Pmf& px, const Dmc& w) {
  if (px.size() != w.input_size())
    throw std::invalid_argument("mutual_information: input size mismatch");
  std::vector<double> py(static_cast<std::size_t>(w.output_size()), 0.0);
  double hyx = 0.0;
  for (int x = 0; x < w.input_size(); ++x) {
    double p = px[x];
    if (p < kEntropyZero) continue;
    hyx += p * entropy(w.row(x));
    for (int y = 0; y < w.output_size(); ++y) py[static_cast<std::size_t>(y)] += p * w.at(x, y);
  }
  double hy = 0.0;
  for (double v : py)
    if (v > kEntropyZero) hy -= v * std::log2(v);
  return std::max(0.0, hy - hyx);
}

WiretapBc::WiretapBc(Dmc y1, Dmc y2, Dmc z)
    : ch_y1(std::move(y1)), ch_y2(std::move(y2)), ch_z(std::move(z)) {
  if (ch_y1.input_size() != ch_y2.input_size() || ch_y1.input_size() != ch_z.input_size())
    throw std::invalid_argument("WiretapBc: channels disagree on input alphabet");
}

WiretapBc product_wbc(const WiretapBc& a, const WiretapBc& b, int alphabet_cap) {
  auto guard = [alphabet_cap](long long n, const char* what) {
    if (n > alphabet_cap)
      throw std::invalid_argument(std::string("product_wbc: ") + what + " alphabet exceeds cap");
  };
  guard(static_cast<long long>(a.input_size()) * b.input_size(), "input");
  guard(static_cast<long long>(a.ch_y1.output_size()) * b.ch_y1.output_size(), "y1");
  guard(static_cast<long long>(a.ch_y2.output_size()) * b.ch_y2.output_size(), "y2");
  guard(static_cast<long long>(a.ch_z.output_size()) * b.ch_z.output_size(), "z");
  return WiretapBc(tensor(a.ch_y1, b.ch_y1), tensor(a.ch_y2, b.ch_y2), tensor(a.ch_z, b.ch_z));
}

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> table)
    : axes_(std::move(axes)), table_(std::move(table)) {
  if (axes_.empty()) throw std::invalid_argument("JointPmf: no axes");
  std::size_t total = 1;
  for (const Axis& ax : axes_) {
    if (ax.size <= 0) throw std::invalid_argument("JointPmf: nonpositive axis size");
    total *= static_cast<std::size_t>(ax.size);
    if (total > kTableCap) throw std::invalid_argument("JointPmf: table exceeds size cap");
  }
  if (table_.size() != total) throw std::invalid_argument("JointPmf: table size mismatch");
  double sum = 0.0;
  for (double& v : table_) {
    if (v < -1e-12) throw std::invalid_argument("JointPmf: negative entry");
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > kPmfSumTol)
    throw std::invalid_argument("JointPmf: table sums to " + std::to_string(sum));
  strides_.assign(axes_.size(), 1);
  for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
    strides_[static_cast<std::size_t>(i)] =
        strides_[static_cast<std::size_t>(i) + 1] * static_cast<std::size_t>(axes_[static_cast<std::size_t>(i) + 1].size);
}

int JointPmf::axis(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return static_cast<int>(i);
  throw std::invalid_argument("JointPmf: unknown axis " + std::string(name));
}

std::size_t JointPmf::offset(const std::vector<int>& index) const {
  if (index.size() != axes_.size()) throw std::invalid_argument("JointPmf: bad index rank");
  std::size_t off = 0;
  for (std::size_t i = 0; i < index.size(); ++i) off += strides_[i] * static_cast<std::size_t>(index[i]);
  return off;
}

JointPmf JointPmf::marginal(const std::vector<std::string>& keep) const {
  std::vector<int> keep_idx;
  for (const auto& n : keep) keep_idx.push_back(axis(n));
  std::sort(keep_idx.begin(), keep_idx.end());
  keep_idx.erase(std::unique(keep_idx.begin(), keep_idx.end()), keep_idx.end());
  if (keep_idx.empty()) throw std::invalid_argument("marginal: empty axis set");

  std::vector<Axis> new_axes;
  for (int i : keep_idx) new_axes.push_back(axes_[static_cast<std::size_t>(i)]);
  std::size_t new_total = 1;
  for (const Axis& a : new_axes) new_total *= static_cast<std::size_t>(a.size);

  std::vector<std::size_t> new_strides(keep_idx.size(), 1);
  for (int i = static_cast<int>(keep_idx.size()) - 2; i >= 0; --i)
    new_strides[static_cast<std::size_t>(i)] =
        new_strides[static_cast<std::size_t>(i) + 1] * static_cast<std::size_t>(new_axes[static_cast<std::size_t>(i) + 1].size);

  std::vector<double> out(new_total, 0.0);
  std::vector<int> idx(axes_.size(), 0);
  for (std::size_t off = 0; off < table_.size(); ++off) {
    if (table_[off] != 0.0) {
      std::size_t dst = 0;
      for (std::size_t k = 0; k < keep_idx.size(); ++k)
        dst += new_strides[k] * static_cast<std::size_t>(idx[static_cast<std::size_t>(keep_idx[k])]);
      out[dst] += table_[off];
    }
    for (int ax = static_cast<int>(axes_.size()) - 1; ax >= 0; --ax) {
      if (++idx[static_cast<std::size_t>(ax)] < axes_[static_cast<std::size_t>(ax)].size) break;
      idx[static_cast<std::size_t>(ax)] = 0;
    }
  }
  return JointPmf(std::move(new_axes), std::move(out));
}

JointPmf JointPmf::extend(const std::string& input_axis, const Dmc& ch,
                          const std::string& output_axis) const {
  int src = axis(input_axis);
  if (axes_[static_cast<std::size_t>(src)].size != ch.input_size())
    throw std::invalid_argument("extend: channel input does not match axis size");
  std::vector<Axis> new_axes = axes_;
  new_axes.push_back({output_axis, ch.output_size()});
  std::size_t out_size = static_cast<std::size_t>(ch.output_size());
  std::vector<double> out(table_.size() * out_size, 0.0);

  std::vector<int> idx(axes_.size(), 0);
  for (std::size_t off = 0; off < table_.size(); ++off) {
    double v = table_[off];
    if (v != 0.0) {
      int x = idx[static_cast<std::size_t>(src)];
      for (int y = 0; y < ch.output_size(); ++y)
        out[off * out_size + static_cast<std::size_t>(y)] = v * ch.at(x, y);
    }
    for (int ax = static_cast<int>(axes_.size()) - 1; ax >= 0; --ax) {
      if (++idx[static_cast<std::size_t>(ax)] < axes_[static_cast<std::size_t>(ax)].size) break;
      idx[static_cast<std::size_t>(ax)] = 0;
    }
  }
  return JointPmf(std::move(new_axes), std::move(out));
}

double JointPmf::entropy_of(const std::vector<std::string>& names) const {
  JointPmf m = marginal(names);
  double h = 0.0;
  for (double v : m.table())
    if (v > kEntropyZero) h -= v * std::log2(v);
  return h;
}

Pmf JointPmf::axis_marginal(const std::string& name) const {
  return Pmf(marginal({name}).table());
}

double conditional_mi(const JointPmf& j, const std::vector<std::string>& a,
                      const std::vector<std::string>& b,
                      const std::vector<std::string>& c) {
  if (a.empty() || b.empty()) return 0.0;
  auto contains = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const auto& n : a) {
    if (contains(b, n) || contains(c, n))
      throw std::invalid_argument("conditional_mi: overlapping axis sets");
    j.axis(n);
  }
  for (const auto& n : b) {
    if (contains(c, n)) throw std::invalid_argument("conditional_mi: overlapping axis sets");
    j.axis(n);
  }
  for (const auto& n : c) j.axis(n);

  auto join = [](std::vector<std::string> u, const std::vector<std::string>& v) {
    u.insert(u.end(), v.begin(), v.end());
    return u;
  };
  double h_ac = j.entropy_of(join(a, c));
  double h_bc = j.entropy_of(join(b, c));
  double h_abc = j.entropy_of(join(join(a, b), c));
  double h_c = c.empty() ? 0.0 : j.entropy_of(c);
  return std::max(0.0, h_ac + h_bc - h_abc - h_c);
}

double ck_identity_check(const JointPmf& joint, int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("ck_identity_check: n must be in [1,4]");
  if (joint.axis_count() != 2 * n + 1)
    throw std::invalid_argument("ck_identity_check: joint must have 2n+1 axes");
  auto name = [&joint](int i) { return joint.axes()[static_cast<std::size_t>(i)].name; };
  const std::string c_name = name(2 * n);

  double sum_a = 0.0, sum_b = 0.0;
  for (int i = 1; i <= n; ++i) {
    // I(Y_{i+1}^n ; X_i | C X^{i-1})
    std::vector<std::string> ys, cond_a{c_name};
    for (int k = i + 1; k <= n; ++k) ys.push_back(name(n + k - 1));
    for (int k = 1; k < i; ++k) cond_a.push_back(name(k - 1));
    sum_a += conditional_mi(joint, ys, {name(i - 1)}, cond_a);

    // I(X^{i-1} ; Y_i | C Y_{i+1}^n)
    std::vector<std::string> xs, cond_b{c_name};
    for (int k = 1; k < i; ++k) xs.push_back(name(k - 1));
    for (int k = i + 1; k <= n; ++k) cond_b.push_back(name(n + k - 1));
    sum_b += conditional_mi(joint, xs, {name(n + i - 1)}, cond_b);
  }
  return std::abs(sum_a - sum_b);
}

}  // namespace wbc

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wbc {

// All information quantities in this library are in bits (log base 2).
inline constexpr double kPmfSumTol = 1e-9;
inline constexpr double kEntropyZero = 1e-15;  // below this, treated as exact 0

double binary_entropy(double x);       // h2(x); throws std::domain_error outside [0,1]
double bconv(double x, double y);      // x*(1-y) + (1-x)*y

// Probability vector over a finite alphabet. Validation is strict: entries
// must be nonnegative and sum to 1 within kPmfSumTol; no silent renormalizing.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs);
  static Pmf normalized(std::vector<double> weights);  // ingestion helper
  static Pmf uniform(int n);
  static Pmf point_mass(int n, int at);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

double entropy(const Pmf& p);  // Shannon entropy, bits

// Discrete memoryless channel: row-stochastic matrix, rows[x][y] = P(y|x).
class Dmc {
 public:
  Dmc(int input_size, int output_size, std::vector<double> rows_row_major);
  static Dmc from_rows(const std::vector<std::vector<double>>& rows);

  int input_size() const { return in_; }
  int output_size() const { return out_; }
  double at(int x, int y) const {
    return rows_[static_cast<std::size_t>(x) * out_ + y];
  }
  Pmf row(int x) const;
  const std::vector<double>& raw() const { return rows_; }

 private:
  int in_, out_;
  std::vector<double> rows_;
};

Dmc make_bsc(double p);                 // 2x2 symmetric channel
Dmc make_bec(double e);                 // 2x3, erasure symbol at output index 2
Dmc make_deterministic(const std::vector<int>& f, int output_size);
Dmc cascade(const Dmc& w1, const Dmc& q);           // X->Y then Y->Z
Dmc tensor(const Dmc& a, const Dmc& b);             // product channel
double mutual_information(const Pmf& px, const Dmc& w);  // I(X;Y), bits

// Broadcast channel with two legitimate receivers and an eavesdropper, all
// sharing the input alphabet. The three outputs are modeled by their
// marginal channels; given x they are drawn independently of each other.
struct WiretapBc {
  Dmc ch_y1, ch_y2, ch_z;
  WiretapBc(Dmc y1, Dmc y2, Dmc z);
  int input_size() const { return ch_y1.input_size(); }
};

// Product of two wiretap BCs: inputs pair up, each component channel is the
// tensor product of the factors'. Throws if any product alphabet exceeds cap.
WiretapBc product_wbc(const WiretapBc& a, const WiretapBc& b, int alphabet_cap = 4096);

struct Axis {
  std::string name;
  int size = 0;
};

// Dense joint probability table over named finite variables, row-major with
// the last axis fastest. Total size capped so 8-variable joints stay sane.
class JointPmf {
 public:
  static constexpr std::size_t kTableCap = std::size_t{1} << 24;

  JointPmf(std::vector<Axis> axes, std::vector<double> table);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& table() const { return table_; }
  int axis_count() const { return static_cast<int>(axes_.size()); }
  int axis(std::string_view name) const;  // index of named axis; throws if unknown
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  std::size_t offset(const std::vector<int>& index) const;

  // Marginal onto a subset of axes (kept in their original order).
  JointPmf marginal(const std::vector<std::string>& keep) const;
  // Appends an output axis: new variable drawn through `ch` from `input_axis`.
  JointPmf extend(const std::string& input_axis, const Dmc& ch,
                  const std::string& output_axis) const;
  // Entropy of the marginal on the named axes (all axes if empty handled by caller).
  double entropy_of(const std::vector<std::string>& names) const;
  // Distribution of one axis.
  Pmf axis_marginal(const std::string& name) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> table_;
  std::vector<std::size_t> strides_;
};

// I(A;B|C) over disjoint named axis sets. Empty A or B gives 0.
double conditional_mi(const JointPmf& j, const std::vector<std::string>& a,
                      const std::vector<std::string>& b,
                      const std::vector<std::string>& c = {});

// Telescoping sum-identity defect for a joint over (X_1..X_n, Y_1..Y_n, C),
// axes taken by position. Exact identity: result should vanish to rounding.
double ck_identity_check(const JointPmf& joint, int n);

}  // namespace wbc

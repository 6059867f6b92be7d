#include "wbc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "wbc/parallel.hpp"
#include "wbc/rng.hpp"

namespace wbc::sim {

namespace {

constexpr double kZero = 1e-15;

long round_count(double exponent_bits, int n) {
  double v = std::exp2(exponent_bits * n);
  long c = std::lround(v);
  return c < 1 ? 1 : c;
}

// conditional table P(B|A=a) from a joint marginal over (A,B)
std::vector<std::vector<double>> conditional_rows(const JointPmf& joint_ab) {
  int na = joint_ab.axes()[0].size;
  int nb = joint_ab.axes()[1].size;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(na),
                                        std::vector<double>(static_cast<std::size_t>(nb), 0.0));
  for (int a = 0; a < na; ++a) {
    double pa = 0.0;
    for (int b = 0; b < nb; ++b) pa += joint_ab.table()[static_cast<std::size_t>(a) * nb + b];
    for (int b = 0; b < nb; ++b)
      rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          pa > kZero ? joint_ab.table()[static_cast<std::size_t>(a) * nb + b] / pa : 1.0 / nb;
  }
  return rows;
}

}  // namespace

double delta_n(int n, double c) {
  if (n < 1) throw std::invalid_argument("delta_n: n must be >= 1");
  if (c <= 0.0) throw std::invalid_argument("delta_n: c must be positive");
  return c * std::pow(static_cast<double>(n), -1.0 / 3.0);
}

bool is_typical(std::span<const Sym> seq, const Pmf& p, double delta) {
  std::vector<long> counts(static_cast<std::size_t>(p.size()), 0);
  for (Sym s : seq) {
    if (s >= p.size()) throw std::invalid_argument("is_typical: symbol outside alphabet");
    if (p[s] < kZero) return false;  // forbidden symbol
    ++counts[s];
  }
  const double n = static_cast<double>(seq.size());
  for (int a = 0; a < p.size(); ++a)
    if (p[a] >= kZero && std::abs(counts[static_cast<std::size_t>(a)] / n - p[a]) > delta)
      return false;
  return true;
}

bool is_cond_typical(std::span<const Sym> y_seq, std::span<const Sym> x_seq, const Dmc& w,
                     double delta) {
  if (y_seq.size() != x_seq.size())
    throw std::invalid_argument("is_cond_typical: length mismatch");
  const int nx = w.input_size(), ny = w.output_size();
  std::vector<long> joint(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<long> xcount(static_cast<std::size_t>(nx), 0);
  for (std::size_t i = 0; i < x_seq.size(); ++i) {
    ++joint[static_cast<std::size_t>(x_seq[i]) * ny + y_seq[i]];
    ++xcount[x_seq[i]];
  }
  const double n = static_cast<double>(x_seq.size());
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) {
      long nab = joint[static_cast<std::size_t>(a) * ny + b];
      if (w.at(a, b) < kZero) {
        if (nab != 0) return false;
      } else if (std::abs(nab / n - xcount[static_cast<std::size_t>(a)] / n * w.at(a, b)) > delta) {
        return false;
      }
    }
  return true;
}

bool is_joint_typical(const std::vector<std::span<const Sym>>& seqs, const JointPmf& law,
                      double delta) {
  if (seqs.empty() || seqs.size() != law.axes().size())
    throw std::invalid_argument("is_joint_typical: sequence/axis count mismatch");
  const std::size_t n = seqs[0].size();
  for (const auto& s : seqs)
    if (s.size() != n) throw std::invalid_argument("is_joint_typical: length mismatch");
  std::vector<long> counts(law.table().size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < seqs.size(); ++k)
      off += law.stride(static_cast<int>(k)) * seqs[k][i];
    if (law.table()[off] < kZero) return false;  // forbidden atom, bail early
    ++counts[off];
  }
  const double dn = static_cast<double>(n);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    double p = law.table()[c];
    if (p >= kZero && std::abs(counts[c] / dn - p) > delta) return false;
  }
  return true;
}

CodebookCounts derive_counts(const SimConfig& cfg) {
  CodebookCounts c;
  c.count0 = round_count(cfg.t0, cfg.n);
  c.count1 = round_count(cfg.t1, cfg.n);
  c.count2 = round_count(cfg.t2, cfg.n);
  c.bins0 = round_count(cfg.rbar0, cfg.n);
  c.bins1 = round_count(cfg.rbar1, cfg.n);
  c.bins2 = round_count(cfg.rbar2, cfg.n);
  c.subbins1 = round_count(cfg.rtilde1, cfg.n);
  c.subbins2 = round_count(cfg.rtilde2, cfg.n);
  const double n = cfg.n;
  c.t0_real = std::log2(static_cast<double>(c.count0)) / n;
  c.t1_real = std::log2(static_cast<double>(c.count1)) / n;
  c.t2_real = std::log2(static_cast<double>(c.count2)) / n;
  c.rbar0_real = std::log2(static_cast<double>(c.bins0)) / n;
  c.rbar1_real = std::log2(static_cast<double>(c.bins1)) / n;
  c.rbar2_real = std::log2(static_cast<double>(c.bins2)) / n;
  c.rtilde1_real = std::log2(static_cast<double>(c.subbins1)) / n;
  c.rtilde2_real = std::log2(static_cast<double>(c.subbins2)) / n;
  return c;
}

void SimConfig::validate() const {
  if (n < 1) throw std::invalid_argument("SimConfig: n must be >= 1");
  if (trials < 0) throw std::invalid_argument("SimConfig: negative trial count");
  if (aux.axis_count() != 4)
    throw std::invalid_argument("SimConfig: aux joint must have axes (Q,U1,U2,X)");
  aux.axis("Q");
  aux.axis("U1");
  aux.axis("U2");
  if (aux.axes()[static_cast<std::size_t>(aux.axis("X"))].size != channel.input_size())
    throw std::invalid_argument("SimConfig: aux X axis does not match the channel input");
  if (std::abs(rbar0 - (r01 + r02)) > 1e-9)
    throw std::invalid_argument("SimConfig: rbar0 must equal r01 + r02");
  if (rbar1 < -1e-12 || rbar2 < -1e-12)
    throw std::invalid_argument("SimConfig: negative private message rate");
  if (rtilde1 < -1e-12 || rtilde1 > t1 - rbar1 + 1e-9)
    throw std::invalid_argument("SimConfig: rtilde1 outside [0, t1 - rbar1]");
  if (rtilde2 < -1e-12 || rtilde2 > t2 - rbar2 + 1e-9)
    throw std::invalid_argument("SimConfig: rtilde2 outside [0, t2 - rbar2]");
  CodebookCounts c = derive_counts(*this);
  if (c.count0 * (1 + c.count1 + c.count2) > kCodewordCap)
    throw std::length_error("SimConfig: codeword count exceeds the enumerability cap");
  if (c.bins0 > c.count0 || c.bins1 * c.subbins1 > c.count1 || c.bins2 * c.subbins2 > c.count2)
    throw std::invalid_argument("SimConfig: bins/sub-bins do not fit in the codeword counts");
}

Codebook gen_codebook(const SimConfig& cfg) {
  cfg.validate();
  Codebook cb;
  cb.counts = derive_counts(cfg);
  cb.n = cfg.n;

  const Pmf pq = cfg.aux.axis_marginal("Q");
  auto pu1_rows = conditional_rows(cfg.aux.marginal({"Q", "U1"}));
  auto pu2_rows = conditional_rows(cfg.aux.marginal({"Q", "U2"}));

  Rng rng(mix_seed(cfg.seed, 0xC0DEB00C));
  cb.q_words.resize(static_cast<std::size_t>(cb.counts.count0) * cfg.n);
  for (long s0 = 0; s0 < cb.counts.count0; ++s0)
    for (int i = 0; i < cfg.n; ++i)
      cb.q_words[static_cast<std::size_t>(s0) * cfg.n + static_cast<std::size_t>(i)] =
          static_cast<Sym>(rng.categorical(pq.probs()));

  for (int j = 0; j < 2; ++j) {
    const auto& rows = j == 0 ? pu1_rows : pu2_rows;
    long cnt = j == 0 ? cb.counts.count1 : cb.counts.count2;
    cb.u_words[j].resize(static_cast<std::size_t>(cb.counts.count0) * cnt * cfg.n);
    for (long s0 = 0; s0 < cb.counts.count0; ++s0) {
      std::span<const Sym> q = cb.q_word(s0);
      for (long s = 0; s < cnt; ++s) {
        Sym* word = cb.u_words[j].data() + (s0 * cnt + s) * cfg.n;
        for (int i = 0; i < cfg.n; ++i)
          word[i] = static_cast<Sym>(rng.categorical(rows[q[i]]));
      }
    }
  }
  return cb;
}

namespace {

// members of bin w in layer with `bins` bins: indices w, w+bins, ...
long bin_size(long total, long bins, long w) { return (total - w + bins - 1) / bins; }

// sub-bin members of (w, l): ranks r with r mod subbins == l
long subbin_size(long total, long bins, long subbins, long w, long l) {
  long ranks = bin_size(total, bins, w);
  return (ranks - l + subbins - 1) / subbins;
}

long subbin_member(long bins, long subbins, long w, long l, long m) {
  return w + (l + m * subbins) * bins;
}

}  // namespace

EncodeResult encode(const Codebook& cb, const SimConfig& cfg, long w0, long w1, long w2,
                    std::uint64_t trial_seed) {
  const CodebookCounts& c = cb.counts;
  if (w0 < 0 || w0 >= c.bins0 || w1 < 0 || w1 >= c.bins1 || w2 < 0 || w2 >= c.bins2)
    throw std::out_of_range("encode: message index outside its bin range");

  Rng rng(mix_seed(trial_seed, 0xE6C0DE));
  long m0 = bin_size(c.count0, c.bins0, w0);
  long s0 = w0 + static_cast<long>(rng.uniform_int(static_cast<int>(m0))) * c.bins0;
  long l1 = rng.uniform_int(static_cast<int>(c.subbins1));
  long l2 = rng.uniform_int(static_cast<int>(c.subbins2));

  const JointPmf law = cfg.aux.marginal({"Q", "U1", "U2"});
  const double delta = delta_n(cfg.n, cfg.delta_coefficient);
  std::span<const Sym> q = cb.q_word(s0);

  EncodeResult res;
  long m1 = subbin_size(c.count1, c.bins1, c.subbins1, w1, l1);
  long m2 = subbin_size(c.count2, c.bins2, c.subbins2, w2, l2);
  for (long i1 = 0; i1 < m1 && !res.ok; ++i1) {
    long s1 = subbin_member(c.bins1, c.subbins1, w1, l1, i1);
    std::span<const Sym> u1 = cb.u_word(0, s0, s1);
    for (long i2 = 0; i2 < m2; ++i2) {
      long s2 = subbin_member(c.bins2, c.subbins2, w2, l2, i2);
      std::span<const Sym> u2 = cb.u_word(1, s0, s2);
      if (is_joint_typical({q, u1, u2}, law, delta)) {
        res.ok = true;
        res.s0 = s0;
        res.s1 = s1;
        res.s2 = s2;
        break;
      }
    }
  }
  if (!res.ok) return res;

  // symbolwise channel-prefixing draw of X given (q, u1, u2)
  const JointPmf qu_x = cfg.aux.marginal({"Q", "U1", "U2", "X"});
  const int nx = cfg.channel.input_size();
  std::span<const Sym> u1 = cb.u_word(0, res.s0, res.s1);
  std::span<const Sym> u2 = cb.u_word(1, res.s0, res.s2);
  res.x.resize(static_cast<std::size_t>(cfg.n));
  std::vector<double> px(static_cast<std::size_t>(nx));
  for (int i = 0; i < cfg.n; ++i) {
    std::size_t base = qu_x.stride(0) * q[i] + qu_x.stride(1) * u1[i] + qu_x.stride(2) * u2[i];
    double tot = 0.0;
    for (int x = 0; x < nx; ++x) {
      px[static_cast<std::size_t>(x)] = qu_x.table()[base + static_cast<std::size_t>(x)];
      tot += px[static_cast<std::size_t>(x)];
    }
    if (tot <= kZero) {
      for (int x = 0; x < nx; ++x) px[static_cast<std::size_t>(x)] = 1.0 / nx;
    } else {
      for (int x = 0; x < nx; ++x) px[static_cast<std::size_t>(x)] /= tot;
    }
    res.x[static_cast<std::size_t>(i)] = static_cast<Sym>(rng.categorical(px));
  }
  return res;
}

Transmission transmit(std::span<const Sym> x, const WiretapBc& ch, std::uint64_t trial_seed) {
  Rng rng(mix_seed(trial_seed, 0x77AA5511));
  Transmission t;
  t.y1.resize(x.size());
  t.y2.resize(x.size());
  t.z.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    t.y1[i] = static_cast<Sym>(rng.categorical(ch.ch_y1.row(x[i]).probs()));
    t.y2[i] = static_cast<Sym>(rng.categorical(ch.ch_y2.row(x[i]).probs()));
    t.z[i] = static_cast<Sym>(rng.categorical(ch.ch_z.row(x[i]).probs()));
  }
  return t;
}

DecodeResult decode(const Codebook& cb, const SimConfig& cfg, int user, std::span<const Sym> y) {
  if (user != 1 && user != 2) throw std::invalid_argument("decode: user must be 1 or 2");
  const CodebookCounts& c = cb.counts;
  const char* u_axis = user == 1 ? "U1" : "U2";
  const Dmc& ch = user == 1 ? cfg.channel.ch_y1 : cfg.channel.ch_y2;
  const JointPmf law =
      cfg.aux.marginal({"Q", u_axis, "X"}).extend("X", ch, "Y").marginal({"Q", u_axis, "Y"});
  const double delta = delta_n(cfg.n, cfg.delta_coefficient);
  const long cnt = user == 1 ? c.count1 : c.count2;
  const long bins = user == 1 ? c.bins1 : c.bins2;

  DecodeResult res;
  long hit_s0 = -1, hit_s = -1;
  int hits = 0;
  for (long s0 = 0; s0 < c.count0 && hits < 2; ++s0) {
    std::span<const Sym> q = cb.q_word(s0);
    for (long s = 0; s < cnt; ++s) {
      if (is_joint_typical({q, cb.u_word(user - 1, s0, s), y}, law, delta)) {
        ++hits;
        hit_s0 = s0;
        hit_s = s;
        if (hits >= 2) break;
      }
    }
  }
  if (hits != 1) return res;  // ambiguous or empty: counted as a failure
  res.ok = true;
  res.w0 = hit_s0 % c.bins0;
  res.wj = hit_s % bins;
  return res;
}

Wilson wilson95(long successes, long trials) {
  Wilson w;
  if (trials <= 0) return w;
  const double z = 1.959963984540054;
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  w.lo = std::max(0.0, center - half);
  w.hi = std::min(1.0, center + half);
  return w;
}

LeakageEstimate estimate_leakage(const Codebook& cb, const SimConfig& cfg, const WiretapBc& ch,
                                 int samples, std::uint64_t seed) {
  const CodebookCounts& c = cb.counts;
  const long messages = c.bins0 * c.bins1 * c.bins2;
  long max_m0 = 0;
  for (long w0 = 0; w0 < c.bins0; ++w0) max_m0 = std::max(max_m0, bin_size(c.count0, c.bins0, w0));
  if (messages * max_m0 * c.subbins1 * c.subbins2 > kCodewordCap)
    throw std::length_error("estimate_leakage: message x choice enumeration exceeds cap");
  if (samples < 1) throw std::invalid_argument("estimate_leakage: need at least one sample");

  const JointPmf triple_law = cfg.aux.marginal({"Q", "U1", "U2"});
  const double delta = delta_n(cfg.n, cfg.delta_coefficient);

  // Scan results for every (s0, w1, l1, w2, l2): the encoder's chosen pair.
  // -1 marks covering failure. Indexing: (((s0*bins1 + w1)*L1 + l1)*bins2 + w2)*L2 + l2.
  const long combos = c.count0 * c.bins1 * c.subbins1 * c.bins2 * c.subbins2;
  std::vector<long> chosen1(static_cast<std::size_t>(combos), -1);
  std::vector<long> chosen2(static_cast<std::size_t>(combos), -1);
  parallel_for(static_cast<int>(c.count0), [&](int s0i) {
    long s0 = s0i;
    std::span<const Sym> q = cb.q_word(s0);
    for (long w1 = 0; w1 < c.bins1; ++w1)
      for (long l1 = 0; l1 < c.subbins1; ++l1)
        for (long w2 = 0; w2 < c.bins2; ++w2)
          for (long l2 = 0; l2 < c.subbins2; ++l2) {
            long m1 = subbin_size(c.count1, c.bins1, c.subbins1, w1, l1);
            long m2 = subbin_size(c.count2, c.bins2, c.subbins2, w2, l2);
            long f1 = -1, f2 = -1;
            for (long i1 = 0; i1 < m1 && f1 < 0; ++i1) {
              long s1 = subbin_member(c.bins1, c.subbins1, w1, l1, i1);
              std::span<const Sym> u1 = cb.u_word(0, s0, s1);
              for (long i2 = 0; i2 < m2; ++i2) {
                long s2 = subbin_member(c.bins2, c.subbins2, w2, l2, i2);
                if (is_joint_typical({q, u1, cb.u_word(1, s0, s2)}, triple_law, delta)) {
                  f1 = s1;
                  f2 = s2;
                  break;
                }
              }
            }
            std::size_t key = static_cast<std::size_t>(
                (((s0 * c.bins1 + w1) * c.subbins1 + l1) * c.bins2 + w2) * c.subbins2 + l2);
            chosen1[key] = f1;
            chosen2[key] = f2;
          }
  });

  // per-symbol log-likelihood with X marginalized out:
  //   tab[q][u1][u2][z] = log2 sum_x P(x|q,u1,u2) P_Z(z|x)
  const JointPmf qu_x = cfg.aux.marginal({"Q", "U1", "U2", "X"});
  const int nq = qu_x.axes()[0].size, nu1 = qu_x.axes()[1].size, nu2 = qu_x.axes()[2].size;
  const int nx = qu_x.axes()[3].size, nz = ch.ch_z.output_size();
  std::vector<double> logtab(static_cast<std::size_t>(nq) * nu1 * nu2 * nz);
  std::vector<std::vector<double>> px_given(static_cast<std::size_t>(nq) * nu1 * nu2);
  for (int q = 0; q < nq; ++q)
    for (int u1 = 0; u1 < nu1; ++u1)
      for (int u2 = 0; u2 < nu2; ++u2) {
        std::size_t cell = (static_cast<std::size_t>(q) * nu1 + u1) * nu2 + u2;
        std::vector<double> px(static_cast<std::size_t>(nx), 0.0);
        double tot = 0.0;
        for (int x = 0; x < nx; ++x) {
          px[static_cast<std::size_t>(x)] = qu_x.table()[qu_x.stride(0) * q + qu_x.stride(1) * u1 +
                                                         qu_x.stride(2) * u2 + static_cast<std::size_t>(x)];
          tot += px[static_cast<std::size_t>(x)];
        }
        for (double& v : px) v = tot > kZero ? v / tot : 1.0 / nx;
        px_given[cell] = px;
        for (int z = 0; z < nz; ++z) {
          double lik = 0.0;
          for (int x = 0; x < nx; ++x) lik += px[static_cast<std::size_t>(x)] * ch.ch_z.at(x, z);
          logtab[cell * nz + static_cast<std::size_t>(z)] = lik > 0.0 ? std::log2(lik) : -1e300;
        }
      }

  const double h_w = std::log2(static_cast<double>(messages));
  std::vector<double> leak(static_cast<std::size_t>(samples), 0.0);

  parallel_for(samples, [&](int si) {
    Rng rng(mix_seed(seed, 0x5EAF + static_cast<std::uint64_t>(si)));
    // draw a successful (message, choice) combo and its z^n
    long s0 = -1, s1 = -1, s2 = -1;
    for (int attempts = 0; attempts < 100000; ++attempts) {
      long w0 = rng.uniform_int(static_cast<int>(c.bins0));
      long w1 = rng.uniform_int(static_cast<int>(c.bins1));
      long w2 = rng.uniform_int(static_cast<int>(c.bins2));
      long m0 = bin_size(c.count0, c.bins0, w0);
      long cand_s0 = w0 + static_cast<long>(rng.uniform_int(static_cast<int>(m0))) * c.bins0;
      long l1 = rng.uniform_int(static_cast<int>(c.subbins1));
      long l2 = rng.uniform_int(static_cast<int>(c.subbins2));
      std::size_t key = static_cast<std::size_t>(
          (((cand_s0 * c.bins1 + w1) * c.subbins1 + l1) * c.bins2 + w2) * c.subbins2 + l2);
      if (chosen1[key] >= 0) {
        s0 = cand_s0;
        s1 = chosen1[key];
        s2 = chosen2[key];
        break;
      }
    }
    if (s0 < 0) {
      leak[static_cast<std::size_t>(si)] = 0.0;  // encoder never succeeds; nothing leaks
      return;
    }
    std::span<const Sym> q = cb.q_word(s0);
    std::span<const Sym> u1 = cb.u_word(0, s0, s1);
    std::span<const Sym> u2 = cb.u_word(1, s0, s2);
    Seq z(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
      std::size_t cell = (static_cast<std::size_t>(q[i]) * nu1 + u1[i]) * nu2 + u2[i];
      int x = rng.categorical(px_given[cell]);
      z[static_cast<std::size_t>(i)] = static_cast<Sym>(rng.categorical(ch.ch_z.row(x).probs()));
    }

    // exact posterior over message triples given z^n
    std::unordered_map<long, double> loglik_cache;  // key: (s0*count1 + s1)*count2 + s2
    auto loglik = [&](long a0, long a1, long a2) {
      long key = (a0 * c.count1 + a1) * c.count2 + a2;
      auto it = loglik_cache.find(key);
      if (it != loglik_cache.end()) return it->second;
      std::span<const Sym> qq = cb.q_word(a0);
      std::span<const Sym> v1 = cb.u_word(0, a0, a1);
      std::span<const Sym> v2 = cb.u_word(1, a0, a2);
      double ll = 0.0;
      for (int i = 0; i < cfg.n; ++i) {
        std::size_t cell = (static_cast<std::size_t>(qq[i]) * nu1 + v1[i]) * nu2 + v2[i];
        ll += logtab[cell * nz + z[static_cast<std::size_t>(i)]];
      }
      loglik_cache.emplace(key, ll);
      return ll;
    };

    // accumulate with a max-shift per message to dodge underflow
    std::vector<double> maxll(static_cast<std::size_t>(messages), -1e300);
    std::vector<std::vector<double>> lls(static_cast<std::size_t>(messages));
    for (long w0 = 0; w0 < c.bins0; ++w0) {
      long m0 = bin_size(c.count0, c.bins0, w0);
      for (long k0 = 0; k0 < m0; ++k0) {
        long a0 = w0 + k0 * c.bins0;
        for (long w1 = 0; w1 < c.bins1; ++w1)
          for (long l1 = 0; l1 < c.subbins1; ++l1)
            for (long w2 = 0; w2 < c.bins2; ++w2)
              for (long l2 = 0; l2 < c.subbins2; ++l2) {
                std::size_t key = static_cast<std::size_t>(
                    (((a0 * c.bins1 + w1) * c.subbins1 + l1) * c.bins2 + w2) * c.subbins2 + l2);
                if (chosen1[key] < 0) continue;
                double ll = loglik(a0, chosen1[key], chosen2[key]) -
                            std::log2(static_cast<double>(m0 * c.subbins1 * c.subbins2));
                std::size_t msg = static_cast<std::size_t>((w0 * c.bins1 + w1) * c.bins2 + w2);
                lls[msg].push_back(ll);
                maxll[msg] = std::max(maxll[msg], ll);
              }
      }
    }
    double global_max = -1e300;
    for (long m = 0; m < messages; ++m) global_max = std::max(global_max, maxll[static_cast<std::size_t>(m)]);
    double total = 0.0;
    std::vector<double> post(static_cast<std::size_t>(messages), 0.0);
    for (long m = 0; m < messages; ++m) {
      double acc = 0.0;
      for (double ll : lls[static_cast<std::size_t>(m)]) acc += std::exp2(ll - global_max);
      post[static_cast<std::size_t>(m)] = acc;
      total += acc;
    }
    double h_cond = 0.0;
    if (total > 0.0) {
      for (long m = 0; m < messages; ++m) {
        double p = post[static_cast<std::size_t>(m)] / total;
        if (p > kZero) h_cond -= p * std::log2(p);
      }
    } else {
      h_cond = h_w;  // z carries no usable information
    }
    leak[static_cast<std::size_t>(si)] = h_w - h_cond;
  });

  LeakageEstimate est;
  est.samples = samples;
  double mean = 0.0;
  for (double v : leak) mean += v;
  mean /= samples;
  double var = 0.0;
  for (double v : leak) var += (v - mean) * (v - mean);
  var = samples > 1 ? var / (samples - 1) : 0.0;
  est.rate = mean / cfg.n;
  est.stderr_ = std::sqrt(var / samples) / cfg.n;
  return est;
}

SimResult run_sim(const SimConfig& cfg, bool with_leakage) {
  cfg.validate();
  Codebook cb = gen_codebook(cfg);
  SimResult res;
  res.realized = cb.counts;
  res.trials_run = cfg.trials;

  struct Outcome {
    bool enc_fail = false, err1 = false, err2 = false;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, [&](int t) {
    std::uint64_t ts = mix_seed(cfg.seed, 0x22000000ull + static_cast<std::uint64_t>(t));
    Rng rng(ts);
    long w0 = rng.uniform_int(static_cast<int>(cb.counts.bins0));
    long w1 = rng.uniform_int(static_cast<int>(cb.counts.bins1));
    long w2 = rng.uniform_int(static_cast<int>(cb.counts.bins2));
    Outcome& out = outcomes[static_cast<std::size_t>(t)];
    EncodeResult enc = encode(cb, cfg, w0, w1, w2, mix_seed(ts, 1));
    if (!enc.ok) {
      out.enc_fail = true;
      out.err1 = out.err2 = true;  // a failed encoding is an error for both users
      return;
    }
    Transmission tx = transmit(enc.x, cfg.channel, mix_seed(ts, 2));
    DecodeResult d1 = decode(cb, cfg, 1, tx.y1);
    DecodeResult d2 = decode(cb, cfg, 2, tx.y2);
    out.err1 = !d1.ok || d1.w0 != w0 || d1.wj != w1;
    out.err2 = !d2.ok || d2.w0 != w0 || d2.wj != w2;
  });

  long e1 = 0, e2 = 0, ef = 0;
  for (const Outcome& o : outcomes) {
    e1 += o.err1;
    e2 += o.err2;
    ef += o.enc_fail;
  }
  if (cfg.trials > 0) {
    res.pe1 = static_cast<double>(e1) / cfg.trials;
    res.pe2 = static_cast<double>(e2) / cfg.trials;
    res.enc_fail_rate = static_cast<double>(ef) / cfg.trials;
    res.pe1_ci = wilson95(e1, cfg.trials);
    res.pe2_ci = wilson95(e2, cfg.trials);
  }
  if (with_leakage) {
    LeakageEstimate le =
        estimate_leakage(cb, cfg, cfg.channel, std::max(1, cfg.trials), mix_seed(cfg.seed, 0x1eaf));
    res.leakage_rate = le.rate;
    res.leakage_stderr = le.stderr_;
  }
  return res;
}

}  // namespace wbc::sim

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wbc/prob.hpp"

namespace wbc::sim {

using Sym = std::uint8_t;
using Seq = std::vector<Sym>;

// Typicality slack schedule: c * n^(-1/3), which vanishes while sqrt(n)*delta
// still diverges.
double delta_n(int n, double c);

// Strong typicality: every empirical frequency within delta of the law, and
// no symbol of probability zero present.
bool is_typical(std::span<const Sym> seq, const Pmf& p, double delta);

// Conditional version against a channel law, joint-count criterion.
bool is_cond_typical(std::span<const Sym> y_seq, std::span<const Sym> x_seq, const Dmc& w,
                     double delta);

// Joint strong typicality of parallel sequences against a joint law whose
// axes match the sequence order.
bool is_joint_typical(const std::vector<std::span<const Sym>>& seqs, const JointPmf& law,
                      double delta);

// ---------------------------------------------------------------------------

struct SimConfig {
  WiretapBc channel;
  JointPmf aux;  // axes (Q, U1, U2, X)
  int n = 0;     // blocklength
  double t0 = 0, t1 = 0, t2 = 0;          // codebook exponents, bits/use
  double r01 = 0, r02 = 0;                // common-carried message splits
  double rbar0 = 0, rbar1 = 0, rbar2 = 0; // bin exponents (messages)
  double rtilde1 = 0, rtilde2 = 0;        // sub-bin exponents (dummy randomness)
  int trials = 0;
  std::uint64_t seed = 0;
  double delta_coefficient = 1.0;

  void validate() const;  // throws std::invalid_argument / std::length_error (caps)
};

inline constexpr long kCodewordCap = 1L << 20;

// Realized integer structure after rounding the exponents; at desk-scale n
// the rounding is significant, so the achieved exponents are reported.
struct CodebookCounts {
  long count0 = 1, count1 = 1, count2 = 1;    // codewords (u counts are per q-word)
  long bins0 = 1, bins1 = 1, bins2 = 1;       // message bins
  long subbins1 = 1, subbins2 = 1;            // sub-bins per bin
  double t0_real = 0, t1_real = 0, t2_real = 0;
  double rbar0_real = 0, rbar1_real = 0, rbar2_real = 0;
  double rtilde1_real = 0, rtilde2_real = 0;
};

CodebookCounts derive_counts(const SimConfig& cfg);

// Binned codebook. Word i of a layer belongs to bin (i mod bins); within the
// bin, rank r = i div bins falls in sub-bin (r mod subbins). Partitions are
// exact regardless of divisibility.
struct Codebook {
  CodebookCounts counts;
  int n = 0;
  Seq q_words;             // count0 * n
  Seq u_words[2];          // count0 * countj * n, word (s0, s) at offset (s0*countj + s)*n
  std::span<const Sym> q_word(long s0) const {
    return {q_words.data() + s0 * n, static_cast<std::size_t>(n)};
  }
  std::span<const Sym> u_word(int j, long s0, long s) const {
    return {u_words[j].data() + (s0 * (j == 0 ? counts.count1 : counts.count2) + s) * n,
            static_cast<std::size_t>(n)};
  }
};

Codebook gen_codebook(const SimConfig& cfg);

struct EncodeResult {
  bool ok = false;
  long s0 = -1, s1 = -1, s2 = -1;
  Seq x;
};

// Mutual-covering encoder: uniform s0 in the common bin, uniform sub-bin
// pair, first jointly typical (u1, u2) pair in scan order; X drawn i.i.d.
// from P(X|Q,U1,U2). Failure is an outcome, not an error.
EncodeResult encode(const Codebook& cb, const SimConfig& cfg, long w0, long w1, long w2,
                    std::uint64_t trial_seed);

struct Transmission {
  Seq y1, y2, z;
};
Transmission transmit(std::span<const Sym> x, const WiretapBc& ch, std::uint64_t trial_seed);

struct DecodeResult {
  bool ok = false;
  long w0 = -1, wj = -1;
};

// Joint-typicality decoder for user j in {1,2}: unique (s0, sj) with
// (q, u_j, y_j) typical; zero or multiple candidates fail.
DecodeResult decode(const Codebook& cb, const SimConfig& cfg, int user, std::span<const Sym> y);

struct Wilson {
  double lo = 0, hi = 0;
};
Wilson wilson95(long successes, long trials);

struct LeakageEstimate {
  double rate = 0;      // estimated I(W; Z^n)/n, bits per use
  double stderr_ = 0;   // Monte Carlo standard error of the rate
  int samples = 0;
};

// Exact-posterior equivocation estimate: each sampled z^n is scored by
// enumerating every message triple and every encoder choice, with the
// likelihood marginalized over the symbolwise X draw.
LeakageEstimate estimate_leakage(const Codebook& cb, const SimConfig& cfg, const WiretapBc& ch,
                                 int samples, std::uint64_t seed);

struct SimResult {
  double pe1 = 0, pe2 = 0;
  Wilson pe1_ci, pe2_ci;
  double enc_fail_rate = 0;
  double leakage_rate = 0, leakage_stderr = 0;
  int trials_run = 0;
  CodebookCounts realized;
};

// Full pipeline: codebook, per-trial encode/transmit/decode (encoding and
// decoding failures count as errors), then the leakage estimate.
SimResult run_sim(const SimConfig& cfg, bool with_leakage = true);

}  // namespace wbc::sim

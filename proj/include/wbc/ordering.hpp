#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wbc/prob.hpp"

namespace wbc {

enum class Relation { degraded, less_noisy, more_capable, none };
enum class Holds { proved, refuted, undetermined };

// Outcome of an ordering test. `sampled` marks non-refuted results that rest
// on finite sampling rather than an exact certificate; the CLI prints those
// as "proved (sampled)".
struct OrderingReport {
  Relation relation = Relation::none;
  Holds holds = Holds::undetermined;
  bool sampled = false;
  double residual = 0.0;                 // total-variation defect (degradedness)
  std::optional<Dmc> witness;            // degrading kernel when proved
  std::vector<Pmf> refuting_inputs;      // input law(s) violating the definition
  std::string note;
};

// Does there exist a stochastic Q with w_strong*Q = w_weak?  Solved as a
// linear program minimizing the total L1 mismatch subject to row
// stochasticity. proved iff optimum <= tol, refuted iff optimum > 10*tol.
OrderingReport check_degraded(const Dmc& w_strong, const Dmc& w_weak, double tol = 1e-7);

// Less-noisy surrogate: Y less noisy than Z iff I(X;Y) - I(X;Z) is concave
// over input laws. Tests midpoint concavity on random pairs plus a
// deterministic grid; a strict violation beyond 1e-9 refutes.
OrderingReport check_less_noisy(const Dmc& w_y, const Dmc& w_z, int samples = 2000,
                                std::uint64_t seed = 1);

// More-capable: I(X;Y) >= I(X;Z) on a simplex grid plus random samples.
OrderingReport check_more_capable(const Dmc& w_y, const Dmc& w_z, int grid = 64,
                                  std::uint64_t seed = 1);

// Ordering bands of a BEC(e) relative to a BSC(p) (half-open band edges).
enum class BecBscClass { degraded, less_noisy, more_capable, essentially_less_noisy };
BecBscClass classify_bec_bsc(double e, double p);
std::string to_string(BecBscClass c);
std::string to_string(Relation r);
std::string to_string(Holds h);

}  // namespace wbc

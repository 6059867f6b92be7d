#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wbc/becbsc.hpp"
#include "wbc/rng.hpp"

using namespace wbc;
using namespace wbc::becbsc;

namespace {

double h2(double x) { return binary_entropy(x); }

// admissible triple sampler: p2 first, then p with the quadratic constraint,
// then e inside the band
BecBscParams random_admissible(Rng& rng) {
  for (;;) {
    double p2 = 0.02 + 0.4 * rng.unit();
    double a2 = 1 - 2 * p2;
    double amax = std::sqrt(std::max(0.0, 1.0 - a2 * a2));
    double pmin_q = (1.0 - amax) / 2.0;  // a <= amax  =>  p >= pmin_q
    double plo = std::max(p2, pmin_q);
    if (plo >= 0.5) continue;
    double p = plo + (0.5 - plo) * rng.unit();
    double lo = 2 * p2, hi = std::min(2 * p, 4 * p2 * (1 - p2));
    if (hi <= lo + 1e-6) continue;
    double e = lo + (hi - lo) * rng.unit();
    BecBscParams prm{e, p2, p};
    if (admissible(prm).admissible) return prm;
  }
}

}  // namespace

TEST_CASE("admissibility") {
  CHECK(admissible({0.2, 0.1, 0.25}).admissible);
  SUBCASE("below the lower edge") {
    AdmissibilityReport rep = admissible({0.1, 0.1, 0.25});
    CHECK_FALSE(rep.admissible);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].find("e >= 2*p2") != std::string::npos);
  }
  SUBCASE("above the eavesdropper edge") {
    AdmissibilityReport rep = admissible({0.4, 0.1, 0.15});
    CHECK_FALSE(rep.admissible);
    bool found = false;
    for (const auto& v : rep.violations)
      if (v.find("e <= 2*p") != std::string::npos) found = true;
    CHECK(found);
  }
  SUBCASE("quadratic side condition is reported in appendix form") {
    // p = p2 = 0.1: a^2 + a2^2 = 1.28
    AdmissibilityReport rep = admissible({0.2, 0.1, 0.1});
    CHECK_FALSE(rep.admissible);
    bool found = false;
    for (const auto& v : rep.violations)
      if (v.find("appendix form") != std::string::npos) found = true;
    CHECK(found);
    CHECK(rep.side_condition.find("appendix form") != std::string::npos);
  }
  SUBCASE("out-of-range parameters throw") {
    CHECK_THROWS_AS(admissible({1.2, 0.1, 0.25}), std::invalid_argument);
    CHECK_THROWS_AS(admissible({0.2, 0.6, 0.25}), std::invalid_argument);
  }
}

TEST_CASE("secrecy frontier endpoints and shape") {
  BecBscParams prm{0.2, 0.1, 0.25};
  auto curve = secrecy_curve(prm, 257);
  REQUIRE(curve.size() == 257);
  SUBCASE("left endpoint carries only the symmetric-user rate") {
    CHECK(curve.front().x == 0.0);
    CHECK(curve.front().r1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(curve.front().r2 == doctest::Approx(h2(0.25) - h2(0.1)).epsilon(1e-12));
    CHECK(curve.front().r2 == doctest::Approx(0.3422825308698516).epsilon(1e-12));
  }
  SUBCASE("right endpoint carries only the erasure-user rate") {
    CHECK(curve.back().x == 0.5);
    CHECK(curve.back().r2 == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(curve.back().r1 == doctest::Approx(0.8 + h2(0.25) - 1.0).epsilon(1e-12));
    CHECK(curve.back().r1 == doctest::Approx(0.6112781244591328).epsilon(1e-12));
  }
  SUBCASE("r1 grows and r2 shrinks along the parameterization") {
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
      CHECK(curve[i + 1].r1 >= curve[i].r1 - 1e-9);
      CHECK(curve[i + 1].r2 <= curve[i].r2 + 1e-9);
    }
  }
  SUBCASE("inadmissible parameters are refused") {
    CHECK_THROWS_AS(secrecy_curve({0.1, 0.1, 0.25}, 9), std::invalid_argument);
  }
}

TEST_CASE("standard frontier and the sum-rate impediment") {
  const double e = 0.2, p2 = 0.1, p = 0.25;
  auto std_curve = standard_curve(e, p2, 257);
  CHECK(std_curve.back().r1 == doctest::Approx(1 - e).epsilon(1e-12));
  CHECK(std_curve.back().r2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std_curve.front().r1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std_curve.front().r2 == doctest::Approx(1 - h2(p2)).epsilon(1e-12));

  auto sec = secrecy_curve({e, p2, p}, 257);
  SUBCASE("gap is 1 - h2(p) at every grid point") {
    for (std::size_t i = 0; i < sec.size(); ++i) {
      double gap = (std_curve[i].r1 + std_curve[i].r2) - (sec[i].r1 + sec[i].r2);
      CHECK(gap == doctest::Approx(1.0 - h2(p)).epsilon(1e-9));
    }
  }
  SUBCASE("secrecy frontier never exceeds the standard one") {
    for (std::size_t i = 0; i < sec.size(); ++i) {
      CHECK(sec[i].r1 <= std_curve[i].r1 + 1e-9);
      CHECK(sec[i].r2 <= std_curve[i].r2 + 1e-9);
    }
  }
}

TEST_CASE("eavesdropper sweep") {
  auto rows = figure7_data(0.1, 0.1, 0.5, 41, 65);
  REQUIRE(rows.size() == 41);
  SUBCASE("worst case pins the symmetric user to zero") {
    const Figure7Row& first = rows.front();
    CHECK(first.p == doctest::Approx(0.1));
    double max_r2 = 0.0;
    for (const auto& pt : first.secrecy) max_r2 = std::max(max_r2, pt.r2);
    CHECK(max_r2 <= 1e-12);
  }
  SUBCASE("frontiers coincide when the eavesdropper is useless") {
    const Figure7Row& last = rows.back();  // p = 0.5, e = 1
    for (std::size_t i = 0; i < last.secrecy.size(); ++i) {
      CHECK(std::abs(last.secrecy[i].r1 - last.standard[i].r1) <= 1e-3);
      CHECK(std::abs(last.secrecy[i].r2 - last.standard[i].r2) <= 1e-3);
    }
  }
  SUBCASE("erasure user always keeps h2(p) - 2p") {
    for (const auto& row : rows) {
      double expect = h2(row.p) - 2 * row.p;
      CHECK(row.secrecy.back().r1 == doctest::Approx(expect).epsilon(1e-9));
      CHECK(row.secrecy.back().r1 >= -1e-12);
    }
  }
  SUBCASE("rows outside the admissible band are flagged, not dropped") {
    bool some_flagged = false;
    for (const auto& row : rows) some_flagged |= !row.admissible;
    CHECK(some_flagged);  // e = 2p exceeds 4 p2 (1-p2) for large p
  }
  CHECK_THROWS_AS(figure7_data(0.3, 0.1, 0.5, 5, 9), std::invalid_argument);
}

TEST_CASE("convexity verifier") {
  SUBCASE("reference parameters pass") {
    ConvexityReport rep = verify_convexity({0.2, 0.1, 0.25}, 257);
    CHECK(rep.pass);
    CHECK(rep.max_derivative_violation <= 1e-9);
    CHECK(rep.max_second_difference_violation <= 1e-9);
    CHECK(rep.min_f1_prime >= -1e-9);
  }
  SUBCASE("degenerate p == p2 gives an identically flat r2") {
    // p = p2 = 0.2 keeps a^2 + a2^2 = 0.72 inside the verifier's domain
    ConvexityReport rep = verify_convexity({0.4, 0.2, 0.2}, 64);
    CHECK(rep.pass);
    CHECK(std::abs(rep.max_derivative_violation) <= 1e-9);
  }
  SUBCASE("both methods agree in sign on random admissible triples") {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
      BecBscParams prm = random_admissible(rng);
      ConvexityReport rep = verify_convexity(prm, 128);
      CHECK(rep.pass);
      CHECK(rep.max_derivative_violation <= 1e-9);
      CHECK(rep.max_second_difference_violation <= 1e-9);
    }
  }
  SUBCASE("coarse grids are rejected") {
    CHECK_THROWS_AS(verify_convexity({0.2, 0.1, 0.25}, 8), std::invalid_argument);
  }
}

TEST_CASE("series terms") {
  SUBCASE("anchor values") {
    CHECK(series_terms(0.3, 0.7, 0.2, 3).s_k == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(series_terms(0.5, 0.8, 0.2, 5).s_k == doctest::Approx(0.89).epsilon(1e-13));
  }
  SUBCASE("equal parameters fall back to the sum form") {
    // a = a2: S_k = s * a^{2(s-1)}
    SeriesTerms t = series_terms(0.6, 0.6, 0.3, 7);
    CHECK(t.s_k == doctest::Approx(3.0 * std::pow(0.6, 4)).epsilon(1e-13));
    CHECK(s_ratio_form(0.6, 0.6, 7) == doctest::Approx(s_sum_form(0.6, 0.6, 7)).epsilon(1e-13));
  }
  SUBCASE("ratio and sum forms agree") {
    Rng rng(11);
    for (int t = 0; t < 1000; ++t) {
      double a2 = rng.unit();
      double a = a2 * rng.unit();
      int k = 3 + 2 * static_cast<int>(rng.unit() * 12);
      double ratio = s_ratio_form(a, a2, k);
      double sum = s_sum_form(a, a2, k);
      CHECK(std::abs(ratio - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
      SeriesTerms st = series_terms(a, a2, 0.5, k);
      CHECK(std::abs(st.s_k - sum) <= 1e-12 * std::max(1.0, std::abs(sum)));
    }
  }
  SUBCASE("bad arguments throw") {
    CHECK_THROWS_AS(series_terms(0.5, 0.8, 0.2, 4), std::invalid_argument);
    CHECK_THROWS_AS(series_terms(0.5, 0.8, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(series_terms(0.9, 0.8, 0.2, 5), std::invalid_argument);
  }
}

TEST_CASE("series verifier") {
  SUBCASE("reference parameters pass all claims") {
    SeriesReport rep = verify_series(0.5, 0.8, 0.2, 41);
    CHECK(rep.pass);
    CHECK(rep.claim1);
    CHECK(rep.claim2);
    CHECK(rep.claim3);
    CHECK(rep.v_k_definition.find("e * a^2 * a2^2") != std::string::npos);
  }
  SUBCASE("first telescoped partial sum") {
    SeriesReport rep = verify_series(0.5, 0.8, 0.2, 7);
    // partial sum at k_max = 5 would be -8/15; at 7 it telescopes to 1/5 - 1/7 - 2/3
    double direct5 = 1.0 / 3 - 1.0 / 5 - 1.0 + 1.0 / 3;
    CHECK(direct5 == doctest::Approx(-8.0 / 15).epsilon(1e-15));
    CHECK(rep.partial_sum == doctest::Approx(1.0 / 5 - 1.0 / 7 - 2.0 / 3).epsilon(1e-12));
    CHECK(rep.claim3);
  }
  SUBCASE("a blind eavesdropper zeroes the dominated sequence") {
    SeriesReport rep = verify_series(0.0, 0.7, 0.9, 41);
    CHECK(rep.claim1);
    CHECK(rep.claim2);
    for (int k = 3; k <= 41; k += 2) CHECK(series_terms(0.0, 0.7, 0.9, k).v_k == 0.0);
  }
  SUBCASE("random parameters under the quadratic constraint") {
    Rng rng(17);
    int tested = 0;
    while (tested < 50) {
      double a2 = rng.unit();
      double a = a2 * rng.unit();
      if (a * a + a2 * a2 > 1.0) continue;
      double e = rng.unit();
      SeriesReport rep = verify_series(a, a2, e, 41);
      CHECK(rep.pass);
      ++tested;
    }
  }
  SUBCASE("dominance holds throughout the admissible band") {
    Rng rng(23);
    int tested = 0;
    while (tested < 50) {
      double p2 = 0.02 + 0.4 * rng.unit();
      double a2 = 1 - 2 * p2;
      double amax = std::sqrt(std::max(0.0, 1.0 - a2 * a2));
      double plo = std::max(p2, (1.0 - amax) / 2.0);
      if (plo >= 0.5) continue;
      double p = plo + (0.5 - plo) * rng.unit();
      double lo = 2 * p2, hi = std::min(2 * p, 4 * p2 * (1 - p2));
      if (hi <= lo + 1e-6) continue;
      double e = lo + (hi - lo) * rng.unit();
      SeriesReport rep = verify_series(1 - 2 * p, 1 - 2 * p2, e, 41);
      CHECK(rep.claim1_applicable);
      CHECK(rep.claim1);
      CHECK(rep.pass);
      ++tested;
    }
  }
  CHECK_THROWS_AS(verify_series(0.5, 0.8, 0.2, 6), std::invalid_argument);
}

TEST_CASE("frontier region matches the search evaluator on a smoke budget") {
  BecBscParams prm{0.2, 0.1, 0.25};
  RateRegion closed = secrecy_region(prm, 257);
  AuxSpec aux;
  aux.cards = {{"T", 1}, {"U", 4}};
  RateRegion searched = capacity_less_noisy(make_channel(prm), aux, 400, 7);
  CHECK(hausdorff(searched, closed) <= 0.05);
}

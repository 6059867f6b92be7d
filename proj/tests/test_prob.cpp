#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <span>

#include "wbc/prob.hpp"
#include "wbc/rng.hpp"

using namespace wbc;

namespace {

// independent oracle: plain evaluation of the entropy definition
double h2_direct(double x) {
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

// independent oracle: I(A;B|C) by direct triple summation over a 2x2x2 table
double cmi_bruteforce(const std::vector<double>& t) {
  auto p = [&t](int a, int b, int c) { return t[static_cast<std::size_t>((a * 2 + b) * 2 + c)]; };
  double total = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double pabc = p(a, b, c);
        if (pabc < 1e-15) continue;
        double pc = p(0, 0, c) + p(0, 1, c) + p(1, 0, c) + p(1, 1, c);
        double pac = p(a, 0, c) + p(a, 1, c);
        double pbc = p(0, b, c) + p(1, b, c);
        total += pabc * std::log2(pabc * pc / (pac * pbc));
      }
  return total;
}

JointPmf random_joint(Rng& rng, std::vector<Axis> axes) {
  std::size_t total = 1;
  for (const Axis& a : axes) total *= static_cast<std::size_t>(a.size);
  std::vector<double> w(total);
  rng.simplex(w);
  return JointPmf(std::move(axes), std::move(w));
}

}  // namespace

TEST_CASE("binary entropy matches the definition") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-13));
  for (double x : {0.01, 0.123, 0.345, 0.499, 0.87})
    CHECK(binary_entropy(x) == doctest::Approx(h2_direct(x)).epsilon(1e-14));
  CHECK_THROWS_AS(binary_entropy(-0.001), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.001), std::domain_error);
}

TEST_CASE("binary convolution") {
  for (double y : {0.0, 0.2, 0.77, 1.0}) CHECK(bconv(0.5, y) == doctest::Approx(0.5).epsilon(1e-15));
  for (double y : {0.0, 0.3, 1.0}) CHECK(bconv(0.0, y) == doctest::Approx(y).epsilon(1e-15));
  CHECK(bconv(0.1, 0.2) == doctest::Approx(0.26).epsilon(1e-15));
  CHECK_THROWS_AS(bconv(-0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(bconv(0.5, 1.1), std::domain_error);
}

TEST_CASE("pmf validation is strict") {
  CHECK_THROWS_AS(Pmf({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({0.7, -0.3, 0.6}), std::invalid_argument);
  CHECK_NOTHROW(Pmf({0.25, 0.25, 0.25, 0.25}));
  Pmf n = Pmf::normalized({1.0, 3.0});
  CHECK(n[0] == doctest::Approx(0.25));
  CHECK(n[1] == doctest::Approx(0.75));
}

TEST_CASE("entropy basics") {
  CHECK(entropy(Pmf::uniform(4)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(entropy(Pmf::point_mass(5, 2)) == 0.0);
  CHECK(entropy(Pmf({0.25, 0.75})) == doctest::Approx(h2_direct(0.25)).epsilon(1e-14));
}

TEST_CASE("entropy bounds on random pmfs") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    int k = 2 + static_cast<int>(rng.unit() * 6);
    std::vector<double> w(static_cast<std::size_t>(k));
    rng.simplex(w);
    double h = entropy(Pmf(w));
    CHECK(h >= -1e-12);
    CHECK(h <= std::log2(static_cast<double>(k)) + 1e-12);
  }
}

TEST_CASE("mutual information on binary channels") {
  CHECK(mutual_information(Pmf::uniform(2), make_bsc(0.5)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mutual_information(Pmf::uniform(2), make_bsc(0.0)) == doctest::Approx(1.0).epsilon(1e-12));
  for (double e : {0.0, 0.2, 0.37, 0.9})
    CHECK(mutual_information(Pmf::uniform(2), make_bec(e)) == doctest::Approx(1.0 - e).epsilon(1e-12));
  CHECK_THROWS_AS(mutual_information(Pmf::uniform(3), make_bsc(0.1)), std::invalid_argument);
}

TEST_CASE("channel constructors") {
  Dmc id = make_bsc(0.0);
  CHECK(id.at(0, 0) == 1.0);
  CHECK(id.at(1, 1) == 1.0);
  Dmc bec1 = make_bec(1.0);
  CHECK(bec1.at(0, 2) == 1.0);
  CHECK(bec1.at(1, 2) == 1.0);
  Dmc b = make_bsc(0.25);
  CHECK(b.at(0, 0) == doctest::Approx(0.75));
  CHECK(b.at(0, 1) == doctest::Approx(0.25));
  CHECK(b.at(1, 0) == doctest::Approx(0.25));
  CHECK(b.at(1, 1) == doctest::Approx(0.75));
  CHECK_THROWS_AS(make_bsc(1.5), std::domain_error);
  Dmc det = make_deterministic({1, 0, 1}, 2);
  CHECK(det.at(0, 1) == 1.0);
  CHECK(det.at(2, 1) == 1.0);
  CHECK_THROWS_AS(make_deterministic({0, 3}, 2), std::invalid_argument);
}

TEST_CASE("cascade") {
  SUBCASE("identity leaves the channel unchanged") {
    Dmc w = make_bec(0.3);
    Dmc id = make_deterministic({0, 1, 2}, 3);
    Dmc c = cascade(w, id);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y) CHECK(c.at(x, y) == doctest::Approx(w.at(x, y)).epsilon(1e-15));
  }
  SUBCASE("two symmetric channels convolve") {
    Dmc c = cascade(make_bsc(0.12), make_bsc(0.3));
    double q = bconv(0.12, 0.3);
    CHECK(c.at(0, 1) == doctest::Approx(q).epsilon(1e-14));
    CHECK(c.at(1, 0) == doctest::Approx(q).epsilon(1e-14));
  }
  SUBCASE("erasure cascade composes erasure probabilities") {
    // second stage: passes bits through BEC(e2), keeps erasures erased
    double e1 = 0.25, e2 = 0.4;
    Dmc stage2(3, 3, {1 - e2, 0, e2, 0, 1 - e2, e2, 0, 0, 1});
    Dmc c = cascade(make_bec(e1), stage2);
    double e = 1.0 - (1.0 - e1) * (1.0 - e2);
    CHECK(c.at(0, 0) == doctest::Approx(1.0 - e).epsilon(1e-14));
    CHECK(c.at(0, 2) == doctest::Approx(e).epsilon(1e-14));
    CHECK(c.at(1, 2) == doctest::Approx(e).epsilon(1e-14));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(cascade(make_bec(0.1), make_bsc(0.1)), std::invalid_argument);
  }
  SUBCASE("rows stay stochastic") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> w1(6), w2(6);
      rng.simplex(std::span<double>(w1.data(), 3));
      rng.simplex(std::span<double>(w1.data() + 3, 3));
      rng.simplex(std::span<double>(w2.data(), 2));
      rng.simplex(std::span<double>(w2.data() + 2, 2));
      Dmc a(2, 3, w1);
      Dmc b(3, 2, {w2[0], w2[1], w2[2], w2[3], 0.5, 0.5});
      Dmc c = cascade(a, b);
      for (int x = 0; x < 2; ++x) {
        double s = 0.0;
        for (int y = 0; y < 2; ++y) s += c.at(x, y);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("data processing on sampled inputs") {
  Rng rng(17);
  Dmc w = make_bec(0.15);
  Dmc q(3, 2, {0.9, 0.1, 0.2, 0.8, 0.5, 0.5});
  Dmc comp = cascade(w, q);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> px(2);
    rng.simplex(px);
    CHECK(mutual_information(Pmf(px), comp) <= mutual_information(Pmf(px), w) + 1e-9);
  }
}

TEST_CASE("convolution cannot reduce binary entropy") {
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      double x = 0.5 * i / 20, y = 0.5 * j / 20;
      CHECK(binary_entropy(bconv(x, y)) >=
            std::max(binary_entropy(x), binary_entropy(y)) - 1e-12);
    }
}

TEST_CASE("product of wiretap channels") {
  WiretapBc a(make_bec(0.2), make_bsc(0.1), make_bsc(0.25));
  SUBCASE("trivial one-symbol factor is an isomorphism") {
    Dmc one(1, 1, {1.0});
    WiretapBc trivial(one, one, one);
    WiretapBc prod = product_wbc(a, trivial);
    CHECK(prod.input_size() == a.input_size());
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y) CHECK(prod.ch_y1.at(x, y) == doctest::Approx(a.ch_y1.at(x, y)));
  }
  SUBCASE("binary factors give outer-product rows") {
    WiretapBc b(make_bsc(0.3), make_bsc(0.2), make_bsc(0.4));
    WiretapBc prod = product_wbc(a, b);
    CHECK(prod.input_size() == 4);
    // row (x_a=1, x_b=0) of the y2 pair: tensor of the factor rows
    for (int ya = 0; ya < 2; ++ya)
      for (int yb = 0; yb < 2; ++yb)
        CHECK(prod.ch_y2.at(2, ya * 2 + yb) ==
              doctest::Approx(a.ch_y2.at(1, ya) * b.ch_y2.at(0, yb)).epsilon(1e-14));
    for (int x = 0; x < 4; ++x) {
      double s = 0.0;
      for (int y = 0; y < prod.ch_z.output_size(); ++y) s += prod.ch_z.at(x, y);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("alphabet cap guard") {
    std::vector<int> idmap(70);
    for (int i = 0; i < 70; ++i) idmap[static_cast<std::size_t>(i)] = i;
    Dmc big = make_deterministic(idmap, 70);
    WiretapBc big_bc(big, big, big);
    CHECK_THROWS_AS(product_wbc(big_bc, big_bc), std::invalid_argument);
  }
}

TEST_CASE("joint pmf marginals and conditionals") {
  Rng rng(23);
  JointPmf j = random_joint(rng, {{"A", 2}, {"B", 3}, {"C", 2}});
  SUBCASE("marginal sums match direct accumulation") {
    JointPmf mb = j.marginal({"B"});
    for (int b = 0; b < 3; ++b) {
      double direct = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) direct += j.table()[j.offset({a, b, c})];
      CHECK(mb.table()[static_cast<std::size_t>(b)] == doctest::Approx(direct).epsilon(1e-14));
    }
  }
  SUBCASE("conditioning then recombining reproduces the marginal") {
    // sum_a P(a) P(b|a) == P(b), entries read straight off the table
    JointPmf mab = j.marginal({"A", "B"});
    Pmf pa = j.axis_marginal("A");
    for (int b = 0; b < 3; ++b) {
      double recombined = 0.0;
      for (int a = 0; a < 2; ++a) {
        double pab = mab.table()[static_cast<std::size_t>(a * 3 + b)];
        if (pa[a] > 0) recombined += pa[a] * (pab / pa[a]);
      }
      CHECK(recombined ==
            doctest::Approx(j.marginal({"B"}).table()[static_cast<std::size_t>(b)]).epsilon(1e-12));
    }
  }
  SUBCASE("unknown axis throws") { CHECK_THROWS_AS(j.marginal({"D"}), std::invalid_argument); }
  SUBCASE("table cap is enforced before allocation checks") {
    CHECK_THROWS_AS(JointPmf({{"A", 5000}, {"B", 5000}}, {1.0}), std::invalid_argument);
  }
}

TEST_CASE("conditional mutual information") {
  SUBCASE("independent variables carry no information") {
    JointPmf j({{"A", 2}, {"B", 2}}, {0.3 * 0.6, 0.3 * 0.4, 0.7 * 0.6, 0.7 * 0.4});
    CHECK(conditional_mi(j, {"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("a copied axis carries the full entropy") {
    std::vector<double> t(4, 0.0);
    t[0] = 0.3;
    t[3] = 0.7;
    JointPmf j({{"A", 2}, {"B", 2}}, t);
    CHECK(conditional_mi(j, {"A"}, {"B"}) == doctest::Approx(h2_direct(0.3)).epsilon(1e-13));
  }
  SUBCASE("matches brute-force triple sum on random tables") {
    Rng rng(31);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> w(8);
      rng.simplex(w);
      JointPmf j({{"A", 2}, {"B", 2}, {"C", 2}}, w);
      CHECK(conditional_mi(j, {"A"}, {"B"}, {"C"}) ==
            doctest::Approx(cmi_bruteforce(w)).epsilon(1e-11));
    }
  }
  SUBCASE("symmetry and nonnegativity") {
    Rng rng(37);
    for (int t = 0; t < 30; ++t) {
      std::vector<double> w(16);
      rng.simplex(w);
      JointPmf j({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}}, w);
      double ab = conditional_mi(j, {"A"}, {"B"}, {"C", "D"});
      double ba = conditional_mi(j, {"B"}, {"A"}, {"C", "D"});
      CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
      CHECK(ab >= 0.0);
    }
  }
  SUBCASE("chain rule with a duplicated axis") {
    Rng rng(41);
    std::vector<double> base(8);
    rng.simplex(base);
    // A' duplicates A
    std::vector<double> t(16, 0.0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          t[static_cast<std::size_t>(((a * 2 + a) * 2 + b) * 2 + c)] =
              base[static_cast<std::size_t>((a * 2 + b) * 2 + c)];
    JointPmf j({{"A", 2}, {"Ap", 2}, {"B", 2}, {"C", 2}}, t);
    double direct = conditional_mi(j, {"A"}, {"B"}, {"C"});
    double pair = conditional_mi(j, {"A", "Ap"}, {"B"}, {"C"});
    double cond_on_copy = conditional_mi(j, {"A"}, {"B"}, {"C", "Ap"});
    CHECK(pair == doctest::Approx(direct).epsilon(1e-12));
    CHECK(cond_on_copy == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("axis overlap is rejected") {
    JointPmf j({{"A", 2}, {"B", 2}}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(conditional_mi(j, {"A"}, {"A"}), std::invalid_argument);
    CHECK_THROWS_AS(conditional_mi(j, {"A"}, {"B"}, {"B"}), std::invalid_argument);
  }
}

TEST_CASE("extend appends a channel output") {
  JointPmf j({{"X", 2}}, {0.4, 0.6});
  JointPmf ext = j.extend("X", make_bsc(0.1), "Y");
  CHECK(ext.table()[ext.offset({0, 0})] == doctest::Approx(0.4 * 0.9));
  CHECK(ext.table()[ext.offset({1, 0})] == doctest::Approx(0.6 * 0.1));
  CHECK_THROWS_AS(j.extend("X", make_deterministic({0, 1, 2}, 3), "Y"), std::invalid_argument);
}

TEST_CASE("telescoping sum identity") {
  SUBCASE("independent product joint has zero defect") {
    // X1,X2,Y1,Y2,C all independent Bern(0.5)
    std::vector<double> t(32, 1.0 / 32.0);
    JointPmf j({{"X1", 2}, {"X2", 2}, {"Y1", 2}, {"Y2", 2}, {"C", 2}}, t);
    CHECK(ck_identity_check(j, 2) == doctest::Approx(0.0).epsilon(1e-13));
  }
  SUBCASE("random joints, n = 2") {
    Rng rng(43);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> w(32);
      rng.simplex(w);
      JointPmf j({{"X1", 2}, {"X2", 2}, {"Y1", 2}, {"Y2", 2}, {"C", 2}}, w);
      CHECK(ck_identity_check(j, 2) <= 1e-10);
    }
  }
  SUBCASE("markov-chain-built joint, n = 3") {
    // C -> X1 -> X2 -> X3 -> Y1 -> Y2 -> Y3, all BSC(0.2) steps
    const double p = 0.2;
    auto step = [p](int a, int b) { return a == b ? 1.0 - p : p; };
    std::vector<double> t(128, 0.0);
    for (int c = 0; c < 2; ++c)
      for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
          for (int x3 = 0; x3 < 2; ++x3)
            for (int y1 = 0; y1 < 2; ++y1)
              for (int y2 = 0; y2 < 2; ++y2)
                for (int y3 = 0; y3 < 2; ++y3) {
                  std::size_t off = static_cast<std::size_t>(
                      ((((((x1 * 2 + x2) * 2 + x3) * 2 + y1) * 2 + y2) * 2 + y3) * 2 + c));
                  t[off] = 0.5 * step(c, x1) * step(x1, x2) * step(x2, x3) * step(x3, y1) *
                           step(y1, y2) * step(y2, y3);
                }
    JointPmf j({{"X1", 2}, {"X2", 2}, {"X3", 2}, {"Y1", 2}, {"Y2", 2}, {"Y3", 2}, {"C", 2}}, t);
    CHECK(ck_identity_check(j, 3) <= 1e-10);
  }
  SUBCASE("axis count mismatch") {
    JointPmf j({{"A", 2}, {"B", 2}}, {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(ck_identity_check(j, 2), std::invalid_argument);
  }
}

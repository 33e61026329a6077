#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "secagg/errors.hpp"
#include "secagg/rng.hpp"
#include "secagg/robustness.hpp"

using namespace secagg;

namespace {

// Reference for the sampling bound through gamma functions instead of
// an iterated product: the chance that q draws without replacement all
// land on the l(1 - s_m) untouched coordinates is
//   C(clean, q) / C(l, q)  with  clean = l (1 - s_m).
double miss_prob_ref(uint64_t l, double s_m, uint32_t q) {
  double clean = static_cast<double>(l) * (1.0 - s_m);
  if (clean - static_cast<double>(q - 1) <= 0.0) return 0.0;
  return std::exp(std::lgamma(clean + 1.0) - std::lgamma(clean - q + 1.0) +
                  std::lgamma(static_cast<double>(l - q) + 1.0) -
                  std::lgamma(static_cast<double>(l) + 1.0));
}

// exact integer model for whole tampered counts: miss = hypergeometric
// probability of drawing zero of the `bad` marked coordinates
double miss_prob_int(uint64_t l, uint64_t bad, uint32_t q) {
  double p = 1.0;
  for (uint32_t i = 0; i < q; ++i)
    p *= (static_cast<double>(l - bad) - i) / (static_cast<double>(l) - i);
  return p;
}

}  // namespace

TEST_CASE("check count table for one million parameters") {
  // l = 60000, confidence 99.5%
  struct Row {
    double s_m;
    uint32_t q;
  };
  const Row rows[] = {{0.1, 51}, {0.3, 15}, {0.5, 8}, {0.7, 5}, {1.0, 1}};
  for (auto r : rows) {
    CHECK(compute_q(60000, r.s_m, 0.005).q == r.q);
    // minimality: one check fewer leaves too much miss probability
    if (r.q > 1) CHECK(miss_prob_ref(60000, r.s_m, r.q - 1) >= 0.005);
    CHECK(miss_prob_ref(60000, r.s_m, r.q) < 0.005);
    // these tamper counts are whole numbers, so the exact integer
    // model must agree with the gamma form
    auto bad = static_cast<uint64_t>(std::llround(r.s_m * 60000.0));
    CHECK(miss_prob_ref(60000, r.s_m, r.q) ==
          doctest::Approx(miss_prob_int(60000, bad, r.q)).epsilon(1e-7));
  }
}

TEST_CASE("check count agrees with the reference everywhere") {
  Rng rng(0x0b01);
  for (int trial = 0; trial < 200; ++trial) {
    uint32_t l = 2 + static_cast<uint32_t>(rng.below(5000));
    double s_m = (1.0 + static_cast<double>(rng.below(100))) / 100.0;
    double delta = 0.001 + rng.unit() * 0.2;
    auto b = compute_q(l, s_m, delta);
    CHECK(b.q >= 1);
    CHECK(b.q <= l);
    // q is capped at l; below the cap it must clear delta, and one
    // check fewer must not
    if (b.q < l) CHECK(miss_prob_ref(l, s_m, b.q) < delta);
    if (b.q > 1) CHECK(miss_prob_ref(l, s_m, b.q - 1) >= delta);
    CHECK(b.p_detect ==
          doctest::Approx(1.0 - miss_prob_ref(l, s_m, b.q)).epsilon(1e-7));
  }
  CHECK(compute_q(100, 1.0, 0.01).q == 1);
  // checking everything is the worst case the sampler can need
  CHECK(compute_q(10, 0.1, 1e-9).q == 10);
  CHECK_THROWS_AS(compute_q(100, 0.0, 0.01), ParamError);
  CHECK_THROWS_AS(compute_q(100, 1.5, 0.01), ParamError);
  CHECK_THROWS_AS(compute_q(100, 0.5, 0.0), ParamError);
  CHECK_THROWS_AS(compute_q(100, 0.5, 1.0), ParamError);
  CHECK_THROWS_AS(compute_q(0, 0.5, 0.01), ParamError);
}

TEST_CASE("detection probability complements the miss bound") {
  CHECK(detect_prob(60000, 0.5, 8) == doctest::Approx(1.0 - miss_prob_ref(60000, 0.5, 8)));
  CHECK(detect_prob(16, 1.0, 1) == doctest::Approx(1.0));
  CHECK(detect_prob(16, 0.5, 16) == doctest::Approx(1.0));
}

TEST_CASE("cluster assignment balances sizes and covers everyone") {
  std::vector<uint32_t> ids;
  for (uint32_t i = 1; i <= 50; ++i) ids.push_back(i);
  auto plan = cluster_assign(ids, 7, 0x0b02);
  REQUIRE(plan.members.size() == 7);
  std::multiset<size_t> sizes;
  std::set<uint32_t> seen;
  for (auto &c : plan.members) {
    sizes.insert(c.size());
    for (uint32_t m : c) CHECK(seen.insert(m).second);
    CHECK(std::is_sorted(c.begin(), c.end()));
  }
  CHECK(seen.size() == 50);
  CHECK(*sizes.begin() == 7);
  CHECK(*sizes.rbegin() == 8);  // 50 = 7*7 + 1

  // assignment is a function of the seed
  auto again = cluster_assign(ids, 7, 0x0b02);
  CHECK(again.members == plan.members);
  auto other = cluster_assign(ids, 7, 0x0b03);
  CHECK(other.members != plan.members);

  CHECK_THROWS_AS(cluster_assign(ids, 0, 1), ParamError);
  CHECK_THROWS_AS(cluster_assign(ids, 51, 1), ParamError);
}

TEST_CASE("lower median matches a sort-based reference") {
  Rng rng(0x0b04);
  for (int trial = 0; trial < 100; ++trial) {
    size_t c = 1 + rng.below(9);
    size_t l = 1 + rng.below(6);
    std::vector<std::vector<double>> rows(c, std::vector<double>(l));
    for (auto &r : rows)
      for (double &x : r) x = rng.normal() * 10.0;
    auto med = lower_median(rows);
    REQUIRE(med.size() == l);
    for (size_t k = 0; k < l; ++k) {
      std::vector<double> col(c);
      for (size_t i = 0; i < c; ++i) col[i] = rows[i][k];
      std::sort(col.begin(), col.end());
      CHECK(med[k] == col[(c - 1) / 2]);
    }
  }
  CHECK_THROWS_AS(lower_median({}), ParamError);
  CHECK_THROWS_AS(lower_median({{1.0, 2.0}, {3.0}}), ParamError);
}

TEST_CASE("threshold derivation matches a hand computation") {
  // three cluster means per coordinate, eta = 2
  std::vector<std::vector<double>> means = {
      {1.0, -4.0}, {3.0, -2.0}, {11.0, 0.0}};
  auto b = derive_threshold(means, 2.0, 16);
  // coord 0: mean 5, sample var ((16+4+36)/2)=28, sigma=sqrt(28)
  // coord 1: mean -2, sample var 4, sigma=2
  CHECK(b.lambda_real[0] == doctest::Approx(3.0));
  CHECK(b.lambda_real[1] == doctest::Approx(-2.0));
  CHECK(b.sigma_mu[0] == doctest::Approx(std::sqrt(28.0)));
  CHECK(b.sigma_mu[1] == doctest::Approx(2.0));
  CHECK(b.lambda.coords[0] == fp_encode(3.0, 16));
  CHECK(b.lambda.coords[1] == fp_encode(-2.0, 16));
  CHECK(b.theta.coords[0] == fp_encode(2.0 * std::sqrt(28.0), 16));
  CHECK(b.theta.coords[1] == fp_encode(4.0, 16));
  CHECK(b.eta == doctest::Approx(2.0));

  // degenerate spread floors at a positive width instead of zero
  std::vector<std::vector<double>> flat = {{1.0}, {1.0}, {1.0}};
  auto fb = derive_threshold(flat, 3.0, 16);
  CHECK(fb.theta.coords[0] == Fp{kThetaFloorUnits});

  CHECK_THROWS_AS(derive_threshold({{1.0}}, 2.0, 16), ParamError);
  CHECK_THROWS_AS(derive_threshold(means, 0.0, 16), ParamError);
}

TEST_CASE("cluster mean deviation shrinks like the root of cluster size") {
  // Gaussian updates: the sample deviation of cluster means approaches
  // sigma / sqrt(n_c).  20 clusters of 10 keep the estimate tight.
  Rng rng(0x0b05);
  const size_t clusters = 20, per = 10;
  const int reps = 200;
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    std::vector<std::vector<double>> means(clusters, std::vector<double>(1));
    for (auto &m : means) {
      double s = 0.0;
      for (size_t i = 0; i < per; ++i) s += rng.normal();
      m[0] = s / per;
    }
    auto b = derive_threshold(means, 1.0, 16);
    acc += b.sigma_mu[0];
  }
  double avg = acc / reps;
  double want = 1.0 / std::sqrt(static_cast<double>(per));
  CHECK(std::fabs(avg - want) / want < 0.05);
}

TEST_CASE("eta heuristic and the monitor that retunes it") {
  CHECK(default_eta(3.0, 16) == doctest::Approx(12.0));
  CHECK(default_eta(1.0, 100) == doctest::Approx(10.0));
  // 40 of 50 passing exceeds a 25% malicious budget (ceiling 37.5)
  auto m = tune_eta(0.25, 50, 40);
  CHECK(m.flagged);
  CHECK(m.bound == doctest::Approx(37.5));
  CHECK(!tune_eta(0.25, 50, 37).flagged);
  CHECK(!tune_eta(0.0, 50, 50).flagged);
  CHECK(tune_eta(0.5, 50, 26).flagged);
  CHECK_THROWS_AS(tune_eta(1.0, 50, 10), ParamError);
  CHECK_THROWS_AS(tune_eta(-0.1, 50, 10), ParamError);
}

TEST_CASE("sampled indices are distinct, in range, and reproducible") {
  auto s1 = sample_indices(100, 12, 0x0b06, 3);
  auto s2 = sample_indices(100, 12, 0x0b06, 3);
  CHECK(s1 == s2);
  CHECK(s1.size() == 12);
  CHECK(std::is_sorted(s1.begin(), s1.end()));
  CHECK(std::set<uint32_t>(s1.begin(), s1.end()).size() == 12);
  for (uint32_t k : s1) CHECK(k < 100);
  auto s3 = sample_indices(100, 12, 0x0b06, 4);
  CHECK(s1 != s3);
  auto all = sample_indices(9, 9, 1, 1);
  CHECK(all == std::vector<uint32_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK_THROWS_AS(sample_indices(8, 9, 1, 1), ParamError);
  CHECK_THROWS_AS(sample_indices(8, 0, 1, 1), ParamError);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "biaslens/stats.hpp"

using namespace biaslens;
using Catch::Approx;

// Golden (W, p) pairs come from a trusted reference statistics implementation
// run once on these frozen vectors.

namespace {

const std::vector<double> kVec4 = {3.12, 1.04, 2.77, 4.50};
const std::vector<double> kVec6 = {2.1, 3.4, 1.9, 4.4, 3.1, 2.2};
const std::vector<double> kVec10 = {0.52, 1.93, -0.64, 2.21, 0.77,
                                    1.30, -1.51, 0.04, 0.88, 1.62};
const std::vector<double> kVec30 = {
    9.5906,  10.9579, 8.9611,  8.8885,  13.9316, 12.7868, 10.1858, 10.5635,
    11.538,  12.4929, 12.0144, 7.4076,  10.55,   10.4578, 12.7058, 11.7729,
    5.9967,  9.2563,  13.3381, 9.1229,  8.9205,  10.954,  16.4979, 7.9575,
    8.8458,  10.2482, 10.6052, 11.0475, 10.0019, 12.6876};
const std::vector<double> kVec100 = {
    2.4944,  2.29,    2.2403, 5.5349, 1.9195, 4.8721, 1.287,  2.0622, 4.9991, 2.423,
    4.1736,  4.6352,  8.2112, 2.1444, 6.16,   2.5904, 4.1238, 5.8765, 3.9427, 0.5943,
    1.5432,  7.2519,  6.989,  2.8899, 2.6612, 2.1413, 4.127,  1.7815, 7.0217, 10.3418,
    3.6863,  6.677,   4.479,  12.0147, 4.073,  6.2813, 5.6108, 4.3858, 3.9205, 2.1287,
    7.3278,  6.916,   2.8396, 5.2271, 1.9818, 3.0922, 5.8732, 1.1679, 4.9302, 5.9781,
    4.2695,  2.6906,  1.6883, 1.0117, 5.2298, 5.5198, 3.3063, 5.3504, 2.3021, 8.185,
    5.3777,  2.6034,  3.3694, 3.9582, 2.4172, 6.0294, 5.1397, 1.2622, 7.7942, 3.4234,
    0.9692,  11.5082, 3.7353, 7.8226, 12.2984, 2.5559, 1.7026, 2.9544, 5.1634, 2.7833,
    2.1326,  10.0233, 2.0565, 2.638,  2.4575, 2.4677, 6.0394, 6.6721, 8.0908, 4.6503,
    4.8066,  2.7458,  1.766,  2.3003, 2.4264, 3.6839, 2.9083, 7.871,  2.2636, 5.6672};

struct Golden {
  const std::vector<double>* sample;
  double w;
  double p;
};

const Golden kGoldens[] = {
    {&kVec4, 0.9764979876, 0.8812032623},
    {&kVec6, 0.9043624982, 0.4003579896},
    {&kVec10, 0.9592368996, 0.7771369152},
    {&kVec30, 0.9798343208, 0.8211308094},
    {&kVec100, 0.9156327689, 0.0000083170},
};

}  // namespace

TEST_CASE("shapiro_wilk matches reference goldens", "[stats]") {
  for (const auto& g : kGoldens) {
    auto r = shapiro_wilk(*g.sample);
    INFO("n=" << g.sample->size());
    CHECK(r.statistic == Approx(g.w).margin(1e-3));
    CHECK(r.p_value == Approx(g.p).margin(5e-3));
    CHECK(r.statistic > 0.0);
    CHECK(r.statistic <= 1.0);
    CHECK(r.n1 == int(g.sample->size()));
  }
}

TEST_CASE("shapiro_wilk is invariant under positive affine transforms", "[stats]") {
  auto base = shapiro_wilk(kVec6);
  std::vector<double> scaled;
  for (double x : kVec6) scaled.push_back(5.0 * x + 3.0);
  auto tr = shapiro_wilk(scaled);
  CHECK(tr.statistic == Approx(base.statistic).margin(1e-9));
  CHECK(tr.p_value == Approx(base.p_value).margin(1e-9));
}

TEST_CASE("shapiro_wilk domain errors", "[stats]") {
  CHECK_THROWS_AS(shapiro_wilk({1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(shapiro_wilk({2.0, 2.0, 2.0, 2.0}), DomainError);
  std::vector<double> huge(5001, 0.0);
  for (size_t i = 0; i < huge.size(); ++i) huge[i] = double(i);
  CHECK_THROWS_AS(shapiro_wilk(huge), DomainError);
}

TEST_CASE("shapiro_wilk n=3 exact branch", "[stats]") {
  auto r = shapiro_wilk({1.0, 2.0, 4.0});
  CHECK(r.statistic > 0.0);
  CHECK(r.statistic <= 1.0);
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);
}

TEST_CASE("shapiro_wilk Monte Carlo rejection rate near nominal alpha", "[stats]") {
  std::mt19937 rng(20240515);
  std::normal_distribution<double> normal(0.0, 1.0);
  int rejected = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> sample(6);
    for (auto& x : sample) x = normal(rng);
    if (shapiro_wilk(sample).p_value < 0.05) ++rejected;
  }
  double rate = double(rejected) / trials;
  CHECK(rate >= 0.03);
  CHECK(rate <= 0.08);
}

TEST_CASE("t-test on identical samples", "[stats]") {
  auto r = t_test_independent({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(r.statistic == Approx(0.0).margin(1e-15));
  CHECK(r.p_value == Approx(1.0).margin(1e-12));
  CHECK(*r.degrees_of_freedom == Approx(4.0));
}

TEST_CASE("t-test hand-computed pooled example", "[stats]") {
  // [2,4,6] vs [1,3,5]: diff of means 1, pooled sd 2, se = 2*sqrt(2/3)
  //   t = 1 / (2*sqrt(2/3)) = 0.612372..., df = 4
  auto r = t_test_independent({2, 4, 6}, {1, 3, 5});
  CHECK(r.statistic == Approx(0.612372435696).margin(1e-10));
  CHECK(*r.degrees_of_freedom == Approx(4.0));
  CHECK(r.p_value == Approx(0.573392253825).margin(1e-9));
  CHECK(r.n1 == 3);
  CHECK(*r.n2 == 3);
}

TEST_CASE("t-test antisymmetry", "[stats]") {
  std::vector<double> a = {0.26, 0.31, 0.18, 0.22, 0.29, 0.33};
  std::vector<double> b = {0.13, 0.20, 0.16, 0.11, 0.25, 0.19};
  auto ab = t_test_independent(a, b);
  auto ba = t_test_independent(b, a);
  CHECK(ab.statistic == Approx(-ba.statistic).margin(1e-12));
  CHECK(ab.p_value == Approx(ba.p_value).margin(1e-12));
}

TEST_CASE("t-test degenerate samples", "[stats]") {
  CHECK_THROWS_AS(t_test_independent({1.0}, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(t_test_independent({2.0, 2.0}, {2.0, 2.0}), DomainError);
}

TEST_CASE("t distribution survival consistent with published t/p pair", "[stats]") {
  // with n1 = n2 = 6 (df = 10), t = 2.392 must land near p = 0.0378 two-sided
  double p = student_t_two_sided_p(2.392, 10.0);
  CHECK(p >= 0.0375);
  CHECK(p <= 0.0381);
}

TEST_CASE("incomplete beta closed forms", "[stats]") {
  for (double x : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0})
    CHECK(incomplete_beta(1.0, 1.0, x) == Approx(x).margin(1e-12));
  for (double x : {0.2, 0.4, 0.6})
    CHECK(incomplete_beta(2.5, 1.5, x) + incomplete_beta(1.5, 2.5, 1.0 - x) ==
          Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(incomplete_beta(0.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("normal quantile round-trips through the CDF", "[stats]") {
  for (double p : {0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
    double z = statdetail::normal_quantile(p);
    CHECK(1.0 - statdetail::normal_sf(z) == Approx(p).margin(1e-12));
  }
}

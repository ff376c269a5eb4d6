#pragma once

// Inferential statistics: Shapiro-Wilk normality test (Royston's AS R94
// approximation, 3 <= n <= 5000) and Student's pooled-variance two-sample
// t-test with p-values from the regularized incomplete beta function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/types.hpp"

namespace biaslens {

enum class StatTest { ShapiroWilk, TTest };

inline std::string to_string(StatTest t) {
  return t == StatTest::ShapiroWilk ? "shapiro_wilk" : "t_test";
}

struct StatTestResult {
  StatTest test = StatTest::ShapiroWilk;
  double statistic = 0.0;
  double p_value = 1.0;
  int n1 = 0;
  std::optional<int> n2;
  std::optional<double> degrees_of_freedom;
};

namespace statdetail {

/// Wichura's PPND16 (AS 241): quantile of the standard normal distribution.
inline double normal_quantile(double p) {
  if (p <= 0.0 || p >= 1.0) throw DomainError("normal_quantile: p outside (0, 1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

/// Upper tail of the standard normal distribution.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double poly(const double* c, int n, double x) {
  double v = c[0];
  double p = 1.0;
  for (int i = 1; i < n; ++i) {
    p *= x;
    v += c[i] * p;
  }
  return v;
}

/// Continued-fraction evaluation for the regularized incomplete beta
/// function (Lentz's method).
inline double betacf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw DomainError("incomplete beta: continued fraction did not converge");
}

}  // namespace statdetail

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw DomainError("incomplete_beta: a, b must be positive");
  if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                       b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * statdetail::betacf(a, b, x) / a;
  return 1.0 - bt * statdetail::betacf(b, a, 1.0 - x) / b;
}

/// Two-sided p-value of Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (df <= 0.0) throw DomainError("student_t_two_sided_p: df must be positive");
  if (t == 0.0) return 1.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

/// Shapiro-Wilk W and p-value per Royston (1995), AS R94. Requires
/// 3 <= n <= 5000 and a non-degenerate sample.
inline StatTestResult shapiro_wilk(std::vector<double> sample) {
  const int n = int(sample.size());
  if (n < 3) throw DomainError("shapiro_wilk: sample size must be >= 3");
  if (n > 5000) throw DomainError("shapiro_wilk: sample size must be <= 5000");
  std::sort(sample.begin(), sample.end());
  if (sample.front() == sample.back())
    throw DomainError("shapiro_wilk: sample has zero variance");

  const int n2 = n / 2;
  std::vector<double> a(static_cast<size_t>(n2));
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    // expected normal order statistics, normalized per Royston
    const double an25 = double(n) + 0.25;
    double sum2 = 0.0;
    for (int i = 0; i < n2; ++i) {
      a[size_t(i)] = statdetail::normal_quantile((double(i + 1) - 0.375) / an25);
      sum2 += a[size_t(i)] * a[size_t(i)];
    }
    sum2 *= 2.0;
    const double ssumm2 = std::sqrt(sum2);
    const double rsn = 1.0 / std::sqrt(double(n));
    static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    const double a1 = statdetail::poly(c1, 6, rsn) - a[0] / ssumm2;
    int i1;
    double fac;
    if (n > 5) {
      i1 = 2;
      const double a2 = -a[1] / ssumm2 + statdetail::poly(c2, 6, rsn);
      fac = std::sqrt((sum2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[0] = a1;
      a[1] = a2;
    } else {
      i1 = 1;
      fac = std::sqrt((sum2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
      a[0] = a1;
    }
    for (int i = i1; i < n2; ++i) a[size_t(i)] = -a[size_t(i)] / fac;
  }

  // W as the squared correlation between the sample and the coefficients
  const double range = sample.back() - sample.front();
  double sx = 0.0, sa = 0.0;
  {
    int j = n - 1;
    for (int i = 0; i < n; ++i) {
      sx += sample[size_t(i)] / range;
      if (i != j) sa += double(i < j ? -1 : 1) * a[size_t(std::min(i, j))];
      --j;
    }
  }
  sx /= double(n);
  sa /= double(n);
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  {
    int j = n - 1;
    for (int i = 0; i < n; ++i) {
      double asa = (i != j) ? double(i < j ? -1 : 1) * a[size_t(std::min(i, j))] - sa : -sa;
      double xsx = sample[size_t(i)] / range - sx;
      ssa += asa * asa;
      ssx += xsx * xsx;
      sax += asa * xsx;
      --j;
    }
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  // significance level
  double pw;
  if (n == 3) {
    constexpr double kPi6 = 1.90985931710274;   // 6/pi
    constexpr double kStqr = 1.04719755119660;  // asin(sqrt(3/4))
    pw = std::clamp(kPi6 * (std::asin(std::sqrt(w)) - kStqr), 0.0, 1.0);
  } else {
    const double y = std::log(w1);
    const double xx = std::log(double(n));
    double m, s;
    if (n <= 11) {
      static constexpr double c3[4] = {0.5440, -0.39978, 0.025054, -6.714e-4};
      static constexpr double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
      static constexpr double g[2] = {-2.273, 0.459};
      const double gamma = statdetail::poly(g, 2, double(n));
      if (y >= gamma) {
        pw = 1e-19;
      } else {
        const double y2 = -std::log(gamma - y);
        m = statdetail::poly(c3, 4, double(n));
        s = std::exp(statdetail::poly(c4, 4, double(n)));
        pw = statdetail::normal_sf((y2 - m) / s);
      }
    } else {
      static constexpr double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
      static constexpr double c6[3] = {-0.4803, -0.082676, 0.0030302};
      m = statdetail::poly(c5, 4, xx);
      s = std::exp(statdetail::poly(c6, 3, xx));
      pw = statdetail::normal_sf((y - m) / s);
    }
  }

  StatTestResult r;
  r.test = StatTest::ShapiroWilk;
  r.statistic = w;
  r.p_value = pw;
  r.n1 = n;
  return r;
}

/// Student's independent two-sample t-test with pooled variance,
/// df = n1 + n2 - 2, two-sided p.
inline StatTestResult t_test_independent(const std::vector<double>& sample1,
                                         const std::vector<double>& sample2) {
  const int n1 = int(sample1.size()), n2 = int(sample2.size());
  if (n1 < 2 || n2 < 2) throw DomainError("t_test_independent: each sample needs n >= 2");
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
  };
  const double m1 = mean(sample1), m2 = mean(sample2);
  double ss1 = 0.0, ss2 = 0.0;
  for (double x : sample1) ss1 += (x - m1) * (x - m1);
  for (double x : sample2) ss2 += (x - m2) * (x - m2);
  const double df = double(n1 + n2 - 2);
  const double pooled_var = (ss1 + ss2) / df;
  if (pooled_var <= 0.0) throw DomainError("t_test_independent: zero pooled variance");
  const double se = std::sqrt(pooled_var * (1.0 / n1 + 1.0 / n2));
  const double t = (m1 - m2) / se;

  StatTestResult r;
  r.test = StatTest::TTest;
  r.statistic = t;
  r.p_value = student_t_two_sided_p(t, df);
  r.n1 = n1;
  r.n2 = n2;
  r.degrees_of_freedom = df;
  return r;
}

}  // namespace biaslens

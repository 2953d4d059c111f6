// Copyright 2026 The ContestLab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "contestlab/stats.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "contestlab/errors.h"

namespace contestlab {
namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

Moments Describe(const std::vector<double>& x) {
  Moments m;
  m.n = static_cast<double>(x.size());
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / m.n;
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.var = ss / (m.n - 1.0);
  return m;
}

double TwoSidedP(double t, double df) {
  if (std::isnan(t)) return 1.0;
  return std::clamp(2.0 * StudentTCdf(-std::abs(t), df), 0.0, 1.0);
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double BetaContinuedFraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double step = d * c;
    h *= step;
    if (std::abs(step - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

TTestResult WelchTTest(const std::vector<double>& a, const std::vector<double>& b, bool pooled) {
  if (a.size() < 2 || b.size() < 2) {
    throw DegenerateSample("two-sample t-test needs at least two values per sample");
  }
  const Moments ma = Describe(a);
  const Moments mb = Describe(b);
  if (ma.var == 0.0 && mb.var == 0.0) throw DegenerateSample("both samples are constant");
  TTestResult r;
  r.pooled = pooled;
  r.means = {ma.mean, mb.mean};
  const double diff = ma.mean - mb.mean;
  double se = 0.0;
  if (pooled) {
    r.degrees_of_freedom = ma.n + mb.n - 2.0;
    const double sp2 = ((ma.n - 1.0) * ma.var + (mb.n - 1.0) * mb.var) / r.degrees_of_freedom;
    se = std::sqrt(sp2 * (1.0 / ma.n + 1.0 / mb.n));
  } else {
    const double va = ma.var / ma.n;
    const double vb = mb.var / mb.n;
    se = std::sqrt(va + vb);
    r.degrees_of_freedom =
        (va + vb) * (va + vb) / (va * va / (ma.n - 1.0) + vb * vb / (mb.n - 1.0));
  }
  r.statistic = diff / se;
  r.p_value = TwoSidedP(r.statistic, r.degrees_of_freedom);
  const double q = StudentTQuantile(0.975, r.degrees_of_freedom);
  r.ci_lower = diff - q * se;
  r.ci_upper = diff + q * se;
  return r;
}

TTestResult OneSampleTTest(const std::vector<double>& sample, double mu0) {
  if (sample.size() < 2) throw DegenerateSample("one-sample t-test needs at least two values");
  const Moments m = Describe(sample);
  if (m.var == 0.0) throw DegenerateSample("sample is constant");
  TTestResult r;
  r.means = {m.mean};
  r.degrees_of_freedom = m.n - 1.0;
  const double se = std::sqrt(m.var / m.n);
  r.statistic = (m.mean - mu0) / se;
  r.p_value = TwoSidedP(r.statistic, r.degrees_of_freedom);
  const double q = StudentTQuantile(0.975, r.degrees_of_freedom);
  r.ci_lower = m.mean - q * se;
  r.ci_upper = m.mean + q * se;
  return r;
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(a, b, x) / a;
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTCdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  if (t == 0.0) return 0.5;
  const double tail = 0.5 * RegularizedIncompleteBeta(df / 2.0, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

double StudentTQuantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must be in (0,1)");
  if (p == 0.5) return 0.0;
  double lo = -1.0;
  double hi = 1.0;
  while (StudentTCdf(lo, df) > p) lo *= 2.0;
  while (StudentTCdf(hi, df) < p) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (StudentTCdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> OlsFit::ConfidenceInterval(std::size_t k, double level) const {
  if (ResidualDf() <= 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double q = StudentTQuantile(0.5 + level / 2.0, static_cast<double>(ResidualDf()));
  return {coefficients.at(k) - q * standard_errors.at(k),
          coefficients.at(k) + q * standard_errors.at(k)};
}

std::size_t OlsFit::IndexOf(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no coefficient named " + name);
  return static_cast<std::size_t>(it - names.begin());
}

OlsFit FitOls(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
              std::vector<std::string> names, const std::optional<std::vector<long>>& clusters) {
  const Eigen::Index n = static_cast<Eigen::Index>(y.size());
  const Eigen::Index k = static_cast<Eigen::Index>(columns.size());
  if (names.size() != columns.size()) throw std::invalid_argument("one name per column");
  for (const auto& col : columns) {
    if (static_cast<Eigen::Index>(col.size()) != n) {
      throw std::invalid_argument("column length differs from y");
    }
  }
  if (clusters && static_cast<Eigen::Index>(clusters->size()) != n) {
    throw std::invalid_argument("cluster ids length differs from y");
  }
  if (k == 0 || n < k) {
    throw RankDeficient(std::to_string(n) + " observations for " + std::to_string(k) +
                        " parameters");
  }
  Eigen::MatrixXd x(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    x.col(j) = Eigen::Map<const Eigen::VectorXd>(columns[j].data(), n);
  }
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) throw RankDeficient("design matrix is not of full column rank");
  const Eigen::VectorXd beta = qr.solve(yv);
  const Eigen::VectorXd resid = yv - x * beta;

  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
  Eigen::MatrixXd cov;
  if (clusters) {
    std::map<long, Eigen::VectorXd> scores;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto [it, inserted] = scores.try_emplace((*clusters)[i], Eigen::VectorXd::Zero(k));
      it->second += x.row(i).transpose() * resid(i);
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [id, s] : scores) meat += s * s.transpose();
    const double g = static_cast<double>(scores.size());
    const double factor = g > 1.0 && n > k ? g / (g - 1.0) * static_cast<double>(n - 1) /
                                                 static_cast<double>(n - k)
                                           : std::numeric_limits<double>::quiet_NaN();
    cov = factor * xtx_inv * meat * xtx_inv;
  } else if (n > k) {
    const double sigma2 = resid.squaredNorm() / static_cast<double>(n - k);
    cov = sigma2 * xtx_inv;
  } else {
    cov = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
  }

  OlsFit fit;
  fit.names = std::move(names);
  fit.n_obs = static_cast<long>(n);
  fit.clustered = clusters.has_value();
  for (Eigen::Index j = 0; j < k; ++j) {
    fit.coefficients.push_back(beta(j));
    fit.standard_errors.push_back(std::isnan(cov(j, j)) ? cov(j, j) : std::sqrt(std::max(0.0, cov(j, j))));
  }
  const double tss = (yv.array() - yv.mean()).square().sum();
  fit.r_squared = tss > 0.0 ? std::clamp(1.0 - resid.squaredNorm() / tss, 0.0, 1.0) : 0.0;
  return fit;
}

}  // namespace contestlab

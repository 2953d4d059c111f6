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

#ifndef CONTESTLAB_STATS_H_
#define CONTESTLAB_STATS_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace contestlab {

struct TTestResult {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-sided
  std::vector<double> means;
  // 95% interval for the mean (one-sample) or the mean difference a - b.
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool pooled = false;
};

// Welch statistic with Satterthwaite df; `pooled` switches to the
// equal-variance test. Throws DegenerateSample when a sample has fewer than
// two values or both variances are zero.
TTestResult WelchTTest(const std::vector<double>& a, const std::vector<double>& b,
                       bool pooled = false);
TTestResult OneSampleTTest(const std::vector<double>& sample, double mu0);

// I_x(a, b).
double RegularizedIncompleteBeta(double a, double b, double x);
double StudentTCdf(double t, double df);
double StudentTQuantile(double p, double df);

struct OlsFit {
  std::vector<std::string> names;
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  double r_squared = 0.0;
  long n_obs = 0;
  bool clustered = false;

  long ResidualDf() const { return n_obs - static_cast<long>(coefficients.size()); }
  // Two-sided interval at `level` from the t distribution with ResidualDf().
  std::pair<double, double> ConfidenceInterval(std::size_t k, double level = 0.95) const;
  std::size_t IndexOf(const std::string& name) const;
};

// Least squares of y on the given columns (supply an all-ones column for an
// intercept). Throws RankDeficient when the design is not of full column
// rank. With as many observations as parameters the fit is exact and the
// standard errors are NaN. With `clusters`, standard errors are
// cluster-robust with the usual small-sample factor.
OlsFit FitOls(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
              std::vector<std::string> names,
              const std::optional<std::vector<long>>& clusters = std::nullopt);

}  // namespace contestlab

#endif  // CONTESTLAB_STATS_H_

// Pairwise-comparison scaling: vote counts to JOD scores under a probit
// model, covariance-aware z-tests, bootstrap intervals, observer screening.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "holo/errors.hpp"

namespace holo {

// counts(i, j) = number of times option j was preferred over option i.
struct VoteMatrix {
  int n = 0;
  std::vector<double> counts;

  VoteMatrix() = default;
  explicit VoteMatrix(int size) : n(size), counts(static_cast<size_t>(size) * size, 0.0) {}

  double& at(int i, int j) { return counts[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return counts[static_cast<size_t>(i) * n + j]; }
  void validate() const;
  VoteMatrix transposed() const;
  VoteMatrix& operator+=(const VoteMatrix& other);
};

struct JodResult {
  std::vector<double> scores;      // mean-anchored to zero
  std::vector<double> covariance;  // n x n, row-major
  std::vector<std::pair<double, double>> ci;  // 95% bootstrap interval per score

  int n() const { return static_cast<int>(scores.size()); }
  double cov(int i, int j) const { return covariance[static_cast<size_t>(i) * scores.size() + j]; }
};

// Maximum-likelihood probit scaling with sigma = 1/Phi^-1(0.75), so a 1 JOD
// gap corresponds to a 75% preference. Requires a connected comparison graph.
JodResult scale_jod(const VoteMatrix& votes);

// z = (q_i - q_j) / sqrt(c_ii + c_jj - 2 c_ij), two-tailed p.
std::pair<double, double> jod_ztest(const JodResult& result, int i, int j);

// Observer bootstrap: resample observers with replacement n_samples times and
// report 2.5/97.5 percentiles per score. Deterministic under the seed.
JodResult bootstrap_ci(const std::vector<VoteMatrix>& observers, int n_samples, uint64_t seed);

// Observers whose mean log-likelihood under the pooled model falls more than
// 1.5 IQR below the lower quartile. Fewer than 3 observers yields no flags.
std::vector<int> screen_outliers(const std::vector<VoteMatrix>& observers);

double normal_cdf(double x);
double normal_pdf(double x);
double normal_quantile(double p);

}  // namespace holo

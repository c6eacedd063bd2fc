#include "holo/psychstats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>

#include "holo/random.hpp"

namespace holo {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242096981;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438187;
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }
double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_quantile(double p) {
  if (!(p > 0) || !(p < 1)) throw DomainError("normal_quantile: p must be inside (0, 1)");
  // Acklam's rational approximation, polished with one Newton step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - p_low) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double err = normal_cdf(x) - p;
  x -= err / normal_pdf(x);
  return x;
}

void VoteMatrix::validate() const {
  if (n < 2) throw DataError("vote matrix: need at least two options");
  if (counts.size() != static_cast<size_t>(n) * n) throw DataError("vote matrix: bad size");
  for (int i = 0; i < n; ++i) {
    if (at(i, i) != 0) throw DataError("vote matrix: diagonal must be zero");
    for (int j = 0; j < n; ++j)
      if (at(i, j) < 0) throw DataError("vote matrix: negative count");
  }
}

VoteMatrix VoteMatrix::transposed() const {
  VoteMatrix t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.at(j, i) = at(i, j);
  return t;
}

VoteMatrix& VoteMatrix::operator+=(const VoteMatrix& other) {
  if (n == 0) *this = VoteMatrix(other.n);
  if (n != other.n) throw DataError("vote matrix: size mismatch in sum");
  for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

namespace {

// 1 JOD difference <=> 75% preference.
const double kSigmaJod = 1.0 / normal_quantile(0.75);

// Gaussian elimination with partial pivoting; A is m x m row-major.
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> rhs) {
  const int m = static_cast<int>(rhs.size());
  for (int col = 0; col < m; ++col) {
    int pivot = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(A[r * m + col]) > std::abs(A[pivot * m + col])) pivot = r;
    if (std::abs(A[pivot * m + col]) < 1e-300)
      throw DomainError("scale_jod: singular system in Newton step");
    if (pivot != col) {
      for (int c = 0; c < m; ++c) std::swap(A[col * m + c], A[pivot * m + c]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (int r = col + 1; r < m; ++r) {
      const double f = A[r * m + col] / A[col * m + col];
      for (int c = col; c < m; ++c) A[r * m + c] -= f * A[col * m + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(m);
  for (int r = m - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < m; ++c) acc -= A[r * m + c] * x[c];
    x[r] = acc / A[r * m + r];
  }
  return x;
}

void check_connected(const VoteMatrix& v) {
  std::vector<int> comp(v.n);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
  for (int i = 0; i < v.n; ++i)
    for (int j = i + 1; j < v.n; ++j)
      if (v.at(i, j) + v.at(j, i) > 0) comp[find(i)] = find(j);
  std::vector<std::vector<int>> groups(v.n);
  for (int i = 0; i < v.n; ++i) groups[find(i)].push_back(i);
  std::string desc;
  int count = 0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    ++count;
    desc += "{";
    for (size_t k = 0; k < g.size(); ++k) desc += (k ? "," : "") + std::to_string(g[k]);
    desc += "}";
  }
  if (count > 1)
    throw DataError("scale_jod: comparison graph is disconnected, components " + desc);
}

struct Objective {
  const VoteMatrix& c;  // regularized counts

  double loglik(const std::vector<double>& q) const {
    double ll = 0;
    for (int i = 0; i < c.n; ++i)
      for (int j = 0; j < c.n; ++j) {
        if (i == j || c.at(i, j) <= 0) continue;
        ll += c.at(i, j) * std::log(std::max(normal_cdf((q[j] - q[i]) / kSigmaJod), 1e-300));
      }
    return ll;
  }

  void derivatives(const std::vector<double>& q, std::vector<double>& grad,
                   std::vector<double>& hess) const {
    const int n = c.n;
    grad.assign(n, 0.0);
    hess.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || c.at(i, j) <= 0) continue;
        const double d = (q[j] - q[i]) / kSigmaJod;
        const double cdf = std::max(normal_cdf(d), 1e-300);
        const double ratio = normal_pdf(d) / cdf;      // inverse Mills
        const double g = c.at(i, j) * ratio / kSigmaJod;
        const double h = c.at(i, j) * (-d * ratio - ratio * ratio) / (kSigmaJod * kSigmaJod);
        grad[j] += g;
        grad[i] -= g;
        hess[j * n + j] += h;
        hess[i * n + i] += h;
        hess[j * n + i] -= h;
        hess[i * n + j] -= h;
      }
  }
};

// Orthonormal basis of the zero-sum subspace (Helmert columns), n x (n-1).
std::vector<double> helmert_basis(int n) {
  std::vector<double> b(static_cast<size_t>(n) * (n - 1), 0.0);
  for (int k = 1; k < n; ++k) {
    const double norm = std::sqrt(static_cast<double>(k) * (k + 1));
    for (int r = 0; r < k; ++r) b[r * (n - 1) + (k - 1)] = 1.0 / norm;
    b[k * (n - 1) + (k - 1)] = -k / norm;
  }
  return b;
}

}  // namespace

JodResult scale_jod(const VoteMatrix& votes) {
  votes.validate();
  check_connected(votes);
  const int n = votes.n;

  // Regularize: half a pseudo-vote per direction on every compared pair
  // keeps unanimous preferences finite.
  VoteMatrix reg = votes;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (votes.at(i, j) + votes.at(j, i) > 0) {
        reg.at(i, j) += 0.5;
        reg.at(j, i) += 0.5;
      }
  Objective obj{reg};

  // Start from quantile-transformed empirical preferences: least squares on
  // q_j - q_i = sigma * Phi^-1(p_hat) over the comparison graph.
  std::vector<double> q(n, 0.0);
  {
    std::vector<double> lap(static_cast<size_t>(n) * n, 0.0), rhs(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double total = reg.at(i, j) + reg.at(j, i);
        if (total <= 0) continue;
        const double t = kSigmaJod * normal_quantile(reg.at(i, j) / total);
        lap[i * n + i] += 1;
        lap[j * n + j] += 1;
        lap[i * n + j] -= 1;
        lap[j * n + i] -= 1;
        rhs[j] += t;
        rhs[i] -= t;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) lap[i * n + j] += 1.0;  // pin the mean to zero
    q = solve_dense(lap, rhs);
  }

  // Damped Newton on the zero-mean subspace; the probit log-likelihood is
  // concave so plain backtracking suffices.
  const std::vector<double> basis = helmert_basis(n);
  const int m = n - 1;
  auto reduce_vec = [&](const std::vector<double>& v) {
    std::vector<double> out(m, 0.0);
    for (int k = 0; k < m; ++k)
      for (int r = 0; r < n; ++r) out[k] += basis[r * m + k] * v[r];
    return out;
  };
  std::vector<double> grad, hess;
  double ll = obj.loglik(q);
  for (int iter = 0; iter < 200; ++iter) {
    obj.derivatives(q, grad, hess);
    const std::vector<double> g_red = reduce_vec(grad);
    double gmax = 0;
    for (double v : g_red) gmax = std::max(gmax, std::abs(v));
    if (gmax < 1e-11) break;

    std::vector<double> h_red(static_cast<size_t>(m) * m, 0.0);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        double acc = 0;
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c)
            acc += basis[r * m + a] * hess[r * n + c] * basis[c * m + b];
        h_red[a * m + b] = -acc;
        if (a == b) h_red[a * m + b] += 1e-10;
      }
    std::vector<double> step_red = solve_dense(h_red, g_red);
    std::vector<double> step(n, 0.0);
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < m; ++k) step[r] += basis[r * m + k] * step_red[k];

    double scale = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      std::vector<double> trial = q;
      for (int r = 0; r < n; ++r) trial[r] += scale * step[r];
      const double trial_ll = obj.loglik(trial);
      if (trial_ll >= ll - 1e-15) {
        q = std::move(trial);
        ll = trial_ll;
        break;
      }
      scale *= 0.5;
    }
  }
  const double mean = std::accumulate(q.begin(), q.end(), 0.0) / n;
  for (double& v : q) v -= mean;

  // Covariance: inverse observed information projected onto the zero-mean
  // subspace, C = B (B^T (-H) B)^-1 B^T.
  obj.derivatives(q, grad, hess);
  std::vector<double> info(static_cast<size_t>(m) * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double acc = 0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) acc += basis[r * m + a] * hess[r * n + c] * basis[c * m + b];
      info[a * m + b] = -acc;
      if (a == b) info[a * m + b] += 1e-12;
    }
  std::vector<double> inv(static_cast<size_t>(m) * m, 0.0);
  for (int col = 0; col < m; ++col) {
    std::vector<double> e(m, 0.0);
    e[col] = 1.0;
    const std::vector<double> x = solve_dense(info, e);
    for (int r = 0; r < m; ++r) inv[r * m + col] = x[r];
  }

  JodResult result;
  result.scores = q;
  result.covariance.assign(static_cast<size_t>(n) * n, 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double acc = 0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          acc += basis[r * m + a] * inv[a * m + b] * basis[c * m + b];
      result.covariance[r * n + c] = acc;
    }
  return result;
}

std::pair<double, double> jod_ztest(const JodResult& result, int i, int j) {
  const int n = result.n();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n)
    throw DomainError("jod_ztest: need two distinct valid options");
  const double v = result.cov(i, i) + result.cov(j, j) - 2.0 * result.cov(i, j);
  if (v <= 0) throw DomainError("jod_ztest: non-positive difference variance");
  const double z = (result.scores[i] - result.scores[j]) / std::sqrt(v);
  const double p = std::erfc(std::abs(z) / kSqrt2);
  return {z, p};
}

namespace {

double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * p;
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - lo;
  return values[lo] * (1 - frac) + values[lo + 1] * frac;
}

VoteMatrix pool(const std::vector<VoteMatrix>& observers) {
  VoteMatrix sum;
  for (const auto& o : observers) sum += o;
  return sum;
}

}  // namespace

JodResult bootstrap_ci(const std::vector<VoteMatrix>& observers, int n_samples, uint64_t seed) {
  if (observers.size() < 2) throw DataError("bootstrap_ci: need at least two observers");
  if (n_samples < 1) throw DomainError("bootstrap_ci: need at least one sample");
  JodResult result = scale_jod(pool(observers));
  const int n = result.n();

  std::vector<std::vector<double>> samples(n);
  for (int s = 0; s < n_samples; ++s) {
    std::mt19937_64 gen(derive_seed(seed, 0xb007, s));
    VoteMatrix resampled(observers.front().n);
    for (size_t k = 0; k < observers.size(); ++k) {
      const size_t pick = static_cast<size_t>(uniform_open(gen) * observers.size());
      resampled += observers[std::min(pick, observers.size() - 1)];
    }
    const JodResult r = scale_jod(resampled);
    for (int i = 0; i < n; ++i) samples[i].push_back(r.scores[i]);
  }
  result.ci.resize(n);
  for (int i = 0; i < n; ++i)
    result.ci[i] = {percentile(samples[i], 0.025), percentile(samples[i], 0.975)};
  return result;
}

std::vector<int> screen_outliers(const std::vector<VoteMatrix>& observers) {
  if (observers.size() < 3) return {};
  const JodResult group = scale_jod(pool(observers));
  const int n = group.n();

  std::vector<double> mean_ll;
  std::vector<int> index;
  for (size_t o = 0; o < observers.size(); ++o) {
    const VoteMatrix& v = observers[o];
    double ll = 0, total = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || v.at(i, j) <= 0) continue;
        ll += v.at(i, j) *
              std::log(std::max(
                  normal_cdf((group.scores[j] - group.scores[i]) / kSigmaJod), 1e-300));
        total += v.at(i, j);
      }
    if (total <= 0) continue;
    mean_ll.push_back(ll / total);
    index.push_back(static_cast<int>(o));
  }
  if (mean_ll.size() < 3) return {};
  const double q1 = percentile(mean_ll, 0.25);
  const double q3 = percentile(mean_ll, 0.75);
  const double cutoff = q1 - 1.5 * (q3 - q1);
  std::vector<int> flagged;
  for (size_t k = 0; k < mean_ll.size(); ++k)
    if (mean_ll[k] < cutoff) flagged.push_back(index[k]);
  return flagged;
}

}  // namespace holo

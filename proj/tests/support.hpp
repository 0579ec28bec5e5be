#pragma once

// Independent oracles and helpers shared by the test suites. Everything here
// deliberately re-implements library functionality through a different route
// (plain loops, brute force, closed forms) so the tests do not test the code
// against itself.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "vsrlab/controller.hpp"
#include "vsrlab/morphology.hpp"

namespace oracle {

// Aligned Hamming distance by explicit shift-and-count on a padded canvas
// large enough that clipping is impossible.
inline int hamming_aligned(const vsr::BodyGrid& a, const vsr::BodyGrid& b) {
  constexpr int n = vsr::BodyGrid::kSize;
  auto com = [&](const vsr::BodyGrid& g, double& r, double& c) {
    r = c = 0.0;
    int cnt = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (g.at(i, j) != vsr::VoxelType::Empty) {
          r += i;
          c += j;
          ++cnt;
        }
    r /= cnt;
    c /= cnt;
  };
  double ar, ac, br, bc;
  com(a, ar, ac);
  com(b, br, bc);
  auto round_half_away = [](double x) {
    return x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5);
  };
  const int dr = static_cast<int>(round_half_away(ar - br));
  const int dc = static_cast<int>(round_half_away(ac - bc));

  constexpr int canvas = 13, off = 4;
  int mismatches = 0;
  for (int r = 0; r < canvas; ++r)
    for (int c = 0; c < canvas; ++c) {
      auto cell = [&](const vsr::BodyGrid& g, int rr, int cc) {
        if (rr < 0 || rr >= n || cc < 0 || cc >= n) return vsr::VoxelType::Empty;
        return g.at(rr, cc);
      };
      const vsr::VoxelType ta = cell(a, r - off, c - off);
      const vsr::VoxelType tb = cell(b, r - off - dr, c - off - dc);
      mismatches += (ta != tb);
    }
  return mismatches;
}

// Convex hull area by gift wrapping (Jarvis march) + shoelace.
inline double hull_area(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;

  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };

  std::vector<std::pair<double, double>> hull;
  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i] < pts[start]) start = i;
  std::size_t current = start;
  do {
    hull.push_back(pts[current]);
    std::size_t next = (current + 1) % pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double c = cross(pts[current], pts[next], pts[i]);
      if (c < 0) next = i;  // pts[i] is more clockwise
    }
    current = next;
  } while (current != start && hull.size() <= pts.size());

  double twice = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % hull.size()];
    twice += p.first * q.second - q.first * p.second;
  }
  return std::abs(twice) / 2.0;
}

// Plain-loop dense MLP forward pass, layout [W1 row-major, b1, W2, b2].
inline double mlp_forward(int n_in, int n_hidden, const Eigen::VectorXd& theta,
                          const std::vector<double>& inputs) {
  std::vector<double> hidden(n_hidden, 0.0);
  int p = 0;
  for (int h = 0; h < n_hidden; ++h)
    for (int i = 0; i < n_in; ++i) hidden[h] += theta[p++] * inputs[i];
  for (int h = 0; h < n_hidden; ++h) {
    hidden[h] += theta[p++];
    if (hidden[h] < 0.0) hidden[h] = 0.0;
  }
  double z = 0.0;
  for (int h = 0; h < n_hidden; ++h) z += theta[p++] * hidden[h];
  z += theta[p++];
  const double y = 1.0 / (1.0 + std::exp(-z));
  return 0.6 + y * 1.0;
}

// GP posterior through the naive full-inverse route (no Cholesky reuse).
struct NaivePosterior {
  double mu, sigma;
};
inline NaivePosterior gp_posterior(const std::vector<Eigen::VectorXd>& xs,
                                   const std::vector<double>& ys,
                                   const Eigen::VectorXd& query,
                                   double length_scale, double signal_variance,
                                   double jitter) {
  const int n = static_cast<int>(xs.size());
  auto kernel = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double s = std::sqrt(5.0) * (a - b).norm() / length_scale;
    return signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
  };

  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= n;
  double var = 0.0;
  for (double y : ys) var += (y - mean) * (y - mean);
  var /= n;
  double scale = std::sqrt(var);
  if (!(scale > 1e-12)) scale = 1.0;

  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = kernel(xs[i], xs[j]);
  k += jitter * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd k_inv = k.inverse();

  Eigen::VectorXd k_star(n), y_std(n);
  for (int i = 0; i < n; ++i) {
    k_star[i] = kernel(query, xs[i]);
    y_std[i] = (ys[i] - mean) / scale;
  }
  const double mu_std = k_star.dot(k_inv * y_std);
  const double var_std =
      std::max(0.0, signal_variance - k_star.dot(k_inv * k_star));
  return {mean + scale * mu_std, scale * std::sqrt(var_std)};
}

// Exact two-sided Mann-Whitney p by enumerating every assignment of pooled
// ranks to the first sample.
inline double mw_exact_p(std::vector<double> a, std::vector<double> b) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const int total = m + n;

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());

  auto u_of = [&](const std::vector<double>& sample,
                  const std::vector<double>& other) {
    double u = 0.0;
    for (double x : sample)
      for (double y : other) u += (x > y) ? 1.0 : 0.0;
    return u;
  };
  const double u_obs = u_of(a, b);

  // Enumerate combinations of which sorted pooled positions go to sample a.
  std::vector<int> comb(m);
  std::iota(comb.begin(), comb.end(), 0);
  long below = 0, above = 0, count = 0;
  while (true) {
    double u = 0.0;
    // Without ties, position p in the sorted pool beats p values; subtract
    // those that belong to sample a itself.
    for (int i = 0; i < m; ++i) u += comb[i] - i;
    if (u <= u_obs) ++below;
    if (u >= u_obs) ++above;
    ++count;

    int i = m - 1;
    while (i >= 0 && comb[i] == total - m + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
  }
  const double p =
      2.0 * std::min(static_cast<double>(below), static_cast<double>(above)) /
      static_cast<double>(count);
  return std::min(1.0, p);
}

// Asymptotic Kolmogorov-Smirnov tail probability.
inline double ks_tail(double lambda) {
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// One-sample KS test p-value against a given CDF.
template <class Cdf>
double ks_one_sample_p(std::vector<double> values, Cdf cdf) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max(d, std::abs(f - (i + 1) / n));
    d = std::max(d, std::abs(f - i / n));
  }
  const double sqrt_n = std::sqrt(n);
  return ks_tail((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
}

// Two-sample KS test p-value.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return ks_tail((ne + 0.12 + 0.11 / ne) * d);
}

// Column-mirrored copy of a body (left-right flip).
inline vsr::BodyGrid mirror_body(const vsr::BodyGrid& b) {
  vsr::BodyGrid m;
  constexpr int n = vsr::BodyGrid::kSize;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m.set(r, n - 1 - c, b.at(r, c));
  return m;
}

// Controller parameters that make the mirrored body behave as the exact
// mirror image of the original: Moore slots are column-flipped and the
// x-velocity / x-distance inputs change sign.
inline vsr::BrainParams mirror_theta(const vsr::BrainParams& theta) {
  const vsr::ControllerSpec spec;
  const int in = spec.n_inputs, h = spec.n_hidden;
  vsr::BrainParams out = theta;
  for (int row = 0; row < h; ++row) {
    double* w = out.data() + row * in;
    const double* src = theta.data() + row * in;
    double tmp[30];
    for (int slot = 0; slot < 9; ++slot) {
      const int dr = slot / 3, dc = slot % 3;
      const int mirrored_slot = dr * 3 + (2 - dc);
      tmp[3 * slot + 0] = -src[3 * mirrored_slot + 0];  // x velocity flips
      tmp[3 * slot + 1] = src[3 * mirrored_slot + 1];
      tmp[3 * slot + 2] = src[3 * mirrored_slot + 2];
    }
    tmp[27] = -src[27];  // x distance flips
    tmp[28] = src[28];
    tmp[29] = src[29];
    for (int i = 0; i < in; ++i) w[i] = tmp[i];
  }
  return out;
}

}  // namespace oracle

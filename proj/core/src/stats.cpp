#include "vsrlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "vsrlab/error.hpp"

namespace vsr {

namespace {

// Midranks of the pooled sample; returns (ranks of a ++ ranks of b).
std::vector<double> midranks(std::span<const double> a,
                             std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });

  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  return rank;
}

bool has_ties(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

// Null distribution of U for sample sizes (m, n) without ties: counts[u] is
// the number of rank arrangements with statistic exactly u. Recurrence on
// whether the largest pooled rank belongs to the first sample (it then beats
// all j second-sample values): f(i,j,u) = f(i-1,j,u-j) + f(i,j-1,u).
std::vector<double> exact_u_counts(int m, int n) {
  const int umax = m * n;
  std::vector<std::vector<std::vector<double>>> f(
      m + 1, std::vector<std::vector<double>>(
                 n + 1, std::vector<double>(umax + 1, 0.0)));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= n; ++j) {
      if (i == 0 || j == 0) {
        f[i][j][0] = 1.0;
        continue;
      }
      for (int u = 0; u <= i * j; ++u) {
        double v = f[i][j - 1][u];
        if (u >= j) v += f[i - 1][j][u - j];
        f[i][j][u] = v;
      }
    }
  return f[m][n];
}

double normal_sf(double z) {  // P(Z > z)
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.empty() || b.empty())
    throw Error("mann_whitney_u: both samples must be non-empty");
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const double big_n = m + n;

  const std::vector<double> rank = midranks(a, b);
  double rank_sum_a = 0.0;
  for (int i = 0; i < m; ++i) rank_sum_a += rank[i];
  const double u = rank_sum_a - m * (m + 1.0) / 2.0;

  const bool ties = has_ties(a, b);

  // Degenerate: every pooled value identical.
  if (ties) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    if (std::all_of(pooled.begin(), pooled.end(),
                    [&](double v) { return v == pooled[0]; }))
      return {u, 1.0};
  }

  if (!ties && m + n <= 12) {
    const std::vector<double> counts = exact_u_counts(m, n);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const int ui = static_cast<int>(std::llround(u));
    double below = 0.0, above = 0.0;
    for (int v = 0; v <= ui; ++v) below += counts[v];
    for (int v = ui; v < static_cast<int>(counts.size()); ++v)
      above += counts[v];
    const double p = 2.0 * std::min(below, above) / total;
    return {u, std::min(1.0, p)};
  }

  // Normal approximation with tie and continuity corrections.
  const double mean_u = m * static_cast<double>(n) / 2.0;
  double tie_term = 0.0;
  {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    std::size_t i = 0;
    while (i < pooled.size()) {
      std::size_t j = i;
      while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var_u = m * static_cast<double>(n) / 12.0 *
                       ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  if (var_u <= 0.0) return {u, 1.0};
  const double z = std::max(0.0, std::abs(u - mean_u) - 0.5) / std::sqrt(var_u);
  return {u, std::min(1.0, 2.0 * normal_sf(z))};
}

std::vector<double> benjamini_hochberg(std::span<const double> p) {
  const int m = static_cast<int>(p.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return p[i] < p[j]; });

  std::vector<double> adjusted(m);
  double running_min = 1.0;
  for (int k = m - 1; k >= 0; --k) {
    const double candidate = p[order[k]] * m / (k + 1.0);
    running_min = std::min(running_min, candidate);
    adjusted[order[k]] = std::min(1.0, running_min);
  }
  return adjusted;
}

StatsResult pairwise_comparison(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups,
    double alpha) {
  const int g = static_cast<int>(groups.size());
  StatsResult result;
  result.alpha = alpha;
  result.labels.reserve(g);
  for (const auto& [label, values] : groups) result.labels.push_back(label);
  result.p_raw.assign(g, std::vector<double>(g, 1.0));
  result.p_adjusted.assign(g, std::vector<double>(g, 1.0));
  result.significant.assign(g, std::vector<bool>(g, false));

  std::vector<double> flat;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) {
      const double p =
          mann_whitney_u(groups[i].second, groups[j].second).p;
      result.p_raw[i][j] = result.p_raw[j][i] = p;
      flat.push_back(p);
    }

  const std::vector<double> adj = benjamini_hochberg(flat);
  int idx = 0;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j, ++idx) {
      result.p_adjusted[i][j] = result.p_adjusted[j][i] = adj[idx];
      const bool sig = adj[idx] < alpha;
      result.significant[i][j] = sig;
      result.significant[j][i] = sig;
    }
  return result;
}

}  // namespace vsr

#pragma once

#include <span>
#include <string>
#include <vector>

namespace vsr {

struct MannWhitneyResult {
  double u;  // U statistic of the first sample
  double p;  // two-sided p-value
};

// Mann-Whitney U with midrank tie handling. Exact p by enumeration when
// |a| + |b| <= 12 and there are no ties, otherwise normal approximation with
// tie and continuity corrections. When every value in both samples is
// identical the test is degenerate and p = 1 by convention.
MannWhitneyResult mann_whitney_u(std::span<const double> a,
                                 std::span<const double> b);

// Step-up Benjamini-Hochberg adjustment, returned in the input order.
std::vector<double> benjamini_hochberg(std::span<const double> p);

// Pairwise comparison of named groups: raw Mann-Whitney p-values,
// BH-adjusted values (adjustment pooled over all distinct pairs), and
// significance flags at level alpha. Matrices are symmetric with
// unit diagonal.
struct StatsResult {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> p_raw;
  std::vector<std::vector<double>> p_adjusted;
  std::vector<std::vector<bool>> significant;
  double alpha = 0.05;
};

StatsResult pairwise_comparison(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups,
    double alpha = 0.05);

}  // namespace vsr

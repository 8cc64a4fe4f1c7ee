#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

namespace tfr::bench {

struct MedianMad {
  double median = 0.0;
  double mad = 0.0;
};

// Median (mean of the middle pair for even n) and the unscaled median
// absolute deviation. Throws std::invalid_argument on empty input.
double median(std::span<const double> values);
MedianMad median_mad(std::span<const double> values);

// Entry (i, j) counts true class i predicted as j.
Eigen::MatrixXi confusion_matrix(std::span<const int> predictions, std::span<const int> labels,
                                 int num_classes);

struct AnovaResult {
  double f_statistic = 0.0;
  double df_between = 0.0;
  double df_within = 0.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double ms_within = 0.0;
  double p_value = 1.0;
};

using Groups = std::vector<std::vector<double>>;

// One-way ANOVA. Needs >= 2 groups of >= 2 values each; throws tfr::Error
// when every value is identical (zero total variance). Zero within-group
// variance with distinct group means gives F = +inf, p = 0.
AnovaResult one_way_anova(const Groups& groups);

// CDF of the studentized range Q for k means and df degrees of freedom,
// by numerical integration; df = +inf gives the normal-theory range.
double studentized_range_cdf(double q, int k, double df);
// Inverse of the CDF by bracketed root finding.
double studentized_range_quantile(double p, int k, double df);

struct TukeyComparison {
  std::size_t first = 0;
  std::size_t second = 0;
  double mean_difference = 0.0;  // mean(first) - mean(second)
  double q_statistic = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

// Tukey-Kramer HSD over all pairs, using the ANOVA's pooled variance.
std::vector<TukeyComparison> tukey_hsd(const Groups& groups, double alpha = 0.05);

struct SignificanceResult {
  AnovaResult anova;
  bool rejected = false;
  std::vector<TukeyComparison> comparisons;
  std::vector<double> means;
  std::size_t best = 0;
  // Groups not significantly different from the best mean, ascending; all
  // groups when the ANOVA does not reject. Never empty.
  std::vector<std::size_t> top_performers;
};

SignificanceResult anova_tukey(const Groups& groups, double alpha = 0.05);

}  // namespace tfr::bench

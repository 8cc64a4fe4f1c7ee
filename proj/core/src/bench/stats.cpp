#include "tfr/bench/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tfr/error.hpp"

namespace tfr::bench {

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

MedianMad median_mad(std::span<const double> values) {
  MedianMad r;
  r.median = median(values);
  std::vector<double> dev(values.size());
  std::transform(values.begin(), values.end(), dev.begin(),
                 [&](double x) { return std::abs(x - r.median); });
  r.mad = median(dev);
  return r;
}

Eigen::MatrixXi confusion_matrix(std::span<const int> predictions, std::span<const int> labels,
                                 int num_classes) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("confusion_matrix: prediction/label count mismatch");
  if (num_classes < 1) throw std::invalid_argument("confusion_matrix: need at least one class");
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 ||
        predictions[i] >= num_classes)
      throw std::invalid_argument("confusion_matrix: class index out of range");
    ++m(labels[i], predictions[i]);
  }
  return m;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_groups(const Groups& groups) {
  if (groups.size() < 2) throw std::invalid_argument("anova: need at least two groups");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].size() < 2)
      throw std::invalid_argument("anova: group " + std::to_string(i) + " has fewer than two values");
    for (double x : groups[i])
      if (!std::isfinite(x)) throw std::invalid_argument("anova: non-finite value");
  }
}

}  // namespace

AnovaResult one_way_anova(const Groups& groups) {
  check_groups(groups);
  std::size_t n_total = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    n_total += g.size();
    grand += std::accumulate(g.begin(), g.end(), 0.0);
  }
  grand /= static_cast<double>(n_total);

  AnovaResult r;
  for (const auto& g : groups) {
    const double m = mean_of(g);
    r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double x : g) r.ss_within += (x - m) * (x - m);
  }
  r.df_between = static_cast<double>(groups.size() - 1);
  r.df_within = static_cast<double>(n_total - groups.size());
  r.ms_within = r.ss_within / r.df_within;

  // Relative to the data scale, so exact ties survive rounding in the means.
  double scale = 0.0;
  for (const auto& g : groups)
    for (double x : g) scale = std::max(scale, std::abs(x));
  const double tiny = 1e-24 * std::max(scale * scale, 1e-300) * static_cast<double>(n_total);
  if (r.ss_between + r.ss_within <= tiny)
    throw Error("anova: all values are identical, the F statistic is undefined");
  if (r.ss_within <= tiny) {
    r.ss_within = 0.0;
    r.ms_within = 0.0;
    r.f_statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.f_statistic = (r.ss_between / r.df_between) / r.ms_within;
  const boost::math::fisher_f dist(r.df_between, r.df_within);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.f_statistic));
  return r;
}

std::vector<TukeyComparison> tukey_hsd(const Groups& groups, double alpha) {
  const AnovaResult a = one_way_anova(groups);
  const int k = static_cast<int>(groups.size());
  std::vector<TukeyComparison> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      TukeyComparison c;
      c.first = i;
      c.second = j;
      c.mean_difference = mean_of(groups[i]) - mean_of(groups[j]);
      const double se = std::sqrt(a.ms_within / 2.0 *
                                  (1.0 / static_cast<double>(groups[i].size()) +
                                   1.0 / static_cast<double>(groups[j].size())));
      if (se > 0.0) {
        c.q_statistic = std::abs(c.mean_difference) / se;
        c.p_value = 1.0 - studentized_range_cdf(c.q_statistic, k, a.df_within);
      } else if (c.mean_difference != 0.0) {
        c.q_statistic = std::numeric_limits<double>::infinity();
        c.p_value = 0.0;
      }
      c.p_value = std::clamp(c.p_value, 0.0, 1.0);
      c.significant = c.p_value < alpha;
      out.push_back(c);
    }
  }
  return out;
}

SignificanceResult anova_tukey(const Groups& groups, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  SignificanceResult r;
  r.anova = one_way_anova(groups);
  r.rejected = r.anova.p_value < alpha;
  r.comparisons = tukey_hsd(groups, alpha);
  for (const auto& g : groups) r.means.push_back(mean_of(g));
  r.best = static_cast<std::size_t>(std::max_element(r.means.begin(), r.means.end()) -
                                    r.means.begin());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!r.rejected || i == r.best) {
      r.top_performers.push_back(i);
      continue;
    }
    for (const auto& c : r.comparisons) {
      const bool pair = (c.first == i && c.second == r.best) || (c.first == r.best && c.second == i);
      if (pair && !c.significant) r.top_performers.push_back(i);
    }
  }
  return r;
}

}  // namespace tfr::bench

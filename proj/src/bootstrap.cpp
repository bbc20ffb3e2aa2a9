#include "csord/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace csord {

std::string metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::QuadKappa: return "quad_kappa";
    case MetricKind::MAuc: return "mauc";
    case MetricKind::Aca: return "aca";
    case MetricKind::KendallTau: return "kendall_tau";
  }
  return "unknown";
}

double evaluate_metric(MetricKind kind, const PredictionSet& preds) {
  switch (kind) {
    case MetricKind::QuadKappa:
      return quadratic_weighted_kappa(confusion_matrix(preds));
    case MetricKind::MAuc:
      return hand_till_mauc(preds);
    case MetricKind::Aca:
      return aca(confusion_matrix(preds));
    case MetricKind::KendallTau:
      return kendall_tau(preds);
  }
  throw InvalidInputError("unknown metric kind");
}

std::vector<int> stratified_resample(const std::vector<int>& labels,
                                     std::uint32_t seed) {
  if (labels.empty()) throw EmptyInputError("no labels to resample");
  int num_classes = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidInputError("negative grade label");
    num_classes = std::max(num_classes, l + 1);
  }
  std::vector<std::vector<int>> positions(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    positions[labels[i]].push_back(static_cast<int>(i));
  }

  std::mt19937 rng(seed);
  std::vector<int> out;
  out.reserve(labels.size());
  for (int g = 0; g < num_classes; ++g) {
    const auto& pos = positions[g];
    if (pos.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, pos.size() - 1);
    for (std::size_t k = 0; k < pos.size(); ++k) out.push_back(pos[pick(rng)]);
  }
  return out;
}

namespace {

PredictionSet subset(const std::vector<int>& truths,
                     const std::vector<double>& probs, int num_classes,
                     const std::vector<int>& indices) {
  PredictionSet ps;
  ps.num_classes = num_classes;
  ps.truths.reserve(indices.size());
  ps.probs.reserve(indices.size() * num_classes);
  for (int idx : indices) {
    ps.truths.push_back(truths[idx]);
    const double* row = probs.data() + static_cast<std::size_t>(idx) * num_classes;
    ps.probs.insert(ps.probs.end(), row, row + num_classes);
  }
  return ps;
}

// Linear-interpolated quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BootstrapResult paired_bootstrap_test(const std::vector<int>& truths,
                                      const std::vector<double>& probs_a,
                                      const std::vector<double>& probs_b,
                                      int num_classes, MetricKind metric,
                                      int n_resamples, double alpha,
                                      std::uint32_t seed) {
  const std::size_t n = truths.size();
  if (n == 0) throw EmptyInputError("no rows to bootstrap");
  if (probs_a.size() != n * static_cast<std::size_t>(num_classes) ||
      probs_b.size() != n * static_cast<std::size_t>(num_classes)) {
    throw InvalidInputError("misaligned prediction arrays");
  }
  if (n_resamples < 1) throw InvalidInputError("need at least one resample");

  BootstrapResult result;
  result.metric = metric_name(metric);
  result.alpha = alpha;

  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
  result.observed_diff =
      evaluate_metric(metric, subset(truths, probs_a, num_classes, all)) -
      evaluate_metric(metric, subset(truths, probs_b, num_classes, all));

  result.diffs.reserve(n_resamples);
  for (int k = 0; k < n_resamples; ++k) {
    const std::uint32_t resample_seed = seed ^ static_cast<std::uint32_t>(k);
    const std::vector<int> idx = stratified_resample(truths, resample_seed);
    try {
      const double a =
          evaluate_metric(metric, subset(truths, probs_a, num_classes, idx));
      const double b =
          evaluate_metric(metric, subset(truths, probs_b, num_classes, idx));
      result.diffs.push_back(a - b);
    } catch (const UndefinedStatisticError&) {
      ++result.n_dropped;
    }
  }
  if (result.n_dropped * 2 > n_resamples) {
    throw UnstableStatisticError(
        result.metric + " undefined in " + std::to_string(result.n_dropped) +
        " of " + std::to_string(n_resamples) + " resamples");
  }
  result.n_resamples = static_cast<int>(result.diffs.size());

  long long le = 0, ge = 0;
  for (double d : result.diffs) {
    if (d <= 0.0) ++le;
    if (d >= 0.0) ++ge;
  }
  result.p_value = std::min(
      1.0, 2.0 * static_cast<double>(std::min(le, ge)) /
               static_cast<double>(result.n_resamples));

  std::vector<double> sorted = result.diffs;
  std::sort(sorted.begin(), sorted.end());
  result.ci_lo = quantile(sorted, 0.025);
  result.ci_hi = quantile(sorted, 0.975);
  result.significant = result.p_value < alpha;
  return result;
}

}  // namespace csord

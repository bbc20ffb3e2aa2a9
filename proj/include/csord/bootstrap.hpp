#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csord/metrics.hpp"

namespace csord {

enum class MetricKind { QuadKappa, MAuc, Aca, KendallTau };

std::string metric_name(MetricKind kind);

// Scalar metric evaluation; throws UndefinedStatisticError where the
// metric has no value on the given data.
double evaluate_metric(MetricKind kind, const PredictionSet& preds);

struct BootstrapResult {
  std::string metric;
  int n_resamples = 0;   // retained resamples, == diffs.size()
  int n_dropped = 0;     // resamples dropped because the metric was undefined
  double observed_diff = 0.0;  // metric(A) - metric(B) on the full data
  std::vector<double> diffs;   // per-resample differences, resample order
  double p_value = 1.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double alpha = 0.05;
  bool significant = false;
};

// Draw, for each grade, exactly its original count of indices with
// replacement from the positions of that grade. Output length equals
// the input length; deterministic in the seed.
std::vector<int> stratified_resample(const std::vector<int>& labels,
                                     std::uint32_t seed);

// Paired stratified bootstrap test of metric(A) - metric(B). Each
// resample applies one stratified index set to both models; resample k
// uses seed ^ k so evaluation order cannot change the result.
BootstrapResult paired_bootstrap_test(const std::vector<int>& truths,
                                      const std::vector<double>& probs_a,
                                      const std::vector<double>& probs_b,
                                      int num_classes, MetricKind metric,
                                      int n_resamples = 1000,
                                      double alpha = 0.05,
                                      std::uint32_t seed = 0);

}  // namespace csord

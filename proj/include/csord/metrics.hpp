#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "csord/cost_matrices.hpp"

namespace csord {

// Model outputs on a labeled set: per row a true grade and a predicted
// probability vector. The hard prediction of a row is the argmax of its
// probabilities, ties broken toward the lower grade.
struct PredictionSet {
  std::vector<int> truths;      // length N
  std::vector<double> probs;    // N x num_classes, row-major
  int num_classes = 0;

  int size() const { return static_cast<int>(truths.size()); }
  const double* row(int i) const {
    return probs.data() + static_cast<std::size_t>(i) * num_classes;
  }
  int hard_prediction(int i) const;
};

struct MetricsReport {
  double quad_kappa = 0.0;
  std::optional<double> mauc;
  double aca = 0.0;
  std::optional<double> kendall_tau;
  ConfusionCounts confusion;
};

// counts(i,j) = number of rows with true grade i and hard prediction j.
ConfusionCounts confusion_matrix(const PredictionSet& preds);

// Quadratic-weighted chance-corrected agreement,
// 1 - sum(w*O)/sum(w*E) with w_ij = (i-j)^2/(C-1)^2 and E the outer
// product of the marginals scaled to the observed total. Returns 1.0
// when both weighted sums vanish.
double quadratic_weighted_kappa(const ConfusionCounts& m);

// Mean per-class recall over the classes present in the data.
double aca(const ConfusionCounts& m);

// True grades with no rows in the data (excluded from the aca mean).
std::vector<int> absent_grades(const ConfusionCounts& m);

// Tie-corrected rank correlation (tau-b) between true grades and hard
// predictions. Undefined when either sequence is constant.
double kendall_tau(const PredictionSet& preds);

// Multi-class AUC averaging the pairwise one-vs-one ranking AUCs over
// all pairs of classes present in the data. Ties count 1/2. Pairs
// involving an absent class are skipped (and reported when asked).
double hand_till_mauc(const PredictionSet& preds,
                      std::vector<std::pair<int, int>>* skipped_pairs = nullptr);

// Full evaluation; metrics that are undefined on this data are left
// unset instead of raising.
MetricsReport compute_metrics(const PredictionSet& preds);

}  // namespace csord

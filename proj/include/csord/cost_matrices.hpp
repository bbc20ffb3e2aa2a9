#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "csord/errors.hpp"

namespace csord {

// Raw inter-observer (or model) agreement counts. Rows index the true
// grade, columns the assigned grade.
struct ConfusionCounts {
  int num_classes = 0;
  std::vector<long long> counts;  // row-major, num_classes * num_classes

  ConfusionCounts() = default;
  explicit ConfusionCounts(int c);
  ConfusionCounts(int c, std::vector<long long> data);

  long long at(int i, int j) const {
    return counts[static_cast<std::size_t>(i) * num_classes + j];
  }
  long long& at(int i, int j) {
    return counts[static_cast<std::size_t>(i) * num_classes + j];
  }
  long long row_sum(int i) const;
  long long total() const;
};

// Row-normalized confusion probabilities, entry (i,j) estimating
// P(assigned grade j | true grade i). Every row sums to 1.
struct RowStochastic {
  int num_classes = 0;
  std::vector<double> probs;  // row-major

  RowStochastic() = default;
  RowStochastic(int c, std::vector<double> data);

  double at(int i, int j) const {
    return probs[static_cast<std::size_t>(i) * num_classes + j];
  }
};

// Non-negative penalty matrix: entry (i,j) is the cost of predicting
// grade j when the true grade is i.
struct CostMatrix {
  int num_classes = 0;
  std::vector<double> costs;  // row-major

  CostMatrix() = default;
  CostMatrix(int c, std::vector<double> data);

  double at(int i, int j) const {
    return costs[static_cast<std::size_t>(i) * num_classes + j];
  }
  double& at(int i, int j) {
    return costs[static_cast<std::size_t>(i) * num_classes + j];
  }
};

// Squared index distance ground cost: entry (i,j) = (i-j)^2.
CostMatrix quadratic_cost_matrix(int num_classes);

// Divide each row by its count sum. Rows with zero sum are rejected.
RowStochastic row_normalize(const ConfusionCounts& m);

// Averaged cost matrix (M2 + I - M*)/2 built from annotator confusion
// counts, where M2 is the quadratic ground cost, I the identity and
// M* = row_normalize(m). Mistakes annotators also make cost less.
CostMatrix ast_cost_matrix(const ConfusionCounts& m);

// Headerless numeric CSV, one matrix row per line.
ConfusionCounts load_confusion_csv(const std::string& path);
RowStochastic load_row_stochastic_csv(const std::string& path);
CostMatrix load_cost_csv(const std::string& path);
void save_csv(const ConfusionCounts& m, const std::string& path);
void save_csv(const RowStochastic& m, const std::string& path);
void save_csv(const CostMatrix& m, const std::string& path);

}  // namespace csord

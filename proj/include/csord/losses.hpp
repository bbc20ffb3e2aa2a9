#pragma once

#include <optional>
#include <vector>

#include "csord/cost_matrices.hpp"

namespace csord {

// Pre-softmax scores, one per grade.
using LogitVector = std::vector<double>;
// Point on the probability simplex, one entry per grade.
using ProbVector = std::vector<double>;

// Loss value together with the analytic gradient with respect to the
// logits that produced the prediction (when the loss is reached through
// softmax). Gradient entries sum to zero.
struct LossValue {
  double value = 0.0;
  std::optional<std::vector<double>> gradient;
};

enum class BaseLoss { CrossEntropy, Focal, Nuls };

struct LossHyper {
  double alpha = 1.0;  // focal weighing factor
  double gamma = 2.0;  // focal focusing parameter
  double sigma = 1.0;  // smoothing kernel width
};

// Numerically stable (max-shifted) softmax.
ProbVector softmax(const LogitVector& z);

// -sum_i target_i * log(p_i). Accepts soft targets. The reported
// gradient is p - target (gradient w.r.t. logits with p = softmax(z)).
LossValue cross_entropy(const ProbVector& p, const ProbVector& target);

// -alpha * (1 - p_y)^gamma * log(p_y), hard labels only.
LossValue focal_loss(const ProbVector& p, int label, double alpha,
                     double gamma);

// Gaussian kernel centered on the label, truncated to the C grades and
// renormalized. Unique mode at the label, non-increasing away from it.
ProbVector gaussian_smooth_label(int label, double sigma, int num_classes);

// Cross-entropy against the Gaussian-smoothed label.
LossValue nuls_loss(const ProbVector& p, int label, double sigma);

// Inner product of the cost-matrix row for the true grade with the
// predicted distribution: sum_j M(label, j) * p_j.
LossValue cs_penalty(const ProbVector& p, int label, const CostMatrix& m);

// base(softmax(z), label) + lambda * cs_penalty(softmax(z), label, m).
// m may be null when lambda == 0.
LossValue cs_regularized_loss(BaseLoss base, const LogitVector& z, int label,
                              double lambda, const CostMatrix* m,
                              const LossHyper& hyper = {});

// Analytic gradient of the full composite w.r.t. the logits.
std::vector<double> loss_gradient(BaseLoss base, const LogitVector& z,
                                  int label, double lambda,
                                  const CostMatrix* m,
                                  const LossHyper& hyper = {});

}  // namespace csord

#include "csord/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csord {

namespace {

// Keep log arguments away from 0 without disturbing ordinary values.
constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0); }

void check_label(int label, std::size_t c) {
  if (label < 0 || static_cast<std::size_t>(label) >= c) {
    throw InvalidInputError("label " + std::to_string(label) +
                            " outside [0, " + std::to_string(c) + ")");
  }
}

// d(loss)/d(p_y) chained through the softmax Jacobian: with q = p_y,
// dq/dz_k = q * (delta_yk - p_k).
std::vector<double> chain_through_softmax(const ProbVector& p, int y,
                                          double dloss_dq) {
  std::vector<double> g(p.size());
  const double q = p[y];
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double delta = (static_cast<int>(k) == y) ? 1.0 : 0.0;
    g[k] = dloss_dq * q * (delta - p[k]);
  }
  return g;
}

}  // namespace

ProbVector softmax(const LogitVector& z) {
  if (z.empty()) throw InvalidInputError("empty logit vector");
  double zmax = -std::numeric_limits<double>::infinity();
  for (double v : z) {
    if (!std::isfinite(v)) {
      throw InvalidInputError("non-finite logit");
    }
    zmax = std::max(zmax, v);
  }
  ProbVector p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

LossValue cross_entropy(const ProbVector& p, const ProbVector& target) {
  if (p.size() != target.size() || p.empty()) {
    throw InvalidInputError("prediction/target length mismatch");
  }
  LossValue out;
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (target[i] != 0.0) {
      out.value -= target[i] * std::log(clamp_prob(p[i]));
    }
    grad[i] = p[i] - target[i];
  }
  out.value = std::max(out.value, 0.0);
  out.gradient = std::move(grad);
  return out;
}

LossValue focal_loss(const ProbVector& p, int label, double alpha,
                     double gamma) {
  if (!(alpha > 0.0)) {
    throw InvalidHyperparameterError("focal alpha must be > 0");
  }
  if (!(gamma >= 0.0)) {
    throw InvalidHyperparameterError("focal gamma must be >= 0");
  }
  check_label(label, p.size());
  const double q = clamp_prob(p[label]);
  const double omq = 1.0 - q;
  LossValue out;
  out.value = -alpha * std::pow(omq, gamma) * std::log(q);
  // d/dq [-a (1-q)^g ln q] = a g (1-q)^(g-1) ln q - a (1-q)^g / q.
  // The first term vanishes for g == 0 and in the q -> 1 limit.
  double dq = -alpha * std::pow(omq, gamma) / q;
  if (gamma > 0.0 && omq > 0.0) {
    dq += alpha * gamma * std::pow(omq, gamma - 1.0) * std::log(q);
  }
  out.gradient = chain_through_softmax(p, label, dq);
  return out;
}

ProbVector gaussian_smooth_label(int label, double sigma, int num_classes) {
  if (!(sigma > 0.0)) {
    throw InvalidHyperparameterError("smoothing sigma must be > 0");
  }
  if (num_classes < 2) {
    throw InvalidDimensionError("need at least 2 classes");
  }
  check_label(label, static_cast<std::size_t>(num_classes));
  ProbVector w(num_classes);
  double sum = 0.0;
  for (int i = 0; i < num_classes; ++i) {
    const double d = static_cast<double>(i - label);
    w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

LossValue nuls_loss(const ProbVector& p, int label, double sigma) {
  const ProbVector target =
      gaussian_smooth_label(label, sigma, static_cast<int>(p.size()));
  return cross_entropy(p, target);
}

LossValue cs_penalty(const ProbVector& p, int label, const CostMatrix& m) {
  if (static_cast<std::size_t>(m.num_classes) != p.size()) {
    throw InvalidDimensionError("cost matrix is " +
                                std::to_string(m.num_classes) +
                                " classes, prediction has " +
                                std::to_string(p.size()));
  }
  check_label(label, p.size());
  LossValue out;
  for (std::size_t j = 0; j < p.size(); ++j) {
    out.value += m.at(label, static_cast<int>(j)) * p[j];
  }
  // d/dz_k sum_j M(y,j) p_j = p_k * (M(y,k) - penalty).
  std::vector<double> grad(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    grad[k] = p[k] * (m.at(label, static_cast<int>(k)) - out.value);
  }
  out.gradient = std::move(grad);
  return out;
}

LossValue cs_regularized_loss(BaseLoss base, const LogitVector& z, int label,
                              double lambda, const CostMatrix* m,
                              const LossHyper& hyper) {
  if (lambda < 0.0) {
    throw InvalidHyperparameterError("lambda must be >= 0");
  }
  const ProbVector p = softmax(z);
  check_label(label, p.size());

  LossValue out;
  switch (base) {
    case BaseLoss::CrossEntropy: {
      ProbVector onehot(p.size(), 0.0);
      onehot[label] = 1.0;
      out = cross_entropy(p, onehot);
      break;
    }
    case BaseLoss::Focal:
      out = focal_loss(p, label, hyper.alpha, hyper.gamma);
      break;
    case BaseLoss::Nuls:
      out = nuls_loss(p, label, hyper.sigma);
      break;
  }

  if (lambda == 0.0) return out;
  if (m == nullptr) {
    throw InvalidInputError("lambda > 0 requires a cost matrix");
  }
  const LossValue pen = cs_penalty(p, label, *m);
  out.value += lambda * pen.value;
  for (std::size_t k = 0; k < p.size(); ++k) {
    (*out.gradient)[k] += lambda * (*pen.gradient)[k];
  }
  return out;
}

std::vector<double> loss_gradient(BaseLoss base, const LogitVector& z,
                                  int label, double lambda,
                                  const CostMatrix* m,
                                  const LossHyper& hyper) {
  return *cs_regularized_loss(base, z, label, lambda, m, hyper).gradient;
}

}  // namespace csord

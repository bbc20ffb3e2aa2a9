#pragma once

#include <cstdint>
#include <vector>

#include "csord/losses.hpp"

namespace csord {

enum class ModelKind { Linear, OneHidden };

// Desk-scale differentiable classifier: either a linear softmax model
// or a single ReLU hidden layer followed by a linear readout.
struct Model {
  ModelKind kind = ModelKind::Linear;
  int input_dim = 0;
  int hidden_dim = 0;  // 0 for linear
  int num_classes = 0;
  std::vector<double> w_hidden;  // hidden_dim x input_dim (empty for linear)
  std::vector<double> b_hidden;  // hidden_dim
  std::vector<double> w_out;     // num_classes x (hidden_dim or input_dim)
  std::vector<double> b_out;     // num_classes

  int out_fan_in() const {
    return kind == ModelKind::Linear ? input_dim : hidden_dim;
  }
  std::size_t num_parameters() const {
    return w_hidden.size() + b_hidden.size() + w_out.size() + b_out.size();
  }
  bool finite() const;
};

// Parameter-space gradient, same shapes as the model it came from.
struct ModelGrad {
  std::vector<double> w_hidden, b_hidden, w_out, b_out;

  explicit ModelGrad(const Model& m)
      : w_hidden(m.w_hidden.size(), 0.0),
        b_hidden(m.b_hidden.size(), 0.0),
        w_out(m.w_out.size(), 0.0),
        b_out(m.b_out.size(), 0.0) {}
  void zero();
};

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0.
Model init_model(ModelKind kind, int input_dim, int hidden_dim,
                 int num_classes, std::uint32_t seed);

// Logits for one example; `hidden` (when non-null and the model has a
// hidden layer) receives the post-ReLU activations for reuse in backprop.
LogitVector forward(const Model& m, const double* x,
                    std::vector<double>* hidden = nullptr);
LogitVector forward(const Model& m, const std::vector<double>& x);

// Accumulate d(loss)/d(parameters) given d(loss)/d(logits) for one
// example. `hidden` must be the activations captured by forward().
void accumulate_grad(const Model& m, const double* x,
                     const std::vector<double>& hidden,
                     const std::vector<double>& dlogits, ModelGrad& grad);

// SGD step: p -= scale * g.
void apply_grad(Model& m, const ModelGrad& grad, double scale);

}  // namespace csord

#include "csord/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "csord/errors.hpp"

namespace csord {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

bool Model::finite() const {
  return all_finite(w_hidden) && all_finite(b_hidden) && all_finite(w_out) &&
         all_finite(b_out);
}

void ModelGrad::zero() {
  std::fill(w_hidden.begin(), w_hidden.end(), 0.0);
  std::fill(b_hidden.begin(), b_hidden.end(), 0.0);
  std::fill(w_out.begin(), w_out.end(), 0.0);
  std::fill(b_out.begin(), b_out.end(), 0.0);
}

Model init_model(ModelKind kind, int input_dim, int hidden_dim,
                 int num_classes, std::uint32_t seed) {
  if (input_dim < 1) throw InvalidDimensionError("input_dim must be >= 1");
  if (num_classes < 2) throw InvalidDimensionError("num_classes must be >= 2");
  if (kind == ModelKind::Linear && hidden_dim != 0)
    throw InvalidDimensionError("linear model takes hidden_dim 0");
  if (kind == ModelKind::OneHidden && hidden_dim < 1)
    throw InvalidDimensionError("one-hidden model needs hidden_dim >= 1");

  Model m;
  m.kind = kind;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.num_classes = num_classes;

  std::mt19937 rng(seed);
  auto fill_uniform = [&rng](std::vector<double>& w, int fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& x : w) x = dist(rng);
  };

  if (kind == ModelKind::OneHidden) {
    m.w_hidden.resize(static_cast<std::size_t>(hidden_dim) * input_dim);
    m.b_hidden.assign(hidden_dim, 0.0);
    fill_uniform(m.w_hidden, input_dim);
  }
  m.w_out.resize(static_cast<std::size_t>(num_classes) * m.out_fan_in());
  m.b_out.assign(num_classes, 0.0);
  fill_uniform(m.w_out, m.out_fan_in());
  return m;
}

LogitVector forward(const Model& m, const double* x,
                    std::vector<double>* hidden) {
  const double* in = x;
  int in_dim = m.input_dim;
  std::vector<double> h;
  if (m.kind == ModelKind::OneHidden) {
    h.resize(m.hidden_dim);
    for (int j = 0; j < m.hidden_dim; ++j) {
      double s = m.b_hidden[j];
      const double* w = m.w_hidden.data() + static_cast<std::size_t>(j) * m.input_dim;
      for (int d = 0; d < m.input_dim; ++d) s += w[d] * x[d];
      h[j] = s > 0.0 ? s : 0.0;
    }
    in = h.data();
    in_dim = m.hidden_dim;
  }
  LogitVector z(m.num_classes);
  for (int k = 0; k < m.num_classes; ++k) {
    double s = m.b_out[k];
    const double* w = m.w_out.data() + static_cast<std::size_t>(k) * in_dim;
    for (int d = 0; d < in_dim; ++d) s += w[d] * in[d];
    z[k] = s;
  }
  if (hidden) *hidden = std::move(h);
  return z;
}

LogitVector forward(const Model& m, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != m.input_dim)
    throw InvalidDimensionError("feature length does not match input_dim");
  return forward(m, x.data());
}

void accumulate_grad(const Model& m, const double* x,
                     const std::vector<double>& hidden,
                     const std::vector<double>& dlogits, ModelGrad& grad) {
  const double* in = m.kind == ModelKind::OneHidden ? hidden.data() : x;
  int in_dim = m.out_fan_in();
  for (int k = 0; k < m.num_classes; ++k) {
    double dz = dlogits[k];
    grad.b_out[k] += dz;
    double* gw = grad.w_out.data() + static_cast<std::size_t>(k) * in_dim;
    for (int d = 0; d < in_dim; ++d) gw[d] += dz * in[d];
  }
  if (m.kind != ModelKind::OneHidden) return;
  for (int j = 0; j < m.hidden_dim; ++j) {
    if (hidden[j] <= 0.0) continue;  // ReLU gate
    double dh = 0.0;
    for (int k = 0; k < m.num_classes; ++k)
      dh += dlogits[k] * m.w_out[static_cast<std::size_t>(k) * m.hidden_dim + j];
    grad.b_hidden[j] += dh;
    double* gw = grad.w_hidden.data() + static_cast<std::size_t>(j) * m.input_dim;
    for (int d = 0; d < m.input_dim; ++d) gw[d] += dh * x[d];
  }
}

void apply_grad(Model& m, const ModelGrad& grad, double scale) {
  auto step = [scale](std::vector<double>& p, const std::vector<double>& g) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= scale * g[i];
  };
  step(m.w_hidden, grad.w_hidden);
  step(m.b_hidden, grad.b_hidden);
  step(m.w_out, grad.w_out);
  step(m.b_out, grad.b_out);
}

}  // namespace csord

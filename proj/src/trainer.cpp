#include "csord/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "csord/errors.hpp"

namespace csord {

namespace {

void validate_config(const TrainConfig& c) {
  if (c.lambda < 0.0) throw InvalidHyperparameterError("lambda must be >= 0");
  if (c.batch_size < 1) throw InvalidHyperparameterError("batch_size must be >= 1");
  if (!(c.lr > 0.0)) throw InvalidHyperparameterError("lr must be positive");
  if (!(c.plateau_factor > 1.0))
    throw InvalidHyperparameterError("plateau_factor must be > 1");
  if (c.plateau_patience < 1)
    throw InvalidHyperparameterError("plateau_patience must be >= 1");
  if (c.early_stop_patience < 1)
    throw InvalidHyperparameterError("early_stop_patience must be >= 1");
  if (c.max_epochs < 1) throw InvalidHyperparameterError("max_epochs must be >= 1");
  if (c.lambda > 0.0 && c.cost_source == CostSource::None)
    throw InvalidHyperparameterError("lambda > 0 requires a cost matrix source");
}

double validation_kappa(const Model& m, const Dataset& val) {
  return quadratic_weighted_kappa(confusion_matrix(predict(m, val)));
}

}  // namespace

std::optional<CostMatrix> resolve_cost_matrix(const TrainConfig& config,
                                              int num_classes) {
  std::optional<CostMatrix> m;
  switch (config.cost_source) {
    case CostSource::None:
      return std::nullopt;
    case CostSource::Quadratic:
      m = quadratic_cost_matrix(num_classes);
      break;
    case CostSource::Ast:
      m = ast_cost_matrix(load_confusion_csv(config.cost_path));
      break;
    case CostSource::Csv:
      m = load_cost_csv(config.cost_path);
      break;
  }
  if (m->num_classes != num_classes)
    throw InvalidDimensionError("cost matrix is " + std::to_string(m->num_classes) +
                                "-class, data is " + std::to_string(num_classes));
  return m;
}

std::vector<int> oversample_indices(const std::vector<int>& labels,
                                    std::uint32_t seed) {
  if (labels.empty()) throw EmptyInputError("no labels to oversample");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<int>(i));
  std::size_t max_count = 0;
  for (const auto& [g, idx] : by_class) max_count = std::max(max_count, idx.size());

  std::mt19937 rng(seed);
  std::vector<int> out;
  out.reserve(by_class.size() * max_count);
  for (const auto& [g, idx] : by_class) {
    std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
    for (std::size_t k = 0; k < max_count; ++k) out.push_back(idx[pick(rng)]);
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

PredictionSet predict(const Model& m, const Dataset& ds) {
  if (ds.num_features != m.input_dim)
    throw InvalidDimensionError("dataset has " + std::to_string(ds.num_features) +
                                " features, model expects " +
                                std::to_string(m.input_dim));
  if (ds.num_classes > m.num_classes)
    throw InvalidDimensionError("dataset labels exceed model classes");
  PredictionSet preds;
  preds.num_classes = m.num_classes;
  preds.truths = ds.labels;
  preds.probs.reserve(static_cast<std::size_t>(ds.num_rows) * m.num_classes);
  for (int i = 0; i < ds.num_rows; ++i) {
    ProbVector p = softmax(forward(m, ds.row(i)));
    preds.probs.insert(preds.probs.end(), p.begin(), p.end());
  }
  return preds;
}

TrainResult train(const TrainConfig& config, const Dataset& train_split,
                  const Dataset& val_split) {
  validate_config(config);
  if (train_split.num_rows < 1 || val_split.num_rows < 1)
    throw EmptyInputError("train and validation splits must be non-empty");
  if (train_split.num_features != val_split.num_features)
    throw InvalidDimensionError("train/val feature dimensions differ");
  int num_classes = std::max(train_split.num_classes, val_split.num_classes);
  {
    auto [lo, hi] = std::minmax_element(val_split.labels.begin(), val_split.labels.end());
    if (*lo == *hi)
      throw InvalidInputError("validation split needs at least 2 classes");
  }

  std::optional<CostMatrix> cost = resolve_cost_matrix(config, num_classes);
  const CostMatrix* cost_ptr = cost ? &*cost : nullptr;

  Model model = init_model(config.model_kind, train_split.num_features,
                           config.hidden_dim, num_classes, config.seed);
  ModelGrad grad(model);
  Model best_model = model;
  TrainHistory history;
  history.best_val_kappa = -std::numeric_limits<double>::infinity();

  // One master stream hands out a seed per epoch so that oversampling
  // draws are independent across epochs but fixed by config.seed.
  std::mt19937 epoch_rng(config.seed ^ 0x5bd1e995u);
  double lr = config.lr;
  int plateau_wait = 0;
  int stop_wait = 0;

  std::vector<double> hidden;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::uint32_t epoch_seed = epoch_rng();
    std::vector<int> order;
    if (config.oversample) {
      order = oversample_indices(train_split.labels, epoch_seed);
    } else {
      order.resize(train_split.num_rows);
      std::iota(order.begin(), order.end(), 0);
      std::mt19937 shuffle_rng(epoch_seed);
      std::shuffle(order.begin(), order.end(), shuffle_rng);
    }

    double loss_sum = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size, ++batch_index) {
      std::size_t stop = std::min(order.size(), start + config.batch_size);
      grad.zero();
      for (std::size_t t = start; t < stop; ++t) {
        int i = order[t];
        LogitVector z = forward(model, train_split.row(i), &hidden);
        for (double v : z)
          if (!std::isfinite(v))
            throw TrainingDivergedError(epoch, batch_index + 1);
        LossValue lv = cs_regularized_loss(config.base_loss, z, train_split.labels[i],
                                           config.lambda, cost_ptr, config.hyper);
        if (!std::isfinite(lv.value))
          throw TrainingDivergedError(epoch, batch_index + 1);
        loss_sum += lv.value;
        accumulate_grad(model, train_split.row(i), hidden, *lv.gradient, grad);
      }
      apply_grad(model, grad, lr / static_cast<double>(stop - start));
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.val_kappa = validation_kappa(model, val_split);
    rec.lr = lr;
    history.epochs.push_back(rec);

    // Patience counters ask for a clear (> 1e-4) improvement; the best
    // snapshot updates on any strict improvement.
    bool clear_improvement = rec.val_kappa > history.best_val_kappa + 1e-4;
    if (rec.val_kappa > history.best_val_kappa) {
      history.best_val_kappa = rec.val_kappa;
      history.best_epoch = epoch;
      best_model = model;
    }
    if (clear_improvement) {
      plateau_wait = 0;
      stop_wait = 0;
    } else {
      ++plateau_wait;
      ++stop_wait;
    }
    if (stop_wait >= config.early_stop_patience) break;
    if (plateau_wait >= config.plateau_patience) {
      lr /= config.plateau_factor;
      plateau_wait = 0;
    }
  }

  return TrainResult{std::move(best_model), std::move(history)};
}

SweepResult run_lambda_sweep(const std::function<double(double)>& score) {
  SweepResult result;
  auto evaluate = [&](double lambda) {
    result.points.push_back({lambda, score(lambda)});
  };
  evaluate(0.0);
  evaluate(0.1);
  evaluate(1.0);

  auto winner = [&result]() {
    int best = 0;
    for (int i = 1; i < static_cast<int>(result.points.size()); ++i) {
      // Strict >: ties keep the earlier (smaller) lambda.
      if (result.points[i].val_kappa > result.points[best].val_kappa) best = i;
    }
    return best;
  };

  while (true) {
    int best = winner();
    double largest = result.points.back().lambda;
    if (result.points[best].lambda != largest || largest >= 1e9) {
      result.selected_lambda = result.points[best].lambda;
      return result;
    }
    evaluate(largest * 10.0);
  }
}

SweepRun lambda_sweep(const TrainConfig& base_config, const Dataset& train_split,
                      const Dataset& val_split) {
  std::map<double, TrainResult> runs;
  SweepResult sweep = run_lambda_sweep([&](double lambda) {
    TrainConfig config = base_config;
    config.lambda = lambda;
    TrainResult r = train(config, train_split, val_split);
    double kappa = r.history.best_val_kappa;
    runs.emplace(lambda, std::move(r));
    return kappa;
  });
  double selected = sweep.selected_lambda;
  return SweepRun{std::move(sweep), std::move(runs.at(selected))};
}

}  // namespace csord

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "csord/data_io.hpp"
#include "csord/losses.hpp"
#include "csord/metrics.hpp"
#include "csord/model.hpp"

namespace csord {

enum class CostSource { None, Quadratic, Ast, Csv };

struct TrainConfig {
  BaseLoss base_loss = BaseLoss::CrossEntropy;
  double lambda = 0.0;
  CostSource cost_source = CostSource::None;
  std::string cost_path;  // confusion CSV for ast, cost CSV for csv
  ModelKind model_kind = ModelKind::Linear;
  int hidden_dim = 0;
  int batch_size = 8;
  double lr = 0.001;
  double plateau_factor = 10.0;
  int plateau_patience = 3;
  int early_stop_patience = 10;
  int max_epochs = 100;
  bool oversample = true;
  LossHyper hyper;
  std::uint32_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_kappa = 0.0;
  double lr = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_kappa = 0.0;
};

struct TrainResult {
  Model model;  // best-validation-epoch weights
  TrainHistory history;
};

struct SweepPoint {
  double lambda = 0.0;
  double val_kappa = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // in evaluation order, each lambda once
  double selected_lambda = 0.0;
};

// Materialize the configured cost matrix; empty for CostSource::None.
std::optional<CostMatrix> resolve_cost_matrix(const TrainConfig& config,
                                              int num_classes);

// Balance classes by resampling each one with replacement up to the
// majority count, then shuffle. Length = #present classes * max count.
std::vector<int> oversample_indices(const std::vector<int>& labels,
                                    std::uint32_t seed);

// Minibatch SGD with validation-kappa plateau schedule and early stop.
TrainResult train(const TrainConfig& config, const Dataset& train_split,
                  const Dataset& val_split);

// Softmax predictions of a model over a dataset.
PredictionSet predict(const Model& m, const Dataset& ds);

// The lambda-selection protocol against an arbitrary scorer: evaluate
// {0, 0.1, 1}; while the largest lambda tried so far is the winner,
// multiply it by 10 and evaluate again. Ties go to the smaller lambda.
SweepResult run_lambda_sweep(const std::function<double(double)>& score);

struct SweepRun {
  SweepResult sweep;
  TrainResult best;  // the run trained at sweep.selected_lambda
};

SweepRun lambda_sweep(const TrainConfig& base_config, const Dataset& train_split,
                      const Dataset& val_split);

}  // namespace csord

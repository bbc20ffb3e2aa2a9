#pragma once

#include <string>

#include <json.hpp>

#include "csord/bootstrap.hpp"
#include "csord/cost_matrices.hpp"
#include "csord/metrics.hpp"
#include "csord/model.hpp"
#include "csord/trainer.hpp"

namespace csord {

using json = nlohmann::json;

std::string base_loss_name(BaseLoss b);
BaseLoss base_loss_from_name(const std::string& s);
std::string cost_source_name(CostSource s);
CostSource cost_source_from_name(const std::string& s);
std::string model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& s);

// Matrices serialize as {"num_classes": C, "matrix": [row, ...]}.
json to_json(const ConfusionCounts& m);
json to_json(const RowStochastic& m);
json to_json(const CostMatrix& m);

json to_json(const MetricsReport& r);   // undefined metrics become null
json to_json(const BootstrapResult& r);
json to_json(const SweepResult& r);
json to_json(const TrainHistory& h);
json to_json(const TrainConfig& c);
json to_json(const Model& m);

// Fields present in `j` override the matching fields of `base`;
// everything else keeps its value. Unknown keys are rejected.
TrainConfig train_config_from_json(const json& j, TrainConfig base = {});

Model model_from_json(const json& j);

struct Checkpoint {
  Model model;
  TrainConfig config;
  double best_val_kappa = 0.0;
};

json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const json& j);

void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// One JSON object per line, one line per epoch.
void save_history_jsonl(const TrainHistory& h, const std::string& path);

}  // namespace csord

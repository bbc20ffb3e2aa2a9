#include "csord/serialize.hpp"

#include <fstream>

#include "csord/errors.hpp"

namespace csord {

namespace {

template <typename T>
json matrix_rows(int num_classes, const std::vector<T>& flat) {
  json rows = json::array();
  for (int i = 0; i < num_classes; ++i) {
    json row = json::array();
    for (int j = 0; j < num_classes; ++j)
      row.push_back(flat[static_cast<std::size_t>(i) * num_classes + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
std::vector<T> matrix_flat(const json& j, int& num_classes) {
  if (!j.is_array() || j.empty())
    throw InvalidInputError("matrix JSON must be a non-empty array of rows");
  num_classes = static_cast<int>(j.size());
  std::vector<T> flat;
  flat.reserve(static_cast<std::size_t>(num_classes) * num_classes);
  for (const auto& row : j) {
    if (static_cast<int>(row.size()) != num_classes)
      throw InvalidInputError("matrix JSON rows must be square");
    for (const auto& cell : row) flat.push_back(cell.get<T>());
  }
  return flat;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw InvalidInputError("unknown config key '" + it.key() + "'");
  }
}

}  // namespace

std::string base_loss_name(BaseLoss b) {
  switch (b) {
    case BaseLoss::CrossEntropy: return "ce";
    case BaseLoss::Focal: return "fl";
    case BaseLoss::Nuls: return "nuls";
  }
  return "ce";
}

BaseLoss base_loss_from_name(const std::string& s) {
  if (s == "ce") return BaseLoss::CrossEntropy;
  if (s == "fl") return BaseLoss::Focal;
  if (s == "nuls") return BaseLoss::Nuls;
  throw InvalidInputError("unknown base loss '" + s + "' (want ce|fl|nuls)");
}

std::string cost_source_name(CostSource s) {
  switch (s) {
    case CostSource::None: return "none";
    case CostSource::Quadratic: return "quadratic";
    case CostSource::Ast: return "ast";
    case CostSource::Csv: return "csv";
  }
  return "none";
}

CostSource cost_source_from_name(const std::string& s) {
  if (s == "none") return CostSource::None;
  if (s == "quadratic") return CostSource::Quadratic;
  if (s == "ast") return CostSource::Ast;
  if (s == "csv") return CostSource::Csv;
  throw InvalidInputError("unknown cost matrix source '" + s +
                          "' (want none|quadratic|ast|csv)");
}

std::string model_kind_name(ModelKind k) {
  return k == ModelKind::Linear ? "linear" : "one_hidden";
}

ModelKind model_kind_from_name(const std::string& s) {
  if (s == "linear") return ModelKind::Linear;
  if (s == "one_hidden") return ModelKind::OneHidden;
  throw InvalidInputError("unknown model kind '" + s + "' (want linear|one_hidden)");
}

json to_json(const ConfusionCounts& m) {
  return {{"num_classes", m.num_classes}, {"matrix", matrix_rows(m.num_classes, m.counts)}};
}

json to_json(const RowStochastic& m) {
  return {{"num_classes", m.num_classes}, {"matrix", matrix_rows(m.num_classes, m.probs)}};
}

json to_json(const CostMatrix& m) {
  return {{"num_classes", m.num_classes}, {"matrix", matrix_rows(m.num_classes, m.costs)}};
}

json to_json(const MetricsReport& r) {
  json j;
  j["quad_kappa"] = r.quad_kappa;
  j["mauc"] = r.mauc ? json(*r.mauc) : json(nullptr);
  j["aca"] = r.aca;
  j["kendall_tau"] = r.kendall_tau ? json(*r.kendall_tau) : json(nullptr);
  j["confusion"] = matrix_rows(r.confusion.num_classes, r.confusion.counts);
  return j;
}

json to_json(const BootstrapResult& r) {
  return {{"metric", r.metric},
          {"n_resamples", r.n_resamples},
          {"n_dropped", r.n_dropped},
          {"observed_diff", r.observed_diff},
          {"diffs", r.diffs},
          {"p_value", r.p_value},
          {"ci_lo", r.ci_lo},
          {"ci_hi", r.ci_hi},
          {"alpha", r.alpha},
          {"significant", r.significant}};
}

json to_json(const SweepResult& r) {
  json points = json::array();
  for (const SweepPoint& p : r.points)
    points.push_back({{"lambda", p.lambda}, {"val_kappa", p.val_kappa}});
  return {{"points", std::move(points)}, {"selected_lambda", r.selected_lambda}};
}

json to_json(const TrainHistory& h) {
  json epochs = json::array();
  for (const EpochRecord& e : h.epochs)
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_kappa", e.val_kappa},
                      {"lr", e.lr}});
  return {{"epochs", std::move(epochs)},
          {"best_epoch", h.best_epoch},
          {"best_val_kappa", h.best_val_kappa}};
}

json to_json(const TrainConfig& c) {
  return {{"base_loss", base_loss_name(c.base_loss)},
          {"lambda", c.lambda},
          {"cost_matrix", cost_source_name(c.cost_source)},
          {"cost_path", c.cost_path},
          {"model", model_kind_name(c.model_kind)},
          {"hidden_dim", c.hidden_dim},
          {"batch_size", c.batch_size},
          {"lr", c.lr},
          {"plateau_factor", c.plateau_factor},
          {"plateau_patience", c.plateau_patience},
          {"early_stop_patience", c.early_stop_patience},
          {"max_epochs", c.max_epochs},
          {"oversample", c.oversample},
          {"alpha", c.hyper.alpha},
          {"gamma", c.hyper.gamma},
          {"sigma", c.hyper.sigma},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig base) {
  if (!j.is_object()) throw InvalidInputError("config JSON must be an object");
  check_keys(j, {"base_loss", "lambda", "cost_matrix", "cost_path", "model",
                 "hidden_dim", "batch_size", "lr", "plateau_factor",
                 "plateau_patience", "early_stop_patience", "max_epochs",
                 "oversample", "alpha", "gamma", "sigma", "seed"});
  if (j.contains("base_loss")) base.base_loss = base_loss_from_name(j["base_loss"]);
  if (j.contains("lambda")) base.lambda = j["lambda"].get<double>();
  if (j.contains("cost_matrix"))
    base.cost_source = cost_source_from_name(j["cost_matrix"]);
  if (j.contains("cost_path")) base.cost_path = j["cost_path"].get<std::string>();
  if (j.contains("model")) base.model_kind = model_kind_from_name(j["model"]);
  if (j.contains("hidden_dim")) base.hidden_dim = j["hidden_dim"].get<int>();
  if (j.contains("batch_size")) base.batch_size = j["batch_size"].get<int>();
  if (j.contains("lr")) base.lr = j["lr"].get<double>();
  if (j.contains("plateau_factor")) base.plateau_factor = j["plateau_factor"].get<double>();
  if (j.contains("plateau_patience"))
    base.plateau_patience = j["plateau_patience"].get<int>();
  if (j.contains("early_stop_patience"))
    base.early_stop_patience = j["early_stop_patience"].get<int>();
  if (j.contains("max_epochs")) base.max_epochs = j["max_epochs"].get<int>();
  if (j.contains("oversample")) base.oversample = j["oversample"].get<bool>();
  if (j.contains("alpha")) base.hyper.alpha = j["alpha"].get<double>();
  if (j.contains("gamma")) base.hyper.gamma = j["gamma"].get<double>();
  if (j.contains("sigma")) base.hyper.sigma = j["sigma"].get<double>();
  if (j.contains("seed")) base.seed = j["seed"].get<std::uint32_t>();
  return base;
}

json to_json(const Model& m) {
  return {{"kind", model_kind_name(m.kind)},
          {"input_dim", m.input_dim},
          {"hidden_dim", m.hidden_dim},
          {"num_classes", m.num_classes},
          {"w_hidden", m.w_hidden},
          {"b_hidden", m.b_hidden},
          {"w_out", m.w_out},
          {"b_out", m.b_out}};
}

Model model_from_json(const json& j) {
  Model m;
  m.kind = model_kind_from_name(j.at("kind"));
  m.input_dim = j.at("input_dim").get<int>();
  m.hidden_dim = j.at("hidden_dim").get<int>();
  m.num_classes = j.at("num_classes").get<int>();
  m.w_hidden = j.at("w_hidden").get<std::vector<double>>();
  m.b_hidden = j.at("b_hidden").get<std::vector<double>>();
  m.w_out = j.at("w_out").get<std::vector<double>>();
  m.b_out = j.at("b_out").get<std::vector<double>>();
  std::size_t want_h = static_cast<std::size_t>(m.hidden_dim) * m.input_dim;
  std::size_t want_o = static_cast<std::size_t>(m.num_classes) * m.out_fan_in();
  if (m.w_hidden.size() != want_h || m.b_hidden.size() != static_cast<std::size_t>(m.hidden_dim) ||
      m.w_out.size() != want_o || m.b_out.size() != static_cast<std::size_t>(m.num_classes))
    throw InvalidDimensionError("model JSON parameter shapes are inconsistent");
  if (!m.finite()) throw InvalidInputError("model JSON has non-finite parameters");
  return m;
}

json to_json(const Checkpoint& c) {
  return {{"model", to_json(c.model)},
          {"config", to_json(c.config)},
          {"best_val_kappa", c.best_val_kappa}};
}

Checkpoint checkpoint_from_json(const json& j) {
  Checkpoint c;
  c.model = model_from_json(j.at("model"));
  c.config = train_config_from_json(j.at("config"));
  c.best_val_kappa = j.at("best_val_kappa").get<double>();
  return c;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw InvalidInputError("write failed for " + path);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what(), 1);
  }
  return j;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  save_json(to_json(c), path);
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(load_json(path));
}

void save_history_jsonl(const TrainHistory& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  for (const EpochRecord& e : h.epochs) {
    json line = {{"epoch", e.epoch},
                 {"train_loss", e.train_loss},
                 {"val_kappa", e.val_kappa},
                 {"lr", e.lr}};
    out << line.dump() << "\n";
  }
  if (!out) throw InvalidInputError("write failed for " + path);
}

}  // namespace csord

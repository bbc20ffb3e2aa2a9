#include "csord/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "csord/errors.hpp"

namespace csord {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double(const std::string& cell, int line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ParseError("non-numeric cell '" + cell + "'", line_no);
  }
}

int parse_label(const std::string& cell, int line_no) {
  double v = parse_double(cell, line_no);
  double rounded = std::nearbyint(v);
  if (v != rounded) throw ParseError("label '" + cell + "' is not integral", line_no);
  if (rounded < 0) throw ParseError("label '" + cell + "' is negative", line_no);
  return static_cast<int>(rounded);
}

int draw_categorical(const double* probs, int n, double u) {
  double cum = 0.0;
  for (int g = 0; g + 1 < n; ++g) {
    cum += probs[g];
    if (u < cum) return g;
  }
  return n - 1;
}

}  // namespace

Dataset Dataset::slice(int begin, int end) const {
  if (begin < 0 || end > num_rows || begin >= end)
    throw InvalidInputError("bad slice range");
  Dataset out;
  out.num_rows = end - begin;
  out.num_features = num_features;
  out.num_classes = num_classes;
  out.provenance = provenance;
  out.features.assign(features.begin() + static_cast<std::size_t>(begin) * num_features,
                      features.begin() + static_cast<std::size_t>(end) * num_features);
  out.labels.assign(labels.begin() + begin, labels.begin() + end);
  if (has_clean_labels())
    out.clean_labels.assign(clean_labels.begin() + begin, clean_labels.begin() + end);
  return out;
}

Dataset load_csv(const std::string& path, int num_classes_override) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header = split_line(line);
  bool has_clean = !header.empty() && header.back() == "clean_label";
  int label_col = static_cast<int>(header.size()) - (has_clean ? 2 : 1);
  if (label_col < 1 || header[label_col] != "label")
    throw ParseError("header must be f0,...,f{D-1},label[,clean_label]", 1);
  int dim = label_col;
  for (int d = 0; d < dim; ++d) {
    if (header[d] != "f" + std::to_string(d))
      throw ParseError("unexpected feature column '" + header[d] + "'", 1);
  }

  Dataset ds;
  ds.num_features = dim;
  ds.provenance = path;
  int expected_cols = static_cast<int>(header.size());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (static_cast<int>(cells.size()) != expected_cols)
      throw ParseError("expected " + std::to_string(expected_cols) + " columns, got " +
                           std::to_string(cells.size()),
                       line_no);
    for (int d = 0; d < dim; ++d) ds.features.push_back(parse_double(cells[d], line_no));
    ds.labels.push_back(parse_label(cells[label_col], line_no));
    if (has_clean) ds.clean_labels.push_back(parse_label(cells[label_col + 1], line_no));
  }
  ds.num_rows = static_cast<int>(ds.labels.size());
  if (ds.num_rows == 0) throw ParseError("file has no data rows", line_no + 1);

  int max_label = *std::max_element(ds.labels.begin(), ds.labels.end());
  if (has_clean)
    max_label = std::max(max_label,
                         *std::max_element(ds.clean_labels.begin(), ds.clean_labels.end()));
  ds.num_classes = max_label + 1;
  if (num_classes_override > 0) {
    if (num_classes_override <= max_label)
      throw InvalidInputError("num_classes override " + std::to_string(num_classes_override) +
                              " smaller than max label + 1");
    ds.num_classes = num_classes_override;
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  for (int d = 0; d < ds.num_features; ++d) out << "f" << d << ",";
  out << "label";
  if (ds.has_clean_labels()) out << ",clean_label";
  out << "\n";
  char buf[64];
  for (int i = 0; i < ds.num_rows; ++i) {
    const double* x = ds.row(i);
    for (int d = 0; d < ds.num_features; ++d) {
      std::snprintf(buf, sizeof(buf), "%.17g", x[d]);
      out << buf << ",";
    }
    out << ds.labels[i];
    if (ds.has_clean_labels()) out << "," << ds.clean_labels[i];
    out << "\n";
  }
  if (!out) throw InvalidInputError("write failed for " + path);
}

Dataset gen_synthetic(const SynthSpec& spec) {
  if (spec.num_classes < 2) throw InvalidHyperparameterError("need at least 2 classes");
  if (spec.num_samples < 1) throw InvalidHyperparameterError("need at least 1 sample");
  if (spec.input_dim < 1) throw InvalidHyperparameterError("need at least 1 feature");
  if (!(spec.spacing > 0.0)) throw InvalidHyperparameterError("spacing must be positive");
  if (!(spec.spread > 0.0)) throw InvalidHyperparameterError("spread must be positive");

  std::vector<double> priors = spec.priors;
  if (priors.empty())
    priors.assign(spec.num_classes, 1.0 / spec.num_classes);
  if (static_cast<int>(priors.size()) != spec.num_classes)
    throw InvalidHyperparameterError("priors length must equal num_classes");
  double sum = 0.0;
  for (double p : priors) {
    if (p < 0.0) throw InvalidHyperparameterError("priors must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidHyperparameterError("priors must sum to 1");
  if (spec.noise && spec.noise->num_classes != spec.num_classes)
    throw InvalidDimensionError("noise matrix size does not match num_classes");

  Dataset ds;
  ds.num_rows = spec.num_samples;
  ds.num_features = spec.input_dim;
  ds.num_classes = spec.num_classes;
  ds.provenance = "synthetic(seed=" + std::to_string(spec.seed) + ")";
  ds.features.reserve(static_cast<std::size_t>(spec.num_samples) * spec.input_dim);
  ds.labels.reserve(spec.num_samples);

  // Class means sit on the (1,...,1) line, spaced so that the euclidean
  // gap between adjacent means is exactly `spacing`.
  double step = spec.spacing / std::sqrt(static_cast<double>(spec.input_dim));
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, spec.spread);
  for (int i = 0; i < spec.num_samples; ++i) {
    int g = draw_categorical(priors.data(), spec.num_classes, unif(rng));
    ds.labels.push_back(g);
    double center = g * step;
    for (int d = 0; d < spec.input_dim; ++d) ds.features.push_back(center + normal(rng));
  }

  if (spec.noise) {
    ds.clean_labels = ds.labels;
    ds.labels = inject_label_noise(ds.clean_labels, *spec.noise, spec.seed ^ 0x9e3779b9u);
  }
  return ds;
}

std::vector<int> inject_label_noise(const std::vector<int>& labels,
                                    const RowStochastic& noise,
                                    std::uint32_t seed) {
  for (int y : labels) {
    if (y < 0 || y >= noise.num_classes)
      throw InvalidDimensionError("label " + std::to_string(y) +
                                  " outside noise matrix range");
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> noisy(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double* row =
        noise.probs.data() + static_cast<std::size_t>(labels[i]) * noise.num_classes;
    noisy[i] = draw_categorical(row, noise.num_classes, unif(rng));
  }
  return noisy;
}

}  // namespace csord

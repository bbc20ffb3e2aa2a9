#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csord/cost_matrices.hpp"

namespace csord {

struct Dataset {
  int num_rows = 0;
  int num_features = 0;
  int num_classes = 0;
  std::vector<double> features;   // num_rows x num_features, row-major
  std::vector<int> labels;        // length num_rows
  std::vector<int> clean_labels;  // empty unless a noise model was applied
  std::string provenance;

  bool has_clean_labels() const { return !clean_labels.empty(); }
  const double* row(int i) const {
    return features.data() + static_cast<std::size_t>(i) * num_features;
  }
  // Rows [begin, end) as a standalone dataset.
  Dataset slice(int begin, int end) const;
};

// Synthetic ordinal generator: class means are collinear and equally
// spaced, so distance in label space is distance in feature space.
struct SynthSpec {
  int num_classes = 5;
  int num_samples = 1000;
  int input_dim = 2;
  std::vector<double> priors;  // empty = uniform
  double spacing = 1.0;        // gap between adjacent class means
  double spread = 1.0;         // isotropic stddev around each mean
  std::optional<RowStochastic> noise;  // label corruption model
  std::uint32_t seed = 0;
};

// CSV with header "f0,...,f{D-1},label[,clean_label]".
Dataset load_csv(const std::string& path, int num_classes_override = 0);
void save_csv(const Dataset& ds, const std::string& path);

Dataset gen_synthetic(const SynthSpec& spec);

// Independently resample each label from the matching row of the
// corruption matrix.
std::vector<int> inject_label_noise(const std::vector<int>& labels,
                                    const RowStochastic& noise,
                                    std::uint32_t seed);

}  // namespace csord

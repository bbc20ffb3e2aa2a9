#include "csord/cost_matrices.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace csord {

namespace {

void check_dim(int c) {
  if (c < 2) {
    throw InvalidDimensionError("matrix needs at least 2 classes, got " +
                                std::to_string(c));
  }
}

void check_size(int c, std::size_t n) {
  if (n != static_cast<std::size_t>(c) * c) {
    throw InvalidDimensionError("expected " + std::to_string(c) + "x" +
                                std::to_string(c) + " entries, got " +
                                std::to_string(n));
  }
}

}  // namespace

ConfusionCounts::ConfusionCounts(int c) : num_classes(c) {
  check_dim(c);
  counts.assign(static_cast<std::size_t>(c) * c, 0);
}

ConfusionCounts::ConfusionCounts(int c, std::vector<long long> data)
    : num_classes(c), counts(std::move(data)) {
  check_dim(c);
  check_size(c, counts.size());
  for (long long v : counts) {
    if (v < 0) {
      throw InvalidInputError("confusion counts must be non-negative");
    }
  }
}

long long ConfusionCounts::row_sum(int i) const {
  long long s = 0;
  for (int j = 0; j < num_classes; ++j) s += at(i, j);
  return s;
}

long long ConfusionCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0LL);
}

RowStochastic::RowStochastic(int c, std::vector<double> data)
    : num_classes(c), probs(std::move(data)) {
  check_dim(c);
  check_size(c, probs.size());
  for (int i = 0; i < c; ++i) {
    double s = 0.0;
    for (int j = 0; j < c; ++j) {
      double v = at(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidInputError("row-stochastic entries must lie in [0,1]");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) {
      throw InvalidInputError("row " + std::to_string(i) +
                              " sums to " + std::to_string(s) + ", not 1");
    }
  }
}

CostMatrix::CostMatrix(int c, std::vector<double> data)
    : num_classes(c), costs(std::move(data)) {
  check_dim(c);
  check_size(c, costs.size());
  for (double v : costs) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidInputError("cost entries must be finite and non-negative");
    }
  }
}

CostMatrix quadratic_cost_matrix(int num_classes) {
  check_dim(num_classes);
  std::vector<double> costs(static_cast<std::size_t>(num_classes) *
                            num_classes);
  for (int i = 0; i < num_classes; ++i) {
    for (int j = 0; j < num_classes; ++j) {
      double d = static_cast<double>(i - j);
      costs[static_cast<std::size_t>(i) * num_classes + j] = d * d;
    }
  }
  return CostMatrix(num_classes, std::move(costs));
}

RowStochastic row_normalize(const ConfusionCounts& m) {
  const int c = m.num_classes;
  check_dim(c);
  std::vector<double> probs(static_cast<std::size_t>(c) * c);
  for (int i = 0; i < c; ++i) {
    const long long s = m.row_sum(i);
    if (s <= 0) throw ZeroRowError(i);
    // Exact integer sum first, then a single division per entry.
    for (int j = 0; j < c; ++j) {
      probs[static_cast<std::size_t>(i) * c + j] =
          static_cast<double>(m.at(i, j)) / static_cast<double>(s);
    }
  }
  return RowStochastic(c, std::move(probs));
}

CostMatrix ast_cost_matrix(const ConfusionCounts& m) {
  const RowStochastic t = row_normalize(m);
  const int c = m.num_classes;
  std::vector<double> costs(static_cast<std::size_t>(c) * c);
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) {
      const double d = static_cast<double>(i - j);
      const double identity = (i == j) ? 1.0 : 0.0;
      costs[static_cast<std::size_t>(i) * c + j] =
          (d * d + identity - t.at(i, j)) / 2.0;
    }
  }
  return CostMatrix(c, std::move(costs));
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw ParseError("cell '" + cell + "' is not numeric", line_no);
      }
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) {
        throw ParseError("cell '" + cell + "' is not numeric", line_no);
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged row: expected " +
                           std::to_string(rows.front().size()) + " cells, got " +
                           std::to_string(row.size()),
                       line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError("no rows in " + path);
  if (rows.size() != rows.front().size()) {
    throw InvalidDimensionError("matrix in " + path + " is not square: " +
                                std::to_string(rows.size()) + " rows x " +
                                std::to_string(rows.front().size()) + " cols");
  }
  return rows;
}

void write_numeric_csv(const std::vector<std::vector<double>>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace

ConfusionCounts load_confusion_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  const int c = static_cast<int>(rows.size());
  std::vector<long long> counts;
  counts.reserve(rows.size() * rows.size());
  int line_no = 0;
  for (const auto& row : rows) {
    ++line_no;
    for (double v : row) {
      if (v < 0 || v != std::floor(v)) {
        throw ParseError("confusion counts must be non-negative integers",
                         line_no);
      }
      counts.push_back(static_cast<long long>(v));
    }
  }
  return ConfusionCounts(c, std::move(counts));
}

RowStochastic load_row_stochastic_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  const int c = static_cast<int>(rows.size());
  std::vector<double> probs;
  probs.reserve(rows.size() * rows.size());
  for (const auto& row : rows) probs.insert(probs.end(), row.begin(), row.end());
  return RowStochastic(c, std::move(probs));
}

CostMatrix load_cost_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  const int c = static_cast<int>(rows.size());
  std::vector<double> costs;
  costs.reserve(rows.size() * rows.size());
  for (const auto& row : rows) costs.insert(costs.end(), row.begin(), row.end());
  return CostMatrix(c, std::move(costs));
}

void save_csv(const ConfusionCounts& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write " + path);
  for (int i = 0; i < m.num_classes; ++i) {
    for (int j = 0; j < m.num_classes; ++j) {
      if (j) out << ',';
      out << m.at(i, j);
    }
    out << '\n';
  }
}

void save_csv(const RowStochastic& m, const std::string& path) {
  std::vector<std::vector<double>> rows(m.num_classes);
  for (int i = 0; i < m.num_classes; ++i) {
    for (int j = 0; j < m.num_classes; ++j) rows[i].push_back(m.at(i, j));
  }
  write_numeric_csv(rows, path);
}

void save_csv(const CostMatrix& m, const std::string& path) {
  std::vector<std::vector<double>> rows(m.num_classes);
  for (int i = 0; i < m.num_classes; ++i) {
    for (int j = 0; j < m.num_classes; ++j) rows[i].push_back(m.at(i, j));
  }
  write_numeric_csv(rows, path);
}

}  // namespace csord

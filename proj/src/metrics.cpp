#include "csord/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace csord {

namespace {

void check_preds(const PredictionSet& preds) {
  if (preds.size() == 0) throw EmptyInputError("empty prediction set");
  if (preds.num_classes < 2) {
    throw InvalidDimensionError("prediction set needs >= 2 classes");
  }
  if (preds.probs.size() != static_cast<std::size_t>(preds.size()) *
                                preds.num_classes) {
    throw InvalidInputError("probability buffer size mismatch");
  }
  for (int t : preds.truths) {
    if (t < 0 || t >= preds.num_classes) {
      throw InvalidInputError("true grade outside [0, C)");
    }
  }
}

}  // namespace

int PredictionSet::hard_prediction(int i) const {
  const double* p = row(i);
  int best = 0;
  for (int j = 1; j < num_classes; ++j) {
    if (p[j] > p[best]) best = j;  // strict: ties stay at the lower grade
  }
  return best;
}

ConfusionCounts confusion_matrix(const PredictionSet& preds) {
  check_preds(preds);
  ConfusionCounts m(preds.num_classes);
  for (int i = 0; i < preds.size(); ++i) {
    ++m.at(preds.truths[i], preds.hard_prediction(i));
  }
  return m;
}

double quadratic_weighted_kappa(const ConfusionCounts& m) {
  const int c = m.num_classes;
  const long long total = m.total();
  if (total <= 0) throw EmptyInputError("confusion matrix has zero total");

  std::vector<long long> row(c, 0), col(c, 0);
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) {
      row[i] += m.at(i, j);
      col[j] += m.at(i, j);
    }
  }
  // Integer-exact weighted sums; the common (C-1)^2 weight denominator
  // cancels in the ratio.
  long long w_obs = 0;
  double w_exp = 0.0;
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) {
      const long long d2 = static_cast<long long>(i - j) * (i - j);
      w_obs += m.at(i, j) * d2;
      w_exp += static_cast<double>(row[i]) * static_cast<double>(col[j]) *
               static_cast<double>(d2);
    }
  }
  if (w_exp == 0.0) return 1.0;  // all mass on one agreeing class
  return 1.0 - static_cast<double>(w_obs) * static_cast<double>(total) / w_exp;
}

double aca(const ConfusionCounts& m) {
  if (m.total() <= 0) throw EmptyInputError("confusion matrix has zero total");
  double sum = 0.0;
  int present = 0;
  for (int i = 0; i < m.num_classes; ++i) {
    const long long s = m.row_sum(i);
    if (s == 0) continue;
    sum += static_cast<double>(m.at(i, i)) / static_cast<double>(s);
    ++present;
  }
  return sum / static_cast<double>(present);
}

std::vector<int> absent_grades(const ConfusionCounts& m) {
  std::vector<int> absent;
  for (int i = 0; i < m.num_classes; ++i) {
    if (m.row_sum(i) == 0) absent.push_back(i);
  }
  return absent;
}

double kendall_tau(const PredictionSet& preds) {
  check_preds(preds);
  const long long n = preds.size();
  if (n < 2) throw UndefinedStatisticError("kendall tau needs >= 2 rows");

  // Pair counts via the truth x prediction contingency table.
  const int c = preds.num_classes;
  std::vector<long long> table(static_cast<std::size_t>(c) * c, 0);
  std::vector<long long> row(c, 0), col(c, 0);
  for (int i = 0; i < preds.size(); ++i) {
    const int t = preds.truths[i];
    const int p = preds.hard_prediction(i);
    ++table[static_cast<std::size_t>(t) * c + p];
    ++row[t];
    ++col[p];
  }

  const long long n0 = n * (n - 1) / 2;
  long long ties_x = 0, ties_y = 0;
  for (int i = 0; i < c; ++i) ties_x += row[i] * (row[i] - 1) / 2;
  for (int j = 0; j < c; ++j) ties_y += col[j] * (col[j] - 1) / 2;
  if (n0 == ties_x || n0 == ties_y) {
    throw UndefinedStatisticError(
        "kendall tau undefined for a constant sequence");
  }

  long long concordant = 0, discordant = 0;
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) {
      const long long t_ij = table[static_cast<std::size_t>(i) * c + j];
      if (t_ij == 0) continue;
      long long gt = 0, lt = 0;
      for (int i2 = i + 1; i2 < c; ++i2) {
        for (int j2 = 0; j2 < c; ++j2) {
          const long long t2 = table[static_cast<std::size_t>(i2) * c + j2];
          if (j2 > j) gt += t2;
          if (j2 < j) lt += t2;
        }
      }
      concordant += t_ij * gt;
      discordant += t_ij * lt;
    }
  }
  const double denom = std::sqrt(static_cast<double>(n0 - ties_x) *
                                 static_cast<double>(n0 - ties_y));
  return static_cast<double>(concordant - discordant) / denom;
}

namespace {

// Ranking AUC of `pos_scores` against `neg_scores`, ties counting 1/2,
// via the midrank form of the Mann-Whitney statistic.
double ranking_auc(std::vector<double>& pos_scores,
                   std::vector<double>& neg_scores) {
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) items.push_back({s, true});
  for (double s : neg_scores) items.push_back({s, false});
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.score < b.score; });

  double u = 0.0;
  std::size_t neg_seen = 0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j].score == items[i].score) ++j;
    std::size_t pos_in_block = 0, neg_in_block = 0;
    for (std::size_t k = i; k < j; ++k) {
      if (items[k].positive) ++pos_in_block;
      else ++neg_in_block;
    }
    u += static_cast<double>(pos_in_block) * static_cast<double>(neg_seen) +
         static_cast<double>(pos_in_block) * static_cast<double>(neg_in_block) *
             0.5;
    neg_seen += neg_in_block;
    i = j;
  }
  return u / (static_cast<double>(pos_scores.size()) *
              static_cast<double>(neg_scores.size()));
}

}  // namespace

double hand_till_mauc(const PredictionSet& preds,
                      std::vector<std::pair<int, int>>* skipped_pairs) {
  check_preds(preds);
  const int c = preds.num_classes;
  std::vector<std::vector<int>> by_class(c);
  for (int i = 0; i < preds.size(); ++i) by_class[preds.truths[i]].push_back(i);

  int present = 0;
  for (int g = 0; g < c; ++g) present += by_class[g].empty() ? 0 : 1;
  if (present < 2) {
    throw UndefinedStatisticError("mAUC needs >= 2 classes present");
  }
  if (skipped_pairs) skipped_pairs->clear();

  auto scores = [&](int item_class, int score_class) {
    std::vector<double> s;
    s.reserve(by_class[item_class].size());
    for (int idx : by_class[item_class]) s.push_back(preds.row(idx)[score_class]);
    return s;
  };

  double sum = 0.0;
  int pairs = 0;
  for (int i = 0; i < c; ++i) {
    for (int j = i + 1; j < c; ++j) {
      if (by_class[i].empty() || by_class[j].empty()) {
        if (skipped_pairs) skipped_pairs->push_back({i, j});
        continue;
      }
      auto i_scores_i = scores(i, i);
      auto j_scores_i = scores(j, i);
      auto j_scores_j = scores(j, j);
      auto i_scores_j = scores(i, j);
      const double a_ij = ranking_auc(i_scores_i, j_scores_i);
      const double a_ji = ranking_auc(j_scores_j, i_scores_j);
      sum += (a_ij + a_ji) / 2.0;
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

MetricsReport compute_metrics(const PredictionSet& preds) {
  MetricsReport report;
  report.confusion = confusion_matrix(preds);
  report.quad_kappa = quadratic_weighted_kappa(report.confusion);
  report.aca = aca(report.confusion);
  try {
    report.kendall_tau = kendall_tau(preds);
  } catch (const UndefinedStatisticError&) {
  }
  try {
    report.mauc = hand_till_mauc(preds);
  } catch (const UndefinedStatisticError&) {
  }
  return report;
}

}  // namespace csord

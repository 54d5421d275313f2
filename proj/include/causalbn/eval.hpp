#pragma once

// Structure comparison reports and predictive validation: k-fold cross
// validation, confusion matrices, ROC curves and rank-based AUC.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalbn/bayesnet.hpp"
#include "causalbn/dataset.hpp"
#include "causalbn/graph.hpp"
#include "causalbn/scoring.hpp"

namespace causalbn {

struct StructureRow {
  std::string name;
  std::size_t shd = 0;
  std::size_t fragments = 0;
  double free_parameters = 0;
  std::size_t edges = 0;
  double bic = 0;
  double log_likelihood = 0;
};

struct StructureReport {
  std::vector<StructureRow> rows;
};

// SHD is measured between the CPDAGs of each structure and the reference.
inline StructureReport structure_report(const std::vector<std::pair<std::string, Dag>>& structures, const Dag& reference,
                                        const CategoricalDataset& d) {
  d.require_complete("structure report");
  const Pdag ref = to_cpdag(reference);
  StructureReport rep;
  for (const auto& [name, g] : structures) {
    StructureRow row;
    row.name = name;
    row.shd = shd(to_cpdag(g), ref);
    row.fragments = count_fragments(g);
    row.free_parameters = free_parameters(g, d);
    row.edges = g.edge_count();
    row.bic = bic(g, d);
    row.log_likelihood = log_likelihood(g, d);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline nlohmann::json to_json(const StructureReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"name", x.name},
                    {"shd", x.shd},
                    {"fragments", x.fragments},
                    {"free_parameters", x.free_parameters},
                    {"edges", x.edges},
                    {"bic", x.bic},
                    {"log_likelihood", x.log_likelihood}});
  return {{"structures", rows}};
}

inline std::string to_csv(const StructureReport& r) {
  std::ostringstream out;
  out.precision(12);
  out << "name,shd,fragments,free_parameters,edges,bic,log_likelihood\n";
  for (const auto& x : r.rows)
    out << detail::csv_escape(x.name) << ',' << x.shd << ',' << x.fragments << ',' << x.free_parameters << ','
        << x.edges << ',' << x.bic << ',' << x.log_likelihood << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Prediction

namespace detail {

inline int binary_variable(const CategoricalDataset& d, std::string_view target, int& positive) {
  auto v = d.find(target);
  if (!v) throw DataError("target '" + std::string(target) + "' is not a dataset variable");
  const auto& var = d.variable(static_cast<std::size_t>(*v));
  if (var.cardinality() != 2) throw DataError("target '" + var.name + "' is not binary");
  positive = positive_state(var);
  return *v;
}

}  // namespace detail

// Share of positive rows of a binary target.
inline double threshold_from_prevalence(const CategoricalDataset& train, std::string_view target) {
  int pos = 1;
  const int v = detail::binary_variable(train, target, pos);
  train.require_complete("prevalence");
  if (train.rows() == 0) throw DataError("empty training data");
  std::size_t k = 0;
  for (auto x : train.column(static_cast<std::size_t>(v))) k += x == pos;
  return static_cast<double>(k) / static_cast<double>(train.rows());
}

struct Confusion {
  double tn = 0, fp = 0, fn = 0, tp = 0;  // proportions of the rows scored
  std::size_t rows = 0;

  double accuracy() const { return tp + tn; }
  double sensitivity() const { return tp + fn > 0 ? tp / (tp + fn) : std::numeric_limits<double>::quiet_NaN(); }
  double specificity() const { return tn + fp > 0 ? tn / (tn + fp) : std::numeric_limits<double>::quiet_NaN(); }
};

// Predicts positive when score > threshold.
inline Confusion confusion_from_scores(const std::vector<double>& scores, const std::vector<int>& labels, double threshold) {
  if (scores.size() != labels.size()) throw DataError("score and label counts differ");
  if (scores.empty()) throw DataError("no rows to score");
  std::size_t c[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < scores.size(); ++i) ++c[labels[i] ? 1 : 0][scores[i] > threshold ? 1 : 0];
  const double n = static_cast<double>(scores.size());
  Confusion m;
  m.rows = scores.size();
  m.tn = static_cast<double>(c[0][0]) / n;
  m.fp = static_cast<double>(c[0][1]) / n;
  m.fn = static_cast<double>(c[1][0]) / n;
  m.tp = static_cast<double>(c[1][1]) / n;
  return m;
}

// Mann-Whitney AUC; tied scores count one half.
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw DataError("score and label counts differ");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0, neg = 0, rank_sum = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (labels[idx[t]]) {
        rank_sum += avg_rank;
        ++pos;
      } else {
        ++neg;
      }
    i = j;
  }
  if (pos == 0 || neg == 0) throw DataError("AUC needs both positive and negative labels");
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
  double threshold = 0;  // predict positive when score >= threshold
};

inline std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw DataError("score and label counts differ");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double pos = 0, neg = 0;
  for (int l : labels) (l ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw DataError("ROC needs both positive and negative labels");
  std::vector<RocPoint> out{{0, 0, std::numeric_limits<double>::infinity()}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      (labels[idx[j]] ? tp : fp) += 1;
      ++j;
    }
    out.push_back({fp / neg, tp / pos, scores[idx[i]]});
    i = j;
  }
  return out;
}

struct FoldResult {
  std::size_t fold = 0;
  bool skipped = false;
  std::string note;
  double threshold = 0;
  Confusion confusion;
  std::optional<double> auc;
};

struct PredictionReport {
  std::string target;
  std::vector<FoldResult> folds;
  double threshold = 0;  // mean over scored folds
  Confusion confusion;   // mean proportions over scored folds
  double accuracy = 0, sensitivity = 0, specificity = 0;
  std::optional<double> auc;
  std::vector<RocPoint> roc;  // pooled over folds
  std::vector<std::string> flags;
};

// P(target = positive | every other variable of the row) for each test row.
// With all other variables observed, the Markov blanket factorisation is the
// exact posterior.
inline std::vector<double> predict(const DiscreteBayesNet& net, const CategoricalDataset& test, std::string_view target) {
  test.require_complete("prediction");
  const int t = net.index_of(target);
  const int pos = detail::positive_state(net.variable(t));
  std::vector<int> col(net.size());
  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    auto v = test.find(net.variable(i).name);
    if (!v) throw DataError("test data lacks variable '" + net.variable(i).name + "'");
    if (test.variable(static_cast<std::size_t>(*v)).states != net.variable(i).states)
      throw DataError("state list of '" + net.variable(i).name + "' differs between data and network");
    col[static_cast<std::size_t>(i)] = *v;
  }
  std::vector<double> scores(test.rows());
  std::vector<int> row(net.size());
  for (std::size_t r = 0; r < test.rows(); ++r) {
    for (std::size_t i = 0; i < net.size(); ++i) row[i] = test.at(r, static_cast<std::size_t>(col[i]));
    scores[r] = posterior_given_all(net, t, row)[static_cast<std::size_t>(pos)];
  }
  return scores;
}

inline std::vector<int> labels_of(const CategoricalDataset& d, std::string_view target) {
  int pos = 1;
  const int v = detail::binary_variable(d, target, pos);
  std::vector<int> out;
  for (auto x : d.column(static_cast<std::size_t>(v))) out.push_back(x == pos ? 1 : 0);
  return out;
}

inline FoldResult classify_and_score(const DiscreteBayesNet& net, const CategoricalDataset& test, std::string_view target,
                                     double threshold) {
  auto scores = predict(net, test, target);
  auto labels = labels_of(test, target);
  FoldResult f;
  f.threshold = threshold;
  f.confusion = confusion_from_scores(scores, labels, threshold);
  if (f.confusion.tp + f.confusion.fn > 0 && f.confusion.tn + f.confusion.fp > 0) f.auc = roc_auc(scores, labels);
  return f;
}

// k-fold cross validation of a fixed structure: per fold, fit on the
// training rows, threshold at the training prevalence, score the test rows.
inline PredictionReport cross_validate(const Dag& g, const CategoricalDataset& d, const std::string& target,
                                       std::size_t k = 10, std::uint64_t seed = 0, double smoothing = 1.0) {
  d.require_complete("cross validation");
  if (!(smoothing > 0)) throw DataError("prediction needs a positive smoothing pseudo-count");
  auto folds = kfold_indices(d.rows(), k, seed);
  struct Out {
    FoldResult result;
    std::vector<double> scores;
    std::vector<int> labels;
  };
  std::vector<std::future<Out>> jobs;
  for (std::size_t i = 0; i < folds.size(); ++i)
    jobs.push_back(std::async(std::launch::async, [&, i] {
      Out o;
      o.result.fold = i;
      auto train = d.subset(folds[i].train);
      auto test = d.subset(folds[i].test);
      double thr = threshold_from_prevalence(train, target);
      if (thr <= 0 || thr >= 1) {
        o.result.skipped = true;
        o.result.note = "training target has a single class";
        return o;
      }
      auto net = fit(g, train, smoothing);
      o.scores = predict(net, test, target);
      o.labels = labels_of(test, target);
      o.result.threshold = thr;
      o.result.confusion = confusion_from_scores(o.scores, o.labels, thr);
      const auto& c = o.result.confusion;
      if (c.tp + c.fn > 0 && c.tn + c.fp > 0) o.result.auc = roc_auc(o.scores, o.labels);
      return o;
    }));

  PredictionReport rep;
  rep.target = target;
  std::vector<double> pooled_scores;
  std::vector<int> pooled_labels;
  double n_scored = 0, n_auc = 0, n_sens = 0, n_spec = 0, auc_sum = 0;
  for (auto& j : jobs) {
    auto o = j.get();
    const auto& f = o.result;
    if (f.skipped) {
      rep.flags.push_back("fold " + std::to_string(f.fold) + " skipped: " + f.note);
    } else {
      n_scored += 1;
      rep.threshold += f.threshold;
      rep.confusion.tn += f.confusion.tn;
      rep.confusion.fp += f.confusion.fp;
      rep.confusion.fn += f.confusion.fn;
      rep.confusion.tp += f.confusion.tp;
      rep.confusion.rows += f.confusion.rows;
      rep.accuracy += f.confusion.accuracy();
      if (!std::isnan(f.confusion.sensitivity())) {
        rep.sensitivity += f.confusion.sensitivity();
        n_sens += 1;
      }
      if (!std::isnan(f.confusion.specificity())) {
        rep.specificity += f.confusion.specificity();
        n_spec += 1;
      }
      if (f.auc) {
        auc_sum += *f.auc;
        n_auc += 1;
      }
      pooled_scores.insert(pooled_scores.end(), o.scores.begin(), o.scores.end());
      pooled_labels.insert(pooled_labels.end(), o.labels.begin(), o.labels.end());
    }
    rep.folds.push_back(f);
  }
  if (n_scored == 0) throw DataError("every fold was skipped");
  rep.threshold /= n_scored;
  rep.confusion.tn /= n_scored;
  rep.confusion.fp /= n_scored;
  rep.confusion.fn /= n_scored;
  rep.confusion.tp /= n_scored;
  rep.accuracy /= n_scored;
  rep.sensitivity = n_sens ? rep.sensitivity / n_sens : std::numeric_limits<double>::quiet_NaN();
  rep.specificity = n_spec ? rep.specificity / n_spec : std::numeric_limits<double>::quiet_NaN();
  if (n_auc) rep.auc = auc_sum / n_auc;
  if (std::count(pooled_labels.begin(), pooled_labels.end(), 1) > 0 &&
      std::count(pooled_labels.begin(), pooled_labels.end(), 0) > 0)
    rep.roc = roc_curve(pooled_scores, pooled_labels);
  return rep;
}

namespace detail {

inline nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const Confusion& c) {
  return {{"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}, {"tp", c.tp}, {"rows", c.rows}};
}

}  // namespace detail

inline nlohmann::json to_json(const PredictionReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    nlohmann::json jf{{"fold", f.fold}, {"skipped", f.skipped}};
    if (f.skipped) {
      jf["note"] = f.note;
    } else {
      jf["threshold"] = f.threshold;
      jf["confusion"] = detail::to_json(f.confusion);
      jf["accuracy"] = detail::number(f.confusion.accuracy());
      jf["sensitivity"] = detail::number(f.confusion.sensitivity());
      jf["specificity"] = detail::number(f.confusion.specificity());
      jf["auc"] = f.auc ? nlohmann::json(*f.auc) : nlohmann::json(nullptr);
    }
    folds.push_back(std::move(jf));
  }
  return {{"target", r.target},
          {"threshold", r.threshold},
          {"confusion", detail::to_json(r.confusion)},
          {"accuracy", detail::number(r.accuracy)},
          {"sensitivity", detail::number(r.sensitivity)},
          {"specificity", detail::number(r.specificity)},
          {"auc", r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr)},
          {"folds", folds},
          {"flags", r.flags}};
}

inline std::string roc_csv(const std::vector<RocPoint>& points) {
  std::ostringstream out;
  out.precision(12);
  out << "fpr,tpr,threshold\n";
  for (const auto& p : points) {
    out << p.fpr << ',' << p.tpr << ',';
    if (std::isinf(p.threshold))
      out << "inf";
    else
      out << p.threshold;
    out << '\n';
  }
  return out.str();
}

}  // namespace causalbn

#include "fsel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsel/criteria.hpp"
#include "fsel/errors.hpp"
#include "fsel/rng.hpp"

namespace fsel::eval {

namespace {

double logistic(double z) { return 0.5 * (1.0 + std::tanh(0.5 * z)); }

}  // namespace

int LinearModel::predict(const DataTable& data, std::size_t row) const {
  int best = -1;
  double best_score = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    if (!present[c]) continue;
    double z = bias[c];
    for (std::size_t j = 0; j < features.size(); ++j)
      z += weights[c][j] * (data.columns[features[j]][row] - mean[j]) / scale[j];
    if (best < 0 || z > best_score) best = static_cast<int>(c), best_score = z;
  }
  return best;
}

LinearModel train_linear(const DataTable& data, const std::vector<std::size_t>& rows,
                         const std::vector<int>& features, const LinearConfig& config) {
  const int L = data.n_classes();
  const std::size_t d = features.size(), n = rows.size();
  if (n == 0) throw DataError("empty training split");
  LinearModel m;
  m.features = features;
  m.present.assign(L, 0);
  for (auto r : rows) m.present[data.labels[r]] = 1;
  if (std::count(m.present.begin(), m.present.end(), 1) < 2)
    throw DataError("training split has a single class");

  // Standardized design, row-major.
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 1.0);
  std::vector<double> X(n * d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& col = data.columns[features[j]];
    double mu = 0.0, var = 0.0;
    for (auto r : rows) mu += col[r];
    mu /= n;
    for (auto r : rows) var += (col[r] - mu) * (col[r] - mu);
    var /= n;
    m.mean[j] = mu;
    m.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    for (std::size_t i = 0; i < n; ++i) X[i * d + j] = (col[rows[i]] - mu) / m.scale[j];
  }

  m.weights.assign(L, std::vector<double>(d, 0.0));
  m.bias.assign(L, 0.0);
  std::vector<double> grad(d);
  for (int c = 0; c < L; ++c) {
    if (!m.present[c]) continue;
    auto& w = m.weights[c];
    double& b = m.bias[c];
    for (int e = 0; e < config.epochs; ++e) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double gb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* x = &X[i * d];
        double z = b;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
        double r = logistic(z) - (data.labels[rows[i]] == c ? 1.0 : 0.0);
        for (std::size_t j = 0; j < d; ++j) grad[j] += r * x[j];
        gb += r;
      }
      for (std::size_t j = 0; j < d; ++j) w[j] -= config.learning_rate * (grad[j] / n + config.lambda * w[j]);
      b -= config.learning_rate * gb / n;
    }
  }
  return m;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least two folds");
  const int L = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<std::size_t>> by_class(L);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  auto rng = named_stream(seed, "cv-folds");
  std::vector<int> fold(labels.size(), 0);
  std::size_t next = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto i : members) fold[i] = static_cast<int>(next++ % folds);
  }
  return fold;
}

CvResult cross_validate(const DataTable& data, const std::vector<int>& features,
                        const CvProtocol& protocol) {
  if (features.empty()) throw ConfigError("cross-validation needs at least one feature");
  const std::size_t n = data.n_samples();
  CvResult res;
  std::vector<int> fold;
  int K = protocol.folds;
  if (protocol.loo_below_100 && n < 100) {
    K = static_cast<int>(n);
    fold.resize(n);
    std::iota(fold.begin(), fold.end(), 0);
  } else {
    fold = stratified_folds(data.labels, K, protocol.seed);
  }
  res.predictions.assign(n, -1);
  double err_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (fold[i] == k ? test : train).push_back(i);
    if (test.empty()) continue;
    LinearModel m = train_linear(data, train, features, protocol.linear);
    std::size_t wrong = 0;
    for (auto i : test) {
      res.predictions[i] = m.predict(data, i);
      wrong += res.predictions[i] != data.labels[i];
    }
    err_sum += 100.0 * static_cast<double>(wrong) / static_cast<double>(test.size());
    ++res.folds_used;
  }
  res.error_pct = err_sum / res.folds_used;
  return res;
}

double rae(const std::vector<double>& predicted, const std::vector<double>& actual) {
  if (predicted.size() != actual.size() || actual.empty()) throw DataError("RAE length mismatch");
  double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / actual.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    num += std::abs(predicted[i] - actual[i]);
    den += std::abs(mean - actual[i]);
  }
  if (!(den > 0.0)) throw DataError("RAE undefined for constant labels");
  return num / den;
}

double rae(const std::vector<int>& predicted, const std::vector<int>& actual) {
  return rae(std::vector<double>(predicted.begin(), predicted.end()),
             std::vector<double>(actual.begin(), actual.end()));
}

double arae(const std::vector<double>& rae_values) {
  if (rae_values.empty()) throw ConfigError("ARAE needs at least one classifier");
  return std::accumulate(rae_values.begin(), rae_values.end(), 0.0) / rae_values.size();
}

double global_mi_plugin(const DiscretizedView& view, const std::vector<int>& features,
                        const std::vector<int>& labels, info::LogBase base) {
  if (features.empty()) return 0.0;
  if (features.size() > 16) throw ConfigError("plug-in global MI is capped at 16 features");
  info::Cols cols;
  for (int f : features) cols.push_back(view.codes[f]);
  return info::mutual_information(cols, {labels}, base);
}

double global_mi_ica(hofs::Engine& engine, const std::vector<int>& features) {
  auto p = hofs::partition_in_order(engine, features);
  double total = 0.0;
  for (const auto& s : p.subsets) total += hofs::subset_information(engine, s);
  return total;
}

std::vector<double> information_gain_curve(hofs::Engine& engine, const hofs::SelectionTrace& trace) {
  if (trace.steps.empty()) throw ConfigError("empty selection trace");
  hofs::SubsetPartition p;
  std::vector<double> per_subset, gains;
  double previous = 0.0;
  for (const auto& step : trace.steps) {
    p.selection_order.push_back(step.chosen);
    if (step.created_new_subset) {
      p.subsets.push_back(engine.singleton(step.chosen));
      per_subset.push_back(0.0);
    } else {
      hofs::Subset grown = engine.extension(p.subsets.at(step.subset_index), step.chosen);
      p.subsets[step.subset_index] = std::move(grown);
    }
    per_subset[step.subset_index] = hofs::subset_information(engine, p.subsets[step.subset_index]);
    double total = std::accumulate(per_subset.begin(), per_subset.end(), 0.0);
    gains.push_back(total - previous);
    previous = total;
  }
  return gains;
}

std::vector<int> default_ks(std::size_t n_features) {
  std::vector<int> ks;
  const int M = static_cast<int>(n_features);
  if (M < 10) {
    for (int k = 1; k <= M; ++k) ks.push_back(k);
  } else {
    for (int k = 10; k <= std::min(100, M); k += 10) ks.push_back(k);
  }
  return ks;
}

EvalReport run_bench(const DataTable& data, const BenchConfig& config) {
  if (config.methods.empty()) throw ConfigError("no methods to benchmark");
  std::vector<int> ks = config.ks.empty() ? default_ks(data.n_features()) : config.ks;
  for (int k : ks)
    if (k < 1 || k > static_cast<int>(data.n_features())) throw ConfigError("k out of range");
  const int T = *std::max_element(ks.begin(), ks.end());

  hofs::HofsConfig hc = config.hofs;
  hc.T = T;
  hofs::Engine engine(data, hc);
  EvalReport report;
  for (const auto& name : config.methods) {
    MethodReport mr;
    mr.method = name;
    hofs::SelectionTrace trace;
    if (name == "hofs") {
      hofs::Engine run_engine(data, hc);
      auto result = run_engine.run();
      trace = std::move(result.second);
      mr.order = result.first.selection_order;
      mr.gains = information_gain_curve(run_engine, trace);
    } else {
      crit::Criterion c{crit::parse_kind(name), config.mifs_beta};
      mr.order = crit::select_greedy(c, engine.view(), data.labels, T, hc.base).order;
    }
    std::vector<double> raes;
    for (int k : ks) {
      std::vector<int> top(mr.order.begin(), mr.order.begin() + k);
      auto cv = cross_validate(data, top, config.protocol);
      mr.ks.push_back(k);
      mr.error_pct.push_back(cv.error_pct);
      raes.push_back(rae(cv.predictions, data.labels));
      if (k <= 16)
        mr.global_mi_plugin.push_back(global_mi_plugin(engine.view(), top, data.labels, hc.base));
      else
        mr.global_mi_plugin.push_back(std::nullopt);
      mr.global_mi_ica.push_back(global_mi_ica(engine, top));
    }
    mr.average_error = std::accumulate(mr.error_pct.begin(), mr.error_pct.end(), 0.0) / mr.error_pct.size();
    mr.arae = arae(raes);
    report.methods.push_back(std::move(mr));
  }
  return report;
}

}  // namespace fsel::eval

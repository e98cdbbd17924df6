#include "fsel/hofs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "fsel/errors.hpp"
#include "fsel/rng.hpp"

namespace fsel::hofs {

namespace {

constexpr int kLabelId = -1;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Returns null when the column has no spread.
ica::Column standardized(std::vector<double> v, double* sd_out) {
  const double n = static_cast<double>(v.size());
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  if (!(var > 1e-24)) return nullptr;
  double sd = std::sqrt(var);
  for (double& x : v) x = (x - mean) / sd;
  // Re-centre once more so rounding stays far inside the standardization check.
  double m2 = std::accumulate(v.begin(), v.end(), 0.0) / n;
  for (double& x : v) x -= m2;
  if (sd_out) *sd_out = sd;
  return std::make_shared<const std::vector<double>>(std::move(v));
}

ica::Column dithered(const std::vector<int>& codes, std::uint64_t seed, const std::string& stream,
                     double* log_delta) {
  *log_delta = 0.0;
  if (codes.empty() || std::all_of(codes.begin(), codes.end(), [&](int c) { return c == codes[0]; }))
    return nullptr;
  auto rng = named_stream(seed, stream);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> v(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) v[i] = codes[i] + u(rng);
  double sd = 1.0;
  auto col = standardized(std::move(v), &sd);
  *log_delta = col ? -std::log(sd) : 0.0;
  return col;
}

std::vector<double> padded_parent(const ica::IcaModel& label_model) {
  std::vector<double> row = label_model.W.back();
  row.insert(row.end() - 1, 0.0);
  return row;
}

}  // namespace

Composition parse_composition(const std::string& s) {
  if (s == "assigned") return Composition::assigned;
  if (s == "literal") return Composition::literal;
  if (s == "mean") return Composition::mean;
  throw ConfigError("unknown score composition: " + s);
}

const char* to_string(Composition c) {
  switch (c) {
    case Composition::assigned: return "assigned";
    case Composition::literal: return "literal";
    case Composition::mean: return "mean";
  }
  return "?";
}

void HofsConfig::validate(std::size_t n_features, std::size_t n_samples) const {
  if (T < 1 || static_cast<std::size_t>(T) > n_features)
    throw ConfigError("T must lie in [1, M]");
  if (!(C >= 0.0 && C <= 1.0)) throw ConfigError("C must lie in [0, 1]");
  if (bins < 2) throw ConfigError("bin count must be at least 2");
  ica.validate(n_samples);
}

SignalSpace SignalSpace::build(const DataTable& data, std::uint64_t seed) {
  SignalSpace s;
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    double ld = 0.0;
    ica::Column col;
    if (data.feature_kinds[j] == FeatureKind::categorical) {
      auto codes = discretize_column(data.columns[j], FeatureKind::categorical, 2,
                                     BinScheme::equal_frequency);
      col = dithered(codes, seed, "dither:" + data.feature_names[j], &ld);
    } else {
      col = standardized(data.columns[j], nullptr);
    }
    s.columns.push_back(std::move(col));
    s.log_delta.push_back(ld);
  }
  s.label = dithered(data.labels, seed, "dither:label", &s.label_log_delta);
  return s;
}

void SubsetPartition::check_invariants() const {
  std::set<int> seen;
  std::size_t total = 0;
  for (const auto& s : subsets) {
    if (s.feature_ids.empty()) throw NumericError("empty subset in partition");
    if (!s.degenerate && s.model.feature_ids != s.feature_ids)
      throw NumericError("subset model does not match its features");
    for (int f : s.feature_ids)
      if (!seen.insert(f).second) throw NumericError("subsets are not disjoint");
    total += s.feature_ids.size();
  }
  std::set<int> order(selection_order.begin(), selection_order.end());
  if (order != seen || total != selection_order.size())
    throw NumericError("partition does not cover the selection order");
  if (K() > selection_order.size()) throw NumericError("more subsets than features");
}

Engine::Engine(const DataTable& data, HofsConfig config)
    : data_(data), config_(std::move(config)) {
  config_.validate(data.n_features(), data.n_samples());
  view_ = discretize(data, config_.bins, config_.scheme);
  signals_ = SignalSpace::build(data, config_.seed);
  if (signals_.label)
    empty_label_ = ica::append_min_entropy({}, signals_.label, kLabelId, signals_.label_log_delta,
                                           config_.ica);
}

double Engine::relevance(int i) {
  if (auto it = relevance_.find(i); it != relevance_.end()) return it->second;
  double v = info::mutual_information({view_.codes[i]}, {data_.labels}, config_.base);
  relevance_[i] = v;
  return v;
}

double Engine::plugin_conditional_label(int i) {
  if (auto it = cond_label_.find(i); it != cond_label_.end()) return it->second;
  double v = info::conditional_entropy({data_.labels}, {view_.codes[i]}, config_.base);
  cond_label_[i] = v;
  return v;
}

double Engine::correlation(int i, int j) {
  auto key = std::minmax(i, j);
  if (auto it = corr_.find(key); it != corr_.end()) return it->second;
  double v = ica::pearson(data_.columns[i], data_.columns[j]);
  corr_[key] = v;
  return v;
}

double Engine::label_entropy_given(const Subset& s) const {
  if (!signals_.label) return 0.0;
  const ica::IcaModel& m = s.feature_ids.empty() ? empty_label_ : s.label_model;
  return info::to_base(ica::conditional_entropy_last(m), config_.base);
}

Assignment Engine::argcov(const SubsetPartition& p, int candidate) {
  Assignment a;
  a.maxcov = kNegInf;
  for (std::size_t k = 0; k < p.subsets.size(); ++k) {
    double acc = 0.0;
    for (int u : p.subsets[k].feature_ids) {
      double c = correlation(candidate, u);
      acc += config_.abs_corr ? std::abs(c) : c;
    }
    acc /= static_cast<double>(p.subsets[k].feature_ids.size());
    if (acc > a.maxcov) a.maxcov = acc, a.argcov_index = static_cast<int>(k);
  }
  if (a.argcov_index < 0) a.maxcov = 0.0;
  a.joins = a.argcov_index >= 0 && a.maxcov > config_.C && signals_.columns[candidate] &&
            !p.subsets[a.argcov_index].degenerate;
  return a;
}

Subset Engine::singleton(int feature) {
  Subset s;
  s.feature_ids = {feature};
  const auto& col = signals_.columns[feature];
  if (!col) {
    s.degenerate = true;
    return s;
  }
  s.model = ica::append_feature({}, col, feature, signals_.log_delta[feature], config_.ica);
  if (signals_.label)
    s.label_model = ica::append_min_entropy(s.model, signals_.label, kLabelId,
                                            signals_.label_log_delta, config_.ica,
                                            {padded_parent(empty_label_)});
  s.anchor = relevance(feature) + label_entropy_given(s);
  return s;
}

const Subset& Engine::extension(const Subset& s, int feature) {
  auto& slot = ext_[s.feature_ids][feature];
  if (slot) return *slot;
  auto e = std::make_unique<Subset>(s);
  e->feature_ids.push_back(feature);
  e->model = ica::append_feature(s.model, signals_.columns[feature], feature,
                                 signals_.log_delta[feature], config_.ica);
  if (signals_.label)
    e->label_model = ica::append_min_entropy(e->model, signals_.label, kLabelId,
                                             signals_.label_log_delta, config_.ica,
                                             {padded_parent(s.label_model)});
  slot = std::move(e);
  return *slot;
}

void Engine::forget_extensions_except(const SubsetPartition& p) {
  std::set<std::vector<int>> live;
  for (const auto& s : p.subsets) live.insert(s.feature_ids);
  for (auto it = ext_.begin(); it != ext_.end();)
    it = live.count(it->first) ? std::next(it) : ext_.erase(it);
}

double Engine::subset_conditional_score(const Subset& s, int candidate) {
  if (!signals_.label) return 0.0;
  if (!signals_.columns[candidate] || s.degenerate) return kNegInf;
  return plugin_conditional_label(candidate) - label_entropy_given(extension(s, candidate));
}

double Engine::hofs_score(int candidate, const SubsetPartition& p) {
  if (!signals_.columns[candidate]) return kNegInf;
  const double rel = relevance(candidate);
  if (p.subsets.empty()) return rel;
  if (config_.composition == Composition::assigned) {
    Assignment a = argcov(p, candidate);
    if (!a.joins) return rel;
    const Subset& s = p.subsets[a.argcov_index];
    if (!signals_.label) return 0.0;
    return label_entropy_given(s) - label_entropy_given(extension(s, candidate));
  }
  double acc = 0.0;
  std::size_t used = 0;
  for (const auto& s : p.subsets) {
    if (s.degenerate) continue;
    acc += subset_conditional_score(s, candidate);
    ++used;
  }
  if (config_.composition == Composition::mean && used) acc /= static_cast<double>(used);
  return rel + acc;
}

std::pair<int, bool> Engine::assign_subset(SubsetPartition& p, int chosen) {
  if (std::find(p.selection_order.begin(), p.selection_order.end(), chosen) !=
      p.selection_order.end())
    throw ConfigError("feature already in partition");
  Assignment a = argcov(p, chosen);
  p.selection_order.push_back(chosen);
  if (a.joins) {
    Subset grown = extension(p.subsets[a.argcov_index], chosen);
    p.subsets[a.argcov_index] = std::move(grown);
    forget_extensions_except(p);
    return {a.argcov_index, false};
  }
  p.subsets.push_back(singleton(chosen));
  return {static_cast<int>(p.subsets.size()) - 1, true};
}

std::pair<SubsetPartition, SelectionTrace> Engine::run() {
  const int M = static_cast<int>(data_.n_features());
  SubsetPartition p;
  SelectionTrace trace;
  std::vector<char> taken(M, 0);
  for (int t = 0; t < config_.T; ++t) {
    StepRecord rec;
    rec.t = t + 1;
    for (int x = 0; x < M; ++x) {
      if (taken[x]) continue;
      double s = hofs_score(x, p);
      rec.candidate_scores[x] = s;
      if (rec.chosen < 0 || s > rec.score) rec.chosen = x, rec.score = s;
    }
    const int x = rec.chosen;
    rec.relevance = relevance(x);
    for (const auto& s : p.subsets) rec.subset_terms.push_back(subset_conditional_score(s, x));
    Assignment a = argcov(p, x);
    rec.maxcov = a.maxcov;
    rec.argcov_index = a.argcov_index;
    auto [idx, created] = assign_subset(p, x);
    rec.subset_index = idx;
    rec.created_new_subset = created;
    taken[x] = 1;
    p.check_invariants();
    trace.steps.push_back(std::move(rec));
  }
  return {std::move(p), std::move(trace)};
}

std::pair<SubsetPartition, SelectionTrace> run_hofs(const DataTable& data, const HofsConfig& config) {
  Engine e(data, config);
  return e.run();
}

SubsetPartition partition_in_order(Engine& engine, const std::vector<int>& order) {
  SubsetPartition p;
  for (int f : order) engine.assign_subset(p, f);
  return p;
}

double subset_information(const Engine& engine, const Subset& s) {
  if (s.degenerate) return 0.0;
  return s.anchor - engine.label_entropy_given(s);
}

BalanceReport r_balance(const Engine& engine, const SubsetPartition& p) {
  BalanceReport r;
  const auto& view = engine.view();
  const auto& labels = engine.data().labels;
  const auto base = engine.config().base;
  double acc = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < p.subsets.size(); ++k) {
    const Subset& s = p.subsets[k];
    r.per_subset.push_back(std::numeric_limits<double>::quiet_NaN());
    if (s.degenerate) {
      r.warnings.push_back("subset " + std::to_string(k) + ": constant feature, excluded");
      continue;
    }
    info::Cols cols;
    for (int f : s.feature_ids) cols.push_back(view.codes[f]);
    double num = info::conditional_entropy({labels}, cols, base);
    double den = engine.label_entropy_given(s);
    if (!(std::abs(den) > 1e-12) || !std::isfinite(den)) {
      r.warnings.push_back("subset " + std::to_string(k) + ": zero denominator, excluded");
      continue;
    }
    r.per_subset.back() = num / den;
    acc += num / den;
    ++used;
  }
  r.mean = used ? acc / used : std::numeric_limits<double>::quiet_NaN();
  return r;
}

PearsonReport pearson_diagnostic(const SubsetPartition& p) {
  PearsonReport r;
  double acc = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < p.subsets.size(); ++k) {
    const Subset& s = p.subsets[k];
    double v = s.degenerate ? 0.0 : ica::avg_pearson(s.model);
    r.per_subset.push_back(v);
    if (s.degenerate || s.model.dim() < 2) {
      r.notes.push_back("subset " + std::to_string(k) + ": d<2, reported as 0");
      continue;
    }
    acc += v;
    ++used;
  }
  r.overall = used ? acc / used : 0.0;
  return r;
}

}  // namespace fsel::hofs

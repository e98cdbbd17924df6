#include "fsel/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsel/errors.hpp"

namespace fsel {

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

namespace report {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> names(const std::vector<int>& ids, const DataTable& data) {
  std::vector<std::string> out;
  for (int i : ids) out.push_back(data.feature_names.at(i));
  return out;
}

}  // namespace

json to_json(const LoadReport& r) {
  json kinds = json::array();
  for (auto k : r.kinds) kinds.push_back(to_string(k));
  return {{"rows_read", r.rows_read},
          {"rows_dropped", r.rows_dropped},
          {"cells_imputed", r.cells_imputed},
          {"kinds", kinds}};
}

json to_json(const ica::IcaConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"convergence_tol", c.convergence_tol},
          {"rng_seed", c.rng_seed},
          {"solver", c.solver == ica::RowSolver::newton ? "newton" : "sgd"}};
}

json to_json(const hofs::HofsConfig& c) {
  return {{"T", c.T},
          {"C", c.C},
          {"abs_corr", c.abs_corr},
          {"composition", hofs::to_string(c.composition)},
          {"bins", c.bins},
          {"scheme", to_string(c.scheme)},
          {"log_base", info::to_string(c.base)},
          {"seed", c.seed},
          {"ica", to_json(c.ica)}};
}

json partition_json(const hofs::SubsetPartition& p, const DataTable& data) {
  json subsets = json::array();
  for (const auto& s : p.subsets) {
    json w = json::array();
    for (const auto& row : s.label_model.W) {
      json r = json::array();
      for (double v : row) r.push_back(number(v));
      w.push_back(r);
    }
    subsets.push_back({{"features", names(s.feature_ids, data)},
                       {"degenerate", s.degenerate},
                       {"unmixing_with_label", w}});
  }
  return {{"K", p.K()}, {"selection_order", names(p.selection_order, data)}, {"subsets", subsets}};
}

json trace_json(const hofs::SelectionTrace& t, const DataTable& data) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json cands = json::object();
    for (auto& [f, v] : s.candidate_scores) cands[data.feature_names.at(f)] = number(v);
    json terms = json::array();
    for (double v : s.subset_terms) terms.push_back(number(v));
    steps.push_back({{"t", s.t},
                     {"chosen", data.feature_names.at(s.chosen)},
                     {"score", number(s.score)},
                     {"relevance", number(s.relevance)},
                     {"subset_terms", terms},
                     {"maxcov", number(s.maxcov)},
                     {"argcov_index", s.argcov_index},
                     {"created_new_subset", s.created_new_subset},
                     {"subset_index", s.subset_index},
                     {"candidate_scores", cands}});
  }
  return {{"steps", steps}};
}

json eval_json(const eval::EvalReport& r, const DataTable& data) {
  json methods = json::array();
  for (const auto& m : r.methods) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.ks.size(); ++i)
      rows.push_back({{"k", m.ks[i]},
                      {"error_pct", number(m.error_pct[i])},
                      {"global_mi_plugin", m.global_mi_plugin[i] ? number(*m.global_mi_plugin[i]) : json(nullptr)},
                      {"global_mi_ica", number(m.global_mi_ica[i])}});
    json gains = json::array();
    for (double g : m.gains) gains.push_back(number(g));
    methods.push_back({{"method", m.method},
                       {"order", names(m.order, data)},
                       {"per_k", rows},
                       {"average_error_pct", number(m.average_error)},
                       {"arae", number(m.arae)},
                       {"information_gain", gains}});
  }
  return {{"methods", methods}};
}

std::string eval_csv(const eval::EvalReport& r) {
  std::ostringstream out;
  out << "method,k,error_pct,global_mi_plugin,global_mi_ica,average_error_pct,arae\n";
  auto num = [](double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
  };
  for (const auto& m : r.methods)
    for (std::size_t i = 0; i < m.ks.size(); ++i)
      out << m.method << ',' << m.ks[i] << ',' << num(m.error_pct[i]) << ','
          << (m.global_mi_plugin[i] ? num(*m.global_mi_plugin[i]) : std::string()) << ','
          << num(m.global_mi_ica[i]) << ',' << num(m.average_error) << ',' << num(m.arae) << '\n';
  return out.str();
}

std::string features_csv(const std::vector<int>& order, const std::vector<double>& scores,
                         const DataTable& data) {
  std::ostringstream out;
  out.precision(12);
  out << "rank,feature,index,score\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    out << i + 1 << ',' << data.feature_names.at(order[i]) << ',' << order[i] << ',';
    if (i < scores.size() && std::isfinite(scores[i])) out << scores[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace report
}  // namespace fsel

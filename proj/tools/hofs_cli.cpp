// hofs: feature selection runs, benchmarks, synthetic data and ICA diagnostics.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 bad configuration, 3 data error, 4 numeric failure.
// Environment: HOFS_OUT_DIR overrides the default output directory; HOFS_THREADS is
// recorded in the config echo (all commands run single-threaded).

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "fsel/criteria.hpp"
#include "fsel/errors.hpp"
#include "fsel/eval.hpp"
#include "fsel/hofs.hpp"
#include "fsel/report.hpp"
#include "fsel/synth.hpp"

using namespace fsel;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  // data
  std::string data_path, label, delimiter = ",", missing = "drop";
  bool no_header = false;
  // selection
  std::string method = "hofs", composition = "assigned", scheme = "equal_frequency", base = "nats";
  std::string solver = "newton";
  int T = 10, bins = 5;
  double C = 0.3, beta = 1.0;
  bool abs_corr = false;
  std::uint64_t seed = 7;
  double ica_lr = 0.01;
  std::size_t ica_batch = 256;
  int ica_epochs = 200;
  double ica_tol = 1e-5;
  // synth
  std::string synth_kind;
  std::size_t n = 100000;
  std::vector<double> weights{1.0, 0.65, 0.42};
  double resample_prob = 0.7;
  // bench
  std::string methods = "mim,mrmr,jmi,cmim,speccmi,hofs";
  std::vector<int> ks;
  int folds = 10;
  std::string out;
  std::string csv_out;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

CsvOptions csv_options(const Options& o) {
  CsvOptions c;
  c.label_column = o.label;
  if (o.delimiter.size() != 1) throw ConfigError("delimiter must be one character");
  c.delimiter = o.delimiter == "\\t" ? '\t' : o.delimiter[0];
  c.has_header = !o.no_header;
  if (o.missing == "drop") c.missing = MissingPolicy::drop;
  else if (o.missing == "impute") c.missing = MissingPolicy::impute;
  else if (o.missing == "reject") c.missing = MissingPolicy::reject;
  else throw ConfigError("unknown missing policy: " + o.missing);
  return c;
}

hofs::HofsConfig hofs_config(const Options& o, std::size_t M) {
  hofs::HofsConfig h;
  h.T = std::min<int>(o.T, static_cast<int>(M));
  if (o.T < 1) throw ConfigError("T must be at least 1");
  h.C = o.C;
  h.abs_corr = o.abs_corr;
  h.composition = hofs::parse_composition(o.composition);
  h.bins = o.bins;
  h.scheme = parse_bin_scheme(o.scheme);
  h.base = info::parse_log_base(o.base);
  h.seed = o.seed;
  h.ica.learning_rate = o.ica_lr;
  h.ica.batch_size = o.ica_batch;
  h.ica.max_epochs = o.ica_epochs;
  h.ica.convergence_tol = o.ica_tol;
  h.ica.rng_seed = o.seed;
  if (o.solver == "newton") h.ica.solver = ica::RowSolver::newton;
  else if (o.solver == "sgd") h.ica.solver = ica::RowSolver::sgd;
  else throw ConfigError("unknown ICA solver: " + o.solver);
  return h;
}

DataTable load_data(const Options& o) {
  if (!o.synth_kind.empty()) {
    if (o.synth_kind == "tree") {
      synth::TreeModelSpec s;
      s.n_samples = o.n;
      s.seed = o.seed;
      if (o.weights.size() != 3) throw ConfigError("tree model takes three weights");
      s.root_edge_weights = {o.weights[0], o.weights[1], o.weights[2]};
      return synth::gen_tree(s);
    }
    if (o.synth_kind == "hetero") {
      synth::HeteroModelSpec s;
      s.seed = o.seed;
      s.resample_prob = o.resample_prob;
      return synth::gen_hetero(s);
    }
    throw ConfigError("unknown synthetic model: " + o.synth_kind);
  }
  if (o.data_path.empty()) throw ConfigError("--data or --synth is required");
  return load_csv(o.data_path, csv_options(o));
}

json config_echo(const std::string& command, const Options& o) {
  json j = {{"command", command},
            {"version", kVersion},
            {"seed", o.seed},
            {"threads", env_or("HOFS_THREADS", "1")}};
  if (!o.synth_kind.empty()) {
    j["synth"] = {{"kind", o.synth_kind}, {"n", o.n}, {"weights", o.weights},
                  {"resample_prob", o.resample_prob}};
  } else {
    j["data"] = {{"path", o.data_path}, {"label", o.label}, {"delimiter", o.delimiter},
                 {"header", !o.no_header}, {"missing", o.missing}};
  }
  j["selection"] = {{"method", o.method}, {"T", o.T}, {"C", o.C}, {"abs_corr", o.abs_corr},
                    {"beta", o.beta}, {"bins", o.bins}, {"scheme", o.scheme},
                    {"log_base", o.base}, {"composition", o.composition},
                    {"ica", {{"solver", o.solver}, {"learning_rate", o.ica_lr},
                             {"batch_size", o.ica_batch}, {"max_epochs", o.ica_epochs},
                             {"convergence_tol", o.ica_tol}}}};
  if (command == "bench") j["bench"] = {{"methods", o.methods}, {"ks", o.ks}, {"folds", o.folds}};
  return j;
}

std::string out_dir(const Options& o) { return o.out.empty() ? env_or("HOFS_OUT_DIR", "out") : o.out; }

void write_json(const std::string& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

int cmd_select(const Options& o) {
  DataTable data = load_data(o);
  const std::string dir = out_dir(o);
  json cfg = config_echo("select", o);
  std::vector<int> order;
  std::vector<double> scores;
  json partition, trace;
  if (o.method == "hofs") {
    auto hc = hofs_config(o, data.n_features());
    auto [p, t] = hofs::run_hofs(data, hc);
    order = p.selection_order;
    for (auto& s : t.steps) scores.push_back(s.score);
    partition = report::partition_json(p, data);
    trace = report::trace_json(t, data);
  } else {
    auto hc = hofs_config(o, data.n_features());
    crit::Criterion c{crit::parse_kind(o.method), o.beta};
    auto view = discretize(data, hc.bins, hc.scheme);
    auto r = crit::select_greedy(c, view, data.labels, hc.T, hc.base, true);
    order = r.order;
    scores = r.scores;
    json names = json::array();
    for (int f : order) names.push_back(data.feature_names[f]);
    partition = {{"K", 0}, {"selection_order", names}, {"subsets", json::array()}};
    json steps = json::array();
    for (std::size_t t = 0; t < r.order.size(); ++t) {
      json cands = json::object();
      for (auto& [f, v] : r.per_step_candidates[t]) cands[data.feature_names[f]] = v;
      steps.push_back({{"t", t + 1}, {"chosen", data.feature_names[r.order[t]]},
                       {"score", r.scores[t]}, {"candidate_scores", cands}});
    }
    trace = {{"steps", steps}};
  }
  partition["config"] = cfg;
  partition["load_report"] = report::to_json(data.report);
  trace["config"] = cfg;
  write_json(dir + "/partition.json", partition);
  write_json(dir + "/trace.json", trace);
  write_file_atomic(dir + "/features.csv", report::features_csv(order, scores, data));
  std::cout << "selected:";
  for (int f : order) std::cout << ' ' << data.feature_names[f];
  std::cout << "\nwrote " << dir << "/{partition.json,trace.json,features.csv}\n";
  return 0;
}

int cmd_bench(const Options& o) {
  eval::BenchConfig b;
  std::stringstream ss(o.methods);
  for (std::string m; std::getline(ss, m, ',');)
    if (!m.empty()) b.methods.push_back(m);
  if (b.methods.empty()) throw ConfigError("empty method list");
  for (auto& m : b.methods)
    if (m != "hofs") crit::parse_kind(m);
  DataTable data = load_data(o);
  b.ks = o.ks;
  b.mifs_beta = o.beta;
  b.hofs = hofs_config(o, data.n_features());
  b.protocol.folds = o.folds;
  b.protocol.seed = o.seed;
  auto rep = eval::run_bench(data, b);
  const std::string dir = out_dir(o);
  json j = report::eval_json(rep, data);
  j["config"] = config_echo("bench", o);
  write_json(dir + "/report.json", j);
  write_file_atomic(dir + "/report.csv", report::eval_csv(rep));
  for (auto& m : rep.methods)
    std::cout << m.method << ": average error " << m.average_error << "%, ARAE " << m.arae << '\n';
  std::cout << "wrote " << dir << "/{report.json,report.csv}\n";
  return 0;
}

int cmd_synth(const Options& o) {
  DataTable data = load_data(o);
  std::string path = o.csv_out.empty() ? out_dir(o) + "/" + o.synth_kind + ".csv" : o.csv_out;
  write_csv(path, data);
  json echo = config_echo("synth", o);
  write_json(path + ".spec.json", echo);
  std::cout << "wrote " << path << " (" << data.n_samples() << " x " << data.n_features() + 1 << ")\n";
  return 0;
}

int cmd_diagnose(const Options& o) {
  DataTable data = load_data(o);
  auto hc = hofs_config(o, data.n_features());
  hofs::Engine engine(data, hc);
  auto [p, t] = engine.run();
  auto pr = hofs::pearson_diagnostic(p);
  auto rb = hofs::r_balance(engine, p);
  json subsets = json::array();
  for (std::size_t k = 0; k < p.subsets.size(); ++k) {
    json names = json::array();
    for (int f : p.subsets[k].feature_ids) names.push_back(data.feature_names[f]);
    subsets.push_back({{"features", names},
                       {"avg_pearson", pr.per_subset[k]},
                       {"r_balance", std::isfinite(rb.per_subset[k]) ? json(rb.per_subset[k]) : json(nullptr)}});
  }
  json j = {{"avg_pearson", pr.overall},
            {"avg_r_balance", std::isfinite(rb.mean) ? json(rb.mean) : json(nullptr)},
            {"subsets", subsets},
            {"notes", pr.notes},
            {"warnings", rb.warnings},
            {"config", config_echo("diagnose", o)}};
  const std::string dir = out_dir(o);
  write_json(dir + "/diagnostics.json", j);
  std::cout << "avg |Pearson| " << pr.overall << ", avg R_balance " << rb.mean << '\n'
            << "wrote " << dir << "/diagnostics.json\n";
  return 0;
}

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data_path, "input CSV");
  cmd->add_option("--label", o.label, "label column name (default: last column)");
  cmd->add_option("--delimiter", o.delimiter, "field delimiter");
  cmd->add_flag("--no-header", o.no_header, "first row is data");
  cmd->add_option("--missing", o.missing, "drop | impute | reject");
  cmd->add_option("--synth", o.synth_kind, "use a generator instead of --data: tree | hetero");
  cmd->add_option("-n", o.n, "samples for --synth tree");
  cmd->add_option("--weights", o.weights, "tree root edge weights")->expected(3);
}

void add_selection_options(CLI::App* cmd, Options& o) {
  cmd->add_option("-T", o.T, "features to select");
  cmd->add_option("--seed", o.seed, "top-level seed");
  cmd->add_option("--bins", o.bins, "bins per continuous feature");
  cmd->add_option("--scheme", o.scheme, "equal_frequency | equal_width");
  cmd->add_option("--base", o.base, "nats | bits");
  cmd->add_option("--C", o.C, "Argcov threshold");
  cmd->add_flag("--abs-corr", o.abs_corr, "Argcov on absolute correlation");
  cmd->add_option("--composition", o.composition, "assigned | literal | mean");
  cmd->add_option("--beta", o.beta, "MIFS penalty");
  cmd->add_option("--ica-solver", o.solver, "newton | sgd");
  cmd->add_option("--ica-lr", o.ica_lr, "SGD learning rate");
  cmd->add_option("--ica-batch", o.ica_batch, "SGD batch size");
  cmd->add_option("--ica-epochs", o.ica_epochs, "maximum epochs");
  cmd->add_option("--ica-tol", o.ica_tol, "relative log-likelihood tolerance");
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Higher order feature selection toolkit"};
  app.require_subcommand(0, 1);
  bool version = false, dump = false;
  app.add_flag("--version", version, "print version as JSON");
  app.add_flag("--config-dump", dump, "print the resolved configuration as JSON and exit");

  auto* select = app.add_subcommand("select", "run a feature selection method");
  add_data_options(select, o);
  add_selection_options(select, o);
  select->add_option("--method", o.method, "hofs | mim | mifs | jmi | mrmr | cmim | speccmi");

  auto* bench = app.add_subcommand("bench", "cross-validated comparison of methods");
  add_data_options(bench, o);
  add_selection_options(bench, o);
  bench->add_option("--methods", o.methods, "comma-separated method list");
  bench->add_option("--k", o.ks, "feature counts to evaluate");
  bench->add_option("--folds", o.folds, "cross-validation folds");

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("kind", o.synth_kind, "tree | hetero")->required();
  synth->add_option("-n", o.n, "samples (tree)");
  synth->add_option("--seed", o.seed, "seed");
  synth->add_option("--weights", o.weights, "tree root edge weights")->expected(3);
  synth->add_option("--resample-prob", o.resample_prob, "hetero group III resampling probability");
  synth->add_option("--out", o.csv_out, "output CSV path");

  auto* diagnose = app.add_subcommand("diagnose", "ICA quality diagnostics of a HOFS run");
  add_data_options(diagnose, o);
  add_selection_options(diagnose, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (version) {
    std::cout << json{{"name", "hofs"}, {"version", kVersion}}.dump() << '\n';
    return 0;
  }
  std::string command = select->parsed()     ? "select"
                        : bench->parsed()    ? "bench"
                        : synth->parsed()    ? "synth"
                        : diagnose->parsed() ? "diagnose"
                                             : "";
  if (dump) {
    std::cout << config_echo(command, o).dump(2) << '\n';
    return 0;
  }
  if (command.empty()) {
    std::cerr << app.help();
    return 2;
  }
  try {
    if (command == "select") return cmd_select(o);
    if (command == "bench") return cmd_bench(o);
    if (command == "synth") return cmd_synth(o);
    return cmd_diagnose(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

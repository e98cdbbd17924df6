#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/hofs.hpp"
#include "fsel/infotheory.hpp"

namespace fsel::eval {

struct LinearConfig {
  double lambda = 1e-3;
  int epochs = 500;
  double learning_rate = 0.1;
};

// One-vs-rest L2 logistic regression on standardized features.
struct LinearModel {
  std::vector<int> features;
  std::vector<double> mean, scale;
  std::vector<std::vector<double>> weights;  // per class
  std::vector<double> bias;
  std::vector<char> present;  // class seen in training

  int predict(const DataTable& data, std::size_t row) const;
};

LinearModel train_linear(const DataTable& data, const std::vector<std::size_t>& rows,
                         const std::vector<int>& features, const LinearConfig& config = {});

struct CvProtocol {
  int folds = 10;
  bool loo_below_100 = true;  // leave-one-out when N < 100
  std::uint64_t seed = 7;
  LinearConfig linear;
};

struct CvResult {
  double error_pct = 0.0;
  std::vector<int> predictions;  // held-out prediction per sample
  int folds_used = 0;
};

// Stratified fold index per sample.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);
CvResult cross_validate(const DataTable& data, const std::vector<int>& features,
                        const CvProtocol& protocol = {});

// Relative absolute error on numeric class codes.
double rae(const std::vector<double>& predicted, const std::vector<double>& actual);
double rae(const std::vector<int>& predicted, const std::vector<int>& actual);
double arae(const std::vector<double>& rae_values);

double global_mi_plugin(const DiscretizedView& view, const std::vector<int>& features,
                        const std::vector<int>& labels, info::LogBase base = info::LogBase::nats);
// Sum over the Argcov partition of `features` of the per-subset ICA estimates.
double global_mi_ica(hofs::Engine& engine, const std::vector<int>& features);

// Global-MI increment per selection step, replaying the trace's subset assignments.
std::vector<double> information_gain_curve(hofs::Engine& engine, const hofs::SelectionTrace& trace);

struct MethodReport {
  std::string method;
  std::vector<int> order;
  std::vector<int> ks;
  std::vector<double> error_pct;
  std::vector<std::optional<double>> global_mi_plugin;  // empty above 16 features
  std::vector<double> global_mi_ica;
  double average_error = 0.0;
  double arae = 0.0;
  std::vector<double> gains;  // HOFS only
};

struct EvalReport {
  std::vector<MethodReport> methods;
};

struct BenchConfig {
  std::vector<std::string> methods;
  std::vector<int> ks;  // empty: 10, 20, ..., min(100, M), or 1..M when M < 10
  double mifs_beta = 1.0;
  hofs::HofsConfig hofs;
  CvProtocol protocol;
};

std::vector<int> default_ks(std::size_t n_features);
EvalReport run_bench(const DataTable& data, const BenchConfig& config);

}  // namespace fsel::eval

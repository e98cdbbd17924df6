#pragma once
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/ica.hpp"
#include "fsel/infotheory.hpp"

namespace fsel::hofs {

// How per-subset terms enter the forward-search score.
//  assigned: gain inside the subset the candidate would join, or I(x:y) if it starts a new one
//  literal:  I(x:y) + sum_j I(Omega_j : y | x)
//  mean:     I(x:y) + mean_j I(Omega_j : y | x)
enum class Composition { assigned, literal, mean };

struct HofsConfig {
  int T = 1;
  double C = 0.3;
  bool abs_corr = false;  // Argcov on |corr| instead of signed correlation
  Composition composition = Composition::assigned;
  int bins = 5;
  BinScheme scheme = BinScheme::equal_frequency;
  info::LogBase base = info::LogBase::nats;
  std::uint64_t seed = 7;  // dither stream for discrete ICA inputs
  ica::IcaConfig ica;

  void validate(std::size_t n_features, std::size_t n_samples) const;
};

// Standardized ICA inputs. Discrete columns (categorical features, the label) carry a
// uniform dither of one lattice step so their densities are defined; log_delta records
// the standardized step so entropies can be mapped back to the discrete scale.
struct SignalSpace {
  std::vector<ica::Column> columns;  // null for constant columns
  std::vector<double> log_delta;
  ica::Column label;  // null for a constant label
  double label_log_delta = 0.0;

  static SignalSpace build(const DataTable& data, std::uint64_t seed);
};

struct Subset {
  std::vector<int> feature_ids;
  ica::IcaModel model;        // over the features
  ica::IcaModel label_model;  // model with the label appended as last row
  double anchor = 0.0;        // I(first:y) + H(y|first), see subset_information
  bool degenerate = false;    // constant feature, no model
};

struct SubsetPartition {
  std::vector<Subset> subsets;
  std::vector<int> selection_order;

  std::size_t K() const { return subsets.size(); }
  void check_invariants() const;
};

struct StepRecord {
  int t = 0;
  int chosen = -1;
  double score = 0.0;
  std::map<int, double> candidate_scores;
  double relevance = 0.0;
  std::vector<double> subset_terms;  // I(Omega_j : y | chosen) per subset before assignment
  double maxcov = 0.0;
  int argcov_index = -1;
  bool created_new_subset = true;
  int subset_index = 0;
};

struct SelectionTrace {
  std::vector<StepRecord> steps;
};

struct Assignment {
  int argcov_index = -1;  // subset with the largest Argcov, -1 if none
  double maxcov = 0.0;
  bool joins = false;     // maxcov > C
};

class Engine {
 public:
  Engine(const DataTable& data, HofsConfig config);

  const DataTable& data() const { return data_; }
  const HofsConfig& config() const { return config_; }
  const DiscretizedView& view() const { return view_; }
  const SignalSpace& signals() const { return signals_; }

  double relevance(int i);                 // plug-in I(x_i : y)
  double plugin_conditional_label(int i);  // plug-in H(y | x_i)
  double correlation(int i, int j);
  double label_entropy_given(const Subset& s) const;  // ICA estimate of H(y | subset)

  Assignment argcov(const SubsetPartition& p, int candidate);
  Subset singleton(int feature);
  // Subset with `feature` appended; cached per (subset, feature) while the subset is current.
  const Subset& extension(const Subset& s, int feature);
  void forget_extensions_except(const SubsetPartition& p);

  double subset_conditional_score(const Subset& s, int candidate);
  double hofs_score(int candidate, const SubsetPartition& p);
  std::pair<int, bool> assign_subset(SubsetPartition& p, int chosen);

  std::pair<SubsetPartition, SelectionTrace> run();

 private:
  const DataTable& data_;
  HofsConfig config_;
  DiscretizedView view_;
  SignalSpace signals_;
  ica::IcaModel empty_label_;
  std::map<int, double> relevance_, cond_label_;
  std::map<std::pair<int, int>, double> corr_;
  std::map<std::vector<int>, std::map<int, std::unique_ptr<Subset>>> ext_;
};

std::pair<SubsetPartition, SelectionTrace> run_hofs(const DataTable& data, const HofsConfig& config);

// Builds the partition produced by the Argcov rule when features arrive in `order`.
SubsetPartition partition_in_order(Engine& engine, const std::vector<int>& order);

// ICA estimate of I(subset : y), anchored on the plug-in relevance of its first feature.
double subset_information(const Engine& engine, const Subset& s);

struct BalanceReport {
  double mean = 0.0;
  std::vector<double> per_subset;  // NaN where excluded
  std::vector<std::string> warnings;
};
// [H(X,y) - H(X)] / H_ica(y | X) per subset, averaged.
BalanceReport r_balance(const Engine& engine, const SubsetPartition& p);

struct PearsonReport {
  double overall = 0.0;
  std::vector<double> per_subset;
  std::vector<std::string> notes;
};
PearsonReport pearson_diagnostic(const SubsetPartition& p);

Composition parse_composition(const std::string& s);
const char* to_string(Composition c);

}  // namespace fsel::hofs

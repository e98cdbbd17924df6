#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace fsel::ica {

// Infomax ICA with a logistic source prior, restricted to lower-triangular
// unmixing matrices that grow one row at a time.

using Column = std::shared_ptr<const std::vector<double>>;

enum class RowSolver { newton, sgd };

struct IcaConfig {
  double learning_rate = 0.01;  // SGD only, decays as 1/sqrt(epoch)
  std::size_t batch_size = 256;
  int max_epochs = 200;
  double convergence_tol = 1e-5;  // relative log-likelihood change
  std::uint64_t rng_seed = 0;
  RowSolver solver = RowSolver::newton;

  void validate(std::size_t n_samples) const;
};

struct FitMeta {
  int iterations = 0;
  double learning_rate = 0.0;
  std::size_t batch_size = 0;
  bool converged = true;
  bool degenerate = false;
  double log_likelihood = 0.0;  // row objective at the solution
};

struct IcaModel {
  std::vector<int> feature_ids;
  std::vector<Column> inputs;             // standardized columns, one per row
  std::vector<double> log_delta;          // log lattice spacing of discrete inputs, else 0
  std::vector<std::vector<double>> W;     // row k has k+1 entries
  std::vector<Column> signals;            // row k of W times the inputs
  std::vector<double> signal_entropies;   // nats
  std::vector<FitMeta> fit_meta;

  std::size_t dim() const { return W.size(); }
  std::size_t n_samples() const { return inputs.empty() ? 0 : inputs[0]->size(); }
  double log_abs_det() const;
  Eigen::MatrixXd dense_W() const;
};

// log g'(s) for the logistic cdf g.
double log_prior_density(double s);
double sigmoid(double s);

// Mean over samples of sum_i log g'(w_i . x) plus log|det W|, for a general square W.
double log_likelihood(const Eigen::MatrixXd& W, const std::vector<Column>& X);
// Full-batch gradient of log_likelihood: mean[(1 - 2 g(Wx)) x^T] + W^{-T}.
Eigen::MatrixXd likelihood_gradient(const Eigen::MatrixXd& W, const std::vector<Column>& X);

// Learns the row over `inputs` whose last entry is the diagonal, other rows fixed.
std::vector<double> fit_row(const std::vector<Column>& inputs, const IcaConfig& config,
                            FitMeta* meta = nullptr);
double row_objective(const std::vector<double>& w, const std::vector<Column>& inputs);

IcaModel fit_batch(const std::vector<Column>& columns, const std::vector<int>& ids,
                   const std::vector<double>& log_delta, const IcaConfig& config);
IcaModel append_feature(const IcaModel& model, Column column, int id, double log_delta,
                        const IcaConfig& config);
// Appends the row with the smallest conditional entropy among the likelihood row,
// the unmixed row and any caller-supplied rows of length dim()+1.
IcaModel append_min_entropy(const IcaModel& model, Column column, int id, double log_delta,
                            const IcaConfig& config,
                            const std::vector<std::vector<double>>& extra_rows = {});
IcaModel append_row(const IcaModel& model, Column column, int id, double log_delta,
                    std::vector<double> row, FitMeta meta = {});

// Histogram differential entropy (Freedman-Diaconis width), scale covariant.
double signal_entropy(std::span<const double> s);
double signal_entropy_sum(const IcaModel& model);
// sum H(s_j) - log|det W|, corrected by the lattice spacing of discrete inputs.
double joint_entropy_estimate(const IcaModel& model);
// Entropy of the last input given the others: H(s_last) - log|w_last,last| - log delta_last.
double conditional_entropy_last(const IcaModel& model);

double pearson(std::span<const double> a, std::span<const double> b);
// Mean |Pearson| over signal pairs; 0 when dim() < 2.
double avg_pearson(const IcaModel& model);

// Throws DataError unless mean is 0 and variance 1 within 1e-6.
void check_standardized(const std::vector<double>& column);

}  // namespace fsel::ica

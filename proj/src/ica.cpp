#include "fsel/ica.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fsel/errors.hpp"
#include "fsel/rng.hpp"

namespace fsel::ica {

namespace {

constexpr double kDegenerateR2 = 1e-10;

Eigen::MatrixXd as_matrix(const std::vector<Column>& X) {
  const std::size_t d = X.size(), n = d ? X[0]->size() : 0;
  Eigen::MatrixXd Z(d, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t t = 0; t < n; ++t) Z(i, t) = (*X[i])[t];
  return Z;
}

std::vector<double> combine(const std::vector<double>& w, const std::vector<Column>& inputs) {
  const std::size_t n = inputs[0]->size();
  std::vector<double> s(n, 0.0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == 0.0) continue;
    const auto& z = *inputs[j];
    for (std::size_t t = 0; t < n; ++t) s[t] += w[j] * z[t];
  }
  return s;
}

// Fraction of the last input's variance explained by the others.
double explained_fraction(const std::vector<Column>& inputs) {
  const std::size_t d = inputs.size();
  if (d < 2) return 0.0;
  Eigen::MatrixXd Z = as_matrix(inputs);
  const double n = static_cast<double>(Z.cols());
  Eigen::MatrixXd G = Z.topRows(d - 1) * Z.topRows(d - 1).transpose() / n;
  Eigen::VectorXd c = Z.topRows(d - 1) * Z.row(d - 1).transpose() / n;
  double v = Z.row(d - 1).squaredNorm() / n;
  if (!(v > 0.0)) return 1.0;
  Eigen::VectorXd b = G.ldlt().solve(c);
  return c.dot(b) / v;
}

std::vector<double> unmixed_row(std::size_t len) {
  std::vector<double> w(len, 0.0);
  w.back() = 1.0;
  return w;
}

std::vector<double> newton_row(const std::vector<Column>& inputs, const IcaConfig& config,
                               FitMeta& meta) {
  const std::size_t d = inputs.size(), k = d - 1, n = inputs[0]->size();
  const double dn = static_cast<double>(n);
  std::vector<double> w = unmixed_row(d);
  double f = row_objective(w, inputs);
  meta.converged = false;
  const int max_iter = std::max(config.max_epochs, 50);
  for (int it = 0; it < max_iter; ++it) {
    auto s = combine(w, inputs);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd negH = Eigen::MatrixXd::Zero(d, d);
    std::vector<double> z(d);
    for (std::size_t t = 0; t < n; ++t) {
      double g = sigmoid(s[t]);
      double a = 1.0 - 2.0 * g, b = 2.0 * g * (1.0 - g);
      for (std::size_t i = 0; i < d; ++i) z[i] = (*inputs[i])[t];
      for (std::size_t i = 0; i < d; ++i) {
        grad(i) += a * z[i];
        for (std::size_t j = 0; j <= i; ++j) negH(i, j) += b * z[i] * z[j];
      }
    }
    grad /= dn;
    negH /= dn;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < i; ++j) negH(j, i) = negH(i, j);
    grad(k) += 1.0 / w[k];
    negH(k, k) += 1.0 / (w[k] * w[k]);
    negH.diagonal().array() += 1e-12;
    Eigen::VectorXd step = negH.ldlt().solve(grad);

    double t = 1.0, f_new = f;
    std::vector<double> trial(d);
    bool moved = false;
    while (t > 1e-10) {
      for (std::size_t i = 0; i < d; ++i) trial[i] = w[i] + t * step(i);
      if (trial[k] > 0.0) {
        f_new = row_objective(trial, inputs);
        if (f_new >= f) {
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    meta.iterations = it + 1;
    if (!moved) {
      meta.converged = true;
      break;
    }
    double gain = f_new - f;
    w = trial;
    f = f_new;
    if (gain <= 1e-13 * (1.0 + std::abs(f))) {
      meta.converged = true;
      break;
    }
  }
  meta.log_likelihood = f;
  return w;
}

// Row-restricted infomax ascent: w <- w + alpha_t [mean (1 - 2 g(w.x)) x + e_k / w_k].
std::vector<double> sgd_row(const std::vector<Column>& inputs, const IcaConfig& config,
                            FitMeta& meta) {
  const std::size_t d = inputs.size(), k = d - 1, n = inputs[0]->size();
  const std::size_t bs = std::min(config.batch_size, n);
  std::vector<double> w = unmixed_row(d);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = named_stream(config.rng_seed, "ica-sgd-row" + std::to_string(d));
  double f = row_objective(w, inputs);
  meta.converged = false;
  std::vector<double> grad(d);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const double alpha = config.learning_rate / std::sqrt(static_cast<double>(epoch));
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t stop = std::min(n, start + bs);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t p = start; p < stop; ++p) {
        const std::size_t t = perm[p];
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += w[i] * (*inputs[i])[t];
        double a = 1.0 - 2.0 * sigmoid(s);
        for (std::size_t i = 0; i < d; ++i) grad[i] += a * (*inputs[i])[t];
      }
      const double m = static_cast<double>(stop - start);
      for (std::size_t i = 0; i < d; ++i) grad[i] /= m;
      grad[k] += 1.0 / w[k];
      for (std::size_t i = 0; i < d; ++i) w[i] += alpha * grad[i];
      if (w[k] <= 0.0) w[k] = 1e-8;
    }
    double f_new = row_objective(w, inputs);
    meta.iterations = epoch;
    bool done = std::abs(f_new - f) <= config.convergence_tol * std::max(1.0, std::abs(f));
    f = f_new;
    if (done) {
      meta.converged = true;
      break;
    }
  }
  meta.log_likelihood = f;
  return w;
}

}  // namespace

void IcaConfig::validate(std::size_t n_samples) const {
  if (!(learning_rate > 0.0) || batch_size == 0 || max_epochs <= 0 || !(convergence_tol > 0.0))
    throw ConfigError("ICA settings must be positive");
  if (n_samples && batch_size > n_samples && solver == RowSolver::sgd)
    throw ConfigError("ICA batch size exceeds sample count");
}

double IcaModel::log_abs_det() const {
  double s = 0.0;
  for (const auto& row : W) s += std::log(std::abs(row.back()));
  return s;
}

Eigen::MatrixXd IcaModel::dense_W() const {
  const std::size_t d = dim();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) M(i, j) = W[i][j];
  return M;
}

double sigmoid(double s) { return 0.5 * (1.0 + std::tanh(0.5 * s)); }

double log_prior_density(double s) {
  double a = std::abs(s);
  return -a - 2.0 * std::log1p(std::exp(-a));
}

double log_likelihood(const Eigen::MatrixXd& W, const std::vector<Column>& X) {
  Eigen::MatrixXd S = W * as_matrix(X);
  double acc = 0.0;
  for (Eigen::Index t = 0; t < S.cols(); ++t)
    for (Eigen::Index i = 0; i < S.rows(); ++i) acc += log_prior_density(S(i, t));
  return acc / static_cast<double>(S.cols()) + std::log(std::abs(W.determinant()));
}

Eigen::MatrixXd likelihood_gradient(const Eigen::MatrixXd& W, const std::vector<Column>& X) {
  Eigen::MatrixXd Z = as_matrix(X);
  Eigen::MatrixXd S = W * Z;
  Eigen::MatrixXd A = S.unaryExpr([](double s) { return 1.0 - 2.0 * sigmoid(s); });
  return A * Z.transpose() / static_cast<double>(Z.cols()) + W.inverse().transpose();
}

double row_objective(const std::vector<double>& w, const std::vector<Column>& inputs) {
  auto s = combine(w, inputs);
  double acc = 0.0;
  for (double v : s) acc += log_prior_density(v);
  return acc / static_cast<double>(s.size()) + std::log(std::abs(w.back()));
}

std::vector<double> fit_row(const std::vector<Column>& inputs, const IcaConfig& config,
                            FitMeta* meta_out) {
  if (inputs.empty()) throw ConfigError("fit_row needs at least one input");
  FitMeta meta;
  meta.learning_rate = config.learning_rate;
  meta.batch_size = std::min(config.batch_size, inputs[0]->size());
  std::vector<double> w;
  if (explained_fraction(inputs) > 1.0 - kDegenerateR2) {
    // The new column is a linear function of the others; keep it unmixed.
    w = unmixed_row(inputs.size());
    meta.degenerate = true;
    meta.converged = false;
    meta.log_likelihood = row_objective(w, inputs);
  } else if (config.solver == RowSolver::newton) {
    w = newton_row(inputs, config, meta);
  } else {
    w = sgd_row(inputs, config, meta);
  }
  if (meta_out) *meta_out = meta;
  return w;
}

void check_standardized(const std::vector<double>& column) {
  const double n = static_cast<double>(column.size());
  if (column.empty()) throw DataError("empty ICA input");
  double mean = std::accumulate(column.begin(), column.end(), 0.0) / n;
  double var = 0.0;
  for (double v : column) var += (v - mean) * (v - mean);
  var /= n;
  if (std::abs(mean) > 1e-6 || std::abs(var - 1.0) > 1e-6)
    throw DataError("ICA input is not standardized");
}

IcaModel append_row(const IcaModel& model, Column column, int id, double log_delta,
                    std::vector<double> row, FitMeta meta) {
  if (row.size() != model.dim() + 1) throw ConfigError("row length does not match model");
  if (model.dim() && column->size() != model.n_samples())
    throw DataError("ICA input length mismatch");
  IcaModel m = model;
  m.feature_ids.push_back(id);
  m.inputs.push_back(std::move(column));
  m.log_delta.push_back(log_delta);
  auto s = std::make_shared<const std::vector<double>>(combine(row, m.inputs));
  m.signal_entropies.push_back(signal_entropy(*s));
  m.signals.push_back(std::move(s));
  m.W.push_back(std::move(row));
  m.fit_meta.push_back(meta);
  return m;
}

IcaModel append_feature(const IcaModel& model, Column column, int id, double log_delta,
                        const IcaConfig& config) {
  check_standardized(*column);
  std::vector<Column> inputs = model.inputs;
  inputs.push_back(column);
  FitMeta meta;
  auto row = fit_row(inputs, config, &meta);
  return append_row(model, std::move(column), id, log_delta, std::move(row), meta);
}

IcaModel append_min_entropy(const IcaModel& model, Column column, int id, double log_delta,
                            const IcaConfig& config,
                            const std::vector<std::vector<double>>& extra_rows) {
  check_standardized(*column);
  std::vector<Column> inputs = model.inputs;
  inputs.push_back(column);
  FitMeta meta;
  std::vector<std::vector<double>> rows{fit_row(inputs, config, &meta), unmixed_row(inputs.size())};
  for (const auto& r : extra_rows)
    if (r.size() == inputs.size() && r.back() > 0.0) rows.push_back(r);
  std::size_t best = 0;
  double best_h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double h = signal_entropy(combine(rows[i], inputs)) - std::log(rows[i].back());
    if (h < best_h - 1e-12) best_h = h, best = i;
  }
  if (best != 0) meta.log_likelihood = row_objective(rows[best], inputs);
  return append_row(model, std::move(column), id, log_delta, std::move(rows[best]), meta);
}

IcaModel fit_batch(const std::vector<Column>& columns, const std::vector<int>& ids,
                   const std::vector<double>& log_delta, const IcaConfig& config) {
  if (columns.empty()) throw ConfigError("fit_batch needs at least one column");
  if (ids.size() != columns.size() || log_delta.size() != columns.size())
    throw ConfigError("fit_batch metadata length mismatch");
  const std::size_t n = columns[0]->size();
  if (n <= columns.size()) throw DataError("fit_batch needs more samples than columns");
  config.validate(n);
  IcaModel m;
  for (std::size_t i = 0; i < columns.size(); ++i)
    m = append_feature(m, columns[i], ids[i], log_delta[i], config);
  return m;
}

double signal_entropy(std::span<const double> s) {
  const std::size_t n = s.size();
  if (n == 0) throw DataError("entropy of an empty signal");
  std::vector<double> v(s.begin(), s.end());
  auto quantile = [&](double p) {
    double h = (n - 1) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::nth_element(v.begin(), v.begin() + lo, v.end());
    double a = v[lo];
    if (lo + 1 >= n) return a;
    double b = *std::min_element(v.begin() + lo + 1, v.end());
    return a + (h - lo) * (b - a);
  };
  const double q75 = quantile(0.75), q25 = quantile(0.25);
  const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
  double width = 2.0 * (q75 - q25) * std::pow(static_cast<double>(n), -1.0 / 3.0);
  if (!(width > 0.0)) width = (*mx - *mn) / std::sqrt(static_cast<double>(n));
  if (!(width > 0.0)) return -std::numeric_limits<double>::infinity();
  std::vector<long long> codes(n);
  for (std::size_t t = 0; t < n; ++t) codes[t] = static_cast<long long>(std::floor((s[t] - *mn) / width));
  std::sort(codes.begin(), codes.end());
  double h = 0.0;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && codes[j] == codes[i]) ++j;
    double p = (j - i) / dn;
    h -= p * std::log(p);
    i = j;
  }
  return h + std::log(width);
}

double signal_entropy_sum(const IcaModel& model) {
  if (model.dim() == 0) throw ConfigError("model is not fitted");
  return std::accumulate(model.signal_entropies.begin(), model.signal_entropies.end(), 0.0);
}

double joint_entropy_estimate(const IcaModel& model) {
  for (const auto& row : model.W)
    if (row.back() == 0.0) throw NumericError("zero diagonal entry in unmixing matrix");
  double lattice = std::accumulate(model.log_delta.begin(), model.log_delta.end(), 0.0);
  return signal_entropy_sum(model) - model.log_abs_det() - lattice;
}

double conditional_entropy_last(const IcaModel& model) {
  if (model.dim() == 0) throw ConfigError("model is not fitted");
  double diag = model.W.back().back();
  if (diag == 0.0) throw NumericError("zero diagonal entry in unmixing matrix");
  return model.signal_entropies.back() - std::log(std::abs(diag)) - model.log_delta.back();
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (b.size() != n || n == 0) throw DataError("pearson length mismatch");
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) ma += a[i], mb += b[i];
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double avg_pearson(const IcaModel& model) {
  const std::size_t d = model.dim();
  if (d < 2) return 0.0;
  double acc = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j, ++pairs)
      acc += std::abs(pearson(*model.signals[i], *model.signals[j]));
  return acc / static_cast<double>(pairs);
}

}  // namespace fsel::ica

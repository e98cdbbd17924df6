#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fsel/errors.hpp"
#include "fsel/ica.hpp"
#include "fsel/infotheory.hpp"

using namespace fsel::ica;

namespace {

Column standardize(std::vector<double> v) {
  const double n = static_cast<double>(v.size());
  double m = std::accumulate(v.begin(), v.end(), 0.0) / n, s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  s = std::sqrt(s / n);
  for (double& x : v) x = (x - m) / s;
  return std::make_shared<const std::vector<double>>(std::move(v));
}

std::vector<double> draws(std::size_t n, std::uint64_t seed, bool uniform = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
  std::vector<double> v(n);
  for (auto& x : v) x = uniform ? u(rng) : z(rng);
  return v;
}

IcaModel fit(const std::vector<Column>& cols, const IcaConfig& cfg = {}) {
  std::vector<int> ids(cols.size());
  std::iota(ids.begin(), ids.end(), 0);
  return fit_batch(cols, ids, std::vector<double>(cols.size(), 0.0), cfg);
}

bool lower_triangular_exact(const IcaModel& m) {
  for (std::size_t k = 0; k < m.dim(); ++k)
    if (m.W[k].size() != k + 1 || m.W[k].back() == 0.0) return false;
  Eigen::MatrixXd W = m.dense_W();
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = i + 1; j < W.cols(); ++j)
      if (W(i, j) != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("single column fit scales the input") {
  auto x = standardize(draws(2000, 1));
  auto m = fit({x});
  REQUIRE(m.dim() == 1);
  CHECK(m.signal_entropies.size() == 1);
  const double w = m.W[0][0];
  CHECK(w > 0.0);
  for (std::size_t t = 0; t < x->size(); t += 97) CHECK((*m.signals[0])[t] == doctest::Approx(w * (*x)[t]));

  auto via_append = append_feature({}, x, 0, 0.0, {});
  CHECK(via_append.W == m.W);
  CHECK(*via_append.signals[0] == *m.signals[0]);
}

TEST_CASE("two mixed uniform sources are unmixed") {
  auto s1 = draws(20000, 10, true), s2 = draws(20000, 11, true);
  std::vector<double> x2(s1.size());
  for (std::size_t t = 0; t < s1.size(); ++t) x2[t] = 0.8 * s1[t] + s2[t];
  auto m = fit({standardize(s1), standardize(x2)});
  CHECK(avg_pearson(m) < 0.1);
  CHECK(std::abs(pearson(*m.signals[1], s2)) > 0.99);
}

TEST_CASE("duplicated column is flagged degenerate") {
  auto x = standardize(draws(1000, 3));
  auto m = fit({x, x});
  CHECK(m.fit_meta[1].degenerate);
  CHECK_FALSE(m.fit_meta[1].converged);
  CHECK(std::isfinite(joint_entropy_estimate(m)));
}

TEST_CASE("analytic gradient matches finite differences of the log-likelihood") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  for (std::size_t d : {2u, 3u}) {
    std::vector<Column> X;
    for (std::size_t i = 0; i < d; ++i) X.push_back(standardize(draws(500, 40 + i)));
    Eigen::MatrixXd W(d, d);
    for (Eigen::Index i = 0; i < W.size(); ++i) W(i) = 0.5 * z(rng);
    W.diagonal().array() += 1.5;
    Eigen::MatrixXd G = likelihood_gradient(W, X);
    Eigen::MatrixXd F(d, d);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < W.size(); ++i) {
      Eigen::MatrixXd Wp = W, Wm = W;
      Wp(i) += h;
      Wm(i) -= h;
      F(i) = (log_likelihood(Wp, X) - log_likelihood(Wm, X)) / (2 * h);
    }
    CHECK((G - F).norm() / F.norm() < 1e-4);
  }
}

TEST_CASE("row-restricted Newton solution is a stationary point of the full likelihood row") {
  auto a = standardize(draws(5000, 21, true));
  auto b0 = draws(5000, 22);
  std::vector<double> b(b0.size());
  for (std::size_t t = 0; t < b.size(); ++t) b[t] = b0[t] + 0.6 * (*a)[t];
  auto m = fit({a, standardize(b)});
  Eigen::MatrixXd G = likelihood_gradient(m.dense_W(), m.inputs);
  // Only lower-triangular entries are free; their gradient vanishes.
  CHECK(std::abs(G(1, 0)) < 1e-8);
  CHECK(std::abs(G(1, 1)) < 1e-8);
  CHECK(std::abs(G(0, 0)) < 1e-8);
}

TEST_CASE("triangularity, determinant and signals hold after every append") {
  std::vector<Column> cols;
  auto base = draws(3000, 50);
  IcaModel m;
  for (int k = 0; k < 5; ++k) {
    auto e = draws(3000, 60 + k);
    std::vector<double> x(3000);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = e[t] + 0.5 * base[t] * (k % 2 ? 1 : -1);
    auto col = standardize(x);
    IcaModel next = append_feature(m, col, k, 0.0, {});
    CHECK(lower_triangular_exact(next));
    for (std::size_t r = 0; r < m.dim(); ++r) {
      CHECK(next.W[r] == m.W[r]);              // rows unchanged, bit for bit
      CHECK(next.signals[r] == m.signals[r]);  // same shared signal storage
    }
    double prod = 0.0;
    for (const auto& row : next.W) prod += std::log(std::abs(row.back()));
    CHECK(next.log_abs_det() == prod);
    double det = next.dense_W().determinant();
    CHECK(std::abs(std::log(std::abs(det)) - prod) < 1e-9 * std::max(1.0, std::abs(prod)));
    for (std::size_t r = 0; r < next.dim(); ++r)
      for (std::size_t t = 0; t < 3000; t += 301) {
        double s = 0.0;
        for (std::size_t j = 0; j <= r; ++j) s += next.W[r][j] * (*next.inputs[j])[t];
        CHECK(std::abs(s - (*next.signals[r])[t]) < 1e-9);
      }
    m = next;
  }
}

TEST_CASE("appending an independent column barely mixes it") {
  auto a = standardize(draws(20000, 70)), b = standardize(draws(20000, 71));
  auto m1 = fit({a});
  auto m2 = append_feature(m1, b, 1, 0.0, {});
  CHECK(std::abs(m2.W[1][0]) < 0.05 * m2.W[1][1]);
  double gain = joint_entropy_estimate(m2) - joint_entropy_estimate(m1);
  double hb = signal_entropy(*m2.signals[1]) - std::log(m2.W[1][1]);
  CHECK(gain == doctest::Approx(hb).epsilon(1e-12));
  CHECK(gain == doctest::Approx(0.5 * std::log(2 * M_PI * M_E)).epsilon(0.02));
  auto batch = fit({a, b});
  CHECK(batch.W == m2.W);
}

TEST_CASE("signal entropy sums") {
  auto x = standardize(draws(4000, 80, true));
  auto m = fit({x});
  CHECK(signal_entropy_sum(m) == m.signal_entropies[0]);

  IcaModel same = append_row({}, x, 0, 0.0, {1.0});
  same = append_row(same, x, 1, 0.0, {1.0, 0.0});
  same = append_row(same, x, 2, 0.0, {1.0, 0.0, 0.0});
  CHECK(signal_entropy_sum(same) == doctest::Approx(3 * same.signal_entropies[0]).epsilon(1e-15));

  // Standardized uniform: differential entropy log(2 sqrt 3).
  auto u1 = standardize(draws(100000, 81, true)), u2 = standardize(draws(100000, 82, true));
  IcaModel id = append_row({}, u1, 0, 0.0, {1.0});
  id = append_row(id, u2, 1, 0.0, {0.0, 1.0});
  for (double h : id.signal_entropies) CHECK(h == doctest::Approx(std::log(2 * std::sqrt(3.0))).epsilon(0.02));
}

TEST_CASE("joint entropy estimate under identity and scaling") {
  auto a = standardize(draws(5000, 90)), b = standardize(draws(5000, 91));
  IcaModel id = append_row({}, a, 0, 0.0, {1.0});
  id = append_row(id, b, 1, 0.0, {0.0, 1.0});
  CHECK(joint_entropy_estimate(id) == signal_entropy_sum(id));

  const double c = 2.5;
  IcaModel sc = append_row({}, a, 0, 0.0, {c});
  sc = append_row(sc, b, 1, 0.0, {0.0, c});
  CHECK(joint_entropy_estimate(sc) == doctest::Approx(signal_entropy_sum(sc) - 2 * std::log(c)).epsilon(1e-14));
  // The histogram estimator is scale covariant, so the scaled estimate matches the identity one.
  CHECK(joint_entropy_estimate(sc) == doctest::Approx(joint_entropy_estimate(id)).epsilon(1e-9));

  IcaModel zero = append_row({}, a, 0, 0.0, {0.0});
  CHECK_THROWS_AS(joint_entropy_estimate(zero), fsel::NumericError);
}

namespace {

// Dithers integer codes by one lattice step and standardizes, recording log delta.
IcaModel fit_codes(const std::vector<std::vector<int>>& codes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dither(-0.5, 0.5);
  const std::size_t n = codes[0].size();
  std::vector<Column> cols;
  std::vector<double> log_delta;
  std::vector<int> ids;
  for (const auto& c : codes) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = c[t] + dither(rng);
    double m = std::accumulate(v.begin(), v.end(), 0.0) / n, s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    s = std::sqrt(s / n);
    log_delta.push_back(-std::log(s));
    for (double& x : v) x = (x - m) / s;
    double m2 = std::accumulate(v.begin(), v.end(), 0.0) / n;
    for (double& x : v) x -= m2;
    cols.push_back(std::make_shared<const std::vector<double>>(std::move(v)));
    ids.push_back(static_cast<int>(ids.size()));
  }
  return fit_batch(cols, ids, log_delta, {});
}

std::vector<std::vector<int>> ternary_columns(std::size_t n, double copy_prob, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sym(0, 2);
  std::bernoulli_distribution copy(copy_prob);
  std::vector<std::vector<int>> codes(3, std::vector<int>(n));
  for (std::size_t t = 0; t < n; ++t) {
    codes[0][t] = sym(rng);
    codes[1][t] = copy(rng) ? codes[0][t] : sym(rng);
    codes[2][t] = copy(rng) ? codes[1][t] : sym(rng);
  }
  return codes;
}

}  // namespace

TEST_CASE("joint entropy estimate of independent small-alphabet columns") {
  auto codes = ternary_columns(20000, 0.0, 123);
  double brute = fsel::info::joint_entropy({codes[0], codes[1], codes[2]});
  auto m = fit_codes(codes, 5);
  CHECK(std::abs(joint_entropy_estimate(m) - brute) / brute < 0.10);
}

TEST_CASE("joint entropy estimate does not fall below the plug-in entropy") {
  // Linear unmixing cannot remove dependence between lattice-valued columns, so the
  // estimate stays an upper bound up to histogram bias.
  for (double copy : {0.2, 0.5, 0.8}) {
    auto codes = ternary_columns(20000, copy, 321);
    double brute = fsel::info::joint_entropy({codes[0], codes[1], codes[2]});
    auto m = fit_codes(codes, 6);
    CHECK(joint_entropy_estimate(m) > brute - 0.02);
  }
}

TEST_CASE("conditional entropy of the last row") {
  auto a = standardize(draws(5000, 100)), b = standardize(draws(5000, 101));
  auto m = fit({a, b});
  double expect = m.signal_entropies[1] - std::log(m.W[1][1]);
  CHECK(conditional_entropy_last(m) == expect);
}

TEST_CASE("avg_pearson edge cases") {
  auto a = standardize(draws(100, 1));
  IcaModel twin = append_row({}, a, 0, 0.0, {1.0});
  twin = append_row(twin, a, 1, 0.0, {0.0, 1.0});
  CHECK(avg_pearson(twin) == doctest::Approx(1.0));
  auto u = std::make_shared<const std::vector<double>>(std::vector<double>{1, -1, 1, -1});
  auto v = std::make_shared<const std::vector<double>>(std::vector<double>{1, 1, -1, -1});
  IcaModel orth = append_row({}, u, 0, 0.0, {1.0});
  orth = append_row(orth, v, 1, 0.0, {0.0, 1.0});
  CHECK(avg_pearson(orth) == 0.0);
  CHECK(avg_pearson(append_row({}, a, 0, 0.0, {1.0})) == 0.0);
}

TEST_CASE("fits are reproducible and reject unstandardized input") {
  auto a = standardize(draws(3000, 5)), b = standardize(draws(3000, 6));
  for (auto solver : {RowSolver::newton, RowSolver::sgd}) {
    IcaConfig cfg;
    cfg.solver = solver;
    cfg.rng_seed = 42;
    cfg.max_epochs = 30;
    auto m1 = fit({a, b}, cfg), m2 = fit({a, b}, cfg);
    CHECK(m1.W == m2.W);
    CHECK(*m1.signals[1] == *m2.signals[1]);
  }
  auto raw = std::make_shared<const std::vector<double>>(draws(100, 7));
  std::vector<double> shifted(*raw);
  for (double& x : shifted) x += 3.0;
  CHECK_THROWS_AS(append_feature({}, std::make_shared<const std::vector<double>>(shifted), 0, 0.0, {}),
                  fsel::DataError);
}

TEST_CASE("log-likelihood does not decrease during fitting") {
  auto a = standardize(draws(4000, 30, true));
  auto e = draws(4000, 31);
  std::vector<double> b(e.size());
  for (std::size_t t = 0; t < b.size(); ++t) b[t] = e[t] - 0.7 * (*a)[t];
  std::vector<Column> inputs{a, standardize(b)};
  double initial = row_objective({0.0, 1.0}, inputs);
  for (auto solver : {RowSolver::newton, RowSolver::sgd}) {
    IcaConfig cfg;
    cfg.solver = solver;
    cfg.max_epochs = 100;
    FitMeta meta;
    auto w = fit_row(inputs, cfg, &meta);
    CHECK(meta.log_likelihood >= initial);
    CHECK(meta.log_likelihood == doctest::Approx(row_objective(w, inputs)).epsilon(1e-12));
  }
  // The two solvers agree on the concave row problem.
  IcaConfig sgd;
  sgd.solver = RowSolver::sgd;
  sgd.max_epochs = 1000;
  sgd.learning_rate = 0.05;
  sgd.convergence_tol = 1e-9;
  auto wn = fit_row(inputs, {});
  auto ws = fit_row(inputs, sgd);
  CHECK(std::abs(wn[0] - ws[0]) < 0.05);
  CHECK(std::abs(wn[1] - ws[1]) < 0.05);
}

TEST_CASE("minimum-entropy append never does worse than the supplied rows") {
  auto a = standardize(draws(3000, 200));
  std::vector<double> yb(3000);
  auto e = draws(3000, 201, true);
  for (std::size_t t = 0; t < yb.size(); ++t) yb[t] = ((*a)[t] + e[t] > 0) ? 1.0 : 0.0;
  auto y = standardize(yb);
  auto m = fit({a});
  std::vector<double> hint{0.3, 1.0};
  auto best = append_min_entropy(m, y, -1, 0.0, {}, {hint});
  auto ml = append_feature(m, y, -1, 0.0, {});
  auto plain = append_row(m, y, -1, 0.0, {0.0, 1.0});
  auto hinted = append_row(m, y, -1, 0.0, hint);
  double h = conditional_entropy_last(best);
  CHECK(h <= conditional_entropy_last(ml) + 1e-12);
  CHECK(h <= conditional_entropy_last(plain) + 1e-12);
  CHECK(h <= conditional_entropy_last(hinted) + 1e-12);
}

TEST_CASE("config validation") {
  IcaConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(10), fsel::ConfigError);
  IcaConfig big;
  big.solver = RowSolver::sgd;
  big.batch_size = 100;
  CHECK_THROWS_AS(big.validate(10), fsel::ConfigError);
}

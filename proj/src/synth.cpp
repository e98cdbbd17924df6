#include "fsel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fsel/errors.hpp"
#include "fsel/rng.hpp"

namespace fsel::synth {

DataTable gen_tree(const TreeModelSpec& spec) {
  if (spec.n_samples < 1) throw ConfigError("tree model needs at least one sample");
  for (double w : spec.root_edge_weights)
    if (!std::isfinite(w)) throw ConfigError("tree edge weights must be finite");
  if (!(spec.child_noise_sd > 0.0)) throw ConfigError("child noise sd must be positive");

  const std::size_t n = spec.n_samples;
  DataTable t;
  auto yr = named_stream(spec.seed, "Y");
  std::bernoulli_distribution coin(0.5);
  t.labels.resize(n);
  for (auto& y : t.labels) y = coin(yr) ? 1 : 0;

  auto noisy = [&](const std::string& name, auto mean_of) {
    auto r = named_stream(spec.seed, name);
    std::normal_distribution<double> eps(0.0, spec.child_noise_sd);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = mean_of(i) + eps(r);
    return x;
  };
  t.columns.resize(9);
  for (int k = 0; k < 3; ++k) {
    const double w = spec.root_edge_weights[k];
    t.columns[k] = noisy("x" + std::to_string(k + 1), [&](std::size_t i) { return w * t.labels[i]; });
  }
  const int parent[6] = {0, 0, 1, 1, 2, 2};  // x4,x5 <- x1; x6,x7 <- x2; x8,x9 <- x3
  for (int c = 0; c < 6; ++c) {
    const auto& p = t.columns[parent[c]];
    t.columns[3 + c] = noisy("x" + std::to_string(4 + c), [&](std::size_t i) { return p[i]; });
  }
  for (int k = 0; k < 9; ++k) {
    t.feature_names.push_back("x" + std::to_string(k + 1));
    t.feature_kinds.push_back(FeatureKind::continuous);
  }
  t.class_names = {"0", "1"};
  t.report.rows_read = n;
  t.report.kinds = t.feature_kinds;
  return t;
}

DataTable gen_hetero(const HeteroModelSpec& spec) {
  if (!(spec.resample_prob >= 0.0 && spec.resample_prob <= 1.0))
    throw ConfigError("resample probability must lie in [0, 1]");
  if (!(spec.magnitude_spread >= 0.0)) throw ConfigError("magnitude spread must be >= 0");
  constexpr std::size_t kBlock = 100, kBlocks = 10, n = kBlock * kBlocks;
  if (spec.flip_count > 400) throw ConfigError("flip count exceeds the negative entries of F5");

  using Pattern = std::array<int, kBlocks>;
  auto block = [](std::size_t i) { return i / kBlock; };
  auto magnitude = [&](std::mt19937_64& r) {
    std::normal_distribution<double> d(spec.magnitude_mean, spec.magnitude_spread);
    return std::abs(d(r)) + spec.magnitude_offset;
  };
  auto categorical = [&](const Pattern& p) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = p[block(i)];
    return v;
  };
  auto signed_draws = [&](const std::string& name, const Pattern& sign) {
    auto r = named_stream(spec.seed, name);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = sign[block(i)] * magnitude(r);
    return v;
  };

  std::vector<std::vector<double>> F(21);
  F[1] = categorical({1, 1, 2, 2, 0, 0, 0, 0, 0, 0});
  F[2] = categorical({0, 0, 1, 1, 0, 0, 0, 0, 0, 0});
  F[3] = categorical({0, 0, 0, 0, 1, 1, 0, 0, 0, 0});
  F[4] = signed_draws("F4", {-1, -1, -1, -1, -1, -1, 1, 1, 1, 1});
  F[5] = signed_draws("F5", {-1, -1, -1, -1, -1, -1, -1, -1, 1, 1});
  F[6] = categorical({1, 1, 1, 1, 0, 0, 0, 0, 0, 0});
  F[7] = categorical({0, 1, 1, 1, 1, 0, 0, 0, 0, 0});
  F[8] = categorical({0, 0, 0, 1, 1, 1, 1, 0, 0, 0});
  F[9] = signed_draws("F9", {-1, -1, -1, -1, -1, 1, 1, 1, 1, 1});
  F[10] = signed_draws("F10", {-1, -1, -1, -1, -1, -1, -1, 1, 1, 1});

  for (int k : {11, 12, 13}) {
    auto r = named_stream(spec.seed, "F" + std::to_string(k));
    std::vector<double> v = F[k - 10];
    std::vector<double> alphabet(v.begin(), v.end());
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (auto& x : v)
      if (u(r) < spec.resample_prob) x = alphabet[pick(r)];
    F[k] = std::move(v);
  }
  for (int k : {14, 15}) {
    auto r = named_stream(spec.seed, "F" + std::to_string(k));
    std::vector<double> v = F[k - 10];
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < n; ++i)
      if (v[i] < 0) neg.push_back(i);
    std::shuffle(neg.begin(), neg.end(), r);
    for (std::size_t m = 0; m < spec.flip_count; ++m) v[neg[m]] = magnitude(r);
    F[k] = std::move(v);
  }
  for (int k = 16; k <= 20; ++k) {
    auto r = named_stream(spec.seed, "F" + std::to_string(k));
    std::normal_distribution<double> z(0.0, 1.0);
    F[k].resize(n);
    for (auto& x : F[k]) x = z(r);
  }

  DataTable t;
  for (int k = 1; k <= 20; ++k) {
    t.columns.push_back(std::move(F[k]));
    t.feature_names.push_back("F" + std::to_string(k));
    const bool cat = (k <= 3) || (k >= 6 && k <= 8) || (k >= 11 && k <= 13);
    t.feature_kinds.push_back(cat ? FeatureKind::categorical : FeatureKind::continuous);
  }
  t.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.labels[i] = static_cast<int>(block(i) / 2);
  t.class_names = {"1", "2", "3", "4", "5"};
  t.report.rows_read = n;
  t.report.kinds = t.feature_kinds;
  return t;
}

}  // namespace fsel::synth

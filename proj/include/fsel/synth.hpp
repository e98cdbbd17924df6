#pragma once
#include <array>
#include <cstdint>

#include "fsel/data.hpp"

namespace fsel::synth {

// Binary root Y with three Gaussian children, each with two Gaussian children of its own.
struct TreeModelSpec {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 7;
  std::array<double, 3> root_edge_weights{1.0, 0.65, 0.42};
  double child_noise_sd = 1.0;
};

// 1000 samples, 5 classes, 20 features in four groups of five.
struct HeteroModelSpec {
  std::uint64_t seed = 7;
  double magnitude_mean = 1.0;  // signed entries ~ |N(mean, spread^2)| + offset
  double magnitude_spread = 0.5;
  double magnitude_offset = 0.05;
  double resample_prob = 0.7;   // group III: chance each categorical entry is redrawn
  std::size_t flip_count = 200;
};

DataTable gen_tree(const TreeModelSpec& spec);
DataTable gen_hetero(const HeteroModelSpec& spec);

}  // namespace fsel::synth

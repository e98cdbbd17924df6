#pragma once
#include <string>
#include <vector>

#include "fsel/data.hpp"

namespace testutil {

inline fsel::DataTable make_table(std::vector<std::vector<double>> cols, std::vector<int> labels,
                                  std::vector<fsel::FeatureKind> kinds = {}) {
  fsel::DataTable t;
  t.columns = std::move(cols);
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    t.feature_names.push_back("x" + std::to_string(j + 1));
    t.feature_kinds.push_back(kinds.empty() ? fsel::infer_kind(t.columns[j]) : kinds[j]);
  }
  int L = 0;
  for (int y : labels) L = std::max(L, y + 1);
  for (int c = 0; c < L; ++c) t.class_names.push_back(std::to_string(c));
  t.labels = std::move(labels);
  return t;
}

// x1, x2 over all four combinations with y = XNOR(x1, x2).
inline fsel::DataTable xnor_table() {
  return make_table({{0, 0, 1, 1}, {0, 1, 0, 1}}, {1, 0, 0, 1});
}

}  // namespace testutil

#include "fsel/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>

#include "fsel/errors.hpp"

namespace fsel::info {

namespace {

void check_lengths(const Cols& cols, std::size_t n) {
  for (auto c : cols)
    if (c.size() != n) throw DataError("column length mismatch");
}

double entropy_of_counts(const std::vector<std::size_t>& counts, std::size_t n) {
  double h = 0.0;
  const double dn = static_cast<double>(n);
  for (std::size_t c : counts)
    if (c) {
      double p = c / dn;
      h -= p * std::log(p);
    }
  return h;
}

// Joint entropy in nats; an empty list is the degenerate variable with H = 0.
double joint_nats(const Cols& cols) {
  if (cols.empty()) return 0.0;
  const std::size_t n = cols[0].size();
  if (n == 0) throw DataError("empty column");
  check_lengths(cols, n);
  int k = 0;
  auto ids = joint_codes(cols, &k);
  std::vector<std::size_t> counts(k, 0);
  for (int id : ids) ++counts[id];
  return entropy_of_counts(counts, n);
}

Cols concat(const Cols& a, const Cols& b) {
  Cols out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Cols concat(const Cols& a, const Cols& b, const Cols& c) { return concat(concat(a, b), c); }

std::size_t common_length(std::initializer_list<const Cols*> lists) {
  std::size_t n = 0;
  bool set = false;
  for (auto* l : lists)
    for (auto c : *l) {
      if (!set) n = c.size(), set = true;
      if (c.size() != n) throw DataError("column length mismatch");
    }
  return n;
}

}  // namespace

double to_base(double nats, LogBase base) {
  return base == LogBase::bits ? nats / std::log(2.0) : nats;
}

const char* to_string(LogBase base) { return base == LogBase::bits ? "bits" : "nats"; }

LogBase parse_log_base(const std::string& s) {
  if (s == "nats" || s == "e") return LogBase::nats;
  if (s == "bits" || s == "2") return LogBase::bits;
  throw ConfigError("unknown log base: " + s);
}

std::vector<int> joint_codes(const Cols& cols, int* n_distinct) {
  if (cols.empty()) throw DataError("joint over an empty column list");
  const std::size_t n = cols[0].size();
  check_lengths(cols, n);
  // Fold one column at a time: (previous id, code) pairs are re-densified through a hash map.
  std::vector<int> ids(cols[0].begin(), cols[0].end());
  int k = 0;
  std::unordered_map<std::uint64_t, int> dense;
  dense.reserve(std::min<std::size_t>(n, 1 << 16));
  auto fold = [&](auto key_of) {
    dense.clear();
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = dense.try_emplace(key_of(i), static_cast<int>(dense.size()));
      ids[i] = it->second;
    }
    k = static_cast<int>(dense.size());
  };
  fold([&](std::size_t i) {
    if (ids[i] < 0) throw DataError("negative code");
    return static_cast<std::uint64_t>(ids[i]);
  });
  for (std::size_t c = 1; c < cols.size(); ++c) {
    auto col = cols[c];
    fold([&](std::size_t i) {
      if (col[i] < 0) throw DataError("negative code");
      return (static_cast<std::uint64_t>(ids[i]) << 32) | static_cast<std::uint32_t>(col[i]);
    });
  }
  if (n_distinct) *n_distinct = k;
  return ids;
}

double entropy(Col col, LogBase base) {
  if (col.empty()) throw DataError("empty column");
  return to_base(joint_nats({col}), base);
}

double joint_entropy(const Cols& cols, LogBase base) {
  if (cols.empty()) throw DataError("joint entropy of an empty column list");
  return to_base(joint_nats(cols), base);
}

double conditional_entropy(const Cols& cols, const Cols& given, LogBase base) {
  common_length({&cols, &given});
  double h = joint_nats(concat(cols, given)) - joint_nats(given);
  return to_base(std::max(0.0, h), base);
}

double mutual_information(const Cols& a, const Cols& b, LogBase base) {
  common_length({&a, &b});
  double i = joint_nats(a) + joint_nats(b) - joint_nats(concat(a, b));
  return to_base(std::max(0.0, i), base);
}

double conditional_mutual_information(const Cols& a, const Cols& b, const Cols& given,
                                      LogBase base) {
  common_length({&a, &b, &given});
  double i = joint_nats(concat(a, given)) + joint_nats(concat(b, given)) -
             joint_nats(concat(a, b, given)) - joint_nats(given);
  return to_base(std::max(0.0, i), base);
}

}  // namespace fsel::info

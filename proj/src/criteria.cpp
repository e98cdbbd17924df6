#include "fsel/criteria.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <unordered_map>

#include "fsel/errors.hpp"

namespace fsel::crit {

using info::Col;

namespace {

// Pairwise terms are reused across steps, keyed by (i, j).
class TermCache {
 public:
  TermCache(const DiscretizedView& view, const std::vector<int>& labels, info::LogBase base)
      : view_(view), y_(labels), base_(base) {}

  double relevance(int i) {
    return memo(rel_, i, 0, [&] { return info::mutual_information({col(i)}, {y_}, base_); });
  }
  double redundancy(int i, int j) {  // I(x_i : x_j)
    if (i > j) std::swap(i, j);
    return memo(red_, i, j, [&] { return info::mutual_information({col(i)}, {col(j)}, base_); });
  }
  double class_redundancy(int i, int j) {  // I(x_i : x_j | y)
    if (i > j) std::swap(i, j);
    return memo(cred_, i, j, [&] {
      return info::conditional_mutual_information({col(i)}, {col(j)}, {y_}, base_);
    });
  }
  double pair_relevance(int i, int j) {  // I({x_i, x_j} : y)
    if (i > j) std::swap(i, j);
    return memo(pair_, i, j,
                [&] { return info::mutual_information({col(i), col(j)}, {y_}, base_); });
  }
  double conditional_relevance(int i, int j) {  // I(x_i : y | x_j), not symmetric
    return memo(crel_, i, j, [&] {
      return info::conditional_mutual_information({col(i)}, {y_}, {col(j)}, base_);
    });
  }

 private:
  using Table = std::unordered_map<long long, double>;
  Col col(int i) const { return view_.codes[i]; }
  double memo(Table& t, int i, int j, const std::function<double()>& f) {
    long long key = static_cast<long long>(i) * 1000003LL + j;
    if (auto it = t.find(key); it != t.end()) return it->second;
    double v = f();
    t.emplace(key, v);
    return v;
  }
  const DiscretizedView& view_;
  Col y_;
  info::LogBase base_;
  Table rel_, red_, cred_, pair_, crel_;
};

double score(const Criterion& c, int x, const std::vector<int>& sel, TermCache& tc) {
  const double rel = tc.relevance(x);
  if (sel.empty()) return rel;
  double acc = 0.0;
  switch (c.kind) {
    case Kind::mim:
      return rel;
    case Kind::mifs:
      for (int j : sel) acc += tc.redundancy(x, j);
      return rel - c.beta * acc;
    case Kind::jmi:
      for (int j : sel) acc += tc.pair_relevance(x, j);
      return acc;
    case Kind::mrmr:
      for (int j : sel) acc += tc.redundancy(x, j);
      return rel - acc / static_cast<double>(sel.size());
    case Kind::cmim: {
      double worst = -std::numeric_limits<double>::infinity();
      for (int j : sel) worst = std::max(worst, tc.redundancy(x, j) - tc.class_redundancy(x, j));
      return rel - worst;
    }
    case Kind::speccmi:
      for (int j : sel) acc += tc.conditional_relevance(x, j);
      return rel + acc;
  }
  throw ConfigError("unknown criterion");
}

void check_inputs(const Criterion& c, const DiscretizedView& view, const std::vector<int>& labels) {
  if (c.kind == Kind::mifs && !(c.beta >= 0.0)) throw ConfigError("MIFS beta must be >= 0");
  for (const auto& col : view.codes)
    if (col.size() != labels.size()) throw DataError("label length does not match columns");
}

}  // namespace

Kind parse_kind(const std::string& name) {
  static const std::map<std::string, Kind> kinds{{"mim", Kind::mim},   {"mifs", Kind::mifs},
                                                 {"jmi", Kind::jmi},   {"mrmr", Kind::mrmr},
                                                 {"cmim", Kind::cmim}, {"speccmi", Kind::speccmi}};
  auto it = kinds.find(name);
  if (it == kinds.end()) throw ConfigError("unknown criterion: " + name);
  return it->second;
}

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::mim: return "mim";
    case Kind::mifs: return "mifs";
    case Kind::jmi: return "jmi";
    case Kind::mrmr: return "mrmr";
    case Kind::cmim: return "cmim";
    case Kind::speccmi: return "speccmi";
  }
  return "?";
}

double score_candidate(const Criterion& c, int candidate, const std::vector<int>& selected,
                       const DiscretizedView& view, const std::vector<int>& labels,
                       info::LogBase base) {
  check_inputs(c, view, labels);
  const int M = static_cast<int>(view.codes.size());
  if (candidate < 0 || candidate >= M) throw ConfigError("candidate out of range");
  if (std::find(selected.begin(), selected.end(), candidate) != selected.end())
    throw ConfigError("candidate already selected");
  TermCache tc(view, labels, base);
  return score(c, candidate, selected, tc);
}

SelectionResult select_greedy(const Criterion& c, const DiscretizedView& view,
                              const std::vector<int>& labels, int T, info::LogBase base,
                              bool keep_candidates) {
  check_inputs(c, view, labels);
  const int M = static_cast<int>(view.codes.size());
  if (T < 1 || T > M) throw ConfigError("T must lie in [1, M]");
  TermCache tc(view, labels, base);
  SelectionResult r;
  std::vector<char> taken(M, 0);
  while (static_cast<int>(r.order.size()) < T) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    std::map<int, double> cands;
    for (int x = 0; x < M; ++x) {
      if (taken[x]) continue;
      double s = score(c, x, r.order, tc);
      if (keep_candidates) cands[x] = s;
      if (best < 0 || s > best_score) best = x, best_score = s;
    }
    taken[best] = 1;
    r.order.push_back(best);
    r.scores.push_back(best_score);
    if (keep_candidates) r.per_step_candidates.push_back(std::move(cands));
  }
  return r;
}

}  // namespace fsel::crit

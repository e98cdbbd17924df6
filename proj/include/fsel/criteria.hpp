#pragma once
#include <map>
#include <string>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/infotheory.hpp"

namespace fsel::crit {

enum class Kind { mim, mifs, jmi, mrmr, cmim, speccmi };

struct Criterion {
  Kind kind = Kind::mim;
  double beta = 1.0;  // MIFS penalty weight
};

struct SelectionResult {
  std::vector<int> order;
  std::vector<double> scores;
  std::vector<std::map<int, double>> per_step_candidates;
};

// J(candidate | selected). For an empty selection every criterion reduces to I(x:y).
double score_candidate(const Criterion& c, int candidate, const std::vector<int>& selected,
                       const DiscretizedView& view, const std::vector<int>& labels,
                       info::LogBase base = info::LogBase::nats);

// Greedy forward search; ties go to the lowest feature index.
SelectionResult select_greedy(const Criterion& c, const DiscretizedView& view,
                              const std::vector<int>& labels, int T,
                              info::LogBase base = info::LogBase::nats,
                              bool keep_candidates = false);

Kind parse_kind(const std::string& name);
const char* to_string(Kind kind);

}  // namespace fsel::crit

#pragma once
#include <span>
#include <string>
#include <vector>

namespace fsel::info {

// Plug-in estimators over integer-coded columns (codes must be non-negative).
// Values are in nats unless base is bits.

enum class LogBase { nats, bits };

using Col = std::span<const int>;
using Cols = std::vector<Col>;

double entropy(Col col, LogBase base = LogBase::nats);
double joint_entropy(const Cols& cols, LogBase base = LogBase::nats);
double conditional_entropy(const Cols& cols, const Cols& given, LogBase base = LogBase::nats);
double mutual_information(const Cols& a, const Cols& b, LogBase base = LogBase::nats);
double conditional_mutual_information(const Cols& a, const Cols& b, const Cols& given,
                                      LogBase base = LogBase::nats);

// Dense ids 0..k-1 for the distinct tuples of `cols`, in order of first appearance.
std::vector<int> joint_codes(const Cols& cols, int* n_distinct = nullptr);

double to_base(double nats, LogBase base);
const char* to_string(LogBase base);
LogBase parse_log_base(const std::string& s);

}  // namespace fsel::info

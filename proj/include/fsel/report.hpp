#pragma once
#include <json.hpp>
#include <string>
#include <vector>

#include "fsel/data.hpp"
#include "fsel/eval.hpp"
#include "fsel/hofs.hpp"
#include "fsel/io.hpp"

namespace fsel::report {

using nlohmann::json;

json to_json(const LoadReport& r);
json to_json(const ica::IcaConfig& c);
json to_json(const hofs::HofsConfig& c);
json partition_json(const hofs::SubsetPartition& p, const DataTable& data);
json trace_json(const hofs::SelectionTrace& t, const DataTable& data);
json eval_json(const eval::EvalReport& r, const DataTable& data);
std::string eval_csv(const eval::EvalReport& r);
std::string features_csv(const std::vector<int>& order, const std::vector<double>& scores,
                         const DataTable& data);

}  // namespace fsel::report

#pragma once
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace fsel {

enum class FeatureKind { continuous, categorical };

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::size_t cells_imputed = 0;
  std::vector<FeatureKind> kinds;
};

// Column-major sample matrix. labels are class codes in [0, L).
struct DataTable {
  std::vector<std::vector<double>> columns;
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> feature_kinds;
  std::vector<int> labels;
  std::vector<std::string> class_names;  // original label token for each code
  LoadReport report;

  std::size_t n_samples() const { return labels.size(); }
  std::size_t n_features() const { return columns.size(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }

  // Throws DataError when a table invariant is broken.
  void validate() const;
};

struct DiscretizedView {
  std::vector<std::vector<int>> codes;
  std::vector<int> arity;                     // number of codes used per column
  std::vector<std::vector<double>> bin_edges;  // empty for categorical columns
  int bins = 0;
};

enum class MissingPolicy { drop, impute, reject };
enum class BinScheme { equal_frequency, equal_width };

struct CsvOptions {
  std::string label_column;  // empty: use label_index
  int label_index = -1;      // -1: last column
  char delimiter = ',';
  bool has_header = true;
  MissingPolicy missing = MissingPolicy::drop;
  std::map<std::string, FeatureKind> kind_overrides;
};

DataTable load_csv(const std::string& path, const CsvOptions& options = {});
// Writes features then the label as the last column "label".
void write_csv(const std::string& path, const DataTable& table);

// Integer valued with at most 32 distinct values.
FeatureKind infer_kind(const std::vector<double>& column);

DataTable standardize(const DataTable& table);

std::vector<int> discretize_column(const std::vector<double>& column, FeatureKind kind, int bins,
                                   BinScheme scheme, std::vector<double>* edges = nullptr);
DiscretizedView discretize(const DataTable& table, int bins = 5,
                           BinScheme scheme = BinScheme::equal_frequency);

const char* to_string(FeatureKind kind);
const char* to_string(BinScheme scheme);
BinScheme parse_bin_scheme(const std::string& s);

}  // namespace fsel

#include "fsel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "fsel/errors.hpp"
#include "fsel/io.hpp"

namespace fsel {

namespace {

using Row = std::vector<std::string>;

std::vector<Row> parse_delimited(const std::string& text, char delim) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == delim) {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_missing_token(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "?" ||
         s == "null";
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mode_of(const std::vector<double>& v) {
  std::map<double, std::size_t> counts;
  for (double x : v) ++counts[x];
  double best = 0.0;
  std::size_t bc = 0;
  for (auto& [x, c] : counts)
    if (c > bc) best = x, bc = c;
  return best;
}

}  // namespace

const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::continuous ? "continuous" : "categorical";
}

const char* to_string(BinScheme scheme) {
  return scheme == BinScheme::equal_frequency ? "equal_frequency" : "equal_width";
}

BinScheme parse_bin_scheme(const std::string& s) {
  if (s == "equal_frequency" || s == "eqfreq") return BinScheme::equal_frequency;
  if (s == "equal_width" || s == "eqwidth") return BinScheme::equal_width;
  throw ConfigError("unknown binning scheme: " + s);
}

void DataTable::validate() const {
  const std::size_t n = labels.size();
  if (n == 0) throw DataError("table has no samples");
  if (feature_names.size() != columns.size() || feature_kinds.size() != columns.size())
    throw DataError("feature metadata does not match column count");
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n)
      throw DataError("column '" + feature_names[j] + "' has wrong length");
    for (double v : columns[j])
      if (!std::isfinite(v)) throw DataError("column '" + feature_names[j] + "' has non-finite values");
  }
  const int L = n_classes();
  if (L < 2) throw DataError("need at least two classes");
  std::vector<char> seen(L, 0);
  for (int y : labels) {
    if (y < 0 || y >= L) throw DataError("label code out of range");
    seen[y] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw DataError("a class code has no samples");
}

FeatureKind infer_kind(const std::vector<double>& column) {
  std::set<double> distinct;
  for (double v : column) {
    if (v != std::floor(v)) return FeatureKind::continuous;
    distinct.insert(v);
    if (distinct.size() > 32) return FeatureKind::continuous;
  }
  return FeatureKind::categorical;
}

DataTable load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto rows = parse_delimited(ss.str(), options.delimiter);
  if (rows.empty()) throw DataError("empty file: " + path);

  Row header;
  std::size_t first = 0;
  const std::size_t width = rows[0].size();
  if (options.has_header) {
    header = rows[0];
    for (auto& h : header) h = trim(h);
    first = 1;
  } else {
    for (std::size_t j = 0; j < width; ++j) header.push_back("f" + std::to_string(j + 1));
  }
  if (width < 2) throw DataError("need at least one feature and a label column");

  std::size_t label_at = width - 1;
  if (!options.label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end()) throw DataError("label column absent: " + options.label_column);
    label_at = static_cast<std::size_t>(it - header.begin());
  } else if (options.label_index >= 0) {
    if (static_cast<std::size_t>(options.label_index) >= width)
      throw DataError("label column index out of range");
    label_at = static_cast<std::size_t>(options.label_index);
  }

  DataTable t;
  std::vector<std::size_t> feat_cols;
  for (std::size_t j = 0; j < width; ++j)
    if (j != label_at) {
      feat_cols.push_back(j);
      t.feature_names.push_back(header[j]);
    }
  const std::size_t M = feat_cols.size();

  // Raw cells, trimmed, with missing marked.
  std::vector<std::vector<std::optional<std::string>>> cells(M);
  std::vector<std::optional<std::string>> label_cells;
  std::size_t rows_read = 0;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.size() != width)
      throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(width));
    ++rows_read;
    auto cell = [&](std::size_t j) -> std::optional<std::string> {
      std::string v = trim(row[j]);
      if (is_missing_token(v)) return std::nullopt;
      return v;
    };
    for (std::size_t k = 0; k < M; ++k) cells[k].push_back(cell(feat_cols[k]));
    label_cells.push_back(cell(label_at));
  }

  // Per-column numeric parse; non-numeric columns become code-mapped categoricals.
  std::vector<std::vector<std::optional<double>>> values(M);
  std::vector<bool> string_coded(M, false);
  for (std::size_t k = 0; k < M; ++k) {
    bool numeric = true;
    values[k].resize(rows_read);
    for (std::size_t i = 0; i < rows_read; ++i) {
      if (!cells[k][i]) continue;
      auto v = parse_number(*cells[k][i]);
      if (!v) {
        numeric = false;
        break;
      }
      values[k][i] = std::isfinite(*v) ? v : std::nullopt;
    }
    if (numeric) continue;
    std::set<std::string> tokens;
    for (auto& c : cells[k])
      if (c) tokens.insert(*c);
    if (tokens.size() > 32)
      throw DataError("column '" + t.feature_names[k] + "' is neither numeric nor categorical");
    std::map<std::string, double> code;
    for (auto& tok : tokens) code.emplace(tok, static_cast<double>(code.size()));
    for (std::size_t i = 0; i < rows_read; ++i)
      values[k][i] = cells[k][i] ? std::optional<double>(code[*cells[k][i]]) : std::nullopt;
    string_coded[k] = true;
  }

  std::vector<bool> keep(rows_read, true);
  std::size_t dropped = 0, imputed = 0;
  for (std::size_t i = 0; i < rows_read; ++i) {
    bool miss_label = !label_cells[i].has_value();
    bool miss_feat = false;
    for (std::size_t k = 0; k < M; ++k) miss_feat |= !values[k][i].has_value();
    if (!miss_label && !miss_feat) continue;
    if (options.missing == MissingPolicy::reject)
      throw DataError("missing value in row " + std::to_string(i + 1 + first));
    if (miss_label || options.missing == MissingPolicy::drop) {
      keep[i] = false;
      ++dropped;
    }
  }
  if (dropped == rows_read) throw DataError("no usable rows in " + path);

  for (std::size_t k = 0; k < M; ++k) {
    std::vector<double> present;
    for (std::size_t i = 0; i < rows_read; ++i)
      if (keep[i] && values[k][i]) present.push_back(*values[k][i]);
    if (present.empty()) throw DataError("column '" + t.feature_names[k] + "' has no values");
    FeatureKind kind = string_coded[k] ? FeatureKind::categorical : infer_kind(present);
    if (auto it = options.kind_overrides.find(t.feature_names[k]); it != options.kind_overrides.end())
      kind = it->second;
    double fill = 0.0;
    if (options.missing == MissingPolicy::impute)
      fill = kind == FeatureKind::continuous ? median_of(present) : mode_of(present);
    std::vector<double> col;
    col.reserve(rows_read - dropped);
    for (std::size_t i = 0; i < rows_read; ++i) {
      if (!keep[i]) continue;
      if (values[k][i]) {
        col.push_back(*values[k][i]);
      } else {
        col.push_back(fill);
        ++imputed;
      }
    }
    t.columns.push_back(std::move(col));
    t.feature_kinds.push_back(kind);
  }

  // Labels: numeric tokens ordered by value, otherwise lexicographically.
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < rows_read; ++i)
    if (keep[i]) toks.push_back(*label_cells[i]);
  std::vector<std::string> classes(toks.begin(), toks.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  bool numeric_labels = std::all_of(classes.begin(), classes.end(),
                                    [](const std::string& s) { return parse_number(s).has_value(); });
  if (numeric_labels)
    std::stable_sort(classes.begin(), classes.end(), [](const std::string& a, const std::string& b) {
      return *parse_number(a) < *parse_number(b);
    });
  std::map<std::string, int> class_code;
  for (std::size_t c = 0; c < classes.size(); ++c) class_code[classes[c]] = static_cast<int>(c);
  for (auto& tok : toks) t.labels.push_back(class_code[tok]);
  t.class_names = classes;

  t.report.rows_read = rows_read;
  t.report.rows_dropped = dropped;
  t.report.cells_imputed = imputed;
  t.report.kinds = t.feature_kinds;
  t.validate();
  return t;
}

void write_csv(const std::string& path, const DataTable& table) {
  std::ostringstream out;
  for (auto& name : table.feature_names) out << name << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < table.n_samples(); ++i) {
    for (std::size_t j = 0; j < table.n_features(); ++j) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, table.columns[j][i]);
      out.write(buf, p - buf);
      out << ',';
    }
    out << table.class_names[table.labels[i]] << '\n';
  }
  write_file_atomic(path, out.str());
}

DataTable standardize(const DataTable& table) {
  DataTable t = table;
  for (std::size_t j = 0; j < t.n_features(); ++j) {
    if (t.feature_kinds[j] != FeatureKind::continuous) continue;
    auto& c = t.columns[j];
    const double n = static_cast<double>(c.size());
    double mean = std::accumulate(c.begin(), c.end(), 0.0) / n;
    double var = 0.0;
    for (double v : c) var += (v - mean) * (v - mean);
    var /= n;
    if (!(var > 0.0)) throw DataError("zero variance in column '" + t.feature_names[j] + "'");
    double sd = std::sqrt(var);
    for (double& v : c) v = (v - mean) / sd;
  }
  return t;
}

std::vector<int> discretize_column(const std::vector<double>& column, FeatureKind kind, int bins,
                                   BinScheme scheme, std::vector<double>* edges_out) {
  if (bins < 2) throw ConfigError("bin count must be at least 2");
  const std::size_t n = column.size();
  std::vector<int> codes(n, 0);
  if (edges_out) edges_out->clear();
  if (n == 0) return codes;

  std::vector<double> sorted(column);
  std::sort(sorted.begin(), sorted.end());
  if (kind == FeatureKind::categorical) {
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (std::size_t i = 0; i < n; ++i)
      codes[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), column[i]) - sorted.begin());
    return codes;
  }

  std::vector<double> edges;
  const double lo = sorted.front(), hi = sorted.back();
  if (scheme == BinScheme::equal_frequency) {
    // Bin b starts at the sample of rank floor(b*n/B); ties collapse edges.
    for (int b = 1; b < bins; ++b) {
      double e = sorted[static_cast<std::size_t>(static_cast<double>(b) * n / bins)];
      if (e > lo && (edges.empty() || e > edges.back())) edges.push_back(e);
    }
  } else if (hi > lo) {
    const double w = (hi - lo) / bins;
    for (int b = 1; b < bins; ++b) edges.push_back(lo + b * w);
  }
  for (std::size_t i = 0; i < n; ++i)
    codes[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), column[i]) - edges.begin());
  if (edges_out) *edges_out = std::move(edges);
  return codes;
}

DiscretizedView discretize(const DataTable& table, int bins, BinScheme scheme) {
  if (bins < 2) throw ConfigError("bin count must be at least 2");
  DiscretizedView v;
  v.bins = bins;
  for (std::size_t j = 0; j < table.n_features(); ++j) {
    std::vector<double> edges;
    auto codes = discretize_column(table.columns[j], table.feature_kinds[j], bins, scheme, &edges);
    int arity = codes.empty() ? 0 : *std::max_element(codes.begin(), codes.end()) + 1;
    v.codes.push_back(std::move(codes));
    v.arity.push_back(arity);
    v.bin_edges.push_back(std::move(edges));
  }
  return v;
}

}  // namespace fsel

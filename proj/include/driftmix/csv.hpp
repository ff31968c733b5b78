#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftmix/config.hpp"
#include "driftmix/format.hpp"
#include "driftmix/types.hpp"

namespace driftmix {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One row of a feature stream file.
struct StreamSample {
  std::size_t part = 0;      // 1-based split tag; 0 when absent
  std::string identity;      // ground-truth identity tag; empty when absent
  Label label = Label::normal;
  FeatureVector features;
};

/// Parsed feature stream. Metadata columns (part, id, class) are optional
/// and recognized by name in the mandatory header; every remaining column
/// is a feature, in order.
struct FeatureTable {
  bool has_part = false;
  bool has_id = false;
  bool has_class = false;
  std::size_t dimension = 0;
  std::vector<StreamSample> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

inline FeatureTable parse_feature_csv(std::istream& in) {
  FeatureTable table;
  std::string line;
  if (!std::getline(in, line)) throw CsvError("missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = detail::split_csv_line(line);
  std::size_t feature_start = 0;
  for (const std::string& name : header) {
    if (name == "part" && !table.has_part) {
      table.has_part = true;
    } else if (name == "id" && !table.has_id) {
      table.has_id = true;
    } else if (name == "class" && !table.has_class) {
      table.has_class = true;
    } else {
      break;
    }
    ++feature_start;
  }
  if (feature_start >= header.size()) throw CsvError("header declares no feature columns");
  table.dimension = header.size() - feature_start;

  std::size_t rowno = 1;
  while (std::getline(in, line)) {
    ++rowno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw CsvError("row " + std::to_string(rowno) + ": expected " +
                     std::to_string(header.size()) + " columns, got " +
                     std::to_string(fields.size()));
    }
    StreamSample sample;
    std::size_t col = 0;
    if (table.has_part) {
      std::int64_t p = 0;
      try {
        p = detail::parse_int(fields[col++], "part");
      } catch (const ConfigError&) {
        throw CsvError("row " + std::to_string(rowno) + ": non-integer part tag");
      }
      if (p < 0) throw CsvError("row " + std::to_string(rowno) + ": negative part tag");
      sample.part = static_cast<std::size_t>(p);
    }
    if (table.has_id) sample.identity = fields[col++];
    if (table.has_class) {
      const std::string& cls = fields[col++];
      if (cls == "normal") {
        sample.label = Label::normal;
      } else if (cls == "abnormal") {
        sample.label = Label::abnormal;
      } else {
        throw CsvError("row " + std::to_string(rowno) + ": class must be normal/abnormal, got '" +
                       cls + "'");
      }
    }
    sample.features.reserve(table.dimension);
    for (; col < fields.size(); ++col) {
      try {
        sample.features.push_back(detail::parse_double(fields[col], header[col]));
      } catch (const ConfigError&) {
        throw CsvError("row " + std::to_string(rowno) + ": non-numeric feature value '" +
                       fields[col] + "'");
      }
    }
    table.rows.push_back(std::move(sample));
  }
  return table;
}

inline FeatureTable load_feature_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open file: " + path);
  return parse_feature_csv(in);
}

/// Writes a labeled stream with part,id,class metadata columns. All numbers
/// use full round-trip precision.
inline void write_feature_csv(std::ostream& out, const std::vector<StreamSample>& rows,
                              std::size_t dimension) {
  out << "part,id,class";
  for (std::size_t j = 0; j < dimension; ++j) out << ",f" << j;
  out << '\n';
  for (const StreamSample& s : rows) {
    out << s.part << ',' << s.identity << ',' << to_string(s.label);
    for (double v : s.features) out << ',' << format_double(v);
    out << '\n';
  }
}

inline void save_feature_csv(const std::string& path, const std::vector<StreamSample>& rows,
                             std::size_t dimension) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot open file for writing: " + path);
  write_feature_csv(out, rows, dimension);
  if (!out) throw CsvError("write failed: " + path);
}

/// Per-sample run trace. Row count equals processed sample count; merge
/// events go to a companion file (see write_merge_csv).
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw CsvError("cannot open trace file for writing: " + path);
    out_ << "step,sample,score,hit,matched_mode,mode_count,label\n";
  }

  void record(std::int64_t step, const std::string& sample_id, const ScoredSample& s) {
    out_ << step << ',' << sample_id << ',' << format_double(s.score) << ','
         << (s.was_hit ? 1 : 0) << ',' << s.matched_mode_id << ',' << s.mode_count_after << ','
         << to_string(s.label) << '\n';
  }

  void close() {
    out_.flush();
    if (!out_) throw CsvError("trace write failed");
    out_.close();
  }

 private:
  std::ofstream out_;
};

inline void write_merge_csv(const std::string& path, const std::vector<MergeEvent>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot open merge log for writing: " + path);
  out << "step,absorbed_a,absorbed_b,result,distance\n";
  for (const MergeEvent& e : events) {
    out << e.step << ',' << e.absorbed_a << ',' << e.absorbed_b << ',' << e.result_id << ','
        << format_double(e.distance) << '\n';
  }
  if (!out) throw CsvError("merge log write failed: " + path);
}

/// Metric series as `step,value` rows — the plot-data format every
/// experiment report uses.
inline void write_series_csv(const std::string& path, const std::vector<double>& steps,
                             const std::vector<double>& values) {
  if (steps.size() != values.size()) {
    throw CsvError("series steps/values length mismatch");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CsvError("cannot open series file for writing: " + path);
  out << "step,value\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out << format_double(steps[i]) << ',' << format_double(values[i]) << '\n';
  }
  if (!out) throw CsvError("series write failed: " + path);
}

}  // namespace driftmix

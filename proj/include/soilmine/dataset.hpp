#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "soilmine/attributes.hpp"
#include "soilmine/error.hpp"
#include "soilmine/format.hpp"

namespace soilmine {

/// One laboratory soil test: the nine attributes in canonical order.
struct SoilSample {
  std::array<double, kNumAttributes> values{};

  double operator[](Attribute a) const { return values[index_of(a)]; }
  double& operator[](Attribute a) { return values[index_of(a)]; }

  double ph() const { return (*this)[Attribute::Ph]; }
  double ec() const { return (*this)[Attribute::EC]; }
  double oc() const { return (*this)[Attribute::OC]; }
  double p() const { return (*this)[Attribute::P]; }
  double k() const { return (*this)[Attribute::K]; }
  double fe() const { return (*this)[Attribute::Fe]; }
  double zn() const { return (*this)[Attribute::Zn]; }
  double mn() const { return (*this)[Attribute::Mn]; }
  double cu() const { return (*this)[Attribute::Cu]; }

  friend bool operator==(const SoilSample&, const SoilSample&) = default;
};

/// pH must lie in [0, 14]; every other attribute is a non-negative finite amount.
inline bool valid_value(Attribute a, double v) {
  if (!std::isfinite(v)) return false;
  if (a == Attribute::Ph) return v >= 0.0 && v <= 14.0;
  return v >= 0.0;
}

inline bool valid_sample(const SoilSample& s) {
  for (Attribute a : kAllAttributes) {
    if (!valid_value(a, s[a])) return false;
  }
  return true;
}

struct Dataset {
  std::vector<SoilSample> rows;
  std::optional<std::vector<FertilityClass>> labels;
  std::string provenance;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  bool labeled() const { return labels.has_value(); }

  std::vector<double> column(Attribute a) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[a]);
    return out;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Throws BadValue/LengthMismatch if `d` breaks a Dataset invariant.
inline void validate(const Dataset& d) {
  if (d.labels && d.labels->size() != d.rows.size()) {
    throw Error(ErrorCode::LengthMismatch, "label count differs from row count");
  }
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    for (Attribute a : kAllAttributes) {
      if (!valid_value(a, d.rows[i][a])) {
        throw Error(ErrorCode::BadValue, "value violates attribute range", i + 1,
                    std::string(name_of(a)));
      }
    }
  }
}

/// Rows (and labels) at the given indices, in the order given.
inline Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out;
  out.provenance = d.provenance;
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(d.rows[i]);
  if (d.labels) {
    out.labels.emplace();
    out.labels->reserve(indices.size());
    for (std::size_t i : indices) out.labels->push_back((*d.labels)[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion

/// A dataset as read from disk, before missing cells are resolved.
struct RawDataset {
  using Row = std::array<std::optional<double>, kNumAttributes>;
  std::vector<Row> rows;
  std::optional<std::vector<FertilityClass>> labels;
  std::string provenance;
};

inline RawDataset to_raw(const Dataset& d) {
  RawDataset raw;
  raw.labels = d.labels;
  raw.provenance = d.provenance;
  raw.rows.reserve(d.rows.size());
  for (const auto& s : d.rows) {
    RawDataset::Row r;
    for (std::size_t j = 0; j < kNumAttributes; ++j) r[j] = s.values[j];
    raw.rows.push_back(r);
  }
  return raw;
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool is_missing_token(std::string_view s) { return s.empty() || s == "?"; }

}  // namespace detail

/// Parses CSV text. Header columns are matched case-insensitively against the
/// attribute names plus an optional `Fertility` column; unknown columns are
/// ignored. Empty fields and `?` are kept as gaps. Rows are numbered from 1
/// (the first line after the header).
inline RawDataset parse_csv(std::string_view text, bool require_labels,
                            std::string provenance = "csv") {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto pos = text.find('\n', start);
      if (pos == std::string_view::npos) pos = text.size();
      lines.push_back(text.substr(start, pos - start));
      start = pos + 1;
    }
  }
  std::size_t cursor = 0;
  while (cursor < lines.size() && trim(lines[cursor]).empty()) ++cursor;
  if (cursor == lines.size()) throw Error(ErrorCode::MissingColumn, "file has no header row");

  std::string_view header_line = lines[cursor++];
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const auto header = detail::split_commas(header_line);

  std::array<std::optional<std::size_t>, kNumAttributes> column_of{};
  std::optional<std::size_t> label_column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (auto a = parse_attribute(header[c])) {
      if (column_of[index_of(*a)]) {
        throw Error(ErrorCode::DuplicateColumn, "header repeats a column", std::nullopt,
                    std::string(name_of(*a)));
      }
      column_of[index_of(*a)] = c;
    } else if (detail::iequals(header[c], "Fertility")) {
      if (label_column) {
        throw Error(ErrorCode::DuplicateColumn, "header repeats a column", std::nullopt,
                    "Fertility");
      }
      label_column = c;
    }
  }
  for (Attribute a : kAllAttributes) {
    if (!column_of[index_of(a)]) {
      throw Error(ErrorCode::MissingColumn, "header lacks a required attribute", std::nullopt,
                  std::string(name_of(a)));
    }
  }
  if (require_labels && !label_column) {
    throw Error(ErrorCode::MissingLabel, "labels required but no Fertility column",
                std::nullopt, "Fertility");
  }

  RawDataset raw;
  raw.provenance = std::move(provenance);
  if (label_column) raw.labels.emplace();
  std::size_t row_number = 0;
  for (; cursor < lines.size(); ++cursor) {
    if (trim(lines[cursor]).empty()) continue;
    ++row_number;
    const auto fields = detail::split_commas(lines[cursor]);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::BadValue,
                  "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()),
                  row_number);
    }
    RawDataset::Row row;
    for (Attribute a : kAllAttributes) {
      const std::string_view cell = fields[*column_of[index_of(a)]];
      if (detail::is_missing_token(cell)) continue;
      const auto v = parse_double(cell);
      if (!v || !valid_value(a, *v)) {
        throw Error(ErrorCode::BadValue, "bad number '" + std::string(cell) + "'", row_number,
                    std::string(name_of(a)));
      }
      row[index_of(a)] = *v;
    }
    raw.rows.push_back(row);
    if (label_column) {
      const std::string_view token = fields[*label_column];
      const auto cls = parse_class(token);
      if (!cls) {
        throw Error(ErrorCode::BadValue, "unknown class token '" + std::string(token) + "'",
                    row_number, "Fertility");
      }
      raw.labels->push_back(*cls);
    }
  }
  return raw;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RawDataset read_csv_raw(const std::string& path, bool require_labels) {
  return parse_csv(read_text_file(path), require_labels, path);
}

// ---------------------------------------------------------------------------
// Missing values

enum class ImputeStrategy { Reject, ColumnMean };

/// Resolves gaps. `Reject` fails on the first gap in row-major order;
/// `ColumnMean` fills each gap with the mean of that column's present values.
inline Dataset impute_missing(const RawDataset& raw, ImputeStrategy strategy) {
  std::array<double, kNumAttributes> fill{};
  if (strategy == ImputeStrategy::Reject) {
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
      for (Attribute a : kAllAttributes) {
        if (!raw.rows[i][index_of(a)]) {
          throw Error(ErrorCode::MissingValue, "gap under reject strategy", i + 1,
                      std::string(name_of(a)));
        }
      }
    }
  } else if (!raw.rows.empty()) {
    for (Attribute a : kAllAttributes) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& row : raw.rows) {
        if (const auto& v = row[index_of(a)]) {
          sum += *v;
          ++count;
        }
      }
      if (count == 0) {
        throw Error(ErrorCode::EmptyColumn, "column has no values", std::nullopt,
                    std::string(name_of(a)));
      }
      fill[index_of(a)] = sum / static_cast<double>(count);
    }
  }

  Dataset d;
  d.provenance = raw.provenance;
  d.labels = raw.labels;
  d.rows.reserve(raw.rows.size());
  for (const auto& row : raw.rows) {
    SoilSample s;
    for (std::size_t j = 0; j < kNumAttributes; ++j) s.values[j] = row[j].value_or(fill[j]);
    d.rows.push_back(s);
  }
  validate(d);
  return d;
}

/// Reads and validates a CSV file; gaps are resolved with `strategy`.
inline Dataset load_csv(const std::string& path, bool require_labels,
                        ImputeStrategy strategy = ImputeStrategy::Reject) {
  return impute_missing(read_csv_raw(path, require_labels), strategy);
}

/// Canonical header and column order; numbers use the shortest text that
/// round-trips exactly, so load_csv(write_csv(d)) == d.
inline void write_csv(const Dataset& d, std::ostream& out) {
  for (std::size_t j = 0; j < kNumAttributes; ++j) {
    if (j) out << ',';
    out << kAttributeNames[j];
  }
  if (d.labels) out << ",Fertility";
  out << '\n';
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    for (std::size_t j = 0; j < kNumAttributes; ++j) {
      if (j) out << ',';
      out << format_shortest(d.rows[i].values[j]);
    }
    if (d.labels) out << ',' << name_of((*d.labels)[i]);
    out << '\n';
  }
}

inline std::string to_csv(const Dataset& d) {
  std::ostringstream ss;
  write_csv(d, ss);
  return ss.str();
}

inline void write_csv_file(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  write_csv(d, out);
}

// ---------------------------------------------------------------------------
// Summary

struct AttributeSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) form; 0 for a single row
};

struct DatasetSummary {
  std::size_t count = 0;
  std::array<AttributeSummary, kNumAttributes> attributes{};
  std::optional<std::array<std::size_t, kNumClasses>> class_histogram;
};

inline DatasetSummary dataset_summary(const Dataset& d) {
  if (d.empty()) throw Error(ErrorCode::EmptyDataset, "summary of an empty dataset");
  DatasetSummary out;
  out.count = d.size();
  const double n = static_cast<double>(d.size());
  for (Attribute a : kAllAttributes) {
    auto& s = out.attributes[index_of(a)];
    s.min = s.max = d.rows.front()[a];
    double sum = 0.0;
    for (const auto& r : d.rows) {
      s.min = std::min(s.min, r[a]);
      s.max = std::max(s.max, r[a]);
      sum += r[a];
    }
    s.mean = sum / n;
    if (d.size() > 1) {
      double ss = 0.0;
      for (const auto& r : d.rows) ss += (r[a] - s.mean) * (r[a] - s.mean);
      s.stddev = std::sqrt(ss / (n - 1.0));
    }
  }
  if (d.labels) {
    out.class_histogram.emplace();
    out.class_histogram->fill(0);
    for (FertilityClass c : *d.labels) ++(*out.class_histogram)[index_of(c)];
  }
  return out;
}

}  // namespace soilmine

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eigenparity/errors.hpp"
#include "eigenparity/linalg.hpp"
#include "eigenparity/warnings.hpp"

namespace eigenparity {

/// Dated per-asset return panel. Missing values are explicit NaNs, never
/// silent zeros; every consumer must check is_missing.
class ReturnsPanel {
 public:
  ReturnsPanel() = default;
  ReturnsPanel(std::vector<std::string> dates, std::vector<std::string> assets, Matrix returns,
               bool normalized = false)
      : dates_(std::move(dates)), assets_(std::move(assets)), returns_(std::move(returns)), normalized_(normalized) {
    if (returns_.rows() != dates_.size() || returns_.cols() != assets_.size())
      throw data_error("ReturnsPanel: shape does not match date/asset labels");
    for (std::size_t t = 1; t < dates_.size(); ++t)
      if (dates_[t - 1] >= dates_[t])
        throw data_error("ReturnsPanel: dates must be strictly increasing (row " + std::to_string(t) + ")");
  }

  std::size_t days() const { return dates_.size(); }
  std::size_t n_assets() const { return assets_.size(); }

  const std::vector<std::string>& dates() const { return dates_; }
  const std::vector<std::string>& assets() const { return assets_; }
  const Matrix& values() const { return returns_; }

  double value(std::size_t t, std::size_t i) const { return returns_(t, i); }
  bool is_missing(std::size_t t, std::size_t i) const { return std::isnan(returns_(t, i)); }
  bool normalized() const { return normalized_; }

  /// Copy of the first `t_end` rows; used by no-look-ahead checks.
  ReturnsPanel truncated(std::size_t t_end) const {
    std::vector<std::string> dates(dates_.begin(), dates_.begin() + t_end);
    Matrix values(t_end, n_assets());
    for (std::size_t t = 0; t < t_end; ++t)
      for (std::size_t i = 0; i < n_assets(); ++i) values(t, i) = returns_(t, i);
    return ReturnsPanel(std::move(dates), assets_, std::move(values), normalized_);
  }

 private:
  std::vector<std::string> dates_;
  std::vector<std::string> assets_;
  Matrix returns_;
  bool normalized_ = false;
};

namespace csv {

/// Shortest decimal form that round-trips to the same double; the backbone
/// of the byte-identical rerun guarantee.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

/// RFC-4180 record reader over a whole file: quoted fields may contain
/// commas, doubled quotes, and newlines.
inline std::vector<std::vector<std::string>> parse_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&]() {
    end_field();
    // Skip records that are entirely empty (trailing newline).
    if (!(record.size() == 1 && record[0].empty())) records.push_back(record);
    record.clear();
  };

  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() || field_started || !record.empty()) end_record();
    } else if (c == '\r') {
      // consumed; \r\n handled by the \n branch
    } else {
      field += c;
      field_started = true;
    }
  }
  if (!field.empty() || field_started || !record.empty()) end_record();
  if (in_quotes) throw data_error("CSV: unterminated quoted field");
  return records;
}

}  // namespace csv

struct CsvOptions {
  /// When true, cells that fail numeric parsing become missing values
  /// instead of raising a parse error.
  bool nonnumeric_as_missing = false;
};

namespace detail {

inline bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace detail

/// Loads a return panel. Schema: header `date,ASSET1,...`; first column
/// ISO-8601 dates; cells are decimal returns, empty = missing.
inline ReturnsPanel load_csv(const std::string& path, const CsvOptions& options = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto records = csv::parse_records(buffer.str());

  if (records.empty()) throw data_error(path + ": empty file");
  const auto& header = records.front();
  if (header.size() < 3) throw data_error(path + ": fewer than 2 asset columns");
  if (header[0] != "date") throw data_error(path + ": header must start with 'date'");

  std::vector<std::string> assets(header.begin() + 1, header.end());
  const std::size_t n = assets.size();
  const std::size_t t_rows = records.size() - 1;

  std::vector<std::string> dates;
  dates.reserve(t_rows);
  Matrix values(t_rows, n);

  for (std::size_t t = 0; t < t_rows; ++t) {
    const auto& row = records[t + 1];
    if (row.size() != n + 1)
      throw data_error(path + ": row " + std::to_string(t + 2) + " has " + std::to_string(row.size()) +
                       " fields, expected " + std::to_string(n + 1));
    if (!detail::valid_iso_date(row[0]))
      throw data_error(path + ": row " + std::to_string(t + 2) + ": invalid ISO-8601 date '" + row[0] + "'");
    if (!dates.empty() && row[0] <= dates.back())
      throw data_error(path + ": row " + std::to_string(t + 2) + ": date '" + row[0] +
                       "' is not strictly after the previous row");
    dates.push_back(row[0]);

    for (std::size_t i = 0; i < n; ++i) {
      const std::string& cell = row[i + 1];
      if (cell.empty()) {
        values(t, i) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double parsed = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        if (options.nonnumeric_as_missing) {
          values(t, i) = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        throw data_error(path + ": row " + std::to_string(t + 2) + ", column '" + assets[i] +
                         "': malformed cell '" + cell + "'");
      }
      values(t, i) = parsed;
    }
  }
  return ReturnsPanel(std::move(dates), std::move(assets), std::move(values));
}

inline void save_csv(const ReturnsPanel& panel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write file: " + path);
  out << "date";
  for (const auto& asset : panel.assets()) out << ',' << csv::quote_field(asset);
  out << '\n';
  for (std::size_t t = 0; t < panel.days(); ++t) {
    out << panel.dates()[t];
    for (std::size_t i = 0; i < panel.n_assets(); ++i) {
      out << ',';
      if (!panel.is_missing(t, i)) out << csv::format_double(panel.value(t, i));
    }
    out << '\n';
  }
}

enum class NormalizationMode { rolling, full_sample };

/// Divides each return by a trailing rolling standard deviation computed
/// strictly before t (causal). Rows inside the warm-up window come out
/// missing. full_sample mode instead divides each column by its whole-sample
/// std, which is handy for reproducible unit tests but is not causal.
inline ReturnsPanel normalize_panel(const ReturnsPanel& panel, std::size_t window,
                                    NormalizationMode mode = NormalizationMode::rolling) {
  if (window < 2) throw data_error("normalize_panel: window must be >= 2");
  const std::size_t t_rows = panel.days();
  const std::size_t n = panel.n_assets();
  Matrix out(t_rows, n, std::numeric_limits<double>::quiet_NaN());
  std::size_t floored = 0;

  auto std_of = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (mode == NormalizationMode::full_sample) {
      std::vector<double> col;
      for (std::size_t t = 0; t < t_rows; ++t)
        if (!panel.is_missing(t, i)) col.push_back(panel.value(t, i));
      if (col.size() < 2) throw data_error("normalize_panel: asset '" + panel.assets()[i] + "' has < 2 observations");
      double sd = std_of(col);
      if (sd < 1e-8) {
        sd = 1e-8;
        ++floored;
      }
      for (std::size_t t = 0; t < t_rows; ++t)
        if (!panel.is_missing(t, i)) out(t, i) = panel.value(t, i) / sd;
      continue;
    }

    for (std::size_t t = window; t < t_rows; ++t) {
      if (panel.is_missing(t, i)) continue;
      std::vector<double> trailing;
      trailing.reserve(window);
      for (std::size_t s = t - window; s < t; ++s)
        if (!panel.is_missing(s, i)) trailing.push_back(panel.value(s, i));
      if (trailing.size() < 2) continue;  // cannot estimate dispersion: stays missing
      double sd = std_of(trailing);
      if (sd < 1e-8) {
        sd = 1e-8;
        ++floored;
      }
      out(t, i) = panel.value(t, i) / sd;
    }
  }
  if (floored > 0)
    warnings::emit("normalize_panel: trailing dispersion floored at 1e-8 for " + std::to_string(floored) + " cells");
  return ReturnsPanel(panel.dates(), panel.assets(), std::move(out), true);
}

}  // namespace eigenparity

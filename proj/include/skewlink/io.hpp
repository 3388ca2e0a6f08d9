#ifndef SKEWLINK_IO_HPP
#define SKEWLINK_IO_HPP

// CSV ingestion for grouped binomial and multinomial data.
//
// Binomial files carry a header row, covariate columns and a success and a
// trial column. Multinomial files carry covariate columns and K count columns.
// A covariate token is a column name, optionally raised to an integer power
// ("dose^2"). An intercept column is always prepended.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skewlink/dataset.hpp"
#include "skewlink/multinomial_data.hpp"

namespace skewlink {

/// Load failure with the offending (1-based data) row and column when known.
class LoadError : public std::runtime_error {
 public:
  explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::string_view kInterceptName = "(Intercept)";

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    throw LoadError("missing column '" + name + "'");
  }
};

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw LoadError("row " + std::to_string(t.rows.size() + 1) + ": expected " + std::to_string(t.header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw LoadError("empty CSV input (no header row)");
  return t;
}

inline double parse_number(const std::string& cell, std::size_t row, const std::string& col) {
  double v = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty() || !std::isfinite(v))
    throw LoadError("row " + std::to_string(row) + ", column '" + col + "': non-numeric value '" + cell + "'");
  return v;
}

inline std::int64_t parse_count(const std::string& cell, std::size_t row, const std::string& col) {
  const double v = parse_number(cell, row, col);
  if (v != std::floor(v))
    throw LoadError("row " + std::to_string(row) + ", column '" + col + "': count must be an integer");
  if (v < 0) throw LoadError("row " + std::to_string(row) + ", column '" + col + "': count must be nonnegative");
  return static_cast<std::int64_t>(v);
}

struct CovariateTerm {
  std::string column;
  int power = 1;
  std::string name;
};

inline CovariateTerm parse_term(const std::string& token) {
  CovariateTerm term;
  term.name = token;
  const auto caret = token.find('^');
  term.column = token.substr(0, caret);
  if (caret != std::string::npos) {
    const auto p = token.substr(caret + 1);
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), term.power);
    if (ec != std::errc() || ptr != p.data() + p.size() || term.power < 1)
      throw LoadError("bad covariate term '" + token + "'");
  }
  return term;
}

inline std::vector<double> covariate_row(const CsvTable& t, const std::vector<CovariateTerm>& terms,
                                         const std::vector<std::size_t>& cols, std::size_t i,
                                         const std::map<std::string, double>& scale) {
  std::vector<double> x{1.0};
  for (std::size_t k = 0; k < terms.size(); ++k) {
    double v = parse_number(t.rows[i][cols[k]], i + 1, terms[k].column);
    if (auto it = scale.find(terms[k].column); it != scale.end()) v /= it->second;
    x.push_back(std::pow(v, terms[k].power));
  }
  return x;
}

inline std::vector<std::string> covariate_names(const std::vector<CovariateTerm>& terms) {
  std::vector<std::string> names{std::string(kInterceptName)};
  for (const auto& t : terms) names.push_back(t.name);
  return names;
}

}  // namespace detail

/// Divisors applied to raw covariate columns before powers are taken.
using ColumnScale = std::map<std::string, double>;

inline GroupedDataset parse_binomial_csv(std::istream& in, const std::vector<std::string>& covariate_cols,
                                         const std::string& success_col, const std::string& trial_col,
                                         const ColumnScale& scale = {}) {
  const auto t = detail::read_csv(in);
  std::vector<detail::CovariateTerm> terms;
  std::vector<std::size_t> cols;
  for (const auto& c : covariate_cols) {
    terms.push_back(detail::parse_term(c));
    cols.push_back(t.column(terms.back().column));
  }
  const auto sc = t.column(success_col);
  const auto tc = t.column(trial_col);

  GroupedDataset data;
  data.covariate_names = detail::covariate_names(terms);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    GroupedRow row;
    row.x = detail::covariate_row(t, terms, cols, i, scale);
    row.successes = detail::parse_count(t.rows[i][sc], i + 1, success_col);
    row.trials = detail::parse_count(t.rows[i][tc], i + 1, trial_col);
    if (row.trials == 0) throw LoadError("row " + std::to_string(i + 1) + ", column '" + trial_col + "': zero trials");
    if (row.successes > row.trials)
      throw LoadError("row " + std::to_string(i + 1) + ", column '" + success_col + "': successes (" +
                      std::to_string(row.successes) + ") exceed trials (" + std::to_string(row.trials) + ")");
    data.rows.push_back(std::move(row));
  }
  return data;
}

inline GroupedDataset parse_binomial_csv(const std::string& path, const std::vector<std::string>& covariate_cols,
                                         const std::string& success_col, const std::string& trial_col,
                                         const ColumnScale& scale = {}) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open data file '" + path + "'");
  return parse_binomial_csv(in, covariate_cols, success_col, trial_col, scale);
}

inline MultinomialDataset parse_multinomial_csv(std::istream& in, const std::vector<std::string>& covariate_cols,
                                                const std::vector<std::string>& count_cols,
                                                const ColumnScale& scale = {}) {
  if (count_cols.size() < 2) throw LoadError("multinomial data needs at least two count columns");
  const auto t = detail::read_csv(in);
  std::vector<detail::CovariateTerm> terms;
  std::vector<std::size_t> cols;
  for (const auto& c : covariate_cols) {
    terms.push_back(detail::parse_term(c));
    cols.push_back(t.column(terms.back().column));
  }
  std::vector<std::size_t> kc;
  for (const auto& c : count_cols) kc.push_back(t.column(c));

  MultinomialDataset data;
  data.covariate_names = detail::covariate_names(terms);
  data.category_labels = count_cols;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    MultinomialRow row;
    row.x = detail::covariate_row(t, terms, cols, i, scale);
    for (std::size_t k = 0; k < kc.size(); ++k)
      row.counts.push_back(detail::parse_count(t.rows[i][kc[k]], i + 1, count_cols[k]));
    if (row.total() < 1) throw LoadError("row " + std::to_string(i + 1) + ": all counts are zero");
    data.rows.push_back(std::move(row));
  }
  return data;
}

inline MultinomialDataset parse_multinomial_csv(const std::string& path,
                                                const std::vector<std::string>& covariate_cols,
                                                const std::vector<std::string>& count_cols,
                                                const ColumnScale& scale = {}) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open data file '" + path + "'");
  return parse_multinomial_csv(in, covariate_cols, count_cols, scale);
}

/// FNV-1a 64-bit hash, used for dataset fingerprints and pinned checksums.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

namespace detail {
inline void put_double(std::ostringstream& os, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, ptr - buf);
}
}  // namespace detail

/// Content hash of a dataset's covariates and counts (names included).
inline std::string fingerprint(const GroupedDataset& data) {
  std::ostringstream os;
  for (const auto& n : data.covariate_names) os << n << ';';
  for (const auto& r : data.rows) {
    os << '\n';
    for (double v : r.x) {
      detail::put_double(os, v);
      os << ',';
    }
    os << r.successes << ',' << r.trials;
  }
  return hex64(fnv1a64(os.str()));
}

inline std::string fingerprint(const MultinomialDataset& data) {
  std::ostringstream os;
  for (const auto& n : data.covariate_names) os << n << ';';
  for (const auto& n : data.category_labels) os << n << '|';
  for (const auto& r : data.rows) {
    os << '\n';
    for (double v : r.x) {
      detail::put_double(os, v);
      os << ',';
    }
    for (auto c : r.counts) os << c << ',';
  }
  return hex64(fnv1a64(os.str()));
}

}  // namespace skewlink

#endif  // SKEWLINK_IO_HPP

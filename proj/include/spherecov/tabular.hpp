#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <math.h>  // pchip calls unqualified isnan
#include <unistd.h>

#include <boost/math/interpolators/pchip.hpp>

#include "spherecov/error.hpp"

namespace spherecov::tabular {

/// Shortest decimal text that reads back to the same double; integral values
/// keep a trailing ".0" so they stay recognizably real.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Strict decimal parse of a whole field ('.' separator, no trailing junk).
inline bool parse_number(std::string_view text, double &out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Numeric CSV rows. Blank lines and lines starting with '#' are skipped;
/// a first line that does not parse as numbers is taken as a header.
/// `columns` = 0 accepts any width but requires all rows to agree.
inline std::vector<std::vector<double>> read_numeric_csv(std::istream &in,
                                                         std::size_t columns,
                                                         const std::string &name) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<double> row;
    bool ok = true;
    for (auto field : split(t)) {
      double v = 0.0;
      if (!parse_number(field, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first_content) {
        first_content = false;
        continue;
      }
      throw error(errc::invalid_argument,
                  name + ": line " + std::to_string(line_no) + " is not numeric");
    }
    first_content = false;
    const std::size_t want = columns ? columns : (rows.empty() ? row.size() : rows[0].size());
    if (row.size() != want) {
      throw error(errc::invalid_argument, name + ": line " + std::to_string(line_no) +
                                              " has " + std::to_string(row.size()) +
                                              " columns, expected " + std::to_string(want));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::vector<double>> read_numeric_csv_file(const std::string &path,
                                                              std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw error(errc::invalid_argument, "cannot open \"" + path + "\"");
  return read_numeric_csv(in, columns, path);
}

/// A function on [-1, 1] known through samples (x_i, g(x_i)), interpolated by
/// the monotone piecewise-cubic Hermite rule (Fritsch-Butland weighted
/// harmonic-mean slopes; one-sided slopes at the ends). The nodes must be
/// strictly increasing, number at least 4, and span [-1, 1].
class TableFunction {
public:
  TableFunction(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw error(errc::invalid_argument, "table columns differ in length");
    if (x.size() < 4) throw error(errc::invalid_argument, "table needs at least 4 nodes");
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] > x[i - 1])) {
        throw error(errc::invalid_argument,
                    "table abscissae must be strictly increasing (row " + std::to_string(i) + ")");
      }
    }
    if (x.front() > -1.0 || x.back() < 1.0) {
      throw error(errc::invalid_argument, "table must cover [-1, 1]");
    }
    nodes_ = x.size();
    interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
        std::move(x), std::move(y));
  }

  static TableFunction from_rows(const std::vector<std::vector<double>> &rows) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto &r : rows) {
      x.push_back(r.at(0));
      y.push_back(r.at(1));
    }
    return TableFunction(std::move(x), std::move(y));
  }

  std::size_t nodes() const noexcept { return nodes_; }
  double operator()(double x) const { return (*interp_)(x); }

private:
  std::size_t nodes_ = 0;
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

/// Writes via a temporary sibling file and renames it into place, so a failed
/// command never leaves a partial output file.
template <class Writer>
void write_atomically(const std::string &path, Writer &&writer) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error(errc::invalid_argument, "cannot write \"" + tmp.string() + "\"");
    try {
      writer(out);
      out.flush();
      if (!out) throw error(errc::invalid_argument, "write to \"" + tmp.string() + "\" failed");
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw error(errc::invalid_argument, "cannot move output into \"" + path + "\"");
  }
}

}  // namespace spherecov::tabular

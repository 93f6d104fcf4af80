#include "frontier/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace frontier {

namespace {

// Splits one CSV record. Quoted fields may contain commas and doubled quotes;
// embedded newlines are not supported.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

void check_block(const MatrixXd& m, const char* name, Index n, ValidationReport& report) {
  if (m.rows() != n) {
    report.violations.push_back({"row_count", name, -1, -1,
                                 std::string("block ") + name + " has " + std::to_string(m.rows()) +
                                     " rows, expected " + std::to_string(n)});
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        report.violations.push_back({"non_finite", name, i, j,
                                     std::string("non-finite value in ") + name + " at row " +
                                         std::to_string(i) + ", column " + std::to_string(j)});
      }
    }
  }
}

void write_names(std::ostream& out, const std::vector<std::string>& names, const char* prefix,
                 Index cols, bool& first) {
  for (Index j = 0; j < cols; ++j) {
    if (!first) out << ',';
    first = false;
    if (static_cast<std::size_t>(j) < names.size()) {
      out << names[j];
    } else {
      out << prefix << (j + 1);
    }
  }
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << violations.size() << " validation error(s)";
  for (const auto& v : violations) os << "; " << v.message;
  return os.str();
}

ValidationReport validate(const Dataset& ds, const ValidationRequirements& req) {
  ValidationReport report;
  const Index n = ds.x.rows();
  if (n < 1) report.violations.push_back({"empty", "", -1, -1, "dataset has no observations"});
  if (ds.x.cols() < 1) report.violations.push_back({"no_inputs", "x", -1, -1, "at least one input column is required"});
  if (ds.y.cols() < 1) report.violations.push_back({"no_outputs", "y", -1, -1, "at least one output column is required"});
  check_block(ds.x, "x", n, report);
  check_block(ds.y, "y", n, report);
  if (ds.z) check_block(*ds.z, "z", n, report);
  if (ds.b) check_block(*ds.b, "b", n, report);

  if (req.single_output && ds.y.cols() != 1) {
    report.violations.push_back({"single_output", "y", -1, -1,
                                 "model requires exactly one output column, got " + std::to_string(ds.y.cols())});
  }
  if (req.require_z && (!ds.z || ds.z->cols() == 0)) {
    report.violations.push_back({"missing_z", "z", -1, -1, "model requires contextual variables"});
  }
  if (req.require_b && (!ds.b || ds.b->cols() == 0)) {
    report.violations.push_back({"missing_b", "b", -1, -1, "model requires undesirable outputs"});
  }
  if (req.positive_y) {
    for (Index i = 0; i < ds.y.rows(); ++i) {
      for (Index j = 0; j < ds.y.cols(); ++j) {
        if (!(ds.y(i, j) > 0.0)) {
          report.violations.push_back({"positivity", "y", i, j,
                                       "output must be strictly positive for a multiplicative model at row " +
                                           std::to_string(i) + ", column " + std::to_string(j)});
        }
      }
    }
  }
  return report;
}

void ensure_valid(const Dataset& ds, const ValidationRequirements& req) {
  const auto report = validate(ds, req);
  if (!report.ok()) throw Error(ErrorKind::data, report.summary());
}

Dataset read_csv(std::istream& in, const std::string& source, const std::vector<std::string>& x_select,
                 const std::vector<std::string>& y_select, const std::vector<std::string>& z_select,
                 const std::vector<std::string>& b_select) {
  if (x_select.empty() || y_select.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty selection: at least one input and one output column required");
  }
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::data, source + ": missing header row");
  std::vector<std::string> header = split_record(line);
  std::unordered_map<std::string, std::size_t> column;
  std::unordered_map<std::string, int> seen;
  for (std::size_t j = 0; j < header.size(); ++j) {
    header[j] = trim(header[j]);
    column[header[j]] = j;
    ++seen[header[j]];
  }

  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<std::size_t> idx;
    for (const auto& name : names) {
      auto it = seen.find(name);
      if (it == seen.end()) throw Error(ErrorKind::unknown_column, source + ": unknown column '" + name + "'");
      if (it->second != 1) throw Error(ErrorKind::data, source + ": column '" + name + "' appears more than once");
      idx.push_back(column.at(name));
    }
    return idx;
  };
  const auto xi = resolve(x_select);
  const auto yi = resolve(y_select);
  const auto zi = resolve(z_select);
  const auto bi = resolve(b_select);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::data, source + ": line " + std::to_string(line_no) + " has " +
                                       std::to_string(fields.size()) + " fields, header has " +
                                       std::to_string(header.size()));
    }
    std::vector<double> row(header.size(), 0.0);
    auto parse_selected = [&](const std::vector<std::size_t>& idx) {
      for (std::size_t j : idx) {
        if (!parse_double(fields[j], row[j])) {
          throw Error(ErrorKind::non_numeric, source + ": non-numeric cell at row " + std::to_string(rows.size() + 1) +
                                                  ", column '" + header[j] + "': '" + fields[j] + "'");
        }
        if (!std::isfinite(row[j])) {
          throw Error(ErrorKind::non_numeric, source + ": non-finite cell at row " + std::to_string(rows.size() + 1) +
                                                  ", column '" + header[j] + "'");
        }
      }
    };
    parse_selected(xi);
    parse_selected(yi);
    parse_selected(zi);
    parse_selected(bi);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::data, source + ": no data rows");

  const Index n = static_cast<Index>(rows.size());
  auto project = [&](const std::vector<std::size_t>& idx) {
    MatrixXd m(n, static_cast<Index>(idx.size()));
    for (Index i = 0; i < n; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) m(i, static_cast<Index>(j)) = rows[i][idx[j]];
    return m;
  };

  Dataset ds;
  ds.x = project(xi);
  ds.y = project(yi);
  ds.x_names = x_select;
  ds.y_names = y_select;
  if (!zi.empty()) {
    ds.z = project(zi);
    ds.z_names = z_select;
  }
  if (!bi.empty()) {
    ds.b = project(bi);
    ds.b_names = b_select;
  }
  ensure_valid(ds);
  return ds;
}

Dataset load_csv(const std::string& path, const std::vector<std::string>& x_select,
                 const std::vector<std::string>& y_select, const std::vector<std::string>& z_select,
                 const std::vector<std::string>& b_select) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return read_csv(in, path, x_select, y_select, z_select, b_select);
}

void write_csv(std::ostream& out, const Dataset& ds) {
  bool first = true;
  write_names(out, ds.x_names, "x", ds.m(), first);
  write_names(out, ds.y_names, "y", ds.q(), first);
  if (ds.z) write_names(out, ds.z_names, "z", ds.r(), first);
  if (ds.b) write_names(out, ds.b_names, "b", ds.s(), first);
  out << '\n';
  char buf[32];
  auto emit = [&](double v, bool& lead) {
    if (!lead) out << ',';
    lead = false;
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Index i = 0; i < ds.n(); ++i) {
    bool lead = true;
    for (Index j = 0; j < ds.m(); ++j) emit(ds.x(i, j), lead);
    for (Index j = 0; j < ds.q(); ++j) emit(ds.y(i, j), lead);
    if (ds.z)
      for (Index j = 0; j < ds.r(); ++j) emit((*ds.z)(i, j), lead);
    if (ds.b)
      for (Index j = 0; j < ds.s(); ++j) emit((*ds.b)(i, j), lead);
    out << '\n';
  }
}

void write_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  write_csv(out, ds);
}

Dataset generate_dgp(const DgpConfig& cfg) {
  if (cfg.n < 1) throw Error(ErrorKind::invalid_argument, "dgp: n must be at least 1");
  if (!(cfg.input_low < cfg.input_high)) throw Error(ErrorKind::invalid_argument, "dgp: input_low must be below input_high");
  if (!(cfg.noise_sd >= 0.0)) throw Error(ErrorKind::invalid_argument, "dgp: noise_sd must be non-negative");
  if (!(cfg.inefficiency_sd >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "dgp: inefficiency_sd must be non-negative");
  }

  std::mt19937_64 engine(cfg.seed);
  auto uniform01 = [&engine]() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

  Dataset ds;
  ds.x.resize(cfg.n, 2);
  for (Index i = 0; i < cfg.n; ++i)
    for (Index j = 0; j < 2; ++j) ds.x(i, j) = cfg.input_low + (cfg.input_high - cfg.input_low) * uniform01();

  auto standard_normal = [&]() {
    for (;;) {
      const double a = 2.0 * uniform01() - 1.0;
      const double b = 2.0 * uniform01() - 1.0;
      const double r2 = a * a + b * b;
      if (r2 > 0.0 && r2 < 1.0) return a * std::sqrt(-2.0 * std::log(r2) / r2);
    }
  };

  ds.y.resize(cfg.n, 1);
  for (Index i = 0; i < cfg.n; ++i) {
    const double noise = cfg.noise_sd > 0.0 ? cfg.noise_sd * standard_normal() : 0.0;
    ds.y(i, 0) = std::pow(ds.x(i, 0), 0.4) * std::pow(ds.x(i, 1), 0.4) + noise;
  }
  if (cfg.inefficiency_sd > 0.0) {
    for (Index i = 0; i < cfg.n; ++i) ds.y(i, 0) -= cfg.inefficiency_sd * std::abs(standard_normal());
  }
  ds.x_names = {"x1", "x2"};
  ds.y_names = {"y"};
  return ds;
}

}  // namespace frontier

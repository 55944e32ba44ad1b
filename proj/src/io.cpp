#include "fdla/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fdla {

namespace {

struct PrecisionGuard {
  explicit PrecisionGuard(std::ostream& o) : out(o), old(o.precision()), flags(o.flags()) {
    out.unsetf(std::ios::floatfield);
    out.precision(17);
  }
  ~PrecisionGuard() {
    out.precision(old);
    out.flags(flags);
  }
  std::ostream& out;
  std::streamsize old;
  std::ios::fmtflags flags;
};

std::vector<double> parse_numbers(const std::string& line) {
  std::vector<double> vals;
  std::string cell;
  std::string cleaned = line;
  for (char& ch : cleaned)
    if (ch == ',') ch = ' ';
  std::istringstream ss(cleaned);
  while (ss >> cell) {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::runtime_error("csv: bad number '" + cell + "'");
    vals.push_back(v);
  }
  return vals;
}

}  // namespace

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  PrecisionGuard guard(out);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto vals = parse_numbers(line);
    if (vals.empty()) continue;
    if (!rows.empty() && vals.size() != rows.front().size())
      throw std::runtime_error("csv: ragged matrix");
    rows.push_back(std::move(vals));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Vector read_vector(std::istream& in) {
  std::vector<double> all;
  std::string line;
  while (std::getline(in, line)) {
    auto vals = parse_numbers(line);
    all.insert(all.end(), vals.begin(), vals.end());
  }
  return Eigen::Map<Vector>(all.data(), static_cast<Eigen::Index>(all.size()));
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  PrecisionGuard guard(out);
  out << "round,agent,objective,R,r1,r2,max_r3\n";
  for (const auto& r : trace)
    out << r.round << ',' << r.agent + 1 << ',' << r.objective << ',' << r.max_residual << ','
        << r.r1 << ',' << r.r2 << ',' << r.max_r3 << '\n';
}

void write_live_csv(std::ostream& out, const LiveRun& run) {
  PrecisionGuard guard(out);
  out << "t,agent,value,error_norm,cf_bar,cf_metropolis\n";
  for (std::size_t t = 0; t < run.x.size(); ++t) {
    for (Eigen::Index i = 0; i < run.x[t].size(); ++i) {
      out << t << ',' << i + 1 << ',' << run.x[t](i) << ',' << run.error_norm[t] << ',';
      if (t < run.cf.size()) out << run.cf[t] << ',' << run.cf_metropolis[t];
      else out << ',';
      out << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  PrecisionGuard guard(out);
  out << "t,agent,value,error_norm\n";
  for (std::size_t t = 0; t < tr.x.size(); ++t)
    for (Eigen::Index i = 0; i < tr.x[t].size(); ++i)
      out << t << ',' << i + 1 << ',' << tr.x[t](i) << ',' << tr.error_norm[t] << '\n';
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << contents;
}

}  // namespace fdla

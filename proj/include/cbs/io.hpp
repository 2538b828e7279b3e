#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cbs/common.hpp"
#include "cbs/dataset.hpp"

namespace cbs {

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

inline double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InputError("line " + std::to_string(line_no) + ": malformed number '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s, int line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InputError("line " + std::to_string(line_no) + ": malformed integer '" + s + "'");
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

}  // namespace detail

/// Read a dataset from CSV. Formats:
///   - "x,y[,label]" rows: 2D points;
///   - "x1,y1,x2,y2[,label]" rows: two-view correspondences;
///   - header "traj,F=<n>" then rows of 2F values [,label]: trajectories.
/// Labels are integers with 0 marking outliers. Malformed rows and
/// inconsistent column counts raise InputError with the line number.
inline DataSet ingest(std::istream& in) {
  DataSet data;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  bool have_labels = false;
  int expected_cols = -1;
  int frames = 0;
  bool trajectory_header = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv_row(line);

    if (line_no == 1 && fields.size() == 2 && fields[0] == "traj" && fields[1].rfind("F=", 0) == 0) {
      frames = detail::parse_int(fields[1].substr(2), line_no);
      if (frames < 1) throw InputError("line 1: trajectory header needs F >= 1");
      trajectory_header = true;
      continue;
    }

    if (expected_cols == -1) {
      expected_cols = static_cast<int>(fields.size());
      if (trajectory_header) {
        if (expected_cols != 2 * frames && expected_cols != 2 * frames + 1)
          throw InputError("line " + std::to_string(line_no) +
                           ": trajectory rows must have 2F or 2F+1 columns");
        have_labels = expected_cols == 2 * frames + 1;
      } else if (expected_cols == 2 || expected_cols == 4) {
        have_labels = false;
      } else if (expected_cols == 3 || expected_cols == 5) {
        have_labels = true;
      } else {
        throw InputError("line " + std::to_string(line_no) +
                         ": unrecognized column count " + std::to_string(expected_cols));
      }
    } else if (static_cast<int>(fields.size()) != expected_cols) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_cols) + " columns, got " +
                       std::to_string(fields.size()));
    }

    const int value_cols = expected_cols - (have_labels ? 1 : 0);
    std::vector<double> row(value_cols);
    for (int c = 0; c < value_cols; ++c) row[c] = detail::parse_double(fields[c], line_no);
    rows.push_back(std::move(row));
    if (have_labels) labels.push_back(detail::parse_int(fields[value_cols], line_no));
  }

  if (rows.empty()) throw InputError("dataset file contains no data rows");

  const int dim = static_cast<int>(rows[0].size());
  data.kind = trajectory_header ? DataKind::trajectories
              : dim == 2        ? DataKind::points2d
                                : DataKind::correspondences;
  data.X.resize(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < dim; ++c) data.X(c, static_cast<Eigen::Index>(i)) = rows[i][c];
  data.labels = std::move(labels);
  data.validate();
  return data;
}

inline DataSet ingest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file: " + path.string());
  return ingest(in);
}

/// Write a dataset in the format ingest() reads back (full precision, so
/// the round trip is exact). Ground-truth labels become the last column.
inline void write_dataset_csv(const std::filesystem::path& path, const DataSet& data) {
  auto out = detail::open_out(path);
  if (data.kind == DataKind::trajectories) out << "traj,F=" << data.frames() << "\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int r = 0; r < data.dim(); ++r) out << (r ? "," : "") << data.X(r, i);
    if (data.has_labels()) out << "," << data.labels[i];
    out << "\n";
  }
}

inline void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = detail::open_out(path);
  out << "point_index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << "," << labels[i] << "\n";
}

/// Read a labels file: either "point_index,label" rows (header optional) or
/// one label per line.
inline std::vector<int> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open labels file: " + path.string());
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv_row(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "point_index") continue;
    if (fields.size() == 1) labels.push_back(detail::parse_int(fields[0], line_no));
    else if (fields.size() == 2) labels.push_back(detail::parse_int(fields[1], line_no));
    else throw InputError("line " + std::to_string(line_no) + ": expected 1 or 2 columns");
  }
  if (labels.empty()) throw InputError("labels file contains no rows");
  return labels;
}

/// Row-major full-precision CSV dump (used for the optional H and G dumps).
inline void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = detail::open_out(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << "\n";
  }
}

}  // namespace cbs

#include "dataset.hpp"

#include "rng.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace gda::data {

namespace {

struct CsvTable {
  std::vector<std::vector<double>> rows;
  Index cols = 0;
};

CsvTable read_csv(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open file: " + path);
  CsvTable table;
  std::string line;
  long line_no = 0;
  bool first_data_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      errno = 0;
      const double value = std::strtod(begin, &end);
      while (end && *end == ' ') ++end;
      if (end == begin || (end && *end != '\0') || errno == ERANGE ||
          !std::isfinite(value)) {
        fail(ErrorCode::Parse, path + ": row " + std::to_string(line_no) +
                                   ": non-numeric cell '" + cell + "'");
      }
      row.push_back(value);
    }
    if (first_data_row) {
      table.cols = static_cast<Index>(row.size());
      first_data_row = false;
    } else if (static_cast<Index>(row.size()) != table.cols) {
      fail(ErrorCode::Dimension,
           path + ": row " + std::to_string(line_no) + " has " +
               std::to_string(row.size()) + " columns, expected " +
               std::to_string(table.cols));
    }
    table.rows.push_back(std::move(row));
  }
  require(!table.rows.empty(), ErrorCode::Parse, path + ": empty file");
  return table;
}

void split_features_label(const CsvTable& table, const std::string& path, MatrixXd& x,
                          VectorXd& y) {
  require(table.cols >= 2, ErrorCode::Dimension,
          path + ": labeled file needs at least 2 columns (features + label)");
  const Index rows = static_cast<Index>(table.rows.size());
  const Index d = table.cols - 1;
  x.resize(rows, d);
  y.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) = table.rows[i][j];
    y[i] = table.rows[i][d];
  }
}

void write_row(std::FILE* f, const double* values, Index count) {
  for (Index j = 0; j < count; ++j)
    std::fprintf(f, j ? ",%.17g" : "%.17g", values[j]);
  std::fputc('\n', f);
}

void write_csv(const std::string& path, const MatrixXd& x, const VectorXd* y) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, ErrorCode::Io, "cannot write file: " + path);
  std::vector<double> row(static_cast<size_t>(x.cols()) + (y ? 1 : 0));
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) row[static_cast<size_t>(j)] = x(i, j);
    if (y) row.back() = (*y)[i];
    write_row(f, row.data(), static_cast<Index>(row.size()));
  }
  std::fclose(f);
}

}  // namespace

void validate(const Dataset& ds) {
  require(ds.m() >= 1, ErrorCode::InvalidArgument, "source sample is empty");
  require(ds.n() >= 1, ErrorCode::InvalidArgument, "target sample is empty");
  const Index d = ds.dim();
  require(d >= 1, ErrorCode::InvalidArgument, "feature dimension must be >= 1");
  require(ds.target_x.cols() == d, ErrorCode::Dimension,
          "target feature dimension differs from source");
  require(ds.s() == 0 || ds.target_labeled_x.cols() == d, ErrorCode::Dimension,
          "labeled-target feature dimension differs from source");
  require(ds.source_y.size() == ds.m(), ErrorCode::Dimension,
          "source labels/features length mismatch");
  require(ds.target_labeled_y.size() == ds.s(), ErrorCode::Dimension,
          "labeled-target labels/features length mismatch");
  require(ds.source_x.allFinite() && ds.source_y.allFinite() &&
              ds.target_x.allFinite() && ds.target_labeled_x.allFinite() &&
              ds.target_labeled_y.allFinite(),
          ErrorCode::InvalidArgument, "dataset contains non-finite values");
}

void validate(const WeightVector& w, Index expected_size) {
  require(w.weights.size() == expected_size, ErrorCode::Dimension,
          "weight vector length does not match the sample it indexes");
  if (w.simplex_flag) {
    require(w.weights.minCoeff() >= 0.0, ErrorCode::InvalidArgument,
            "simplex weights must be nonnegative");
    require(std::abs(w.weights.sum() - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
            "simplex weights must sum to 1 within 1e-12");
  }
}

WeightVector uniform_weights(Index size) {
  WeightVector w;
  w.weights = VectorXd::Constant(size, 1.0 / static_cast<double>(size));
  w.simplex_flag = true;
  return w;
}

Dataset load_dataset(const std::string& source_path, const std::string& target_path,
                     const std::optional<std::string>& target_labeled_path,
                     bool skip_header) {
  Dataset ds;
  const CsvTable source = read_csv(source_path, skip_header);
  split_features_label(source, source_path, ds.source_x, ds.source_y);
  const Index d = ds.dim();

  const CsvTable target = read_csv(target_path, skip_header);
  require(target.cols == d, ErrorCode::Dimension,
          target_path + ": target must have d=" + std::to_string(d) +
              " columns, found " + std::to_string(target.cols));
  ds.target_x.resize(static_cast<Index>(target.rows.size()), d);
  for (Index i = 0; i < ds.target_x.rows(); ++i)
    for (Index j = 0; j < d; ++j) ds.target_x(i, j) = target.rows[i][j];

  if (target_labeled_path) {
    const CsvTable tl = read_csv(*target_labeled_path, skip_header);
    require(tl.cols == d + 1, ErrorCode::Dimension,
            *target_labeled_path + ": labeled target must have d+1=" +
                std::to_string(d + 1) + " columns, found " + std::to_string(tl.cols));
    split_features_label(tl, *target_labeled_path, ds.target_labeled_x,
                         ds.target_labeled_y);
  } else {
    ds.target_labeled_x.resize(0, d);
    ds.target_labeled_y.resize(0);
  }
  validate(ds);
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& source_path,
                  const std::string& target_path,
                  const std::optional<std::string>& target_labeled_path) {
  write_csv(source_path, ds.source_x, &ds.source_y);
  write_csv(target_path, ds.target_x, nullptr);
  if (target_labeled_path)
    write_csv(*target_labeled_path, ds.target_labeled_x, &ds.target_labeled_y);
}

std::pair<Dataset, SyntheticOracle> gen_synthetic(std::uint64_t seed, Index m, Index n,
                                                  Index s) {
  require(m >= 1 && n >= 1 && s >= 0, ErrorCode::InvalidArgument,
          "gen_synthetic requires m, n >= 1 and s >= 0");
  SyntheticOracle oracle;
  Dataset ds;
  ds.source_x.resize(m, 1);
  ds.source_y.resize(m);
  ds.target_x.resize(n, 1);
  ds.target_labeled_x.resize(s, 1);
  ds.target_labeled_y.resize(s);

  Rng rng(seed);
  for (Index i = 0; i < m; ++i) {
    const double x = rng.uniform(0.2, 1.0);
    ds.source_x(i, 0) = x;
    ds.source_y[i] = oracle.label_mean(x) + rng.gaussian(0.0, oracle.noise_std);
  }
  for (Index i = 0; i < n; ++i) ds.target_x(i, 0) = rng.uniform(0.0, 0.25);
  for (Index i = 0; i < s; ++i) {
    const double x = rng.uniform(0.0, 0.25);
    ds.target_labeled_x(i, 0) = x;
    ds.target_labeled_y[i] = oracle.label_mean(x) + rng.gaussian(0.0, oracle.noise_std);
  }
  validate(ds);
  return {std::move(ds), oracle};
}

MergedSample merge_augmented(const Dataset& ds) {
  validate(ds);
  const Index m = ds.m(), s = ds.s();
  MergedSample out;
  out.x.resize(m + s, ds.dim());
  out.y.resize(m + s);
  out.x.topRows(m) = ds.source_x;
  out.y.head(m) = ds.source_y;
  if (s > 0) {
    out.x.bottomRows(s) = ds.target_labeled_x;
    out.y.tail(s) = ds.target_labeled_y;
  }
  // (m/(m+s)) * (1/m) = 1/(m+s) for source rows, and likewise for T' rows.
  out.weights = uniform_weights(m + s);
  return out;
}

}  // namespace gda::data

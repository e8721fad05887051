#include "hakernel/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hakernel/errors.hpp"

namespace hakernel {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table parse_table(const std::string& text, const std::string& source) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto cells = split_commas(view);
    if (!have_header) {
      for (auto c : cells) table.header.emplace_back(c);
      have_header = true;
      continue;
    }
    ++data_row;
    if (cells.size() > table.header.size()) {
      throw DataError("data_model: " + source + ": row " + std::to_string(data_row) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(table.header.size()));
    }
    std::vector<double> values(table.header.size());
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      const std::string where = "row " + std::to_string(data_row) + ", column '" + table.header[j] + "'";
      if (j >= cells.size() || cells[j].empty()) {
        throw DataError("data_model: " + source + ": missing value at " + where);
      }
      const auto cell = cells[j];
      double v = 0.0;
      const auto* first = cell.data();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError("data_model: " + source + ": non-numeric value '" + std::string(cell) +
                        "' at " + where);
      }
      values[j] = v;
    }
    table.rows.push_back(std::move(values));
  }
  if (!have_header) throw DataError("data_model: " + source + ": missing header row");
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("data_model: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() < 1 || X.cols() < 1) throw DataError("data_model: dataset needs n >= 1 and d >= 1");
  if (y.size() != X.rows()) throw DataError("data_model: response length differs from row count");
  if (!X.allFinite() || !y.allFinite()) throw DataError("data_model: non-finite entries");
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    out.y(static_cast<Eigen::Index>(i)) = y(rows[i]);
  }
  out.feature_names = feature_names;
  return out;
}

Scaler Scaler::fixed_range(Eigen::Index d, double lo, double hi) {
  return Scaler{Vector::Constant(d, lo), Vector::Constant(d, hi)};
}

Matrix Scaler::invert(const Matrix& scaled) const {
  if (scaled.cols() != d()) throw DataError("data_model: scaler/data dimension mismatch");
  Matrix out(scaled.rows(), scaled.cols());
  for (Eigen::Index j = 0; j < d(); ++j) {
    out.col(j) = (scaled.col(j).array() * (max(j) - min(j)) + min(j)).matrix();
  }
  return out;
}

std::vector<Eigen::Index> FoldAssignment::train_rows(int fold) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) rows.push_back(static_cast<Eigen::Index>(i));
  return rows;
}

std::vector<Eigen::Index> FoldAssignment::test_rows(int fold) const {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) rows.push_back(static_cast<Eigen::Index>(i));
  return rows;
}

Dataset parse_csv(const std::string& text, const ColumnRef& response_column, const std::string& source) {
  const Table table = parse_table(text, source);
  const std::size_t cols = table.header.size();

  std::size_t response = cols;
  if (const auto* name = std::get_if<std::string>(&response_column)) {
    const auto it = std::find(table.header.begin(), table.header.end(), *name);
    if (it == table.header.end())
      throw DataError("data_model: " + source + ": response column '" + *name + "' not found");
    response = static_cast<std::size_t>(it - table.header.begin());
  } else {
    const int index = std::get<int>(response_column);
    if (index < 1 || static_cast<std::size_t>(index) > cols)
      throw DataError("data_model: " + source + ": response column index " + std::to_string(index) +
                      " out of range 1.." + std::to_string(cols));
    response = static_cast<std::size_t>(index - 1);
  }
  if (cols < 2) throw DataError("data_model: " + source + ": need at least one covariate column");
  if (table.rows.empty()) throw DataError("data_model: " + source + ": zero data rows");

  Dataset data;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(cols - 1);
  data.X.resize(n, d);
  data.y.resize(n);
  for (std::size_t j = 0; j < cols; ++j)
    if (j != response) data.feature_names.push_back(table.header[j]);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (j == response)
        data.y(i) = row[j];
      else
        data.X(i, c++) = row[j];
    }
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& response_column) {
  return parse_csv(read_file(path), response_column, path.string());
}

Matrix parse_csv_features(const std::string& text, std::vector<std::string>* header, const std::string& source) {
  const Table table = parse_table(text, source);
  Matrix X(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      X(i, j) = table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (header) *header = table.header;
  return X;
}

Scaler scale_fit(const Dataset& train) {
  if (train.n() < 1 || train.d() < 1) throw DataError("data_model: scale_fit on empty data");
  return Scaler{train.X.colwise().minCoeff().transpose(), train.X.colwise().maxCoeff().transpose()};
}

Matrix scale_apply(const Scaler& scaler, const Matrix& X, std::size_t* clamped_rows) {
  if (X.cols() != scaler.d())
    throw DataError("data_model: scaler expects " + std::to_string(scaler.d()) + " features, data has " +
                    std::to_string(X.cols()));
  Matrix out(X.rows(), X.cols());
  std::size_t clamped = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    bool row_clamped = false;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double range = scaler.max(j) - scaler.min(j);
      if (range <= 0.0) {
        // constant training feature: every value collapses onto 0
        out(i, j) = 0.0;
        continue;
      }
      const double t = (X(i, j) - scaler.min(j)) / range;
      if (t < 0.0 || t > 1.0) row_clamped = true;
      out(i, j) = std::clamp(t, 0.0, 1.0);
    }
    clamped += row_clamped ? 1 : 0;
  }
  if (clamped_rows) *clamped_rows = clamped;
  return out;
}

Dataset scale_apply(const Scaler& scaler, const Dataset& data, std::size_t* clamped_rows) {
  Dataset out = data;
  out.X = scale_apply(scaler, data.X, clamped_rows);
  return out;
}

FoldAssignment make_folds(Eigen::Index n, int V, std::uint64_t seed) {
  if (V < 2 || static_cast<Eigen::Index>(V) > n)
    throw UsageError("data_model: need 2 <= V <= n for V-fold split (V=" + std::to_string(V) +
                     ", n=" + std::to_string(n) + ")");
  FoldAssignment folds;
  folds.V = V;
  folds.seed = seed;
  folds.fold_of.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < folds.fold_of.size(); ++i) folds.fold_of[i] = static_cast<int>(i % V) + 1;
  std::mt19937_64 rng(seed);
  for (std::size_t i = folds.fold_of.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(folds.fold_of[i], folds.fold_of[pick(rng)]);
  }
  return folds;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace hakernel

#include "estrace/feature_matrix.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "estrace/errors.hpp"
#include "estrace/parallel.hpp"

namespace estrace {

namespace {

constexpr const char* kMetaHeader = "variant,fid,run,L,targets_hit";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::optional<std::size_t> FeatureMatrix::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns.begin());
}

FeatureMatrix FeatureMatrix::subset_rows(const std::vector<std::size_t>& index) const {
  FeatureMatrix out;
  out.columns = columns;
  out.scaled = scaled;
  out.values.resize(static_cast<Eigen::Index>(index.size()), values.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    out.rows.push_back(rows.at(index[i]));
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(index[i]));
  }
  return out;
}

FeatureMatrix FeatureMatrix::subset_columns(const std::vector<std::string>& names) const {
  FeatureMatrix out;
  out.rows = rows;
  out.scaled = scaled;
  out.columns = names;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto idx = column_index(names[j]);
    if (!idx) throw InputError("feature column '" + names[j] + "' not in matrix");
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(static_cast<Eigen::Index>(*idx));
  }
  return out;
}

FeatureMatrix build_feature_matrix(const std::vector<Trace>& traces, const std::vector<tsfeat::FeatureSpec>& catalog,
                                   std::size_t length, std::size_t jobs) {
  FeatureMatrix m;
  for (const auto& s : catalog) m.columns.push_back(tsfeat::feature_name(s));
  m.values.resize(static_cast<Eigen::Index>(traces.size()), static_cast<Eigen::Index>(catalog.size()));
  std::vector<std::vector<double>> rows(traces.size());
  parallel_for(traces.size(), jobs, [&](std::size_t i) { rows[i] = tsfeat::extract(traces[i], catalog, length); });
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    m.rows.push_back({t.meta.variant, t.meta.fid, t.meta.run, length == 0 ? t.points.size() : length, t.targets_hit});
    for (std::size_t j = 0; j < catalog.size(); ++j)
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

FeatureMatrix scale_unit_interval(const FeatureMatrix& matrix) {
  FeatureMatrix out = matrix;
  std::map<int, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i)
    groups[matrix.rows[i].fid].push_back(static_cast<Eigen::Index>(i));
  for (const auto& [fid, idx] : groups) {
    for (Eigen::Index j = 0; j < matrix.values.cols(); ++j) {
      double lo = matrix.values(idx.front(), j), hi = lo;
      for (auto i : idx) {
        lo = std::min(lo, matrix.values(i, j));
        hi = std::max(hi, matrix.values(i, j));
      }
      const double span = hi - lo;
      for (auto i : idx) out.values(i, j) = span > 0.0 ? (matrix.values(i, j) - lo) / span : 0.0;
    }
  }
  out.scaled = true;
  return out;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m) {
  std::ofstream out(path);
  if (!out) throw MissingInputError("cannot write " + path.string());
  out << kMetaHeader;
  for (const auto& c : m.columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const auto& r = m.rows[i];
    out << r.variant << ',' << r.fid << ',' << r.run << ',' << r.length << ',' << r.targets_hit;
    for (Eigen::Index j = 0; j < m.values.cols(); ++j)
      out << ',' << format_double(m.values(static_cast<Eigen::Index>(i), j));
    out << '\n';
  }
  if (!out) throw MissingInputError("failed writing " + path.string());
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind(kMetaHeader, 0) != 0)
    throw InputError("bad feature matrix header in " + path.string());
  auto header = split_csv(line);
  FeatureMatrix m;
  m.columns.assign(header.begin() + 5, header.end());
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size()) throw InputError("ragged row in " + path.string());
    RowMeta r;
    r.variant = cells[0];
    r.fid = std::stoi(cells[1]);
    r.run = std::stoul(cells[2]);
    r.length = std::stoul(cells[3]);
    r.targets_hit = std::stoi(cells[4]);
    m.rows.push_back(r);
    std::vector<double> row;
    for (std::size_t j = 5; j < cells.size(); ++j) row.push_back(std::strtod(cells[j].c_str(), nullptr));
    values.push_back(std::move(row));
  }
  m.values.resize(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(m.columns.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = 0; j < m.columns.size(); ++j)
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  return m;
}

}  // namespace estrace

#include "oeecast/feature_matrix.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "oeecast/errors.hpp"

namespace oeecast {

FeatureMatrix::FeatureMatrix(std::vector<std::string> column_names)
    : names_(std::move(column_names)), imputed_(names_.size(), 0) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw InvalidArgument("duplicate feature column '" + n + "'");
  }
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::vector<double> FeatureMatrix::column(const std::string& name) const {
  return column(column_position(name));
}

std::size_t FeatureMatrix::column_position(const std::string& name) const {
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (names_[c] == name) return c;
  }
  throw NotFound("feature column '" + name + "' not found");
}

void FeatureMatrix::append_row(std::size_t row_index, std::span<const double> values) {
  if (values.size() != names_.size()) {
    throw InvalidArgument("feature row has " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(names_.size()));
  }
  if (!row_index_.empty() && row_index <= row_index_.back()) {
    throw InvalidArgument("feature row_index must be strictly increasing");
  }
  row_index_.push_back(row_index);
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (std::isfinite(values[c])) {
      data_.push_back(values[c]);
    } else {
      data_.push_back(0.0);
      ++imputed_[c];
    }
  }
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::string>& names) const {
  std::vector<std::size_t> pos;
  pos.reserve(names.size());
  for (const auto& n : names) pos.push_back(column_position(n));
  FeatureMatrix out(names);
  out.row_index_ = row_index_;
  out.data_.reserve(rows() * names.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t p : pos) out.data_.push_back(at(r, p));
  }
  for (std::size_t i = 0; i < pos.size(); ++i) out.imputed_[i] = imputed_[pos[i]];
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows()) throw InvalidArgument("invalid feature row range");
  FeatureMatrix out(names_);
  out.row_index_.assign(row_index_.begin() + static_cast<long>(begin),
                        row_index_.begin() + static_cast<long>(end));
  out.data_.assign(data_.begin() + static_cast<long>(begin * cols()),
                   data_.begin() + static_cast<long>(end * cols()));
  out.imputed_ = imputed_;
  return out;
}

FeatureMatrix FeatureMatrix::rows_by_index(std::size_t first, std::size_t last) const {
  std::size_t b = 0;
  while (b < rows() && row_index_[b] < first) ++b;
  std::size_t e = b;
  while (e < rows() && row_index_[e] <= last) ++e;
  return select_rows(b, e);
}

FeatureMatrix FeatureMatrix::shifted(long shift) const {
  FeatureMatrix out = *this;
  for (auto& r : out.row_index_) {
    const long v = static_cast<long>(r) + shift;
    if (v < 0) throw InvalidArgument("feature row shift below zero");
    r = static_cast<std::size_t>(v);
  }
  return out;
}

FeatureMatrix FeatureMatrix::hconcat(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.row_index_ != b.row_index_) throw InvalidArgument("hconcat: row_index mismatch");
  auto names = a.names_;
  names.insert(names.end(), b.names_.begin(), b.names_.end());
  FeatureMatrix out(std::move(names));
  out.row_index_ = a.row_index_;
  out.data_.reserve(a.data_.size() + b.data_.size());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto ra = a.row(r), rb = b.row(r);
    out.data_.insert(out.data_.end(), ra.begin(), ra.end());
    out.data_.insert(out.data_.end(), rb.begin(), rb.end());
  }
  out.imputed_ = a.imputed_;
  out.imputed_.insert(out.imputed_.end(), b.imputed_.begin(), b.imputed_.end());
  return out;
}

void FeatureMatrix::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "row_index";
  for (const auto& n : names_) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    out << row_index_[r];
    for (double v : row(r)) out << ',' << v;
    out << '\n';
  }
}

FeatureMatrix FeatureMatrix::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty feature file '" + path.string() + "'");
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell != "row_index") throw ParseError("feature CSV must start with a row_index column");
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  FeatureMatrix fm(std::move(names));
  std::vector<double> vals(fm.cols());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const auto idx = static_cast<std::size_t>(std::stoull(cell));
    for (std::size_t c = 0; c < fm.cols(); ++c) {
      if (!std::getline(ss, cell, ',')) {
        throw ParseError("feature CSV line " + std::to_string(line_no) + " is short");
      }
      vals[c] = std::stod(cell);
    }
    fm.append_row(idx, vals);
  }
  return fm;
}

}  // namespace oeecast

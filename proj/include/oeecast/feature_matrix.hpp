#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace oeecast {

/**
 * Rows aligned to window end positions of a source series, with named
 * real-valued columns. Storage is row-major.
 *
 * Invariants: unique column names, strictly increasing row_index, finite
 * entries. Cells whose computation was non-finite are stored as 0 and
 * counted in `imputed` for their column.
 */
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::vector<std::string> column_names);

  std::size_t rows() const noexcept { return row_index_.size(); }
  std::size_t cols() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }

  const std::vector<std::string>& column_names() const noexcept { return names_; }
  const std::vector<std::size_t>& row_index() const noexcept { return row_index_; }
  const std::vector<std::size_t>& imputed() const noexcept { return imputed_; }

  double at(std::size_t r, std::size_t c) const { return data_[r * names_.size() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * names_.size(), names_.size()};
  }
  std::vector<double> column(std::size_t c) const;
  std::vector<double> column(const std::string& name) const;
  std::size_t column_position(const std::string& name) const;

  /// Appends a row; non-finite entries become 0 and are counted as imputed.
  void append_row(std::size_t row_index, std::span<const double> values);

  FeatureMatrix select_columns(const std::vector<std::string>& names) const;
  FeatureMatrix select_rows(std::size_t begin, std::size_t end) const;
  /// Rows whose row_index lies in [first, last].
  FeatureMatrix rows_by_index(std::size_t first, std::size_t last) const;
  /// Rows renumbered as row_index + shift (used to align window ends with
  /// forecast targets).
  FeatureMatrix shifted(long shift) const;

  /// Column-wise concatenation of matrices with identical row_index.
  static FeatureMatrix hconcat(const FeatureMatrix& a, const FeatureMatrix& b);

  /// CSV with header row_index,<column names>.
  void save_csv(const std::filesystem::path& path) const;
  static FeatureMatrix load_csv(const std::filesystem::path& path);

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> row_index_;
  std::vector<double> data_;
  std::vector<std::size_t> imputed_;
};

}  // namespace oeecast

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ftr/error.hpp"

namespace ftr {

/// Dense row-major matrix of feature vectors, one row per observation.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}
  FeatureMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return cols_ == 0 ? rows_without_cols_ : data_.size() / cols_; }
  std::size_t cols() const { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) { return std::span<double>(data_).subspan(i * cols_, cols_); }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  void add_row(std::span<const double> values) {
    if (values.size() != cols_)
      throw Error(Errc::IndexMismatch, "feature row of length " + std::to_string(values.size()) +
                                           ", expected " + std::to_string(cols_));
    if (cols_ == 0) ++rows_without_cols_;
    data_.insert(data_.end(), values.begin(), values.end());
  }

  static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    FeatureMatrix m(rows.empty() ? 0 : rows.front().size());
    for (const auto& r : rows) m.add_row(r);
    return m;
  }

 private:
  std::size_t cols_ = 0;
  std::size_t rows_without_cols_ = 0;
  std::vector<double> data_;
};

}  // namespace ftr

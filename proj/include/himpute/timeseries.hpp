#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace himpute {

/// n x d grid of observed flags (true = observed), column-major by variable.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t length, std::size_t dim, bool observed = true);

  std::size_t length() const { return length_; }
  std::size_t dim() const { return dim_; }

  bool observed(std::size_t t, std::size_t v) const { return cells_[v * length_ + t] != 0; }
  void set(std::size_t t, std::size_t v, bool observed) { cells_[v * length_ + t] = observed ? 1 : 0; }

  std::span<const std::uint8_t> column(std::size_t v) const {
    return {cells_.data() + v * length_, length_};
  }

  std::size_t count_observed() const;
  std::size_t count_missing() const { return length_ * dim_ - count_observed(); }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t length_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// A d-variate series of length n with per-cell missingness. Missing cells
/// hold a quiet NaN; no operation in this library reads them.
class TimeSeries {
 public:
  /// All cells missing.
  TimeSeries(std::size_t length, std::size_t dim);

  /// Fully observed series from column-major values (variable after variable).
  static TimeSeries from_columns(std::size_t length, std::size_t dim, std::vector<double> values);
  static TimeSeries univariate(std::span<const double> values);

  std::size_t length() const { return length_; }
  std::size_t dim() const { return mask_.dim(); }

  double value(std::size_t t, std::size_t v) const { return values_[v * length_ + t]; }
  bool observed(std::size_t t, std::size_t v) const { return mask_.observed(t, v); }

  void set(std::size_t t, std::size_t v, double value);
  void set_missing(std::size_t t, std::size_t v);

  std::span<const double> column(std::size_t v) const { return {values_.data() + v * length_, length_}; }
  std::span<const std::uint8_t> mask_column(std::size_t v) const { return mask_.column(v); }
  const Mask& mask() const { return mask_; }

  bool complete() const { return mask_.count_missing() == 0; }

  /// Copy of this series with cells missing wherever `mask` is false. Cells
  /// already missing stay missing.
  TimeSeries with_mask(const Mask& mask) const;

  /// Contiguous time slice [begin, end).
  TimeSeries slice(std::size_t begin, std::size_t end) const;

  /// Equal shape and mask, and bit-equal values at observed cells.
  friend bool operator==(const TimeSeries& a, const TimeSeries& b);

 private:
  std::size_t length_;
  std::vector<double> values_;
  Mask mask_;
};

/// Parses `t,v1,...,vd` CSV; empty value fields are missing. Throws ParseError
/// naming the line on malformed input and IoError when the file can't be read.
TimeSeries read_csv(const std::filesystem::path& path);
TimeSeries parse_csv(std::string_view text);

/// Shortest round-trip decimal representation; missing cells as empty fields.
void write_csv(const TimeSeries& series, const std::filesystem::path& path);
std::string format_csv(const TimeSeries& series);

/// Mask files share the series layout with 1 (observed) / 0 (missing) cells.
Mask read_mask_csv(const std::filesystem::path& path);
void write_mask_csv(const Mask& mask, const std::filesystem::path& path);

}  // namespace himpute

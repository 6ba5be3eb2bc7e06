#include "himpute/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "himpute/error.hpp"

namespace himpute {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

// Rows of a `t,...` table: header width plus the raw value fields per row.
struct RawTable {
  std::size_t dim = 0;
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_numbers;
};

RawTable parse_table(std::string_view text) {
  RawTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (pos < text.size()) fail(line_no, "blank line");
      break;
    }
    auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < 2 || fields[0] != "t") fail(line_no, "header must be t,v1,...,vd");
      table.dim = fields.size() - 1;
      have_header = true;
      continue;
    }
    if (fields.size() != table.dim + 1) {
      fail(line_no, "expected " + std::to_string(table.dim + 1) + " fields, got " + std::to_string(fields.size()));
    }
    std::size_t t = 0;
    auto tf = fields[0];
    auto [ptr, ec] = std::from_chars(tf.data(), tf.data() + tf.size(), t);
    if (ec != std::errc{} || ptr != tf.data() + tf.size()) fail(line_no, "time field is not an integer");
    if (t != table.rows.size() + 1) {
      fail(line_no, "time index " + std::string(tf) + " breaks the contiguous 1..n sequence");
    }
    table.rows.emplace_back(fields.begin() + 1, fields.end());
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) fail(1, "missing header");
  if (table.rows.empty()) throw ParseError("empty series");
  return table;
}

double parse_value(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    fail(line_no, "invalid number '" + std::string(field) + "'");
  }
  return value;
}

void append_double(std::string& out, double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

std::string header(std::size_t dim) {
  std::string h = "t";
  for (std::size_t v = 1; v <= dim; ++v) h += ",v" + std::to_string(v);
  h += '\n';
  return h;
}

}  // namespace

Mask::Mask(std::size_t length, std::size_t dim, bool observed)
    : length_(length), dim_(dim), cells_(length * dim, observed ? 1 : 0) {}

std::size_t Mask::count_observed() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

TimeSeries::TimeSeries(std::size_t length, std::size_t dim)
    : length_(length), values_(length * dim, kMissing), mask_(length, dim, false) {
  if (length == 0 || dim == 0) throw PreconditionError("time series needs n >= 1 and d >= 1");
}

TimeSeries TimeSeries::from_columns(std::size_t length, std::size_t dim, std::vector<double> values) {
  if (values.size() != length * dim) throw PreconditionError("value count does not match n*d");
  TimeSeries s(length, dim);
  s.values_ = std::move(values);
  s.mask_ = Mask(length, dim, true);
  return s;
}

TimeSeries TimeSeries::univariate(std::span<const double> values) {
  return from_columns(values.size(), 1, {values.begin(), values.end()});
}

void TimeSeries::set(std::size_t t, std::size_t v, double value) {
  values_[v * length_ + t] = value;
  mask_.set(t, v, true);
}

void TimeSeries::set_missing(std::size_t t, std::size_t v) {
  values_[v * length_ + t] = kMissing;
  mask_.set(t, v, false);
}

TimeSeries TimeSeries::with_mask(const Mask& mask) const {
  if (mask.length() != length_ || mask.dim() != dim()) throw PreconditionError("mask shape does not match series");
  TimeSeries out = *this;
  for (std::size_t v = 0; v < dim(); ++v)
    for (std::size_t t = 0; t < length_; ++t)
      if (!mask.observed(t, v)) out.set_missing(t, v);
  return out;
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > length_) throw PreconditionError("invalid slice range");
  TimeSeries out(end - begin, dim());
  for (std::size_t v = 0; v < dim(); ++v)
    for (std::size_t t = begin; t < end; ++t)
      if (observed(t, v)) out.set(t - begin, v, value(t, v));
  return out;
}

bool operator==(const TimeSeries& a, const TimeSeries& b) {
  if (a.length_ != b.length_ || !(a.mask_ == b.mask_)) return false;
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    if (a.mask_.observed(i % a.length_, i / a.length_) && a.values_[i] != b.values_[i]) return false;
  }
  return true;
}

TimeSeries parse_csv(std::string_view text) {
  auto table = parse_table(text);
  TimeSeries series(table.rows.size(), table.dim);
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    for (std::size_t v = 0; v < table.dim; ++v) {
      auto field = table.rows[t][v];
      if (!field.empty()) series.set(t, v, parse_value(field, table.line_numbers[t]));
    }
  }
  return series;
}

TimeSeries read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string format_csv(const TimeSeries& series) {
  std::string out = header(series.dim());
  for (std::size_t t = 0; t < series.length(); ++t) {
    out += std::to_string(t + 1);
    for (std::size_t v = 0; v < series.dim(); ++v) {
      out += ',';
      if (series.observed(t, v)) append_double(out, series.value(t, v));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
  write_file(path, format_csv(series));
}

Mask read_mask_csv(const std::filesystem::path& path) {
  auto text = read_file(path);
  auto table = parse_table(text);
  Mask mask(table.rows.size(), table.dim, false);
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    for (std::size_t v = 0; v < table.dim; ++v) {
      auto field = table.rows[t][v];
      if (field == "1") {
        mask.set(t, v, true);
      } else if (field != "0") {
        fail(table.line_numbers[t], "mask cell must be 0 or 1");
      }
    }
  }
  return mask;
}

void write_mask_csv(const Mask& mask, const std::filesystem::path& path) {
  std::string out = header(mask.dim());
  for (std::size_t t = 0; t < mask.length(); ++t) {
    out += std::to_string(t + 1);
    for (std::size_t v = 0; v < mask.dim(); ++v) out += mask.observed(t, v) ? ",1" : ",0";
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace himpute

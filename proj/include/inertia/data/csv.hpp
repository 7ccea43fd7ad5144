#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "inertia/data/series.hpp"
#include "inertia/error.hpp"

// Canonical CSV formats:
//   imu.csv         t,fx,fy,fz,wx,wy,wz   (s, m/s^2, rad/s)
//   gt_pos.csv      t,px,py,pz            (s, m)
//   gt_heading.csv  t,yaw                 (s, rad)
// Values are written in shortest round-trip decimal form, so write -> parse is bit-exact.

namespace inertia {

inline constexpr std::string_view kImuHeader = "t,fx,fy,fz,wx,wy,wz";
inline constexpr std::string_view kGtPosHeader = "t,px,py,pz";
inline constexpr std::string_view kGtHeadingHeader = "t,yaw";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_field(std::string_view field, const std::string& source, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(source, line, "malformed number '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) throw ParseError(source, line, "non-finite value");
  return value;
}

// Parses every data row of a CSV with the given header into fixed-width rows.
template <std::size_t N>
std::vector<std::array<double, N>> parse_rows(std::istream& in, std::string_view header, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  // Skip UTF-8 BOM and blank lines before the header.
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) break;
  }
  if (trim(line) != header) {
    throw ParseError(source, line_no, "expected header '" + std::string(header) + "'");
  }
  std::vector<std::array<double, N>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    std::array<double, N> row{};
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      const std::string_view token = view.substr(start, comma == std::string_view::npos ? view.npos : comma - start);
      if (field >= N) throw ParseError(source, line_no, "too many fields, expected " + std::to_string(N));
      row[field++] = parse_field(token, source, line_no);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != N) {
      throw ParseError(source, line_no, "expected " + std::to_string(N) + " fields, got " + std::to_string(field));
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void write_number(std::ostream& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

template <std::size_t N>
void write_row(std::ostream& out, const std::array<double, N>& row) {
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) out.put(',');
    write_number(out, row[i]);
  }
  out.put('\n');
}

inline void check_time(const std::vector<double>& t, const std::string& source) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      // +2: one header line and 1-based numbering.
      throw DataError(source + ": non-monotonic timestamp at data row " + std::to_string(i + 1) + " (line " +
                      std::to_string(i + 2) + ")");
    }
  }
}

}  // namespace detail

inline InertialSeries parse_imu_csv(std::istream& in, const std::string& source = "<stream>") {
  const auto rows = detail::parse_rows<7>(in, kImuHeader, source);
  InertialSeries series(rows.size());
  std::vector<double> t(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    series[i] = InertialSample{r[0], {r[1], r[2], r[3]}, {r[4], r[5], r[6]}};
    t[i] = r[0];
  }
  detail::check_time(t, source);
  return series;
}

inline InertialSeries parse_imu_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_imu_csv(in, path.string());
}

inline GroundTruth parse_gt_pos_csv(std::istream& in, const std::string& source = "<stream>") {
  const auto rows = detail::parse_rows<4>(in, kGtPosHeader, source);
  GroundTruth gt;
  for (const auto& r : rows) {
    gt.t.push_back(r[0]);
    gt.position.push_back({r[1], r[2], r[3]});
  }
  detail::check_time(gt.t, source);
  return gt;
}

inline GroundTruth parse_gt_pos_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_gt_pos_csv(in, path.string());
}

inline GroundTruth parse_gt_heading_csv(std::istream& in, const std::string& source = "<stream>") {
  const auto rows = detail::parse_rows<2>(in, kGtHeadingHeader, source);
  GroundTruth gt;
  for (const auto& r : rows) {
    gt.t.push_back(r[0]);
    gt.heading.push_back(r[1]);
  }
  detail::check_time(gt.t, source);
  return gt;
}

inline GroundTruth parse_gt_heading_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_gt_heading_csv(in, path.string());
}

// Dispatches on the header line: gt_pos or gt_heading format.
inline GroundTruth parse_gt_csv(const std::filesystem::path& path) {
  std::string first;
  {
    auto in = detail::open_input(path);
    std::getline(in, first);
  }
  std::string_view head = detail::trim(first);
  if (head.starts_with("\xEF\xBB\xBF")) head.remove_prefix(3);
  if (head == kGtHeadingHeader) return parse_gt_heading_csv(path);
  return parse_gt_pos_csv(path);
}

inline void write_imu_csv(std::ostream& out, const InertialSeries& series) {
  out << kImuHeader << '\n';
  for (const auto& s : series) detail::write_row<7>(out, {s.t, s.f[0], s.f[1], s.f[2], s.w[0], s.w[1], s.w[2]});
}

inline void write_imu_csv(const std::filesystem::path& path, const InertialSeries& series) {
  auto out = detail::open_output(path);
  write_imu_csv(out, series);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void write_gt_pos_csv(std::ostream& out, const GroundTruth& gt) {
  if (!gt.has_position()) throw StructuralError("write_gt_pos_csv: ground truth has no positions");
  out << kGtPosHeader << '\n';
  for (std::size_t i = 0; i < gt.size(); ++i) {
    detail::write_row<4>(out, {gt.t[i], gt.position[i][0], gt.position[i][1], gt.position[i][2]});
  }
}

inline void write_gt_pos_csv(const std::filesystem::path& path, const GroundTruth& gt) {
  auto out = detail::open_output(path);
  write_gt_pos_csv(out, gt);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline void write_gt_heading_csv(std::ostream& out, const GroundTruth& gt) {
  if (!gt.has_heading()) throw StructuralError("write_gt_heading_csv: ground truth has no heading");
  out << kGtHeadingHeader << '\n';
  for (std::size_t i = 0; i < gt.size(); ++i) detail::write_row<2>(out, {gt.t[i], gt.heading[i]});
}

inline void write_gt_heading_csv(const std::filesystem::path& path, const GroundTruth& gt) {
  auto out = detail::open_output(path);
  write_gt_heading_csv(out, gt);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace inertia

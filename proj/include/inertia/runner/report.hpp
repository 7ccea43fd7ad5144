#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "inertia/error.hpp"
#include "inertia/runner/config.hpp"
#include "inertia/runner/experiment.hpp"

// report.json layout:
//   format, version
//   suite       {base_seed, repetitions}
//   config      echo of the suite configuration
//   techniques  [{name, spec, failed, seeds, rmse_runs (null = failed run), mean, std,
//                 improvement_pct, failed_runs, errors, runs (per-run diagnostics)}]
// Wall-clock times go to timing.json so report.json stays byte-deterministic.

namespace inertia {

inline constexpr const char* kReportFormat = "inertia-report";
inline constexpr int kReportVersion = 1;

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  const auto [ptr, ec] = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, ptr);
  return std::string(16 - s.size(), '0') + s;
}

inline json to_json(const NormalizationStats& s) {
  return json{{"method", to_string(s.method)},
              {"center", std::vector<double>(s.center.begin(), s.center.end())},
              {"scale", std::vector<double>(s.scale.begin(), s.scale.end())}};
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json report_to_json(const SuiteReport& report) {
  json techniques = json::array();
  for (const auto& t : report.techniques) {
    json seeds = json::array(), rmse = json::array(), errors = json::array(), runs = json::array();
    for (const auto& r : t.runs) {
      seeds.push_back(r.seed);
      rmse.push_back(r.ok ? json(r.rmse) : json(nullptr));
      if (!r.ok) errors.push_back(json{{"run", r.run_index}, {"message", r.error}});
      json run{{"run", r.run_index}, {"seed", r.seed}, {"ok", r.ok}};
      if (r.ok) {
        const auto& d = r.diagnostics;
        json norm = json::array();
        for (const auto& n : d.normalization) norm.push_back(to_json(n));
        run["train_windows"] = d.train_windows;
        run["augmented_train_windows"] = d.augmented_train_windows;
        run["test_windows"] = d.test_windows;
        run["test_hash"] = hex64(d.test_hash);
        run["init_hash"] = hex64(d.init_hash);
        run["final_train_loss"] = d.final_train_loss;
        run["normalization"] = norm;
      }
      runs.push_back(run);
    }
    json spec = to_json(t.technique);
    spec.erase("name");
    techniques.push_back(json{{"name", t.technique.name},
                              {"spec", spec},
                              {"failed", t.failed},
                              {"seeds", seeds},
                              {"rmse_runs", rmse},
                              {"mean", t.failed ? json(nullptr) : json(t.mean)},
                              {"std", t.failed ? json(nullptr) : json(t.std)},
                              {"improvement_pct", optional_number(t.improvement_pct)},
                              {"failed_runs", t.failed_runs},
                              {"errors", errors},
                              {"runs", runs}});
  }
  return json{{"format", kReportFormat},
              {"version", kReportVersion},
              {"suite", {{"base_seed", report.config.base_seed}, {"repetitions", report.config.repetitions}}},
              {"config", to_json(report.config)},
              {"techniques", techniques}};
}

// The per-technique summary that CSV and SVG rendering need.
struct ReportRow {
  std::string name;
  bool baseline = false;
  bool failed = false;
  std::optional<double> mean;
  std::optional<double> std;
  std::optional<double> improvement_pct;
  std::size_t successful = 0;
  std::size_t failed_runs = 0;
};

inline std::vector<ReportRow> report_rows(const SuiteReport& report) {
  std::vector<ReportRow> rows;
  for (const auto& t : report.techniques) {
    ReportRow r;
    r.name = t.technique.name;
    r.baseline = t.technique.is_baseline();
    r.failed = t.failed;
    if (!t.failed) {
      r.mean = t.mean;
      r.std = t.std;
    }
    r.improvement_pct = t.improvement_pct;
    r.successful = t.successful;
    r.failed_runs = t.failed_runs;
    rows.push_back(r);
  }
  return rows;
}

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) { throw DataError("report.json: " + what); }

inline void require(const json& j, const char* key, bool (json::*check)() const noexcept, const std::string& where) {
  if (!j.contains(key)) schema_error(where + ": missing \"" + key + "\"");
  if (!(j.at(key).*check)()) schema_error(where + ": \"" + key + "\" has the wrong type");
}

inline bool number_or_null(const json& v) { return v.is_number() || v.is_null(); }

}  // namespace detail

// Structural check of a report.json document; throws DataError naming the first violation.
inline void validate_report_json(const json& j) {
  using detail::require;
  if (!j.is_object()) detail::schema_error("top level must be an object");
  require(j, "format", &json::is_string, "report");
  if (j.at("format") != kReportFormat) detail::schema_error("unexpected format tag");
  require(j, "version", &json::is_number_integer, "report");
  require(j, "suite", &json::is_object, "report");
  require(j.at("suite"), "base_seed", &json::is_number_unsigned, "suite");
  require(j.at("suite"), "repetitions", &json::is_number_unsigned, "suite");
  require(j, "techniques", &json::is_array, "report");
  const auto reps = j.at("suite").at("repetitions").get<std::size_t>();
  for (std::size_t i = 0; i < j.at("techniques").size(); ++i) {
    const auto& t = j.at("techniques")[i];
    const std::string where = "techniques[" + std::to_string(i) + "]";
    if (!t.is_object()) detail::schema_error(where + " must be an object");
    require(t, "name", &json::is_string, where);
    require(t, "spec", &json::is_object, where);
    require(t, "rmse_runs", &json::is_array, where);
    require(t, "failed_runs", &json::is_number_unsigned, where);
    for (const char* key : {"mean", "std", "improvement_pct"}) {
      if (!t.contains(key) || !detail::number_or_null(t.at(key))) detail::schema_error(where + ": bad \"" + key + "\"");
    }
    const auto& runs = t.at("rmse_runs");
    if (runs.size() != reps) detail::schema_error(where + ": rmse_runs length differs from repetitions");
    std::size_t nulls = 0;
    for (const auto& v : runs) {
      if (!detail::number_or_null(v)) detail::schema_error(where + ": rmse_runs entries must be numbers or null");
      nulls += v.is_null() ? 1 : 0;
    }
    if (nulls != t.at("failed_runs").get<std::size_t>()) detail::schema_error(where + ": failed_runs mismatch");
  }
}

inline std::vector<ReportRow> report_rows(const json& j) {
  validate_report_json(j);
  std::vector<ReportRow> rows;
  for (const auto& t : j.at("techniques")) {
    ReportRow r;
    r.name = t.at("name").get<std::string>();
    r.baseline = t.at("spec").value("type", "") == "baseline";
    auto opt = [&](const char* key) -> std::optional<double> {
      return t.at(key).is_null() ? std::nullopt : std::optional<double>(t.at(key).get<double>());
    };
    r.mean = opt("mean");
    r.std = opt("std");
    r.improvement_pct = opt("improvement_pct");
    r.failed_runs = t.at("failed_runs").get<std::size_t>();
    r.successful = t.at("rmse_runs").size() - r.failed_runs;
    r.failed = r.successful == 0;
    rows.push_back(r);
  }
  return rows;
}

inline json load_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace detail {

inline std::string number_text(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string fixed_text(double v, int decimals) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  return std::string(buf, ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace detail

inline std::string render_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "technique,mean_rmse,std_rmse,improvement_pct,successful_runs,failed_runs,status\n";
  auto opt = [](const std::optional<double>& v) { return v ? detail::number_text(*v) : std::string(); };
  for (const auto& r : rows) {
    out << detail::csv_field(r.name) << ',' << opt(r.mean) << ',' << opt(r.std) << ',' << opt(r.improvement_pct) << ','
        << r.successful << ',' << r.failed_runs << ',' << (r.failed ? "failed" : "ok") << '\n';
  }
  return out.str();
}

inline std::string signed_percent(double v) { return (v >= 0.0 ? "+" : "") + detail::fixed_text(v, 2) + "%"; }

// Horizontal bar chart of improvement % for every non-baseline technique, centred on zero.
inline std::string render_svg(const std::vector<ReportRow>& rows) {
  std::vector<const ReportRow*> shown;
  for (const auto& r : rows) {
    if (!r.baseline) shown.push_back(&r);
  }
  double max_abs = 1.0;
  for (const auto* r : shown) {
    if (r->improvement_pct) max_abs = std::max(max_abs, std::abs(*r->improvement_pct));
  }
  const int width = 720, label_w = 160, bar_h = 22, gap = 8, top = 40;
  const int plot_w = width - label_w - 80;
  const double zero_x = label_w + 40 + plot_w / 2.0;
  const double px_per_pct = (plot_w / 2.0) / max_abs;
  const int height = top + static_cast<int>(shown.size()) * (bar_h + gap) + 20;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
      << width << ' ' << height << "\">\n";
  out << "<style>.bar.positive{fill:#2e7d32}.bar.negative{fill:#c62828}text{font:12px sans-serif}</style>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\">RMSE improvement vs baseline (%)</text>\n";
  out << "<line x1=\"" << detail::fixed_text(zero_x, 1) << "\" y1=\"" << top - 6 << "\" x2=\""
      << detail::fixed_text(zero_x, 1) << "\" y2=\"" << height - 14 << "\" stroke=\"#444\"/>\n";
  for (std::size_t i = 0; i < shown.size(); ++i) {
    const auto& r = *shown[i];
    const int y = top + static_cast<int>(i) * (bar_h + gap);
    const int text_y = y + bar_h / 2 + 4;
    out << "<text class=\"name\" x=\"" << label_w << "\" y=\"" << text_y << "\" text-anchor=\"end\">"
        << detail::xml_escape(r.name) << "</text>\n";
    if (!r.improvement_pct) {
      out << "<text class=\"value\" x=\"" << detail::fixed_text(zero_x + 4, 1) << "\" y=\"" << text_y
          << "\">n/a</text>\n";
      continue;
    }
    const double v = *r.improvement_pct;
    const double w = std::abs(v) * px_per_pct;
    const double x = v >= 0.0 ? zero_x : zero_x - w;
    out << "<rect class=\"bar " << (v >= 0.0 ? "positive" : "negative") << "\" x=\"" << detail::fixed_text(x, 1)
        << "\" y=\"" << y << "\" width=\"" << detail::fixed_text(w, 1) << "\" height=\"" << bar_h << "\"/>\n";
    const double tx = v >= 0.0 ? x + w + 4 : x - 4;
    out << "<text class=\"value\" x=\"" << detail::fixed_text(tx, 1) << "\" y=\"" << text_y << "\" text-anchor=\""
        << (v >= 0.0 ? "start" : "end") << "\">" << signed_percent(v) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline json timing_to_json(const SuiteReport& report) {
  json runs = json::array();
  for (const auto& t : report.techniques) {
    for (const auto& r : t.runs) runs.push_back(json{{"technique", t.technique.name}, {"run", r.run_index}, {"seconds", r.seconds}});
  }
  return json{{"wall_seconds", report.wall_seconds}, {"runs", runs}};
}

inline void emit_rendered(const std::vector<ReportRow>& rows, const std::filesystem::path& out_dir,
                          const std::vector<std::string>& formats) {
  for (const auto& f : formats) {
    if (f == "csv") detail::write_text(out_dir / "report.csv", render_csv(rows));
    if (f == "svg") detail::write_text(out_dir / "improvement.svg", render_svg(rows));
  }
}

// Writes report.json / report.csv / improvement.svg (as selected) plus timing.json.
inline void emit_outputs(const SuiteReport& report, const std::filesystem::path& out_dir,
                         const std::vector<std::string>& formats) {
  if (report.techniques.empty()) throw UsageError("emit_outputs: empty report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory '" + out_dir.string() + "'");
  }
  for (const auto& f : formats) {
    if (f != "json" && f != "csv" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    if (f == "json") detail::write_text(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
  }
  emit_rendered(report_rows(report), out_dir, formats);
  detail::write_text(out_dir / "timing.json", timing_to_json(report).dump(2) + "\n");
}

}  // namespace inertia

#include "physid/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "physid/error.hpp"

namespace physid {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Lines without trailing '\r', skipping blank lines; `line_no` is 1-based.
template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!line.empty()) f(line, line_no);
    pos = end + 1;
  }
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

void check_identifier(const std::string& s, std::string_view what) {
  if (s.empty()) throw DomainError(std::string(what) + " must not be empty");
  if (s.find_first_of(",\n\r") != std::string::npos)
    throw DomainError(std::string(what) + " '" + s + "' contains a separator");
}

void expect_header(std::string_view got, std::string_view want, std::string_view file) {
  if (got != want)
    throw ParseError(std::string(file) + ": expected header '" + std::string(want) + "', got '" +
                     std::string(got) + "'");
}

double round9(double v) { return std::isfinite(v) ? std::stod(format_double(v)) : v; }

std::string line_context(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  const auto line = std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n') + 1;
  const auto start = text.rfind('\n', byte == 0 ? 0 : byte - 1);
  const auto col = byte - (start == std::string_view::npos ? 0 : start + 1);
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_roundtrip(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buf, p);
}

double parse_double(std::string_view text, std::string_view what) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw ParseError("bad " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void validate(const GroundTruthRecord& record) {
  const std::string where = record.phenomenon + "/" + record.setting;
  if (record.phenomenon.empty() || record.setting.empty())
    throw ParseError("record needs phenomenon and setting");
  for (const auto& p : record.params) {
    if (p.name.empty()) throw ParseError(where + ": parameter without a name");
    if (!(p.std >= 0.0)) throw ParseError(where + "/" + p.name + ": std must be non-negative");
    if (p.min && p.value < *p.min) throw ParseError(where + "/" + p.name + ": value below min");
    if (p.max && p.value > *p.max) throw ParseError(where + "/" + p.name + ": value above max");
    if (p.min && p.max && *p.min > *p.max) throw ParseError(where + "/" + p.name + ": min exceeds max");
  }
}

std::vector<GroundTruthRecord> parse_parameters_json(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ParseError("parameters.json: " + line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!doc.is_array()) throw ParseError("parameters.json: top level must be an array");

  std::vector<GroundTruthRecord> records;
  for (std::size_t ri = 0; ri < doc.size(); ++ri) {
    const auto& jr = doc[ri];
    const std::string rname = "record " + std::to_string(ri);
    if (!jr.is_object()) throw ParseError(rname + ": not an object");
    GroundTruthRecord rec;
    for (const auto& [key, value] : jr.items()) {
      if (key == "phenomenon" || key == "setting") {
        if (!value.is_string()) throw ParseError(rname + ": field '" + key + "' must be a string");
        (key == "phenomenon" ? rec.phenomenon : rec.setting) = value.get<std::string>();
      } else if (key == "params") {
        if (!value.is_array()) throw ParseError(rname + ": field 'params' must be an array");
      } else {
        rec.extra[key] = value;
      }
    }
    if (!jr.contains("phenomenon")) throw ParseError(rname + ": missing field 'phenomenon'");
    if (!jr.contains("setting")) throw ParseError(rname + ": missing field 'setting'");
    if (!jr.contains("params")) throw ParseError(rname + ": missing field 'params'");
    const std::string where = rec.phenomenon + "/" + rec.setting;

    for (const auto& jp : jr["params"]) {
      if (!jp.is_object()) throw ParseError(where + ": parameter entry is not an object");
      GroundTruthParam p;
      bool has_type = false, has_value = false, has_name = false;
      for (const auto& [key, value] : jp.items()) {
        auto number = [&]() {
          if (!value.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
          return value.get<double>();
        };
        if (key == "name") {
          if (!value.is_string()) throw ParseError(where + ": field 'name' must be a string");
          p.name = value.get<std::string>();
          has_name = true;
        } else if (key == "value") {
          p.value = number();
          has_value = true;
        } else if (key == "std") {
          p.std = number();
        } else if (key == "min") {
          if (!value.is_null()) p.min = number();
        } else if (key == "max") {
          if (!value.is_null()) p.max = number();
        } else if (key == "units") {
          if (!value.is_string()) throw ParseError(where + ": field 'units' must be a string");
          p.units = value.get<std::string>();
        } else if (key == "measurement_type") {
          const auto t = value.is_string() ? value.get<std::string>() : std::string();
          if (t == "direct") {
            p.measurement_type = MeasurementType::Direct;
          } else if (t == "fitted") {
            p.measurement_type = MeasurementType::Fitted;
          } else {
            throw ParseError(where + ": field 'measurement_type' must be \"direct\" or \"fitted\"");
          }
          has_type = true;
        } else {
          p.extra[key] = value;
        }
      }
      const std::string pname = where + "/" + (has_name ? p.name : std::string("?"));
      if (!has_name) throw ParseError(pname + ": missing field 'name'");
      if (!has_value) throw ParseError(pname + ": missing field 'value'");
      if (!has_type) throw ParseError(pname + ": missing field 'measurement_type'");
      rec.params.push_back(std::move(p));
    }
    validate(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<GroundTruthRecord> load_parameters_json(const std::string& path) {
  return parse_parameters_json(read_file(path));
}

std::string parameters_json_text(const std::vector<GroundTruthRecord>& records) {
  ojson doc = ojson::array();
  for (const auto& rec : records) {
    validate(rec);
    ojson jr = ojson::object();
    jr["phenomenon"] = rec.phenomenon;
    jr["setting"] = rec.setting;
    ojson params = ojson::array();
    for (const auto& p : rec.params) {
      ojson jp = ojson::object();
      jp["name"] = p.name;
      jp["value"] = round9(p.value);
      jp["std"] = round9(p.std);
      jp["min"] = p.min ? ojson(round9(*p.min)) : ojson(nullptr);
      jp["max"] = p.max ? ojson(round9(*p.max)) : ojson(nullptr);
      jp["units"] = p.units;
      jp["measurement_type"] = p.measurement_type == MeasurementType::Direct ? "direct" : "fitted";
      for (const auto& [k, v] : p.extra.items()) jp[k] = v;
      params.push_back(std::move(jp));
    }
    jr["params"] = std::move(params);
    for (const auto& [k, v] : rec.extra.items()) jr[k] = v;
    doc.push_back(std::move(jr));
  }
  return doc.dump(2) + "\n";
}

void save_parameters_json(const std::string& path, const std::vector<GroundTruthRecord>& records) {
  write_file_atomic(path, parameters_json_text(records));
}

std::string trajectory_csv_text(const Trajectory& traj) {
  if (traj.body_count < 1) throw DomainError("trajectory needs at least one body");
  std::string out;
  if (!traj.units.empty()) out += "# units: " + traj.units + "\n";
  out += "t,body,pos\n";
  for (std::size_t t = 0; t < traj.size(); ++t)
    for (int b = 0; b < traj.body_count; ++b) {
      out += format_roundtrip(traj.time(t));
      out += ',';
      out += std::to_string(b);
      out += ',';
      out += format_roundtrip(traj.at(t, b));
      out += '\n';
    }
  return out;
}

Trajectory parse_trajectory_csv(std::string_view text) {
  Trajectory traj;
  std::vector<double> times;
  bool header = false;
  int bodies_seen = 0;   // bodies at the current time
  int body_count = -1;
  for_each_line(text, [&](std::string_view line, int line_no) {
    const std::string where = "trajectory line " + std::to_string(line_no);
    if (line.front() == '#') {
      constexpr std::string_view tag = "# units:";
      if (line.substr(0, tag.size()) == tag) {
        auto u = line.substr(tag.size());
        while (!u.empty() && u.front() == ' ') u.remove_prefix(1);
        traj.units = std::string(u);
      }
      return;
    }
    if (!header) {
      expect_header(line, "t,body,pos", "trajectory");
      header = true;
      return;
    }
    const auto f = split_line(line);
    if (f.size() != 3) throw ParseError(where + ": expected 3 fields");
    const double t = parse_double(f[0], "time");
    const int body = parse_int(f[1], "body");
    const double pos = parse_double(f[2], "position");
    if (times.empty() || t != times.back()) {
      if (!times.empty()) {
        if (t < times.back()) throw ParseError(where + ": rows are not sorted by time");
        if (body_count < 0) body_count = bodies_seen;
        if (bodies_seen != body_count)
          throw ParseError(where + ": time " + format_double(times.back()) + " is missing bodies");
      }
      times.push_back(t);
      bodies_seen = 0;
    }
    if (body != bodies_seen) throw ParseError(where + ": expected body " + std::to_string(bodies_seen));
    ++bodies_seen;
    traj.positions.push_back(pos);
  });
  if (!header) throw ParseError("trajectory: missing header");
  if (times.size() < 2) throw ParseError("trajectory: need at least 2 time samples");
  if (body_count < 0) body_count = bodies_seen;
  if (bodies_seen != body_count) throw ParseError("trajectory: last time is missing bodies");

  const double dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ParseError("trajectory: non-increasing timestamps");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double expected = times[0] + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expected) > 1e-9 * std::max(dt, std::abs(expected)) &&
        std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * dt)
      throw ParseError("trajectory: non-uniform timestep at t = " + format_double(times[i]));
  }
  traj.dt = dt;
  traj.t0 = times[0];
  traj.body_count = body_count;
  return traj;
}

Trajectory load_trajectory_csv(const std::string& path) { return parse_trajectory_csv(read_file(path)); }

void save_trajectory_csv(const std::string& path, const Trajectory& traj) {
  write_file_atomic(path, trajectory_csv_text(traj));
}

std::string results_header() {
  return "phenomenon,setting,clip,seed,family,integrator,loss_kind,horizon,param_name,gt,estimate,"
         "abs_error,ode_residual,diverged";
}

void sort_results(std::vector<ResultsRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultsRow& a, const ResultsRow& b) {
    return std::tie(a.phenomenon, a.setting, a.clip, a.seed, a.family, a.integrator, a.loss_kind,
                    a.horizon) < std::tie(b.phenomenon, b.setting, b.clip, b.seed, b.family,
                                          b.integrator, b.loss_kind, b.horizon);
  });
}

std::string results_csv_text(std::vector<ResultsRow> rows) {
  sort_results(rows);
  std::string out = results_header() + "\n";
  for (const auto& r : rows) {
    check_identifier(r.phenomenon, "phenomenon");
    check_identifier(r.setting, "setting");
    check_identifier(r.family, "family");
    check_identifier(r.integrator, "integrator");
    check_identifier(r.loss_kind, "loss_kind");
    check_identifier(r.param_name, "param_name");
    out += r.phenomenon + ',' + r.setting + ',' + std::to_string(r.clip) + ',' +
           std::to_string(r.seed) + ',' + r.family + ',' + r.integrator + ',' + r.loss_kind + ',' +
           std::to_string(r.horizon) + ',' + r.param_name + ',' +
           (r.gt ? format_double(*r.gt) : "") + ',' + format_double(r.estimate) + ',' +
           (r.abs_error ? format_double(*r.abs_error) : "") + ',' + format_double(r.ode_residual) +
           ',' + (r.diverged ? "true" : "false") + '\n';
  }
  return out;
}

std::vector<ResultsRow> parse_results_csv(std::string_view text) {
  std::vector<ResultsRow> rows;
  bool header = false;
  for_each_line(text, [&](std::string_view line, int line_no) {
    if (!header) {
      expect_header(line, results_header(), "results");
      header = true;
      return;
    }
    const auto f = split_line(line);
    if (f.size() != 14)
      throw ParseError("results line " + std::to_string(line_no) + ": expected 14 fields");
    ResultsRow r;
    r.phenomenon = f[0];
    r.setting = f[1];
    r.clip = parse_int(f[2], "clip");
    r.seed = parse_u64(f[3], "seed");
    r.family = f[4];
    r.integrator = f[5];
    r.loss_kind = f[6];
    r.horizon = parse_int(f[7], "horizon");
    r.param_name = f[8];
    if (!f[9].empty()) r.gt = parse_double(f[9], "gt");
    r.estimate = parse_double(f[10], "estimate");
    if (!f[11].empty()) r.abs_error = parse_double(f[11], "abs_error");
    r.ode_residual = parse_double(f[12], "ode_residual");
    if (f[13] != "true" && f[13] != "false")
      throw ParseError("results line " + std::to_string(line_no) + ": diverged must be true/false");
    r.diverged = f[13] == "true";
    rows.push_back(std::move(r));
  });
  if (!header) throw ParseError("results: missing header");
  return rows;
}

std::vector<ResultsRow> load_results_csv(const std::string& path) {
  return parse_results_csv(read_file(path));
}

std::vector<ManifestEntry> split_manifest(const std::vector<ManifestSetting>& settings,
                                          std::uint64_t seed) {
  std::vector<ManifestEntry> out;
  for (const auto& s : settings) {
    const auto labels = assign_splits(s.phenomenon, s.setting, seed, s.trial_count, s.ratio);
    for (int t = 0; t < s.trial_count; ++t)
      out.push_back({s.phenomenon, s.setting, t, labels[static_cast<std::size_t>(t)]});
  }
  std::stable_sort(out.begin(), out.end(), [](const ManifestEntry& a, const ManifestEntry& b) {
    return std::tie(a.phenomenon, a.setting, a.trial) < std::tie(b.phenomenon, b.setting, b.trial);
  });
  return out;
}

std::string manifest_csv_text(const std::vector<ManifestEntry>& manifest) {
  std::string out = "phenomenon,setting,trial,split\n";
  for (const auto& e : manifest) {
    check_identifier(e.phenomenon, "phenomenon");
    check_identifier(e.setting, "setting");
    out += e.phenomenon + ',' + e.setting + ',' + std::to_string(e.trial) + ',' +
           std::string(to_string(e.split)) + '\n';
  }
  return out;
}

std::vector<ManifestEntry> parse_manifest_csv(std::string_view text) {
  std::vector<ManifestEntry> out;
  bool header = false;
  for_each_line(text, [&](std::string_view line, int line_no) {
    if (!header) {
      expect_header(line, "phenomenon,setting,trial,split", "manifest");
      header = true;
      return;
    }
    const auto f = split_line(line);
    if (f.size() != 4) throw ParseError("manifest line " + std::to_string(line_no) + ": expected 4 fields");
    out.push_back({std::string(f[0]), std::string(f[1]), parse_int(f[2], "trial"),
                   split_label_from_string(f[3])});
  });
  if (!header) throw ParseError("manifest: missing header");
  return out;
}

std::string diagnostics_csv_text(const std::vector<DiagnosticsRow>& rows) {
  std::string out = "phenomenon,setting,clip,integrator,loss_kind,horizon,epoch,loss,grad_norm\n";
  for (const auto& d : rows)
    out += d.phenomenon + ',' + d.setting + ',' + std::to_string(d.clip) + ',' + d.config.integrator +
           ',' + d.config.loss_kind + ',' + std::to_string(d.config.horizon) + ',' +
           std::to_string(d.epoch) + ',' + format_double(d.loss) + ',' + format_double(d.grad_norm) +
           '\n';
  return out;
}

std::vector<DiagnosticsRow> parse_diagnostics_csv(std::string_view text) {
  std::vector<DiagnosticsRow> out;
  bool header = false;
  for_each_line(text, [&](std::string_view line, int line_no) {
    if (!header) {
      expect_header(line, "phenomenon,setting,clip,integrator,loss_kind,horizon,epoch,loss,grad_norm",
                    "diagnostics");
      header = true;
      return;
    }
    const auto f = split_line(line);
    if (f.size() != 9)
      throw ParseError("diagnostics line " + std::to_string(line_no) + ": expected 9 fields");
    DiagnosticsRow d;
    d.phenomenon = f[0];
    d.setting = f[1];
    d.clip = parse_int(f[2], "clip");
    d.config = {std::string(f[3]), std::string(f[4]), parse_int(f[5], "horizon")};
    d.epoch = parse_int(f[6], "epoch");
    d.loss = parse_double(f[7], "loss");
    d.grad_norm = parse_double(f[8], "grad_norm");
    out.push_back(std::move(d));
  });
  if (!header) throw ParseError("diagnostics: missing header");
  return out;
}

std::string extrapolation_csv_text(const std::vector<ExtrapolationRow>& rows) {
  std::string out = "phenomenon,setting,integrator,loss_kind,horizon,clip,k,error\n";
  for (const auto& r : rows)
    out += r.key.phenomenon + ',' + r.key.setting + ',' + r.key.config.integrator + ',' +
           r.key.config.loss_kind + ',' + std::to_string(r.key.config.horizon) + ',' +
           std::to_string(r.clip) + ',' + std::to_string(r.k) + ',' + format_double(r.error) + '\n';
  return out;
}

std::vector<ExtrapolationRow> parse_extrapolation_csv(std::string_view text) {
  std::vector<ExtrapolationRow> out;
  bool header = false;
  for_each_line(text, [&](std::string_view line, int line_no) {
    if (!header) {
      expect_header(line, "phenomenon,setting,integrator,loss_kind,horizon,clip,k,error", "extrapolation");
      header = true;
      return;
    }
    const auto f = split_line(line);
    if (f.size() != 8)
      throw ParseError("extrapolation line " + std::to_string(line_no) + ": expected 8 fields");
    ExtrapolationRow r;
    r.key = {std::string(f[0]), std::string(f[1]),
             {std::string(f[2]), std::string(f[3]), parse_int(f[4], "horizon")}};
    r.clip = parse_int(f[5], "clip");
    r.k = parse_int(f[6], "k");
    r.error = parse_double(f[7], "error");
    out.push_back(std::move(r));
  });
  if (!header) throw ParseError("extrapolation: missing header");
  return out;
}

}  // namespace physid

namespace physid {

namespace {

ojson key_json(const SettingKey& k) {
  ojson j = ojson::object();
  j["phenomenon"] = k.phenomenon;
  j["setting"] = k.setting;
  j["integrator"] = k.config.integrator;
  j["loss_kind"] = k.config.loss_kind;
  j["horizon"] = k.config.horizon;
  return j;
}

SettingKey key_from_json(const ojson& j) {
  return {j.at("phenomenon").get<std::string>(), j.at("setting").get<std::string>(),
          {j.at("integrator").get<std::string>(), j.at("loss_kind").get<std::string>(),
           j.at("horizon").get<int>()}};
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string render_table(const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> widths;
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (widths.size() <= c) widths.push_back(0);
      widths[c] = std::max(widths[c], row[c].size());
    }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c) line += "  ";
      line += c + 1 == cells[r].size() ? cells[r][c] : pad(cells[r][c], widths[c]);
    }
    out += line + '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + '\n';
    }
  }
  return out;
}

}  // namespace

std::string config_label(const ConfigKey& key) {
  return key.integrator + "/" + key.loss_kind + "/K=" + std::to_string(key.horizon);
}

std::string report_json_text(const EvalReport& report) {
  ojson doc = ojson::object();
  ojson rows = ojson::array();
  for (const auto& r : report.rows) {
    ojson j = key_json(r.key);
    j["param_name"] = r.param_name;
    j["gt"] = round9(r.gt);
    j["mae"] = round9(r.mae);
    j["sigma"] = round9(r.sigma);
    j["n_clips"] = r.n_clips;
    j["trial_mean"] = round9(r.trial_mean);
    j["trial_std"] = round9(r.trial_std);
    j["trial_n"] = r.trial_n;
    j["diverged"] = r.diverged;
    rows.push_back(std::move(j));
  }
  doc["rows"] = std::move(rows);
  ojson residuals = ojson::array();
  for (const auto& [k, v] : report.residual_by_setting) {
    ojson j = key_json(k);
    j["ode_residual"] = round9(v);
    residuals.push_back(std::move(j));
  }
  doc["residual_by_setting"] = std::move(residuals);
  ojson grads = ojson::array();
  for (const auto& [k, snaps] : report.grad_norm_snapshots) {
    ojson j = key_json(k);
    ojson s = ojson::array();
    for (const auto& g : snaps) s.push_back({{"epoch", g.epoch}, {"mean", round9(g.mean)}});
    j["snapshots"] = std::move(s);
    grads.push_back(std::move(j));
  }
  doc["grad_norm_snapshots"] = std::move(grads);
  ojson extrap = ojson::array();
  for (const auto& [k, pts] : report.extrapolation) {
    ojson j = key_json(k);
    ojson s = ojson::array();
    for (const auto& e : pts)
      s.push_back({{"k", e.k}, {"mean", round9(e.mean)}, {"std", round9(e.std)}, {"n", e.n}});
    j["points"] = std::move(s);
    extrap.push_back(std::move(j));
  }
  doc["extrapolation"] = std::move(extrap);
  return doc.dump(2) + "\n";
}

EvalReport parse_report_json(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ParseError("report: " + line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  EvalReport report;
  try {
    for (const auto& j : doc.at("rows")) {
      ReportRow r;
      r.key = key_from_json(j);
      r.param_name = j.at("param_name").get<std::string>();
      r.gt = j.at("gt").get<double>();
      r.mae = j.at("mae").get<double>();
      r.sigma = j.at("sigma").get<double>();
      r.n_clips = j.at("n_clips").get<int>();
      r.trial_mean = j.at("trial_mean").get<double>();
      r.trial_std = j.at("trial_std").get<double>();
      r.trial_n = j.at("trial_n").get<int>();
      r.diverged = j.at("diverged").get<int>();
      report.rows.push_back(std::move(r));
    }
    for (const auto& j : doc.at("residual_by_setting"))
      report.residual_by_setting[key_from_json(j)] = j.at("ode_residual").get<double>();
    for (const auto& j : doc.at("grad_norm_snapshots")) {
      auto& out = report.grad_norm_snapshots[key_from_json(j)];
      for (const auto& s : j.at("snapshots"))
        out.push_back({s.at("epoch").get<int>(), s.at("mean").get<double>()});
    }
    for (const auto& j : doc.at("extrapolation")) {
      auto& out = report.extrapolation[key_from_json(j)];
      for (const auto& s : j.at("points"))
        out.push_back({s.at("k").get<int>(), s.at("mean").get<double>(), s.at("std").get<double>(),
                       s.at("n").get<int>()});
    }
  } catch (const ojson::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return report;
}

std::string summary_text(const EvalReport& report) {
  std::string out = "Parameter estimates (MAE over the evaluation split)\n\n";
  std::vector<std::vector<std::string>> cells = {{"phenomenon", "setting", "config", "param", "gt",
                                                  "mae", "sigma", "n", "trial_mean", "trial_std",
                                                  "diverged"}};
  for (const auto& r : report.rows)
    cells.push_back({r.key.phenomenon, r.key.setting, config_label(r.key.config), r.param_name,
                     format_double(r.gt), format_double(r.mae), format_double(r.sigma),
                     std::to_string(r.n_clips), format_double(r.trial_mean),
                     format_double(r.trial_std), std::to_string(r.diverged)});
  out += render_table(cells);

  out += "\nODE residual (mean over clips)\n\n";
  cells = {{"phenomenon", "setting", "config", "ode_residual"}};
  for (const auto& [k, v] : report.residual_by_setting)
    cells.push_back({k.phenomenon, k.setting, config_label(k.config), format_double(v)});
  out += render_table(cells);

  if (!report.grad_norm_snapshots.empty()) {
    out += "\nGradient norm (mean over clips)\n\n";
    std::vector<int> epochs;
    for (const auto& [k, snaps] : report.grad_norm_snapshots)
      for (const auto& s : snaps)
        if (std::find(epochs.begin(), epochs.end(), s.epoch) == epochs.end()) epochs.push_back(s.epoch);
    std::sort(epochs.begin(), epochs.end());
    cells = {{"phenomenon", "setting", "config"}};
    for (int e : epochs) cells[0].push_back("epoch " + std::to_string(e));
    for (const auto& [k, snaps] : report.grad_norm_snapshots) {
      std::vector<std::string> row = {k.phenomenon, k.setting, config_label(k.config)};
      for (int e : epochs) {
        const auto it = std::find_if(snaps.begin(), snaps.end(),
                                     [&](const GradSnapshot& s) { return s.epoch == e; });
        row.push_back(it == snaps.end() ? "-" : format_double(it->mean));
      }
      cells.push_back(std::move(row));
    }
    out += render_table(cells);
  }

  if (!report.extrapolation.empty()) {
    out += "\nExtrapolation error E_k (mean +- std)\n\n";
    cells = {{"phenomenon", "setting", "config", "k", "mean", "std", "n"}};
    for (const auto& [k, pts] : report.extrapolation)
      for (const auto& p : pts)
        cells.push_back({k.phenomenon, k.setting, config_label(k.config), std::to_string(p.k),
                         format_double(p.mean), format_double(p.std), std::to_string(p.n)});
    out += render_table(cells);
  }
  return out;
}

}  // namespace physid

#include <filesystem>
#include <fstream>
#include <sstream>

#include "holo/io.hpp"

namespace holo {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile file;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw DataError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      file.sections[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw DataError("config line " + std::to_string(lineno) + ": empty key");
    file.sections[section][key] = trim(line.substr(eq + 1));
  }
  return file;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ConfigFile::serialize() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, keys] : sections) {
    if (!first) out << "\n";
    first = false;
    out << "[" << name << "]\n";
    for (const auto& [key, value] : keys) out << key << " = " << value << "\n";
  }
  return out.str();
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) throw DataError("config: missing section [" + section + "]");
  auto k = s->second.find(key);
  if (k == s->second.end())
    throw DataError("config: missing key '" + key + "' in section [" + section + "]");
  return k->second;
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw DataError("config: value of '" + key + "' in [" + section + "] is not a number: " + v);
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key) const {
  const double d = get_double(section, key);
  const int i = static_cast<int>(d);
  if (d != i)
    throw DataError("config: value of '" + key + "' in [" + section + "] is not an integer");
  return i;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw DataError("config: value of '" + key + "' in [" + section + "] is not a boolean");
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(section, key));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw DataError("config: bad list element '" + item + "' for key '" + key + "'");
    }
  }
  if (out.empty()) throw DataError("config: empty list for key '" + key + "'");
  return out;
}

namespace {

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

RunConfig RunConfig::from_config(const ConfigFile& file, const std::string& base_dir) {
  RunConfig run;
  run.optical.wavelengths = file.get_list("optical", "wavelengths");
  run.optical.pixel_pitch = file.get_double("optical", "pixel_pitch");
  {
    const auto res = file.get_list("optical", "slm_resolution");
    if (res.size() != 2) throw DataError("config: slm_resolution needs cols, rows");
    run.optical.slm_cols = static_cast<int>(res[0]);
    run.optical.slm_rows = static_cast<int>(res[1]);
  }
  if (file.has("optical", "active_resolution")) {
    const auto res = file.get_list("optical", "active_resolution");
    if (res.size() != 2) throw DataError("config: active_resolution needs cols, rows");
    run.optical.active_cols = static_cast<int>(res[0]);
    run.optical.active_rows = static_cast<int>(res[1]);
  } else {
    run.optical.active_cols = run.optical.slm_cols;
    run.optical.active_rows = run.optical.slm_rows;
  }
  run.optical.eyepiece_focal_length = file.get_double("optical", "eyepiece_focal_length");
  run.optical.half_depth = file.get_double("optical", "half_depth");
  run.optical.wrp_distance = file.get_double("optical", "wrp_distance");
  run.optical.num_frames = file.get_int_or("optical", "num_frames", 1);
  run.optical.sideband = file.get_bool_or("optical", "sideband", true);
  run.optical.eyebox_reference = file.get_int_or("optical", "eyebox_reference", -1);
  run.optical.validate();

  const std::string mode = file.get_or("supervision", "mode", "2.5d");
  if (mode == "2.5d")
    run.mode = SupervisionMode::mode_2p5d;
  else if (mode == "3d")
    run.mode = SupervisionMode::mode_3d;
  else if (mode == "4d")
    run.mode = SupervisionMode::mode_4d;
  else
    throw DataError("config: unknown supervision mode '" + mode + "'");

  run.rgb_path = resolve(base_dir, file.get_or("supervision", "rgb", ""));
  run.depth_path = resolve(base_dir, file.get_or("supervision", "depth", ""));
  run.lightfield_dir = resolve(base_dir, file.get_or("supervision", "lightfield_dir", ""));
  run.depth_min_diopters = file.get_double_or("supervision", "depth_min_diopters", 0.0);
  run.depth_max_diopters = file.get_double_or("supervision", "depth_max_diopters", -1.0);
  run.planes = file.get_int_or("supervision", "planes", 9);
  run.stft.window = file.get_int_or("supervision", "stft_window", 16);
  run.stft.hop = file.get_int_or("supervision", "stft_hop", run.stft.window);
  if (file.has("supervision", "views")) {
    const auto v = file.get_list("supervision", "views");
    if (v.size() != 2) throw DataError("config: views needs cols, rows");
    run.stft.view_cols = static_cast<int>(v[0]);
    run.stft.view_rows = static_cast<int>(v[1]);
  }
  run.focal_source = file.get_or("supervision", "focal_source", "rgbd");
  if (run.focal_source != "rgbd" && run.focal_source != "lf")
    throw DataError("config: focal_source must be rgbd or lf");
  run.pupil_diameter = file.get_double_or("supervision", "pupil_diameter", 4e-3);

  // Referenced assets must exist at parse time. Configs without a
  // supervision section only carry geometry and skip these checks.
  const bool has_supervision = file.sections.count("supervision") > 0;
  const bool needs_rgbd =
      has_supervision &&
      (run.mode == SupervisionMode::mode_2p5d ||
       (run.mode == SupervisionMode::mode_3d && run.focal_source == "rgbd"));
  const bool needs_lf = has_supervision &&
                        (run.mode == SupervisionMode::mode_4d ||
                         (run.mode == SupervisionMode::mode_3d && run.focal_source == "lf"));
  if (needs_rgbd) {
    if (run.rgb_path.empty() || run.depth_path.empty())
      throw DataError("config: this supervision mode needs rgb and depth paths");
    if (!std::filesystem::exists(run.rgb_path))
      throw DataError("config: rgb file does not exist: " + run.rgb_path);
    if (!std::filesystem::exists(run.depth_path))
      throw DataError("config: depth file does not exist: " + run.depth_path);
  }
  if (needs_lf) {
    if (run.lightfield_dir.empty())
      throw DataError("config: this supervision mode needs lightfield_dir");
    if (!std::filesystem::is_directory(run.lightfield_dir))
      throw DataError("config: light-field directory does not exist: " + run.lightfield_dir);
  }

  run.optimizer.iterations = file.get_int_or("optimizer", "iterations", 1000);
  run.optimizer.step_size = file.get_double_or("optimizer", "step_size", 0.0);
  run.optimizer.seed = static_cast<uint64_t>(file.get_double_or("optimizer", "seed", 1.0));
  run.optimizer.tau_start = file.get_double_or("optimizer", "tau_start", 1.0);
  run.optimizer.tau_decay = file.get_double_or("optimizer", "tau_decay", 0.999);
  run.optimizer.tau_floor = file.get_double_or("optimizer", "tau_floor", 0.1);
  const std::string surrogate = file.get_or("optimizer", "surrogate", "gumbel");
  if (surrogate == "gumbel")
    run.optimizer.surrogate = Surrogate::gumbel;
  else if (surrogate == "unit")
    run.optimizer.surrogate = Surrogate::unit_gradient;
  else
    throw DataError("config: unknown surrogate '" + surrogate + "'");
  run.optimizer.validate();

  run.output_dir = resolve(base_dir, file.get_or("output", "dir", "runs/out"));
  return run;
}

RunConfig RunConfig::load(const std::string& path) {
  const ConfigFile file = ConfigFile::load(path);
  return from_config(file, std::filesystem::path(path).parent_path().string());
}

ConfigFile RunConfig::to_config() const {
  ConfigFile file;
  auto& optical = file.sections["optical"];
  {
    std::string w;
    for (size_t i = 0; i < this->optical.wavelengths.size(); ++i)
      w += (i ? ", " : "") + format_double(this->optical.wavelengths[i]);
    optical["wavelengths"] = w;
  }
  optical["pixel_pitch"] = format_double(this->optical.pixel_pitch);
  optical["slm_resolution"] =
      std::to_string(this->optical.slm_cols) + ", " + std::to_string(this->optical.slm_rows);
  optical["active_resolution"] =
      std::to_string(this->optical.active_cols) + ", " + std::to_string(this->optical.active_rows);
  optical["eyepiece_focal_length"] = format_double(this->optical.eyepiece_focal_length);
  optical["half_depth"] = format_double(this->optical.half_depth);
  optical["wrp_distance"] = format_double(this->optical.wrp_distance);
  optical["num_frames"] = std::to_string(this->optical.num_frames);
  optical["sideband"] = this->optical.sideband ? "true" : "false";
  optical["eyebox_reference"] = std::to_string(this->optical.eyebox_reference);

  auto& sup = file.sections["supervision"];
  sup["mode"] = mode == SupervisionMode::mode_2p5d ? "2.5d"
                : mode == SupervisionMode::mode_3d ? "3d"
                                                   : "4d";
  if (!rgb_path.empty()) sup["rgb"] = rgb_path;
  if (!depth_path.empty()) sup["depth"] = depth_path;
  if (!lightfield_dir.empty()) sup["lightfield_dir"] = lightfield_dir;
  sup["depth_min_diopters"] = format_double(depth_min_diopters);
  sup["depth_max_diopters"] = format_double(depth_max_diopters);
  sup["planes"] = std::to_string(planes);
  sup["views"] = std::to_string(stft.view_cols) + ", " + std::to_string(stft.view_rows);
  sup["stft_window"] = std::to_string(stft.window);
  sup["stft_hop"] = std::to_string(stft.hop);
  sup["focal_source"] = focal_source;
  sup["pupil_diameter"] = format_double(pupil_diameter);

  auto& opt = file.sections["optimizer"];
  opt["iterations"] = std::to_string(optimizer.iterations);
  opt["step_size"] = format_double(optimizer.step_size);
  opt["seed"] = std::to_string(optimizer.seed);
  opt["tau_start"] = format_double(optimizer.tau_start);
  opt["tau_decay"] = format_double(optimizer.tau_decay);
  opt["tau_floor"] = format_double(optimizer.tau_floor);
  opt["surrogate"] = optimizer.surrogate == Surrogate::gumbel ? "gumbel" : "unit";

  file.sections["output"]["dir"] = output_dir;
  return file;
}

void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::map<std::string, std::string>& invocation) {
  std::ofstream out(path);
  if (!out) throw DataError("manifest: cannot write " + path);
  out << "# holo run manifest\n";
  out << "# format_version = 1\n";
  ConfigFile echo = cfg.to_config();
  if (!invocation.empty()) echo.sections["invocation"] = invocation;
  out << echo.serialize();
}

}  // namespace holo

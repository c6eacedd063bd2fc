// File formats and run configuration: key=value config files, portable float
// maps, PNG images, bit-packed hologram stacks, CSV tables.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holo/errors.hpp"
#include "holo/grid.hpp"
#include "holo/optics.hpp"
#include "holo/optimizer.hpp"
#include "holo/targets.hpp"

namespace holo {

// ---------------------------------------------------------------- config --

// Flat [section] / key = value text format. Sections and keys serialize in
// sorted order, so parse -> serialize -> parse is a fixed point.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);
  std::string serialize() const;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
};

struct RunConfig {
  OpticalConfig optical;
  SupervisionMode mode = SupervisionMode::mode_2p5d;

  // Asset references; which ones are required depends on the mode.
  std::string rgb_path, depth_path, lightfield_dir;
  double depth_min_diopters = 0;
  double depth_max_diopters = -1;  // -1 = use the config geometry's d_ncp
  int planes = 9;
  StftSpec stft;                   // view grid + window for 4D
  std::string focal_source = "rgbd";  // 3D: "rgbd" or "lf"
  double pupil_diameter = 4e-3;       // 3D w/ RGB-D blur

  OptimizerConfig optimizer;
  std::string output_dir = "runs/out";

  static RunConfig from_config(const ConfigFile& file, const std::string& base_dir);
  static RunConfig load(const std::string& path);
  ConfigFile to_config() const;
};

// -------------------------------------------------------------- pfm / png --

// Portable float map, 1 (Pf) or 3 (PF) channels. The scale field's sign
// encodes endianness; rows are stored bottom-to-top.
void write_pfm(const std::string& path, const std::vector<RealGrid>& channels);
std::vector<RealGrid> read_pfm(const std::string& path);

// PNG. Readers normalize to [0, 1]; the 8-bit writer applies a display gamma
// (default 2.2) and is for viewing only. The 16-bit gray writer is linear.
std::vector<RealGrid> read_png(const std::string& path);
void write_png8(const std::string& path, const std::vector<RealGrid>& channels,
                double gamma = 2.2);
void write_png16_gray(const std::string& path, const RealGrid& image);

// ------------------------------------------------------------- holograms --

// Bit-packed binary frame container: magic "HBIN1", version, bit-order tag,
// channel/frame dimensions, then LSB-first rows padded to byte boundaries.
struct BinaryStack {
  int width = 0, height = 0, frames = 0, channels = 0;
  std::vector<std::vector<RealGrid>> patterns;  // [channel][frame], values 0/1

  std::vector<FieldStack> to_field_stacks(const OpticalConfig& cfg) const;
};

void write_hologram(const std::string& path, const BinaryStack& stack);
BinaryStack read_hologram(const std::string& path);

BinaryStack binary_stack_from_optimization(const std::vector<FieldStack>& channel_stacks);

// ------------------------------------------------------------------- csv --

void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::string& path);

// ---------------------------------------------------------------- assets --

// view_{row:02}_{col:02}.{pfm|png} directory; missing indices, shape
// mismatches and undecodable files raise distinct diagnostics.
LightField load_lightfield(const std::string& dir);

// RGB image + 16-bit depth image; depth codes map linearly onto
// [min_diopters, max_diopters].
RgbdTarget load_rgbd(const std::string& rgb_path, const std::string& depth_path,
                     double min_diopters, double max_diopters);

// Run manifest: canonical config echo plus seed and version, enough to
// reproduce a run bit-exactly. `invocation` adds command-specific keys.
void write_manifest(const std::string& path, const RunConfig& cfg,
                    const std::map<std::string, std::string>& invocation = {});

}  // namespace holo

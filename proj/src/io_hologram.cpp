#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>

#include "holo/io.hpp"

namespace holo {

namespace {

constexpr char kMagic[5] = {'H', 'B', 'I', 'N', '1'};
constexpr uint8_t kVersion = 1;
constexpr uint8_t kBitOrderLsbFirst = 'L';

void put_u32(std::ostream& out, uint32_t v) {
  uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                  static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
  uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

}  // namespace

void write_hologram(const std::string& path, const BinaryStack& stack) {
  if (stack.channels < 1 || stack.frames < 1 || stack.width < 1 || stack.height < 1)
    throw DataError("hologram: empty stack");
  if (static_cast<int>(stack.patterns.size()) != stack.channels)
    throw DataError("hologram: channel count mismatch");
  for (const auto& frames : stack.patterns) {
    if (static_cast<int>(frames.size()) != stack.frames)
      throw DataError("hologram: frame count mismatch");
    for (const auto& p : frames) {
      if (p.rows() != stack.height || p.cols() != stack.width)
        throw DataError("hologram: frame shape mismatch");
      for (double v : p)
        if (v != 0.0 && v != 1.0)
          throw DataError("hologram: write input must be exactly binary");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("hologram: cannot write " + path);
  out.write(kMagic, 5);
  out.put(static_cast<char>(kVersion));
  out.put(static_cast<char>(kBitOrderLsbFirst));
  out.put(static_cast<char>(stack.channels));
  put_u32(out, static_cast<uint32_t>(stack.width));
  put_u32(out, static_cast<uint32_t>(stack.height));
  put_u32(out, static_cast<uint32_t>(stack.frames));

  const int row_bytes = (stack.width + 7) / 8;
  std::vector<uint8_t> row(row_bytes);
  for (const auto& frames : stack.patterns)
    for (const auto& pattern : frames)
      for (int r = 0; r < stack.height; ++r) {
        std::fill(row.begin(), row.end(), 0);
        for (int c = 0; c < stack.width; ++c)
          if (pattern(r, c) != 0.0) row[c / 8] |= static_cast<uint8_t>(1u << (c % 8));
        out.write(reinterpret_cast<const char*>(row.data()), row_bytes);
      }
  if (!out) throw DataError("hologram: short write to " + path);
}

BinaryStack read_hologram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("hologram: cannot open " + path);
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, kMagic, 5) != 0)
    throw DataError("hologram: bad magic in " + path);
  const int version = in.get();
  if (version != kVersion)
    throw DataError("hologram: unsupported version " + std::to_string(version));
  const int bit_order = in.get();
  if (bit_order != kBitOrderLsbFirst)
    throw DataError("hologram: unsupported bit-order tag");
  BinaryStack stack;
  stack.channels = in.get();
  stack.width = static_cast<int>(get_u32(in));
  stack.height = static_cast<int>(get_u32(in));
  stack.frames = static_cast<int>(get_u32(in));
  if (!in || stack.channels < 1 || stack.width < 1 || stack.height < 1 || stack.frames < 1)
    throw DataError("hologram: malformed header in " + path);

  const int row_bytes = (stack.width + 7) / 8;
  const std::streamoff expected = static_cast<std::streamoff>(stack.channels) * stack.frames *
                                  stack.height * row_bytes;
  const std::streamoff header_end = in.tellg();
  in.seekg(0, std::ios::end);
  if (in.tellg() - header_end != expected)
    throw DataError("hologram: payload length mismatch in " + path);
  in.seekg(header_end);

  std::vector<uint8_t> row(row_bytes);
  stack.patterns.assign(stack.channels,
                        std::vector<RealGrid>(stack.frames, RealGrid(stack.height, stack.width)));
  for (int ch = 0; ch < stack.channels; ++ch)
    for (int t = 0; t < stack.frames; ++t)
      for (int r = 0; r < stack.height; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), row_bytes);
        if (!in) throw DataError("hologram: truncated payload in " + path);
        for (int c = 0; c < stack.width; ++c)
          stack.patterns[ch][t](r, c) = (row[c / 8] >> (c % 8)) & 1u ? 1.0 : 0.0;
      }
  return stack;
}

std::vector<FieldStack> BinaryStack::to_field_stacks(const OpticalConfig& cfg) const {
  if (channels > static_cast<int>(cfg.wavelengths.size()))
    throw DataError("hologram: more channels than configured wavelengths");
  std::vector<FieldStack> out(channels);
  for (int ch = 0; ch < channels; ++ch)
    for (const auto& pattern : patterns[ch]) {
      ComplexGrid g(pattern.rows(), pattern.cols());
      for (size_t i = 0; i < pattern.size(); ++i) g[i] = pattern[i];
      out[ch].frames.emplace_back(std::move(g), cfg.pixel_pitch, cfg.wavelengths[ch]);
    }
  return out;
}

BinaryStack binary_stack_from_optimization(const std::vector<FieldStack>& channel_stacks) {
  if (channel_stacks.empty() || channel_stacks.front().frames.empty())
    throw DataError("hologram: empty optimization result");
  BinaryStack stack;
  stack.channels = static_cast<int>(channel_stacks.size());
  stack.frames = channel_stacks.front().count();
  stack.height = channel_stacks.front().frames.front().grid.rows();
  stack.width = channel_stacks.front().frames.front().grid.cols();
  for (const auto& fs : channel_stacks) {
    std::vector<RealGrid> frames;
    for (const auto& f : fs.frames) {
      RealGrid p(f.grid.rows(), f.grid.cols());
      for (size_t i = 0; i < p.size(); ++i) {
        const double v = f.grid[i].real();
        if ((v != 0.0 && v != 1.0) || f.grid[i].imag() != 0.0)
          throw DataError("hologram: optimization frames are not binary");
        p[i] = v;
      }
      frames.push_back(std::move(p));
    }
    stack.patterns.push_back(std::move(frames));
  }
  return stack;
}

void write_csv(const std::string& path, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("csv: cannot write " + path);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> row;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      row.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

LightField load_lightfield(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("lightfield: not a directory: " + dir);
  const std::regex pattern(R"(view_(\d{2})_(\d{2})\.(pfm|png))");
  std::map<std::pair<int, int>, std::string> files;
  int max_row = -1, max_col = -1;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    const int row = std::stoi(m[1]), col = std::stoi(m[2]);
    files[{row, col}] = entry.path().string();
    max_row = std::max(max_row, row);
    max_col = std::max(max_col, col);
  }
  if (files.empty()) throw DataError("lightfield: no view files found in " + dir);

  LightField lf;
  lf.view_rows = max_row + 1;
  lf.view_cols = max_col + 1;
  for (int r = 0; r < lf.view_rows; ++r)
    for (int c = 0; c < lf.view_cols; ++c) {
      auto it = files.find({r, c});
      if (it == files.end())
        throw DataError("lightfield: missing view (" + std::to_string(r) + ", " +
                        std::to_string(c) + ") in " + dir);
      std::vector<RealGrid> channels = it->second.ends_with(".pfm") ? read_pfm(it->second)
                                                                    : read_png(it->second);
      for (auto& ch : channels)
        for (auto& v : ch) v = std::clamp(v, 0.0, 1.0);
      if (!lf.views.empty() &&
          (static_cast<int>(channels.size()) != lf.channels() ||
           !channels.front().same_shape(lf.views.front().front())))
        throw DataError("lightfield: view (" + std::to_string(r) + ", " + std::to_string(c) +
                        ") has inconsistent shape or channels");
      lf.views.push_back(std::move(channels));
    }
  // Nominal angle indices; callers assign physical angles from the geometry.
  assign_view_angles(lf, 1.0, 1.0, false);
  return lf;
}

RgbdTarget load_rgbd(const std::string& rgb_path, const std::string& depth_path,
                     double min_diopters, double max_diopters) {
  RgbdTarget target;
  target.amplitude = rgb_path.ends_with(".pfm") ? read_pfm(rgb_path) : read_png(rgb_path);
  for (auto& ch : target.amplitude)
    for (auto& v : ch) v = std::clamp(v, 0.0, 1.0);
  std::vector<RealGrid> depth =
      depth_path.ends_with(".pfm") ? read_pfm(depth_path) : read_png(depth_path);
  if (depth.size() != 1) throw DataError("rgbd: depth image must be single-channel");
  target.depth = std::move(depth.front());
  for (auto& v : target.depth) v = min_diopters + v * (max_diopters - min_diopters);
  target.validate();
  return target;
}

}  // namespace holo

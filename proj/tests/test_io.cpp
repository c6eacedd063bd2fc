#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "holo/io.hpp"
#include "holo/random.hpp"

using namespace holo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("holo_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

RealGrid random_grid(int rows, int cols, uint64_t seed) {
  std::mt19937_64 gen(seed);
  RealGrid g(rows, cols);
  for (auto& v : g) v = uniform_open(gen);
  return g;
}

const char* kConfigText = R"(# sample run
[optical]
wavelengths = 450e-9, 520e-9, 638e-9
pixel_pitch = 8.2e-6
slm_resolution = 192, 120
active_resolution = 192, 120
eyepiece_focal_length = 40e-3
half_depth = 5.535e-3
wrp_distance = 7e-3
num_frames = 2
sideband = true

[supervision]
mode = 4d
lightfield_dir = LFDIR
views = 3, 3
stft_window = 16
stft_hop = 16

[optimizer]
iterations = 5
seed = 11

[output]
dir = out
)";

}  // namespace

TEST_CASE("config parse/serialize is a fixed point") {
  const ConfigFile first = ConfigFile::parse(kConfigText);
  const std::string text = first.serialize();
  const ConfigFile second = ConfigFile::parse(text);
  CHECK(second.sections == first.sections);
  CHECK(second.serialize() == text);

  CHECK(first.get_double("optical", "pixel_pitch") == doctest::Approx(8.2e-6));
  CHECK(first.get_list("optical", "wavelengths").size() == 3);
  CHECK(first.get_bool_or("optical", "sideband", false));
  CHECK_THROWS_AS(first.get("optical", "missing_key"), DataError);
  CHECK_THROWS_AS(ConfigFile::parse("key_without_equals\n"), DataError);
}

TEST_CASE("run config validates referenced assets") {
  TempDir tmp;
  // Light-field directory with a full 3x3 grid of views.
  const fs::path lf = tmp.path / "lf";
  fs::create_directories(lf);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      char name[32];
      std::snprintf(name, sizeof(name), "view_%02d_%02d.pfm", r, c);
      write_pfm((lf / name).string(), {random_grid(12, 12, r * 3 + c)});
    }
  std::string text = kConfigText;
  text.replace(text.find("LFDIR"), 5, lf.string());
  const std::string cfg_path = tmp.file("run.cfg");
  std::ofstream(cfg_path) << text;

  const RunConfig run = RunConfig::load(cfg_path);
  CHECK(run.mode == SupervisionMode::mode_4d);
  CHECK(run.stft.view_cols == 3);
  CHECK(run.optical.num_frames == 2);

  // A missing directory is rejected at parse time.
  std::string broken = kConfigText;
  broken.replace(broken.find("LFDIR"), 5, (tmp.path / "absent").string());
  const std::string bad_path = tmp.file("bad.cfg");
  std::ofstream(bad_path) << broken;
  CHECK_THROWS_AS(RunConfig::load(bad_path), DataError);
}

TEST_CASE("pfm round trip and foreign-endian decoding") {
  TempDir tmp;
  const RealGrid gray = random_grid(7, 5, 1);
  write_pfm(tmp.file("gray.pfm"), {gray});
  const auto back = read_pfm(tmp.file("gray.pfm"));
  REQUIRE(back.size() == 1);
  for (size_t i = 0; i < gray.size(); ++i)
    CHECK(back[0][i] == doctest::Approx(gray[i]).epsilon(1e-7));

  std::vector<RealGrid> rgb = {random_grid(4, 6, 2), random_grid(4, 6, 3), random_grid(4, 6, 4)};
  write_pfm(tmp.file("rgb.pfm"), rgb);
  const auto rgb_back = read_pfm(tmp.file("rgb.pfm"));
  REQUIRE(rgb_back.size() == 3);
  for (int ch = 0; ch < 3; ++ch)
    for (size_t i = 0; i < rgb[ch].size(); ++i)
      CHECK(rgb_back[ch][i] == doctest::Approx(rgb[ch][i]).epsilon(1e-7));

  // Reference little-endian file produced by an independent encoder
  // (2x2 grayscale, bottom row first): values 1, 2 / 3, 4 reading top-down.
  {
    std::ofstream out(tmp.file("ref_le.pfm"), std::ios::binary);
    out << "Pf\n2 2\n-1.0\n";
    const float bottom[2] = {3.0f, 4.0f}, top[2] = {1.0f, 2.0f};
    out.write(reinterpret_cast<const char*>(bottom), 8);
    out.write(reinterpret_cast<const char*>(top), 8);
  }
  const auto ref = read_pfm(tmp.file("ref_le.pfm"));
  CHECK(ref[0](0, 0) == 1.0f);
  CHECK(ref[0](0, 1) == 2.0f);
  CHECK(ref[0](1, 0) == 3.0f);
  CHECK(ref[0](1, 1) == 4.0f);

  // Big-endian flavor of the same raster.
  {
    std::ofstream out(tmp.file("ref_be.pfm"), std::ios::binary);
    out << "Pf\n2 2\n1.0\n";
    auto put_be = [&](float v) {
      unsigned char b[4];
      std::memcpy(b, &v, 4);
      std::swap(b[0], b[3]);
      std::swap(b[1], b[2]);
      out.write(reinterpret_cast<const char*>(b), 4);
    };
    for (float v : {3.0f, 4.0f, 1.0f, 2.0f}) put_be(v);
  }
  const auto ref_be = read_pfm(tmp.file("ref_be.pfm"));
  CHECK(ref_be[0](0, 0) == 1.0f);
  CHECK(ref_be[0](1, 1) == 4.0f);

  std::ofstream(tmp.file("junk.pfm")) << "P6\nnot a float map\n";
  CHECK_THROWS_AS(read_pfm(tmp.file("junk.pfm")), DataError);
}

TEST_CASE("png round trips") {
  TempDir tmp;
  // 16-bit gray is lossless to one code value.
  const RealGrid depth = random_grid(9, 11, 5);
  write_png16_gray(tmp.file("depth.png"), depth);
  const auto d = read_png(tmp.file("depth.png"));
  REQUIRE(d.size() == 1);
  for (size_t i = 0; i < depth.size(); ++i) CHECK(std::abs(d[0][i] - depth[i]) <= 1.0 / 65535.0);

  // 8-bit RGB with unit gamma round-trips to one code value.
  std::vector<RealGrid> rgb = {random_grid(8, 8, 6), random_grid(8, 8, 7), random_grid(8, 8, 8)};
  write_png8(tmp.file("rgb.png"), rgb, 1.0);
  const auto rgb_back = read_png(tmp.file("rgb.png"));
  REQUIRE(rgb_back.size() == 3);
  for (int ch = 0; ch < 3; ++ch)
    for (size_t i = 0; i < rgb[ch].size(); ++i)
      CHECK(std::abs(rgb_back[ch][i] - rgb[ch][i]) <= 1.0 / 255.0 + 1e-9);
}

TEST_CASE("gamma stays on the viewing path, never the data path") {
  TempDir tmp;
  const RealGrid linear = random_grid(16, 16, 9);
  // The float path is exact: metrics computed on it see the original data.
  write_pfm(tmp.file("data.pfm"), {linear});
  const auto data = read_pfm(tmp.file("data.pfm"));
  double worst = 0;
  for (size_t i = 0; i < linear.size(); ++i)
    worst = std::max(worst, std::abs(data[0][i] - linear[i]));
  CHECK(worst < 1e-7);

  // The 8-bit view export is gamma-encoded and visibly differs from linear.
  write_png8(tmp.file("view.png"), {linear}, 2.2);
  const auto view = read_png(tmp.file("view.png"));
  double drift = 0;
  for (size_t i = 0; i < linear.size(); ++i)
    drift = std::max(drift, std::abs(view[0][i] - linear[i]));
  CHECK(drift > 0.05);
}

TEST_CASE("hologram format: round trip, size, diagnostics") {
  TempDir tmp;
  std::mt19937_64 gen(17);

  BinaryStack stack;
  stack.width = 70;  // deliberately not a byte multiple
  stack.height = 12;
  stack.frames = 3;
  stack.channels = 2;
  stack.patterns.assign(2, std::vector<RealGrid>(3, RealGrid(12, 70)));
  for (auto& frames : stack.patterns)
    for (auto& p : frames)
      for (auto& v : p) v = gen() % 2 ? 1.0 : 0.0;

  const std::string path = tmp.file("stack.hbin");
  write_hologram(path, stack);
  const BinaryStack back = read_hologram(path);
  CHECK(back.width == stack.width);
  CHECK(back.height == stack.height);
  CHECK(back.frames == stack.frames);
  CHECK(back.channels == stack.channels);
  for (int ch = 0; ch < 2; ++ch)
    for (int t = 0; t < 3; ++t)
      for (size_t i = 0; i < stack.patterns[ch][t].size(); ++i)
        CHECK(back.patterns[ch][t][i] == stack.patterns[ch][t][i]);

  // All-zero frames: file size is exactly header + payload.
  BinaryStack zeros;
  zeros.width = 70;
  zeros.height = 12;
  zeros.frames = 1;
  zeros.channels = 1;
  zeros.patterns = {{RealGrid(12, 70, 0.0)}};
  write_hologram(tmp.file("zeros.hbin"), zeros);
  const auto expected = 20 + 1 * 1 * 12 * ((70 + 7) / 8);
  CHECK(fs::file_size(tmp.file("zeros.hbin")) == static_cast<uintmax_t>(expected));

  // Truncation is reported as a payload-length problem.
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() - 5);
    std::ofstream(tmp.file("short.hbin"), std::ios::binary) << bytes;
  }
  try {
    read_hologram(tmp.file("short.hbin"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("payload length") != std::string::npos);
  }

  // Bad magic.
  std::ofstream(tmp.file("bad.hbin"), std::ios::binary) << "NOPE!xxxxxxxxxxxxxxx";
  CHECK_THROWS_AS(read_hologram(tmp.file("bad.hbin")), DataError);

  // Non-binary input is refused.
  BinaryStack gray = zeros;
  gray.patterns[0][0](3, 3) = 0.5;
  CHECK_THROWS_AS(write_hologram(tmp.file("gray.hbin"), gray), DataError);
}

TEST_CASE("hologram round trip on randomized stacks") {
  TempDir tmp;
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    BinaryStack stack;
    stack.width = 9 + static_cast<int>(gen() % 40);
    stack.height = 5 + static_cast<int>(gen() % 20);
    stack.frames = 1 + static_cast<int>(gen() % 4);
    stack.channels = 1;
    stack.patterns.assign(1, std::vector<RealGrid>(
                                 stack.frames, RealGrid(stack.height, stack.width)));
    for (auto& p : stack.patterns[0])
      for (auto& v : p) v = gen() % 2 ? 1.0 : 0.0;
    const std::string path = tmp.file("roundtrip.hbin");
    write_hologram(path, stack);
    const BinaryStack back = read_hologram(path);
    for (int t = 0; t < stack.frames; ++t)
      for (size_t i = 0; i < stack.patterns[0][t].size(); ++i)
        REQUIRE(back.patterns[0][t][i] == stack.patterns[0][t][i]);
  }
}

TEST_CASE("light-field directory loading") {
  TempDir tmp;
  const fs::path dir = tmp.path / "lf";
  fs::create_directories(dir);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      char name[32];
      std::snprintf(name, sizeof(name), "view_%02d_%02d.pfm", r, c);
      write_pfm((dir / name).string(), {random_grid(6, 6, r * 3 + c)});
    }
  const LightField lf = load_lightfield(dir.string());
  CHECK(lf.view_rows == 3);
  CHECK(lf.view_cols == 3);
  CHECK(lf.channels() == 1);

  fs::remove(dir / "view_01_02.pfm");
  try {
    load_lightfield(dir.string());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("(1, 2)") != std::string::npos);
  }

  CHECK_THROWS_AS(load_lightfield((tmp.path / "nothing").string()), DataError);
}

TEST_CASE("rgbd loading maps depth codes onto diopters") {
  TempDir tmp;
  write_png8(tmp.file("rgb.png"), {random_grid(10, 10, 31), random_grid(10, 10, 32),
                                   random_grid(10, 10, 33)},
             1.0);
  write_png16_gray(tmp.file("depth.png"), random_grid(10, 10, 34));
  const RgbdTarget target = load_rgbd(tmp.file("rgb.png"), tmp.file("depth.png"), 0.0, 9.57);
  CHECK(target.amplitude.size() == 3);
  for (double v : target.depth) {
    CHECK(v >= 0.0);
    CHECK(v <= 9.57);
  }
}

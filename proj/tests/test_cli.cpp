// CLI dispatch contract: exit codes and top-level diagnostics. The binary
// path arrives via the HOLO_CLI environment variable set by CTest.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "holo/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("HOLO_CLI");
  REQUIRE_MESSAGE(env != nullptr, "HOLO_CLI is not set");
  return env;
}

std::pair<int, std::string> run(const std::string& args) {
  std::string output;
  FILE* pipe = popen((cli_path() + " " + args + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) output += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("holo_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("no arguments prints usage and exits 1") {
  const auto [code, out] = run("");
  CHECK(code == 1);
  CHECK(out.find("Usage") != std::string::npos);
}

TEST_CASE("--help exits 0 on every node") {
  for (const char* args : {"--help", "analyze --help", "analyze sampling --help", "jod --help",
                           "optimize --help", "reconstruct --help"}) {
    const auto [code, out] = run(args);
    CHECK(code == 0);
    CHECK(out.find("Usage") != std::string::npos);
  }
}

TEST_CASE("unknown subcommand exits 1") {
  const auto [code, out] = run("frobnicate");
  CHECK(code == 1);
}

TEST_CASE("missing config file is a data error (exit 2)") {
  const auto [code, out] = run("analyze geometry --config /nonexistent/prototype.cfg");
  CHECK(code == 2);
  CHECK(out.find("error") != std::string::npos);
}

TEST_CASE("malformed votes are a data error (exit 2)") {
  TempDir tmp;
  const std::string votes = (tmp.path / "votes.csv").string();
  std::ofstream(votes) << "observer,option_i,option_j,chosen\no1,0,1,7\n";
  const auto [code, out] = run("jod scale --votes " + votes);
  CHECK(code == 2);
  CHECK(out.find("chosen") != std::string::npos);
}

TEST_CASE("jod pipeline runs end to end") {
  TempDir tmp;
  const std::string votes = (tmp.path / "votes.csv").string();
  std::ofstream out_file(votes);
  out_file << "observer,option_i,option_j,chosen\n";
  // Three observers, option 1 clearly preferred over 0.
  for (int o = 0; o < 3; ++o)
    for (int t = 0; t < 10; ++t)
      out_file << "obs" << o << ",0,1," << (t < 8 ? 1 : 0) << "\n";
  out_file.close();

  const auto [code, text] = run("jod scale --votes " + votes);
  CHECK(code == 0);
  CHECK(text.find("option 0") != std::string::npos);

  const auto [code2, text2] = run("jod test --votes " + votes + " -i 1 -j 0");
  CHECK(code2 == 0);
  CHECK(text2.find("z =") != std::string::npos);

  const auto [code3, text3] =
      run("jod bootstrap --votes " + votes + " --samples 20 --seed 3");
  CHECK(code3 == 0);
  CHECK(text3.find("[") != std::string::npos);
}

TEST_CASE("analyze luminance parses power lines") {
  const auto [code, out] =
      run("analyze luminance --power 1.0@555e-9 --area 1 --solid-angle 1");
  CHECK(code == 0);
  CHECK(out.find("683") != std::string::npos);
}

TEST_CASE("optimize / reconstruct / lf-extract pipeline") {
  TempDir tmp;
  // 3x3 light-field views: a flat background with a view-dependent blob.
  const fs::path lf = tmp.path / "lf";
  fs::create_directories(lf);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      holo::RealGrid view(64, 64, 0.3);
      for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
          const double d2 = (i - 32.0) * (i - 32.0) +
                            (j - 30.0 - 2.0 * (c - 1)) * (j - 30.0 - 2.0 * (c - 1));
          view(i, j) += 0.6 * std::exp(-d2 / 50.0);
        }
      char name[32];
      std::snprintf(name, sizeof(name), "view_%02d_%02d.pfm", r, c);
      holo::write_pfm((lf / name).string(), {view});
    }

  const std::string cfg = (tmp.path / "run.cfg").string();
  std::ofstream(cfg) << "[optical]\n"
                        "wavelengths = 532e-9\n"
                        "pixel_pitch = 8.2e-6\n"
                        "slm_resolution = 64, 64\n"
                        "eyepiece_focal_length = 40e-3\n"
                        "half_depth = 5.535e-3\n"
                        "wrp_distance = 7e-3\n"
                        "num_frames = 2\n"
                        "sideband = true\n"
                        "[supervision]\n"
                        "mode = 4d\n"
                        "lightfield_dir = "
                     << lf.string()
                     << "\nviews = 3, 3\n"
                        "stft_window = 16\n"
                        "stft_hop = 16\n"
                        "[optimizer]\n"
                        "iterations = 15\n"
                        "seed = 5\n"
                        "[output]\n"
                        "dir = "
                     << (tmp.path / "out").string() << "\n";

  const auto [code, out] = run("optimize " + cfg);
  CHECK(code == 0);
  CHECK(fs::exists(tmp.path / "out" / "hologram.hbin"));
  CHECK(fs::exists(tmp.path / "out" / "loss_trace.csv"));
  CHECK(fs::exists(tmp.path / "out" / "manifest.txt"));

  // Seed override changes the manifest echo.
  const auto [code_seed, out_seed] =
      run("optimize " + cfg + " --seed 9 --out " + (tmp.path / "out9").string());
  CHECK(code_seed == 0);
  std::ifstream manifest((tmp.path / "out9" / "manifest.txt").string());
  std::string manifest_text((std::istreambuf_iterator<char>(manifest)),
                            std::istreambuf_iterator<char>());
  CHECK(manifest_text.find("seed = 9") != std::string::npos);

  const std::string pupils = (tmp.path / "pupils.csv").string();
  std::ofstream(pupils) << "x,y,d,focal\n0,0,4.0,4.0\n0.25,0,0.5,4.0\n5.0,0,0.5,4.0\n";
  const std::string holog = (tmp.path / "out" / "hologram.hbin").string();
  const auto [code2, out2] = run("reconstruct " + holog + " --config " + cfg +
                                 " --pupil-csv " + pupils + " --out " +
                                 (tmp.path / "recon").string());
  CHECK(code2 == 0);
  CHECK(fs::exists(tmp.path / "recon" / "retina_000.pfm"));
  CHECK(fs::exists(tmp.path / "recon" / "retina_002.pfm"));
  CHECK(fs::exists(tmp.path / "recon" / "index.csv"));
  // The last pupil sits far outside the eyebox and is flagged vignetted.
  const auto index = holo::read_csv((tmp.path / "recon" / "index.csv").string());
  REQUIRE(index.size() == 4);
  CHECK(index[3][5] == "1");
  CHECK(index[1][5] == "0");

  const auto [code3, out3] = run("lf-extract " + holog + " --config " + cfg +
                                 " --view-cols 3 --view-rows 3 --out " +
                                 (tmp.path / "lfx").string());
  CHECK(code3 == 0);
  CHECK(fs::exists(tmp.path / "lfx" / "tiles_c0.csv"));
  CHECK(fs::exists(tmp.path / "lfx" / "view_c0_02_02.pfm"));

  // Truncated hologram is a data error.
  {
    std::ifstream in(holog, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() / 2);
    std::ofstream((tmp.path / "broken.hbin").string(), std::ios::binary) << bytes;
  }
  const auto [code4, out4] = run("reconstruct " + (tmp.path / "broken.hbin").string() +
                                 " --config " + cfg + " --pupil-csv " + pupils);
  CHECK(code4 == 2);
}

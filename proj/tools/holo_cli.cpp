// Command-line surface: optimization runs, pupil reconstructions, light-field
// extraction, geometry/sampling/parallax/luminance analyses, JOD statistics.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "holo/io.hpp"
#include "holo/metrics.hpp"
#include "holo/optimizer.hpp"
#include "holo/psychstats.hpp"
#include "holo/viewer.hpp"

namespace fs = std::filesystem;
using namespace holo;

namespace {

std::string default_output_dir() {
  if (const char* env = std::getenv("HOLO_OUT_DIR")) return env;
  return "holo_out";
}

std::string view_name(const char* prefix, int row, int col, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%02d_%02d.%s", prefix, row, col, ext);
  return buf;
}

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

RealGrid normalized_for_view(const RealGrid& g) {
  double peak = 0;
  for (double v : g) peak = std::max(peak, v);
  RealGrid out = g;
  if (peak > 0)
    for (auto& v : out) v /= peak;
  return out;
}

// ---------------------------------------------------------------- optimize

SupervisionSpec build_supervision(const RunConfig& run) {
  const OpticalConfig& cfg = run.optical;
  const DisplayGeometry geom = display_geometry(cfg);
  const double depth_max =
      run.depth_max_diopters >= 0 ? run.depth_max_diopters : geom.d_ncp;

  SupervisionSpec spec;
  spec.planes = plane_depths(cfg, run.planes);

  auto check_slm_shape = [&](const RealGrid& g, const std::string& what) {
    if (g.rows() != cfg.slm_rows || g.cols() != cfg.slm_cols)
      throw DataError(what + ": expected " + std::to_string(cfg.slm_cols) + "x" +
                      std::to_string(cfg.slm_rows) + " to match the SLM grid, got " +
                      std::to_string(g.cols()) + "x" + std::to_string(g.rows()));
  };

  if (run.mode == SupervisionMode::mode_2p5d) {
    RgbdTarget target =
        load_rgbd(run.rgb_path, run.depth_path, run.depth_min_diopters, depth_max);
    for (const auto& ch : target.amplitude) check_slm_shape(ch, "rgb target");
    if (target.amplitude.size() > cfg.wavelengths.size())
      throw DataError("2.5d: more image channels than configured wavelengths");
    Supervision2p5D sup;
    std::vector<double> plane_d;
    for (const auto& p : spec.planes) plane_d.push_back(p.diopters);
    sup.masks = closest_distance_masks(target.depth, plane_d);
    sup.amplitude = std::move(target.amplitude);
    spec.target = std::move(sup);
    return spec;
  }

  if (run.mode == SupervisionMode::mode_3d) {
    Supervision3D sup;
    if (run.focal_source == "rgbd") {
      RgbdTarget target =
          load_rgbd(run.rgb_path, run.depth_path, run.depth_min_diopters, depth_max);
      for (const auto& ch : target.amplitude) check_slm_shape(ch, "rgb target");
      if (target.amplitude.size() > cfg.wavelengths.size())
        throw DataError("3d: more image channels than configured wavelengths");
      sup.stack = focal_stack_from_rgbd(target, spec.planes, run.pupil_diameter, cfg);
    } else {
      LightField lf = load_lightfield(run.lightfield_dir);
      for (const auto& view : lf.views)
        for (const auto& ch : view) check_slm_shape(ch, "light-field view");
      const double half = 0.5 * geom.theta_diff[cfg.reference_channel()];
      assign_view_angles(lf, half, half, false);
      sup.stack = focal_stack_from_lf(lf, spec.planes, cfg);
    }
    spec.target = std::move(sup);
    return spec;
  }

  // 4D: views are compared at the STFT patch-grid resolution.
  LightField lf = load_lightfield(run.lightfield_dir);
  if (lf.view_rows != run.stft.view_rows || lf.view_cols != run.stft.view_cols)
    throw DataError("4d: light-field view grid does not match the configured views");
  StftPlan plan(cfg.slm_rows, cfg.slm_cols, cfg.pixel_pitch, cfg.pixel_pitch, run.stft,
                cfg.sideband);
  Supervision4D sup;
  sup.stft = run.stft;
  sup.lf.view_rows = lf.view_rows;
  sup.lf.view_cols = lf.view_cols;
  for (auto& view : lf.views) {
    std::vector<RealGrid> scaled;
    for (auto& ch : view) scaled.push_back(box_downsample(ch, plan.patch_rows(), plan.patch_cols()));
    sup.lf.views.push_back(std::move(scaled));
  }
  assign_view_angles(sup.lf, 0.5 * geom.theta_diff[cfg.reference_channel()],
                     0.5 * geom.theta_diff[cfg.reference_channel()], cfg.sideband);
  if (sup.lf.channels() > static_cast<int>(cfg.wavelengths.size()))
    throw DataError("4d: more light-field channels than configured wavelengths");
  spec.target = std::move(sup);
  return spec;
}

int cmd_optimize(const std::string& config_path, std::optional<uint64_t> seed,
                 std::optional<std::string> out_dir) {
  RunConfig run = RunConfig::load(config_path);
  if (seed) run.optimizer.seed = *seed;
  if (out_dir) run.output_dir = *out_dir;
  fs::create_directories(run.output_dir);

  const SupervisionSpec spec = build_supervision(run);
  std::cout << "optimizing: mode="
            << (run.mode == SupervisionMode::mode_2p5d ? "2.5d"
                : run.mode == SupervisionMode::mode_3d ? "3d"
                                                       : "4d")
            << " frames=" << run.optical.num_frames << " iterations="
            << run.optimizer.iterations << " seed=" << run.optimizer.seed << "\n";

  const OptimizeResult result = optimize(run.optical, spec, run.optimizer);

  const fs::path out(run.output_dir);
  write_manifest((out / "manifest.txt").string(), run);
  write_hologram((out / "hologram.hbin").string(),
                 binary_stack_from_optimization(result.binary_frames));
  std::vector<std::vector<std::string>> trace;
  {
    std::vector<std::string> header = {"iteration", "loss"};
    for (size_t c = 0; c < result.trace.front().scales.size(); ++c)
      header.push_back("s" + std::to_string(c));
    trace.push_back(header);
  }
  for (const auto& row : result.trace) {
    std::vector<std::string> out_row = {std::to_string(row.iteration), fmt(row.loss, 12)};
    for (double s : row.scales) out_row.push_back(fmt(s, 12));
    trace.push_back(out_row);
  }
  write_csv((out / "loss_trace.csv").string(), trace);

  std::cout << "initial loss = " << fmt(result.initial_loss) << "\n";
  std::cout << "final loss   = " << fmt(result.final_loss) << "\n";
  std::cout << "wrote " << (out / "hologram.hbin").string() << "\n";
  return 0;
}

// ------------------------------------------------------------- reconstruct

int cmd_reconstruct(const std::string& hologram_path, const std::string& config_path,
                    const std::string& pupil_csv, std::optional<std::string> out_dir) {
  const RunConfig run = RunConfig::load(config_path);
  const BinaryStack stack = read_hologram(hologram_path);
  const std::vector<FieldStack> fields = stack.to_field_stacks(run.optical);

  const fs::path out(out_dir ? *out_dir : default_output_dir());
  fs::create_directories(out);

  std::vector<std::vector<std::string>> index = {
      {"row", "x_norm", "y_norm", "diameter_norm", "focal_diopters", "vignetted", "file"}};
  const auto rows = read_csv(pupil_csv);
  int rendered = 0;
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 4) throw DataError("pupil csv: need x, y, diameter, focal per row");
    PupilState state;
    try {
      state.center_x_norm = std::stod(row[0]);
      state.center_y_norm = std::stod(row[1]);
      state.diameter_norm = std::stod(row[2]);
      state.focal_diopters = std::stod(row[3]);
    } catch (const std::exception&) {
      if (r == 0) continue;  // header line
      throw DataError("pupil csv: malformed row " + std::to_string(r + 1));
    }
    if (row.size() > 4 && row[4] == "sce") state.apodization = Apodization::stiles_crawford;

    const RetinalImage image = retinal_image(fields, run.optical, state);
    char name[48];
    std::snprintf(name, sizeof(name), "retina_%03d", rendered);
    const std::string pfm = (out / (std::string(name) + ".pfm")).string();
    if (image.intensity.size() == 3)
      write_pfm(pfm, image.intensity);
    else
      write_pfm(pfm, {image.intensity[0]});
    write_png8((out / (std::string(name) + ".png")).string(),
               image.intensity.size() == 3
                   ? std::vector<RealGrid>{normalized_for_view(image.intensity[0]),
                                           normalized_for_view(image.intensity[1]),
                                           normalized_for_view(image.intensity[2])}
                   : std::vector<RealGrid>{normalized_for_view(image.intensity[0])});
    index.push_back({std::to_string(rendered), row[0], row[1], row[2], row[3],
                     image.vignetted ? "1" : "0", pfm});
    ++rendered;
  }
  if (rendered == 0) throw DataError("pupil csv: no pupil states found");
  write_csv((out / "index.csv").string(), index);
  write_manifest((out / "manifest.txt").string(), run,
                 {{"command", "reconstruct"},
                  {"hologram", hologram_path},
                  {"pupil_csv", pupil_csv}});
  std::cout << "rendered " << rendered << " pupil states into " << out.string() << "\n";
  return 0;
}

// -------------------------------------------------------------- lf-extract

int cmd_lf_extract(const std::string& hologram_path, const std::string& config_path,
                   int view_cols, int view_rows, int window, int hop,
                   std::optional<std::string> out_dir) {
  const RunConfig run = RunConfig::load(config_path);
  const BinaryStack stack = read_hologram(hologram_path);
  const std::vector<FieldStack> fields = stack.to_field_stacks(run.optical);

  StftSpec spec;
  spec.view_cols = view_cols;
  spec.view_rows = view_rows;
  spec.window = window;
  spec.hop = hop;

  const fs::path out(out_dir ? *out_dir : default_output_dir());
  fs::create_directories(out);

  const PropOptions prop{run.optical.sideband, true};
  for (size_t ch = 0; ch < fields.size(); ++ch) {
    // Time-averaged per-view intensity of the observable light field.
    std::vector<RealGrid> views;
    std::vector<double> energies(static_cast<size_t>(view_rows) * view_cols, 0.0);
    for (const auto& frame : fields[ch].frames) {
      const ComplexField wrp = propagate_asm(frame, run.optical.wrp_distance, prop);
      const StftLightField lf = stft_light_field(wrp, spec, run.optical.sideband);
      if (views.empty())
        views.assign(lf.views.views.size(),
                     RealGrid(lf.views.views.front().front().rows(),
                              lf.views.views.front().front().cols(), 0.0));
      for (size_t v = 0; v < views.size(); ++v) {
        for (size_t i = 0; i < views[v].size(); ++i)
          views[v][i] += lf.views.views[v][0][i] / fields[ch].count();
        energies[v] += lf.view_energy[v] / fields[ch].count();
      }
    }
    std::vector<std::vector<std::string>> tiles = {{"view_row", "view_col", "mean_energy"}};
    for (int vr = 0; vr < view_rows; ++vr)
      for (int vc = 0; vc < view_cols; ++vc) {
        const size_t v = static_cast<size_t>(vr) * view_cols + vc;
        char prefix[32];
        std::snprintf(prefix, sizeof(prefix), "view_c%zu", ch);
        write_pfm((out / view_name(prefix, vr, vc, "pfm")).string(), {views[v]});
        tiles.push_back({std::to_string(vr), std::to_string(vc), fmt(energies[v], 12)});
      }
    write_csv((out / ("tiles_c" + std::to_string(ch) + ".csv")).string(), tiles);
  }
  write_manifest((out / "manifest.txt").string(), run,
                 {{"command", "lf-extract"},
                  {"hologram", hologram_path},
                  {"views", std::to_string(view_cols) + "x" + std::to_string(view_rows)},
                  {"window", std::to_string(window)},
                  {"hop", std::to_string(hop)}});
  std::cout << "extracted " << view_cols << "x" << view_rows << " views into " << out.string()
            << "\n";
  return 0;
}

// ----------------------------------------------------------------- analyze

int cmd_geometry(const std::string& config_path) {
  const RunConfig run = RunConfig::load(config_path);
  const DisplayGeometry g = display_geometry(run.optical);
  for (size_t c = 0; c < g.theta_diff.size(); ++c)
    std::cout << "theta_diff[" << c << "] = " << fmt(g.theta_diff[c]) << " rad ("
              << fmt(run.optical.wavelengths[c] * 1e9, 4) << " nm)\n";
  std::cout << "eyebox = " << fmt(g.eyebox_width * 1e3, 4) << " mm x "
            << fmt(g.eyebox_height * 1e3, 4) << " mm\n";
  std::cout << "fov = " << fmt(g.fov_h_deg, 4) << " deg x " << fmt(g.fov_v_deg, 4) << " deg\n";
  std::cout << "max_cpd = " << fmt(g.max_cpd, 4) << "\n";
  std::cout << "d_ncp = " << fmt(g.d_ncp, 4) << " D\n";
  return 0;
}

int cmd_sampling(double cpd, double depth_range, double f, double lambda,
                 std::optional<std::string> grid_csv, std::optional<std::string> config_path) {
  SamplingQuery query;
  query.resolution_cpd = cpd;
  query.depth_range = depth_range;
  query.focal_length = f;
  query.wavelength = lambda;
  if (config_path) {
    const RunConfig run = RunConfig::load(*config_path);
    query.focal_length = run.optical.eyepiece_focal_length;
    query.cutoff_cpd = display_geometry(run.optical).max_cpd;
  }
  const RequiredViews v = required_views(query);
  std::cout << "bandwidth = " << fmt(v.bandwidth) << " cycles/m\n";
  std::cout << "z_o = " << fmt(half_depth_for_range(depth_range, query.focal_length) * 1e3, 6)
            << " mm\n";
  std::cout << "required horizontal views = " << v.views << " (raw " << fmt(v.raw, 4) << ")\n";

  if (grid_csv) {
    std::vector<std::vector<std::string>> rows = {
        {"cpd", "focal_length_mm", "depth_range_d", "views_raw", "views"}};
    for (double bw_cpd : {10.0, 20.0, 30.0})
      for (double fl : {25e-3, 40e-3, 50e-3}) {
        const double cutoff = fl / (2.0 * 8.2e-6) * 3.14159265358979 / 180.0;
        if (bw_cpd > cutoff) continue;  // below the display cutoff only
        for (double d = 0.25; d <= 8.0 + 1e-9; d += 0.25) {
          SamplingQuery q;
          q.resolution_cpd = bw_cpd;
          q.depth_range = d;
          q.focal_length = fl;
          q.wavelength = lambda;
          const RequiredViews rv = required_views(q);
          rows.push_back({fmt(bw_cpd, 4), fmt(fl * 1e3, 4), fmt(d, 4), fmt(rv.raw, 8),
                          std::to_string(rv.views)});
        }
      }
    write_csv(*grid_csv, rows);
    std::cout << "wrote " << *grid_csv << "\n";
  }
  return 0;
}

int cmd_parallax(double max_ecc, std::optional<std::string> out_csv, double pupil_shift_mm) {
  const ParallaxModel model;
  std::vector<std::vector<std::string>> rows = {
      {"eccentricity_deg", "mar_deg", "threshold_diopters", "threshold_deg"}};
  std::cout << "eccentricity  MAR(deg)   threshold(D)  threshold(deg @ " << fmt(pupil_shift_mm)
            << " mm shift)\n";
  for (double e = 0; e <= max_ecc + 1e-9; e += 2.5) {
    const double th_deg = model.threshold_angle_deg(e, pupil_shift_mm * 1e-3);
    rows.push_back({fmt(e, 4), fmt(model.mar(e), 6), fmt(model.threshold_diopters(e), 6),
                    fmt(th_deg, 6)});
    std::printf("%8.1f  %9.4f  %12.4f  %12.5f\n", e, model.mar(e), model.threshold_diopters(e),
                th_deg);
  }
  if (out_csv) {
    write_csv(*out_csv, rows);
    std::cout << "wrote " << *out_csv << "\n";
  }
  return 0;
}

int cmd_luminance(const std::vector<std::string>& lines, double area, double solid_angle) {
  LuminanceInput input;
  input.area = area;
  input.solid_angle = solid_angle;
  for (const std::string& spec : lines) {
    const size_t at = spec.find('@');
    if (at == std::string::npos)
      throw DataError("luminance: power line must look like WATTS@WAVELENGTH, got " + spec);
    input.power.push_back(std::stod(spec.substr(0, at)));
    input.wavelengths.push_back(std::stod(spec.substr(at + 1)));
  }
  std::cout << "luminance = " << fmt(luminance(input), 6) << " nits\n";
  return 0;
}

// --------------------------------------------------------------------- jod

std::vector<VoteMatrix> load_votes(const std::string& path) {
  const auto rows = read_csv(path);
  std::map<std::string, std::vector<std::array<int, 3>>> by_observer;
  int n = 0;
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 4) throw DataError("votes csv: need observer, option_i, option_j, chosen");
    int i, j, chosen;
    try {
      i = std::stoi(row[1]);
      j = std::stoi(row[2]);
      chosen = std::stoi(row[3]);
    } catch (const std::exception&) {
      if (r == 0) continue;  // header
      throw DataError("votes csv: malformed row " + std::to_string(r + 1));
    }
    if (i == j || i < 0 || j < 0) throw DataError("votes csv: bad option pair");
    if (chosen != i && chosen != j)
      throw DataError("votes csv: chosen option must be one of the pair");
    by_observer[row[0]].push_back({i, j, chosen});
    n = std::max({n, i + 1, j + 1});
  }
  if (by_observer.empty()) throw DataError("votes csv: no votes found");
  std::vector<VoteMatrix> observers;
  for (const auto& [name, votes] : by_observer) {
    VoteMatrix m(n);
    for (const auto& [i, j, chosen] : votes) {
      if (chosen == j)
        m.at(i, j) += 1;  // j preferred over i
      else
        m.at(j, i) += 1;
    }
    observers.push_back(std::move(m));
  }
  return observers;
}

VoteMatrix pool_votes(const std::vector<VoteMatrix>& observers) {
  VoteMatrix total;
  for (const auto& o : observers) total += o;
  return total;
}

int cmd_jod_scale(const std::string& votes_path, std::optional<std::string> out_dir) {
  const auto observers = load_votes(votes_path);
  const JodResult result = scale_jod(pool_votes(observers));
  std::cout << "jod scores (mean 0):\n";
  for (int i = 0; i < result.n(); ++i)
    std::cout << "  option " << i << ": " << fmt(result.scores[i], 6) << "\n";
  if (out_dir) {
    fs::create_directories(*out_dir);
    std::vector<std::vector<std::string>> scores = {{"option", "jod"}};
    for (int i = 0; i < result.n(); ++i)
      scores.push_back({std::to_string(i), fmt(result.scores[i], 12)});
    write_csv((fs::path(*out_dir) / "scores.csv").string(), scores);
    std::vector<std::vector<std::string>> cov;
    for (int i = 0; i < result.n(); ++i) {
      std::vector<std::string> row;
      for (int j = 0; j < result.n(); ++j) row.push_back(fmt(result.cov(i, j), 12));
      cov.push_back(row);
    }
    write_csv((fs::path(*out_dir) / "covariance.csv").string(), cov);
    std::ofstream manifest((fs::path(*out_dir) / "manifest.txt").string());
    manifest << "[invocation]\ncommand = jod scale\nvotes = " << votes_path << "\n";
    std::cout << "wrote scores.csv and covariance.csv to " << *out_dir << "\n";
  }
  return 0;
}

int cmd_jod_test(const std::string& votes_path, int i, int j) {
  const auto observers = load_votes(votes_path);
  const JodResult result = scale_jod(pool_votes(observers));
  const auto [z, p] = jod_ztest(result, i, j);
  std::cout << "q[" << i << "] - q[" << j << "] = "
            << fmt(result.scores[i] - result.scores[j], 6) << " JOD\n";
  std::cout << "z = " << fmt(z, 6) << ", two-tailed p = " << fmt(p, 6) << "\n";
  return 0;
}

int cmd_jod_bootstrap(const std::string& votes_path, int samples, uint64_t seed,
                      std::optional<std::string> out_csv) {
  const auto observers = load_votes(votes_path);
  const JodResult result = bootstrap_ci(observers, samples, seed);
  std::vector<std::vector<std::string>> rows = {{"option", "jod", "ci_low", "ci_high"}};
  for (int i = 0; i < result.n(); ++i) {
    rows.push_back({std::to_string(i), fmt(result.scores[i], 12), fmt(result.ci[i].first, 12),
                    fmt(result.ci[i].second, 12)});
    std::cout << "option " << i << ": " << fmt(result.scores[i], 6) << " JOD ["
              << fmt(result.ci[i].first, 6) << ", " << fmt(result.ci[i].second, 6) << "]\n";
  }
  if (out_csv) {
    write_csv(*out_csv, rows);
    std::ofstream manifest(*out_csv + ".manifest.txt");
    manifest << "[invocation]\ncommand = jod bootstrap\nvotes = " << votes_path
             << "\nsamples = " << samples << "\nseed = " << seed << "\n";
    std::cout << "wrote " << *out_csv << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-multiplexed binary-amplitude CGH engine"};
  app.require_subcommand(1);

  // optimize
  auto* opt = app.add_subcommand("optimize", "Run CGH optimization from a config file");
  std::string opt_config;
  std::optional<uint64_t> opt_seed;
  std::optional<std::string> opt_out;
  opt->add_option("config", opt_config, "run configuration file")->required();
  opt->add_option("--seed", opt_seed, "override the config seed");
  opt->add_option("--out", opt_out, "override the output directory");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Render retinal images for pupil states");
  std::string rec_holo, rec_config, rec_pupils;
  std::optional<std::string> rec_out;
  rec->add_option("hologram", rec_holo, "hologram file")->required();
  rec->add_option("--config", rec_config, "run configuration file")->required();
  rec->add_option("--pupil-csv", rec_pupils,
                  "CSV of x_norm, y_norm, diameter_norm, focal_diopters rows")
      ->required();
  rec->add_option("--out", rec_out, "output directory");

  // lf-extract
  auto* lfx = app.add_subcommand("lf-extract", "Extract the observable light field");
  std::string lfx_holo, lfx_config;
  std::optional<std::string> lfx_out;
  int lfx_cols = 3, lfx_rows = 3, lfx_window = 16, lfx_hop = 16;
  lfx->add_option("hologram", lfx_holo, "hologram file")->required();
  lfx->add_option("--config", lfx_config, "run configuration file")->required();
  lfx->add_option("--view-cols", lfx_cols, "horizontal views");
  lfx->add_option("--view-rows", lfx_rows, "vertical views");
  lfx->add_option("--window", lfx_window, "STFT window");
  lfx->add_option("--hop", lfx_hop, "STFT hop");
  lfx->add_option("--out", lfx_out, "output directory");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Display geometry and perception analyses");
  analyze->require_subcommand(1);

  auto* geo = analyze->add_subcommand("geometry", "Eyebox, FoV, resolution, depth range");
  std::string geo_config;
  geo->add_option("--config", geo_config, "run configuration file")->required();

  auto* smp = analyze->add_subcommand("sampling", "Required light-field views");
  double smp_cpd = 30.0, smp_depth = 3.0, smp_f = 40e-3, smp_lambda = 532e-9;
  std::optional<std::string> smp_grid, smp_config;
  smp->add_option("--cpd", smp_cpd, "target resolution, cycles/deg");
  smp->add_option("--depth-range", smp_depth, "depth range, diopters");
  smp->add_option("--f", smp_f, "eyepiece focal length, m");
  smp->add_option("--lambda", smp_lambda, "wavelength, m");
  smp->add_option("--grid", smp_grid, "write the views-vs-depth table to this CSV");
  smp->add_option("--config", smp_config, "take focal length and cutoff from a config");

  auto* par = analyze->add_subcommand("parallax", "MAR and parallax-threshold models");
  double par_max = 40.0, par_shift = 1.1;
  std::optional<std::string> par_out;
  par->add_option("--max-ecc", par_max, "maximum eccentricity, deg");
  par->add_option("--pupil-shift-mm", par_shift, "pupil shift for the angle conversion");
  par->add_option("--out", par_out, "write the table to this CSV");

  auto* lum = analyze->add_subcommand("luminance", "Power lines to nits");
  std::vector<std::string> lum_lines;
  double lum_area = 1.0, lum_omega = 1.0;
  lum->add_option("--power", lum_lines, "repeated WATTS@WAVELENGTH_M lines")->required();
  lum->add_option("--area", lum_area, "display area S, m^2")->required();
  lum->add_option("--solid-angle", lum_omega, "solid angle, sr")->required();

  // jod
  auto* jod = app.add_subcommand("jod", "Pairwise-comparison statistics");
  jod->require_subcommand(1);

  auto* jscale = jod->add_subcommand("scale", "Scale vote counts to JOD scores");
  std::string jscale_votes;
  std::optional<std::string> jscale_out;
  jscale->add_option("--votes", jscale_votes, "CSV of observer, option_i, option_j, chosen")
      ->required();
  jscale->add_option("--out", jscale_out, "directory for scores.csv and covariance.csv");

  auto* jtest = jod->add_subcommand("test", "Two-tailed z-test between two options");
  std::string jtest_votes;
  int jtest_i = 0, jtest_j = 1;
  jtest->add_option("--votes", jtest_votes, "votes CSV")->required();
  jtest->add_option("-i", jtest_i, "first option")->required();
  jtest->add_option("-j", jtest_j, "second option")->required();

  auto* jboot = jod->add_subcommand("bootstrap", "Bootstrap confidence intervals");
  std::string jboot_votes;
  int jboot_samples = 500;
  uint64_t jboot_seed = 1;
  std::optional<std::string> jboot_out;
  jboot->add_option("--votes", jboot_votes, "votes CSV")->required();
  jboot->add_option("--samples", jboot_samples, "number of resamples");
  jboot->add_option("--seed", jboot_seed, "bootstrap seed");
  jboot->add_option("--out", jboot_out, "write the interval table to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // Usage problems print the relevant help on the diagnostic stream.
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (*opt) return cmd_optimize(opt_config, opt_seed, opt_out);
    if (*rec) return cmd_reconstruct(rec_holo, rec_config, rec_pupils, rec_out);
    if (*lfx)
      return cmd_lf_extract(lfx_holo, lfx_config, lfx_cols, lfx_rows, lfx_window, lfx_hop,
                            lfx_out);
    if (*geo) return cmd_geometry(geo_config);
    if (*smp) return cmd_sampling(smp_cpd, smp_depth, smp_f, smp_lambda, smp_grid, smp_config);
    if (*par) return cmd_parallax(par_max, par_out, par_shift);
    if (*lum) return cmd_luminance(lum_lines, lum_area, lum_omega);
    if (*jscale) return cmd_jod_scale(jscale_votes, jscale_out);
    if (*jtest) return cmd_jod_test(jtest_votes, jtest_i, jtest_j);
    if (*jboot) return cmd_jod_bootstrap(jboot_votes, jboot_samples, jboot_seed, jboot_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

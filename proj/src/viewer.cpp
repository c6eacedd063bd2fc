#include "holo/viewer.hpp"

#include <cmath>

#include "holo/fft.hpp"

namespace holo {

namespace {
constexpr double kTwoPi = 2.0 * 3.141592653589793238462643383279502884;
}

void PupilState::validate() const {
  if (!(diameter_norm > 0)) throw DomainError("pupil: diameter must be positive");
  for (double p : sce_coefficient)
    if (p < 0) throw DomainError("pupil: SCE coefficient must be >= 0");
}

EyeboxGeometry eyebox_geometry(const OpticalConfig& cfg) {
  const DisplayGeometry g = display_geometry(cfg);
  EyeboxGeometry box;
  box.width = g.eyebox_width;
  box.height = g.eyebox_height;
  box.center_x = 0;
  box.center_y = cfg.sideband ? 0.5 * g.eyebox_height : 0.0;
  return box;
}

RealGrid pupil_aperture(const PupilState& state, const PupilGrid& grid,
                        const EyeboxGeometry& eyebox, int channel) {
  state.validate();
  const double xc = eyebox.center_x + state.center_x_norm * eyebox.width;
  const double yc = eyebox.center_y + state.center_y_norm * eyebox.width;
  const double radius = 0.5 * state.diameter_norm * eyebox.width;
  const double p = state.apodization == Apodization::stiles_crawford ? state.sce(channel) : 0.0;

  RealGrid a(grid.rows, grid.cols, 0.0);
  for (int r = 0; r < grid.rows; ++r) {
    const double dy = grid.y(r) - yc;
    for (int c = 0; c < grid.cols; ++c) {
      const double dx = grid.x(c) - xc;
      const double r2 = dx * dx + dy * dy;
      if (r2 > radius * radius) continue;
      a(r, c) = std::pow(10.0, -p * r2);
    }
  }
  return a;
}

double pupil_eyebox_overlap(const PupilState& state, const EyeboxGeometry& eyebox) {
  const double xc = eyebox.center_x + state.center_x_norm * eyebox.width;
  const double yc = eyebox.center_y + state.center_y_norm * eyebox.width;
  const double radius = 0.5 * state.diameter_norm * eyebox.width;
  const int n = 256;
  int inside_disk = 0, inside_both = 0;
  for (int i = 0; i < n; ++i) {
    const double y = yc + radius * (2.0 * (i + 0.5) / n - 1.0);
    for (int j = 0; j < n; ++j) {
      const double x = xc + radius * (2.0 * (j + 0.5) / n - 1.0);
      if ((x - xc) * (x - xc) + (y - yc) * (y - yc) > radius * radius) continue;
      ++inside_disk;
      if (std::abs(x - eyebox.center_x) <= 0.5 * eyebox.width &&
          std::abs(y - eyebox.center_y) <= 0.5 * eyebox.height)
        ++inside_both;
    }
  }
  return inside_disk == 0 ? 0.0 : static_cast<double>(inside_both) / inside_disk;
}

RetinalImage retinal_image(const std::vector<FieldStack>& channel_stacks,
                           const OpticalConfig& cfg, const PupilState& state) {
  cfg.validate();
  state.validate();
  if (channel_stacks.empty()) throw DomainError("retinal_image: no channels");

  RetinalImage out;
  out.focal_diopters = state.focal_diopters;
  out.pupil = state;

  const EyeboxGeometry eyebox = eyebox_geometry(cfg);
  out.vignetted = pupil_eyebox_overlap(state, eyebox) < 0.01;

  const PropOptions prop{cfg.sideband, true};
  const double f = cfg.eyepiece_focal_length;
  const double dz = diopter_to_z(cfg, state.focal_diopters) - cfg.wrp_distance;

  for (size_t c = 0; c < channel_stacks.size(); ++c) {
    const FieldStack& stack = channel_stacks[c];
    stack.validate();
    const int rows = stack.frames.front().grid.rows();
    const int cols = stack.frames.front().grid.cols();
    if (out.vignetted) {
      out.intensity.emplace_back(rows, cols, 0.0);
      continue;
    }
    // 2x zero-padding through the pupil plane keeps the focal-state hop free
    // of circular wraparound; the retina crops back to the SLM grid.
    const int prows = 2 * rows, pcols = 2 * cols;
    const double lambda = stack.frames.front().wavelength;
    PupilGrid grid{prows, pcols, lambda * f / (pcols * stack.frames.front().pitch_x),
                   lambda * f / (prows * stack.frames.front().pitch_y)};
    const RealGrid aperture = pupil_aperture(state, grid, eyebox, static_cast<int>(c));

    // Defocus for the accommodation state: the ASM phase for the metric
    // offset of the focal plane from the WRP, expressed in pupil coordinates
    // (x_p/f is exactly lambda * f_x).
    ComplexGrid defocus(prows, pcols);
    for (int r = 0; r < prows; ++r) {
      const double sy = grid.y(r) / f;
      for (int cc = 0; cc < pcols; ++cc) {
        const double sx = grid.x(cc) / f;
        const double s = 1.0 - sx * sx - sy * sy;
        const double phase = s > 0 ? kTwoPi / lambda * dz * std::sqrt(s) : 0.0;
        defocus(r, cc) = s > 0 ? cplx(std::cos(phase), std::sin(phase)) : cplx(0, 0);
      }
    }

    RealGrid image(rows, cols, 0.0);
    const int T = stack.count();
    for (const ComplexField& frame : stack.frames) {
      ComplexField wrp = propagate_asm(frame, cfg.wrp_distance, prop);
      ComplexGrid padded(prows, pcols);
      for (int r = 0; r < rows; ++r)
        for (int cc = 0; cc < cols; ++cc)
          padded(r + rows / 2, cc + cols / 2) = wrp.grid(r, cc);
      ComplexField pupil = to_pupil_plane(
          ComplexField(std::move(padded), wrp.pitch_x, wrp.pitch_y, lambda), f);
      for (int r = 0; r < prows; ++r)
        for (int cc = 0; cc < pcols; ++cc) pupil.grid(r, cc) *= aperture(r, cc) * defocus(r, cc);
      ComplexGrid retina = fft::ifftshift(pupil.grid);
      fft::inverse(retina);
      for (int r = 0; r < rows; ++r)
        for (int cc = 0; cc < cols; ++cc)
          image(r, cc) += std::norm(retina(r + rows / 2, cc + cols / 2)) / T;
    }
    out.intensity.push_back(std::move(image));
  }
  return out;
}

RealGrid eyebox_energy_tiles(const FieldStack& stack, const OpticalConfig& cfg,
                             const StftSpec& spec) {
  stack.validate();
  const PropOptions prop{cfg.sideband, true};
  RealGrid tiles(spec.view_rows, spec.view_cols, 0.0);
  for (const ComplexField& frame : stack.frames) {
    ComplexField wrp = propagate_asm(frame, cfg.wrp_distance, prop);
    StftLightField lf = stft_light_field(wrp, spec, cfg.sideband);
    for (int vr = 0; vr < spec.view_rows; ++vr)
      for (int vc = 0; vc < spec.view_cols; ++vc) {
        const RealGrid& view = lf.views.view(vr, vc);
        tiles(vr, vc) += grid_sum(view) / (view.size() * stack.count());
      }
  }
  double peak = 0;
  for (double v : tiles) peak = std::max(peak, v);
  if (peak > 0)
    for (auto& v : tiles) v /= peak;
  return tiles;
}

}  // namespace holo

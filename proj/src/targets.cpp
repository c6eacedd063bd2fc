#include "holo/targets.hpp"

#include <algorithm>
#include <cmath>

#include "holo/fft.hpp"

namespace holo {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void RgbdTarget::validate() const {
  if (amplitude.empty()) throw DomainError("rgbd target: no channels");
  for (const auto& ch : amplitude)
    if (!ch.same_shape(depth)) throw DomainError("rgbd target: amplitude/depth shape mismatch");
}

void MaskSet::validate() const {
  if (masks.empty()) throw DomainError("mask set: empty");
  if (masks.size() != plane_diopters.size())
    throw DomainError("mask set: mask/plane count mismatch");
  for (const auto& m : masks)
    if (!m.same_shape(masks.front())) throw DomainError("mask set: shape mismatch");
  for (size_t i = 0; i < masks.front().size(); ++i) {
    double sum = 0;
    for (const auto& m : masks) {
      if (m[i] != 0.0 && m[i] != 1.0) throw DomainError("mask set: non-binary mask value");
      sum += m[i];
    }
    if (sum != 1.0) throw DomainError("mask set: masks do not partition the image");
  }
}

void LightField::validate() const {
  if (view_rows < 1 || view_cols < 1 || views.size() != static_cast<size_t>(view_count()))
    throw DomainError("light field: view grid mismatch");
  if (static_cast<int>(angle_x.size()) != view_cols ||
      static_cast<int>(angle_y.size()) != view_rows)
    throw DomainError("light field: angle table size mismatch");
  for (size_t i = 1; i < angle_x.size(); ++i)
    if (angle_x[i] <= angle_x[i - 1]) throw DomainError("light field: angle_x not increasing");
  for (size_t i = 1; i < angle_y.size(); ++i)
    if (angle_y[i] <= angle_y[i - 1]) throw DomainError("light field: angle_y not increasing");
  const int ch = channels();
  for (const auto& v : views) {
    if (static_cast<int>(v.size()) != ch) throw DomainError("light field: channel mismatch");
    for (const auto& img : v)
      if (!img.same_shape(views.front().front()))
        throw DomainError("light field: view shape mismatch");
  }
}

void assign_view_angles(LightField& lf, double half_x, double half_y, bool vertical_upper_only) {
  lf.angle_x.resize(lf.view_cols);
  lf.angle_y.resize(lf.view_rows);
  for (int i = 0; i < lf.view_cols; ++i)
    lf.angle_x[i] = -half_x + (i + 0.5) * 2.0 * half_x / lf.view_cols;
  for (int j = 0; j < lf.view_rows; ++j) {
    if (vertical_upper_only)
      lf.angle_y[j] = (j + 0.5) * half_y / lf.view_rows;
    else
      lf.angle_y[j] = -half_y + (j + 0.5) * 2.0 * half_y / lf.view_rows;
  }
}

void FocalStack::validate() const {
  if (slices.size() != depths_diopters.size())
    throw DomainError("focal stack: slice/depth count mismatch");
  for (const auto& s : slices)
    for (const auto& img : s)
      for (double v : img)
        if (v < 0) throw DomainError("focal stack: negative value");
}

MaskSet closest_distance_masks(const RealGrid& depth, const std::vector<double>& planes) {
  if (planes.empty()) throw DomainError("closest_distance_masks: no planes");
  if (!std::is_sorted(planes.begin(), planes.end()))
    throw DomainError("closest_distance_masks: planes must be sorted ascending");
  MaskSet set;
  set.plane_diopters = planes;
  set.masks.assign(planes.size(), RealGrid(depth.rows(), depth.cols(), 0.0));
  for (int r = 0; r < depth.rows(); ++r) {
    for (int c = 0; c < depth.cols(); ++c) {
      int best = 0;
      double best_dist = std::abs(planes[0] - depth(r, c));
      for (size_t k = 1; k < planes.size(); ++k) {
        const double d = std::abs(planes[k] - depth(r, c));
        if (d < best_dist) {  // strict: ties keep the smaller index
          best_dist = d;
          best = static_cast<int>(k);
        }
      }
      set.masks[best](r, c) = 1.0;
    }
  }
  return set;
}

namespace {

// Normalized disk kernel with antialiased (pixel-coverage) edge.
RealGrid disk_kernel(double radius_px) {
  const int half = std::max(0, static_cast<int>(std::ceil(radius_px + 0.5)));
  const int n = 2 * half + 1;
  RealGrid k(n, n, 0.0);
  double sum = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double dist = std::hypot(r - half, c - half);
      const double w = std::clamp(radius_px - dist + 0.5, 0.0, 1.0);
      k(r, c) = w;
      sum += w;
    }
  for (auto& v : k) v /= sum;
  return k;
}

// Linear (zero-padded) convolution with a centered odd-sized kernel.
RealGrid convolve_same(const RealGrid& img, const RealGrid& kernel) {
  if (kernel.rows() == 1 && kernel.cols() == 1) {
    RealGrid out = img;
    for (auto& v : out) v *= kernel(0, 0);
    return out;
  }
  const int pr = img.rows() + kernel.rows() - 1;
  const int pc = img.cols() + kernel.cols() - 1;
  ComplexGrid a(pr, pc), b(pr, pc);
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c) a(r, c) = img(r, c);
  for (int r = 0; r < kernel.rows(); ++r)
    for (int c = 0; c < kernel.cols(); ++c) b(r, c) = kernel(r, c);
  fft::forward(a);
  fft::forward(b);
  const double scale = std::sqrt(static_cast<double>(a.size()));
  for (size_t i = 0; i < a.size(); ++i) a[i] *= b[i] * scale;
  fft::inverse(a);
  // Centered crop; the kernel center sits at (rows/2, cols/2).
  RealGrid out(img.rows(), img.cols());
  const int r0 = kernel.rows() / 2, c0 = kernel.cols() / 2;
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c) out(r, c) = a(r + r0, c + c0).real();
  return out;
}

bool all_zero(const RealGrid& g) {
  for (double v : g)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

FocalStack focal_stack_from_rgbd(const RgbdTarget& target, const std::vector<PlaneDepth>& planes,
                                 double pupil_diameter, const OpticalConfig& cfg) {
  target.validate();
  if (!(pupil_diameter > 0))
    throw DomainError("focal_stack_from_rgbd: pupil diameter must be positive");
  std::vector<double> diopters;
  for (const auto& p : planes) diopters.push_back(p.diopters);
  const MaskSet masks = closest_distance_masks(target.depth, diopters);

  const int channels = static_cast<int>(target.amplitude.size());
  const double px_per_rad = cfg.eyepiece_focal_length / cfg.pixel_pitch;

  FocalStack fs;
  fs.source = FocalStackSource::rgbd;
  fs.depths_diopters = diopters;
  fs.slices.resize(planes.size());
  for (size_t i = 0; i < planes.size(); ++i) {
    std::vector<RealGrid> slice(channels, RealGrid(target.depth.rows(), target.depth.cols(), 0.0));
    // Composite layers far (0 D) to near so closer content occludes.
    for (size_t k = 0; k < planes.size(); ++k) {
      if (all_zero(masks.masks[k])) continue;
      const double radius =
          0.5 * pupil_diameter * std::abs(diopters[i] - diopters[k]) * px_per_rad;
      RealGrid kernel = radius < 1e-6 ? RealGrid(1, 1, 1.0) : disk_kernel(radius);
      RealGrid matte = convolve_same(masks.masks[k], kernel);
      for (int ch = 0; ch < channels; ++ch) {
        RealGrid layer(target.depth.rows(), target.depth.cols());
        for (size_t px = 0; px < layer.size(); ++px)
          layer[px] = masks.masks[k][px] * target.amplitude[ch][px];
        RealGrid blurred = convolve_same(layer, kernel);
        for (size_t px = 0; px < layer.size(); ++px)
          slice[ch][px] = blurred[px] + (1.0 - matte[px]) * slice[ch][px];
      }
    }
    for (auto& ch : slice)
      for (auto& v : ch) v = std::max(v, 0.0);
    fs.slices[i] = std::move(slice);
  }
  return fs;
}

FocalStack focal_stack_from_lf(const LightField& lf, const std::vector<PlaneDepth>& planes,
                               const OpticalConfig& cfg) {
  lf.validate();
  const int channels = lf.channels();
  const double w = 1.0 / lf.view_count();

  FocalStack fs;
  fs.source = FocalStackSource::lightfield;
  fs.slices.resize(planes.size());
  for (size_t i = 0; i < planes.size(); ++i) {
    fs.depths_diopters.push_back(planes[i].diopters);
    const double dz = planes[i].z_from_slm - cfg.wrp_distance;
    std::vector<RealGrid> slice(
        channels, RealGrid(lf.views.front().front().rows(), lf.views.front().front().cols(), 0.0));
    for (int vr = 0; vr < lf.view_rows; ++vr) {
      for (int vc = 0; vc < lf.view_cols; ++vc) {
        const double sx = std::tan(lf.angle_x[vc]) * dz / cfg.pixel_pitch;
        const double sy = std::tan(lf.angle_y[vr]) * dz / cfg.pixel_pitch;
        for (int ch = 0; ch < channels; ++ch) {
          RealGrid shifted = fourier_shift(lf.view(vr, vc, ch), sx, sy);
          for (size_t px = 0; px < shifted.size(); ++px) slice[ch][px] += w * shifted[px];
        }
      }
    }
    for (auto& ch : slice)
      for (auto& v : ch) v = std::max(v, 0.0);
    fs.slices[i] = std::move(slice);
  }
  return fs;
}

StftCarriers stft_carriers(const StftSpec& spec, double pitch_x, double pitch_y, bool sideband) {
  StftCarriers car;
  const double fmax_x = 1.0 / (2.0 * pitch_x);
  const double fmax_y = 1.0 / (2.0 * pitch_y);
  const int U = spec.view_cols, V = spec.view_rows, win = spec.window;
  auto snap = [&](double f, double pitch) {
    const int b = static_cast<int>(std::lround(f * win * pitch));
    return std::clamp(b, -win / 2, win / 2 - 1);
  };
  for (int i = 0; i < U; ++i) {
    const double f = -fmax_x + (i + 0.5) * 2.0 * fmax_x / U;
    car.fx.push_back(f);
    car.bin_x.push_back(snap(f, pitch_x));
  }
  for (int j = 0; j < V; ++j) {
    const double f = sideband ? (j + 0.5) * fmax_y / V : -fmax_y + (j + 0.5) * 2.0 * fmax_y / V;
    car.fy.push_back(f);
    car.bin_y.push_back(snap(f, pitch_y));
  }
  return car;
}

StftPlan::StftPlan(int rows, int cols, double pitch_x, double pitch_y, const StftSpec& spec,
                   bool sideband)
    : spec_(spec), rows_(rows), cols_(cols) {
  if (spec.window < 1 || spec.hop < 1 || spec.hop > spec.window)
    throw DomainError("stft: need 1 <= hop <= window");
  if (spec.view_cols > spec.window || spec.view_rows > spec.window)
    throw DomainError("stft: view count exceeds available bins");
  if (rows < spec.window || cols < spec.window)
    throw DomainError("stft: field smaller than the analysis window");
  carriers_ = stft_carriers(spec, pitch_x, pitch_y, sideband);
  patch_rows_ = (rows - spec.window) / spec.hop + 1;
  patch_cols_ = (cols - spec.window) / spec.hop + 1;
}

std::vector<ComplexGrid> StftPlan::forward(const ComplexGrid& field) const {
  const int win = spec_.window;
  std::vector<ComplexGrid> coeffs(view_count(), ComplexGrid(patch_rows_, patch_cols_));
  ComplexGrid patch(win, win);
  for (int pr = 0; pr < patch_rows_; ++pr) {
    for (int pc = 0; pc < patch_cols_; ++pc) {
      const int r0 = pr * spec_.hop, c0 = pc * spec_.hop;
      for (int r = 0; r < win; ++r)
        for (int c = 0; c < win; ++c) patch(r, c) = field(r0 + r, c0 + c);
      fft::forward(patch);
      for (int vr = 0; vr < spec_.view_rows; ++vr) {
        const int br = (carriers_.bin_y[vr] + win) % win;
        for (int vc = 0; vc < spec_.view_cols; ++vc) {
          const int bc = (carriers_.bin_x[vc] + win) % win;
          coeffs[vr * spec_.view_cols + vc](pr, pc) = patch(br, bc);
        }
      }
    }
  }
  return coeffs;
}

ComplexGrid StftPlan::adjoint(const std::vector<ComplexGrid>& coeffs) const {
  const int win = spec_.window;
  ComplexGrid out(rows_, cols_);
  ComplexGrid patch(win, win);
  for (int pr = 0; pr < patch_rows_; ++pr) {
    for (int pc = 0; pc < patch_cols_; ++pc) {
      patch.fill(cplx(0, 0));
      for (int vr = 0; vr < spec_.view_rows; ++vr) {
        const int br = (carriers_.bin_y[vr] + win) % win;
        for (int vc = 0; vc < spec_.view_cols; ++vc) {
          const int bc = (carriers_.bin_x[vc] + win) % win;
          patch(br, bc) += coeffs[vr * spec_.view_cols + vc](pr, pc);
        }
      }
      fft::inverse(patch);
      const int r0 = pr * spec_.hop, c0 = pc * spec_.hop;
      for (int r = 0; r < win; ++r)
        for (int c = 0; c < win; ++c) out(r0 + r, c0 + c) += patch(r, c);
    }
  }
  return out;
}

RealGrid box_downsample(const RealGrid& img, int out_rows, int out_cols) {
  if (out_rows < 1 || out_cols < 1 || out_rows > img.rows() || out_cols > img.cols())
    throw DomainError("box_downsample: bad output shape");
  RealGrid out(out_rows, out_cols, 0.0);
  RealGrid weight(out_rows, out_cols, 0.0);
  for (int r = 0; r < img.rows(); ++r) {
    const int orow = std::min(r * out_rows / img.rows(), out_rows - 1);
    for (int c = 0; c < img.cols(); ++c) {
      const int ocol = std::min(c * out_cols / img.cols(), out_cols - 1);
      out(orow, ocol) += img(r, c);
      weight(orow, ocol) += 1.0;
    }
  }
  for (size_t i = 0; i < out.size(); ++i) out[i] /= weight[i];
  return out;
}

StftLightField stft_light_field(const ComplexField& field, const StftSpec& spec, bool sideband) {
  field.validate();
  StftPlan plan(field.grid.rows(), field.grid.cols(), field.pitch_x, field.pitch_y, spec,
                sideband);
  const auto coeffs = plan.forward(field.grid);

  StftLightField out;
  out.total_energy = energy(field.grid);
  out.views.view_rows = spec.view_rows;
  out.views.view_cols = spec.view_cols;
  out.views.orthographic = true;
  for (const auto& c : coeffs) {
    out.views.views.push_back({intensity(c)});
    out.view_energy.push_back(energy(c));
  }
  // View angles correspond to the snapped carrier bins actually sampled.
  const auto& car = plan.carriers();
  for (int i = 0; i < spec.view_cols; ++i)
    out.views.angle_x.push_back(
        std::asin(field.wavelength * car.bin_x[i] / (spec.window * field.pitch_x)));
  for (int j = 0; j < spec.view_rows; ++j)
    out.views.angle_y.push_back(
        std::asin(field.wavelength * car.bin_y[j] / (spec.window * field.pitch_y)));
  return out;
}

}  // namespace holo

#include "holo/optics.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

void OpticalConfig::validate() const {
  if (wavelengths.empty()) throw DomainError("optical config: no wavelengths");
  for (double w : wavelengths)
    if (!(w > 0)) throw DomainError("optical config: wavelength must be positive");
  if (!(pixel_pitch > 0)) throw DomainError("optical config: pixel pitch must be positive");
  if (slm_cols < 1 || slm_rows < 1) throw DomainError("optical config: SLM resolution must be >= 1");
  if (active_cols < 1 || active_rows < 1 || active_cols > slm_cols || active_rows > slm_rows)
    throw DomainError("optical config: active resolution must fit inside the SLM");
  if (!(eyepiece_focal_length > 0)) throw DomainError("optical config: focal length must be positive");
  if (!(half_depth > 0)) throw DomainError("optical config: half depth must be positive");
  if (!(wrp_distance > 0)) throw DomainError("optical config: WRP distance must be positive");
  if (num_frames < 1) throw DomainError("optical config: num_frames must be >= 1");
  // Near clipping plane must stay inside the eyepiece focal length.
  if (!(2.0 * half_depth < eyepiece_focal_length))
    throw DomainError("optical config: 2*z_o must be smaller than the eyepiece focal length");
  if (eyebox_reference >= static_cast<int>(wavelengths.size()))
    throw DomainError("optical config: eyebox reference channel out of range");
}

int OpticalConfig::reference_channel() const {
  if (eyebox_reference >= 0) return eyebox_reference;
  return static_cast<int>(std::min_element(wavelengths.begin(), wavelengths.end()) -
                          wavelengths.begin());
}

double diffraction_angle(const OpticalConfig& cfg, int channel) {
  if (channel < 0 || channel >= static_cast<int>(cfg.wavelengths.size()))
    throw DomainError("diffraction_angle: channel out of range");
  const double ratio = cfg.wavelengths[channel] / (2.0 * cfg.pixel_pitch);
  if (ratio > 1.0)
    throw DomainError("diffraction_angle: wavelength exceeds twice the pixel pitch");
  return 2.0 * std::asin(ratio);
}

DisplayGeometry display_geometry(const OpticalConfig& cfg) {
  cfg.validate();
  DisplayGeometry g;
  g.theta_diff.resize(cfg.wavelengths.size());
  for (int c = 0; c < static_cast<int>(cfg.wavelengths.size()); ++c)
    g.theta_diff[c] = diffraction_angle(cfg, c);

  const double f = cfg.eyepiece_focal_length;
  const double theta_ref = g.theta_diff[cfg.reference_channel()];
  g.eyebox_width = f * theta_ref;
  g.eyebox_height = cfg.sideband ? 0.5 * f * theta_ref : f * theta_ref;

  const double wx = cfg.active_cols * cfg.pixel_pitch;
  const double wy = cfg.active_rows * cfg.pixel_pitch;
  g.fov_h_deg = 2.0 * std::atan(wx / (2.0 * f)) * 180.0 / kPi;
  g.fov_v_deg = 2.0 * std::atan(wy / (2.0 * f)) * 180.0 / kPi;

  g.max_cpd = f / (2.0 * cfg.pixel_pitch) * kPi / 180.0;
  g.d_ncp = 1.0 / (f - 2.0 * cfg.half_depth) - 1.0 / f;
  return g;
}

double z_to_diopter(const OpticalConfig& cfg, double z_from_slm) {
  const double f = cfg.eyepiece_focal_length;
  const double d = f - (z_from_slm - cfg.z_fcp());  // distance to the eyepiece
  return 1.0 / d - 1.0 / f;
}

double diopter_to_z(const OpticalConfig& cfg, double diopters) {
  const double f = cfg.eyepiece_focal_length;
  return cfg.z_fcp() + f * f * diopters / (1.0 + f * diopters);
}

double wrp_diopters(const OpticalConfig& cfg) {
  return z_to_diopter(cfg, cfg.wrp_distance);
}

std::vector<PlaneDepth> plane_depths(const OpticalConfig& cfg, int k) {
  if (k < 1) throw DomainError("plane_depths: k must be >= 1");
  const double d_ncp = 1.0 / (cfg.eyepiece_focal_length - 2.0 * cfg.half_depth) -
                       1.0 / cfg.eyepiece_focal_length;
  std::vector<PlaneDepth> planes;
  planes.reserve(k);
  if (k == 1) {
    const double d = wrp_diopters(cfg);
    planes.push_back({d, diopter_to_z(cfg, d)});
    return planes;
  }
  for (int i = 0; i < k; ++i) {
    const double d = d_ncp * static_cast<double>(i) / (k - 1);
    planes.push_back({d, diopter_to_z(cfg, d)});
  }
  return planes;
}

}  // namespace holo

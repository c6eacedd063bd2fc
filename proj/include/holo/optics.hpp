// Physical display configuration and closed-form geometry calculators.
#pragma once

#include <vector>

#include "holo/errors.hpp"

namespace holo {

// Single source of physical truth for one display setup. All lengths in
// meters; the depth volume spans [z_fcp, z_ncp] around the wavefront
// recording plane, with the far clipping plane sitting at the eyepiece
// focal plane so it floats at optical infinity.
struct OpticalConfig {
  std::vector<double> wavelengths;  // vacuum, m
  double pixel_pitch = 8.2e-6;      // m
  int slm_cols = 1920, slm_rows = 1200;
  int active_cols = 1600, active_rows = 900;
  double eyepiece_focal_length = 40e-3;  // m
  double half_depth = 5.535e-3;          // z_o, m
  double wrp_distance = 7e-3;            // z_WRP from the SLM relay output, m
  int num_frames = 1;                    // time-multiplexed frames T
  bool sideband = true;                  // keep the f_y >= 0 half-spectrum
  int eyebox_reference = -1;             // channel index; -1 = shortest wavelength

  void validate() const;
  int reference_channel() const;
  double z_fcp() const { return wrp_distance - half_depth; }
  double z_ncp() const { return wrp_distance + half_depth; }
};

struct DisplayGeometry {
  std::vector<double> theta_diff;  // per wavelength, rad
  double eyebox_width = 0;         // m, reference channel
  double eyebox_height = 0;        // m, halved when sideband is on
  double fov_h_deg = 0;
  double fov_v_deg = 0;
  double max_cpd = 0;  // cycles per degree
  double d_ncp = 0;    // dioptric distance of the near clipping plane
};

// Full SLM diffraction cone: 2*asin(lambda / (2*pitch)).
double diffraction_angle(const OpticalConfig& cfg, int channel);

DisplayGeometry display_geometry(const OpticalConfig& cfg);

// Dioptric depth of a plane at distance z_from_slm, through the eyepiece
// lens equation, and its inverse. 0 D at the FCP, d_ncp at the NCP.
double z_to_diopter(const OpticalConfig& cfg, double z_from_slm);
double diopter_to_z(const OpticalConfig& cfg, double diopters);
double wrp_diopters(const OpticalConfig& cfg);

struct PlaneDepth {
  double diopters = 0;
  double z_from_slm = 0;  // propagation distance from the SLM plane, m
};

// k planes uniformly spaced in diopters over [0, d_ncp], endpoints included.
// k == 1 places the single plane at the WRP's own dioptric depth.
std::vector<PlaneDepth> plane_depths(const OpticalConfig& cfg, int k);

}  // namespace holo

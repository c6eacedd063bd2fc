// Image metrics, light-field sampling analysis, ocular-parallax models and
// luminance conversion.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "holo/grid.hpp"
#include "holo/optics.hpp"

namespace holo {

// Standard PSNR; identical images return +infinity.
double psnr(const RealGrid& a, const RealGrid& b, double peak = 1.0);

// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), evaluated over the
// valid (fully overlapped) region.
double ssim(const RealGrid& a, const RealGrid& b, double peak = 1.0);

// Sampling analysis around Eqs. relating depth range, angular resolution and
// spatial bandwidth. B_x is the *full* bandwidth, i.e. twice the maximum
// spatial frequency, in cycles/m at the display plane.
struct SamplingQuery {
  double bandwidth = 0;           // B_x, cycles/m (0 = derive from cpd)
  double resolution_cpd = 0;      // target resolution, cycles/degree
  double wavelength = 532e-9;     // m
  double focal_length = 40e-3;    // m
  double depth_range = 0;         // D_max, diopters
  std::optional<double> cutoff_cpd;  // reject resolutions above this
};

// Half depth z_o for a dioptric range: f^2 D / (2 (f D + 1)).
double half_depth_for_range(double d_max, double focal_length);

struct RequiredViews {
  double raw = 0;  // lambda * z_o * B_x^2
  int views = 0;   // ceil(raw), at least 1
  double bandwidth = 0;
};

RequiredViews required_views(const SamplingQuery& query);

struct DepthRangeResult {
  bool bounded = false;
  double d_max = 0;  // valid when bounded
};

// Largest dioptric range supported by N_u views at bandwidth B_x.
DepthRangeResult max_depth_range(double n_u, double bandwidth, double focal_length,
                                 double wavelength);

// Eccentricity-dependent resolution and parallax-detection models plus the
// deterministic feature matcher used for the detection rate.
struct ParallaxModel {
  double mar_slope = 0.022;        // deg per deg of eccentricity
  double mar_omega0 = 1.0 / 60.0;  // deg, 20/20 vision
  double threshold_at_15 = 0.36;   // diopters at 15 deg eccentricity
  double threshold_slope = 0.0016; // diopters per deg

  int patch = 9;            // matching patch (odd)
  int search_radius = 12;   // px
  int max_features = 256;
  double acceptance = 0.8;  // min normalized cross-correlation

  double mar(double eccentricity_deg) const;
  double threshold_diopters(double eccentricity_deg) const;
  // Dioptric threshold converted to visual angle for a given pupil shift.
  double threshold_angle_deg(double eccentricity_deg, double pupil_shift_m) const;
};

// Fraction of matched feature pairs whose angular displacement exceeds the
// eccentricity-dependent threshold, pooled over focal states. Throws if no
// features can be matched at all.
double parallax_detection_rate(const std::vector<RealGrid>& frames1,
                               const std::vector<RealGrid>& frames2, const ParallaxModel& model,
                               double deg_per_px,
                               const std::function<double(double)>& threshold_deg);

struct LuminanceInput {
  std::vector<double> wavelengths;  // m
  std::vector<double> power;        // W per line
  double area = 1.0;                // S, m^2
  double solid_angle = 1.0;         // Omega, sr
};

// 683/(S*Omega) * sum Phi(lambda) V(lambda), with V interpolated linearly
// from the photopic table. Lines outside the table contribute zero with a
// warning.
double luminance(const LuminanceInput& input);

// CIE 1924 photopic luminosity at a wavelength (m), linear interpolation.
double photopic_v(double wavelength);

}  // namespace holo

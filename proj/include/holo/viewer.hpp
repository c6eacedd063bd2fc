// Pupil-sampled retinal simulation across the eyebox.
#pragma once

#include <vector>

#include "holo/field.hpp"
#include "holo/optics.hpp"
#include "holo/targets.hpp"

namespace holo {

enum class Apodization { diffraction_limited, stiles_crawford };

// Pupil center and diameter are normalized by the eyebox width, relative to
// the eyebox center. The Stiles-Crawford coefficient p(lambda) applies in
// units of m^-2 on the metric pupil radius.
struct PupilState {
  double center_x_norm = 0;
  double center_y_norm = 0;
  double diameter_norm = 1;
  Apodization apodization = Apodization::diffraction_limited;
  std::vector<double> sce_coefficient;  // per channel; empty = 2.5e4 everywhere
  double focal_diopters = 0;

  double sce(int channel) const {
    if (sce_coefficient.empty()) return 2.5e4;
    return sce_coefficient.at(channel);
  }
  void validate() const;
};

struct PupilGrid {
  int rows = 0, cols = 0;
  double pitch_x = 0, pitch_y = 0;  // m, from to_pupil_plane
  double x(int c) const { return (c - cols / 2) * pitch_x; }
  double y(int r) const { return (r - rows / 2) * pitch_y; }
};

// Metric extent and center of the physical eyebox; the sideband keeps the
// f_y >= 0 half so the box is vertically halved and recentered.
struct EyeboxGeometry {
  double width = 0, height = 0;
  double center_x = 0, center_y = 0;
};

EyeboxGeometry eyebox_geometry(const OpticalConfig& cfg);

// Apodization grid: A_o * 10^(-p(lambda) r^2) inside the circular aperture,
// zero outside; diffraction-limited mode drops the exponential.
RealGrid pupil_aperture(const PupilState& state, const PupilGrid& grid,
                        const EyeboxGeometry& eyebox, int channel);

// Fraction of the pupil disk overlapping the eyebox rectangle.
double pupil_eyebox_overlap(const PupilState& state, const EyeboxGeometry& eyebox);

struct RetinalImage {
  std::vector<RealGrid> intensity;  // per channel, linear units
  double focal_diopters = 0;
  PupilState pupil;
  bool vignetted = false;
};

// Perceived image for one pupil: propagate each SLM frame to the WRP, pass
// the eyepiece to the pupil plane, apodize, add the focal-state defocus
// phase, return to the image plane and average intensities over frames.
// channel_stacks[c] holds the binary frames of channel c.
RetinalImage retinal_image(const std::vector<FieldStack>& channel_stacks,
                           const OpticalConfig& cfg, const PupilState& state);

// Per-view mean energy of the time-averaged STFT light field at the WRP,
// normalized to a maximum of 1.
RealGrid eyebox_energy_tiles(const FieldStack& stack, const OpticalConfig& cfg,
                             const StftSpec& spec);

}  // namespace holo

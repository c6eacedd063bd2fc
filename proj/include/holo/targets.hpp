// Supervision target synthesis: closest-distance masks, focal stacks from
// RGB-D and light fields, and STFT light-field extraction.
#pragma once

#include <vector>

#include "holo/field.hpp"
#include "holo/grid.hpp"
#include "holo/optics.hpp"

namespace holo {

struct RgbdTarget {
  std::vector<RealGrid> amplitude;  // per channel, values in [0, 1]
  RealGrid depth;                   // diopters

  void validate() const;
};

struct MaskSet {
  std::vector<RealGrid> masks;  // binary, one per plane
  std::vector<double> plane_diopters;

  void validate() const;  // checks the masks partition the image
};

struct LightField {
  int view_rows = 0, view_cols = 0;
  std::vector<std::vector<RealGrid>> views;  // [row * view_cols + col][channel]
  std::vector<double> angle_x;               // per view column, rad
  std::vector<double> angle_y;               // per view row, rad
  bool orthographic = true;

  const RealGrid& view(int r, int c, int ch = 0) const {
    return views[static_cast<size_t>(r) * view_cols + c][ch];
  }
  RealGrid& view(int r, int c, int ch = 0) {
    return views[static_cast<size_t>(r) * view_cols + c][ch];
  }
  int channels() const { return views.empty() ? 0 : static_cast<int>(views.front().size()); }
  int view_count() const { return view_rows * view_cols; }
  void validate() const;
};

// Uniform view angles with a half-cell inset from the boundary, matching the
// STFT carrier convention. Vertical angles cover only [0, half_y] when
// vertical_upper_only is set (sideband systems).
void assign_view_angles(LightField& lf, double half_x, double half_y, bool vertical_upper_only);

enum class FocalStackSource { rgbd, lightfield };

struct FocalStack {
  std::vector<std::vector<RealGrid>> slices;  // [plane][channel]
  std::vector<double> depths_diopters;
  FocalStackSource source = FocalStackSource::rgbd;

  void validate() const;
};

// M^(k) = 1 where plane k is nearest to the depth value in diopters; ties go
// to the smaller plane index. Planes must be sorted ascending.
MaskSet closest_distance_masks(const RealGrid& depth, const std::vector<double>& planes);

// Layered defocus synthesis from RGB-D: each depth layer is blurred with a
// disk whose angular radius is (D_p/2)*|d_i - d_k| and composited far to
// near with identically blurred occupancy mattes.
FocalStack focal_stack_from_rgbd(const RgbdTarget& target, const std::vector<PlaneDepth>& planes,
                                 double pupil_diameter, const OpticalConfig& cfg);

// Shift-and-add refocusing: fs_i = mean_v shift(l_v, tan(u_v)*(z_i - z_WRP)).
FocalStack focal_stack_from_lf(const LightField& lf, const std::vector<PlaneDepth>& planes,
                               const OpticalConfig& cfg);

struct StftSpec {
  int window = 16;
  int hop = 16;
  int view_rows = 3;  // V, vertical
  int view_cols = 3;  // U, horizontal
};

// Carrier frequencies per view axis and their nearest local-DFT bins.
// Horizontal carriers span the full [-f_max, f_max]; vertical carriers span
// [0, f_max] when sideband is set, both inset half a cell from the edges.
struct StftCarriers {
  std::vector<double> fx, fy;    // cycles/m, per view column / row
  std::vector<int> bin_x, bin_y; // signed bin indices
};

StftCarriers stft_carriers(const StftSpec& spec, double pitch_x, double pitch_y, bool sideband);

// Precomputed patch layout + carrier bins for one field shape. forward()
// projects a field onto per-view local Fourier coefficients; adjoint() is
// its exact adjoint, used by the 4D supervision gradient.
class StftPlan {
 public:
  StftPlan(int rows, int cols, double pitch_x, double pitch_y, const StftSpec& spec,
           bool sideband);

  int patch_rows() const { return patch_rows_; }
  int patch_cols() const { return patch_cols_; }
  int view_count() const { return spec_.view_rows * spec_.view_cols; }
  const StftSpec& spec() const { return spec_; }
  const StftCarriers& carriers() const { return carriers_; }

  // coeffs[view_row * view_cols + view_col](patch_row, patch_col)
  std::vector<ComplexGrid> forward(const ComplexGrid& field) const;
  ComplexGrid adjoint(const std::vector<ComplexGrid>& coeffs) const;

 private:
  StftSpec spec_;
  StftCarriers carriers_;
  int rows_, cols_;
  int patch_rows_, patch_cols_;
};

struct StftLightField {
  LightField views;                // per-view intensity images, patch-grid sized
  std::vector<double> view_energy; // sum of |coeff|^2 per view
  double total_energy = 0;         // energy of the analyzed field
};

// Observable light field of a wavefront via windowed local Fourier analysis.
StftLightField stft_light_field(const ComplexField& field, const StftSpec& spec,
                                bool sideband = true);

// Area-averaging resample onto a coarser grid (used to bring supervision
// views down to the STFT patch resolution).
RealGrid box_downsample(const RealGrid& img, int out_rows, int out_cols);

}  // namespace holo

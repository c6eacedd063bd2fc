// Sampled complex wave fields and angular-spectrum propagation.
#pragma once

#include <vector>

#include "holo/errors.hpp"
#include "holo/grid.hpp"

namespace holo {

// One monochromatic field sampled on a regular grid. Pitches may differ
// per axis at the pupil plane; at the SLM plane they are equal.
struct ComplexField {
  ComplexGrid grid;
  double pitch_x = 0;    // m
  double pitch_y = 0;    // m
  double wavelength = 0; // m

  ComplexField() = default;
  ComplexField(ComplexGrid g, double pitch, double lambda)
      : grid(std::move(g)), pitch_x(pitch), pitch_y(pitch), wavelength(lambda) {}
  ComplexField(ComplexGrid g, double px, double py, double lambda)
      : grid(std::move(g)), pitch_x(px), pitch_y(py), wavelength(lambda) {}

  void validate() const;
};

// Time-multiplexed sequence of shape-identical fields.
struct FieldStack {
  std::vector<ComplexField> frames;

  void validate() const;
  int count() const { return static_cast<int>(frames.size()); }
};

// Angular-spectrum transfer grid H(f_x, f_y, z), stored in unshifted DFT
// order. |H| <= 1 everywhere; evanescent frequencies and (optionally) the
// f_y < 0 half-plane are zeroed.
struct PropagationKernel {
  ComplexGrid transfer;
  double z = 0;
  bool sideband = false;
};

PropagationKernel make_asm_kernel(int rows, int cols, double pitch_x, double pitch_y,
                                  double wavelength, double z, bool sideband,
                                  bool bandlimit = false);

struct PropOptions {
  bool sideband = false;
  // 2x linear zero-padding suppresses circular wraparound; turn off to get
  // the exactly unitary periodic operator.
  bool pad = true;
  // Band-limited ASM clamp for long distances (kernel zeroed beyond the
  // alias-free frequency). Off by default; all display distances here are
  // millimetric.
  bool bandlimit = false;
};

// Free-space propagation over distance z (may be negative).
ComplexField propagate_asm(const ComplexField& field, double z, const PropOptions& opt = {});

// Adjoint of propagate_asm under the same options (conjugate kernel); equal
// to propagation by -z and used by the optimizer's gradient chain.
ComplexField propagate_adjoint(const ComplexField& field, double z, const PropOptions& opt = {});

// Zero the f_y < 0 half of the spectrum. Idempotent.
ComplexField apply_sideband(const ComplexField& field);

// Circular subpixel shift of a real grid via a linear spectral phase.
// out(r, c) = in(r - dy, c - dx); integer shifts match array rotation.
RealGrid fourier_shift(const RealGrid& image, double dx, double dy);

// Ideal-lens transform from the eyepiece input to the pupil plane:
// the fftshifted unitary FFT with pupil pitch lambda*f/(N*pitch) per axis.
ComplexField to_pupil_plane(const ComplexField& field, double focal_length);

}  // namespace holo

#include "holo/field.hpp"

#include <cmath>

#include "holo/fft.hpp"

namespace holo {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

void ComplexField::validate() const {
  if (grid.rows() < 1 || grid.cols() < 1) throw DomainError("field: empty grid");
  if (!(pitch_x > 0) || !(pitch_y > 0)) throw DomainError("field: pitch must be positive");
  if (!(wavelength > 0)) throw DomainError("field: wavelength must be positive");
  if (!std::isfinite(energy(grid))) throw DomainError("field: non-finite energy");
}

void FieldStack::validate() const {
  if (frames.empty()) throw DomainError("field stack: empty");
  for (const auto& f : frames) {
    f.validate();
    if (!f.grid.same_shape(frames.front().grid) || f.wavelength != frames.front().wavelength ||
        f.pitch_x != frames.front().pitch_x || f.pitch_y != frames.front().pitch_y)
      throw DomainError("field stack: frames must share shape, pitch and wavelength");
  }
}

PropagationKernel make_asm_kernel(int rows, int cols, double pitch_x, double pitch_y,
                                  double wavelength, double z, bool sideband, bool bandlimit) {
  PropagationKernel kernel;
  kernel.transfer = ComplexGrid(rows, cols);
  kernel.z = z;
  kernel.sideband = sideband;
  const double lambda = wavelength;
  // Alias-free frequency bound per axis for the sampled kernel phase
  // (Matsushima-style band limitation).
  double fx_limit = 1e300, fy_limit = 1e300;
  if (bandlimit && z != 0) {
    const double sx = 2.0 * std::abs(z) / (cols * pitch_x);
    const double sy = 2.0 * std::abs(z) / (rows * pitch_y);
    fx_limit = 1.0 / (lambda * std::sqrt(sx * sx + 1.0));
    fy_limit = 1.0 / (lambda * std::sqrt(sy * sy + 1.0));
  }
  for (int r = 0; r < rows; ++r) {
    const double fy = freq_index(r, rows) / (rows * pitch_y);
    for (int c = 0; c < cols; ++c) {
      const double fx = freq_index(c, cols) / (cols * pitch_x);
      if (sideband && fy < 0) continue;  // stays zero
      if (std::abs(fx) > fx_limit || std::abs(fy) > fy_limit) continue;
      const double s = 1.0 - lambda * fy * lambda * fy - lambda * fx * lambda * fx;
      if (s < 0) continue;  // evanescent, stays zero
      const double phase = kTwoPi / lambda * z * std::sqrt(s);
      kernel.transfer(r, c) = cplx(std::cos(phase), std::sin(phase));
    }
  }
  return kernel;
}

namespace {

ComplexGrid pad_center(const ComplexGrid& g, int rows, int cols) {
  ComplexGrid out(rows, cols);
  const int r0 = (rows - g.rows()) / 2, c0 = (cols - g.cols()) / 2;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c) out(r + r0, c + c0) = g(r, c);
  return out;
}

ComplexGrid crop_center(const ComplexGrid& g, int rows, int cols) {
  ComplexGrid out(rows, cols);
  const int r0 = (g.rows() - rows) / 2, c0 = (g.cols() - cols) / 2;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = g(r + r0, c + c0);
  return out;
}

ComplexField apply_kernel(const ComplexField& field, double z, const PropOptions& opt,
                          bool conjugate) {
  field.validate();
  const int rows = field.grid.rows(), cols = field.grid.cols();
  const int prows = opt.pad ? 2 * rows : rows;
  const int pcols = opt.pad ? 2 * cols : cols;

  ComplexGrid work = opt.pad ? pad_center(field.grid, prows, pcols) : field.grid;
  fft::forward(work);
  PropagationKernel kernel = make_asm_kernel(prows, pcols, field.pitch_x, field.pitch_y,
                                             field.wavelength, z, opt.sideband, opt.bandlimit);
  if (conjugate) {
    for (size_t i = 0; i < work.size(); ++i) work[i] *= std::conj(kernel.transfer[i]);
  } else {
    for (size_t i = 0; i < work.size(); ++i) work[i] *= kernel.transfer[i];
  }
  fft::inverse(work);
  ComplexField out = field;
  out.grid = opt.pad ? crop_center(work, rows, cols) : std::move(work);
  return out;
}

}  // namespace

ComplexField propagate_asm(const ComplexField& field, double z, const PropOptions& opt) {
  return apply_kernel(field, z, opt, /*conjugate=*/false);
}

ComplexField propagate_adjoint(const ComplexField& field, double z, const PropOptions& opt) {
  return apply_kernel(field, z, opt, /*conjugate=*/true);
}

ComplexField apply_sideband(const ComplexField& field) {
  field.validate();
  ComplexField out = field;
  fft::forward(out.grid);
  const int rows = out.grid.rows();
  for (int r = 0; r < rows; ++r) {
    if (freq_index(r, rows) >= 0) continue;
    for (int c = 0; c < out.grid.cols(); ++c) out.grid(r, c) = 0;
  }
  fft::inverse(out.grid);
  return out;
}

RealGrid fourier_shift(const RealGrid& image, double dx, double dy) {
  const int rows = image.rows(), cols = image.cols();
  ComplexGrid work(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) work(r, c) = image(r, c);
  fft::forward(work);

  // Per-axis linear phase; the unpaired Nyquist bin of an even-length axis
  // gets the real part cos(pi*shift) so real inputs stay real and integer
  // shifts remain exact.
  auto ramp = [](int n, double shift) {
    std::vector<cplx> ph(n);
    for (int k = 0; k < n; ++k) {
      const int kf = freq_index(k, n);
      const double arg = -kTwoPi * kf * shift / n;
      if (n % 2 == 0 && kf == -n / 2)
        ph[k] = std::cos(kPi * shift);
      else
        ph[k] = cplx(std::cos(arg), std::sin(arg));
    }
    return ph;
  };
  const auto phx = ramp(cols, dx);
  const auto phy = ramp(rows, dy);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) work(r, c) *= phy[r] * phx[c];
  fft::inverse(work);

  RealGrid out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = work(r, c).real();
  return out;
}

ComplexField to_pupil_plane(const ComplexField& field, double focal_length) {
  field.validate();
  if (!(focal_length > 0)) throw DomainError("to_pupil_plane: focal length must be positive");
  ComplexGrid spectrum = field.grid;
  fft::forward(spectrum);
  ComplexField out;
  out.grid = fft::fftshift(spectrum);
  out.wavelength = field.wavelength;
  out.pitch_x = field.wavelength * focal_length / (field.grid.cols() * field.pitch_x);
  out.pitch_y = field.wavelength * focal_length / (field.grid.rows() * field.pitch_y);
  return out;
}

}  // namespace holo

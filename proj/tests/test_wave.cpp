#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "holo/fft.hpp"
#include "holo/field.hpp"
#include "holo/random.hpp"

using namespace holo;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

ComplexField random_field(int rows, int cols, double pitch, double lambda, uint64_t seed) {
  std::mt19937_64 gen(seed);
  ComplexGrid g(rows, cols);
  for (auto& v : g) v = cplx(2.0 * uniform_open(gen) - 1.0, 2.0 * uniform_open(gen) - 1.0);
  return ComplexField(std::move(g), pitch, lambda);
}

double max_abs_diff(const ComplexGrid& a, const ComplexGrid& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("propagation at z = 0 is the identity") {
  const ComplexField u = random_field(32, 48, 8.2e-6, 532e-9, 11);
  const ComplexField v = propagate_asm(u, 0.0);
  CHECK(max_abs_diff(u.grid, v.grid) < 1e-12);
}

TEST_CASE("on-axis plane wave is an eigenfunction") {
  ComplexGrid g(32, 32, cplx(1.0, 0.0));
  const ComplexField u(std::move(g), 8.2e-6, 532e-9);
  // Periodic operator: see the plane wave without aperture truncation.
  const ComplexField v = propagate_asm(u, 3.7e-3, {false, false});
  for (const auto& val : v.grid) CHECK(std::abs(std::abs(val) - 1.0) < 1e-9);
  // Global phase equals the plane-wave phase factor.
  const double expected = 2.0 * kPi / 532e-9 * 3.7e-3;
  const cplx ratio = v.grid(5, 7) / std::polar(1.0, expected);
  CHECK(std::abs(ratio - cplx(1, 0)) < 1e-9);
}

TEST_CASE("point aperture matches direct Rayleigh-Sommerfeld integration") {
  const int n = 64;
  const double pitch = 8.2e-6, lambda = 532e-9, z = 20e-3;
  ComplexGrid g(n, n);
  // Small circular aperture, a few pixels across, with a soft edge.
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double d = std::hypot(r - n / 2, c - n / 2);
      g(r, c) = std::clamp(2.5 - d, 0.0, 1.0);
    }
  const ComplexField src(std::move(g), pitch, lambda);
  const ComplexField out = propagate_asm(src, z);

  // Direct Rayleigh-Sommerfeld integral over the source samples.
  const double k = 2.0 * kPi / lambda;
  ComplexGrid oracle(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      cplx acc(0, 0);
      for (int sr = 0; sr < n; ++sr)
        for (int sc = 0; sc < n; ++sc) {
          const cplx amp = src.grid(sr, sc);
          if (amp == cplx(0, 0)) continue;
          const double dx = (c - sc) * pitch, dy = (r - sr) * pitch;
          const double dist = std::sqrt(dx * dx + dy * dy + z * z);
          const cplx kernel = z / (2.0 * kPi) * (1.0 / dist - cplx(0, k)) *
                              std::polar(1.0, k * dist) / (dist * dist);
          acc += amp * kernel;
        }
      oracle(r, c) = acc * pitch * pitch;
    }

  // Compare intensities over the paraxial (central) region.
  double num = 0, den = 0;
  for (int r = n / 4; r < 3 * n / 4; ++r)
    for (int c = n / 4; c < 3 * n / 4; ++c) {
      const double ia = std::norm(out.grid(r, c));
      const double ib = std::norm(oracle(r, c));
      num += (ia - ib) * (ia - ib);
      den += ib * ib;
    }
  CHECK(std::sqrt(num / den) < 0.02);
}

TEST_CASE("sideband filter: definition, idempotence, retained energy") {
  // A field living entirely at f_y < 0 is wiped out.
  const int n = 32;
  ComplexGrid g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      g(r, c) = std::polar(1.0, -2.0 * kPi * 3.0 * r / n);  // f_y = -3 bins
  ComplexField u(std::move(g), 8.2e-6, 532e-9);
  const ComplexField wiped = apply_sideband(u);
  CHECK(energy(wiped.grid) < 1e-18 * energy(u.grid));

  // Idempotence.
  const ComplexField once = apply_sideband(random_field(n, n, 8.2e-6, 532e-9, 5));
  const ComplexField twice = apply_sideband(once);
  CHECK(max_abs_diff(once.grid, twice.grid) < 1e-12);

  // A real-valued field has a Hermitian spectrum: half the energy survives.
  std::mt19937_64 gen(99);
  double ratio_sum = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    ComplexGrid noise(n, n);
    for (auto& v : noise) v = cplx(2.0 * uniform_open(gen) - 1.0, 0.0);
    ComplexField field(std::move(noise), 8.2e-6, 532e-9);
    const double before = energy(field.grid);
    ratio_sum += energy(apply_sideband(field).grid) / before;
  }
  CHECK(ratio_sum / trials == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("fourier shift: identity, integer, subpixel") {
  std::mt19937_64 gen(3);
  RealGrid img(24, 24);
  for (auto& v : img) v = uniform_open(gen);

  const RealGrid same = fourier_shift(img, 0.0, 0.0);
  for (size_t i = 0; i < img.size(); ++i) CHECK(std::abs(same[i] - img[i]) < 1e-12);

  const RealGrid rolled = fourier_shift(img, 3.0, 0.0);
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c)
      CHECK(std::abs(rolled(r, c) - img(r, (c - 3 + 24) % 24)) < 1e-10);

  // Band-limited bump (harmonics far below Nyquist): the analytic resample
  // is the same harmonic sum evaluated at shifted coordinates.
  const int n = 32;
  auto bump = [&](double x, double y) {
    return 1.0 + 0.5 * std::cos(2.0 * kPi * 2.0 * x / n) * std::sin(2.0 * kPi * 3.0 * y / n) +
           0.25 * std::cos(2.0 * kPi * 5.0 * x / n + 0.3);
  };
  RealGrid smooth(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) smooth(r, c) = bump(c, r);
  const RealGrid shifted = fourier_shift(smooth, 0.5, 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) CHECK(std::abs(shifted(r, c) - bump(c - 0.5, r)) < 1e-6);
}

TEST_CASE("pupil-plane transform: Parseval, concentration, shift invariance") {
  const double f = 40e-3;
  const ComplexField u = random_field(32, 32, 8.2e-6, 532e-9, 21);
  const ComplexField pupil = to_pupil_plane(u, f);
  CHECK(energy(pupil.grid) == doctest::Approx(energy(u.grid)).epsilon(1e-9));
  CHECK(pupil.pitch_x == doctest::Approx(532e-9 * f / (32 * 8.2e-6)).epsilon(1e-12));

  // Uniform wave concentrates on the DC sample.
  ComplexGrid flat(32, 32, cplx(1.0, 0.0));
  const ComplexField plane(std::move(flat), 8.2e-6, 532e-9);
  const ComplexField conc = to_pupil_plane(plane, f);
  double center = 0, total = energy(conc.grid);
  for (int r = 15; r <= 17; ++r)
    for (int c = 15; c <= 17; ++c) center += std::norm(conc.grid(r, c));
  CHECK(center / total > 0.99);

  // Integer translation only adds a pupil-plane phase ramp.
  ComplexGrid moved(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) moved(r, c) = u.grid((r + 4) % 32, (c + 7) % 32);
  const ComplexField pupil2 = to_pupil_plane(ComplexField(std::move(moved), 8.2e-6, 532e-9), f);
  for (size_t i = 0; i < pupil.grid.size(); ++i)
    CHECK(std::abs(std::norm(pupil2.grid[i]) - std::norm(pupil.grid[i])) < 1e-9);
}

TEST_CASE("propagation is linear") {
  std::mt19937_64 gen(17);
  const ComplexField u1 = random_field(24, 24, 8.2e-6, 532e-9, 31);
  const ComplexField u2 = random_field(24, 24, 8.2e-6, 532e-9, 32);
  const cplx a(uniform_open(gen), uniform_open(gen));
  const cplx b(uniform_open(gen), uniform_open(gen));
  ComplexField combo = u1;
  for (size_t i = 0; i < combo.grid.size(); ++i) combo.grid[i] = a * u1.grid[i] + b * u2.grid[i];

  const double z = 2.3e-3;
  const ComplexField left = propagate_asm(combo, z);
  const ComplexField r1 = propagate_asm(u1, z);
  const ComplexField r2 = propagate_asm(u2, z);
  double worst = 0;
  for (size_t i = 0; i < left.grid.size(); ++i)
    worst = std::max(worst, std::abs(left.grid[i] - (a * r1.grid[i] + b * r2.grid[i])));
  CHECK(worst < 1e-10);
}

TEST_CASE("inverse consistency after band-limit projection") {
  // Without padding the operator is exactly unitary, so out-and-back equals
  // the band-limit projection of the input (the identity at these scales).
  const ComplexField u = random_field(32, 32, 8.2e-6, 532e-9, 77);
  const PropOptions periodic{false, false};
  const ComplexField back = propagate_asm(propagate_asm(u, 4e-3, periodic), -4e-3, periodic);
  CHECK(max_abs_diff(u.grid, back.grid) < 1e-8);

  // With the sideband on, out-and-back equals the sideband projection.
  const PropOptions side{true, false};
  const ComplexField filtered = apply_sideband(u);
  const ComplexField back2 = propagate_asm(propagate_asm(u, 4e-3, side), -4e-3, side);
  CHECK(max_abs_diff(filtered.grid, back2.grid) < 1e-8);
}

TEST_CASE("kernel magnitude never exceeds one") {
  // Long wavelength relative to pitch creates an evanescent band.
  const PropagationKernel kernel = make_asm_kernel(48, 48, 1e-6, 1e-6, 1.5e-6, 1e-3, false);
  for (const auto& h : kernel.transfer) CHECK(std::abs(h) <= 1.0 + 1e-12);
  // Evanescent corner is zeroed.
  CHECK(std::abs(kernel.transfer(24, 24)) == 0.0);

  // Negative-frequency rows of an even-length axis: indices -24..-1.
  const PropagationKernel side = make_asm_kernel(48, 48, 1e-6, 1e-6, 1.5e-6, 1e-3, true);
  int zeroed = 0;
  for (int r = 0; r < 48; ++r)
    if (freq_index(r, 48) < 0)
      for (int c = 0; c < 48; ++c) zeroed += std::abs(side.transfer(r, c)) == 0.0;
  CHECK(zeroed == 24 * 48);
}

TEST_CASE("band-limited kernel clamps high frequencies at long range") {
  const int n = 64;
  const double pitch = 8.2e-6, lambda = 532e-9, z = 0.5;  // long throw
  const PropagationKernel plain = make_asm_kernel(n, n, pitch, pitch, lambda, z, false, false);
  const PropagationKernel clamped = make_asm_kernel(n, n, pitch, pitch, lambda, z, false, true);
  const double limit = 1.0 / (lambda * std::sqrt(std::pow(2.0 * z / (n * pitch), 2) + 1.0));
  int removed = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double fx = freq_index(c, n) / (n * pitch);
      const double fy = freq_index(r, n) / (n * pitch);
      CHECK(std::abs(clamped.transfer(r, c)) <= 1.0 + 1e-12);
      if (std::abs(fx) > limit || std::abs(fy) > limit) {
        CHECK(std::abs(clamped.transfer(r, c)) == 0.0);
        removed += std::abs(plain.transfer(r, c)) > 0;
      } else {
        CHECK(std::abs(clamped.transfer(r, c) - plain.transfer(r, c)) == 0.0);
      }
    }
  CHECK(removed > 0);  // the clamp actually bites at this distance

  // At millimetric distances the limit exceeds the grid band: no change.
  const PropagationKernel near_plain =
      make_asm_kernel(n, n, pitch, pitch, lambda, 5e-3, false, false);
  const PropagationKernel near_clamped =
      make_asm_kernel(n, n, pitch, pitch, lambda, 5e-3, false, true);
  for (size_t i = 0; i < near_plain.transfer.size(); ++i)
    CHECK(near_plain.transfer[i] == near_clamped.transfer[i]);
}

TEST_CASE("propagation leaves its input unmodified") {
  const ComplexField u = random_field(16, 16, 8.2e-6, 532e-9, 41);
  ComplexField copy = u;
  (void)propagate_asm(u, 1e-3);
  (void)apply_sideband(u);
  (void)to_pupil_plane(u, 40e-3);
  CHECK(max_abs_diff(u.grid, copy.grid) == 0.0);
}

TEST_CASE("contained beam conserves energy through propagation") {
  // Gaussian beam well inside the window: the padded operator loses only
  // the energy that physically leaves the crop, which is negligible here.
  const int n = 64;
  const double pitch = 8.2e-6, lambda = 532e-9;
  ComplexGrid g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double d2 = (r - n / 2) * (r - n / 2) + (c - n / 2) * (c - n / 2);
      g(r, c) = std::exp(-d2 / (2.0 * 4.0 * 4.0));
    }
  const ComplexField u(std::move(g), pitch, lambda);
  const double before = energy(u.grid);
  const double after = energy(propagate_asm(u, 0.5e-3).grid);
  CHECK(std::abs(after - before) / before < 1e-9);
}

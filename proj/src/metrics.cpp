#include "holo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "holo/errors.hpp"

namespace holo {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double psnr(const RealGrid& a, const RealGrid& b, double peak) {
  if (!a.same_shape(b)) throw DomainError("psnr: shape mismatch");
  if (!(peak > 0)) throw DomainError("psnr: peak must be positive");
  double mse = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const RealGrid& a, const RealGrid& b, double peak) {
  if (!a.same_shape(b)) throw DomainError("ssim: shape mismatch");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  if (a.rows() < kWin || a.cols() < kWin) throw DomainError("ssim: image smaller than the window");

  double w[kWin];
  double wsum = 0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - kWin / 2;
    w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    wsum += w[i];
  }
  for (double& v : w) v /= wsum;

  const double c1 = 0.01 * peak * 0.01 * peak;
  const double c2 = 0.03 * peak * 0.03 * peak;

  double total = 0;
  long count = 0;
  for (int r = 0; r + kWin <= a.rows(); ++r) {
    for (int c = 0; c + kWin <= a.cols(); ++c) {
      double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          const double wij = w[i] * w[j];
          ma += wij * a(r + i, c + j);
          mb += wij * b(r + i, c + j);
        }
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          const double wij = w[i] * w[j];
          const double da = a(r + i, c + j) - ma;
          const double db = b(r + i, c + j) - mb;
          va += wij * da * da;
          vb += wij * db * db;
          cov += wij * da * db;
        }
      total += (2 * ma * mb + c1) * (2 * cov + c2) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

double half_depth_for_range(double d_max, double focal_length) {
  if (d_max < 0 || !(focal_length > 0)) throw DomainError("half_depth_for_range: bad inputs");
  return focal_length * focal_length * d_max / (2.0 * (focal_length * d_max + 1.0));
}

RequiredViews required_views(const SamplingQuery& query) {
  if (!(query.wavelength > 0) || !(query.focal_length > 0) || query.depth_range < 0)
    throw DomainError("required_views: bad inputs");
  double bw = query.bandwidth;
  if (bw <= 0) {
    if (!(query.resolution_cpd > 0))
      throw DomainError("required_views: need a bandwidth or a cpd resolution");
    if (query.cutoff_cpd && query.resolution_cpd > *query.cutoff_cpd + 1e-12)
      throw DomainError("required_views: resolution exceeds the display cutoff frequency");
    // cycles/deg -> cycles/rad -> cycles/m at the display plane; full
    // bandwidth is twice the maximum frequency.
    bw = 2.0 * query.resolution_cpd * (180.0 / kPi) / query.focal_length;
  }
  const double z_o = half_depth_for_range(query.depth_range, query.focal_length);
  RequiredViews out;
  out.bandwidth = bw;
  out.raw = query.wavelength * z_o * bw * bw;
  out.views = std::max(1, static_cast<int>(std::ceil(out.raw - 1e-12)));
  return out;
}

DepthRangeResult max_depth_range(double n_u, double bandwidth, double focal_length,
                                 double wavelength) {
  if (!(n_u > 0) || bandwidth < 0 || !(focal_length > 0) || !(wavelength > 0))
    throw DomainError("max_depth_range: bad inputs");
  // Inverting n_u = lambda z_o(D) B^2 with z_o = f^2 D / (2 (f D + 1)):
  // D = 2 n_u / (f (f lambda B^2 - 2 n_u)).
  const double den = focal_length * (focal_length * wavelength * bandwidth * bandwidth - 2.0 * n_u);
  DepthRangeResult out;
  if (den <= 0) return out;  // unbounded: the views support any depth range
  out.bounded = true;
  out.d_max = 2.0 * n_u / den;
  return out;
}

double ParallaxModel::mar(double e) const {
  if (e < 0) throw DomainError("mar: eccentricity must be >= 0");
  return mar_slope * e + mar_omega0;
}

double ParallaxModel::threshold_diopters(double e) const {
  if (e < 0) throw DomainError("parallax_threshold: eccentricity must be >= 0");
  return threshold_at_15 + threshold_slope * (e - 15.0);
}

double ParallaxModel::threshold_angle_deg(double e, double pupil_shift_m) const {
  // A dioptric disparity dD seen from pupil positions a distance d apart
  // subtends an angle of d * dD radians.
  return threshold_diopters(e) * std::abs(pupil_shift_m) * 180.0 / kPi;
}

namespace {

struct Corner {
  int r, c;
  double response;
};

// Harris corner responses with a 3x3 Sobel gradient and box aggregation,
// followed by greedy non-max suppression.
std::vector<Corner> harris_corners(const RealGrid& img, int max_features, int border) {
  const int rows = img.rows(), cols = img.cols();
  RealGrid ixx(rows, cols, 0.0), iyy(rows, cols, 0.0), ixy(rows, cols, 0.0);
  for (int r = 1; r + 1 < rows; ++r)
    for (int c = 1; c + 1 < cols; ++c) {
      const double gx = (img(r - 1, c + 1) + 2 * img(r, c + 1) + img(r + 1, c + 1) -
                         img(r - 1, c - 1) - 2 * img(r, c - 1) - img(r + 1, c - 1)) /
                        8.0;
      const double gy = (img(r + 1, c - 1) + 2 * img(r + 1, c) + img(r + 1, c + 1) -
                         img(r - 1, c - 1) - 2 * img(r - 1, c) - img(r - 1, c + 1)) /
                        8.0;
      ixx(r, c) = gx * gx;
      iyy(r, c) = gy * gy;
      ixy(r, c) = gx * gy;
    }
  std::vector<Corner> corners;
  for (int r = border; r + border < rows; ++r)
    for (int c = border; c + border < cols; ++c) {
      double sxx = 0, syy = 0, sxy = 0;
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) {
          sxx += ixx(r + i, c + j);
          syy += iyy(r + i, c + j);
          sxy += ixy(r + i, c + j);
        }
      const double det = sxx * syy - sxy * sxy;
      const double trace = sxx + syy;
      const double resp = det - 0.04 * trace * trace;
      if (resp > 1e-12) corners.push_back({r, c, resp});
    }
  std::sort(corners.begin(), corners.end(),
            [](const Corner& a, const Corner& b) { return a.response > b.response; });
  std::vector<Corner> kept;
  for (const Corner& cand : corners) {
    bool close = false;
    for (const Corner& k : kept)
      if (std::abs(k.r - cand.r) < 5 && std::abs(k.c - cand.c) < 5) {
        close = true;
        break;
      }
    if (!close) {
      kept.push_back(cand);
      if (static_cast<int>(kept.size()) >= max_features) break;
    }
  }
  return kept;
}

double ncc(const RealGrid& a, int ar, int ac, const RealGrid& b, int br, int bc, int half) {
  double ma = 0, mb = 0;
  const int n = (2 * half + 1) * (2 * half + 1);
  for (int i = -half; i <= half; ++i)
    for (int j = -half; j <= half; ++j) {
      ma += a(ar + i, ac + j);
      mb += b(br + i, bc + j);
    }
  ma /= n;
  mb /= n;
  double num = 0, da = 0, db = 0;
  for (int i = -half; i <= half; ++i)
    for (int j = -half; j <= half; ++j) {
      const double va = a(ar + i, ac + j) - ma;
      const double vb = b(br + i, bc + j) - mb;
      num += va * vb;
      da += va * va;
      db += vb * vb;
    }
  if (da <= 0 || db <= 0) return -1.0;
  return num / std::sqrt(da * db);
}

}  // namespace

double parallax_detection_rate(const std::vector<RealGrid>& frames1,
                               const std::vector<RealGrid>& frames2, const ParallaxModel& model,
                               double deg_per_px,
                               const std::function<double(double)>& threshold_deg) {
  if (frames1.size() != frames2.size() || frames1.empty())
    throw DomainError("parallax_detection_rate: focal state counts differ");
  const int half = model.patch / 2;
  const int border = half + model.search_radius;
  long matched = 0, detected = 0;
  for (size_t j = 0; j < frames1.size(); ++j) {
    const RealGrid& f1 = frames1[j];
    const RealGrid& f2 = frames2[j];
    if (!f1.same_shape(f2)) throw DomainError("parallax_detection_rate: frame shape mismatch");
    for (const Corner& corner : harris_corners(f1, model.max_features, border)) {
      double best = -2.0;
      int best_dr = 0, best_dc = 0, best_d2 = 0;
      for (int dr = -model.search_radius; dr <= model.search_radius; ++dr)
        for (int dc = -model.search_radius; dc <= model.search_radius; ++dc) {
          const double score = ncc(f1, corner.r, corner.c, f2, corner.r + dr, corner.c + dc, half);
          const int d2 = dr * dr + dc * dc;
          // Prefer the smallest displacement among (numerically) tied
          // correlations so periodic textures match their nearest alias.
          if (score > best + 1e-9 || (score > best - 1e-9 && d2 < best_d2)) {
            best = score;
            best_dr = dr;
            best_dc = dc;
            best_d2 = d2;
          }
        }
      if (best < model.acceptance) continue;
      ++matched;
      const double ecc = std::hypot(corner.r - f1.rows() / 2.0, corner.c - f1.cols() / 2.0) *
                         deg_per_px;
      const double disp = std::hypot(static_cast<double>(best_dr), static_cast<double>(best_dc)) *
                          deg_per_px;
      if (disp >= threshold_deg(ecc)) ++detected;
    }
  }
  if (matched == 0) throw DataError("parallax_detection_rate: no feature pairs matched");
  return static_cast<double>(detected) / matched;
}

namespace {

// CIE 1924 photopic luminosity function, 380-780 nm at 5 nm spacing.
constexpr double kPhotopicStart = 380e-9;
constexpr double kPhotopicStep = 5e-9;
constexpr double kPhotopic[] = {
    0.0000390, 0.0000645, 0.0001200, 0.0002170, 0.0003960, 0.0006400, 0.0012100, 0.0021800,
    0.0040000, 0.0073000, 0.0116000, 0.0168400, 0.0230000, 0.0298000, 0.0380000, 0.0480000,
    0.0600000, 0.0739000, 0.0909800, 0.1126000, 0.1390200, 0.1693000, 0.2080200, 0.2586000,
    0.3230000, 0.4073000, 0.5030000, 0.6082000, 0.7100000, 0.7932000, 0.8620000, 0.9148500,
    0.9540000, 0.9803000, 0.9949500, 1.0000000, 0.9950000, 0.9786000, 0.9520000, 0.9154000,
    0.8700000, 0.8163000, 0.7570000, 0.6949000, 0.6310000, 0.5668000, 0.5030000, 0.4412000,
    0.3810000, 0.3210000, 0.2650000, 0.2170000, 0.1750000, 0.1382000, 0.1070000, 0.0816000,
    0.0610000, 0.0445800, 0.0320000, 0.0232000, 0.0170000, 0.0119200, 0.0082100, 0.0057230,
    0.0041020, 0.0029290, 0.0020910, 0.0014840, 0.0010470, 0.0007400, 0.0005200, 0.0003611,
    0.0002492, 0.0001719, 0.0001200, 0.0000848, 0.0000600, 0.0000424, 0.0000300, 0.0000212,
    0.0000150};

}  // namespace

double photopic_v(double wavelength) {
  constexpr int n = static_cast<int>(sizeof(kPhotopic) / sizeof(kPhotopic[0]));
  const double pos = (wavelength - kPhotopicStart) / kPhotopicStep;
  if (pos < 0 || pos > n - 1) return 0.0;
  const int i = std::min(static_cast<int>(pos), n - 2);
  const double frac = pos - i;
  return kPhotopic[i] * (1 - frac) + kPhotopic[i + 1] * frac;
}

double luminance(const LuminanceInput& input) {
  if (input.wavelengths.size() != input.power.size())
    throw DomainError("luminance: wavelength/power size mismatch");
  if (!(input.area > 0) || !(input.solid_angle > 0))
    throw DomainError("luminance: area and solid angle must be positive");
  double acc = 0;
  for (size_t i = 0; i < input.wavelengths.size(); ++i) {
    if (input.power[i] < 0) throw DomainError("luminance: negative power");
    const double v = photopic_v(input.wavelengths[i]);
    if (v == 0.0 && input.power[i] > 0)
      std::fprintf(stderr, "warning: luminance line at %.0f nm is outside the photopic table\n",
                   input.wavelengths[i] * 1e9);
    acc += input.power[i] * v;
  }
  return 683.0 / (input.area * input.solid_angle) * acc;
}

}  // namespace holo

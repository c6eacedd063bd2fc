#include "holo/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace holo::fft {
namespace {

// FFTW plan creation is not thread-safe; execution on distinct buffers is.
// Plans are cached per (rows, cols, sign) and reused via the new-array API.
class PlanCache {
 public:
  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(rows, cols, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    // Planning with a scratch buffer; FFTW_UNALIGNED lets us execute on
    // arbitrary std::vector storage later.
    fftw_complex* scratch = fftw_alloc_complex(static_cast<size_t>(rows) * cols);
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, scratch, scratch, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(ComplexGrid& g, int sign) {
  if (g.empty()) return;
  fftw_plan plan = cache().get(g.rows(), g.cols(), sign);
  auto* buf = reinterpret_cast<fftw_complex*>(g.data());
  fftw_execute_dft(plan, buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
  for (auto& v : g) v *= scale;
}

}  // namespace

void forward(ComplexGrid& g) { execute(g, FFTW_FORWARD); }
void inverse(ComplexGrid& g) { execute(g, FFTW_BACKWARD); }

ComplexGrid fftshift(const ComplexGrid& g) {
  ComplexGrid out(g.rows(), g.cols());
  const int r0 = g.rows() / 2, c0 = g.cols() / 2;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      out((r + r0) % g.rows(), (c + c0) % g.cols()) = g(r, c);
  return out;
}

ComplexGrid ifftshift(const ComplexGrid& g) {
  ComplexGrid out(g.rows(), g.cols());
  const int r0 = g.rows() / 2, c0 = g.cols() / 2;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      out(r, c) = g((r + r0) % g.rows(), (c + c0) % g.cols());
  return out;
}

}  // namespace holo::fft

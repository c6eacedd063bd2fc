// Dense row-major 2D grids for real and complex sample data.
#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace holo {

using cplx = std::complex<double>;

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    assert(rows >= 0 && cols >= 0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool same_shape(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(T value) { data_.assign(data_.size(), value); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using RealGrid = Grid<double>;
using ComplexGrid = Grid<cplx>;

inline double energy(const ComplexGrid& g) {
  double s = 0;
  for (const auto& v : g) s += std::norm(v);
  return s;
}

inline double energy(const RealGrid& g) {
  double s = 0;
  for (double v : g) s += v * v;
  return s;
}

inline double grid_sum(const RealGrid& g) {
  double s = 0;
  for (double v : g) s += v;
  return s;
}

// sqrt(norm) rather than std::abs keeps this bit-identical with the
// time-averaged amplitude computed inside the supervision losses.
inline RealGrid amplitude(const ComplexGrid& g) {
  RealGrid out(g.rows(), g.cols());
  for (size_t i = 0; i < g.size(); ++i) out[i] = std::sqrt(std::norm(g[i]));
  return out;
}

inline RealGrid intensity(const ComplexGrid& g) {
  RealGrid out(g.rows(), g.cols());
  for (size_t i = 0; i < g.size(); ++i) out[i] = std::norm(g[i]);
  return out;
}

// Signed DFT frequency index for sample k of an n-point transform.
inline int freq_index(int k, int n) { return k < (n + 1) / 2 ? k : k - n; }

}  // namespace holo

// Thin FFTW wrapper: unitary 2D transforms on ComplexGrid.
#pragma once

#include "holo/grid.hpp"

namespace holo::fft {

// In-place unitary transforms (scaled by 1/sqrt(rows*cols)).
// Forward uses the e^{-2*pi*i} analysis convention.
void forward(ComplexGrid& g);
void inverse(ComplexGrid& g);

// Swap quadrants so DC moves to (rows/2, cols/2); ifftshift undoes it.
ComplexGrid fftshift(const ComplexGrid& g);
ComplexGrid ifftshift(const ComplexGrid& g);

}  // namespace holo::fft

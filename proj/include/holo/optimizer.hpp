// Gradient-descent CGH synthesis for binary amplitude SLMs.
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "holo/field.hpp"
#include "holo/optics.hpp"
#include "holo/targets.hpp"

namespace holo {

// Element-wise threshold at 0.5; values exactly at 0.5 quantize to 1.
RealGrid quantize_hard(const RealGrid& a);

struct RelaxedQuantization {
  RealGrid hard;       // straight-through binary forward
  RealGrid soft;       // differentiable relaxation (used by gradient checks)
  RealGrid surrogate;  // d(soft)/d(a), the straight-through gradient
};

// Two-class Gumbel-Softmax relaxation with tempered sampling: the class-1
// logit margin is 2a-1, the Gumbel noise difference is scaled by tau, so the
// hard sample distribution sharpens to the 0.5 threshold as tau -> 0.
RelaxedQuantization quantize_relaxed(const RealGrid& a, double tau, uint64_t seed);

// Baseline surrogate: hard threshold forward, unit gradient inside [0, 1].
RelaxedQuantization quantize_unit(const RealGrid& a);

// Closed-form least squares s = sum(recon*target) / sum(recon^2).
// A zero-energy reconstruction yields s = 1 with a warning on stderr.
double fit_scale(const std::vector<double>& recon, const std::vector<double>& target);

enum class SupervisionMode { mode_2p5d, mode_3d, mode_4d };

struct Supervision2p5D {
  std::vector<RealGrid> amplitude;  // per channel
  MaskSet masks;
};
struct Supervision3D {
  FocalStack stack;
};
struct Supervision4D {
  LightField lf;  // views at the STFT patch-grid resolution
  StftSpec stft;
};

struct SupervisionSpec {
  std::variant<Supervision2p5D, Supervision3D, Supervision4D> target;
  std::vector<PlaneDepth> planes;  // 2.5D / 3D only
  std::vector<double> scale;       // per channel; used when refit_scale is off
  bool refit_scale = true;

  SupervisionMode mode() const;
  int channels() const;
};

struct LossResult {
  double loss = 0;
  std::vector<RealGrid> grad;  // per frame, w.r.t. the real SLM pattern
  double scale = 1;            // s used for this evaluation
};

// Per-channel losses. `frames` holds the (quantized or relaxed) real SLM
// patterns of one channel; gradients flow through the amplitude, the time
// average, and the propagation adjoint back to those patterns.
LossResult loss_2p5d(const std::vector<RealGrid>& frames, const OpticalConfig& cfg, int channel,
                     const Supervision2p5D& target, const std::vector<PlaneDepth>& planes,
                     bool refit_scale = true, double scale = 1.0);
LossResult loss_3d(const std::vector<RealGrid>& frames, const OpticalConfig& cfg, int channel,
                   const Supervision3D& target, const std::vector<PlaneDepth>& planes,
                   bool refit_scale = true, double scale = 1.0);
LossResult loss_4d(const std::vector<RealGrid>& frames, const OpticalConfig& cfg, int channel,
                   const Supervision4D& target, bool refit_scale = true, double scale = 1.0);

LossResult supervision_loss(const std::vector<RealGrid>& frames, const OpticalConfig& cfg,
                            int channel, const SupervisionSpec& spec);

enum class Surrogate { gumbel, unit_gradient };

struct OptimizerConfig {
  double step_size = 0;  // 0 = pick by frame count (0.1 for T<8, 0.4 for T>=8)
  int iterations = 1000;
  double tau_start = 1.0, tau_decay = 0.999, tau_floor = 0.1;
  Surrogate surrogate = Surrogate::gumbel;
  uint64_t seed = 1;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;

  double effective_step(int frames) const;
  void validate() const;
};

struct SlmVariables {
  std::vector<RealGrid> logits;  // per frame
  double tau = 1.0;
  int iteration = 0;
};

struct TraceRow {
  int iteration = 0;
  double loss = 0;
  std::vector<double> scales;  // per channel
};

struct OptimizeResult {
  std::vector<SlmVariables> vars;         // per channel
  std::vector<FieldStack> binary_frames;  // per channel, exactly binary
  std::vector<TraceRow> trace;            // last row evaluates the emitted frames
  double initial_loss = 0;
  double final_loss = 0;
};

// Adam-driven descent with the chosen quantization surrogate. Deterministic
// under a fixed seed; aborts with an error if the loss turns non-finite.
OptimizeResult optimize(const OpticalConfig& cfg, const SupervisionSpec& spec,
                        const OptimizerConfig& opt);

}  // namespace holo

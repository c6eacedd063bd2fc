#include "holo/optimizer.hpp"

#include <cmath>
#include <cstdio>

#include "holo/random.hpp"

namespace holo {

RealGrid quantize_hard(const RealGrid& a) {
  RealGrid out(a.rows(), a.cols());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] >= 0.5 ? 1.0 : 0.0;
  return out;
}

RelaxedQuantization quantize_relaxed(const RealGrid& a, double tau, uint64_t seed) {
  if (!(tau > 0)) throw DomainError("quantize_relaxed: tau must be positive");
  RelaxedQuantization q{RealGrid(a.rows(), a.cols()), RealGrid(a.rows(), a.cols()),
                        RealGrid(a.rows(), a.cols())};
  std::mt19937_64 gen(seed);
  for (size_t i = 0; i < a.size(); ++i) {
    const double g1 = -std::log(-std::log(uniform_open(gen)));
    const double g0 = -std::log(-std::log(uniform_open(gen)));
    const double margin = 2.0 * a[i] - 1.0;  // class-1 vs class-0 logit gap
    const double soft = 1.0 / (1.0 + std::exp(-(margin + tau * (g1 - g0)) / tau));
    q.soft[i] = soft;
    q.hard[i] = soft >= 0.5 ? 1.0 : 0.0;
    q.surrogate[i] = 2.0 * soft * (1.0 - soft) / tau;
  }
  return q;
}

RelaxedQuantization quantize_unit(const RealGrid& a) {
  RelaxedQuantization q{RealGrid(a.rows(), a.cols()), RealGrid(a.rows(), a.cols()),
                        RealGrid(a.rows(), a.cols())};
  for (size_t i = 0; i < a.size(); ++i) {
    const double clipped = std::clamp(a[i], 0.0, 1.0);
    q.soft[i] = clipped;
    q.hard[i] = clipped >= 0.5 ? 1.0 : 0.0;
    q.surrogate[i] = (a[i] >= 0.0 && a[i] <= 1.0) ? 1.0 : 0.0;
  }
  return q;
}

double fit_scale(const std::vector<double>& recon, const std::vector<double>& target) {
  if (recon.size() != target.size()) throw DomainError("fit_scale: size mismatch");
  double num = 0, den = 0;
  for (size_t i = 0; i < recon.size(); ++i) {
    num += recon[i] * target[i];
    den += recon[i] * recon[i];
  }
  if (den == 0) {
    std::fprintf(stderr, "warning: fit_scale on zero-energy reconstruction, using s = 1\n");
    return 1.0;
  }
  return num / den;
}

SupervisionMode SupervisionSpec::mode() const {
  if (std::holds_alternative<Supervision2p5D>(target)) return SupervisionMode::mode_2p5d;
  if (std::holds_alternative<Supervision3D>(target)) return SupervisionMode::mode_3d;
  return SupervisionMode::mode_4d;
}

int SupervisionSpec::channels() const {
  if (const auto* t = std::get_if<Supervision2p5D>(&target))
    return static_cast<int>(t->amplitude.size());
  if (const auto* t = std::get_if<Supervision3D>(&target))
    return t->stack.slices.empty() ? 0 : static_cast<int>(t->stack.slices.front().size());
  return std::get<Supervision4D>(target).lf.channels();
}

namespace {

ComplexField make_slm_field(const RealGrid& pattern, const OpticalConfig& cfg, int channel) {
  ComplexGrid g(pattern.rows(), pattern.cols());
  for (size_t i = 0; i < pattern.size(); ++i) g[i] = pattern[i];
  return ComplexField(std::move(g), cfg.pixel_pitch, cfg.wavelengths[channel]);
}

// Shared 2.5D / 3D machinery: masked or plain MSE between the scaled
// time-averaged amplitude at each plane and the per-plane target. A null
// mask entry means "no mask" (3D supervision).
LossResult multiplane_loss(const std::vector<RealGrid>& frames, const OpticalConfig& cfg,
                           int channel, const std::vector<const RealGrid*>& masks,
                           const std::vector<const RealGrid*>& targets,
                           const std::vector<PlaneDepth>& planes, bool refit_scale, double scale) {
  const int T = static_cast<int>(frames.size());
  const int K = static_cast<int>(planes.size());
  if (T < 1) throw DomainError("loss: no frames");
  if (K < 1 || static_cast<int>(targets.size()) != K)
    throw DomainError("loss: plane/target count mismatch");
  const PropOptions prop{cfg.sideband, true};

  const int rows = frames.front().rows(), cols = frames.front().cols();
  for (const RealGrid* t : targets)
    if (t->rows() != rows || t->cols() != cols)
      throw DomainError("loss: target shape does not match the field");
  for (const RealGrid* m : masks)
    if (m && (m->rows() != rows || m->cols() != cols))
      throw DomainError("loss: mask shape does not match the field");

  // Pass 1: per-plane time-averaged amplitudes.
  std::vector<RealGrid> ampl(K);
  for (int k = 0; k < K; ++k) {
    RealGrid mean_sq(rows, cols, 0.0);
    for (int t = 0; t < T; ++t) {
      ComplexField u = propagate_asm(make_slm_field(frames[t], cfg, channel),
                                     planes[k].z_from_slm, prop);
      for (size_t i = 0; i < mean_sq.size(); ++i) mean_sq[i] += std::norm(u.grid[i]) / T;
    }
    ampl[k] = RealGrid(rows, cols);
    for (size_t i = 0; i < mean_sq.size(); ++i) ampl[k][i] = std::sqrt(mean_sq[i]);
  }

  double s = scale;
  if (refit_scale) {
    std::vector<double> rv, tv;
    for (int k = 0; k < K; ++k)
      for (size_t i = 0; i < ampl[k].size(); ++i) {
        const double m = masks[k] ? (*masks[k])[i] : 1.0;
        if (m != 0.0) {
          rv.push_back(ampl[k][i]);
          tv.push_back((*targets[k])[i]);
        }
      }
    s = fit_scale(rv, tv);
  }

  const double npx = static_cast<double>(rows) * cols;
  LossResult result;
  result.scale = s;
  std::vector<RealGrid> residual(K);  // m * (s*A - a_target)
  for (int k = 0; k < K; ++k) {
    residual[k] = RealGrid(rows, cols);
    for (size_t i = 0; i < residual[k].size(); ++i) {
      const double m = masks[k] ? (*masks[k])[i] : 1.0;
      const double r = m * (s * ampl[k][i] - (*targets[k])[i]);
      residual[k][i] = r;
      result.loss += r * r / (npx * K);
    }
  }

  // Pass 2: adjoint chain. d(loss)/d(A_k) = 2 s residual / (npx K); through
  // A = sqrt(mean_t |u|^2) each frame receives the cotangent
  // dA * u / (T A), then propagates back with the conjugate kernel.
  result.grad.assign(T, RealGrid(rows, cols, 0.0));
  for (int k = 0; k < K; ++k) {
    std::vector<ComplexField> u_t(T);
    for (int t = 0; t < T; ++t)
      u_t[t] = propagate_asm(make_slm_field(frames[t], cfg, channel), planes[k].z_from_slm, prop);
    for (int t = 0; t < T; ++t) {
      ComplexField cot = u_t[t];
      for (size_t i = 0; i < cot.grid.size(); ++i) {
        const double a = ampl[k][i];
        if (a == 0.0) {
          cot.grid[i] = 0;
          continue;
        }
        const double da = 2.0 * s * residual[k][i] * (masks[k] ? (*masks[k])[i] : 1.0) / (npx * K);
        cot.grid[i] = da * u_t[t].grid[i] / (T * a);
      }
      ComplexField back = propagate_adjoint(cot, planes[k].z_from_slm, prop);
      for (size_t i = 0; i < back.grid.size(); ++i) result.grad[t][i] += back.grid[i].real();
    }
  }
  return result;
}

}  // namespace

LossResult loss_2p5d(const std::vector<RealGrid>& frames, const OpticalConfig& cfg, int channel,
                     const Supervision2p5D& target, const std::vector<PlaneDepth>& planes,
                     bool refit_scale, double scale) {
  if (target.masks.masks.size() != planes.size())
    throw DomainError("loss_2p5d: mask/plane count mismatch");
  std::vector<const RealGrid*> masks, targets;
  for (size_t k = 0; k < planes.size(); ++k) {
    masks.push_back(&target.masks.masks[k]);
    targets.push_back(&target.amplitude.at(channel));
  }
  return multiplane_loss(frames, cfg, channel, masks, targets, planes, refit_scale, scale);
}

LossResult loss_3d(const std::vector<RealGrid>& frames, const OpticalConfig& cfg, int channel,
                   const Supervision3D& target, const std::vector<PlaneDepth>& planes,
                   bool refit_scale, double scale) {
  if (target.stack.slices.size() != planes.size())
    throw DomainError("loss_3d: focal stack slice/plane count mismatch");
  std::vector<const RealGrid*> masks(planes.size(), nullptr), targets;
  for (size_t k = 0; k < planes.size(); ++k)
    targets.push_back(&target.stack.slices[k].at(channel));
  return multiplane_loss(frames, cfg, channel, masks, targets, planes, refit_scale, scale);
}

LossResult loss_4d(const std::vector<RealGrid>& frames, const OpticalConfig& cfg, int channel,
                   const Supervision4D& target, bool refit_scale, double scale) {
  const int T = static_cast<int>(frames.size());
  if (T < 1) throw DomainError("loss_4d: no frames");
  const int rows = frames.front().rows(), cols = frames.front().cols();
  const PropOptions prop{cfg.sideband, true};
  StftPlan plan(rows, cols, cfg.pixel_pitch, cfg.pixel_pitch, target.stft, cfg.sideband);

  if (target.lf.view_rows != target.stft.view_rows ||
      target.lf.view_cols != target.stft.view_cols)
    throw DomainError("loss_4d: target view grid does not match the STFT view grid");
  const int V = plan.view_count();
  for (const auto& v : target.lf.views)
    if (v.at(channel).rows() != plan.patch_rows() || v.at(channel).cols() != plan.patch_cols())
      throw DomainError("loss_4d: target views must be at the STFT patch-grid resolution");

  // Forward: per-frame STFT coefficients and the time-averaged amplitude.
  std::vector<std::vector<ComplexGrid>> coeffs(T);
  for (int t = 0; t < T; ++t) {
    ComplexField u =
        propagate_asm(make_slm_field(frames[t], cfg, channel), cfg.wrp_distance, prop);
    coeffs[t] = plan.forward(u.grid);
  }
  std::vector<RealGrid> ampl(V, RealGrid(plan.patch_rows(), plan.patch_cols(), 0.0));
  for (int v = 0; v < V; ++v) {
    for (int t = 0; t < T; ++t)
      for (size_t i = 0; i < ampl[v].size(); ++i) ampl[v][i] += std::norm(coeffs[t][v][i]) / T;
    for (auto& x : ampl[v]) x = std::sqrt(x);
  }

  double s = scale;
  if (refit_scale) {
    std::vector<double> rv, tv;
    for (int v = 0; v < V; ++v)
      for (size_t i = 0; i < ampl[v].size(); ++i) {
        rv.push_back(ampl[v][i]);
        tv.push_back(target.lf.views[v].at(channel)[i]);
      }
    s = fit_scale(rv, tv);
  }

  const double n = static_cast<double>(V) * plan.patch_rows() * plan.patch_cols();
  LossResult result;
  result.scale = s;
  std::vector<RealGrid> residual(V, RealGrid(plan.patch_rows(), plan.patch_cols()));
  for (int v = 0; v < V; ++v)
    for (size_t i = 0; i < residual[v].size(); ++i) {
      const double r = s * ampl[v][i] - target.lf.views[v].at(channel)[i];
      residual[v][i] = r;
      result.loss += r * r / n;
    }

  result.grad.assign(T, RealGrid(rows, cols, 0.0));
  for (int t = 0; t < T; ++t) {
    std::vector<ComplexGrid> cot(V, ComplexGrid(plan.patch_rows(), plan.patch_cols()));
    for (int v = 0; v < V; ++v)
      for (size_t i = 0; i < cot[v].size(); ++i) {
        const double a = ampl[v][i];
        if (a == 0.0) continue;
        cot[v][i] = 2.0 * s * residual[v][i] / n * coeffs[t][v][i] / (T * a);
      }
    ComplexField back(plan.adjoint(cot), cfg.pixel_pitch, cfg.wavelengths[channel]);
    back = propagate_adjoint(back, cfg.wrp_distance, prop);
    for (size_t i = 0; i < back.grid.size(); ++i) result.grad[t][i] += back.grid[i].real();
  }
  return result;
}

LossResult supervision_loss(const std::vector<RealGrid>& frames, const OpticalConfig& cfg,
                            int channel, const SupervisionSpec& spec) {
  const double s = spec.scale.empty() ? 1.0 : spec.scale.at(channel);
  switch (spec.mode()) {
    case SupervisionMode::mode_2p5d:
      return loss_2p5d(frames, cfg, channel, std::get<Supervision2p5D>(spec.target), spec.planes,
                       spec.refit_scale, s);
    case SupervisionMode::mode_3d:
      return loss_3d(frames, cfg, channel, std::get<Supervision3D>(spec.target), spec.planes,
                     spec.refit_scale, s);
    case SupervisionMode::mode_4d:
      return loss_4d(frames, cfg, channel, std::get<Supervision4D>(spec.target), spec.refit_scale,
                     s);
  }
  throw DomainError("supervision_loss: bad mode");
}

double OptimizerConfig::effective_step(int frames) const {
  if (step_size > 0) return step_size;
  return frames >= 8 ? 0.4 : 0.1;
}

void OptimizerConfig::validate() const {
  if (step_size < 0) throw DomainError("optimizer: negative step size");
  if (iterations < 1) throw DomainError("optimizer: iterations must be >= 1");
  if (!(tau_start > 0) || !(tau_floor > 0) || !(tau_decay > 0) || tau_decay > 1)
    throw DomainError("optimizer: bad temperature schedule");
}

OptimizeResult optimize(const OpticalConfig& cfg, const SupervisionSpec& spec,
                        const OptimizerConfig& opt) {
  cfg.validate();
  opt.validate();
  const int C = spec.channels();
  if (C < 1 || C > static_cast<int>(cfg.wavelengths.size()))
    throw DomainError("optimize: supervision channels do not match the config wavelengths");
  const int T = cfg.num_frames;
  const int rows = cfg.slm_rows, cols = cfg.slm_cols;
  const double alpha = opt.effective_step(T);

  OptimizeResult result;
  result.vars.resize(C);
  std::vector<std::vector<RealGrid>> m1(C), m2(C);
  for (int c = 0; c < C; ++c) {
    result.vars[c].logits.resize(T);
    m1[c].assign(T, RealGrid(rows, cols, 0.0));
    m2[c].assign(T, RealGrid(rows, cols, 0.0));
    for (int t = 0; t < T; ++t) {
      RealGrid init(rows, cols);
      std::mt19937_64 gen(derive_seed(opt.seed, 0x1417, c, t));
      for (auto& v : init) v = uniform_open(gen);
      result.vars[c].logits[t] = std::move(init);
    }
  }

  SupervisionSpec work = spec;
  if (work.scale.size() != static_cast<size_t>(C)) work.scale.assign(C, 1.0);

  for (int k = 1; k <= opt.iterations; ++k) {
    const double tau = std::max(opt.tau_floor, opt.tau_start * std::pow(opt.tau_decay, k - 1));
    TraceRow row;
    row.iteration = k;
    for (int c = 0; c < C; ++c) {
      std::vector<RelaxedQuantization> rq(T);
      std::vector<RealGrid> frames(T);
      for (int t = 0; t < T; ++t) {
        rq[t] = opt.surrogate == Surrogate::gumbel
                    ? quantize_relaxed(result.vars[c].logits[t], tau,
                                       derive_seed(opt.seed, k, c, t))
                    : quantize_unit(result.vars[c].logits[t]);
        frames[t] = rq[t].hard;
      }
      LossResult lr = supervision_loss(frames, cfg, c, work);
      row.loss += lr.loss / C;
      row.scales.push_back(lr.scale);
      work.scale[c] = lr.scale;

      const double bc1 = 1.0 - std::pow(opt.beta1, k);
      const double bc2 = 1.0 - std::pow(opt.beta2, k);
      for (int t = 0; t < T; ++t) {
        RealGrid& a = result.vars[c].logits[t];
        for (size_t i = 0; i < a.size(); ++i) {
          const double g = lr.grad[t][i] * rq[t].surrogate[i];
          m1[c][t][i] = opt.beta1 * m1[c][t][i] + (1.0 - opt.beta1) * g;
          m2[c][t][i] = opt.beta2 * m2[c][t][i] + (1.0 - opt.beta2) * g * g;
          a[i] -= alpha * (m1[c][t][i] / bc1) / (std::sqrt(m2[c][t][i] / bc2) + opt.epsilon);
        }
      }
      result.vars[c].tau = tau;
      result.vars[c].iteration = k;
    }
    if (!std::isfinite(row.loss))
      throw Error("optimize: loss became non-finite at iteration " + std::to_string(k));
    if (k == 1) result.initial_loss = row.loss;
    result.trace.push_back(std::move(row));
  }

  // Emit deterministic hard-thresholded frames and evaluate them.
  TraceRow final_row;
  final_row.iteration = opt.iterations + 1;
  result.binary_frames.resize(C);
  for (int c = 0; c < C; ++c) {
    std::vector<RealGrid> frames(T);
    FieldStack stack;
    for (int t = 0; t < T; ++t) {
      frames[t] = quantize_hard(result.vars[c].logits[t]);
      ComplexGrid g(rows, cols);
      for (size_t i = 0; i < frames[t].size(); ++i) g[i] = frames[t][i];
      stack.frames.emplace_back(std::move(g), cfg.pixel_pitch, cfg.wavelengths[c]);
    }
    result.binary_frames[c] = std::move(stack);
    LossResult lr = supervision_loss(frames, cfg, c, work);
    final_row.loss += lr.loss / C;
    final_row.scales.push_back(lr.scale);
  }
  result.final_loss = final_row.loss;
  result.trace.push_back(std::move(final_row));
  return result;
}

}  // namespace holo

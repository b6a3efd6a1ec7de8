// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_ESTIMATOR_HPP
#define ECHOMARK_ESTIMATOR_HPP

#include <cstdint>
#include <vector>

#include "echomark/objective.hpp"
#include "echomark/rir_model.hpp"
#include "echomark/waveform.hpp"

namespace echomark {

enum class GradMode { kFiniteDifference, kAnalytic };

struct FitOptions {
  int max_iters = 2000;
  double step_size = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;
  // Early taps and amplitudes always get analytic gradients through the
  // linear render path; grad_mode selects how the decay logits are handled.
  GradMode grad_mode = GradMode::kFiniteDifference;
  double fd_step = 1e-4;
  double alpha = 1.0;  // watermark-loss weight, echoed into reports
  double stop_tol = 1e-6;
  int stagnation_iters = 200;
  uint64_t rng_seed = 0;
  std::vector<StftConfig> resolutions = default_resolutions();
};

struct FitResult {
  ParametricRir params;
  std::vector<double> loss_trace;
  bool converged = false;
  int iters_used = 0;
  double final_loss = 0.0;
};

// Bias-corrected first/second-moment update (decoupled weight decay,
// zero by default).
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

void adam_step(AdamState& state, const std::vector<double>& grads,
               std::vector<double>& params, const FitOptions& opts);

// Fits the parametric RIR to a target impulse response by minimizing the
// combined spectral + decay-curve loss.
FitResult fit_to_rir(const Waveform& target_h, const ParametricRir& init,
                     const FitOptions& opts = {});

// Informed estimation from reverberant audio y ~ x * h + w: matches the
// spectrogram of x * render(params) to y's, with the decay-curve term
// anchored on the regularized deconvolution estimate of h.
FitResult fit_from_reverberant(const Waveform& y, const Waveform& x,
                               const ParametricRir& init,
                               const FitOptions& opts = {});

// H = Y conj(X) / (|X|^2 + reg max|X|^2), inverse-transformed and truncated
// to the RIR support (default: len(y) - len(x) + 1).
Waveform informed_deconvolve(const Waveform& y, const Waveform& x,
                             double reg = 1e-3, size_t support_len = 0);

// Flattened objective/gradient hook for diagnostics: parameter order is
// [early taps | amplitudes row-major | decay logits]. The gradient follows
// opts.grad_mode, exactly as the fit uses it.
double fit_objective(const Waveform& target_h, const ParametricRir& params,
                     const FitOptions& opts, std::vector<double>* grad);

}  // namespace echomark

#endif  // ECHOMARK_ESTIMATOR_HPP

// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOMARK_OBJECTIVE_HPP
#define ECHOMARK_OBJECTIVE_HPP

#include <vector>

#include "echomark/stft.hpp"
#include "echomark/waveform.hpp"

namespace echomark {

// (fft, window, hop) triples for the multi-resolution spectral loss.
std::vector<StftConfig> default_resolutions();

struct LossReport {
  double sc = 0.0;          // spectral convergence, summed over resolutions
  double sm = 0.0;          // log-magnitude, summed over resolutions
  double stft_total = 0.0;  // sc + sm
  double edc = 0.0;
  double wm = 0.0;
  double alpha = 1.0;
  double total = 0.0;       // stft_total + edc + alpha * wm
};

LossReport make_loss_report(double sc, double sm, double edc, double wm,
                            double alpha = 1.0);

// Frobenius-norm ratio of the magnitude error to the reference magnitude.
double loss_sc(const Waveform& h_hat, const Waveform& h,
               const StftConfig& cfg);

// Mean absolute log-magnitude ratio over the T*F bins of one resolution;
// magnitudes floored at 1e-7 before the log.
double loss_sm(const Waveform& h_hat, const Waveform& h,
               const StftConfig& cfg);

double loss_mrstft(const Waveform& h_hat, const Waveform& h,
                   const std::vector<StftConfig>& resolutions);

// Mean absolute difference of log energy-decay curves (floor 1e-10).
double loss_edc(const Waveform& h_hat, const Waveform& h);

// Mean over the M+1 entries of max(0, 1 - y * y_hat).
double loss_hinge(const std::vector<double>& labels,
                  const std::vector<double>& scores);

// --- gradient-enabled path used by the estimator ---------------------------

// Caches everything about the fixed target (per-resolution magnitudes and
// the log-EDC) so repeated loss evaluations against it are cheap.
class RirLossTarget {
 public:
  RirLossTarget(const Waveform& target,
                const std::vector<StftConfig>& resolutions,
                bool include_edc = true);

  // L_RIR(h_hat, target) = sum_r (L_SC + L_SM) + L_EDC. h_hat is padded or
  // truncated to the conformed length internally.
  double loss(const double* h_hat, size_t len) const;
  double loss(const double* h_hat, size_t len, LossReport* report) const;

  // Same, also accumulating dL/dh_hat into grad (len entries, overwritten).
  double loss_grad(const double* h_hat, size_t len, double* grad) const;

  size_t conformed_len() const { return len_; }

 private:
  struct Resolution {
    StftConfig cfg;
    std::vector<double> target_mag;
    size_t num_frames = 0;
    size_t num_bins = 0;
    double target_frob = 0.0;
  };

  double eval(const double* h_hat, size_t len, double* grad,
              LossReport* report) const;

  size_t len_ = 0;
  bool include_edc_ = true;
  std::vector<Resolution> resolutions_;
  std::vector<double> target_log_edc_;
};

}  // namespace echomark

#endif  // ECHOMARK_OBJECTIVE_HPP

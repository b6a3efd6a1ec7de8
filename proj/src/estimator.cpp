// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "echomark/fft.hpp"
#include "echomark/signal_ops.hpp"

namespace echomark {

namespace {

// exp(-lambda t / fs) for t = 0..len-1, multiplicative recurrence with a
// periodic exact refresh to stop rounding drift.
void fill_decay(double lambda, size_t len, double* out) {
  const double rho = std::exp(-lambda / kCanonicalRateHz);
  double cur = 1.0;
  for (size_t t = 0; t < len; ++t) {
    if ((t & 1023u) == 0)
      cur = std::exp(-lambda * static_cast<double>(t) / kCanonicalRateHz);
    out[t] = cur;
    cur *= rho;
  }
}

struct ParamLayout {
  int nb = 0;
  int nd = 0;
  size_t n_amp() const { return static_cast<size_t>(nb) * nd; }
  size_t amp_off() const { return kEarlyLenSamples; }
  size_t logit_off() const { return kEarlyLenSamples + n_amp(); }
  size_t total() const { return logit_off() + nd; }
};

std::vector<double> pack_params(const ParametricRir& r,
                                const ParamLayout& lay) {
  std::vector<double> p(lay.total());
  std::copy(r.early.taps.begin(), r.early.taps.end(), p.begin());
  std::copy(r.late.amplitudes.begin(), r.late.amplitudes.end(),
            p.begin() + lay.amp_off());
  std::copy(r.late.decay_logits.begin(), r.late.decay_logits.end(),
            p.begin() + lay.logit_off());
  return p;
}

ParametricRir unpack_params(const std::vector<double>& p,
                            const ParametricRir& proto,
                            const ParamLayout& lay) {
  ParametricRir r = proto;
  r.early.taps.assign(p.begin(), p.begin() + kEarlyLenSamples);
  r.late.amplitudes.assign(p.begin() + lay.amp_off(),
                           p.begin() + lay.amp_off() + lay.n_amp());
  r.late.decay_logits.assign(p.begin() + lay.logit_off(),
                             p.begin() + lay.logit_off() + lay.nd);
  return r;
}

// Objective shared by fit_to_rir (direct) and fit_from_reverberant
// (spectral match through convolution with the known source, decay anchor
// on the deconvolution estimate).
class FitEngine {
 public:
  FitEngine(const Waveform& target, const ParametricRir& init,
            const FitOptions& opts)
      : opts_(opts), proto_(init) {
    init.late.validate();
    lay_.nb = init.late.num_bands;
    lay_.nd = init.late.num_decays;
    late_len_ = init.late.length_samples();
    render_len_ = kEarlyLenSamples + late_len_;
    band_noise_ = make_band_noise(init.late);

    Waveform t = target;
    t.samples.resize(std::max(target.size(), render_len_), 0.0);
    direct_ = std::make_unique<RirLossTarget>(t, opts.resolutions, true);
  }

  FitEngine(const Waveform& y, const Waveform& x, const ParametricRir& init,
            const FitOptions& opts)
      : opts_(opts), proto_(init) {
    init.late.validate();
    lay_.nb = init.late.num_bands;
    lay_.nd = init.late.num_decays;
    late_len_ = init.late.length_samples();
    render_len_ = kEarlyLenSamples + late_len_;
    band_noise_ = make_band_noise(init.late);

    y_len_ = y.size();
    x_len_ = x.size();
    audio_ = std::make_unique<RirLossTarget>(y, opts.resolutions, false);

    conv_nfft_ = fft::next_pow2(x_len_ + render_len_);
    std::vector<double> buf(conv_nfft_, 0.0);
    std::copy(x.samples.begin(), x.samples.end(), buf.begin());
    x_fft_.resize(conv_nfft_ / 2 + 1);
    fft::rfft(buf.data(), conv_nfft_, x_fft_.data());

    Waveform h_dec = informed_deconvolve(y, x, 1e-3, render_len_);
    h_dec.samples.resize(render_len_, 0.0);
    edc_anchor_ = std::make_unique<RirLossTarget>(
        h_dec, std::vector<StftConfig>{}, true);
  }

  const ParamLayout& layout() const { return lay_; }

  // Loss and (optionally) gradient in packed parameter order.
  double eval(const std::vector<double>& p, std::vector<double>* grad) {
    refresh_state(p);
    synth(h_);

    double loss;
    if (!grad) {
      loss = forward_loss(h_);
    } else {
      grad->assign(lay_.total(), 0.0);
      g_h_.assign(render_len_, 0.0);
      loss = loss_and_waveform_grad(h_, &g_h_);

      // Early taps pass straight through.
      std::copy(g_h_.begin(), g_h_.begin() + kEarlyLenSamples, grad->begin());

      // dL/dA[m][n] = sum_t gLate(t) E_n(t) w_m(t).
      const double* g_late = g_h_.data() + kEarlyLenSamples;
      std::vector<double> ge(late_len_);
      for (int n = 0; n < lay_.nd; ++n) {
        const double* e = decay_.data() + static_cast<size_t>(n) * late_len_;
        for (size_t t = 0; t < late_len_; ++t) ge[t] = g_late[t] * e[t];
        for (int m = 0; m < lay_.nb; ++m) {
          const double* w = band_noise_[m].data();
          double acc = 0.0;
          for (size_t t = 0; t < late_len_; ++t) acc += ge[t] * w[t];
          (*grad)[lay_.amp_off() + static_cast<size_t>(m) * lay_.nd + n] = acc;
        }
      }

      if (opts_.grad_mode == GradMode::kAnalytic) {
        for (int n = 0; n < lay_.nd; ++n) {
          const double theta = p[lay_.logit_off() + n];
          const double lambda = lambda_of_logit(theta, proto_.late.tau_s);
          const double dlam_dtheta = -lambda * (1.0 - sigmoid(theta));
          const double* e = decay_.data() + static_cast<size_t>(n) * late_len_;
          const double* c = mix_.data() + static_cast<size_t>(n) * late_len_;
          double acc = 0.0;
          for (size_t t = 0; t < late_len_; ++t) {
            double de_dtheta = -(static_cast<double>(t) / kCanonicalRateHz) *
                               e[t] * dlam_dtheta;
            acc += g_late[t] * c[t] * de_dtheta;
          }
          (*grad)[lay_.logit_off() + n] = acc;
        }
      } else {
        // Central differences on the decay logits; only the perturbed
        // decay column of the late field is re-synthesized.
        std::vector<double> e_pert(late_len_);
        std::vector<double> h_pert(render_len_);
        for (int n = 0; n < lay_.nd; ++n) {
          const double theta = p[lay_.logit_off() + n];
          double l_plus, l_minus;
          for (int s = 0; s < 2; ++s) {
            const double th = theta + (s == 0 ? opts_.fd_step : -opts_.fd_step);
            fill_decay(lambda_of_logit(th, proto_.late.tau_s), late_len_,
                       e_pert.data());
            const double* e =
                decay_.data() + static_cast<size_t>(n) * late_len_;
            const double* c = mix_.data() + static_cast<size_t>(n) * late_len_;
            std::copy(h_.begin(), h_.end(), h_pert.begin());
            double* hp = h_pert.data() + kEarlyLenSamples;
            for (size_t t = 0; t < late_len_; ++t)
              hp[t] += c[t] * (e_pert[t] - e[t]);
            (s == 0 ? l_plus : l_minus) = forward_loss(h_pert);
          }
          (*grad)[lay_.logit_off() + n] =
              (l_plus - l_minus) / (2.0 * opts_.fd_step);
        }
      }
    }
    return loss;
  }

 private:
  void refresh_state(const std::vector<double>& p) {
    decay_.resize(static_cast<size_t>(lay_.nd) * late_len_);
    mix_.resize(static_cast<size_t>(lay_.nd) * late_len_);
    h_.resize(render_len_);
    for (int n = 0; n < lay_.nd; ++n) {
      fill_decay(
          lambda_of_logit(p[lay_.logit_off() + n], proto_.late.tau_s),
          late_len_, decay_.data() + static_cast<size_t>(n) * late_len_);
      double* c = mix_.data() + static_cast<size_t>(n) * late_len_;
      std::fill(c, c + late_len_, 0.0);
      for (int m = 0; m < lay_.nb; ++m) {
        const double a = p[lay_.amp_off() + static_cast<size_t>(m) * lay_.nd + n];
        if (a == 0.0) continue;
        const double* w = band_noise_[m].data();
        for (size_t t = 0; t < late_len_; ++t) c[t] += a * w[t];
      }
    }
    early_ = p.data();  // first kEarlyLenSamples entries
  }

  void synth(std::vector<double>& h) const {
    h.assign(render_len_, 0.0);
    std::copy(early_, early_ + kEarlyLenSamples, h.begin());
    double* late = h.data() + kEarlyLenSamples;
    for (int n = 0; n < lay_.nd; ++n) {
      const double* e = decay_.data() + static_cast<size_t>(n) * late_len_;
      const double* c = mix_.data() + static_cast<size_t>(n) * late_len_;
      for (size_t t = 0; t < late_len_; ++t) late[t] += e[t] * c[t];
    }
  }

  double forward_loss(const std::vector<double>& h) {
    if (direct_) return direct_->loss(h.data(), h.size());
    conv_forward(h);
    double l = audio_->loss(yhat_.data(), yhat_.size());
    l += edc_anchor_->loss(h.data(), h.size());
    return l;
  }

  double loss_and_waveform_grad(const std::vector<double>& h,
                                std::vector<double>* g_h) {
    if (direct_) return direct_->loss_grad(h.data(), h.size(), g_h->data());

    conv_forward(h);
    g_y_.assign(y_len_, 0.0);
    double l = audio_->loss_grad(yhat_.data(), yhat_.size(), g_y_.data());

    // Correlation adjoint of the convolution: dL/dh = corr(x, dL/dyhat).
    std::vector<double> buf(conv_nfft_, 0.0);
    std::copy(g_y_.begin(), g_y_.end(), buf.begin());
    std::vector<std::complex<double>> gf(conv_nfft_ / 2 + 1);
    fft::rfft(buf.data(), conv_nfft_, gf.data());
    for (size_t i = 0; i < gf.size(); ++i) gf[i] *= std::conj(x_fft_[i]);
    fft::irfft(gf.data(), conv_nfft_, buf.data());
    std::copy(buf.begin(), buf.begin() + render_len_, g_h->begin());

    std::vector<double> g_edc(render_len_, 0.0);
    l += edc_anchor_->loss_grad(h.data(), h.size(), g_edc.data());
    for (size_t i = 0; i < render_len_; ++i) (*g_h)[i] += g_edc[i];
    return l;
  }

  void conv_forward(const std::vector<double>& h) {
    std::vector<double> buf(conv_nfft_, 0.0);
    std::copy(h.begin(), h.end(), buf.begin());
    std::vector<std::complex<double>> hf(conv_nfft_ / 2 + 1);
    fft::rfft(buf.data(), conv_nfft_, hf.data());
    for (size_t i = 0; i < hf.size(); ++i) hf[i] *= x_fft_[i];
    fft::irfft(hf.data(), conv_nfft_, buf.data());
    yhat_.assign(buf.begin(), buf.begin() + y_len_);
  }

  FitOptions opts_;
  ParametricRir proto_;
  ParamLayout lay_;
  size_t late_len_ = 0;
  size_t render_len_ = 0;
  std::vector<std::vector<double>> band_noise_;

  std::unique_ptr<RirLossTarget> direct_;

  std::unique_ptr<RirLossTarget> audio_;
  std::unique_ptr<RirLossTarget> edc_anchor_;
  std::vector<std::complex<double>> x_fft_;
  size_t conv_nfft_ = 0, x_len_ = 0, y_len_ = 0;

  const double* early_ = nullptr;
  std::vector<double> decay_;  // nd x late_len
  std::vector<double> mix_;    // nd x late_len (amplitude-weighted noise)
  std::vector<double> h_;
  std::vector<double> g_h_;
  std::vector<double> g_y_;
  std::vector<double> yhat_;
};

FitResult run_fit(FitEngine& eng, const ParametricRir& init,
                  const FitOptions& opts) {
  if (opts.max_iters <= 0)
    throw InputError("fit: max_iters must be positive");
  if (!(opts.step_size > 0.0))
    throw InputError("fit: step_size must be positive");

  const ParamLayout& lay = eng.layout();
  std::vector<double> p = pack_params(init, lay);
  std::vector<double> grad;
  AdamState state;
  state.m.assign(lay.total(), 0.0);
  state.v.assign(lay.total(), 0.0);

  FitResult res;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_p = p;
  int last_improve = 0;
  bool converged = true;

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    double loss = eng.eval(p, &grad);
    if (!std::isfinite(loss))
      throw ConvergenceError("fit: non-finite loss at iteration " +
                             std::to_string(it));
    res.loss_trace.push_back(loss);
    if (loss < best) {
      best = loss;
      best_p = p;
      last_improve = it;
    }
    if (best <= opts.stop_tol) {
      ++it;
      break;
    }
    if (it - last_improve >= opts.stagnation_iters) {
      converged = false;
      ++it;
      break;
    }
    adam_step(state, grad, p, opts);
    // Amplitudes are constrained nonnegative: project after each step.
    for (size_t i = lay.amp_off(); i < lay.logit_off(); ++i)
      p[i] = std::max(p[i], 0.0);
  }

  if (res.loss_trace.empty() || res.loss_trace.back() != best)
    res.loss_trace.push_back(best);
  res.params = unpack_params(best_p, init, lay);
  res.converged = converged;
  res.iters_used = it;
  res.final_loss = best;
  return res;
}

}  // namespace

void adam_step(AdamState& state, const std::vector<double>& grads,
               std::vector<double>& params, const FitOptions& opts) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw InputError("adam_step: state/gradient/parameter size mismatch");
  state.step += 1;
  const double b1 = opts.adam_beta1, b2 = opts.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= opts.step_size * mhat / (std::sqrt(vhat) + opts.adam_eps);
    if (opts.weight_decay != 0.0)
      params[i] -= opts.step_size * opts.weight_decay * params[i];
  }
}

FitResult fit_to_rir(const Waveform& target_h, const ParametricRir& init,
                     const FitOptions& opts) {
  target_h.validate("fit_to_rir: target");
  if (target_h.sample_rate_hz != kCanonicalRateHz)
    throw InputError("fit_to_rir: canonical rate required");
  if (energy(target_h) <= 0.0)
    throw InputError("fit_to_rir: zero-energy target");
  FitEngine eng(target_h, init, opts);
  return run_fit(eng, init, opts);
}

FitResult fit_from_reverberant(const Waveform& y, const Waveform& x,
                               const ParametricRir& init,
                               const FitOptions& opts) {
  y.validate("fit_from_reverberant: y");
  x.validate("fit_from_reverberant: x");
  if (y.sample_rate_hz != kCanonicalRateHz ||
      x.sample_rate_hz != kCanonicalRateHz)
    throw InputError("fit_from_reverberant: canonical rate required");
  if (y.size() < x.size())
    throw InputError("fit_from_reverberant: y must be at least as long as x");
  FitEngine eng(y, x, init, opts);
  return run_fit(eng, init, opts);
}

Waveform informed_deconvolve(const Waveform& y, const Waveform& x, double reg,
                             size_t support_len) {
  y.validate("informed_deconvolve: y");
  x.validate("informed_deconvolve: x");
  if (y.sample_rate_hz != x.sample_rate_hz)
    throw InputError("informed_deconvolve: sample rate mismatch");
  if (energy(x) <= 0.0)
    throw InputError("informed_deconvolve: zero source");
  if (support_len == 0) {
    if (y.size() < x.size())
      throw InputError("informed_deconvolve: y shorter than x");
    support_len = y.size() - x.size() + 1;
  }

  const size_t nfft = fft::next_pow2(y.size() + support_len);
  std::vector<double> buf(nfft, 0.0);
  std::copy(y.samples.begin(), y.samples.end(), buf.begin());
  std::vector<std::complex<double>> yf(nfft / 2 + 1);
  fft::rfft(buf.data(), nfft, yf.data());

  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(x.samples.begin(), x.samples.end(), buf.begin());
  std::vector<std::complex<double>> xf(nfft / 2 + 1);
  fft::rfft(buf.data(), nfft, xf.data());

  double max2 = 0.0;
  for (const auto& v : xf) max2 = std::max(max2, std::norm(v));
  const double delta = reg * max2;

  for (size_t i = 0; i < yf.size(); ++i)
    yf[i] = yf[i] * std::conj(xf[i]) / (std::norm(xf[i]) + delta);
  fft::irfft(yf.data(), nfft, buf.data());

  Waveform out;
  out.sample_rate_hz = y.sample_rate_hz;
  out.samples.assign(buf.begin(), buf.begin() + support_len);
  return out;
}

double fit_objective(const Waveform& target_h, const ParametricRir& params,
                     const FitOptions& opts, std::vector<double>* grad) {
  FitEngine eng(target_h, params, opts);
  std::vector<double> p = pack_params(params, eng.layout());
  return eng.eval(p, grad);
}

}  // namespace echomark

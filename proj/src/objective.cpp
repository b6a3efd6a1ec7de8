// Copyright 2026 The EchoMark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "echomark/objective.hpp"

#include <algorithm>
#include <cmath>

namespace echomark {

namespace {
constexpr double kMagFloor = 1e-7;
constexpr double kEdcFloor = 1e-10;

Waveform conform(const Waveform& w, size_t len) {
  Waveform out = w;
  out.samples.resize(len, 0.0);
  return out;
}
}  // namespace

std::vector<StftConfig> default_resolutions() {
  return {
      {240, 50, 512, WindowKind::kHann},
      {600, 120, 1024, WindowKind::kHann},
      {1200, 240, 2048, WindowKind::kHann},
  };
}

LossReport make_loss_report(double sc, double sm, double edc, double wm,
                            double alpha) {
  LossReport r;
  r.sc = sc;
  r.sm = sm;
  r.stft_total = sc + sm;
  r.edc = edc;
  r.wm = wm;
  r.alpha = alpha;
  r.total = r.stft_total + edc + alpha * wm;
  return r;
}

double loss_sc(const Waveform& h_hat, const Waveform& h,
               const StftConfig& cfg) {
  const size_t len = std::max(h_hat.size(), h.size());
  RirLossTarget t(conform(h, len), {cfg}, /*include_edc=*/false);
  Waveform a = conform(h_hat, len);
  LossReport rep;
  t.loss(a.samples.data(), len, &rep);
  return rep.sc;
}

double loss_sm(const Waveform& h_hat, const Waveform& h,
               const StftConfig& cfg) {
  const size_t len = std::max(h_hat.size(), h.size());
  RirLossTarget t(conform(h, len), {cfg}, /*include_edc=*/false);
  Waveform a = conform(h_hat, len);
  LossReport rep;
  t.loss(a.samples.data(), len, &rep);
  return rep.sm;
}

double loss_mrstft(const Waveform& h_hat, const Waveform& h,
                   const std::vector<StftConfig>& resolutions) {
  const size_t len = std::max(h_hat.size(), h.size());
  RirLossTarget t(conform(h, len), resolutions, /*include_edc=*/false);
  Waveform a = conform(h_hat, len);
  LossReport rep;
  t.loss(a.samples.data(), len, &rep);
  return rep.stft_total;
}

double loss_edc(const Waveform& h_hat, const Waveform& h) {
  const size_t len = std::max(h_hat.size(), h.size());
  RirLossTarget t(conform(h, len), {}, /*include_edc=*/true);
  Waveform a = conform(h_hat, len);
  LossReport rep;
  t.loss(a.samples.data(), len, &rep);
  return rep.edc;
}

double loss_hinge(const std::vector<double>& labels,
                  const std::vector<double>& scores) {
  if (labels.empty() || labels.size() != scores.size())
    throw InputError("loss_hinge: label/score length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0)
      throw InputError("loss_hinge: labels must be +/-1");
    acc += std::max(0.0, 1.0 - labels[i] * scores[i]);
  }
  return acc / static_cast<double>(labels.size());
}

RirLossTarget::RirLossTarget(const Waveform& target,
                             const std::vector<StftConfig>& resolutions,
                             bool include_edc)
    : include_edc_(include_edc) {
  target.validate("loss target");
  len_ = target.size();

  for (const StftConfig& cfg : resolutions) {
    Spectrogram s = stft(target, cfg);
    Resolution r;
    r.cfg = cfg;
    r.num_frames = s.num_frames;
    r.num_bins = s.num_bins;
    r.target_mag.resize(s.values.size());
    double frob2 = 0.0;
    for (size_t i = 0; i < s.values.size(); ++i) {
      double m = std::abs(s.values[i]);
      r.target_mag[i] = m;
      frob2 += m * m;
    }
    r.target_frob = std::sqrt(frob2);
    if (!(r.target_frob > 0.0))
      throw InputError("loss target: zero reference spectrum");
    resolutions_.push_back(std::move(r));
  }

  if (include_edc_) {
    double total = 0.0;
    for (double v : target.samples) total += v * v;
    if (!(total > 0.0)) throw InputError("loss target: zero-energy reference");
    target_log_edc_.resize(len_);
    double acc = 0.0;
    for (size_t i = len_; i-- > 0;) {
      acc += target.samples[i] * target.samples[i];
      target_log_edc_[i] = std::log(std::max(acc / total, kEdcFloor));
    }
  }
}

double RirLossTarget::loss(const double* h_hat, size_t len) const {
  return eval(h_hat, len, nullptr, nullptr);
}

double RirLossTarget::loss(const double* h_hat, size_t len,
                           LossReport* report) const {
  return eval(h_hat, len, nullptr, report);
}

double RirLossTarget::loss_grad(const double* h_hat, size_t len,
                                double* grad) const {
  // The adjoint accumulates over the conformed length; candidates shorter
  // than the target only receive the overlapping part.
  std::vector<double> buf(len_, 0.0);
  double l = eval(h_hat, len, buf.data(), nullptr);
  std::fill(grad, grad + len, 0.0);
  std::copy(buf.begin(), buf.begin() + std::min(len, len_), grad);
  return l;
}

double RirLossTarget::eval(const double* h_hat, size_t len, double* grad,
                           LossReport* report) const {
  // Conform the candidate to the target length.
  Waveform x;
  x.samples.assign(len_, 0.0);
  std::copy(h_hat, h_hat + std::min(len, len_), x.samples.begin());
  for (double v : x.samples)
    if (!std::isfinite(v))
      throw InputError("loss: non-finite candidate sample");

  double sc_sum = 0.0, sm_sum = 0.0;

  for (const Resolution& r : resolutions_) {
    Spectrogram s = stft(x, r.cfg);
    const size_t nbins = s.values.size();
    std::vector<double> mag(nbins);
    double diff2 = 0.0;
    double sm_acc = 0.0;
    for (size_t i = 0; i < nbins; ++i) {
      double m = std::abs(s.values[i]);
      mag[i] = m;
      double d = m - r.target_mag[i];
      diff2 += d * d;
      sm_acc += std::abs(std::log(std::max(r.target_mag[i], kMagFloor)) -
                         std::log(std::max(m, kMagFloor)));
    }
    const double num = std::sqrt(diff2);
    const double n_bins = static_cast<double>(nbins);
    sc_sum += num / r.target_frob;
    sm_sum += sm_acc / n_bins;

    if (grad) {
      Spectrogram g = s;  // reuse shape/config
      const double sc_scale = num > 1e-300 ? 1.0 / (num * r.target_frob) : 0.0;
      for (size_t i = 0; i < nbins; ++i) {
        double m = mag[i];
        double coeff = sc_scale * (m - r.target_mag[i]);
        if (m > kMagFloor) {
          double lt = std::log(std::max(r.target_mag[i], kMagFloor));
          double lh = std::log(m);
          if (lh != lt) coeff += (lh > lt ? 1.0 : -1.0) / (m * n_bins);
        }
        g.values[i] = (m > 1e-300) ? s.values[i] * (coeff / m)
                                   : std::complex<double>(0.0, 0.0);
      }
      stft_adjoint(g, grad);
    }
  }

  double edc_loss = 0.0;
  if (include_edc_) {
    double total_e = 0.0;
    for (double v : x.samples) total_e += v * v;
    if (!(total_e > 0.0))
      throw InputError("loss: zero-energy candidate (EDC undefined)");

    std::vector<double> s_tail(len_);
    double acc = 0.0;
    for (size_t i = len_; i-- > 0;) {
      acc += x.samples[i] * x.samples[i];
      s_tail[i] = acc;
    }
    double edc_acc = 0.0;
    std::vector<double> d_edc;  // dL/d edc(t), t >= 1
    if (grad) d_edc.assign(len_, 0.0);
    const double n_samp = static_cast<double>(len_);
    for (size_t t = 0; t < len_; ++t) {
      double e = s_tail[t] / total_e;
      double lh = std::log(std::max(e, kEdcFloor));
      edc_acc += std::abs(target_log_edc_[t] - lh);
      if (grad && t >= 1 && e > kEdcFloor && lh != target_log_edc_[t])
        d_edc[t] = (lh > target_log_edc_[t] ? 1.0 : -1.0) / (e * n_samp);
    }
    edc_loss = edc_acc / n_samp;

    if (grad) {
      // Backprop through edc(t) = S(t)/S(0), S(t) = sum_{n>=t} x(n)^2.
      std::vector<double> v(len_, 0.0);
      double v0 = 0.0;
      for (size_t t = 1; t < len_; ++t) {
        v[t] = d_edc[t] / total_e;
        v0 -= d_edc[t] * s_tail[t] / (total_e * total_e);
      }
      v[0] += v0;
      double cum = 0.0;
      for (size_t n = 0; n < len_; ++n) {
        cum += v[n];
        grad[n] += 2.0 * x.samples[n] * cum;
      }
    }
  }

  if (report) *report = make_loss_report(sc_sum, sm_sum, edc_loss, 0.0, 1.0);
  return sc_sum + sm_sum + edc_loss;
}

}  // namespace echomark

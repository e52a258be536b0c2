// Copyright 2026 The roomecho Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "roomecho/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roomecho/error.hpp"
#include "roomecho/random.hpp"

namespace roomecho {

namespace {

constexpr double kPi = std::numbers::pi;

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Signal index read by position i of a reflect-padded signal of length len.
int reflect_index(int i, int len) {
  if (i < 0) i = -i;
  if (i >= len) i = 2 * (len - 1) - i;
  return i;
}

}  // namespace

// ---------------------------------------------------------------------------
// STFT

Stft::Stft(const StftConfig& cfg) : cfg_(cfg) {
  require(cfg.fft_size >= 2 && cfg.fft_size % 2 == 0, ErrorCode::kConfig, "fft_size must be even");
  require(cfg.window_size >= 2 && cfg.window_size <= cfg.fft_size, ErrorCode::kConfig,
          "window_size must be in [2, fft_size]");
  require(cfg.hop >= 1 && cfg.hop <= cfg.window_size, ErrorCode::kConfig, "hop must be in [1, window]");
  require(cfg.signal_length > cfg.fft_size / 2, ErrorCode::kConfig, "signal too short for reflect padding");
  const int n = cfg.fft_size;
  const int f = cfg.bins();
  window_.assign(n, 0.0);
  const int offset = (n - cfg.window_size) / 2;
  for (int i = 0; i < cfg.window_size; ++i) {
    window_[offset + i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / cfg.window_size);
  }
  analysis_cos_.resize(n, f);
  analysis_sin_.resize(n, f);
  synthesis_cos_.resize(f, n);
  synthesis_sin_.resize(f, n);
  for (int k = 0; k < f; ++k) {
    const double scale = (k == 0 || k == n / 2) ? 1.0 / n : 2.0 / n;
    for (int t = 0; t < n; ++t) {
      // Reduce the phase index exactly before converting to an angle.
      const double arg = 2.0 * kPi * static_cast<double>((static_cast<long long>(k) * t) % n) / n;
      const double c = std::cos(arg);
      const double s = std::sin(arg);
      analysis_cos_(t, k) = window_[t] * c;
      analysis_sin_(t, k) = -window_[t] * s;
      synthesis_cos_(k, t) = scale * c * window_[t];
      synthesis_sin_(k, t) = -scale * s * window_[t];
    }
  }
  const int pad = n / 2;
  const int padded = cfg.signal_length + 2 * pad;
  std::vector<double> wsum(padded, 0.0);
  for (int fr = 0; fr < cfg.frames(); ++fr) {
    for (int t = 0; t < n; ++t) {
      const int idx = fr * cfg.hop + t;
      if (idx < padded) wsum[idx] += window_[t] * window_[t];
    }
  }
  // Padding samples are reflections of signal samples, so their weight folds
  // back onto the sample they copy. This keeps the inverse a least-squares fit.
  std::vector<double> folded(cfg.signal_length, 0.0);
  for (int p = 0; p < padded; ++p) folded[reflect_index(p - pad, cfg.signal_length)] += wsum[p];
  inv_window_sum_.resize(cfg.signal_length);
  for (int i = 0; i < cfg.signal_length; ++i) inv_window_sum_[i] = folded[i] > 1e-10 ? 1.0 / folded[i] : 0.0;
}

void Stft::forward(std::span<const double> signal, Eigen::MatrixXd& re, Eigen::MatrixXd& im) const {
  require(static_cast<int>(signal.size()) == cfg_.signal_length, ErrorCode::kShape,
          "STFT input must have " + std::to_string(cfg_.signal_length) + " samples, got " +
              std::to_string(signal.size()));
  const int n = cfg_.fft_size;
  const int pad = n / 2;
  const int len = cfg_.signal_length;
  const int frames = cfg_.frames();
  Eigen::MatrixXd framed(frames, n);
  for (int fr = 0; fr < frames; ++fr) {
    for (int t = 0; t < n; ++t) framed(fr, t) = signal[reflect_index(fr * cfg_.hop + t - pad, len)];
  }
  re.noalias() = (framed * analysis_cos_).transpose();
  im.noalias() = (framed * analysis_sin_).transpose();
}

Eigen::MatrixXd Stft::magnitude(std::span<const double> signal) const {
  Eigen::MatrixXd re, im;
  forward(signal, re, im);
  return (re.array().square() + im.array().square()).sqrt().matrix();
}

std::vector<double> Stft::inverse(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) const {
  const int n = cfg_.fft_size;
  const int frames = cfg_.frames();
  require(re.rows() == cfg_.bins() && re.cols() == frames && im.rows() == re.rows() &&
              im.cols() == re.cols(),
          ErrorCode::kShape, "inverse STFT shape mismatch");
  const Eigen::MatrixXd framed = re.transpose() * synthesis_cos_ + im.transpose() * synthesis_sin_;
  const int pad = n / 2;
  const int len = cfg_.signal_length;
  std::vector<double> out(len, 0.0);
  for (int fr = 0; fr < frames; ++fr) {
    for (int t = 0; t < n; ++t) {
      const int p = fr * cfg_.hop + t;
      if (p < len + 2 * pad) out[reflect_index(p - pad, len)] += framed(fr, t);
    }
  }
  for (int i = 0; i < len; ++i) out[i] *= inv_window_sum_[i];
  return out;
}

const Stft& default_stft() {
  static const Stft stft{StftConfig{}};
  return stft;
}

namespace {

const Stft& stft_for(const StftConfig& cfg, std::optional<Stft>& storage) {
  const StftConfig d;
  if (cfg.fft_size == d.fft_size && cfg.window_size == d.window_size && cfg.hop == d.hop &&
      cfg.signal_length == d.signal_length) {
    return default_stft();
  }
  storage.emplace(cfg);
  return *storage;
}

}  // namespace

Spectrogram stft_logmag(std::span<const double> waveform, const StftConfig& cfg) {
  std::optional<Stft> storage;
  const Stft& stft = stft_for(cfg, storage);
  Spectrogram s;
  s.values = stft.magnitude(waveform).array().max(cfg.floor_epsilon).log().matrix();
  s.sample_rate = cfg.sample_rate;
  s.hop = cfg.hop;
  return s;
}

// ---------------------------------------------------------------------------
// Griffin-Lim

std::vector<double> griffin_lim(const Eigen::MatrixXd& magnitude, const GriffinLimOptions& opts,
                                const StftConfig& cfg, std::vector<double>* convergence) {
  require(opts.iterations >= 1, ErrorCode::kConfig, "griffin_lim needs >= 1 iteration");
  require(opts.momentum >= 0.0, ErrorCode::kConfig, "griffin_lim momentum must be >= 0");
  std::optional<Stft> storage;
  const Stft& stft = stft_for(cfg, storage);
  require(magnitude.rows() == cfg.bins() && magnitude.cols() == cfg.frames(), ErrorCode::kShape,
          "griffin_lim magnitude shape mismatch");
  require(magnitude.allFinite(), ErrorCode::kNumeric, "griffin_lim magnitude not finite");

  Eigen::MatrixXd re(magnitude.rows(), magnitude.cols());
  Eigen::MatrixXd im(magnitude.rows(), magnitude.cols());
  Rng rng(SeedHasher(opts.seed).add(std::string_view("griffin-lim")).value());
  for (Eigen::Index j = 0; j < magnitude.cols(); ++j) {
    for (Eigen::Index i = 0; i < magnitude.rows(); ++i) {
      const double phase = rng.uniform(-kPi, kPi);
      re(i, j) = magnitude(i, j) * std::cos(phase);
      im(i, j) = magnitude(i, j) * std::sin(phase);
    }
  }
  const double norm_m = magnitude.norm();
  if (convergence) convergence->clear();

  // Target magnitude with the phase of (re, im); zero bins fall back to phase 0.
  auto with_phase = [&](const Eigen::ArrayXXd& cre, const Eigen::ArrayXXd& cim) {
    const Eigen::ArrayXXd mag = (cre.square() + cim.square()).sqrt();
    const Eigen::ArrayXXd safe = mag.max(1e-300);
    const Eigen::ArrayXXd has = (mag > 0.0).cast<double>();
    re = (magnitude.array() * (has * cre / safe + (1.0 - has))).matrix();
    im = (magnitude.array() * has * cim / safe).matrix();
  };

  std::vector<double> y;
  Eigen::MatrixXd yre, yim, prev_re, prev_im;
  auto project = [&] {
    y = stft.inverse(re, im);
    stft.forward(y, yre, yim);
    const Eigen::ArrayXXd mag = (yre.array().square() + yim.array().square()).sqrt();
    return norm_m > 0.0 ? (mag - magnitude.array()).matrix().norm() / norm_m : 0.0;
  };
  const double beta = opts.momentum / (1.0 + opts.momentum);
  double prev_err = 0.0;
  bool have_prev = false;
  bool extrapolated = false;
  for (int it = 0; it < opts.iterations; ++it) {
    double err = project();
    if (extrapolated && err > prev_err) {
      // A plain step from the last consistent estimate cannot increase the error.
      with_phase(prev_re.array(), prev_im.array());
      err = project();
      have_prev = false;
    }
    if (convergence) convergence->push_back(err);
    if (it + 1 == opts.iterations) break;
    extrapolated = have_prev && beta != 0.0;
    if (extrapolated) {
      with_phase(yre.array() - beta * prev_re.array(), yim.array() - beta * prev_im.array());
    } else {
      with_phase(yre.array(), yim.array());
    }
    prev_re = yre;
    prev_im = yim;
    prev_err = err;
    have_prev = true;
  }
  return y;
}

double spectral_convergence(std::span<const double> waveform, const Eigen::MatrixXd& magnitude,
                            const StftConfig& cfg) {
  std::optional<Stft> storage;
  const Stft& stft = stft_for(cfg, storage);
  const double norm_m = magnitude.norm();
  if (norm_m == 0.0) return 0.0;
  return (stft.magnitude(waveform) - magnitude).norm() / norm_m;
}

// ---------------------------------------------------------------------------
// Energy decay and metrics

std::vector<double> schroeder_edc(std::span<const double> waveform) {
  const double total = energy(waveform);
  require(total > 0.0, ErrorCode::kEmptySignal, "energy decay curve of an all-zero signal");
  std::vector<double> edc(waveform.size());
  double tail = 0.0;
  for (std::size_t i = waveform.size(); i-- > 0;) {
    tail += waveform[i] * waveform[i];
    edc[i] = tail > 0.0 ? std::max(kEdcFloorDb, 10.0 * std::log10(tail / total)) : kEdcFloorDb;
  }
  // Rounding in the running sum can leave the head a hair above 0 dB.
  if (!edc.empty()) edc[0] = 0.0;
  for (std::size_t i = 1; i < edc.size(); ++i) edc[i] = std::min(edc[i], edc[i - 1]);
  return edc;
}

double metric_edt(std::span<const double> waveform, double sample_rate, double threshold_db) {
  const auto edc = schroeder_edc(waveform);
  const double target = -std::abs(threshold_db);
  for (std::size_t i = 1; i < edc.size(); ++i) {
    if (edc[i] <= target) {
      const double drop = edc[i - 1] - edc[i];
      const double frac = drop > 0.0 ? (edc[i - 1] - target) / drop : 0.0;
      return (static_cast<double>(i - 1) + frac) / sample_rate;
    }
  }
  fail(ErrorCode::kMetricUndefined, "energy decay never reaches -" + std::to_string(threshold_db) + " dB");
}

C50 metric_c50(std::span<const double> waveform, double sample_rate) {
  const auto split = static_cast<std::size_t>(std::ceil(0.05 * sample_rate - 1e-9));
  require(waveform.size() > split, ErrorCode::kShape, "C50 needs more than 50 ms of signal");
  const double early = energy(waveform.first(split));
  const double late = energy(waveform.subspan(split));
  require(early + late > 0.0, ErrorCode::kEmptySignal, "C50 of an all-zero signal");
  if (late < 1e-20) return {kC50ClampDb, true};
  if (early <= 0.0) return {-kC50ClampDb, true};
  const double db = 10.0 * std::log10(early / late);
  if (db > kC50ClampDb) return {kC50ClampDb, true};
  if (db < -kC50ClampDb) return {-kC50ClampDb, true};
  return {db, false};
}

T60 metric_t60(std::span<const double> waveform, double sample_rate) {
  const auto edc = schroeder_edc(waveform);
  T60 out;
  if (edc.back() > -25.0 && *std::min_element(edc.begin(), edc.end()) > -25.0) return out;
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  for (std::size_t i = 0; i < edc.size(); ++i) {
    if (edc[i] > -5.0 || edc[i] < -25.0) continue;
    const double t = i / sample_rate;
    const double y = edc[i];
    n += 1;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    syy += y * y;
  }
  if (n < 2) return out;
  const double vt = stt - st * st / n;
  const double vy = syy - sy * sy / n;
  const double cov = sty - st * sy / n;
  if (vt <= 0.0 || vy <= 0.0) return out;
  const double slope = cov / vt;
  out.r2 = cov * cov / (vt * vy);
  if (slope >= 0.0) return out;
  out.seconds = 60.0 / std::abs(slope);
  out.valid = out.r2 >= 0.5;
  return out;
}

double t60_pct_error(double pred_seconds, double gt_seconds) {
  require(gt_seconds > 0.0, ErrorCode::kMetricUndefined, "ground-truth T60 must be positive");
  return 100.0 * std::abs(pred_seconds - gt_seconds) / gt_seconds;
}

std::optional<double> t60_pct_error(const T60& pred, const T60& gt) {
  if (!gt.valid || !pred.valid) return std::nullopt;
  return t60_pct_error(pred.seconds, gt.seconds);
}

AcousticMetrics compute_metrics(std::span<const double> waveform, double sample_rate) {
  AcousticMetrics m;
  m.edt = metric_edt(waveform, sample_rate);
  const C50 c = metric_c50(waveform, sample_rate);
  m.c50 = c.db;
  m.c50_clamped = c.clamped;
  const T60 t = metric_t60(waveform, sample_rate);
  m.t60 = t.seconds;
  m.t60_valid = t.valid;
  return m;
}

Eigen::MatrixXd edc_freq(const Eigen::MatrixXd& log_magnitude) {
  const Eigen::Index bins = log_magnitude.rows();
  const Eigen::Index frames = log_magnitude.cols();
  Eigen::MatrixXd out(bins, frames);
  for (Eigen::Index f = 0; f < bins; ++f) {
    double tail = 0.0;
    for (Eigen::Index t = frames; t-- > 0;) {
      tail += std::exp(2.0 * log_magnitude(f, t));
      out(f, t) = tail;
    }
    const double total = out(f, 0);
    for (Eigen::Index t = 0; t < frames; ++t) out(f, t) = 10.0 * std::log10(out(f, t) / total);
  }
  return out;
}

Eigen::MatrixXd edc_freq(const Spectrogram& spec) { return edc_freq(spec.values); }

int alignment_shift(double d_target, double d_ref, const SimConfig& cfg) {
  require(d_target > 0.0 && d_ref > 0.0, ErrorCode::kConfig, "alignment distances must be positive");
  return static_cast<int>(std::lround((d_target - d_ref) / cfg.speed_of_sound * cfg.sample_rate));
}

std::vector<double> time_shift_align(std::span<const double> reference, double d_target,
                                     double d_ref, const SimConfig& cfg) {
  const int shift = alignment_shift(d_target, d_ref, cfg);
  const int n = static_cast<int>(reference.size());
  require(std::abs(shift) < n, ErrorCode::kDegenerateShift,
          "alignment shift of " + std::to_string(shift) + " samples exceeds the signal");
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int src = i - shift;
    if (src >= 0 && src < n) out[i] = reference[src];
  }
  return out;
}

}  // namespace roomecho

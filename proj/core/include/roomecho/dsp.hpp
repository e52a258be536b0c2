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

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "roomecho/sim.hpp"

namespace roomecho {

struct StftConfig {
  int fft_size = 124;
  int window_size = 62;
  int hop = 31;
  int signal_length = 9600;
  double sample_rate = 22050.0;
  double floor_epsilon = 1e-8;

  int bins() const { return fft_size / 2 + 1; }
  int frames() const { return 1 + signal_length / hop; }
};

// Log-magnitude (natural log) time-frequency grid, bins x frames.
struct Spectrogram {
  Eigen::MatrixXd values;
  double sample_rate = 22050.0;
  int hop = 31;

  int bins() const { return static_cast<int>(values.rows()); }
  int frames() const { return static_cast<int>(values.cols()); }
};

// Periodic Hann analysis window centred in a zero-padded FFT frame, reflect
// centre padding, overlap-add inverse normalized by the summed squared window.
// The DFTs are dense matrix products, which is faster than an FFT at n=124.
class Stft {
 public:
  explicit Stft(const StftConfig& cfg = {});

  const StftConfig& config() const { return cfg_; }
  // Real and imaginary parts, each bins x frames.
  void forward(std::span<const double> signal, Eigen::MatrixXd& re, Eigen::MatrixXd& im) const;
  Eigen::MatrixXd magnitude(std::span<const double> signal) const;
  std::vector<double> inverse(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) const;

  const std::vector<double>& fft_window() const { return window_; }

 private:
  StftConfig cfg_;
  std::vector<double> window_;  // length fft_size, zero outside the Hann span
  Eigen::MatrixXd analysis_cos_;  // fft_size x bins (window folded in)
  Eigen::MatrixXd analysis_sin_;
  Eigen::MatrixXd synthesis_cos_;  // bins x fft_size (window folded in)
  Eigen::MatrixXd synthesis_sin_;
  std::vector<double> inv_window_sum_;  // per signal sample
};

const Stft& default_stft();

Spectrogram stft_logmag(std::span<const double> waveform, const StftConfig& cfg = {});

struct GriffinLimOptions {
  int iterations = 60;
  // Drives the uniform random initial phase.
  std::uint64_t seed = 0;
  // Fast Griffin-Lim extrapolation weight; 0 gives the plain algorithm. A step
  // that would raise the spectral convergence error is redone without
  // extrapolation, so the error never increases.
  double momentum = 0.99;
};

// `magnitude` is linear (not log), bins x frames. When `convergence` is given
// it receives ||STFT(y_i)| - M| / |M| for the waveform after every iteration.
std::vector<double> griffin_lim(const Eigen::MatrixXd& magnitude, const GriffinLimOptions& opts = {},
                                const StftConfig& cfg = {},
                                std::vector<double>* convergence = nullptr);

double spectral_convergence(std::span<const double> waveform, const Eigen::MatrixXd& magnitude,
                            const StftConfig& cfg = {});

inline constexpr double kEdcFloorDb = -120.0;

// Schroeder backward integration in dB re total energy, clamped at -120 dB.
std::vector<double> schroeder_edc(std::span<const double> waveform);

double metric_edt(std::span<const double> waveform, double sample_rate = 22050.0,
                  double threshold_db = 5.0);

struct C50 {
  double db = 0.0;
  bool clamped = false;
};
inline constexpr double kC50ClampDb = 60.0;
C50 metric_c50(std::span<const double> waveform, double sample_rate = 22050.0);

struct T60 {
  double seconds = 0.0;
  bool valid = false;
  double r2 = 0.0;
};
// T20 line fit between -5 and -25 dB, extrapolated to 60 dB.
T60 metric_t60(std::span<const double> waveform, double sample_rate = 22050.0);

// Percentage error, or nullopt when either estimate is invalid (excluded
// from aggregates).
std::optional<double> t60_pct_error(const T60& pred, const T60& gt);
double t60_pct_error(double pred_seconds, double gt_seconds);

struct AcousticMetrics {
  double edt = 0.0;
  double c50 = 0.0;
  bool c50_clamped = false;
  double t60 = 0.0;
  bool t60_valid = false;
};
AcousticMetrics compute_metrics(std::span<const double> waveform, double sample_rate = 22050.0);

// Per-bin backward-integrated energy of exp(2 S) in dB, bins x frames.
Eigen::MatrixXd edc_freq(const Spectrogram& spec);
Eigen::MatrixXd edc_freq(const Eigen::MatrixXd& log_magnitude);

// Integer shift by round((d_target - d_ref) / c * fs); positive delays.
std::vector<double> time_shift_align(std::span<const double> reference, double d_target,
                                     double d_ref, const SimConfig& cfg = {});
int alignment_shift(double d_target, double d_ref, const SimConfig& cfg = {});

}  // namespace roomecho

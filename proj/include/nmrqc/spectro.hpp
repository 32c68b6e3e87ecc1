// Copyright 2026 The nmrqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nmrqc/simulate.hpp"
#include "nmrqc/spin_system.hpp"

namespace nmrqc {

struct Fid {
  std::vector<std::complex<double>> samples;
  double dwell = 1e-5;  ///< seconds per point
  double t2 = 1.0;      ///< decay constant, seconds
};

/// Frequency-domain data. `frequencies` is strictly increasing (Hz); the
/// real part of `amplitudes` is the absorption signal.
struct Spectrum {
  std::vector<double> frequencies;
  std::vector<std::complex<double>> amplitudes;

  double step() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
};

struct FitResult {
  double amplitude = 0.0;        ///< A
  double frequency_scale = 0.0;  ///< b
  double residual = 0.0;         ///< Euclidean norm of y - A cos(b x)
  int iterations = 0;
};

struct Acquisition {
  double t2 = 1.0;
  double dwell = 1e-5;
  std::size_t npoints = std::size_t{1} << 17;
};

/// One precessing term of the detected signal: amplitude * exp(-i 2 pi f t).
/// The spectrum places it at +f, so spin k's multiplet sits near +nu_k.
struct FidComponent {
  double frequency_hz = 0.0;
  std::complex<double> amplitude;
};

/// Distinct detectable frequencies of `state` under the static Hamiltonian,
/// with coincident lines merged. Sorted by frequency.
std::vector<FidComponent> fid_components(const DeviationState& state,
                                         const SpinSystem& sys);

/// s_j = Tr(e^{-iHt} rho e^{iHt} M+) e^{-t/t2}, t = j * dwell, with
/// M+ = sum_k (X_k + i Y_k) / 2.
Fid synthesize_fid(const DeviationState& state, const SpinSystem& sys,
                   double t2, double dwell, std::size_t npoints);
Fid synthesize_fid(const DeviationState& state, const SpinSystem& sys,
                   const Acquisition& acq = {});

/// Unnormalized forward DFT (e^{-i 2 pi f t} kernel) on a centered axis of
/// step 1/(N dwell). Axis value f holds the bin of the e^{-i 2 pi f t}
/// component.
Spectrum fid_to_spectrum(const Fid& fid);

/// Absorption integral over [center - halfwidth, center + halfwidth]:
/// sum of real amplitudes times the axis step.
double integrate_multiplet(const Spectrum& spec, double center, double halfwidth);

/// Indices of local maxima of the absorption within [lo, hi] that reach at
/// least `min_fraction` of the largest absorption in that window.
std::vector<std::size_t> absorption_peaks(const Spectrum& spec, double lo,
                                          double hi, double min_fraction = 0.1);

/// Absorption at `freq`, linearly interpolated between grid points.
double absorption_at(const Spectrum& spec, double freq);

/// Least-squares fit of y = A cos(b x) from A0 = max|y|, b0 = 1
/// (Levenberg-Marquardt; stops when both updates fall below 1e-10 or after
/// 200 iterations).
FitResult fit_cosine(const std::vector<double>& xs, const std::vector<double>& ys);

std::string spectrum_csv(const Spectrum& spec);
std::string fid_csv(const Fid& fid);
std::string fit_json(const FitResult& fit);

}  // namespace nmrqc

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

#include "nmrqc/spectro.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "nmrqc/angle.hpp"

namespace nmrqc {

std::vector<FidComponent> fid_components(const DeviationState& state,
                                         const SpinSystem& sys) {
  const int n = sys.size();
  const auto dim = static_cast<Eigen::Index>(dimension_of(n));
  if (state.rho.rows() != dim) {
    throw Error("dimension_mismatch", "state and spin system sizes differ");
  }
  const Eigen::VectorXd h = hamiltonian_diagonal(sys);
  std::vector<FidComponent> raw;
  // <b|M+|a> = 1 when b is a with one spin raised from |1> to |0>.
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (int k = 0; k < n; ++k) {
      const Eigen::Index bit = Eigen::Index{1} << k;
      if ((a & bit) == 0) continue;
      const Eigen::Index b = a ^ bit;
      const std::complex<double> amp = state.rho(a, b);
      if (std::abs(amp) == 0.0) continue;
      raw.push_back({(h(a) - h(b)) / (2.0 * std::numbers::pi), amp});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) {
    return x.frequency_hz < y.frequency_hz;
  });
  std::vector<FidComponent> merged;
  for (const auto& c : raw) {
    if (!merged.empty() &&
        std::abs(merged.back().frequency_hz - c.frequency_hz) < 1e-9) {
      merged.back().amplitude += c.amplitude;
    } else {
      merged.push_back(c);
    }
  }
  std::erase_if(merged, [](const auto& c) { return std::abs(c.amplitude) < 1e-12; });
  return merged;
}

Fid synthesize_fid(const DeviationState& state, const SpinSystem& sys,
                   double t2, double dwell, std::size_t npoints) {
  if (!(t2 > 0.0)) throw Error("bad_acquisition", "t2 must be > 0");
  if (!(dwell > 0.0)) throw Error("bad_acquisition", "dwell must be > 0");
  if (npoints < 2) throw Error("bad_acquisition", "need at least 2 points");
  Fid fid;
  fid.dwell = dwell;
  fid.t2 = t2;
  fid.samples.assign(npoints, {0.0, 0.0});
  for (const auto& c : fid_components(state, sys)) {
    const double w = 2.0 * std::numbers::pi * c.frequency_hz;
    for (std::size_t j = 0; j < npoints; ++j) {
      const double t = static_cast<double>(j) * dwell;
      fid.samples[j] += c.amplitude * std::polar(1.0, -w * t);
    }
  }
  for (std::size_t j = 0; j < npoints; ++j) {
    fid.samples[j] *= std::exp(-static_cast<double>(j) * dwell / t2);
  }
  return fid;
}

Fid synthesize_fid(const DeviationState& state, const SpinSystem& sys,
                   const Acquisition& acq) {
  return synthesize_fid(state, sys, acq.t2, acq.dwell, acq.npoints);
}

Spectrum fid_to_spectrum(const Fid& fid) {
  const auto n = static_cast<long>(fid.samples.size());
  if (n < 2) throw Error("bad_acquisition", "need at least 2 points");
  std::vector<std::complex<double>> bins;
  Eigen::FFT<double> fft;
  fft.fwd(bins, fid.samples);

  Spectrum spec;
  spec.frequencies.resize(static_cast<std::size_t>(n));
  spec.amplitudes.resize(static_cast<std::size_t>(n));
  const double df = 1.0 / (static_cast<double>(n) * fid.dwell);
  const long half = n / 2;
  for (long i = 0; i < n; ++i) {
    const long offset = i - half;
    const long k = ((-offset) % n + n) % n;
    spec.frequencies[static_cast<std::size_t>(i)] = static_cast<double>(offset) * df;
    spec.amplitudes[static_cast<std::size_t>(i)] = bins[static_cast<std::size_t>(k)];
  }
  return spec;
}

double integrate_multiplet(const Spectrum& spec, double center, double halfwidth) {
  if (spec.frequencies.size() < 2) throw Error("bad_spectrum", "empty spectrum");
  const double lo = center - halfwidth;
  const double hi = center + halfwidth;
  if (!(halfwidth >= 0.0) || lo < spec.frequencies.front() ||
      hi > spec.frequencies.back()) {
    throw Error("window_out_of_range", "integration window outside the axis");
  }
  const auto first = std::lower_bound(spec.frequencies.begin(), spec.frequencies.end(), lo);
  const auto last = std::upper_bound(spec.frequencies.begin(), spec.frequencies.end(), hi);
  double sum = 0.0;
  for (auto it = first; it != last; ++it) {
    sum += spec.amplitudes[static_cast<std::size_t>(it - spec.frequencies.begin())].real();
  }
  return sum * spec.step();
}

std::vector<std::size_t> absorption_peaks(const Spectrum& spec, double lo,
                                          double hi, double min_fraction) {
  const auto& f = spec.frequencies;
  const auto first = static_cast<std::size_t>(
      std::lower_bound(f.begin(), f.end(), lo) - f.begin());
  const auto last = static_cast<std::size_t>(
      std::upper_bound(f.begin(), f.end(), hi) - f.begin());
  double top = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    top = std::max(top, spec.amplitudes[i].real());
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = std::max<std::size_t>(first, 1);
       i < std::min(last, f.size() - 1); ++i) {
    const double v = spec.amplitudes[i].real();
    if (v >= min_fraction * top && v > spec.amplitudes[i - 1].real() &&
        v >= spec.amplitudes[i + 1].real()) {
      peaks.push_back(i);
    }
  }
  return peaks;
}

double absorption_at(const Spectrum& spec, double freq) {
  const auto& f = spec.frequencies;
  if (freq < f.front() || freq > f.back()) {
    throw Error("window_out_of_range", "frequency outside the axis");
  }
  auto it = std::upper_bound(f.begin(), f.end(), freq);
  if (it == f.end()) return spec.amplitudes.back().real();
  const auto i = static_cast<std::size_t>(it - f.begin());
  const double w = (freq - f[i - 1]) / (f[i] - f[i - 1]);
  return (1.0 - w) * spec.amplitudes[i - 1].real() + w * spec.amplitudes[i].real();
}

FitResult fit_cosine(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error("bad_fit_input", "xs and ys differ in length");
  if (xs.size() < 3) throw Error("bad_fit_input", "cosine fit needs at least 3 points");
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
    throw Error("bad_fit_input", "all x values are equal");
  }
  double amp0 = 0.0;
  for (double y : ys) amp0 = std::max(amp0, std::abs(y));
  if (amp0 == 0.0) throw Error("amplitude_unidentifiable", "amplitude unidentifiable");

  const auto m = static_cast<Eigen::Index>(xs.size());
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), m);
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), m);
  auto residual = [&](const Eigen::Vector2d& p) -> Eigen::VectorXd {
    return y - p(0) * (p(1) * x).array().cos().matrix();
  };

  Eigen::Vector2d p(amp0, 1.0);
  Eigen::VectorXd r = residual(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  FitResult fit;
  for (int it = 1; it <= 200; ++it) {
    fit.iterations = it;
    Eigen::MatrixXd jac(m, 2);
    jac.col(0) = -(p(1) * x).array().cos().matrix();
    jac.col(1) = (p(0) * x.array() * (p(1) * x).array().sin()).matrix();
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d g = jac.transpose() * r;

    Eigen::Vector2d step = Eigen::Vector2d::Zero();
    bool accepted = false;
    while (lambda < 1e12) {
      Eigen::Matrix2d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      step = -a.ldlt().solve(g);
      const Eigen::Vector2d trial = p + step;
      const Eigen::VectorXd rt = residual(trial);
      if (rt.squaredNorm() <= cost) {
        p = trial;
        r = rt;
        cost = rt.squaredNorm();
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || step.cwiseAbs().maxCoeff() < 1e-10) break;
  }
  fit.amplitude = p(0);
  fit.frequency_scale = p(1);
  fit.residual = std::sqrt(cost);
  return fit;
}

std::string spectrum_csv(const Spectrum& spec) {
  std::string out = "freq_hz,real,imag\n";
  for (std::size_t i = 0; i < spec.frequencies.size(); ++i) {
    out += format_double(spec.frequencies[i]) + "," +
           format_double(spec.amplitudes[i].real()) + "," +
           format_double(spec.amplitudes[i].imag()) + "\n";
  }
  return out;
}

std::string fid_csv(const Fid& fid) {
  std::string out = "t_s,real,imag\n";
  for (std::size_t j = 0; j < fid.samples.size(); ++j) {
    out += format_double(static_cast<double>(j) * fid.dwell) + "," +
           format_double(fid.samples[j].real()) + "," +
           format_double(fid.samples[j].imag()) + "\n";
  }
  return out;
}

std::string fit_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["A"] = fit.amplitude;
  j["b"] = fit.frequency_scale;
  j["residual"] = fit.residual;
  j["iterations"] = fit.iterations;
  return j.dump(2) + "\n";
}

}  // namespace nmrqc

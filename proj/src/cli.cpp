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

#include "nmrqc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nmrqc/angle.hpp"
#include "nmrqc/decompose.hpp"
#include "nmrqc/refocus.hpp"
#include "nmrqc/simulate.hpp"
#include "nmrqc/spectro.hpp"

namespace nmrqc {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutDirEnv = "NMRQC_OUT_DIR";

struct Common {
  std::string molecule = "crotonic-acid";
  std::string out_dir;
  double tol = 1e-10;
};

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("io", "cannot write " + tmp.string());
    f << content;
    if (!f) throw Error("io", "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot read " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::vector<int> parse_spin_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("bad_spins", "cannot parse spin list '" + s + "'");
    }
  }
  return out;
}

ErrorModel make_error_model(double angle_scale, double damping) {
  ErrorModel e{angle_scale, damping};
  e.validate();
  return e;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// Durations realizing each pi*J_eff*T grid value.
std::vector<double> durations_for(const std::vector<double>& grid, double j_eff) {
  std::vector<double> t;
  for (double x : grid) t.push_back(x / (std::numbers::pi * j_eff));
  return t;
}

struct SweepCsv {
  std::vector<double> xs;
  std::vector<double> ys;
};

SweepCsv read_sweep_csv(const std::string& text) {
  SweepCsv out;
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("bad_csv", "empty sweep CSV");
  if (line.rfind("pi_J_T,expectation_sx3", 0) != 0) {
    throw Error("bad_csv", "sweep CSV header must start with pi_J_T,expectation_sx3");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
      throw Error("bad_csv", "line " + std::to_string(line_no) + ": too few columns");
    }
    try {
      out.xs.push_back(std::stod(a));
      out.ys.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw Error("bad_csv", "line " + std::to_string(line_no) + ": not numeric");
    }
  }
  return out;
}

struct SpectrumOptions {
  double t2 = 1.0;
  double dwell = 1e-5;
  std::size_t npoints = std::size_t{1} << 17;
  double halfwidth = 100.0;
  double center = std::nan("");
};

struct IntegrationRow {
  double pi_j_t;
  double ratio;
  double expectation;
};

std::vector<IntegrationRow> run_spectra(const SpinSystem& sys,
                                        const std::vector<double>& grid,
                                        EvolutionMode mode,
                                        const SpectrumOptions& so,
                                        const fs::path& csv_dir, bool write_fid) {
  const Acquisition acq{so.t2, so.dwell, so.npoints};
  const DeviationState initial = prepare_initial_state(sys);
  const double center = std::isnan(so.center) ? sys.shift(3) : so.center;
  const Spectrum reference = fid_to_spectrum(synthesize_fid(initial, sys, acq));
  const double ref = integrate_multiplet(reference, center, so.halfwidth);
  const PauliString sx3 = PauliString::single(sys.size(), 3, PauliLetter::X);

  std::vector<IntegrationRow> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto target = FourBodyTarget::from_pi_j_t(grid[i]);
    const DeviationState state = evolve_four_body(initial, sys, target, mode);
    const Fid fid = synthesize_fid(state, sys, acq);
    const Spectrum spec = fid_to_spectrum(fid);
    rows.push_back({grid[i], integrate_multiplet(spec, center, so.halfwidth) / ref,
                    expectation(state, sx3)});
    if (!csv_dir.empty()) {
      write_atomic(csv_dir / ("spectrum-" + std::to_string(i) + ".csv"), spectrum_csv(spec));
      if (write_fid) {
        write_atomic(csv_dir / ("fid-" + std::to_string(i) + ".csv"), fid_csv(fid));
      }
    }
  }
  return rows;
}

std::string integration_csv(const std::vector<IntegrationRow>& rows) {
  std::string out = "pi_J_T,integral_ratio,expectation_sx3\n";
  for (const auto& r : rows) {
    out += format_double(r.pi_j_t) + "," + format_double(r.ratio) + "," +
           format_double(r.expectation) + "\n";
  }
  return out;
}

std::string tag_of(Variant v, FourBodyRealization r) {
  return std::string(v == Variant::A ? "A" : "B") + "-" +
         (r == FourBodyRealization::Ideal ? "ideal" : "refocused");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Compiler and exact simulator for Ising-type NMR processors", "nmrqc"};
  app.require_subcommand(1);

  Common common;
  if (const char* env = std::getenv(kOutDirEnv)) common.out_dir = env;
  if (common.out_dir.empty()) common.out_dir = "nmrqc-out";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--molecule", common.molecule,
                    "preset name or molecule JSON path")
        ->capture_default_str();
    sub->add_option("--out", common.out_dir,
                    std::string("output directory (default $") + kOutDirEnv + ")")
        ->capture_default_str();
    sub->add_option("--tol", common.tol, "verification tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  // compile
  auto* compile = app.add_subcommand("compile", "compile the four-body propagator");
  add_common(compile);
  std::string variant_s = "A", realization_s = "ideal", pijt_s = "pi/2", spins_s = "1,2,3,4";
  double j_eff = 1.0;
  bool wrap_core = false;
  compile->add_option("--variant", variant_s, "A or B")->capture_default_str();
  compile->add_option("--realization", realization_s, "ideal or refocused")->capture_default_str();
  compile->add_option("--piJT", pijt_s, "pi*J_eff*T (radians, 'pi' tokens allowed)")->capture_default_str();
  compile->add_option("--jeff", j_eff, "effective coupling J_eff in Hz")->capture_default_str();
  compile->add_option("--spins", spins_s, "physical spins for logical 1..4")->capture_default_str();
  compile->add_flag("--wrap-core", wrap_core, "wrap a negative core angle by pi instead of failing");

  // verify
  auto* verify = app.add_subcommand("verify", "verify a sequence file against exp(-i theta P)");
  add_common(verify);
  std::string seq_path, pauli_s, theta_s = "0";
  verify->add_option("--sequence", seq_path, "sequence text file")->required();
  verify->add_option("--pauli", pauli_s, "target Pauli word, e.g. ZZZZ")->required();
  verify->add_option("--theta", theta_s, "target angle theta")->capture_default_str();

  // refocus
  auto* refocus = app.add_subcommand("refocus", "expand a selective coupling block");
  add_common(refocus);
  std::string pair_s = "1,2";
  double tau = 0.0;
  int segments = 8;
  refocus->add_option("--pair", pair_s, "target pair k,l")->capture_default_str();
  refocus->add_option("--tau", tau, "block duration in seconds (default 1/(2|J|))");
  refocus->add_option("--segments", segments, "echo segments (power of two)")->capture_default_str();

  // prepare
  auto* prepare = app.add_subcommand("prepare", "prepare the initial deviation state");
  add_common(prepare);
  int prep_spin = 3;
  bool no_gradient = false;
  prepare->add_option("--spin", prep_spin, "spin that ends up along x")->capture_default_str();
  prepare->add_flag("--no-gradient", no_gradient, "omit the gradient crusher");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep <X3> over pi*J_eff*T");
  add_common(sweep);
  std::string grid_s = "0:pi/4:2pi", mode_s = "analytic";
  double angle_scale = 1.0, damping = 1.0;
  bool do_fit = false;
  sweep->add_option("--grid", grid_s, "start:step:stop or comma list")->capture_default_str();
  sweep->add_option("--mode", mode_s, "analytic | compiled-ideal | compiled-refocused")->capture_default_str();
  sweep->add_option("--jeff", j_eff, "effective coupling J_eff in Hz")->capture_default_str();
  sweep->add_option("--angle-scale", angle_scale, "rotation angle multiplier")->capture_default_str();
  sweep->add_option("--damping", damping, "per-instruction transverse damping")->capture_default_str();
  sweep->add_flag("--fit", do_fit, "also fit A cos(b x)");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "synthesize spectra at grid points");
  add_common(spectrum);
  SpectrumOptions so;
  bool write_fid = false;
  spectrum->add_option("--grid", grid_s, "pi*J_eff*T points")->capture_default_str();
  spectrum->add_option("--mode", mode_s, "evolution mode")->capture_default_str();
  spectrum->add_option("--t2", so.t2, "decay constant (s)")->capture_default_str();
  spectrum->add_option("--dwell", so.dwell, "dwell time (s)")->capture_default_str();
  spectrum->add_option("--npoints", so.npoints, "FID length")->capture_default_str();
  spectrum->add_option("--halfwidth", so.halfwidth, "integration half-width (Hz)")->capture_default_str();
  spectrum->add_option("--center", so.center, "integration center (Hz, default nu_3)");
  spectrum->add_flag("--fid", write_fid, "also write FID CSVs");

  // fit
  auto* fit = app.add_subcommand("fit", "fit A cos(b x) to a sweep CSV");
  add_common(fit);
  std::string input_path;
  fit->add_option("--input", input_path, "sweep CSV")->required();

  // report
  auto* report = app.add_subcommand("report", "run the full four-body pipeline");
  add_common(report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& c : msg) if (c == '\n') c = ' ';
    err << "error: usage: " << msg << "\n";
    return kExitUsage;
  }

  const fs::path root(common.out_dir);
  try {
    if (*compile) {
      const SpinSystem sys = resolve_molecule(common.molecule);
      const auto spins = parse_spin_list(spins_s);
      if (spins.size() != 4) throw Error("bad_spins", "--spins needs four entries");
      const auto target = FourBodyTarget::from_pi_j_t(
          parse_angle(pijt_s), j_eff, {spins[0], spins[1], spins[2], spins[3]});
      const Variant v = parse_variant(variant_s);
      const FourBodyRealization r = parse_realization(realization_s);
      const auto rep = compile_four_body(
          sys, target, v, r, common.tol,
          wrap_core ? CoreAnglePolicy::WrapModPi : CoreAnglePolicy::Reject);
      const std::string tag = tag_of(v, r);
      write_atomic(root / "sequences" / ("compile-" + tag + ".seq"), to_text(rep.sequence));
      write_atomic(root / "reports" / ("compile-" + tag + ".json"), report_json(rep));
      out << "target " << rep.target << "\n";
      out << "instructions " << rep.sequence.size() << "\n";
      out << "deviation " << rep.deviation << "\n";
      out << "corrected " << (rep.corrected ? "true" : "false") << "\n";
      out << "duration_ms " << fixed(rep.duration_s.value_or(0.0) * 1e3, 4) << "\n";
      return kExitOk;
    }

    if (*verify) {
      const SpinSystem sys = resolve_molecule(common.molecule);
      const PulseSequence seq = parse_sequence(read_file(seq_path));
      const PauliString p = PauliString::parse(pauli_s);
      const Operator ideal = pauli_exponential(p, parse_angle(theta_s), sys.size());
      auto rep = verify_decomposition(seq, ideal, sys, common.tol);
      rep.target = "exp(-i*" + format_double(parse_angle(theta_s)) + "*" + p.word() + ")";
      write_atomic(root / "reports" / "verify.json", report_json(rep));
      out << "deviation " << rep.deviation << "\n";
      out << "global_phase " << rep.global_phase << "\n";
      if (!rep.verified) {
        err << "error: verification_failed: deviation " << rep.deviation
            << " exceeds tolerance " << common.tol << "\n";
        return kExitVerification;
      }
      out << "verified\n";
      return kExitOk;
    }

    if (*refocus) {
      const SpinSystem sys = resolve_molecule(common.molecule);
      const auto pair = parse_spin_list(pair_s);
      if (pair.size() != 2) throw Error("bad_spins", "--pair needs two spins");
      const int k = pair[0], l = pair[1];
      const double j = sys.coupling(k, l);
      if (j == 0.0) throw Error("zero_coupling", "target pair has zero J");
      const double block = tau > 0.0 ? tau : 1.0 / (2.0 * std::abs(j));
      const auto pattern = toggling_patterns(sys.size(), {k, l}, segments);
      const PulseSequence seq = refocus_block(sys, {k, l}, block, segments);
      const Operator ideal = pauli_exponential(
          PauliString::on(sys.size(), {k, l}, PauliLetter::Z),
          0.5 * std::numbers::pi * j * block, sys.size());
      auto rep = verify_decomposition(seq, ideal, sys, common.tol);
      rep.target = "[tau_" + std::to_string(k) + std::to_string(l) + "] tau=" + format_double(block);
      const std::string tag = std::to_string(k) + "-" + std::to_string(l);
      write_atomic(root / "sequences" / ("refocus-" + tag + ".seq"), to_text(seq));
      write_atomic(root / "csv" / ("pattern-" + tag + ".csv"), pattern_csv(pattern));
      write_atomic(root / "reports" / ("refocus-" + tag + ".json"), report_json(rep));
      out << "instructions " << seq.size() << "\n";
      out << "deviation " << rep.deviation << "\n";
      out << "duration_ms " << fixed(sequence_duration(seq) * 1e3, 4) << "\n";
      if (!rep.verified) {
        err << "error: verification_failed: refocused block deviates by "
            << rep.deviation << "\n";
        return kExitVerification;
      }
      return kExitOk;
    }

    if (*prepare) {
      const SpinSystem sys = resolve_molecule(common.molecule);
      const DeviationState state = prepare_initial_state(sys, prep_spin, !no_gradient);
      nlohmann::ordered_json j;
      for (const auto& [p, c] : state.pauli()) {
        j[p.word()] = c;
        out << p.word() << " " << format_double(c) << "\n";
      }
      write_atomic(root / "reports" / "prepare.json", j.dump(2) + "\n");
      return kExitOk;
    }

    if (*sweep) {
      const SpinSystem sys = resolve_molecule(common.molecule);
      const auto grid = parse_grid(grid_s);
      if (grid.empty()) throw Error("bad_grid", "sweep grid is empty");
      const EvolutionMode mode = parse_mode(mode_s);
      const auto points = sweep_four_body(sys, j_eff, durations_for(grid, j_eff), mode,
                                          make_error_model(angle_scale, damping));
      const std::string tag(to_string(mode));
      write_atomic(root / "csv" / ("sweep-" + tag + ".csv"), sweep_csv(points, mode));
      for (const auto& p : points) {
        out << format_double(p.pi_j_t) << " " << format_double(p.expectation) << "\n";
      }
      if (do_fit) {
        std::vector<double> xs, ys;
        for (const auto& p : points) {
          xs.push_back(p.pi_j_t);
          ys.push_back(p.expectation);
        }
        const FitResult f = fit_cosine(xs, ys);
        write_atomic(root / "reports" / ("fit-sweep-" + tag + ".json"), fit_json(f));
        out << "A=" << fixed(f.amplitude) << " b=" << fixed(f.frequency_scale)
            << " residual=" << f.residual << "\n";
      }
      return kExitOk;
    }

    if (*spectrum) {
      const SpinSystem sys = resolve_molecule(common.molecule);
      const auto grid = parse_grid(grid_s);
      if (grid.empty()) throw Error("bad_grid", "spectrum grid is empty");
      const auto rows = run_spectra(sys, grid, parse_mode(mode_s), so, root / "csv", write_fid);
      write_atomic(root / "csv" / "integration.csv", integration_csv(rows));
      for (const auto& r : rows) {
        out << format_double(r.pi_j_t) << " ratio=" << fixed(r.ratio)
            << " expectation=" << fixed(r.expectation) << "\n";
      }
      return kExitOk;
    }

    if (*fit) {
      const SweepCsv data = read_sweep_csv(read_file(input_path));
      const FitResult f = fit_cosine(data.xs, data.ys);
      write_atomic(root / "reports" / "fit.json", fit_json(f));
      out << "A=" << fixed(f.amplitude) << " b=" << fixed(f.frequency_scale)
          << " residual=" << f.residual << "\n";
      return kExitOk;
    }

    if (*report) {
      const SpinSystem sys = resolve_molecule(common.molecule);
      const auto grid = parse_grid("0:pi/4:2pi");
      const auto compiled = compile_four_body(
          sys, FourBodyTarget::from_pi_j_t(2.0 * std::numbers::pi), Variant::A,
          FourBodyRealization::Refocused, common.tol);
      write_atomic(root / "sequences" / "report-A-refocused.seq", to_text(compiled.sequence));
      const auto points = sweep_four_body(sys, 1.0, durations_for(grid, 1.0),
                                          EvolutionMode::CompiledRefocused);
      write_atomic(root / "csv" / "sweep-compiled-refocused.csv",
                   sweep_csv(points, EvolutionMode::CompiledRefocused));
      std::vector<double> xs, ys;
      for (const auto& p : points) {
        xs.push_back(p.pi_j_t);
        ys.push_back(p.expectation);
      }
      const FitResult f = fit_cosine(xs, ys);
      const auto rows = run_spectra(sys, grid, EvolutionMode::Analytic, so, {}, false);
      write_atomic(root / "csv" / "integration.csv", integration_csv(rows));

      nlohmann::ordered_json j;
      j["molecule"] = common.molecule;
      j["compile_deviation"] = compiled.deviation;
      j["compile_corrected"] = compiled.corrected;
      j["duration_at_2pi_s"] = compiled.duration_s.value_or(0.0);
      j["fit"] = {{"A", f.amplitude}, {"b", f.frequency_scale}, {"residual", f.residual}};
      double worst = 0.0;
      for (const auto& r : rows) worst = std::max(worst, std::abs(r.ratio - std::cos(r.pi_j_t)));
      j["max_integration_error"] = worst;
      write_atomic(root / "reports" / "summary.json", j.dump(2) + "\n");
      out << "compile deviation " << compiled.deviation << "\n";
      out << "duration_ms " << fixed(compiled.duration_s.value_or(0.0) * 1e3, 4) << "\n";
      out << "A=" << fixed(f.amplitude) << " b=" << fixed(f.frequency_scale) << "\n";
      out << "max integration error " << fixed(worst) << "\n";
      return kExitOk;
    }
  } catch (const VerificationError& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return kExitVerification;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return e.code() == "io" ? kExitRuntime : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << "error: usage: no subcommand\n";
  return kExitUsage;
}

}  // namespace nmrqc

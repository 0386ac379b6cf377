#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perimode/diagnosis.hpp"
#include "perimode/io.hpp"
#include "perimode/multiplier.hpp"
#include "perimode/operators.hpp"
#include "perimode/rng.hpp"
#include "perimode/signal.hpp"
#include "perimode/solver.hpp"
#include "perimode/types.hpp"

namespace perimode {

// ---------------------------------------------------------------------------
// Forcing catalog.  A forcing is named as "name" or "name(arg,...)":
//   zero             f = 0
//   const(c)         f(t) = c * v
//   cos(m)           f(t) = cos(m t) * v
//   mode(k)          f(t) = e^{ikt} * v        (complex)
//   sinx-cos(m)      f(t) = cos(m t) * w, w_i = sin(x_i), x_i = (i+1)pi/(d+1)
//   noise(seed,deg)  f(t) = g(t) * v, g a seeded random real trigonometric
//                    polynomial of the given degree
// with v the all-ones vector.  Anything else is read as a signal file path.
// ---------------------------------------------------------------------------

struct ForcingSpec {
  std::string name;
  std::vector<double> args;
};

inline bool is_catalog_forcing(const std::string& text) {
  const std::size_t paren = text.find('(');
  const std::string name = paren == std::string::npos ? text : text.substr(0, paren);
  return name == "zero" || name == "const" || name == "cos" || name == "mode" ||
         name == "sinx-cos" || name == "noise";
}

inline ForcingSpec parse_forcing_spec(const std::string& text) {
  ForcingSpec spec;
  const std::size_t paren = text.find('(');
  if (paren == std::string::npos) {
    spec.name = text;
    return spec;
  }
  if (text.back() != ')') throw DataError("forcing spec missing closing parenthesis");
  spec.name = text.substr(0, paren);
  const std::string inner = text.substr(paren + 1, text.size() - paren - 2);
  std::stringstream ss(inner);
  std::string field;
  while (std::getline(ss, field, ','))
    spec.args.push_back(detail::parse_double(field));
  return spec;
}

inline PeriodicSignal make_forcing(const ForcingSpec& spec, int dim, int samples) {
  if (dim < 1 || samples < 1) throw DataError("forcing needs positive dim and N");
  PeriodicSignal f = PeriodicSignal::zeros(dim, samples);
  const Vec ones = Vec::Ones(dim);

  const auto arg_at = [&](std::size_t i, double fallback) {
    return i < spec.args.size() ? spec.args[i] : fallback;
  };
  const auto require_args = [&](std::size_t max_count) {
    if (spec.args.size() > max_count)
      throw DataError("forcing " + spec.name + " takes at most " +
                      std::to_string(max_count) + " argument(s)");
  };

  if (spec.name == "zero") {
    require_args(0);
    return f;
  }
  if (spec.name == "const") {
    require_args(1);
    const double c = arg_at(0, 1.0);
    for (int j = 0; j < samples; ++j) f.values().col(j) = c * ones;
    return f;
  }
  if (spec.name == "cos") {
    require_args(1);
    const int m = static_cast<int>(arg_at(0, 1.0));
    for (int j = 0; j < samples; ++j)
      f.values().col(j) = std::cos(m * f.grid_point(j)) * ones;
    return f;
  }
  if (spec.name == "mode") {
    require_args(1);
    const int k = static_cast<int>(arg_at(0, 1.0));
    for (int j = 0; j < samples; ++j)
      f.values().col(j) = std::exp(Complex(0.0, k * f.grid_point(j))) * ones;
    return f;
  }
  if (spec.name == "sinx-cos") {
    require_args(1);
    const int m = static_cast<int>(arg_at(0, 1.0));
    Vec w(dim);
    const double h = kPi / (dim + 1);
    for (int i = 0; i < dim; ++i) w[i] = std::sin((i + 1) * h);
    for (int j = 0; j < samples; ++j)
      f.values().col(j) = std::cos(m * f.grid_point(j)) * w;
    return f;
  }
  if (spec.name == "noise") {
    require_args(2);
    const std::uint64_t seed = static_cast<std::uint64_t>(arg_at(0, 0.0));
    const int degree = static_cast<int>(arg_at(1, 8.0));
    if (degree < 0) throw DataError("noise degree must be non-negative");
    SeededRng rng(seed);
    // Random real trigonometric polynomial: real c_0, conjugate-symmetric rest.
    const double c0 = rng.normal();
    std::vector<Complex> coeff(degree + 1);
    for (int k = 1; k <= degree; ++k) coeff[k] = rng.complex_normal();
    for (int j = 0; j < samples; ++j) {
      double g = c0;
      const double t = f.grid_point(j);
      for (int k = 1; k <= degree; ++k)
        g += 2.0 * (coeff[k] * std::exp(Complex(0.0, k * t))).real();
      f.values().col(j) = g * ones;
    }
    return f;
  }
  throw DataError("unknown forcing: " + spec.name);
}

// ---------------------------------------------------------------------------
// CLI plumbing.
// ---------------------------------------------------------------------------

namespace cli_detail {

inline LinearOperatorHandle load_operator(const std::string& spec) {
  const std::string text =
      !spec.empty() && spec.front() == '{' ? spec : read_text_file(spec);
  return operator_from_json(parse_json(text));
}

inline PeriodicSignal load_forcing(const std::string& spec, int dim, int samples) {
  if (is_catalog_forcing(spec)) return make_forcing(parse_forcing_spec(spec), dim, samples);
  const std::string text = read_text_file(spec);
  PeriodicSignal f = spec.size() >= 5 && spec.substr(spec.size() - 5) == ".json"
                         ? signal_from_json(parse_json(text))
                         : signal_from_csv(text);
  if (f.dim() != dim)
    throw DimensionError("forcing dimension does not match operator dimension");
  return f;
}

inline ModeWindow parse_window(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw DataError("window must be given as lo:hi");
  try {
    const int lo = std::stoi(text.substr(0, colon));
    const int hi = std::stoi(text.substr(colon + 1));
    if (lo > hi) throw DataError("window lo must be <= hi");
    return ModeWindow{lo, hi};
  } catch (const std::invalid_argument&) {
    throw DataError("window bounds must be integers");
  } catch (const std::out_of_range&) {
    throw DataError("window bounds out of range");
  }
}

inline SolveOptions parse_recon(const std::string& text) {
  SolveOptions opt;
  if (text == "partial") return opt;
  if (text == "fejer") {
    opt.recon = Reconstruction::fejer;
    return opt;
  }
  if (text.rfind("fejer:", 0) == 0) {
    opt.recon = Reconstruction::fejer;
    try {
      opt.fejer_order = std::stoi(text.substr(6));
    } catch (const std::exception&) {
      throw DataError("fejer order must be an integer");
    }
    if (opt.fejer_order < 0) throw DataError("fejer order must be non-negative");
    return opt;
  }
  throw DataError("reconstruction must be partial, fejer, or fejer:<n>");
}

inline std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace cli_detail

/// Entry point shared by the binary and in-process tests.  `args` excludes the
/// program name.  Exit codes: 0 success, 1 usage or data errors, 2 rejection
/// by the well-posedness gate.
inline int run_main(const std::vector<std::string>& args) {
  CLI::App app{
      "perimode: periodic solutions of z''' = Az + f by per-mode resolvent "
      "solves, with well-posedness diagnostics"};
  app.require_subcommand(1);

  std::string operator_spec;
  std::string forcing_spec = "cos(1)";
  std::string window_spec;
  std::string recon_spec = "partial";
  std::string out_dir = ".";
  int K = -1;
  int N = 0;
  std::uint64_t seed = 1;

  CLI::App* solve = app.add_subcommand(
      "solve", "solve the periodic problem and write solution.csv + solve_report.json");
  solve->add_option("--operator", operator_spec, "operator JSON file, or inline JSON")
      ->required();
  solve->add_option("--forcing", forcing_spec,
                    "forcing: catalog name like cos(3), or a signal file");
  solve->add_option("-K,--truncation", K, "mode truncation order (default 16)");
  solve->add_option("-N,--samples", N, "grid size (default 2K+1)");
  solve->add_option("--recon", recon_spec, "reconstruction: partial, fejer, fejer:<n>");
  solve->add_option("--out", out_dir, "output directory");

  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "multiplier diagnostics over a mode window; writes diagnosis.json");
  diagnose->add_option("--operator", operator_spec, "operator JSON file, or inline JSON")
      ->required();
  diagnose->add_option("--window", window_spec, "mode window lo:hi (default -50:50)");
  diagnose->add_option("-K,--truncation", K, "symmetric window half-width");
  diagnose->add_option("--seed", seed, "seed for the Rademacher-average estimate");
  diagnose->add_option("--out", out_dir, "output directory");

  CLI::App* spectrum_cmd = app.add_subcommand(
      "spectrum", "singular-mode scan and eigenvalues; writes sigma_z.json");
  spectrum_cmd
      ->add_option("--operator", operator_spec, "operator JSON file, or inline JSON")
      ->required();
  spectrum_cmd->add_option("--window", window_spec, "mode window lo:hi (default -16:16)");
  spectrum_cmd->add_option("-K,--truncation", K, "symmetric window half-width");
  spectrum_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* bench = app.add_subcommand(
      "bench", "timing sweep over truncation orders; writes bench.csv");
  bench->add_option("--operator", operator_spec,
                    "operator JSON (default: Dirichlet Laplacian sweep)");
  bench->add_option("-K,--truncation", K, "single truncation order instead of the sweep");
  bench->add_option("-N,--samples", N, "grid size (default 2K+2)");
  bench->add_option("--out", out_dir, "output directory");

  std::vector<const char*> argv;
  argv.push_back("perimode");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(solve)) {
      const LinearOperatorHandle A = cli_detail::load_operator(operator_spec);
      const int k_trunc = K < 0 ? 16 : K;
      const int samples = N > 0 ? N : 2 * k_trunc + 1;
      const PeriodicSignal f = cli_detail::load_forcing(forcing_spec, A.dim(), samples);
      const SolveOptions opt = cli_detail::parse_recon(recon_spec);

      const SolveReport report = solve_periodic(A, f, k_trunc, opt);
      write_text_file(cli_detail::out_path(out_dir, "solution.csv"),
                      signal_to_csv(report.solution));
      write_text_file(cli_detail::out_path(out_dir, "solve_report.json"),
                      solve_report_to_json(report).dump(2) + "\n");
      std::cout << "solve: K=" << report.K << " N=" << report.N
                << " residual_l2=" << report.residual_l2
                << " residual_sup=" << report.residual_sup << " ("
                << report.elapsed_ms << " ms)\n";
      return 0;
    }

    if (app.got_subcommand(diagnose)) {
      const LinearOperatorHandle A = cli_detail::load_operator(operator_spec);
      const ModeWindow window = !window_spec.empty()
                                    ? cli_detail::parse_window(window_spec)
                                    : ModeWindow::symmetric(K < 0 ? 50 : K);
      DiagnosisOptions opt;
      opt.seed = seed;
      const DiagnosisReport report = run_diagnosis(A, window, opt);
      write_text_file(cli_detail::out_path(out_dir, "diagnosis.json"),
                      diagnosis_to_json(report).dump(2) + "\n");
      std::cout << "diagnose: window=[" << window.lo << "," << window.hi
                << "] sup_symbol_norm=" << report.sup_symbol_norm
                << " telescoping_max_dev=" << report.telescoping.max_rel_dev
                << " r_bound=" << report.r_bound.value << " sigma_Z={";
      for (std::size_t i = 0; i < report.sigma_z.size(); ++i)
        std::cout << (i ? "," : "") << report.sigma_z[i];
      std::cout << "}\n";
      return 0;
    }

    if (app.got_subcommand(spectrum_cmd)) {
      const LinearOperatorHandle A = cli_detail::load_operator(operator_spec);
      const ModeWindow window = !window_spec.empty()
                                    ? cli_detail::parse_window(window_spec)
                                    : ModeWindow::symmetric(K < 0 ? 16 : K);
      const SpectrumGateReport gate = spectrum_gate(A, window);
      const SpectrumReport spec = spectrum(A);
      write_text_file(cli_detail::out_path(out_dir, "sigma_z.json"),
                      spectrum_report_to_json(gate, spec).dump(2) + "\n");
      std::cout << "spectrum: sigma_Z={";
      for (std::size_t i = 0; i < gate.singular_modes.size(); ++i)
        std::cout << (i ? "," : "") << gate.singular_modes[i];
      std::cout << "} k_star=" << gate.k_star
                << " certified_complete=" << (gate.certified_complete ? "yes" : "no")
                << "\n";
      return 0;
    }

    if (app.got_subcommand(bench)) {
      std::vector<std::pair<std::string, LinearOperatorHandle>> cases;
      if (!operator_spec.empty()) {
        cases.emplace_back("custom", cli_detail::load_operator(operator_spec));
      } else {
        for (int n : {4, 8, 16, 32})
          cases.emplace_back("dirichlet_laplacian", dirichlet_laplacian(n));
      }
      const std::vector<int> orders =
          K >= 0 ? std::vector<int>{K} : std::vector<int>{16, 32, 64, 128};

      std::string csv = "kind,dim,K,N,solve_ms,residual_l2\n";
      for (const auto& [kind, A] : cases) {
        for (int k_trunc : orders) {
          const int samples = N > 0 ? N : 2 * k_trunc + 2;
          const PeriodicSignal f =
              make_forcing(parse_forcing_spec("cos(1)"), A.dim(), samples);
          const SolveReport report = solve_periodic(A, f, k_trunc);
          csv += kind + "," + std::to_string(A.dim()) + "," +
                 std::to_string(k_trunc) + "," + std::to_string(samples) + "," +
                 detail::format_double(report.elapsed_ms) + "," +
                 detail::format_double(report.residual_l2) + "\n";
        }
      }
      const std::string path = cli_detail::out_path(out_dir, "bench.csv");
      write_text_file(path, csv);
      std::cout << "bench: wrote " << path << "\n";
      return 0;
    }
  } catch (const WellPosednessError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_main(args);
}

}  // namespace perimode

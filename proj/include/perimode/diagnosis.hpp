#pragma once

#include <cstdint>
#include <vector>

#include "perimode/io.hpp"
#include "perimode/multiplier.hpp"
#include "perimode/solver.hpp"
#include "perimode/types.hpp"

namespace perimode {

struct DiagnosisOptions {
  std::uint64_t seed = 1;
  int r_bound_trials = 10000;
  int r_bound_probes = 32;
  double near_singular_threshold = 1e5;
};

/// Wellness report for the mode family of one operator: the singular-mode
/// scan, the exact sup of the symbol norms, the telescoping-identity check,
/// a seeded Rademacher-average estimate of the family's R-bound, and the
/// per-mode resolvent decay fit.  Singular modes are excluded from the
/// analytic quantities and listed in sigma_z.
struct DiagnosisReport {
  ModeWindow window{0, 0};
  SpectrumGateReport gate;
  double sup_symbol_norm = 0.0;  // max_k |M_k|_2, exact (singular values)
  TelescopingReport telescoping;
  RBoundEstimate r_bound;  // sampled lower estimate, monte-carlo
  DecayFit decay;
  std::vector<int> sigma_z;
};

inline DiagnosisReport run_diagnosis(const LinearOperatorHandle& A,
                                     ModeWindow window,
                                     const DiagnosisOptions& opt = {}) {
  DiagnosisReport report;
  report.window = window;
  report.gate = spectrum_gate(A, window);
  report.sigma_z = report.gate.singular_modes;

  const ModeSymbolFamily family = build_symbol_family(A, window);
  report.sup_symbol_norm = family.sup_norm();
  report.telescoping = telescoping_check(A, window);

  RBoundOptions rb;
  rb.seed = opt.seed;
  rb.trials = opt.r_bound_trials;
  rb.probe_count = opt.r_bound_probes;
  const std::vector<Mat> members = family.to_list();
  if (!members.empty())
    report.r_bound = r_bound_estimate(members, RBoundMethod::monte_carlo, rb);
  else
    report.r_bound.method = RBoundMethod::monte_carlo;
  report.r_bound.seed = opt.seed;

  report.decay = decay_estimate(A, window, opt.near_singular_threshold,
                                /*skip_singular=*/true);
  return report;
}

inline Json diagnosis_to_json(const DiagnosisReport& report) {
  Json per_mode = Json::array();
  for (double v : report.decay.per_mode) per_mode.push_back(v);
  return Json{
      {"window", Json::array({report.window.lo, report.window.hi})},
      {"sup_symbol_norm", report.sup_symbol_norm},
      {"telescoping_max_dev", report.telescoping.max_rel_dev},
      {"r_bound",
       Json{{"value", report.r_bound.value},
            {"method", to_string(report.r_bound.method)},
            {"seed", report.r_bound.seed}}},
      {"decay", Json{{"c_hat", report.decay.c_hat}, {"per_mode", std::move(per_mode)}}},
      {"sigma_Z", report.sigma_z}};
}

}  // namespace perimode

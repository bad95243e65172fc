#pragma once

#include <vector>

#include "nli/kernel.hpp"
#include "nli/parallel.hpp"
#include "nli/spectra.hpp"

namespace nli {

struct GnRequest {
  DualPolPsd psd;
  KernelModel kernel;
  std::vector<double> output_grid;  // Hz
  /// On: RP1 output including the phase term. Off: DP-ERP1 output.
  bool include_phase_term = true;
  /// Side of the midpoint-rule cells in the (f1, f2) plane [Hz].
  double inner_grid_step = 0.0;
  /// Evaluate eta by z-quadrature instead of the per-span closed form.
  bool quadrature_kernel = false;
};

/// Output NLI PSD of one polarization, normalized by Phi_NL^2 (and by P0 as
/// the input PSDs are). total = spm + xpolm + phase (phase only if enabled).
struct NliPsdResult {
  std::vector<double> frequency;
  std::vector<double> spm;
  std::vector<double> xpolm;
  std::vector<double> phase;
  std::vector<double> total;
  bool phase_included = true;
  double phi_nl_sq = 0.0;  // rad^2
  double p0 = 0.0;         // W

  /// Un-normalized NLI PSD [W/Hz] at output index i: P0 Phi_NL^2 total.
  double absolute(std::size_t i) const { return p0 * phi_nl_sq * total.at(i); }
};

/// (2 px_hat + py_hat)^2
double phase_term_coefficient(double px_hat, double py_hat);

/// Throws ConfigError if the request violates its invariants.
void validate(const GnRequest& req);

/// NLI PSD of X:
///   2 II |eta(f1 f2)|^2 Gx(f+f1) Gx(f+f2) Gx(f+f1+f2)
///   + II |eta(f1 f2)|^2 Gx(f+f1) Gy(f+f2) Gy(f+f1+f2)
///   + Gx(f) (2 Px + Py)^2
NliPsdResult nli_psd_x(const GnRequest& req, Execution exec = {});
/// Same with X and Y exchanged.
NliPsdResult nli_psd_y(const GnRequest& req, Execution exec = {});

/// Triple product integral II w(a - f, b - f) A(a) B(b) C(a + b - f) da db over
/// the exact support intersection, midpoint rule with area-weighted clipped
/// boundary cells. w defaults to 1.
double triple_overlap_integral(const PsdShape& a, const PsdShape& b, const PsdShape& c,
                               double f, double step);

}  // namespace nli

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nli/kernel.hpp"
#include "nli/parallel.hpp"
#include "nli/spectra.hpp"

namespace nli {

enum class PerturbationMode { Rp1, DpErp1 };

struct TrialConfig {
  double f0 = 0.0;              // line spacing [Hz]
  std::size_t num_lines = 0;    // M; lines at k f0, k = -floor(M/2) ... M - 1 - floor(M/2)
  std::size_t num_trials = 1;
  std::uint64_t seed = 0;
  PerturbationMode mode = PerturbationMode::Rp1;
  /// Random stream ids used for the X and Y lines.
  std::array<std::uint32_t, 2> polarization_stream{0, 1};
  /// Fraction of the support half-width excluded at each band edge when
  /// comparing against analytic values.
  double edge_margin = 0.1;
};

/// Spectral lines on the uniform grid. Values are spectral-density samples
/// U(k f0) = xi_k sqrt(G(k f0) / f0): the discrete double integral then carries
/// the Riemann weight f0^2, and f0 |U|^2 estimates the PSD.
struct SpectralField {
  double f0 = 0.0;
  int first_index = 0;  // k of element 0
  std::vector<cdouble> x;
  std::vector<cdouble> y;

  std::size_t size() const noexcept { return x.size(); }
  double frequency(std::size_t i) const {
    return f0 * static_cast<double>(first_index + static_cast<int>(i));
  }
};

struct PsdEstimate {
  std::vector<double> frequency;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t trials = 0;
};

/// Estimates for both output polarizations.
struct DualPolEstimate {
  PsdEstimate x;
  PsdEstimate y;
};

/// Throws ConfigError on invalid spacing/lines/trials or when the grid does not
/// extend 1.5x beyond every nonzero PSD support.
void validate(const TrialConfig& cfg, const DualPolPsd& psd);

std::vector<double> grid_frequencies(const TrialConfig& cfg);

SpectralField draw_field(const TrialConfig& cfg, const DualPolPsd& psd,
                         std::uint64_t trial_index);

/// Discrete RP1 perturbation
///   U_xp(k) = -j Phi_NL f0^2 sum_{m,n} eta(m n f0^2)
///             [Ux(k+m) Ux*(k+m+n) Ux(k+n) + Ux(k+m) Uy*(k+m+n) Uy(k+n)]
/// and its X<->Y dual. Off-grid lines count as zero.
SpectralField rp1_perturbation(const SpectralField& field, const KernelModel& kernel,
                               const TrialConfig& cfg, const DualPolPsd& psd);

/// DP-ERP1 perturbation: -j Phi_NL (-A + B) with B the RP1 double sum and
/// A = (2 Px_hat + Py_hat) Ux(k) (dual for Y).
SpectralField erp1_perturbation(const SpectralField& field, const KernelModel& kernel,
                                const TrialConfig& cfg, const DualPolPsd& psd);

/// Mean over trials of f0 |U_p / Phi_NL|^2, i.e. an estimate of G_p / Phi_NL^2
/// per grid frequency, for the configured mode. Bit-identical for any thread count.
DualPolEstimate estimate_nli_psd(const TrialConfig& cfg, const DualPolPsd& psd,
                                 const KernelModel& kernel, Execution exec = {});

/// Paired per-trial difference RP1 - DP-ERP1 of the normalized estimates, on
/// the same fields.
DualPolEstimate estimate_phase_difference(const TrialConfig& cfg, const DualPolPsd& psd,
                                          const KernelModel& kernel, Execution exec = {});

/// Mean over trials of f0 |U(k)|^2 for the input field itself.
DualPolEstimate estimate_input_psd(const TrialConfig& cfg, const DualPolPsd& psd,
                                   Execution exec = {});

struct Agreement {
  std::size_t points = 0;  // compared in-band points
  std::size_t within = 0;  // |mean - analytic| <= z_max * stderr
  double fraction() const { return points ? double(within) / double(points) : 0.0; }
};

/// Compares an estimate against analytic values at grid points inside `band`
/// shrunk by `edge_margin` of its half-width on each side.
Agreement compare_in_band(const PsdEstimate& est, const std::vector<double>& analytic,
                          Support band, double edge_margin, double z_max);

}  // namespace nli

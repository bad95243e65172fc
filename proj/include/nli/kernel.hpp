#pragma once

#include <complex>
#include <cstddef>
#include <unordered_map>

#include "nli/link.hpp"

namespace nli {

using cdouble = std::complex<double>;

struct QuadratureOptions {
  /// Accepted local error relative to the integral of |integrand| per cell.
  double relative_tolerance = 1e-13;
  /// Maximum number of z-cells per span before giving up.
  std::size_t max_cells_per_span = std::size_t{1} << 22;
};

/// Frequency kernel of a link:
///   K(F) = int_0^L gamma'(s) G(s) exp(-j C(s) (2 pi)^2 F) ds,   F = f1 f2 [Hz^2]
///
/// Two independent evaluators are provided (per-span closed form and adaptive
/// quadrature over z); `evaluate` uses the closed form. K(0) is cached.
class KernelModel {
 public:
  explicit KernelModel(LinkProfile link, QuadratureOptions options = {});

  const LinkProfile& link() const noexcept { return link_; }
  const QuadratureOptions& options() const noexcept { return options_; }
  /// Cached K(0) [1/W]; real and positive for physical links.
  cdouble k0() const noexcept { return k0_; }

  cdouble closed_form(double F) const;
  /// Throws ConvergenceError if the tolerance cannot be met within budget.
  cdouble quadrature(double F) const;
  cdouble evaluate(double F) const { return closed_form(F); }
  /// eta(F) = K(F) / K(0); eta(0) == 1 exactly.
  cdouble eta(double F) const;

 private:
  LinkProfile link_;
  QuadratureOptions options_;
  cdouble k0_;
};

cdouble kernel_quadrature(const KernelModel& model, double F);
cdouble kernel_closed_form(const KernelModel& model, double F);
cdouble normalized_kernel(const KernelModel& model, double F);

/// Cumulated nonlinear phases for reference power p0 and per-polarization
/// powers px, py (all W).
struct NonlinearPhase {
  double p0 = 0.0;
  double phi_nl = 0.0;  // P0 K(0)
  double phi_x = 0.0;   // K(0) (2 Px + Py)
  double phi_y = 0.0;   // K(0) (2 Py + Px)
};

NonlinearPhase nonlinear_phase(const KernelModel& model, double p0, double px,
                               double py);

/// Memoized |eta(F)|^2 for a single worker. Not thread-safe; each worker owns
/// one. Keys are exact F values.
class EtaSquaredMemo {
 public:
  explicit EtaSquaredMemo(const KernelModel& model) : model_(&model) {}

  double operator()(double F);
  std::size_t size() const noexcept { return memo_.size(); }

 private:
  const KernelModel* model_;
  std::unordered_map<double, double> memo_;
};

}  // namespace nli

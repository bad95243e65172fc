#pragma once

#include <string>
#include <variant>
#include <vector>

namespace nli {

/// Flat spectrum on the closed interval [center - bandwidth/2, center + bandwidth/2].
struct Rectangular {
  double center = 0.0;     // Hz
  double bandwidth = 0.0;  // Hz
  double height = 0.0;     // 1/Hz
};

/// Raised-cosine spectrum with symbol rate `bandwidth`; support is
/// (1 + rolloff) * bandwidth wide.
struct RaisedCosine {
  double center = 0.0;
  double bandwidth = 0.0;
  double rolloff = 0.0;  // in [0, 1]
  double height = 0.0;
};

/// Piecewise-linear samples, zero outside [frequencies.front(), frequencies.back()].
struct Tabulated {
  std::vector<double> frequencies;  // strictly increasing, Hz
  std::vector<double> values;       // >= 0, 1/Hz
};

struct Support {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Nonnegative, compactly supported PSD shape (normalized to P0).
class PsdShape {
 public:
  using Kind = std::variant<Rectangular, RaisedCosine, Tabulated>;

  explicit PsdShape(Kind kind);
  PsdShape(Rectangular r) : PsdShape(Kind{r}) {}
  PsdShape(RaisedCosine r) : PsdShape(Kind{r}) {}
  PsdShape(Tabulated t) : PsdShape(Kind{std::move(t)}) {}

  /// The identically-zero shape.
  static PsdShape zero();

  const Kind& kind() const noexcept { return kind_; }
  Support support() const noexcept { return support_; }
  bool is_zero() const noexcept { return is_zero_; }

  /// Same shape with every value multiplied by `factor` >= 0.
  PsdShape scaled(double factor) const;
  std::string describe() const;

 private:
  Kind kind_;
  Support support_;
  bool is_zero_ = false;
};

/// Value at f [1/Hz]; exactly 0 outside the support.
double evaluate(const PsdShape& psd, double f);

/// Integral of the shape over frequency (dimensionless P-hat).
double power_integral(const PsdShape& psd);

/// Reads a two-column CSV (f_Hz, value_per_Hz). Lines starting with '#' and a
/// non-numeric header line are skipped.
Tabulated load_tabulated_csv(const std::string& path);

/// Per-polarization normalized PSDs and their power integrals.
class DualPolPsd {
 public:
  DualPolPsd(PsdShape gx, PsdShape gy, double p0);

  const PsdShape& gx() const noexcept { return gx_; }
  const PsdShape& gy() const noexcept { return gy_; }
  double p0() const noexcept { return p0_; }
  double px_hat() const noexcept { return px_hat_; }
  double py_hat() const noexcept { return py_hat_; }
  /// 2 px_hat + py_hat
  double pt_hat() const noexcept { return 2.0 * px_hat_ + py_hat_; }
  /// 2 py_hat + px_hat
  double pt_hat_y() const noexcept { return 2.0 * py_hat_ + px_hat_; }

  /// Px, Py in watts.
  double px() const noexcept { return p0_ * px_hat_; }
  double py() const noexcept { return p0_ * py_hat_; }

  /// Roles of X and Y exchanged.
  DualPolPsd swapped() const { return DualPolPsd(gy_, gx_, p0_); }

 private:
  PsdShape gx_;
  PsdShape gy_;
  double p0_;
  double px_hat_;
  double py_hat_;
};

}  // namespace nli

#pragma once

#include <vector>

namespace nli {

/// One fiber span followed by an ideal lumped amplifier. SI units.
struct Span {
  double length = 0.0;          // m
  double beta2 = 0.0;           // s^2/m
  double alpha = 0.0;           // 1/m, power attenuation
  double gamma = 0.0;           // 1/(W m)
  double lumped_gain_db = 0.0;  // applied at the span end
};

/// Ordered spans plus dispersion pre-compensation.
///
/// The two z-profiles consumed by the kernel integral are
///   G(z) = power gain from 0 to z (span loss, lumped gains at boundaries)
///   C(z) = xi_pre - integral_0^z beta2(s) ds
///
/// At an interior span boundary z = z_i the profile takes the value of the
/// following span start, i.e. after the amplifier. At z = L it takes the fiber
/// end value, before the last amplifier.
class LinkProfile {
 public:
  LinkProfile(std::vector<Span> spans, double xi_pre = 0.0,
              bool manakov_factor_enabled = true);

  const std::vector<Span>& spans() const noexcept { return spans_; }
  double xi_pre() const noexcept { return xi_pre_; }
  bool manakov_factor_enabled() const noexcept { return manakov_; }
  double total_length() const noexcept { return total_length_; }

  /// Nonlinear coefficient entering the kernel: 8/9 gamma when the Manakov
  /// factor is enabled, gamma otherwise.
  double effective_gamma(const Span& span) const noexcept;

  /// Position where span i starts.
  double span_start(std::size_t i) const { return starts_.at(i); }
  /// G at the start of span i (after all preceding amplifiers).
  double gain_at_span_start(std::size_t i) const { return start_gain_.at(i); }
  /// C at the start of span i.
  double dispersion_at_span_start(std::size_t i) const {
    return start_dispersion_.at(i);
  }

  LinkProfile with_manakov_factor(bool enabled) const;

 private:
  std::vector<Span> spans_;
  double xi_pre_;
  bool manakov_;
  double total_length_ = 0.0;
  std::vector<double> starts_;
  std::vector<double> start_gain_;
  std::vector<double> start_dispersion_;
};

/// G(z); throws DomainError for z outside [0, L].
double power_gain(const LinkProfile& link, double z);

/// C(z) in s^2; throws DomainError for z outside [0, L].
double cumulated_dispersion(const LinkProfile& link, double z);

namespace units {
inline constexpr double kKm = 1e3;
/// dB/km attenuation to 1/m power attenuation.
double db_per_km_to_per_m(double db_per_km);
/// ps^2/km to s^2/m.
double ps2_per_km_to_s2_per_m(double ps2_per_km);
/// 1/(W km) to 1/(W m).
double per_w_per_km_to_per_w_per_m(double v);
}  // namespace units

}  // namespace nli

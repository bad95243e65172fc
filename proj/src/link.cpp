#include "nli/link.hpp"

#include <cmath>
#include <sstream>

#include "nli/errors.hpp"

namespace nli {

LinkProfile::LinkProfile(std::vector<Span> spans, double xi_pre,
                         bool manakov_factor_enabled)
    : spans_(std::move(spans)), xi_pre_(xi_pre), manakov_(manakov_factor_enabled) {
  if (spans_.empty()) throw ConfigError("link needs at least one span");
  if (!std::isfinite(xi_pre_)) throw ConfigError("xi_pre must be finite");

  double z = 0.0;
  double g = 1.0;
  double c = xi_pre_;
  for (std::size_t i = 0; i < spans_.size(); ++i) {
    const Span& s = spans_[i];
    std::ostringstream where;
    where << "span " << i << ": ";
    if (!(s.length > 0.0) || !std::isfinite(s.length))
      throw ConfigError(where.str() + "length must be > 0");
    if (!(s.alpha >= 0.0) || !std::isfinite(s.alpha))
      throw ConfigError(where.str() + "alpha must be >= 0");
    if (!(s.gamma >= 0.0) || !std::isfinite(s.gamma))
      throw ConfigError(where.str() + "gamma must be >= 0");
    if (!std::isfinite(s.beta2) || !std::isfinite(s.lumped_gain_db))
      throw ConfigError(where.str() + "beta2 and gain must be finite");

    starts_.push_back(z);
    start_gain_.push_back(g);
    start_dispersion_.push_back(c);
    z += s.length;
    g *= std::exp(-s.alpha * s.length) * std::pow(10.0, s.lumped_gain_db / 10.0);
    c -= s.beta2 * s.length;
  }
  total_length_ = z;
}

double LinkProfile::effective_gamma(const Span& span) const noexcept {
  return manakov_ ? span.gamma * (8.0 / 9.0) : span.gamma;
}

LinkProfile LinkProfile::with_manakov_factor(bool enabled) const {
  return LinkProfile(spans_, xi_pre_, enabled);
}

namespace {

// Index of the span containing z; interior boundaries belong to the next span.
std::size_t locate(const LinkProfile& link, double z) {
  if (!(z >= 0.0) || z > link.total_length()) {
    std::ostringstream msg;
    msg << "z = " << z << " m outside [0, " << link.total_length() << "]";
    throw DomainError(msg.str());
  }
  const auto& spans = link.spans();
  std::size_t i = spans.size() - 1;
  while (i > 0 && z < link.span_start(i)) --i;
  return i;
}

}  // namespace

double power_gain(const LinkProfile& link, double z) {
  const std::size_t i = locate(link, z);
  const double dz = z - link.span_start(i);
  return link.gain_at_span_start(i) * std::exp(-link.spans()[i].alpha * dz);
}

double cumulated_dispersion(const LinkProfile& link, double z) {
  const std::size_t i = locate(link, z);
  const double dz = z - link.span_start(i);
  return link.dispersion_at_span_start(i) - link.spans()[i].beta2 * dz;
}

namespace units {

double db_per_km_to_per_m(double db_per_km) {
  return db_per_km * std::log(10.0) / 10.0 / kKm;
}

double ps2_per_km_to_s2_per_m(double ps2_per_km) { return ps2_per_km * 1e-24 / kKm; }

double per_w_per_km_to_per_w_per_m(double v) { return v / kKm; }

}  // namespace units

}  // namespace nli

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nli/errors.hpp"
#include "nli/kernel.hpp"

using namespace nli;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kGamma = 1.3e-3;
constexpr double kGammaPrime = 8.0 / 9.0 * kGamma;

Span fiber(double km, double db_per_km, double beta2_ps2_per_km, double gain_db = 0.0,
           double gamma = kGamma) {
  return Span{km * units::kKm, units::ps2_per_km_to_s2_per_m(beta2_ps2_per_km),
              units::db_per_km_to_per_m(db_per_km), gamma, gain_db};
}

double rel(cdouble a, cdouble b) { return std::abs(a - b) / std::abs(b); }

// Composite Simpson over z with piecewise-constant parameters, sampled densely
// enough that the phase advances by well under a radian per panel.
cdouble simpson_kernel(const LinkProfile& link, double F, std::size_t panels_per_span) {
  const double w = 4.0 * std::numbers::pi * std::numbers::pi * F;
  cdouble total = 0.0;
  double z0 = 0.0;
  for (std::size_t i = 0; i < link.spans().size(); ++i) {
    const Span& s = link.spans()[i];
    const double g0 = link.gain_at_span_start(i);
    const double c0 = link.dispersion_at_span_start(i);
    const double gp = link.effective_gamma(s);
    auto f = [&](double t) {
      return gp * g0 * std::exp(-s.alpha * t) * std::polar(1.0, -(c0 - s.beta2 * t) * w);
    };
    const std::size_t n = 2 * panels_per_span;
    const double h = s.length / static_cast<double>(n);
    cdouble acc = f(0.0) + f(s.length);
    for (std::size_t k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(h * static_cast<double>(k));
    total += acc * h / 3.0;
    z0 += s.length;
  }
  return total;
}

}  // namespace

TEST_CASE("K(0) of a lossless span is gamma' L", "[kernel]") {
  const KernelModel m(LinkProfile({fiber(40, 0.0, -21.7)}));
  CHECK_THAT(m.quadrature(0.0).real(), WithinRel(kGammaPrime * 40e3, 1e-13));
  CHECK(m.quadrature(0.0).imag() == 0.0);
  CHECK_THAT(m.k0().real(), WithinRel(kGammaPrime * 40e3, 1e-14));
}

TEST_CASE("K(0) of a lossy span is gamma' (1 - exp(-alpha L)) / alpha", "[kernel]") {
  const KernelModel m(LinkProfile({fiber(100, 0.2, -21.7)}));
  const double a = units::db_per_km_to_per_m(0.2);
  const double expected = kGammaPrime * (1.0 - std::exp(-a * 100e3)) / a;
  CHECK_THAT(m.quadrature(0.0).real(), WithinRel(expected, 1e-12));
  CHECK_THAT(m.closed_form(0.0).real(), WithinRel(expected, 1e-13));
}

TEST_CASE("oscillatory cancellation at large F", "[kernel]") {
  const KernelModel m(LinkProfile({fiber(100, 0.2, -21.7)}));
  const cdouble k_small = m.quadrature(1e16);
  const cdouble k_large = m.quadrature(1e22);
  CHECK(std::abs(k_large) < std::abs(m.k0()));
  CHECK(std::abs(k_large) < std::abs(k_small));
}

TEST_CASE("dispersionless lossless span is flat in F", "[kernel][closed-form]") {
  const KernelModel m(LinkProfile({fiber(25, 0.0, 0.0)}));
  for (double F : {-1e22, -3e18, 0.0, 1e15, 7e20, 1e24})
    CHECK_THAT(m.closed_form(F).real(), WithinRel(kGammaPrime * 25e3, 1e-14));
}

TEST_CASE("N compensated identical spans give N gamma' Leff at F = 0", "[kernel][closed-form]") {
  // 80 km at 0.25 dB/km is exactly 20 dB
  const int n = 5;
  std::vector<Span> spans(n, fiber(80, 0.25, -21.7, 20.0));
  const KernelModel m{LinkProfile(spans)};
  const double a = units::db_per_km_to_per_m(0.25);
  const double leff = (1.0 - std::exp(-a * 80e3)) / a;
  CHECK_THAT(m.closed_form(0.0).real(), WithinRel(n * kGammaPrime * leff, 1e-13));
}

TEST_CASE("single lossy span matches the hand-integrated exponential", "[kernel][closed-form]") {
  const KernelModel m(LinkProfile({fiber(100, 0.2, -21.7)}));
  const double alpha = units::db_per_km_to_per_m(0.2);
  const double beta2 = units::ps2_per_km_to_s2_per_m(-21.7);
  const double F = 3.7e19;
  const double w = 4.0 * std::numbers::pi * std::numbers::pi * F;
  // C(s) = -beta2 s, integrand gamma' exp((-alpha + j beta2 w) s)
  const cdouble a(-alpha, beta2 * w);
  const cdouble k = kGammaPrime * (std::exp(a * 100e3) - 1.0) / a;
  CHECK(rel(m.closed_form(F), k) < 1e-12);
  CHECK(rel(m.quadrature(F), k) < 1e-11);
  CHECK(rel(m.eta(F), k / (kGammaPrime * (1.0 - std::exp(-alpha * 100e3)) / alpha)) < 1e-12);
}

TEST_CASE("closed form matches quadrature on random three-span links", "[kernel][cross-check]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> len(10, 120), loss(0.0, 0.3), b2(-30, 30), gamma(0.5, 2.0),
      gain(0, 25), logF(14, 22);
  for (int link_i = 0; link_i < 4; ++link_i) {
    std::vector<Span> spans;
    for (int s = 0; s < 3; ++s)
      spans.push_back(fiber(len(rng), loss(rng), b2(rng), gain(rng), gamma(rng) * 1e-3));
    const KernelModel m(LinkProfile(spans, b2(rng) * 1e-24 * 10.0));
    for (int i = 0; i < 50; ++i) {
      const double F = (i % 2 ? -1.0 : 1.0) * std::pow(10.0, logF(rng));
      CHECK(rel(m.closed_form(F), m.quadrature(F)) < 1e-9);
    }
  }
}

TEST_CASE("adaptive quadrature agrees with an independent Simpson rule", "[kernel][cross-check]") {
  const LinkProfile link({fiber(60, 0.2, -21.7, 12.0), fiber(35, 0.17, 16.0, 6.0), fiber(20, 0.5, -4.0)},
                         -1.2e-22);
  const KernelModel m(link);
  for (double F : {0.0, 2e17, -5e18, 4e19}) {
    const cdouble s = simpson_kernel(link, F, 20000);
    CHECK(rel(m.quadrature(F), s) < 1e-9);
  }
}

TEST_CASE("eta(0) is exactly one and eta is Hermitian", "[kernel][eta]") {
  const KernelModel m(LinkProfile({fiber(80, 0.2, -21.7, 16), fiber(50, 0.2, 5.0)}, 3e-23));
  CHECK(m.eta(0.0) == cdouble(1.0, 0.0));
  CHECK(normalized_kernel(m, 0.0) == cdouble(1.0, 0.0));
  for (double F : {1e15, 3.3e18, 2e20, 9e21}) {
    const cdouble p = m.eta(F), n = m.eta(-F);
    CHECK(std::abs(n - std::conj(p)) <= 1e-12 * std::abs(p));
    CHECK(std::abs(p) <= 1.0 + 1e-12);
  }
}

TEST_CASE("Manakov flag scales K by 8/9", "[kernel]") {
  const LinkProfile on({fiber(100, 0.2, -21.7)}, 0.0, true);
  const KernelModel a(on), b(on.with_manakov_factor(false));
  CHECK_THAT(a.k0().real() / b.k0().real(), WithinRel(8.0 / 9.0, 1e-15));
  // eta does not depend on the factor
  CHECK(rel(a.eta(1e20), b.eta(1e20)) < 1e-15);
}

TEST_CASE("nonlinear phase", "[kernel][phase]") {
  const KernelModel m(LinkProfile({fiber(100, 0.2, -21.7)}));
  const double k0 = m.k0().real();
  const auto a = nonlinear_phase(m, 1e-3, 1e-3, 1e-3);
  const auto b = nonlinear_phase(m, 2e-3, 1e-3, 1e-3);
  CHECK_THAT(b.phi_nl, WithinRel(2.0 * a.phi_nl, 1e-15));
  CHECK(a.phi_x == a.phi_y);
  CHECK_THAT(a.phi_x, WithinRel(3.0 * k0 * 1e-3, 1e-15));
  // a single polarization rotates as if it carried twice its power
  const auto c = nonlinear_phase(m, 1e-3, 1e-3, 0.0);
  CHECK_THAT(c.phi_x, WithinRel(2.0 * k0 * 1e-3, 1e-15));
  CHECK(c.phi_x > k0 * 1e-3);
  CHECK_THROWS_AS(nonlinear_phase(m, 0.0, 1e-3, 0.0), DomainError);
  CHECK_THROWS_AS(nonlinear_phase(m, 1e-3, -1.0, 0.0), DomainError);
}

TEST_CASE("quadrature reports failure beyond its cell budget", "[kernel][errors]") {
  QuadratureOptions opt;
  opt.max_cells_per_span = 4;
  const KernelModel m(LinkProfile({fiber(100, 0.2, -21.7)}), opt);
  try {
    (void)m.quadrature(1e22);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.achieved_error() > 0.0);
  }
  // closed form is unaffected
  CHECK(std::isfinite(std::abs(m.closed_form(1e22))));
}

TEST_CASE("links without nonlinearity are rejected", "[kernel][errors]") {
  CHECK_THROWS_AS(KernelModel(LinkProfile({fiber(10, 0.2, -21.7, 0.0, 0.0)})), ConfigError);
}

TEST_CASE("eta memo returns kernel values", "[kernel][memo]") {
  const KernelModel m(LinkProfile({fiber(100, 0.2, -21.7)}));
  EtaSquaredMemo memo(m);
  CHECK(memo(0.0) == 1.0);
  CHECK(memo(-0.0) == 1.0);
  CHECK(memo.size() == 1);
  CHECK(memo(2e19) == std::norm(m.eta(2e19)));
  CHECK(memo(2e19) == std::norm(m.eta(2e19)));
  CHECK(memo.size() == 2);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nli/errors.hpp"
#include "nli/gn_engine.hpp"

using namespace nli;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

LinkProfile dispersive_link() {
  return LinkProfile({Span{100e3, units::ps2_per_km_to_s2_per_m(-21.7), units::db_per_km_to_per_m(0.2),
                           1.3e-3, 20.0}});
}

// beta2 = 0 and xi_pre = 0 make eta identically one
LinkProfile flat_link() {
  return LinkProfile({Span{100e3, 0.0, units::db_per_km_to_per_m(0.2), 1.3e-3, 20.0}});
}

GnRequest request(PsdShape gx, PsdShape gy, LinkProfile link, std::vector<double> grid, double step,
                  bool phase = true) {
  return GnRequest{DualPolPsd(std::move(gx), std::move(gy), 1e-3), KernelModel(std::move(link)),
                   std::move(grid), phase, step};
}

// Brute-force midpoint sum of A(a) B(b) C(a + b - f) over a square box, with
// no clipping or support logic.
double brute_triple(const PsdShape& A, const PsdShape& B, const PsdShape& C, double f, double lo,
                    double hi, std::size_t n) {
  const double h = (hi - lo) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = lo + h * (static_cast<double>(i) + 0.5);
    const double va = evaluate(A, a);
    if (va == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double b = lo + h * (static_cast<double>(j) + 0.5);
      sum += va * evaluate(B, b) * evaluate(C, a + b - f);
    }
  }
  return sum * h * h;
}

}  // namespace

TEST_CASE("zero input gives zero output", "[gn]") {
  const auto req = request(PsdShape::zero(), PsdShape::zero(), dispersive_link(), {-1e9, 0.0, 5e9}, 1e8);
  const auto r = nli_psd_x(req);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.spm[i] == 0.0);
    CHECK(r.xpolm[i] == 0.0);
    CHECK(r.phase[i] == 0.0);
    CHECK(r.total[i] == 0.0);
  }
}

TEST_CASE("hexagonal overlap with a flat kernel", "[gn][oracle]") {
  const double B = 32e9, G0 = 1.0 / B;
  const PsdShape rect(Rectangular{0.0, B, G0});
  const auto r = nli_psd_x(request(rect, PsdShape::zero(), flat_link(), {0.0}, B / 64));
  const double expected = 2.0 * 0.75 * G0 * G0 * G0 * B * B;
  CHECK_THAT(r.spm[0], WithinRel(expected, 1e-3));

  // independent gridder at 40x the resolution
  const double brute = 2.0 * brute_triple(rect, rect, rect, 0.0, -B, B, 2 * 64 * 40);
  CHECK_THAT(brute, WithinRel(expected, 1e-3));
  CHECK_THAT(r.spm[0], WithinRel(brute, 1e-3));
}

TEST_CASE("flat kernel triple self-correlation off center", "[gn][oracle]") {
  const PsdShape rc(RaisedCosine{0.5e9, 20e9, 0.3, 1.0 / 20e9});
  const double step = rc.support().width() / 64;
  for (double f : {0.0, 7e9, -15e9}) {
    const auto r = nli_psd_x(request(rc, PsdShape::zero(), flat_link(), {f}, step));
    const double brute = 2.0 * brute_triple(rc, rc, rc, f, -30e9, 30e9, 6000);
    CHECK_THAT(r.spm[0], WithinRel(brute, 1e-3));
  }
}

TEST_CASE("phase term with a single polarization", "[gn]") {
  const PsdShape rect(Rectangular{0.0, 10e9, 0.7e-10});
  const auto r = nli_psd_x(request(rect, PsdShape::zero(), dispersive_link(), {-2e9, 0.0, 6e9}, 1e8));
  const double px = power_integral(rect);
  CHECK_THAT(r.phase[0], WithinRel(4.0 * px * px * 0.7e-10, 1e-14));
  CHECK_THAT(r.phase[1], WithinRel(4.0 * px * px * 0.7e-10, 1e-14));
  CHECK(r.phase[2] == 0.0);
  CHECK(r.xpolm[0] == 0.0);
}

TEST_CASE("phase toggle changes only the total", "[gn]") {
  const PsdShape gx(Rectangular{0.0, 12e9, 1.0 / 12e9});
  const PsdShape gy(RaisedCosine{1e9, 10e9, 0.2, 0.4 / 10e9});
  const std::vector<double> grid{-8e9, -1e9, 0.0, 3e9, 9e9};
  const auto on = nli_psd_x(request(gx, gy, dispersive_link(), grid, 0.2e9, true));
  const auto off = nli_psd_x(request(gx, gy, dispersive_link(), grid, 0.2e9, false));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(on.spm[i] == off.spm[i]);
    CHECK(on.xpolm[i] == off.xpolm[i]);
    CHECK(on.total[i] - off.total[i] == on.phase[i]);
    CHECK(off.total[i] == off.spm[i] + off.xpolm[i]);
  }
}

TEST_CASE("identical polarizations give identical outputs", "[gn][symmetry]") {
  const PsdShape g(RaisedCosine{0.0, 16e9, 0.1, 0.5 / 16e9});
  const auto req = request(g, g, dispersive_link(), {-10e9, 0.0, 2.5e9}, 0.25e9);
  const auto x = nli_psd_x(req), y = nli_psd_y(req);
  CHECK(x.total == y.total);
  CHECK(x.spm == y.spm);
}

TEST_CASE("y output with an empty x polarization", "[gn][symmetry]") {
  const PsdShape g(Rectangular{0.0, 16e9, 1.0 / 16e9});
  const auto req = request(PsdShape::zero(), g, dispersive_link(), {0.0, 4e9}, 0.25e9);
  const auto y = nli_psd_y(req);
  const auto self = nli_psd_x(request(g, PsdShape::zero(), dispersive_link(), {0.0, 4e9}, 0.25e9));
  for (int i = 0; i < 2; ++i) {
    CHECK(y.xpolm[i] == 0.0);
    CHECK(y.spm[i] == self.spm[i]);
    CHECK(y.spm[i] > 0.0);
  }
}

TEST_CASE("y output equals x output of the swapped request", "[gn][symmetry]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int t = 0; t < 3; ++t) {
    const PsdShape gx(RaisedCosine{u(rng) * 1e9, 10e9 + 8e9 * u(rng), 0.4 * u(rng), u(rng) / 12e9});
    const PsdShape gy(Tabulated{{-9e9, -2e9, 4e9, 8e9}, {0.0, u(rng) * 1e-10, u(rng) * 1e-10, 0.0}});
    const std::vector<double> grid{-12e9, -3e9, 0.0, 5e9};
    auto req = request(gx, gy, dispersive_link(), grid, 0.3e9);
    const auto y = nli_psd_y(req);
    req.psd = req.psd.swapped();
    const auto xs = nli_psd_x(req);
    CHECK(y.total == xs.total);
    CHECK(y.phase == xs.phase);
  }
}

TEST_CASE("outputs scale as the cube of the input", "[gn][scaling]") {
  const PsdShape gx(RaisedCosine{0.0, 16e9, 0.2, 1.0 / 16e9});
  const PsdShape gy(Rectangular{0.5e9, 12e9, 0.3 / 12e9});
  const double c = 1.7;
  const std::vector<double> grid{-6e9, 0.0, 4e9};
  const auto a = nli_psd_x(request(gx, gy, dispersive_link(), grid, 0.25e9));
  const auto b = nli_psd_x(request(gx.scaled(c), gy.scaled(c), dispersive_link(), grid, 0.25e9));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK_THAT(b.spm[i], WithinRel(c * c * c * a.spm[i], 1e-12));
    CHECK_THAT(b.xpolm[i], WithinRel(c * c * c * a.xpolm[i], 1e-12));
    CHECK_THAT(b.phase[i], WithinRel(c * c * c * a.phase[i], 1e-12));
  }
}

TEST_CASE("halving the inner step barely moves the result", "[gn][convergence]") {
  const PsdShape gx(RaisedCosine{0.0, 16e9, 0.2, 1.0 / 16e9});
  const PsdShape gy(RaisedCosine{0.0, 16e9, 0.2, 0.5 / 16e9});
  const std::vector<double> grid{-10e9, 0.0, 6e9};
  const double step = gx.support().width() / 64;
  const auto coarse = nli_psd_x(request(gx, gy, dispersive_link(), grid, step));
  const auto fine = nli_psd_x(request(gx, gy, dispersive_link(), grid, step / 2));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK_THAT(fine.spm[i], WithinRel(coarse.spm[i], 1e-3));
    CHECK_THAT(fine.xpolm[i], WithinRel(coarse.xpolm[i], 1e-3));
  }
}

TEST_CASE("quadrature and closed-form kernels give the same PSD", "[gn]") {
  const PsdShape gx(Rectangular{0.0, 16e9, 1.0 / 16e9});
  auto req = request(gx, PsdShape::zero(), dispersive_link(), {0.0, 5e9}, 0.5e9);
  const auto a = nli_psd_x(req);
  req.quadrature_kernel = true;
  const auto b = nli_psd_x(req);
  for (int i = 0; i < 2; ++i) CHECK_THAT(b.spm[i], WithinRel(a.spm[i], 1e-9));
}

TEST_CASE("results do not depend on the worker count", "[gn][determinism]") {
  const PsdShape gx(RaisedCosine{0.0, 16e9, 0.2, 1.0 / 16e9});
  const PsdShape gy(Rectangular{0.0, 14e9, 0.5 / 14e9});
  std::vector<double> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(i * 1.5e9);
  const auto req = request(gx, gy, dispersive_link(), grid, 0.3e9);
  const auto one = nli_psd_x(req, Execution{1});
  const auto four = nli_psd_x(req, Execution{4});
  CHECK(one.total == four.total);
  CHECK(one.spm == four.spm);
}

TEST_CASE("absolute PSD carries P0 Phi^2", "[gn]") {
  const PsdShape gx(Rectangular{0.0, 16e9, 1.0 / 16e9});
  const auto req = request(gx, PsdShape::zero(), dispersive_link(), {0.0}, 0.5e9);
  const auto r = nli_psd_x(req);
  const double phi = 1e-3 * req.kernel.k0().real();
  CHECK_THAT(r.phi_nl_sq, WithinRel(phi * phi, 1e-15));
  CHECK_THAT(r.absolute(0), WithinRel(1e-3 * phi * phi * r.total[0], 1e-15));
}

TEST_CASE("request validation", "[gn][errors]") {
  const PsdShape gx(Rectangular{0.0, 16e9, 1.0 / 16e9});
  CHECK_THROWS_AS(nli_psd_x(request(gx, PsdShape::zero(), dispersive_link(), {0.0}, 0.0)), ConfigError);
  CHECK_THROWS_AS(nli_psd_x(request(gx, PsdShape::zero(), dispersive_link(), {0.0}, 2e9)), ConfigError);
  CHECK_NOTHROW(nli_psd_x(request(gx, PsdShape::zero(), dispersive_link(), {0.0}, 1e9)));
  CHECK_THROWS_AS(nli_psd_x(request(gx, PsdShape::zero(), dispersive_link(), {NAN}, 1e8)), ConfigError);
}

TEST_CASE("phase term coefficient", "[gn][phase]") {
  CHECK(phase_term_coefficient(1.0, 0.0) == 4.0);
  CHECK(phase_term_coefficient(1.0, 1.0) == 9.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng), y = u(rng);
    const double expanded = 4 * x * x + 4 * x * y + y * y;
    CHECK_THAT(phase_term_coefficient(x, y), WithinRel(expanded, 1e-15) || WithinAbs(expanded, 1e-300));
  }
  CHECK_THROWS_AS(phase_term_coefficient(-1.0, 0.0), DomainError);
}

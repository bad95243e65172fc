#include "nli/kernel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nli/errors.hpp"

namespace nli {

namespace {

constexpr double kTwoPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
// Maximum phase advance of the integrand per initial quadrature cell.
constexpr double kMaxPhasePerCell = std::numbers::pi / 8.0;
constexpr int kMaxBisectionDepth = 60;

// Neumaier-compensated complex accumulator.
class ComplexSum {
 public:
  void add(cdouble v) {
    add_part(re_, re_c_, v.real());
    add_part(im_, im_c_, v.imag());
  }
  cdouble value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

// (exp(a L) - 1) / a, accurate for small |a L|.
cdouble exp_integral(cdouble a, double length) {
  const cdouble x = a * length;
  if (std::abs(x) < 0.5) {
    // L * sum_{n>=0} x^n / (n+1)!
    cdouble term = 1.0;
    cdouble sum = 1.0;
    for (int n = 1; n < 30; ++n) {
      term *= x / static_cast<double>(n + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return length * sum;
  }
  return (std::exp(x) - 1.0) / a;
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct SpanIntegrand {
  double amplitude;   // gamma' G at span start
  double alpha;
  double c_start;     // C at span start
  double beta2;
  double omega_sq_F;  // (2 pi)^2 F

  cdouble operator()(double t) const {
    const double phase = -(c_start - beta2 * t) * omega_sq_F;
    return amplitude * std::exp(-alpha * t) * cdouble(std::cos(phase), std::sin(phase));
  }
  double magnitude(double t) const { return amplitude * std::exp(-alpha * t); }
};

struct CellResult {
  cdouble value;
  double error;
  double l1;
};

CellResult gauss_kronrod(const SpanIntegrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const cdouble fc = f(center);
  cdouble kronrod = fc * kWgk[7];
  cdouble gauss = fc * kWg[3];
  double l1 = f.magnitude(center) * kWgk[7];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const cdouble f1 = f(center - dx);
    const cdouble f2 = f(center + dx);
    kronrod += (f1 + f2) * kWgk[j];
    l1 += (f.magnitude(center - dx) + f.magnitude(center + dx)) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half), l1 * half};
}

class SpanQuadrature {
 public:
  SpanQuadrature(const SpanIntegrand& f, const QuadratureOptions& opt)
      : f_(f), opt_(opt) {}

  void integrate(double a, double b, int depth) {
    const CellResult r = gauss_kronrod(f_, a, b);
    const bool converged = r.error <= opt_.relative_tolerance * r.l1;
    if (converged || exhausted_ || depth > kMaxBisectionDepth) {
      if (!converged) {
        exhausted_ = true;
        unresolved_error_ += r.error;
      }
      sum_.add(r.value);
      l1_ += r.l1;
      return;
    }
    if (cells_ + 1 > opt_.max_cells_per_span) {
      exhausted_ = true;
      unresolved_error_ += r.error;
      sum_.add(r.value);
      l1_ += r.l1;
      return;
    }
    ++cells_;
    const double mid = 0.5 * (a + b);
    integrate(a, mid, depth + 1);
    integrate(mid, b, depth + 1);
  }

  void start(std::size_t n) { cells_ = n; }
  bool exhausted() const { return exhausted_; }
  cdouble value() const { return sum_.value(); }
  double relative_error() const { return l1_ > 0 ? unresolved_error_ / l1_ : 0.0; }

 private:
  const SpanIntegrand& f_;
  const QuadratureOptions& opt_;
  ComplexSum sum_;
  double l1_ = 0.0;
  double unresolved_error_ = 0.0;
  std::size_t cells_ = 0;
  bool exhausted_ = false;
};

}  // namespace

KernelModel::KernelModel(LinkProfile link, QuadratureOptions options)
    : link_(std::move(link)), options_(options) {
  if (!(options_.relative_tolerance >= 0.0))
    throw ConfigError("quadrature tolerance must be >= 0");
  if (options_.max_cells_per_span == 0)
    throw ConfigError("quadrature cell budget must be positive");
  k0_ = closed_form(0.0);
  if (!(k0_.real() > 0.0))
    throw ConfigError("K(0) vanishes: the link needs gamma > 0 somewhere");
}

cdouble KernelModel::closed_form(double F) const {
  const double wF = kTwoPiSq * F;
  ComplexSum total;
  const auto& spans = link_.spans();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    const double amplitude = link_.effective_gamma(s) * link_.gain_at_span_start(i);
    if (amplitude == 0.0) continue;
    const double start_phase = -link_.dispersion_at_span_start(i) * wF;
    const cdouble rate(-s.alpha, s.beta2 * wF);
    total.add(amplitude * cdouble(std::cos(start_phase), std::sin(start_phase)) *
              exp_integral(rate, s.length));
  }
  return total.value();
}

cdouble KernelModel::quadrature(double F) const {
  const double wF = kTwoPiSq * F;
  ComplexSum total;
  const auto& spans = link_.spans();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    const SpanIntegrand f{link_.effective_gamma(s) * link_.gain_at_span_start(i), s.alpha,
                          link_.dispersion_at_span_start(i), s.beta2, wF};
    if (f.amplitude == 0.0) continue;

    const double total_phase = std::abs(s.beta2 * wF) * s.length;
    double wanted = std::ceil(total_phase / kMaxPhasePerCell);
    if (!(wanted >= 1.0)) wanted = 1.0;

    SpanQuadrature quad(f, options_);
    const bool over_budget = wanted > static_cast<double>(options_.max_cells_per_span);
    const std::size_t n = over_budget ? options_.max_cells_per_span
                                      : static_cast<std::size_t>(wanted);
    quad.start(n);
    const double h = s.length / static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c) {
      const double a = h * static_cast<double>(c);
      const double b = c + 1 == n ? s.length : h * static_cast<double>(c + 1);
      // Over budget: evaluate once per cell to report the achieved error.
      quad.integrate(a, b, over_budget ? kMaxBisectionDepth + 1 : 0);
    }
    if (over_budget || quad.exhausted()) {
      std::ostringstream msg;
      msg << "kernel quadrature did not converge at F = " << F << " Hz^2 in span " << i
          << " (cell budget " << options_.max_cells_per_span << ")";
      const double achieved = over_budget ? std::max(quad.relative_error(), 1.0)
                                          : quad.relative_error();
      throw ConvergenceError(msg.str(), achieved);
    }
    total.add(quad.value());
  }
  return total.value();
}

cdouble KernelModel::eta(double F) const {
  return closed_form(F) / k0_;
}

cdouble kernel_quadrature(const KernelModel& model, double F) { return model.quadrature(F); }
cdouble kernel_closed_form(const KernelModel& model, double F) { return model.closed_form(F); }
cdouble normalized_kernel(const KernelModel& model, double F) { return model.eta(F); }

NonlinearPhase nonlinear_phase(const KernelModel& model, double p0, double px, double py) {
  if (!(p0 > 0.0)) throw DomainError("reference power p0 must be > 0");
  if (!(px >= 0.0) || !(py >= 0.0)) throw DomainError("polarization powers must be >= 0");
  const double k0 = model.k0().real();
  return {p0, p0 * k0, k0 * (2.0 * px + py), k0 * (2.0 * py + px)};
}

double EtaSquaredMemo::operator()(double F) {
  if (F == 0.0) F = 0.0;  // fold -0.0
  auto it = memo_.find(F);
  if (it != memo_.end()) return it->second;
  const double v = std::norm(model_->eta(F));
  memo_.emplace(F, v);
  return v;
}

}  // namespace nli

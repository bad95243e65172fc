#include "nli/gn_engine.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "nli/errors.hpp"

namespace nli {

namespace {

struct Point {
  double a, b;
};

// Convex polygon with at most 8 vertices (rectangle clipped by two half-planes).
struct Polygon {
  std::array<Point, 8> v{};
  int n = 0;
};

// Keeps the part of `in` where sign * (a + b - level) <= 0.
Polygon clip_sum(const Polygon& in, double level, double sign) {
  Polygon out;
  for (int i = 0; i < in.n; ++i) {
    const Point p = in.v[i];
    const Point q = in.v[(i + 1) % in.n];
    const double dp = sign * (p.a + p.b - level);
    const double dq = sign * (q.a + q.b - level);
    if (dp <= 0.0) out.v[out.n++] = p;
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double t = dp / (dp - dq);
      out.v[out.n++] = {p.a + t * (q.a - p.a), p.b + t * (q.b - p.b)};
    }
  }
  return out;
}

struct Piece {
  double area = 0.0;
  Point centroid{};
};

Piece area_and_centroid(const Polygon& poly) {
  double twice_area = 0.0, ca = 0.0, cb = 0.0;
  for (int i = 0; i < poly.n; ++i) {
    const Point p = poly.v[i];
    const Point q = poly.v[(i + 1) % poly.n];
    const double cross = p.a * q.b - q.a * p.b;
    twice_area += cross;
    ca += (p.a + q.a) * cross;
    cb += (p.b + q.b) * cross;
  }
  if (twice_area <= 0.0) return {};
  return {0.5 * twice_area, {ca / (3.0 * twice_area), cb / (3.0 * twice_area)}};
}

// Cells of width `step` starting at the support edge; the last cell is cut at hi.
std::size_t cell_count(const Support& s, double step) {
  const double n = std::ceil(s.width() / step * (1.0 - 1e-12));
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

// II weight(a, b) A(a) B(b) C(a + b - f) over the support intersection.
template <class Weight>
double overlap(const PsdShape& A, const PsdShape& B, const PsdShape& C, double f,
               double step, Weight&& weight) {
  if (A.is_zero() || B.is_zero() || C.is_zero()) return 0.0;
  const Support sa = A.support(), sb = B.support(), sc = C.support();
  const double sum_lo = f + sc.lo;
  const double sum_hi = f + sc.hi;
  if (sa.lo + sb.lo > sum_hi || sa.hi + sb.hi < sum_lo) return 0.0;

  const std::size_t na = cell_count(sa, step);
  const std::size_t nb = cell_count(sb, step);
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const double a0 = sa.lo + step * static_cast<double>(i);
    const double a1 = i + 1 == na ? sa.hi : std::min(sa.hi, a0 + step);
    for (std::size_t j = 0; j < nb; ++j) {
      const double b0 = sb.lo + step * static_cast<double>(j);
      const double b1 = j + 1 == nb ? sb.hi : std::min(sb.hi, b0 + step);
      if (a0 + b0 >= sum_hi || a1 + b1 <= sum_lo) continue;

      Piece piece;
      if (a0 + b0 >= sum_lo && a1 + b1 <= sum_hi) {
        piece = {(a1 - a0) * (b1 - b0), {0.5 * (a0 + a1), 0.5 * (b0 + b1)}};
      } else {
        Polygon cell;
        cell.v[0] = {a0, b0};
        cell.v[1] = {a1, b0};
        cell.v[2] = {a1, b1};
        cell.v[3] = {a0, b1};
        cell.n = 4;
        piece = area_and_centroid(clip_sum(clip_sum(cell, sum_hi, 1.0), sum_lo, -1.0));
        if (piece.area <= 0.0) continue;
      }
      const double ca = piece.centroid.a, cb = piece.centroid.b;
      const double value = evaluate(A, ca) * evaluate(B, cb) * evaluate(C, ca + cb - f);
      if (value == 0.0) continue;
      const double x = piece.area * value * weight(ca - f, cb - f);
      const double t = sum + x;
      comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
  }
  return sum + comp;
}

NliPsdResult empty_result(const GnRequest& req) {
  NliPsdResult r;
  const std::size_t n = req.output_grid.size();
  r.frequency = req.output_grid;
  r.spm.assign(n, 0.0);
  r.xpolm.assign(n, 0.0);
  r.phase.assign(n, 0.0);
  r.total.assign(n, 0.0);
  r.phase_included = req.include_phase_term;
  const double phi = req.psd.p0() * req.kernel.k0().real();
  r.phi_nl_sq = phi * phi;
  r.p0 = req.psd.p0();
  return r;
}

}  // namespace

double phase_term_coefficient(double px_hat, double py_hat) {
  if (!(px_hat >= 0.0) || !(py_hat >= 0.0))
    throw DomainError("power integrals must be >= 0");
  const double s = 2.0 * px_hat + py_hat;
  return s * s;
}

void validate(const GnRequest& req) {
  for (double f : req.output_grid)
    if (!std::isfinite(f)) throw ConfigError("gn: output grid values must be finite");
  if (!(req.inner_grid_step > 0.0) || !std::isfinite(req.inner_grid_step))
    throw ConfigError("gn: inner_grid_step must be > 0");
  for (const PsdShape* s : {&req.psd.gx(), &req.psd.gy()}) {
    if (s->is_zero()) continue;
    if (req.inner_grid_step > s->support().width() / 16.0 * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "gn: inner_grid_step " << req.inner_grid_step
          << " Hz exceeds 1/16 of the support width " << s->support().width() << " Hz";
      throw ConfigError(msg.str());
    }
  }
}

double triple_overlap_integral(const PsdShape& a, const PsdShape& b, const PsdShape& c,
                               double f, double step) {
  if (!(step > 0.0)) throw ConfigError("gn: step must be > 0");
  return overlap(a, b, c, f, step, [](double, double) { return 1.0; });
}

NliPsdResult nli_psd_x(const GnRequest& req, Execution exec) {
  validate(req);
  NliPsdResult r = empty_result(req);
  const PsdShape& gx = req.psd.gx();
  const PsdShape& gy = req.psd.gy();
  const double phase_coef = phase_term_coefficient(req.psd.px_hat(), req.psd.py_hat());

  const std::size_t n = req.output_grid.size();
  std::vector<EtaSquaredMemo> memos(worker_count(n, exec.threads), EtaSquaredMemo(req.kernel));

  parallel_for_workers(n, exec.threads, [&](std::size_t w, std::size_t i) {
    const double f = req.output_grid[i];
    auto eta_sq = [&](double f1, double f2) {
      if (!req.quadrature_kernel) return memos[w](f1 * f2);
      try {
        return std::norm(req.kernel.quadrature(f1 * f2) / req.kernel.k0());
      } catch (const ConvergenceError& e) {
        std::ostringstream msg;
        msg << e.what() << " [f1 = " << f1 << " Hz, f2 = " << f2 << " Hz]";
        throw ConvergenceError(msg.str(), e.achieved_error());
      }
    };
    r.spm[i] = 2.0 * overlap(gx, gx, gx, f, req.inner_grid_step, eta_sq);
    r.xpolm[i] = overlap(gx, gy, gy, f, req.inner_grid_step, eta_sq);
    r.phase[i] = evaluate(gx, f) * phase_coef;
    r.total[i] = r.spm[i] + r.xpolm[i] + (req.include_phase_term ? r.phase[i] : 0.0);
  });
  return r;
}

NliPsdResult nli_psd_y(const GnRequest& req, Execution exec) {
  GnRequest swapped = req;
  swapped.psd = req.psd.swapped();
  return nli_psd_x(swapped, exec);
}

}  // namespace nli

#include "nli/mc_oracle.hpp"

#include <cmath>
#include <sstream>

#include "nli/errors.hpp"
#include "nli/random.hpp"

namespace nli {

namespace {

constexpr std::size_t kTrialsPerBlock = 32;

int first_index(std::size_t num_lines) { return -static_cast<int>(num_lines / 2); }

// eta(p f0^2) for every integer offset product p = m n reachable on the grid.
class EtaTable {
 public:
  EtaTable(const KernelModel& kernel, std::size_t num_lines, double f0)
      : span_(static_cast<long>(num_lines) - 1) {
    const long max_p = span_ * span_;
    values_.resize(static_cast<std::size_t>(2 * max_p + 1));
    const double f0_sq = f0 * f0;
    for (long p = -max_p; p <= max_p; ++p)
      values_[static_cast<std::size_t>(p + max_p)] = kernel.eta(static_cast<double>(p) * f0_sq);
  }
  cdouble operator()(long m, long n) const {
    return values_[static_cast<std::size_t>(m * n + span_ * span_)];
  }

 private:
  long span_;
  std::vector<cdouble> values_;
};

// B(k) = f0^2 sum eta (..) for both polarizations, in units of -j Phi_NL.
// The bracket U_x*(i2) U_x(i3) + U_y*(i2) U_y(i3) is shared by X and Y.
void rp1_sums(const SpectralField& field, const EtaTable& eta, std::vector<cdouble>& bx,
              std::vector<cdouble>& by) {
  const long m_lines = static_cast<long>(field.size());
  bx.assign(field.size(), 0.0);
  by.assign(field.size(), 0.0);
  std::vector<long> active;
  for (long i = 0; i < m_lines; ++i)
    if (field.x[i] != 0.0 || field.y[i] != 0.0) active.push_back(i);
  const double w = field.f0 * field.f0;

  for (long k = 0; k < m_lines; ++k) {
    cdouble sx = 0.0, sy = 0.0;
    for (long i1 : active) {
      cdouble inner = 0.0;
      for (long i3 : active) {
        const long i2 = i1 + i3 - k;
        if (i2 < 0 || i2 >= m_lines) continue;
        const cdouble bracket = std::conj(field.x[i2]) * field.x[i3] +
                                std::conj(field.y[i2]) * field.y[i3];
        if (bracket == 0.0) continue;
        inner += eta(i1 - k, i3 - k) * bracket;
      }
      sx += field.x[i1] * inner;
      sy += field.y[i1] * inner;
    }
    bx[k] = w * sx;
    by[k] = w * sy;
  }
}

void check_field(const SpectralField& field, const TrialConfig& cfg) {
  if (field.size() != cfg.num_lines || field.y.size() != cfg.num_lines || field.f0 != cfg.f0)
    throw ConfigError("mc: field does not match the trial grid");
}

double phi_nl(const KernelModel& kernel, const DualPolPsd& psd) {
  return psd.p0() * kernel.k0().real();
}

// Welford accumulator per grid point, merged across trial blocks in order.
struct Moments {
  std::vector<double> mean;
  std::vector<double> m2;
  std::size_t count = 0;

  explicit Moments(std::size_t n) : mean(n, 0.0), m2(n, 0.0) {}

  void add(const std::vector<double>& sample) {
    ++count;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double d = sample[i] - mean[i];
      mean[i] += d / static_cast<double>(count);
      m2[i] += d * (sample[i] - mean[i]);
    }
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    const double n = static_cast<double>(count + o.count);
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double d = o.mean[i] - mean[i];
      mean[i] += d * static_cast<double>(o.count) / n;
      m2[i] += o.m2[i] + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
    }
    count += o.count;
  }

  PsdEstimate finish(std::vector<double> frequency) const {
    PsdEstimate e;
    e.frequency = std::move(frequency);
    e.mean = mean;
    e.std_error.assign(mean.size(), 0.0);
    e.trials = count;
    if (count > 1)
      for (std::size_t i = 0; i < mean.size(); ++i)
        e.std_error[i] = std::sqrt(std::max(m2[i], 0.0) / static_cast<double>(count - 1) /
                                 static_cast<double>(count));
    return e;
  }
};

// Per-trial normalized samples for X and Y.
template <class Sampler>
DualPolEstimate run_trials(const TrialConfig& cfg, const DualPolPsd& psd, Execution exec,
                           Sampler&& sampler) {
  validate(cfg, psd);
  const std::size_t n = cfg.num_lines;
  const std::size_t blocks = (cfg.num_trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  std::vector<Moments> mx(blocks, Moments(n)), my(blocks, Moments(n));

  parallel_for(blocks, exec.threads, [&](std::size_t b) {
    std::vector<double> sx(n), sy(n);
    const std::size_t end = std::min(cfg.num_trials, (b + 1) * kTrialsPerBlock);
    for (std::size_t t = b * kTrialsPerBlock; t < end; ++t) {
      sampler(draw_field(cfg, psd, t), sx, sy);
      mx[b].add(sx);
      my[b].add(sy);
    }
  });

  Moments tx(n), ty(n);
  for (std::size_t b = 0; b < blocks; ++b) {
    tx.merge(mx[b]);
    ty.merge(my[b]);
  }
  const auto freq = grid_frequencies(cfg);
  return {tx.finish(freq), ty.finish(freq)};
}

}  // namespace

void validate(const TrialConfig& cfg, const DualPolPsd& psd) {
  if (!(cfg.f0 > 0.0) || !std::isfinite(cfg.f0)) throw ConfigError("mc: f0 must be > 0");
  if (cfg.num_lines < 8) throw ConfigError("mc: at least 8 lines required");
  if (cfg.num_lines > 1024) throw ConfigError("mc: at most 1024 lines supported");
  if (cfg.num_trials < 1) throw ConfigError("mc: at least one trial required");
  if (!(cfg.edge_margin >= 0.0 && cfg.edge_margin < 1.0))
    throw ConfigError("mc: edge_margin must be in [0, 1)");
  const double half_grid = 0.5 * static_cast<double>(cfg.num_lines) * cfg.f0;
  for (const PsdShape* s : {&psd.gx(), &psd.gy()}) {
    if (s->is_zero()) continue;
    const Support sup = s->support();
    const double reach = 1.5 * std::max(std::abs(sup.lo), std::abs(sup.hi));
    if (reach > half_grid) {
      std::ostringstream msg;
      msg << "mc: grid half-width " << half_grid << " Hz does not cover 1.5x the PSD support ["
          << sup.lo << ", " << sup.hi << "] Hz; increase lines or spacing";
      throw ConfigError(msg.str());
    }
  }
}

std::vector<double> grid_frequencies(const TrialConfig& cfg) {
  std::vector<double> f(cfg.num_lines);
  const int k0 = first_index(cfg.num_lines);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cfg.f0 * (k0 + static_cast<int>(i));
  return f;
}

SpectralField draw_field(const TrialConfig& cfg, const DualPolPsd& psd,
                         std::uint64_t trial_index) {
  const Philox4x32 rng(cfg.seed);
  SpectralField field;
  field.f0 = cfg.f0;
  field.first_index = first_index(cfg.num_lines);
  field.x.assign(cfg.num_lines, 0.0);
  field.y.assign(cfg.num_lines, 0.0);
  for (std::size_t i = 0; i < cfg.num_lines; ++i) {
    const double f = field.frequency(i);
    const double gx = evaluate(psd.gx(), f);
    const double gy = evaluate(psd.gy(), f);
    const auto line = static_cast<std::uint32_t>(i);
    if (gx > 0.0)
      field.x[i] = circular_normal(rng, {trial_index, cfg.polarization_stream[0], line}) *
                   std::sqrt(gx / cfg.f0);
    if (gy > 0.0)
      field.y[i] = circular_normal(rng, {trial_index, cfg.polarization_stream[1], line}) *
                   std::sqrt(gy / cfg.f0);
  }
  return field;
}

SpectralField rp1_perturbation(const SpectralField& field, const KernelModel& kernel,
                               const TrialConfig& cfg, const DualPolPsd& psd) {
  check_field(field, cfg);
  const EtaTable eta(kernel, field.size(), field.f0);
  SpectralField out = field;
  rp1_sums(field, eta, out.x, out.y);
  const cdouble scale(0.0, -phi_nl(kernel, psd));
  for (auto& v : out.x) v *= scale;
  for (auto& v : out.y) v *= scale;
  return out;
}

SpectralField erp1_perturbation(const SpectralField& field, const KernelModel& kernel,
                                const TrialConfig& cfg, const DualPolPsd& psd) {
  check_field(field, cfg);
  const EtaTable eta(kernel, field.size(), field.f0);
  SpectralField out = field;
  rp1_sums(field, eta, out.x, out.y);
  const cdouble scale(0.0, -phi_nl(kernel, psd));
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.x[i] = scale * (out.x[i] - psd.pt_hat() * field.x[i]);
    out.y[i] = scale * (out.y[i] - psd.pt_hat_y() * field.y[i]);
  }
  return out;
}

DualPolEstimate estimate_nli_psd(const TrialConfig& cfg, const DualPolPsd& psd,
                                 const KernelModel& kernel, Execution exec) {
  validate(cfg, psd);
  const EtaTable eta(kernel, cfg.num_lines, cfg.f0);
  const bool erp = cfg.mode == PerturbationMode::DpErp1;
  const double ax = erp ? psd.pt_hat() : 0.0;
  const double ay = erp ? psd.pt_hat_y() : 0.0;
  return run_trials(cfg, psd, exec,
                    [&](const SpectralField& field, std::vector<double>& sx,
                        std::vector<double>& sy) {
                      std::vector<cdouble> bx, by;
                      rp1_sums(field, eta, bx, by);
                      for (std::size_t i = 0; i < bx.size(); ++i) {
                        sx[i] = cfg.f0 * std::norm(bx[i] - ax * field.x[i]);
                        sy[i] = cfg.f0 * std::norm(by[i] - ay * field.y[i]);
                      }
                    });
}

DualPolEstimate estimate_phase_difference(const TrialConfig& cfg, const DualPolPsd& psd,
                                          const KernelModel& kernel, Execution exec) {
  validate(cfg, psd);
  const EtaTable eta(kernel, cfg.num_lines, cfg.f0);
  return run_trials(cfg, psd, exec,
                    [&](const SpectralField& field, std::vector<double>& sx,
                        std::vector<double>& sy) {
                      std::vector<cdouble> bx, by;
                      rp1_sums(field, eta, bx, by);
                      for (std::size_t i = 0; i < bx.size(); ++i) {
                        sx[i] = cfg.f0 * (std::norm(bx[i]) -
                                          std::norm(bx[i] - psd.pt_hat() * field.x[i]));
                        sy[i] = cfg.f0 * (std::norm(by[i]) -
                                          std::norm(by[i] - psd.pt_hat_y() * field.y[i]));
                      }
                    });
}

DualPolEstimate estimate_input_psd(const TrialConfig& cfg, const DualPolPsd& psd,
                                   Execution exec) {
  return run_trials(cfg, psd, exec,
                    [&](const SpectralField& field, std::vector<double>& sx,
                        std::vector<double>& sy) {
                      for (std::size_t i = 0; i < field.size(); ++i) {
                        sx[i] = cfg.f0 * std::norm(field.x[i]);
                        sy[i] = cfg.f0 * std::norm(field.y[i]);
                      }
                    });
}

Agreement compare_in_band(const PsdEstimate& est, const std::vector<double>& analytic,
                          Support band, double edge_margin, double z_max) {
  if (analytic.size() != est.mean.size())
    throw ConfigError("mc: analytic and estimate grids differ in size");
  const double center = 0.5 * (band.lo + band.hi);
  const double keep = (1.0 - edge_margin) * 0.5 * band.width();
  Agreement a;
  for (std::size_t i = 0; i < est.mean.size(); ++i) {
    if (std::abs(est.frequency[i] - center) > keep) continue;
    ++a.points;
    const double diff = std::abs(est.mean[i] - analytic[i]);
    if (diff <= z_max * est.std_error[i]) ++a.within;
  }
  return a;
}

}  // namespace nli

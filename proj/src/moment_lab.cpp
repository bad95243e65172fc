#include "nli/moment_lab.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "nli/errors.hpp"
#include "nli/random.hpp"

namespace nli {

namespace {

constexpr std::size_t kSamplesPerBlock = 4096;

// Componentwise Welford accumulator for a set of complex statistics.
struct ComplexMoments {
  std::vector<double> mean_re, mean_im, m2_re, m2_im;
  std::size_t count = 0;

  explicit ComplexMoments(std::size_t n)
      : mean_re(n, 0.0), mean_im(n, 0.0), m2_re(n, 0.0), m2_im(n, 0.0) {}

  void add(const std::vector<cdouble>& v) {
    ++count;
    const double c = static_cast<double>(count);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double dr = v[i].real() - mean_re[i];
      mean_re[i] += dr / c;
      m2_re[i] += dr * (v[i].real() - mean_re[i]);
      const double di = v[i].imag() - mean_im[i];
      mean_im[i] += di / c;
      m2_im[i] += di * (v[i].imag() - mean_im[i]);
    }
  }

  void merge(const ComplexMoments& o) {
    if (o.count == 0) return;
    const double n = static_cast<double>(count + o.count);
    const double w = static_cast<double>(count) * static_cast<double>(o.count) / n;
    for (std::size_t i = 0; i < mean_re.size(); ++i) {
      const double dr = o.mean_re[i] - mean_re[i];
      mean_re[i] += dr * static_cast<double>(o.count) / n;
      m2_re[i] += o.m2_re[i] + dr * dr * w;
      const double di = o.mean_im[i] - mean_im[i];
      mean_im[i] += di * static_cast<double>(o.count) / n;
      m2_im[i] += o.m2_im[i] + di * di * w;
    }
    count += o.count;
  }

  MomentEstimate estimate(std::size_t i) const {
    MomentEstimate e{{mean_re[i], mean_im[i]}, {0.0, 0.0}};
    if (count > 1) {
      const double d = static_cast<double>(count - 1) * static_cast<double>(count);
      e.std_error = {std::sqrt(std::max(m2_re[i], 0.0) / d), std::sqrt(std::max(m2_im[i], 0.0) / d)};
    }
    return e;
  }
};

// Runs `trials` samples in fixed blocks; sample(trial, out) fills one value per
// statistic. Block results are merged in block order.
template <class Sample>
ComplexMoments accumulate(std::size_t stats, std::size_t trials, std::size_t block,
                          Execution exec, Sample&& sample) {
  const std::size_t blocks = (trials + block - 1) / block;
  std::vector<ComplexMoments> parts(blocks, ComplexMoments(stats));
  parallel_for(blocks, exec.threads, [&](std::size_t b) {
    std::vector<cdouble> values(stats);
    const std::size_t end = std::min(trials, (b + 1) * block);
    for (std::size_t t = b * block; t < end; ++t) {
      sample(static_cast<std::uint64_t>(t), values);
      parts[b].add(values);
    }
  });
  ComplexMoments total(stats);
  for (const auto& p : parts) total.merge(p);
  return total;
}

cdouble cgmt_from_covariance(const Eigen::MatrixXcd& cov, const MomentSpec& spec) {
  const std::size_t k = spec.order();
  if (spec.plain.size() != k) throw ConfigError("moment spec needs k conjugated and k plain slots");
  if (k > kMaxMomentOrder)
    throw ConfigError("moment order " + std::to_string(k) + " exceeds the 8! term budget");
  for (std::size_t idx : spec.conjugated)
    if (idx >= static_cast<std::size_t>(cov.rows())) throw ConfigError("moment index out of range");
  for (std::size_t idx : spec.plain)
    if (idx >= static_cast<std::size_t>(cov.rows())) throw ConfigError("moment index out of range");

  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  cdouble sum = 0.0;
  do {
    cdouble term = 1.0;
    for (std::size_t i = 0; i < k; ++i)
      term *= cov(Eigen::Index(spec.plain[perm[i]]), Eigen::Index(spec.conjugated[i]));
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

long wrap(long k, long n) { return ((k % n) + n) % n; }

}  // namespace

// ---------------------------------------------------------------------------

GaussianEnsemble::GaussianEnsemble(Eigen::MatrixXcd factor)
    : factor_(std::move(factor)), covariance_(factor_ * factor_.adjoint()) {
  if (factor_.rows() == 0 || factor_.cols() == 0) throw ConfigError("empty ensemble factor");
}

GaussianEnsemble GaussianEnsemble::random(std::size_t dim, std::size_t rank, std::uint64_t seed) {
  const Philox4x32 rng(seed);
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < rank; ++j)
      a(Eigen::Index(i), Eigen::Index(j)) =
          circular_normal(rng, {0, 0x5eed, static_cast<std::uint32_t>(i * rank + j)});
  return GaussianEnsemble(std::move(a));
}

GaussianEnsemble GaussianEnsemble::from_covariance(const Eigen::MatrixXcd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0)
    throw ConfigError("covariance must be square and non-empty");
  const double scale = std::max(covariance.norm(), std::numeric_limits<double>::min());
  if ((covariance - covariance.adjoint()).norm() > 1e-12 * scale)
    throw ConfigError("covariance is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(covariance);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-12 * std::max(lambda.cwiseAbs().maxCoeff(), 1e-300))
    throw ConfigError("covariance is not positive semidefinite");
  Eigen::MatrixXcd factor =
      eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().cast<cdouble>().asDiagonal();
  GaussianEnsemble e(std::move(factor));
  e.covariance_ = covariance;
  return e;
}

cdouble cgmt_sum(const GaussianEnsemble& ensemble, const MomentSpec& spec) {
  return cgmt_from_covariance(ensemble.covariance(), spec);
}

cdouble fourth_moment_identity(const GaussianEnsemble& e, const std::array<std::size_t, 4>& u) {
  for (std::size_t i : u)
    if (i >= e.dimension()) throw ConfigError("moment index out of range");
  return e.cov(u[2], u[0]) * e.cov(u[3], u[1]) + e.cov(u[3], u[0]) * e.cov(u[2], u[1]);
}

MomentEstimate mc_moment(const GaussianEnsemble& ensemble, const MomentSpec& spec,
                         std::size_t trials, std::uint64_t seed, Execution exec) {
  if (trials < 10000) throw ConfigError("mc_moment needs at least 1e4 trials");
  if (spec.plain.size() != spec.order()) throw ConfigError("moment spec needs k conjugated and k plain slots");
  for (std::size_t idx : spec.conjugated)
    if (idx >= ensemble.dimension()) throw ConfigError("moment index out of range");
  for (std::size_t idx : spec.plain)
    if (idx >= ensemble.dimension()) throw ConfigError("moment index out of range");

  const Philox4x32 rng(seed);
  const Eigen::MatrixXcd& a = ensemble.factor();
  const auto rank = static_cast<std::size_t>(a.cols());
  auto stats = accumulate(1, trials, kSamplesPerBlock, exec,
                          [&](std::uint64_t t, std::vector<cdouble>& out) {
                            Eigen::VectorXcd w(static_cast<Eigen::Index>(rank));
                            for (std::size_t j = 0; j < rank; ++j)
                              w(Eigen::Index(j)) =
                                  circular_normal(rng, {t, 0, static_cast<std::uint32_t>(j)});
                            const Eigen::VectorXcd u = a * w;
                            cdouble p = 1.0;
                            for (std::size_t i : spec.conjugated) p *= std::conj(u(Eigen::Index(i)));
                            for (std::size_t i : spec.plain) p *= u(Eigen::Index(i));
                            out[0] = p;
                          });
  return stats.estimate(0);
}

double z_score(const MomentEstimate& est, cdouble expected) {
  auto component = [](double diff, double se) {
    diff = std::abs(diff);
    if (diff == 0.0) return 0.0;
    return se > 0.0 ? diff / se : std::numeric_limits<double>::infinity();
  };
  return std::max(component(est.value.real() - expected.real(), est.std_error.real()),
                  component(est.value.imag() - expected.imag(), est.std_error.imag()));
}

bool CheckReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

// ---------------------------------------------------------------------------

StationaryProcesses::StationaryProcesses(std::vector<Eigen::MatrixXcd> spectra)
    : spectra_(std::move(spectra)) {
  if (spectra_.size() < 32) throw ConfigError("stationary processes need a grid of N >= 32");
  const Eigen::Index p = spectra_.front().rows();
  if (p == 0) throw ConfigError("no processes");
  filters_.reserve(spectra_.size());
  for (std::size_t k = 0; k < spectra_.size(); ++k) {
    if (spectra_[k].rows() != p || spectra_[k].cols() != p)
      throw ConfigError("cross-spectral matrices must all be P x P");
    try {
      filters_.push_back(GaussianEnsemble::from_covariance(spectra_[k]).factor());
    } catch (const ConfigError& e) {
      throw ConfigError("cross-spectral matrix at bin " + std::to_string(k) + ": " + e.what());
    }
  }
}

cdouble StationaryProcesses::spectrum(std::size_t a, std::size_t b, long k) const {
  const long n = static_cast<long>(grid_size());
  return spectra_[static_cast<std::size_t>(wrap(k, n))](Eigen::Index(a), Eigen::Index(b));
}

std::vector<std::vector<cdouble>> StationaryProcesses::realize(std::uint64_t seed,
                                                               std::uint64_t trial) const {
  const Philox4x32 rng(seed);
  const std::size_t n = grid_size();
  const std::size_t p = count();
  // Circular white time-domain sources, one per process dimension.
  std::vector<std::vector<cdouble>> white(p, std::vector<cdouble>(n));
  for (std::size_t s = 0; s < p; ++s)
    for (std::size_t t = 0; t < n; ++t)
      white[s][t] = circular_normal(rng, {trial, static_cast<std::uint32_t>(s),
                                          static_cast<std::uint32_t>(t)});
  // Unitary DFT keeps the sources white: E[W_s(k) W_s(l)^*] = delta_kl.
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<std::vector<cdouble>> spectrum(p, std::vector<cdouble>(n));
  for (std::size_t s = 0; s < p; ++s)
    for (std::size_t k = 0; k < n; ++k) {
      cdouble acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                           static_cast<double>(n);
        acc += white[s][t] * cdouble(std::cos(ang), std::sin(ang));
      }
      spectrum[s][k] = acc * norm;
    }
  std::vector<std::vector<cdouble>> out(p, std::vector<cdouble>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::MatrixXcd& h = filters_[k];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t s = 0; s < p; ++s)
        out[a][k] += h(Eigen::Index(a), Eigen::Index(s)) * spectrum[s][k];
  }
  return out;
}

cdouble six_field_formula(const StationaryProcesses& procs, const SixFieldCase& c) {
  const long n = static_cast<long>(procs.grid_size());
  auto delta = [n](long k) { return wrap(k, n) == 0; };
  if (!delta(c.u - c.f)) return 0.0;
  const auto [a, b, cc, d, e, f] = c.process;
  auto G = [&](std::size_t x, std::size_t y, long k) { return procs.spectrum(x, y, k); };
  const long f0 = c.f;
  cdouble sum = 0.0;
  if (delta(c.f2) && delta(c.f3)) sum += G(a, b, f0 + c.f1) * G(cc, d, f0) * G(e, f, f0 + c.f4);
  if (delta(c.f2) && delta(c.f4)) sum += G(a, b, f0 + c.f1) * G(e, d, f0 + c.f3) * G(cc, f, f0);
  if (delta(c.f1) && delta(c.f3)) sum += G(cc, b, f0 + c.f2) * G(a, d, f0) * G(e, f, f0 + c.f4);
  if (delta(c.f1) && delta(c.f4)) sum += G(cc, b, f0 + c.f2) * G(e, d, f0 + c.f3) * G(a, f, f0);
  if (delta(c.f3 - c.f1) && delta(c.f4 - c.f2))
    sum += G(e, b, f0 + c.f1 + c.f2) * G(a, d, f0 + c.f1) * G(cc, f, f0 + c.f2);
  if (delta(c.f4 - c.f1) && delta(c.f3 - c.f2))
    sum += G(e, b, f0 + c.f1 + c.f2) * G(cc, d, f0 + c.f2) * G(a, f, f0 + c.f1);
  return sum;
}

namespace {

// Bins of the six fields A..F in slot order.
std::array<long, 6> six_field_bins(const SixFieldCase& c) {
  return {c.f + c.f1, c.f + c.f1 + c.f2, c.f + c.f2, c.u + c.f3, c.u + c.f3 + c.f4, c.u + c.f4};
}

}  // namespace

cdouble six_field_cgmt(const StationaryProcesses& procs, const SixFieldCase& c) {
  const long n = static_cast<long>(procs.grid_size());
  const auto bins = six_field_bins(c);
  Eigen::MatrixXcd cov(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      cov(i, j) = wrap(bins[i] - bins[j], n) == 0
                      ? procs.spectrum(c.process[i], c.process[j], bins[i])
                      : cdouble(0.0);
  return cgmt_from_covariance(cov, MomentSpec{{1, 3, 5}, {0, 2, 4}});
}

CheckReport theorem3_discrete_check(const StationaryProcesses& procs,
                                    const std::vector<SixFieldCase>& cases, std::size_t trials,
                                    std::uint64_t seed, Execution exec) {
  for (const auto& c : cases)
    for (std::size_t p : c.process)
      if (p >= procs.count()) throw ConfigError("case " + c.label + ": process index out of range");
  const long n = static_cast<long>(procs.grid_size());
  auto stats = accumulate(cases.size(), trials, 1024, exec,
                          [&](std::uint64_t t, std::vector<cdouble>& out) {
                            const auto x = procs.realize(seed, t);
                            for (std::size_t i = 0; i < cases.size(); ++i) {
                              const auto& c = cases[i];
                              const auto bins = six_field_bins(c);
                              auto at = [&](int slot) {
                                return x[c.process[slot]][static_cast<std::size_t>(wrap(bins[slot], n))];
                              };
                              out[i] = at(0) * std::conj(at(1)) * at(2) * std::conj(at(3)) * at(4) *
                                       std::conj(at(5));
                            }
                          });
  CheckReport report;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const cdouble expected = six_field_formula(procs, cases[i]);
    const cdouble via_cgmt = six_field_cgmt(procs, cases[i]);
    const MomentEstimate est = stats.estimate(i);
    CheckResult r{cases[i].label, expected, est.value, est.std_error, z_score(est, expected), false};
    const bool routes_agree = std::abs(expected - via_cgmt) <= 1e-12 * (1.0 + std::abs(expected));
    r.pass = routes_agree && r.z <= report.z_threshold;
    if (!routes_agree) r.label += " [formula != cgmt]";
    report.results.push_back(std::move(r));
  }
  return report;
}

CheckReport theorem1_discrete_check(const StationaryProcesses& procs, std::size_t trials,
                                    std::uint64_t seed, Execution exec) {
  struct Pair {
    std::size_t a, b;
    long k, l;
  };
  const long n = static_cast<long>(procs.grid_size());
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < procs.count(); ++a)
    for (std::size_t b = 0; b < procs.count(); ++b) {
      pairs.push_back({a, b, 0, 0});
      pairs.push_back({a, b, n / 4 + 1, n / 4 + 1});
      pairs.push_back({a, b, 3, 4});
      pairs.push_back({a, b, 0, n - 1});
    }
  auto stats = accumulate(pairs.size(), trials, 1024, exec,
                          [&](std::uint64_t t, std::vector<cdouble>& out) {
                            const auto x = procs.realize(seed, t);
                            for (std::size_t i = 0; i < pairs.size(); ++i) {
                              const auto& p = pairs[i];
                              out[i] = x[p.a][std::size_t(p.k)] * std::conj(x[p.b][std::size_t(p.l)]);
                            }
                          });
  CheckReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const cdouble expected = p.k == p.l ? procs.spectrum(p.a, p.b, p.k) : cdouble(0.0);
    std::ostringstream label;
    label << "E[X" << p.a << "(" << p.k << ") X" << p.b << "*(" << p.l << ")]"
          << (p.k == p.l ? " diagonal" : " off-diagonal");
    const MomentEstimate est = stats.estimate(i);
    CheckResult r{label.str(), expected, est.value, est.std_error, z_score(est, expected), false};
    r.pass = r.z <= report.z_threshold;
    report.results.push_back(std::move(r));
  }
  return report;
}

CheckReport theorem2_check(std::size_t k, std::size_t ensembles, std::size_t trials,
                           std::uint64_t seed, Execution exec) {
  if (k < 1 || k > kMaxMomentOrder) throw ConfigError("theorem 2 check needs 1 <= k <= 8");
  CheckReport report;
  MomentSpec spec;
  for (std::size_t i = 0; i < k; ++i) {
    spec.conjugated.push_back(i);
    spec.plain.push_back(k + i);
  }
  for (std::size_t e = 0; e < ensembles; ++e) {
    const std::uint64_t ens_seed = seed + 0x9E3779B97F4A7C15ull * (e + 1);
    const auto ens = GaussianEnsemble::random(2 * k, 2 * k, ens_seed);
    const cdouble expected = cgmt_sum(ens, spec);
    const MomentEstimate est = mc_moment(ens, spec, trials, ens_seed ^ 0xA5A5A5A5ull, exec);
    std::ostringstream label;
    label << "k=" << k << " random ensemble " << e;
    CheckResult r{label.str(), expected, est.value, est.std_error, z_score(est, expected), false};
    r.pass = r.z <= report.z_threshold;
    report.results.push_back(std::move(r));
  }

  // E|U|^{2k} = k! sigma^{2k}
  const double sigma = 1.3;
  Eigen::MatrixXcd one(1, 1);
  one(0, 0) = sigma;
  const GaussianEnsemble scalar(one);
  const MomentSpec same{std::vector<std::size_t>(k, 0), std::vector<std::size_t>(k, 0)};
  double factorial = 1.0;
  for (std::size_t i = 2; i <= k; ++i) factorial *= static_cast<double>(i);
  const double closed = factorial * std::pow(sigma, 2.0 * static_cast<double>(k));
  const cdouble via_cgmt = cgmt_sum(scalar, same);
  const MomentEstimate est = mc_moment(scalar, same, trials, seed ^ 0x3C3C3C3Cull, exec);
  std::ostringstream label;
  label << "E|U|^" << 2 * k << " = " << k << "! sigma^" << 2 * k;
  CheckResult r{label.str(), closed, est.value, est.std_error, z_score(est, closed), false};
  r.pass = std::abs(via_cgmt - closed) <= 1e-12 * closed && r.z <= report.z_threshold;
  report.results.push_back(std::move(r));
  return report;
}

// ---------------------------------------------------------------------------

namespace {

StationaryProcesses correlated_processes(std::size_t n) {
  std::vector<Eigen::MatrixXcd> spectra;
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::MatrixXcd h(3, 3);
    for (int p = 0; p < 3; ++p)
      for (int s = 0; s < 3; ++s) {
        const double kk = static_cast<double>(k);
        h(p, s) = p == s ? cdouble(1.0 + 0.3 * std::cos(w * (kk + p)), 0.0)
                         : 0.45 * std::polar(1.0, w * (3 * p + s) * kk + p * s + 0.2);
      }
    spectra.push_back(h * h.adjoint());
  }
  return StationaryProcesses(std::move(spectra));
}

StationaryProcesses uncorrelated_processes(std::size_t n) {
  std::vector<Eigen::MatrixXcd> spectra;
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2, 2);
    s(0, 0) = 1.0 + 0.5 * std::cos(w * kk);
    s(1, 1) = 0.8 + 0.3 * std::sin(w * kk + 0.4);
    spectra.push_back(s);
  }
  return StationaryProcesses(std::move(spectra));
}

// Offsets hitting exactly one of the six delta pairs (generic values 5, 9).
struct DeltaConfig {
  const char* name;
  long f1, f2, f3, f4;
};
constexpr DeltaConfig kSingleDelta[] = {
    {"d(f2)d(f3)", 5, 0, 0, 9},       {"d(f2)d(f4)", 5, 0, 9, 0},
    {"d(f1)d(f3)", 0, 5, 0, 9},       {"d(f1)d(f4)", 0, 5, 9, 0},
    {"d(f3-f1)d(f4-f2)", 5, 9, 5, 9}, {"d(f4-f1)d(f3-f2)", 5, 9, 9, 5},
};

}  // namespace

Theorem3Battery default_theorem3_battery(std::size_t grid_size) {
  Theorem3Battery b{correlated_processes(grid_size), uncorrelated_processes(grid_size), {}, {}};
  const long f = 3;
  const std::array<std::size_t, 6> mixed{0, 1, 2, 0, 1, 2};

  for (const auto& d : kSingleDelta)
    b.correlated_cases.push_back({std::string("diagonal ") + d.name, mixed, f, d.f1, d.f2, d.f3, d.f4, f});
  b.correlated_cases.push_back({"diagonal all offsets zero (six terms)", mixed, f, 0, 0, 0, 0, f});
  for (const auto& d : {kSingleDelta[0], kSingleDelta[4]})
    b.correlated_cases.push_back(
        {std::string("off-diagonal u=f+1 ") + d.name, mixed, f, d.f1, d.f2, d.f3, d.f4, f + 1});
  b.correlated_cases.push_back({"off-diagonal u=f+7 zero offsets", mixed, f, 0, 0, 0, 0, f + 7});
  b.correlated_cases.push_back({"diagonal no delta satisfied", mixed, f, 5, 7, 11, 13, f});

  // All six fields the same process (first-expectation pattern).
  const std::array<std::size_t, 6> xxxxxx{0, 0, 0, 0, 0, 0};
  b.uncorrelated_cases.push_back({"X^6 all offsets zero", xxxxxx, f, 0, 0, 0, 0, f});
  b.uncorrelated_cases.push_back({"X^6 d(f2)d(f3)+d(f4-f1)d(f3-f2)", xxxxxx, f, 5, 0, 0, 5, f});
  b.uncorrelated_cases.push_back({"X^6 d(f1)d(f3)+d(f3-f1)d(f4-f2)", xxxxxx, f, 0, 7, 0, 7, f});
  b.uncorrelated_cases.push_back({"X^6 d(f3-f1)d(f4-f2)", xxxxxx, f, 5, 9, 5, 9, f});
  b.uncorrelated_cases.push_back({"X^6 off-diagonal", xxxxxx, f, 0, 0, 0, 0, f + 2});

  // Second-expectation pattern A=X, B=Y, C=Y, D=X, E=Y, F=Y with G_xy = 0:
  // only d(f1)d(f3) and d(f3-f1)d(f4-f2) survive.
  const std::array<std::size_t, 6> xyyxyy{0, 1, 1, 0, 1, 1};
  for (const auto& d : kSingleDelta)
    b.uncorrelated_cases.push_back({std::string("XY pattern ") + d.name, xyyxyy, f, d.f1, d.f2, d.f3, d.f4, f});
  return b;
}

}  // namespace nli

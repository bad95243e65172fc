#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "nli/parallel.hpp"

namespace nli {

using cdouble = std::complex<double>;

/// Zero-mean jointly circular complex Gaussian vector U = A w, with w standard
/// circular white (E[w w^H] = I). Covariance E[U U^H] = A A^H.
class GaussianEnsemble {
 public:
  explicit GaussianEnsemble(Eigen::MatrixXcd factor);

  /// Random factor (dim x rank) with standard circular Gaussian entries.
  static GaussianEnsemble random(std::size_t dim, std::size_t rank, std::uint64_t seed);
  /// Factorizes a Hermitian covariance; throws ConfigError if it is not
  /// positive semidefinite (eigenvalue < -1e-12 relative).
  static GaussianEnsemble from_covariance(const Eigen::MatrixXcd& covariance);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(factor_.rows()); }
  const Eigen::MatrixXcd& factor() const noexcept { return factor_; }
  const Eigen::MatrixXcd& covariance() const noexcept { return covariance_; }
  /// E[U_i U_j^*]
  cdouble cov(std::size_t i, std::size_t j) const { return covariance_(Eigen::Index(i), Eigen::Index(j)); }

 private:
  Eigen::MatrixXcd factor_;
  Eigen::MatrixXcd covariance_;
};

/// E[U_{c1}^* ... U_{ck}^* U_{p1} ... U_{pk}]: k conjugated slots followed by k
/// plain slots, each an index into the ensemble (repeats allowed).
struct MomentSpec {
  std::vector<std::size_t> conjugated;
  std::vector<std::size_t> plain;

  std::size_t order() const noexcept { return conjugated.size(); }
};

/// Largest order accepted by cgmt_sum (8! = 40320 terms).
inline constexpr std::size_t kMaxMomentOrder = 8;

/// Sum over the k! permutations pi of prod_i E[U_{c_i}^* U_{p_pi(i)}].
cdouble cgmt_sum(const GaussianEnsemble& ensemble, const MomentSpec& spec);

/// E[U1* U2* U3 U4] = E[U1* U3] E[U2* U4] + E[U1* U4] E[U2* U3] for
/// indices = {1, 2, 3, 4}.
cdouble fourth_moment_identity(const GaussianEnsemble& ensemble,
                               const std::array<std::size_t, 4>& indices);

struct MomentEstimate {
  cdouble value;
  cdouble std_error;  // componentwise (real, imaginary)
};

/// Sample mean of the moment product over `trials` >= 1e4 draws.
MomentEstimate mc_moment(const GaussianEnsemble& ensemble, const MomentSpec& spec,
                         std::size_t trials, std::uint64_t seed, Execution exec = {});

/// max over components of |estimate - expected| / std_error; 0/0 counts as 0.
double z_score(const MomentEstimate& est, cdouble expected);

struct CheckResult {
  std::string label;
  cdouble expected;
  cdouble estimate;
  cdouble std_error;
  double z = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckResult> results;
  double z_threshold = 4.0;

  bool all_passed() const;
};

/// Circularly stationary processes on an N-point frequency grid, described by
/// their cross-spectral matrices S(k)(a, b) = G_ab(k) = E[X_a(k) X_b(k)^*].
/// Realizations are circular white time-domain sources, DFT'd and shaped by a
/// per-bin factor H(k) with H H^H = S(k).
class StationaryProcesses {
 public:
  /// Throws ConfigError if any S(k) is not Hermitian positive semidefinite or
  /// if N < 32 or sizes disagree.
  explicit StationaryProcesses(std::vector<Eigen::MatrixXcd> spectra);

  std::size_t grid_size() const noexcept { return spectra_.size(); }
  std::size_t count() const noexcept { return static_cast<std::size_t>(spectra_.front().rows()); }
  /// G_ab(k), k taken modulo N.
  cdouble spectrum(std::size_t a, std::size_t b, long k) const;

  /// One realization: element [p][k] = X_p(k).
  std::vector<std::vector<cdouble>> realize(std::uint64_t seed, std::uint64_t trial) const;

 private:
  std::vector<Eigen::MatrixXcd> spectra_;
  std::vector<Eigen::MatrixXcd> filters_;
};

/// Six-field moment E[A(f+f1) B*(f+f1+f2) C(f+f2) D*(u+f3) E(u+f3+f4) F*(u+f4)].
struct SixFieldCase {
  std::string label;
  std::array<std::size_t, 6> process{};  // A, B, C, D, E, F
  long f = 0, f1 = 0, f2 = 0, f3 = 0, f4 = 0, u = 0;
};

/// Six-term delta formula of the product moment, with Kronecker deltas mod N.
cdouble six_field_formula(const StationaryProcesses& procs, const SixFieldCase& c);
/// The same moment by cgmt_sum over the covariance of the six selected lines.
cdouble six_field_cgmt(const StationaryProcesses& procs, const SixFieldCase& c);

/// Monte Carlo check of every case against six_field_formula; also verifies
/// that the formula equals six_field_cgmt. Pass bar: z <= 4.
CheckReport theorem3_discrete_check(const StationaryProcesses& procs,
                                    const std::vector<SixFieldCase>& cases, std::size_t trials,
                                    std::uint64_t seed, Execution exec = {});

/// Spectral-line covariances E[X_a(k) X_b(l)^*] vs G_ab(k) delta_kl.
CheckReport theorem1_discrete_check(const StationaryProcesses& procs, std::size_t trials,
                                    std::uint64_t seed, Execution exec = {});

/// cgmt_sum vs mc_moment on `ensembles` random factor-form ensembles of
/// dimension 2k, plus E|U|^{2k} = k! sigma^{2k}.
CheckReport theorem2_check(std::size_t k, std::size_t ensembles, std::size_t trials,
                           std::uint64_t seed, Execution exec = {});

/// Standard battery on an N-point grid: off-diagonal (u != f), the six single
/// delta configurations with correlated processes, the all-equal pattern, and
/// the uncorrelated-X/Y second-expectation pattern.
struct Theorem3Battery {
  StationaryProcesses correlated;    // three mutually correlated processes
  StationaryProcesses uncorrelated;  // X, Y with G_xy = 0
  std::vector<SixFieldCase> correlated_cases;
  std::vector<SixFieldCase> uncorrelated_cases;
};

Theorem3Battery default_theorem3_battery(std::size_t grid_size);

}  // namespace nli

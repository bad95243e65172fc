#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "nli/config.hpp"
#include "nli/errors.hpp"
#include "nli/gn_engine.hpp"
#include "nli/kernel.hpp"
#include "nli/mc_oracle.hpp"
#include "nli/moment_lab.hpp"

#ifndef NLI_VERSION
#define NLI_VERSION "dev"
#endif

namespace nli::cli {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// CSV document with a "# key: value" comment preamble.
class CsvDocument {
 public:
  void meta(const std::string& key, const std::string& value) {
    body_ << "# " << key << ": " << value << '\n';
  }
  void header(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
      body_ << (first ? "" : ",") << c;
      first = false;
    }
    body_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) body_ << (i ? "," : "") << cells[i];
    body_ << '\n';
  }
  std::string str() const { return body_.str(); }

 private:
  std::ostringstream body_;
};

/// Writes to `path` via a temporary file in the same directory and a rename,
/// or to `out` if no path is given.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write output file: " + path);
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ConfigError("write failed: " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ConfigError("cannot move output into place: " + path);
  }
}

void preamble(CsvDocument& doc, const std::string& command, const RunConfig* cfg) {
  doc.meta("tool", std::string("nlisim ") + NLI_VERSION);
  doc.meta("command", command);
  if (cfg)
    for (const auto& [k, v] : describe(*cfg)) doc.meta(k, v);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

struct Globals {
  std::string config;
  std::string output;
  unsigned threads = 1;
};

// ---------------------------------------------------------------------------

std::string cmd_kernel(const RunConfig& cfg, bool use_quadrature, Execution exec) {
  const KernelModel model(cfg.link, cfg.quadrature);
  const auto& g = cfg.kernel;
  std::vector<double> grid;
  const double lmin = std::log10(g.f_min_hz2), lmax = std::log10(g.f_max_hz2);
  for (double e : linspace(lmin, lmax, g.points)) grid.push_back(std::pow(10.0, e));
  if (g.include_negative) {
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i) grid.push_back(-grid[i]);
  }
  if (g.include_zero) grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());

  std::vector<cdouble> k(grid.size());
  parallel_for(grid.size(), exec.threads, [&](std::size_t i) {
    k[i] = use_quadrature ? model.quadrature(grid[i]) : model.closed_form(grid[i]);
  });

  CsvDocument doc;
  preamble(doc, "kernel", &cfg);
  doc.meta("kernel.method", use_quadrature ? "quadrature" : "closed_form");
  doc.meta("kernel.f_min_hz2", num(g.f_min_hz2));
  doc.meta("kernel.f_max_hz2", num(g.f_max_hz2));
  doc.meta("kernel.points", std::to_string(g.points));
  doc.meta("kernel.include_zero", g.include_zero ? "true" : "false");
  doc.meta("kernel.include_negative", g.include_negative ? "true" : "false");
  doc.meta("kernel.k0_per_w", num(model.k0().real()));
  doc.header({"F_Hz2", "re_K", "im_K", "re_eta", "im_eta", "abs_eta"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cdouble eta = grid[i] == 0.0 ? cdouble(1.0, 0.0) : k[i] / model.k0();
    doc.row({num(grid[i]), num(k[i].real()), num(k[i].imag()), num(eta.real()), num(eta.imag()),
             num(std::abs(eta))});
  }
  return doc.str();
}

std::string cmd_psd(const RunConfig& cfg, Execution exec) {
  const auto& o = cfg.psd_output;
  GnRequest req{cfg.psd, KernelModel(cfg.link, cfg.quadrature),
                linspace(o.f_min_hz, o.f_max_hz, o.points), o.include_phase_term, o.inner_step_hz,
                o.quadrature_kernel};
  const NliPsdResult r = o.polarization == 'x' ? nli_psd_x(req, exec) : nli_psd_y(req, exec);

  CsvDocument doc;
  preamble(doc, "psd", &cfg);
  doc.meta("psd_output.polarization", std::string(1, o.polarization));
  doc.meta("psd_output.f_min_hz", num(o.f_min_hz));
  doc.meta("psd_output.f_max_hz", num(o.f_max_hz));
  doc.meta("psd_output.points", std::to_string(o.points));
  doc.meta("psd_output.inner_step_hz", num(o.inner_step_hz));
  doc.meta("psd_output.include_phase_term", o.include_phase_term ? "true" : "false");
  doc.meta("psd_output.quadrature_kernel", o.quadrature_kernel ? "true" : "false");
  doc.meta("phi_nl_rad", num(std::sqrt(r.phi_nl_sq)));
  doc.header({"f_Hz", "spm", "xpolm", "phase", "total_normalized", "total_absolute_W_per_Hz"});
  for (std::size_t i = 0; i < r.frequency.size(); ++i)
    doc.row({num(r.frequency[i]), num(r.spm[i]), num(r.xpolm[i]), num(r.phase[i]), num(r.total[i]),
             num(r.absolute(i))});
  return doc.str();
}

std::string cmd_montecarlo(const RunConfig& cfg, Execution exec, std::ostream& out) {
  const auto& m = cfg.montecarlo;
  if (!(m.spacing_hz > 0.0)) throw ConfigError("montecarlo.spacing_hz: must be > 0");
  TrialConfig tc;
  tc.f0 = m.spacing_hz;
  tc.num_lines = m.lines;
  tc.num_trials = m.trials;
  tc.seed = m.seed;
  tc.mode = m.mode;
  tc.edge_margin = m.edge_margin;
  const KernelModel kernel(cfg.link, cfg.quadrature);
  validate(tc, cfg.psd);

  const double step = m.inner_step_hz > 0.0 ? m.inner_step_hz : m.spacing_hz;
  GnRequest req{cfg.psd, kernel, grid_frequencies(tc), m.mode == PerturbationMode::Rp1, step, false};
  validate(req);

  const DualPolEstimate est = estimate_nli_psd(tc, cfg.psd, kernel, exec);
  const bool x = m.polarization == 'x';
  const PsdEstimate& e = x ? est.x : est.y;
  const NliPsdResult gn = x ? nli_psd_x(req, exec) : nli_psd_y(req, exec);

  const PsdShape& own = x ? cfg.psd.gx() : cfg.psd.gy();
  const Agreement agree = compare_in_band(e, gn.total, own.support(), m.edge_margin, m.z_max);

  CsvDocument doc;
  preamble(doc, "montecarlo", &cfg);
  doc.meta("montecarlo.mode", m.mode == PerturbationMode::Rp1 ? "rp1" : "erp1");
  doc.meta("montecarlo.polarization", std::string(1, m.polarization));
  doc.meta("montecarlo.lines", std::to_string(m.lines));
  doc.meta("montecarlo.spacing_hz", num(m.spacing_hz));
  doc.meta("montecarlo.trials", std::to_string(m.trials));
  doc.meta("montecarlo.seed", std::to_string(m.seed));
  doc.meta("montecarlo.edge_margin", num(m.edge_margin));
  doc.meta("montecarlo.z_max", num(m.z_max));
  doc.meta("analytic.inner_step_hz", num(step));
  doc.meta("analytic.include_phase_term", req.include_phase_term ? "true" : "false");
  doc.meta("agreement.in_band_points", std::to_string(agree.points));
  doc.meta("agreement.within_z_max", std::to_string(agree.within));
  doc.header({"f_Hz", "mc_mean", "mc_stderr", "analytic", "abs_z_score"});
  for (std::size_t i = 0; i < e.frequency.size(); ++i) {
    const double diff = std::abs(e.mean[i] - gn.total[i]);
    const double z = diff == 0.0 ? 0.0
                     : e.std_error[i] > 0.0 ? diff / e.std_error[i]
                                            : std::numeric_limits<double>::infinity();
    doc.row({num(e.frequency[i]), num(e.mean[i]), num(e.std_error[i]), num(gn.total[i]), num(z)});
  }
  out << "montecarlo: " << agree.within << "/" << agree.points << " in-band points within "
      << m.z_max << " stderr (" << std::fixed << std::setprecision(1) << 100.0 * agree.fraction()
      << "%)\n"
      << std::defaultfloat;
  return doc.str();
}

std::string cmd_moments(const MomentsConfig& m, Execution exec, std::ostream& out, bool& passed) {
  CheckReport report;
  if (m.theorem == 1 || m.theorem == 3) {
    const Theorem3Battery battery = default_theorem3_battery(m.grid_size);
    if (m.theorem == 1) {
      report = theorem1_discrete_check(battery.correlated, m.trials, m.seed, exec);
    } else {
      report = theorem3_discrete_check(battery.correlated, battery.correlated_cases, m.trials, m.seed, exec);
      const CheckReport u =
          theorem3_discrete_check(battery.uncorrelated, battery.uncorrelated_cases, m.trials, m.seed + 1, exec);
      report.results.insert(report.results.end(), u.results.begin(), u.results.end());
    }
  } else if (m.theorem == 2) {
    report = theorem2_check(m.k, m.ensembles, m.trials, m.seed, exec);
  } else {
    throw ConfigError("--theorem must be 1, 2 or 3");
  }

  CsvDocument doc;
  preamble(doc, "moments", nullptr);
  doc.meta("moments.theorem", std::to_string(m.theorem));
  if (m.theorem == 2) {
    doc.meta("moments.k", std::to_string(m.k));
    doc.meta("moments.ensembles", std::to_string(m.ensembles));
  } else {
    doc.meta("moments.grid_size", std::to_string(m.grid_size));
  }
  doc.meta("moments.trials", std::to_string(m.trials));
  doc.meta("moments.seed", std::to_string(m.seed));
  doc.meta("moments.z_threshold", num(report.z_threshold));
  doc.header({"label", "expected_re", "expected_im", "estimate_re", "estimate_im", "stderr_re",
              "stderr_im", "z", "pass"});
  for (const auto& r : report.results) {
    doc.row({"\"" + r.label + "\"", num(r.expected.real()), num(r.expected.imag()),
             num(r.estimate.real()), num(r.estimate.imag()), num(r.std_error.real()),
             num(r.std_error.imag()), num(r.z), r.pass ? "1" : "0"});
    out << (r.pass ? "PASS " : "FAIL ") << "z=" << std::fixed << std::setprecision(2) << r.z
        << std::defaultfloat << "  " << r.label << '\n';
  }
  passed = report.all_passed();
  out << (passed ? "all checks passed" : "some checks FAILED") << " (" << report.results.size()
      << " configurations, z <= " << report.z_threshold << ")\n";
  return doc.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinear-interference PSD of dual-polarization optical links", "nlisim"};
  app.set_version_flag("--version", std::string("nlisim ") + NLI_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--output", g.output, "output CSV (default: standard output)");
  app.add_option("--threads", g.threads, "worker threads; never changes results")
      ->check(CLI::Range(1u, 1024u));

  auto* kernel = app.add_subcommand("kernel", "tabulate K(F) and eta(F)");
  std::string method = "closed";
  kernel->add_option("--method", method, "closed or quadrature")
      ->check(CLI::IsMember({"closed", "quadrature"}));

  auto* psd = app.add_subcommand("psd", "analytic NLI PSD on the configured output grid");

  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo NLI PSD versus the analytic value");
  std::optional<std::string> mode;
  std::optional<std::size_t> lines, trials;
  std::optional<double> spacing;
  std::optional<std::uint64_t> seed;
  mc->add_option("--mode", mode, "rp1 or erp1")->check(CLI::IsMember({"rp1", "erp1"}));
  mc->add_option("--lines", lines, "number of spectral lines M");
  mc->add_option("--spacing-hz", spacing, "line spacing f0 [Hz]");
  mc->add_option("--trials", trials, "Monte Carlo trials");
  mc->add_option("--seed", seed, "random seed");

  auto* mom = app.add_subcommand("moments", "Gaussian moment theorem checks");
  std::optional<std::size_t> k, mtrials;
  std::optional<std::uint64_t> mseed;
  std::optional<int> theorem;
  mom->add_option("--k", k, "moment order for --theorem 2");
  mom->add_option("--trials", mtrials, "Monte Carlo samples");
  mom->add_option("--seed", mseed, "random seed");
  mom->add_option("--theorem", theorem, "1, 2 or 3")->check(CLI::IsMember({1, 2, 3}));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  const Execution exec{g.threads};
  try {
    std::string csv;
    if (mom->parsed()) {
      MomentsConfig m;
      if (!g.config.empty()) m = load_config(g.config).moments;
      if (k) m.k = *k;
      if (mtrials) m.trials = *mtrials;
      if (mseed) m.seed = *mseed;
      if (theorem) m.theorem = *theorem;
      bool passed = false;
      csv = cmd_moments(m, exec, out, passed);
      if (!g.output.empty()) emit(g.output, csv, out);
      return passed ? kOk : kStatisticalFailure;
    }
    if (g.config.empty()) throw ConfigError("--config is required for this subcommand");
    RunConfig cfg = load_config(g.config);
    if (kernel->parsed()) {
      csv = cmd_kernel(cfg, method == "quadrature", exec);
    } else if (psd->parsed()) {
      csv = cmd_psd(cfg, exec);
    } else {
      auto& m = cfg.montecarlo;
      if (mode) m.mode = *mode == "rp1" ? PerturbationMode::Rp1 : PerturbationMode::DpErp1;
      if (lines) m.lines = *lines;
      if (spacing) m.spacing_hz = *spacing;
      if (trials) m.trials = *trials;
      if (seed) m.seed = *seed;
      csv = cmd_montecarlo(cfg, exec, err);
    }
    emit(g.output, csv, out);
    return kOk;
  } catch (const ConvergenceError& e) {
    err << "nlisim: convergence failure: " << e.what() << " (achieved error " << e.achieved_error()
        << ")\n";
    return kConvergenceError;
  } catch (const ConfigError& e) {
    err << "nlisim: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "nlisim: configuration error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace nli::cli

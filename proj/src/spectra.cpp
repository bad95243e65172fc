#include "nli/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nli/errors.hpp"

namespace nli {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("psd: " + msg);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

PsdShape::PsdShape(Kind kind) : kind_(std::move(kind)) {
  std::visit(
      Overloaded{
          [&](const Rectangular& r) {
            require(std::isfinite(r.center), "rectangular center must be finite");
            require(std::isfinite(r.bandwidth) && r.bandwidth > 0.0,
                    "rectangular bandwidth must be > 0");
            require(finite_nonneg(r.height), "rectangular height must be >= 0");
            support_ = {r.center - 0.5 * r.bandwidth, r.center + 0.5 * r.bandwidth};
            is_zero_ = r.height == 0.0;
          },
          [&](const RaisedCosine& r) {
            require(std::isfinite(r.center), "raised-cosine center must be finite");
            require(std::isfinite(r.bandwidth) && r.bandwidth > 0.0,
                    "raised-cosine bandwidth must be > 0");
            require(r.rolloff >= 0.0 && r.rolloff <= 1.0, "rolloff must be in [0, 1]");
            require(finite_nonneg(r.height), "raised-cosine height must be >= 0");
            const double half = 0.5 * (1.0 + r.rolloff) * r.bandwidth;
            support_ = {r.center - half, r.center + half};
            is_zero_ = r.height == 0.0;
          },
          [&](const Tabulated& t) {
            require(t.frequencies.size() >= 2, "tabulated shape needs >= 2 points");
            require(t.frequencies.size() == t.values.size(),
                    "tabulated frequency/value length mismatch");
            for (std::size_t i = 0; i < t.values.size(); ++i) {
              require(std::isfinite(t.frequencies[i]), "tabulated frequency not finite");
              require(finite_nonneg(t.values[i]), "tabulated values must be >= 0");
              if (i > 0)
                require(t.frequencies[i] > t.frequencies[i - 1],
                        "tabulated grid must be strictly increasing");
            }
            support_ = {t.frequencies.front(), t.frequencies.back()};
            is_zero_ = std::all_of(t.values.begin(), t.values.end(),
                                   [](double v) { return v == 0.0; });
          },
      },
      kind_);
}

PsdShape PsdShape::zero() { return PsdShape(Rectangular{0.0, 1.0, 0.0}); }

PsdShape PsdShape::scaled(double factor) const {
  require(finite_nonneg(factor), "scale factor must be >= 0");
  return std::visit(Overloaded{
                        [&](Rectangular r) {
                          r.height *= factor;
                          return PsdShape(r);
                        },
                        [&](RaisedCosine r) {
                          r.height *= factor;
                          return PsdShape(r);
                        },
                        [&](Tabulated t) {
                          for (double& v : t.values) v *= factor;
                          return PsdShape(std::move(t));
                        },
                    },
                    kind_);
}

std::string PsdShape::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Rectangular& r) {
                   os << "rectangular(center_hz=" << r.center << ", bandwidth_hz="
                      << r.bandwidth << ", height_per_hz=" << r.height << ")";
                 },
                 [&](const RaisedCosine& r) {
                   os << "raised_cosine(center_hz=" << r.center << ", bandwidth_hz="
                      << r.bandwidth << ", rolloff=" << r.rolloff
                      << ", height_per_hz=" << r.height << ")";
                 },
                 [&](const Tabulated& t) {
                   os << "tabulated(points=" << t.frequencies.size() << ", f_min_hz="
                      << t.frequencies.front() << ", f_max_hz=" << t.frequencies.back()
                      << ")";
                 },
             },
             kind_);
  return os.str();
}

double evaluate(const PsdShape& psd, double f) {
  const Support s = psd.support();
  if (!(f >= s.lo && f <= s.hi)) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Rectangular& r) { return r.height; },
          [&](const RaisedCosine& r) {
            const double x = std::abs(f - r.center);
            const double flat = 0.5 * (1.0 - r.rolloff) * r.bandwidth;
            if (x <= flat) return r.height;
            const double u = (x - flat) / (r.rolloff * r.bandwidth);
            return 0.5 * r.height * (1.0 + std::cos(std::numbers::pi * u));
          },
          [&](const Tabulated& t) {
            const auto& fs = t.frequencies;
            auto it = std::upper_bound(fs.begin(), fs.end(), f);
            if (it == fs.end()) return t.values.back();
            const std::size_t j = static_cast<std::size_t>(it - fs.begin());
            const double w = (f - fs[j - 1]) / (fs[j] - fs[j - 1]);
            return (1.0 - w) * t.values[j - 1] + w * t.values[j];
          },
      },
      psd.kind());
}

double power_integral(const PsdShape& psd) {
  return std::visit(Overloaded{
                        [](const Rectangular& r) { return r.height * r.bandwidth; },
                        // The rolloff skirts are odd-symmetric about half height.
                        [](const RaisedCosine& r) { return r.height * r.bandwidth; },
                        [](const Tabulated& t) {
                          double sum = 0.0;
                          for (std::size_t i = 1; i < t.values.size(); ++i)
                            sum += 0.5 * (t.values[i] + t.values[i - 1]) *
                                   (t.frequencies[i] - t.frequencies[i - 1]);
                          return sum;
                        },
                    },
                    psd.kind());
}

Tabulated load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabulated PSD file: " + path);
  Tabulated t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double f = 0.0, v = 0.0;
    if (!(row >> f >> v)) {
      if (t.frequencies.empty()) continue;  // header
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    t.frequencies.push_back(f);
    t.values.push_back(v);
  }
  return t;
}

DualPolPsd::DualPolPsd(PsdShape gx, PsdShape gy, double p0)
    : gx_(std::move(gx)), gy_(std::move(gy)), p0_(p0) {
  if (!(p0_ > 0.0) || !std::isfinite(p0_)) throw ConfigError("p0 must be > 0");
  px_hat_ = power_integral(gx_);
  py_hat_ = power_integral(gy_);
}

}  // namespace nli

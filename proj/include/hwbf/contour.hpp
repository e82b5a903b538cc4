#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hwbf/core.hpp"
#include "hwbf/dataset.hpp"

namespace hwbf::contour {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// R(phi) = a0 + sum_h [a_h cos(h phi) + b_h sin(h phi)], h = 1..H.
struct Coefficients {
  double a0 = 0.0;
  std::vector<std::pair<double, double>> pairs;  // (a_h, b_h)

  int harmonics() const noexcept { return static_cast<int>(pairs.size()); }
};

/// Amplitude-phase form: a_h = A_h cos(phi_h), b_h = A_h sin(phi_h).
struct AmplitudePhase {
  double a0 = 0.0;
  std::vector<std::pair<double, double>> pairs;  // (A_h, phi_h)
};

/// Radius samples of a closed loop at increasing polar angles in [0, 2pi).
struct PolarContour {
  std::vector<double> phi;
  std::vector<double> r;

  std::size_t size() const noexcept { return phi.size(); }

  void validate() const {
    if (phi.size() != r.size()) throw Error(ErrorKind::BadValue, "phi/r length mismatch");
    for (std::size_t k = 0; k < phi.size(); ++k) {
      if (!std::isfinite(phi[k]) || !std::isfinite(r[k])) {
        throw Error(ErrorKind::BadValue, "non-finite contour sample");
      }
      if (!(r[k] > 0.0)) throw Error(ErrorKind::BadValue, "contour radius must be positive");
      if (k > 0 && !(phi[k] > phi[k - 1])) {
        throw Error(ErrorKind::BadValue, "contour angles must be strictly increasing");
      }
    }
    if (!phi.empty() && (phi.front() < 0.0 || phi.back() >= kTwoPi)) {
      throw Error(ErrorKind::BadValue, "contour angles must lie in [0, 2pi)");
    }
  }
};

inline double eval_radius(const Coefficients& c, double phi) {
  double r = c.a0;
  for (int h = 1; h <= c.harmonics(); ++h) {
    const auto& [a, b] = c.pairs[static_cast<std::size_t>(h - 1)];
    r += a * std::cos(h * phi) + b * std::sin(h * phi);
  }
  return r;
}

inline AmplitudePhase to_amplitude_phase(const Coefficients& c) {
  AmplitudePhase out{c.a0, {}};
  out.pairs.reserve(c.pairs.size());
  for (const auto& [a, b] : c.pairs) {
    const double amp = std::hypot(a, b);
    double phase = amp == 0.0 ? 0.0 : std::atan2(b, a);
    if (phase < 0.0) phase += kTwoPi;
    if (phase >= kTwoPi) phase -= kTwoPi;
    out.pairs.emplace_back(amp, phase);
  }
  return out;
}

inline Coefficients from_amplitude_phase(const AmplitudePhase& d) {
  Coefficients out{d.a0, {}};
  out.pairs.reserve(d.pairs.size());
  for (const auto& [amp, phase] : d.pairs) {
    if (amp < 0.0) throw Error(ErrorKind::BadAmplitude, "negative amplitude");
    out.pairs.emplace_back(amp * std::cos(phase), amp * std::sin(phase));
  }
  return out;
}

/// Least-squares fit of an H-harmonic series on the design [1, cos h phi, sin h phi].
inline Coefficients fit_coefficients(const PolarContour& pc, int harmonics) {
  if (harmonics < 1) throw Error(ErrorKind::BadValue, "need at least one harmonic");
  const auto n = static_cast<Eigen::Index>(pc.size());
  const Eigen::Index cols = 2 * harmonics + 1;
  if (n < cols) {
    throw Error(ErrorKind::Underdetermined, std::to_string(n) + " samples for " +
                                                std::to_string(harmonics) + " harmonics");
  }
  Matrix design(n, cols);
  Vector rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double phi = pc.phi[static_cast<std::size_t>(k)];
    design(k, 0) = 1.0;
    for (int h = 1; h <= harmonics; ++h) {
      design(k, 2 * h - 1) = std::cos(h * phi);
      design(k, 2 * h) = std::sin(h * phi);
    }
    rhs(k) = pc.r[static_cast<std::size_t>(k)];
  }
  const Vector beta = design.colPivHouseholderQr().solve(rhs);
  Coefficients c{beta(0), {}};
  for (int h = 1; h <= harmonics; ++h) c.pairs.emplace_back(beta(2 * h - 1), beta(2 * h));
  return c;
}

/// Enclosed area by the trapezoidal rule on (1/2) r^2 dphi, closing the last
/// segment onto the first sample at phi_0 + 2pi.
inline double surface_area(const PolarContour& pc) {
  const std::size_t n = pc.size();
  if (n < 3) throw Error(ErrorKind::DegenerateContour, "need at least three samples");
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t next = (k + 1) % n;
    const double dphi = next == 0 ? pc.phi[0] + kTwoPi - pc.phi[k] : pc.phi[next] - pc.phi[k];
    acc += 0.5 * (pc.r[k] * pc.r[k] + pc.r[next] * pc.r[next]) * dphi;
  }
  return 0.5 * acc;
}

struct Normalized {
  PolarContour contour;
  double original_area = 0.0;
};

/// Rescales radii so the enclosed area is one; the original area is the
/// surface-size feature.
inline Normalized normalize_contour(const PolarContour& pc) {
  const double area = surface_area(pc);
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw Error(ErrorKind::DegenerateContour, "non-positive contour area");
  }
  Normalized out{pc, area};
  const double factor = 1.0 / std::sqrt(area);
  for (double& r : out.contour.r) r *= factor;
  return out;
}

inline PolarContour render_contour(const Coefficients& c, int n_points) {
  if (n_points < 3) throw Error(ErrorKind::BadValue, "need at least three points");
  PolarContour pc;
  pc.phi.resize(static_cast<std::size_t>(n_points));
  pc.r.resize(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    const double phi = kTwoPi * k / n_points;
    pc.phi[static_cast<std::size_t>(k)] = phi;
    pc.r[static_cast<std::size_t>(k)] = eval_radius(c, phi);
  }
  return pc;
}

/// Feature vector (S, a1, b1, ..., a4, b4) of a raw polar contour: area before
/// normalization, then the first four harmonics of the area-normalized loop.
inline FeatureVector features_from_contour(const PolarContour& pc) {
  const auto norm = normalize_contour(pc);
  const auto c = fit_coefficients(norm.contour, 4);
  FeatureVector f;
  f(0) = norm.original_area;
  for (int h = 0; h < 4; ++h) {
    f(1 + 2 * h) = c.pairs[static_cast<std::size_t>(h)].first;
    f(2 + 2 * h) = c.pairs[static_cast<std::size_t>(h)].second;
  }
  return f;
}

inline std::string to_csv(const PolarContour& pc) {
  std::ostringstream out;
  out.precision(17);
  out << "phi,r\n";
  for (std::size_t k = 0; k < pc.size(); ++k) out << pc.phi[k] << ',' << pc.r[k] << '\n';
  return out.str();
}

inline PolarContour parse_polar_csv(std::string_view text) {
  PolarContour pc;
  std::size_t pos = 0, line_no = 0;
  bool header = false;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (!header) {
      if (fields.size() != 2 || fields[0] != "phi" || fields[1] != "r") {
        throw Error(ErrorKind::BadHeader, "expected header 'phi,r'");
      }
      header = true;
      continue;
    }
    if (fields.size() != 2) throw Error(ErrorKind::BadValue, "line " + std::to_string(line_no));
    pc.phi.push_back(detail::parse_real(fields[0], line_no));
    pc.r.push_back(detail::parse_real(fields[1], line_no));
  }
  pc.validate();
  return pc;
}

/// Closed SVG path of the contour in Cartesian coordinates.
inline std::string to_svg(const PolarContour& pc, double size_px = 400.0) {
  double extent = 0.0;
  for (double r : pc.r) extent = std::max(extent, std::abs(r));
  const double scale = extent > 0.0 ? 0.45 * size_px / extent : 1.0;
  const double centre = 0.5 * size_px;
  std::ostringstream out;
  out.precision(8);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\""
      << size_px << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n";
  out << "  <path fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" d=\"";
  for (std::size_t k = 0; k < pc.size(); ++k) {
    const double x = centre + scale * pc.r[k] * std::cos(pc.phi[k]);
    const double y = centre - scale * pc.r[k] * std::sin(pc.phi[k]);
    out << (k == 0 ? "M " : " L ") << x << ' ' << y;
  }
  out << " Z\"/>\n</svg>\n";
  return out.str();
}

}  // namespace hwbf::contour

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace sdelab {

// 16-point Gauss-Legendre nodes/weights on [-1,1], positive half; the
// embedded 8-point rule provides the panel error estimate. Transcription is
// pinned by a polynomial-exactness unit test.
namespace gl {
inline constexpr double kX16[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr double kW16[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};
inline constexpr double kX8[4] = {
    0.1834346424956498049394761, 0.5255324099163289858177390,
    0.7966664774136267395915539, 0.9602898564975362316835609};
inline constexpr double kW8[4] = {
    0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};
}  // namespace gl

template <typename F>
double gl16_panel(F&& f, double a, double b, double* err_out = nullptr) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s16 = 0.0;
  for (int i = 0; i < 8; ++i)
    s16 += gl::kW16[i] * (f(c + h * gl::kX16[i]) + f(c - h * gl::kX16[i]));
  s16 *= h;
  if (err_out) {
    double s8 = 0.0;
    for (int i = 0; i < 4; ++i)
      s8 += gl::kW8[i] * (f(c + h * gl::kX8[i]) + f(c - h * gl::kX8[i]));
    s8 *= h;
    *err_out = std::abs(s16 - s8);
  }
  return s16;
}

namespace detail {
template <typename F>
double adaptive_panel(F&& f, double a, double b, double tol, int depth) {
  double err = 0.0;
  double v = gl16_panel(f, a, b, &err);
  if (err <= tol || depth <= 0) return v;
  double m = 0.5 * (a + b);
  return adaptive_panel(f, a, m, 0.5 * tol, depth - 1) +
         adaptive_panel(f, m, b, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Integrates f over [a,b] with panels of width at most `max_panel`, each
// refined by bisection until the embedded error estimate drops below its
// share of abs_tol.
template <typename F>
double integrate_panels(F&& f, double a, double b, double max_panel, double abs_tol,
                        int max_depth = 10) {
  if (!(b > a)) return 0.0;
  if (!(max_panel > 0)) throw std::invalid_argument("integrate_panels: max_panel must be > 0");
  std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / max_panel));
  if (n < 1) n = 1;
  double w = (b - a) / static_cast<double>(n);
  double tol_per = abs_tol / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = a + w * static_cast<double>(i);
    double hi = (i + 1 == n) ? b : lo + w;
    total += detail::adaptive_panel(f, lo, hi, tol_per, max_depth);
  }
  return total;
}

}  // namespace sdelab

#pragma once

// Small derivative-free maximizers used by the condition fitters: golden
// section in 1-D, Nelder-Mead in 2-D. Both polish candidates found by dense
// scans, so they only need local convergence.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <utility>

namespace bidosim::detail {

template <typename F>
double golden_max(F&& f, double lo, double hi, int iters = 100) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-14 * (1 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

struct Point2 {
  double x = 0, y = 0;
};

template <typename F>
std::pair<Point2, double> nelder_mead_max(F&& f, Point2 start, double scale,
                                          int iters = 300) {
  std::array<Point2, 3> s{start, Point2{start.x + scale, start.y},
                          Point2{start.x, start.y + scale}};
  std::array<double, 3> v{f(s[0]), f(s[1]), f(s[2])};

  auto order = [&] {
    if (v[0] < v[1]) { std::swap(v[0], v[1]); std::swap(s[0], s[1]); }
    if (v[1] < v[2]) { std::swap(v[1], v[2]); std::swap(s[1], s[2]); }
    if (v[0] < v[1]) { std::swap(v[0], v[1]); std::swap(s[0], s[1]); }
  };

  for (int it = 0; it < iters; ++it) {
    order();  // v[0] best, v[2] worst
    const Point2 cen{0.5 * (s[0].x + s[1].x), 0.5 * (s[0].y + s[1].y)};
    const double size = std::abs(s[0].x - s[2].x) + std::abs(s[0].y - s[2].y) +
                        std::abs(s[1].x - s[2].x) + std::abs(s[1].y - s[2].y);
    if (size < 1e-13 * (1 + std::abs(cen.x) + std::abs(cen.y))) break;

    const Point2 refl{cen.x + (cen.x - s[2].x), cen.y + (cen.y - s[2].y)};
    const double fr = f(refl);
    if (fr > v[0]) {
      const Point2 exp{cen.x + 2 * (cen.x - s[2].x), cen.y + 2 * (cen.y - s[2].y)};
      const double fe = f(exp);
      if (fe > fr) { s[2] = exp; v[2] = fe; } else { s[2] = refl; v[2] = fr; }
    } else if (fr > v[1]) {
      s[2] = refl;
      v[2] = fr;
    } else {
      const Point2 con{cen.x + 0.5 * (s[2].x - cen.x), cen.y + 0.5 * (s[2].y - cen.y)};
      const double fc = f(con);
      if (fc > v[2]) {
        s[2] = con;
        v[2] = fc;
      } else {  // shrink toward best
        for (int i = 1; i < 3; ++i) {
          s[i] = Point2{s[0].x + 0.5 * (s[i].x - s[0].x), s[0].y + 0.5 * (s[i].y - s[0].y)};
          v[i] = f(s[i]);
        }
      }
    }
  }
  order();
  return {s[0], v[0]};
}

}  // namespace bidosim::detail

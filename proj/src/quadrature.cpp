#include "hgas/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hgas/error.hpp"

namespace hgas {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  bool failed = false;
  double err = 0;

  double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15 * tol || !(b - a > 1e-15 * std::max(1.0, std::abs(a)))) {
      return left + right + delta / 15;
    }
    if (depth >= max_depth) {
      failed = true;
      err += std::abs(delta) / 15;
      return left + right + delta / 15;
    }
    return step(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + step(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth) {
  if (a == b) return 0;
  Simpson s{f, max_depth};
  // Five-point start so symmetric integrands cannot fool the first test.
  const int pieces = 4;
  double total = 0;
  for (int k = 0; k < pieces; ++k) {
    const double lo = a + (b - a) * k / pieces, hi = a + (b - a) * (k + 1) / pieces;
    const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6 * (flo + 4 * fm + fhi);
    total += s.step(lo, hi, flo, fm, fhi, whole, abs_tol / pieces, 0);
  }
  if (!std::isfinite(total)) throw ToleranceError("quadrature produced a non-finite value", total, INFINITY);
  if (s.failed) throw ToleranceError("adaptive quadrature did not reach the requested tolerance", total, s.err);
  return total;
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, double abs_tol) {
  std::vector<double> pts{a};
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0;
  const double tol = abs_tol / static_cast<double>(pts.size() - 1);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) total += adaptive_simpson(f, pts[k], pts[k + 1], tol);
  return total;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) throw Error(Errc::domain, "bisection bracket does not change sign");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace hgas

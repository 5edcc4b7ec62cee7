#include "veritest/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace veritest {

namespace {

// Recursive adaptive Simpson on [a,b] with precomputed endpoint/midpoint
// values; `budget` counts remaining subdivisions.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        long& budget) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || b - a < 1e-14) {
    return left + right + delta / 15.0;
  }
  if (--budget <= 0) throw std::runtime_error("integrate: subdivision limit reached");
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, budget) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, budget);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, const std::vector<double>& split_points) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> knots{a};
  for (double s : split_points) {
    if (s > a && s < b) knots.push_back(s);
  }
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());

  long budget = 100000;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i], hi = knots[i + 1];
    if (hi - lo < 1e-15) continue;
    const double mid = 0.5 * (lo + hi);
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole,
                              abs_tol / static_cast<double>(knots.size() - 1), budget);
  }
  return sign * total;
}

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
  double flo = f(lo);
  if (flo >= 0.0) return lo;
  double fhi = f(hi);
  if (fhi <= 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double one_sided_derivative(const std::function<double(double)>& f, double x, int direction,
                            double h) {
  const double d = direction >= 0 ? 1.0 : -1.0;
  const double f0 = f(x);
  const double d1 = (f(x + d * h) - f0) / (d * h);
  const double d2 = (f(x + d * 0.5 * h) - f0) / (d * 0.5 * h);
  return 2.0 * d2 - d1;  // Richardson: cancels the O(h) term
}

}  // namespace veritest

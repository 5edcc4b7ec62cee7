// Shared numerical routines: adaptive Simpson quadrature, monotone bisection,
// and one-sided differentiation with Richardson refinement.
#pragma once

#include <functional>
#include <vector>

namespace veritest {

// Adaptive Simpson quadrature to an absolute tolerance. `split_points`
// forces subdivision at interior kinks. Throws on non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9, const std::vector<double>& split_points = {});

// Root of an increasing function on [lo, hi] to absolute tolerance; returns
// the clamped endpoint when f has constant sign on the bracket.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-10);

// One-sided derivative at x in direction +1/-1: first-order differences at
// steps h and h/2 combined with one Richardson step.
double one_sided_derivative(const std::function<double(double)>& f, double x, int direction,
                            double h = 1e-6);

}  // namespace veritest

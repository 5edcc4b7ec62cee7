// Continuous-type environment: type distributions, authentication rates on an
// interval, the precision/discount kernel, and verification-aware virtual
// values with bound diagnostics.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace veritest {

struct TypeDistribution {
  double lo = 0.0, hi = 1.0;
  std::function<double(double)> cdf;  // F, with F(lo)=0, F(hi)=1
  std::function<double(double)> pdf;  // f, strictly positive on [lo,hi]

  static TypeDistribution uniform(double lo, double hi);
  static TypeDistribution truncated_exponential(double rate, double lo, double hi);
  // Density values on a uniform grid over [lo,hi], piecewise linear,
  // normalized to integrate to 1.
  static TypeDistribution tabulated(double lo, double hi, std::vector<double> density);

  // F(lo)=0, F(hi)=1, and F' ~ f by central differences (relative 1e-4).
  void validate(int grid_n = 101) const;
};

// Two-sided precision and the induced discount kernel
// Lambda(from|to) = exp(-int_from^to lambda_plus) for to >= from and
// exp(-int_to^from lambda_minus) otherwise. Cumulative integrals are cached
// so that multiplicativity holds to round-off.
class PrecisionKernel {
 public:
  PrecisionKernel(double lo, double hi, std::function<double(double)> lambda_plus,
                  std::function<double(double)> lambda_minus);

  static PrecisionKernel constant(double lambda, double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double lambda_plus(double theta) const { return lambda_plus_(theta); }
  double lambda_minus(double theta) const { return lambda_minus_(theta); }

  // Lambda(from | to): discount for type `to` mimicking report `from`.
  double discount(double from, double to) const;
  // Cumulative integral of lambda_plus from lo to x.
  double cum_plus(double x) const;
  double cum_minus(double x) const;

  PrecisionKernel scaled(double s) const;

 private:
  double lo_, hi_;
  std::function<double(double)> lambda_plus_, lambda_minus_;
  bool constant_ = false;
  double const_plus_ = 0.0, const_minus_ = 0.0;
  // Dense cumulative caches for non-constant precision.
  std::shared_ptr<const std::vector<double>> cache_plus_, cache_minus_;
  double cache_step_ = 0.0;

  double cum(bool plus, double x) const;
};

struct ContinuousAuthRate {
  double lo = 0.0, hi = 1.0;
  std::function<double(double, double)> alpha;  // (report, type)
  // Optional analytic one-sided diagonal derivatives D2+/D2- of alpha(t|t).
  std::function<double(double)> d2plus, d2minus;

  // alpha = Lambda of the kernel on both sides (lower bound held with equality).
  static ContinuousAuthRate exponential(const PrecisionKernel& kernel);
  static ContinuousAuthRate exponential_constant(double lambda, double lo, double hi);
  // alpha(r,t) = max(0, 1 - |r - t|^sigma), sigma >= 1.
  static ContinuousAuthRate power_kink(double sigma, double lo, double hi);
  // Values on a uniform grid (rows = report, cols = type), bilinear, with the
  // diagonal forced to 1.
  static ContinuousAuthRate tabulated(double lo, double hi, Eigen::MatrixXd values);
};

// lambda_plus = -D2+ alpha(t|t), lambda_minus = D2- alpha(t|t); analytic
// derivatives preferred, else one-sided finite differences with Richardson
// refinement. Negative precision beyond 1e-8 raises.
PrecisionKernel precision_from_alpha(const ContinuousAuthRate& a);

double myerson_virtual_value(const TypeDistribution& dist, double theta);
double virtual_value(const TypeDistribution& dist, const PrecisionKernel& kernel,
                     double theta, double quad_tol = 1e-9);

struct BoundsReport {
  double max_lower_violation = 0.0;     // max over grid of Lambda - alpha
  double max_sandwich_violation = 0.0;  // max of phi^M - phi and phi - theta
  std::optional<double> max_upper_violation;  // max of alpha - Lambda*A
};

BoundsReport check_bounds(const TypeDistribution& dist, const ContinuousAuthRate& a,
                          const PrecisionKernel& kernel,
                          const std::function<double(double)>& qstar = nullptr,
                          int grid_n = 101);

struct PrecisionLimitRow {
  double scale;
  double gap_to_myerson;  // sup |phi_{s*lambda} - phi^M|
  double gap_to_type;     // sup |phi_{s*lambda} - theta|
};

std::vector<PrecisionLimitRow> precision_limit_check(const TypeDistribution& dist,
                                                     const PrecisionKernel& kernel,
                                                     const std::vector<double>& scales,
                                                     int grid_n = 51);

}  // namespace veritest

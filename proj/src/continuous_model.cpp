#include "veritest/continuous_model.hpp"

#include "veritest/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace veritest {

TypeDistribution TypeDistribution::uniform(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("uniform: need lo < hi");
  TypeDistribution d;
  d.lo = lo;
  d.hi = hi;
  const double w = hi - lo;
  d.cdf = [lo, hi, w](double x) { return std::clamp((x - lo) / w, 0.0, 1.0); };
  d.pdf = [w](double) { return 1.0 / w; };
  return d;
}

TypeDistribution TypeDistribution::truncated_exponential(double rate, double lo, double hi) {
  if (!(hi > lo) || rate == 0.0) {
    throw std::invalid_argument("truncated_exponential: need lo < hi and rate != 0");
  }
  TypeDistribution d;
  d.lo = lo;
  d.hi = hi;
  const double z = 1.0 - std::exp(-rate * (hi - lo));
  d.cdf = [=](double x) {
    return std::clamp((1.0 - std::exp(-rate * (x - lo))) / z, 0.0, 1.0);
  };
  d.pdf = [=](double x) { return rate * std::exp(-rate * (x - lo)) / z; };
  return d;
}

TypeDistribution TypeDistribution::tabulated(double lo, double hi, std::vector<double> density) {
  if (!(hi > lo) || density.size() < 2) {
    throw std::invalid_argument("tabulated: need lo < hi and >= 2 density values");
  }
  for (double v : density) {
    if (!(v > 0.0)) throw std::invalid_argument("tabulated: density must be strictly positive");
  }
  const auto n = density.size();
  const double step = (hi - lo) / static_cast<double>(n - 1);
  // Exact integral of the piecewise-linear density, then normalize.
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cum[i] = cum[i - 1] + 0.5 * (density[i - 1] + density[i]) * step;
  }
  const double total = cum.back();
  for (auto& v : density) v /= total;
  for (auto& v : cum) v /= total;

  auto values = std::make_shared<std::pair<std::vector<double>, std::vector<double>>>(
      std::move(density), std::move(cum));
  TypeDistribution d;
  d.lo = lo;
  d.hi = hi;
  d.pdf = [values, lo, hi, step](double x) {
    const auto& dens = values->first;
    const double t = std::clamp((x - lo) / step, 0.0, static_cast<double>(dens.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(t), dens.size() - 2);
    const double frac = t - static_cast<double>(i);
    return dens[i] + frac * (dens[i + 1] - dens[i]);
  };
  d.cdf = [values, lo, step](double x) {
    const auto& dens = values->first;
    const auto& cum = values->second;
    const double t = std::clamp((x - lo) / step, 0.0, static_cast<double>(dens.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(t), dens.size() - 2);
    const double u = (t - static_cast<double>(i)) * step;
    const double slope = (dens[i + 1] - dens[i]) / step;
    return std::clamp(cum[i] + dens[i] * u + 0.5 * slope * u * u, 0.0, 1.0);
  };
  return d;
}

void TypeDistribution::validate(int grid_n) const {
  if (std::abs(cdf(lo)) > 1e-9 || std::abs(cdf(hi) - 1.0) > 1e-9) {
    throw std::invalid_argument("TypeDistribution: F(lo) != 0 or F(hi) != 1");
  }
  const double h = (hi - lo) * 1e-7;
  for (int i = 1; i + 1 < grid_n; ++i) {
    const double x = lo + (hi - lo) * i / (grid_n - 1);
    const double fd = (cdf(x + h) - cdf(x - h)) / (2.0 * h);
    const double f = pdf(x);
    if (!(f > 0.0)) throw std::invalid_argument("TypeDistribution: density not positive");
    if (std::abs(fd - f) > 1e-4 * std::max(1.0, std::abs(f))) {
      throw std::invalid_argument("TypeDistribution: F' does not match f");
    }
  }
}

namespace {
constexpr int kCacheCells = 4096;
}

PrecisionKernel::PrecisionKernel(double lo, double hi, std::function<double(double)> lambda_plus,
                                 std::function<double(double)> lambda_minus)
    : lo_(lo), hi_(hi), lambda_plus_(std::move(lambda_plus)),
      lambda_minus_(std::move(lambda_minus)) {
  if (!(hi_ > lo_)) throw std::invalid_argument("PrecisionKernel: need lo < hi");
  // Cumulative caches on a fine uniform grid (composite Simpson per cell).
  cache_step_ = (hi_ - lo_) / kCacheCells;
  auto build = [this](const std::function<double(double)>& lam) {
    auto cum = std::make_shared<std::vector<double>>(kCacheCells + 1, 0.0);
    for (int i = 0; i < kCacheCells; ++i) {
      const double a = lo_ + i * cache_step_;
      const double b = a + cache_step_;
      const double m = 0.5 * (a + b);
      (*cum)[i + 1] = (*cum)[i] + (b - a) / 6.0 * (lam(a) + 4.0 * lam(m) + lam(b));
    }
    return cum;
  };
  cache_plus_ = build(lambda_plus_);
  cache_minus_ = build(lambda_minus_);
}

PrecisionKernel PrecisionKernel::constant(double lambda, double lo, double hi) {
  if (lambda < 0.0) throw std::invalid_argument("PrecisionKernel: negative precision");
  PrecisionKernel k(lo, hi, [lambda](double) { return lambda; },
                    [lambda](double) { return lambda; });
  k.constant_ = true;
  k.const_plus_ = lambda;
  k.const_minus_ = lambda;
  return k;
}

double PrecisionKernel::cum(bool plus, double x) const {
  x = std::clamp(x, lo_, hi_);
  if (constant_) return (plus ? const_plus_ : const_minus_) * (x - lo_);
  const auto& cache = plus ? *cache_plus_ : *cache_minus_;
  const auto& lam = plus ? lambda_plus_ : lambda_minus_;
  const double t = (x - lo_) / cache_step_;
  const auto i = std::min(static_cast<std::size_t>(t),
                          static_cast<std::size_t>(kCacheCells - 1));
  const double a = lo_ + static_cast<double>(i) * cache_step_;
  if (x <= a) return cache[i];
  const double m = 0.5 * (a + x);
  return cache[i] + (x - a) / 6.0 * (lam(a) + 4.0 * lam(m) + lam(x));
}

double PrecisionKernel::cum_plus(double x) const { return cum(true, x); }
double PrecisionKernel::cum_minus(double x) const { return cum(false, x); }

double PrecisionKernel::discount(double from, double to) const {
  if (to >= from) return std::exp(-(cum(true, to) - cum(true, from)));
  return std::exp(-(cum(false, from) - cum(false, to)));
}

PrecisionKernel PrecisionKernel::scaled(double s) const {
  if (s < 0.0) throw std::invalid_argument("PrecisionKernel: negative scale");
  if (constant_) return PrecisionKernel::constant(s * const_plus_, lo_, hi_);
  auto lp = lambda_plus_;
  auto lm = lambda_minus_;
  return PrecisionKernel(lo_, hi_, [lp, s](double x) { return s * lp(x); },
                         [lm, s](double x) { return s * lm(x); });
}

ContinuousAuthRate ContinuousAuthRate::exponential(const PrecisionKernel& kernel) {
  ContinuousAuthRate a;
  a.lo = kernel.lo();
  a.hi = kernel.hi();
  auto k = std::make_shared<PrecisionKernel>(kernel);
  a.alpha = [k](double r, double t) { return k->discount(r, t); };
  a.d2plus = [k](double t) { return -k->lambda_plus(t); };
  a.d2minus = [k](double t) { return k->lambda_minus(t); };
  return a;
}

ContinuousAuthRate ContinuousAuthRate::exponential_constant(double lambda, double lo, double hi) {
  return exponential(PrecisionKernel::constant(lambda, lo, hi));
}

ContinuousAuthRate ContinuousAuthRate::power_kink(double sigma, double lo, double hi) {
  if (sigma < 1.0) throw std::invalid_argument("power_kink: sigma must be >= 1");
  ContinuousAuthRate a;
  a.lo = lo;
  a.hi = hi;
  a.alpha = [sigma](double r, double t) {
    return std::max(0.0, 1.0 - std::pow(std::abs(r - t), sigma));
  };
  const double diag = sigma > 1.0 ? 0.0 : 1.0;
  a.d2plus = [diag](double) { return -diag; };
  a.d2minus = [diag](double) { return diag; };
  return a;
}

ContinuousAuthRate ContinuousAuthRate::tabulated(double lo, double hi, Eigen::MatrixXd values) {
  const auto n = values.rows();
  if (n < 2 || values.cols() != n) {
    throw std::invalid_argument("tabulated alpha: need a square grid with >= 2 rows");
  }
  if ((values.array() < 0.0).any() || (values.array() > 1.0 + 1e-12).any()) {
    throw std::invalid_argument("tabulated alpha: entries outside [0,1]");
  }
  values.diagonal().setOnes();
  auto grid = std::make_shared<Eigen::MatrixXd>(std::move(values));
  const double step = (hi - lo) / static_cast<double>(n - 1);
  ContinuousAuthRate a;
  a.lo = lo;
  a.hi = hi;
  a.alpha = [grid, lo, step, n](double r, double t) {
    if (std::abs(r - t) < 1e-12) return 1.0;
    const auto clampi = [n](double v) {
      return std::min(static_cast<Eigen::Index>(v), n - 2);
    };
    const double tr = std::clamp((r - lo) / step, 0.0, static_cast<double>(n - 1));
    const double tt = std::clamp((t - lo) / step, 0.0, static_cast<double>(n - 1));
    const Eigen::Index i = clampi(tr), j = clampi(tt);
    const double fr = tr - static_cast<double>(i), ft = tt - static_cast<double>(j);
    return (1.0 - fr) * ((1.0 - ft) * (*grid)(i, j) + ft * (*grid)(i, j + 1)) +
           fr * ((1.0 - ft) * (*grid)(i + 1, j) + ft * (*grid)(i + 1, j + 1));
  };
  return a;
}

PrecisionKernel precision_from_alpha(const ContinuousAuthRate& a) {
  const double lo = a.lo, hi = a.hi;
  auto check = [](double lam) {
    if (lam < -1e-8) {
      throw std::invalid_argument("precision_from_alpha: negative precision beyond tolerance");
    }
    return std::max(0.0, lam);
  };
  std::function<double(double)> lp, lm;
  if (a.d2plus) {
    auto d = a.d2plus;
    lp = [d, check](double t) { return check(-d(t)); };
  } else {
    auto alpha = a.alpha;
    lp = [alpha, lo, hi, check](double t) {
      const double h = 1e-6 * std::max(1.0, hi - lo);
      const double x = std::min(t, hi - 2.0 * h);
      return check(-one_sided_derivative([alpha, x](double r) { return alpha(r, x); }, x, +1, h));
    };
  }
  if (a.d2minus) {
    auto d = a.d2minus;
    lm = [d, check](double t) { return check(d(t)); };
  } else {
    auto alpha = a.alpha;
    lm = [alpha, lo, hi, check](double t) {
      const double h = 1e-6 * std::max(1.0, hi - lo);
      const double x = std::max(t, lo + 2.0 * h);
      return check(one_sided_derivative([alpha, x](double r) { return alpha(r, x); }, x, -1, h));
    };
  }
  return PrecisionKernel(lo, hi, std::move(lp), std::move(lm));
}

double myerson_virtual_value(const TypeDistribution& dist, double theta) {
  return theta - (1.0 - dist.cdf(theta)) / dist.pdf(theta);
}

double virtual_value(const TypeDistribution& dist, const PrecisionKernel& kernel,
                     double theta, double quad_tol) {
  const double c0 = kernel.cum_plus(theta);
  const double rent = integrate(
      [&](double z) { return std::exp(c0 - kernel.cum_plus(z)) * dist.pdf(z); }, theta,
      dist.hi, quad_tol);
  return theta - rent / dist.pdf(theta);
}

BoundsReport check_bounds(const TypeDistribution& dist, const ContinuousAuthRate& a,
                          const PrecisionKernel& kernel,
                          const std::function<double(double)>& qstar, int grid_n) {
  BoundsReport report;
  const double lo = dist.lo, hi = dist.hi;
  auto grid_point = [&](int i) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
  };

  // Denominator integrand of the upper-bound factor A(report|type).
  auto a_factor = [&](double report, double type) {
    const double num = integrate(
        [&](double z) { return kernel.discount(z, hi) * qstar(z); }, lo, type, 1e-9);
    const double den = integrate(
        [&](double z) {
          const double zc = std::min(z, report);
          return kernel.discount(zc, hi) * qstar(zc);
        },
        lo, type, 1e-9, {report});
    return den > 0.0 ? num / den : 1.0;
  };

  double upper = 0.0;
  bool has_upper = static_cast<bool>(qstar);
  for (int i = 0; i < grid_n; ++i) {
    const double type = grid_point(i);
    for (int j = 0; j < grid_n; ++j) {
      const double rep = grid_point(j);
      const double alpha = a.alpha(rep, type);
      const double lam = kernel.discount(rep, type);
      report.max_lower_violation = std::max(report.max_lower_violation, lam - alpha);
      if (has_upper && rep <= type) {
        upper = std::max(upper, alpha - lam * a_factor(rep, type));
      }
    }
    const double phi = virtual_value(dist, kernel, type);
    const double phim = myerson_virtual_value(dist, type);
    report.max_sandwich_violation =
        std::max({report.max_sandwich_violation, phim - phi, phi - type});
  }
  if (has_upper) report.max_upper_violation = upper;
  return report;
}

std::vector<PrecisionLimitRow> precision_limit_check(const TypeDistribution& dist,
                                                     const PrecisionKernel& kernel,
                                                     const std::vector<double>& scales,
                                                     int grid_n) {
  std::vector<PrecisionLimitRow> rows;
  rows.reserve(scales.size());
  for (double s : scales) {
    const PrecisionKernel k = kernel.scaled(s);
    double gap_m = 0.0, gap_t = 0.0;
    for (int i = 0; i < grid_n; ++i) {
      const double theta =
          dist.lo + (dist.hi - dist.lo) * static_cast<double>(i) / static_cast<double>(grid_n - 1);
      const double phi = virtual_value(dist, k, theta);
      gap_m = std::max(gap_m, std::abs(phi - myerson_virtual_value(dist, theta)));
      gap_t = std::max(gap_t, std::abs(phi - theta));
    }
    rows.push_back({s, gap_m, gap_t});
  }
  return rows;
}

}  // namespace veritest

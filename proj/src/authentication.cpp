#include "veritest/authentication.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace veritest {

namespace {
constexpr double kTol = 1e-12;

PassageMatrix alpha_environment(const FiniteAuthRate& a) {
  std::vector<std::string> tests;
  tests.reserve(a.types.size());
  for (const auto& t : a.types) tests.push_back("tau_" + t);
  return PassageMatrix::binary(a.types, std::move(tests), a.alpha);
}

}  // namespace

FiniteAuthRate make_auth_rate(std::vector<std::string> types, Mat alpha) {
  const auto n = static_cast<Eigen::Index>(types.size());
  if (alpha.rows() != n || alpha.cols() != n) {
    throw std::invalid_argument("make_auth_rate: matrix must be square over types");
  }
  if ((alpha.array() < -kTol).any() || (alpha.array() > 1.0 + kTol).any()) {
    throw std::invalid_argument("make_auth_rate: entries outside [0,1]");
  }
  return FiniteAuthRate{std::move(types), std::move(alpha)};
}

AlphaValidation is_most_discerning_alpha(const FiniteAuthRate& a) {
  const auto n = static_cast<std::size_t>(a.alpha.rows());
  AlphaValidation out;

  // Fast path: when every report's passage rate peaks at the truthful type,
  // the property reduces to the nested-range triple-product inequality.
  bool dominant = true;
  for (std::size_t r = 0; r < n && dominant; ++r) {
    for (std::size_t t = 0; t < n && dominant; ++t) {
      dominant = a(r, r) >= a(r, t);
    }
  }
  if (dominant) {
    out.used_fast_path = true;
    for (std::size_t t1 = 0; t1 < n; ++t1) {
      for (std::size_t t2 = 0; t2 < n; ++t2) {
        for (std::size_t t3 = 0; t3 < n; ++t3) {
          const double lhs = a(t3, t2) * a(t2, t1);
          const double rhs = a(t3, t1) * a(t2, t2);
          if (lhs > rhs + kTol) {
            out.violation = AlphaViolation{t1, t2, t3, lhs - rhs};
            return out;
          }
        }
      }
    }
    out.most_discerning = true;
    return out;
  }

  // Full path: the identity testing function on the induced environment must
  // be most discerning.
  const PassageMatrix env = alpha_environment(a);
  for (std::size_t theta = 0; theta < n; ++theta) {
    for (std::size_t psi = 0; psi < n; ++psi) {
      if (psi == theta) continue;
      const auto w = check_discerning(env, theta, theta, psi);
      if (!w.holds) {
        // Certificate: the other type whose half-line constraint is violated
        // even at its own best lambda endpoint.
        std::size_t worst = psi;
        double slack = 0.0;
        const double pt = a(theta, theta), pp = a(psi, theta);
        for (std::size_t o = 0; o < n; ++o) {
          if (o == theta) continue;
          double av, bv;
          if (pt >= pp) {
            av = (a(theta, o) - pt) * pp;
            bv = pt * (a(psi, o) - pp);
          } else {
            av = -((1.0 - a(theta, o)) - (1.0 - pt)) * (1.0 - pp);
            bv = -(1.0 - pt) * ((1.0 - a(psi, o)) - (1.0 - pp));
          }
          const double best = std::min(-bv, av - bv);  // violation at lambda 0 or 1
          if (best > slack) {
            slack = best;
            worst = o;
          }
        }
        out.violation = AlphaViolation{worst, psi, theta, slack};
        return out;
      }
    }
  }
  out.most_discerning = true;
  return out;
}

std::vector<bool> minimal_types(const FiniteAuthRate& a) {
  const auto n = static_cast<std::size_t>(a.alpha.rows());
  std::vector<bool> out(n, true);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t o = 0; o < n; ++o) {
      if (a(t, t) > a(t, o) + kTol) {
        out[t] = false;
        break;
      }
    }
  }
  return out;
}

bool essentially_equal(const FiniteAuthRate& a1, const FiniteAuthRate& a2, double tol) {
  if (a1.types != a2.types) throw std::invalid_argument("essentially_equal: type labels differ");
  const auto m1 = minimal_types(a1);
  const auto m2 = minimal_types(a2);
  if (m1 != m2) return false;
  for (std::size_t t = 0; t < m1.size(); ++t) {
    if (m1[t]) continue;
    const auto r = static_cast<Eigen::Index>(t);
    if ((a1.alpha.row(r) - a2.alpha.row(r)).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

FiniteAuthRate induce_alpha(const PassageMatrix& env, const std::vector<std::size_t>& tdhat) {
  if (!env.binary_scores()) throw std::invalid_argument("induce_alpha: binary scores required");
  if (tdhat.size() != env.num_types()) {
    throw std::invalid_argument("induce_alpha: tdhat size mismatch");
  }
  for (std::size_t theta = 0; theta < env.num_types(); ++theta) {
    for (std::size_t psi = 0; psi < env.num_tests(); ++psi) {
      if (!check_discerning(env, theta, tdhat[theta], psi).holds) {
        throw std::invalid_argument("induce_alpha: tdhat is not most discerning");
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(env.num_types());
  Mat alpha(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index t = 0; t < n; ++t) {
      alpha(r, t) = env.pass_rate(tdhat[static_cast<std::size_t>(r)],
                                  static_cast<std::size_t>(t));
    }
  }
  return FiniteAuthRate{env.types(), std::move(alpha)};
}

AlphaEnvironment environment_from_alpha(const FiniteAuthRate& a) {
  const auto check = is_most_discerning_alpha(a);
  if (!check.most_discerning) {
    throw std::invalid_argument("environment_from_alpha: alpha is not most discerning");
  }
  std::vector<std::size_t> tdhat(a.types.size());
  for (std::size_t i = 0; i < tdhat.size(); ++i) tdhat[i] = i;
  return AlphaEnvironment{alpha_environment(a), std::move(tdhat)};
}

}  // namespace veritest

#include "popeq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "popeq/error.hpp"

namespace popeq {
namespace {

constexpr int kScanPoints = 64;

std::string fmt_interval(Interval iv) {
  return "[" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "]";
}

}  // namespace

EquilibriumInfo find_equilibrium(const ModelSpec& model, std::optional<Interval> bracket) {
  if (const auto* p = model.bdi_params(); p && p->d <= p->b * p->moment(1))
    throw Error(ErrorKind::UnstableEquilibrium, "death rate d does not exceed b * m1");

  const Interval br = bracket.value_or(model.default_bracket());
  if (!(br.hi > br.lo)) throw Error(ErrorKind::InvalidArgument, "empty bracket " + fmt_interval(br));

  // Sign scan; a grid value of exactly zero counts as a root on its own.
  std::vector<double> z(kScanPoints), f(kScanPoints);
  for (int k = 0; k < kScanPoints; ++k) {
    z[k] = br.lo + (br.hi - br.lo) * k / (kScanPoints - 1);
    f[k] = model.drift(z[k]);
  }
  int roots = 0;
  double lo = br.lo, hi = br.hi;
  for (int k = 0; k + 1 < kScanPoints; ++k) {
    if (f[k] == 0.0) {
      ++roots;
      lo = hi = z[k];
    } else if (f[k + 1] != 0.0 && (f[k] < 0.0) != (f[k + 1] < 0.0)) {
      ++roots;
      lo = z[k];
      hi = z[k + 1];
    }
  }
  if (f[kScanPoints - 1] == 0.0) {
    ++roots;
    lo = hi = z[kScanPoints - 1];
  }
  if (roots == 0) throw Error(ErrorKind::NoSignChange, "F does not change sign on " + fmt_interval(br));
  if (roots > 1)
    throw Error(ErrorKind::MultipleRoots,
                "F changes sign " + std::to_string(roots) + " times on " + fmt_interval(br));

  double flo = model.drift(lo);
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = model.drift(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double c = 0.5 * (lo + hi);

  auto slope = model.drift_derivative(c);
  if (slope && *slope != 0.0) {
    const double polished = c - model.drift(c) / *slope;
    if (std::abs(model.drift(polished)) <= std::abs(model.drift(c))) c = polished;
  }

  EquilibriumInfo info;
  info.c = c;
  if (auto d = model.drift_derivative(c)) {
    info.f_prime_c = *d;
  } else {
    const double h = 1e-5 * std::max(1.0, std::abs(c));
    info.f_prime_c = (model.drift(c + h) - model.drift(c - h)) / (2.0 * h);
  }
  if (!(info.f_prime_c < 0.0))
    throw Error(ErrorKind::UnstableEquilibrium, "F'(c) = " + std::to_string(info.f_prime_c) + " is not negative");
  info.sigma2_c = model.sigma2(c);
  info.v_c = info.sigma2_c / (-2.0 * info.f_prime_c);
  info.solver_residual = std::abs(model.drift(c));
  return info;
}

EquilibriumInfo closed_form_bdi(double a, double b, double d, const std::map<int, double>& offspring) {
  BdiParams p{a, b, d, offspring};
  const double m1 = p.moment(1);
  const double m2 = p.moment(2);
  const double net = d - b * m1;
  if (!(net > 0.0)) throw Error(ErrorKind::UnstableEquilibrium, "closed form needs d > b * m1");
  EquilibriumInfo info;
  info.c = a / net;
  info.f_prime_c = -net;
  info.sigma2_c = a + info.c * (b * m2 + d);
  info.v_c = a * (2.0 * d + b * (m2 - m1)) / (2.0 * net * net);
  info.solver_residual = 0.0;
  return info;
}

}  // namespace popeq

#include "popeq/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "popeq/error.hpp"
#include "popeq/kernels.hpp"

namespace popeq {

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::BdiGroupBirths: return "bdi";
    case Family::AffineRates: return "affine";
    case Family::TabulatedRates: return "tabulated";
  }
  return "unknown";
}

double BdiParams::moment(int r) const {
  double m = 0.0;
  for (const auto& [j, q] : offspring) m += std::pow(static_cast<double>(j), r) * q;
  return m;
}

struct ModelSpec::Impl {
  std::variant<BdiParams, std::map<int, AffineRate>, std::map<int, RateFn>> params;
};

ModelSpec::ModelSpec(Family family, std::shared_ptr<const Impl> impl, std::vector<int> support)
    : family_(family), impl_(std::move(impl)), support_(std::move(support)) {
  if (support_.empty()) throw Error(ErrorKind::InvalidArgument, "model has empty jump support");
  std::sort(support_.begin(), support_.end());
}

ModelSpec ModelSpec::bdi(BdiParams p) {
  if (!(p.a > 0.0)) throw Error(ErrorKind::InvalidArgument, "immigration rate a must be > 0");
  if (!(p.b >= 0.0)) throw Error(ErrorKind::InvalidArgument, "birth-event rate b must be >= 0");
  if (!(p.d > 0.0)) throw Error(ErrorKind::InvalidArgument, "death rate d must be > 0");
  if (p.offspring.empty()) throw Error(ErrorKind::InvalidArgument, "offspring pmf is empty");
  double total = 0.0;
  for (const auto& [j, q] : p.offspring) {
    if (j < 1) throw Error(ErrorKind::InvalidArgument, "offspring sizes must be >= 1");
    if (!(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "offspring probabilities must be >= 0");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidArgument, "offspring pmf must sum to 1");

  std::vector<int> support{-1, 1};
  for (const auto& [j, q] : p.offspring)
    if (q > 0.0 && j != 1) support.push_back(j);
  auto impl = std::make_shared<Impl>(Impl{std::move(p)});
  return ModelSpec(Family::BdiGroupBirths, std::move(impl), std::move(support));
}

ModelSpec ModelSpec::affine(std::map<int, AffineRate> rates) {
  std::vector<int> support;
  for (const auto& [j, r] : rates) {
    if (j == 0) throw Error(ErrorKind::InvalidArgument, "jump size 0 is not allowed");
    if (!std::isfinite(r.intercept) || !std::isfinite(r.slope))
      throw Error(ErrorKind::InvalidArgument, "affine rate coefficients must be finite");
    if (r.intercept > 0.0 || r.slope > 0.0) support.push_back(j);
  }
  auto impl = std::make_shared<Impl>(Impl{std::move(rates)});
  return ModelSpec(Family::AffineRates, std::move(impl), std::move(support));
}

ModelSpec ModelSpec::tabulated(std::map<int, RateFn> rates) {
  std::vector<int> support;
  for (const auto& [j, f] : rates) {
    if (j == 0) throw Error(ErrorKind::InvalidArgument, "jump size 0 is not allowed");
    if (!f) throw Error(ErrorKind::InvalidArgument, "empty rate callable");
    support.push_back(j);
  }
  auto impl = std::make_shared<Impl>(Impl{std::move(rates)});
  return ModelSpec(Family::TabulatedRates, std::move(impl), std::move(support));
}

bool ModelSpec::in_support(int j) const {
  return std::binary_search(support_.begin(), support_.end(), j);
}

const BdiParams* ModelSpec::bdi_params() const { return std::get_if<BdiParams>(&impl_->params); }

const std::map<int, AffineRate>* ModelSpec::affine_params() const {
  return std::get_if<std::map<int, AffineRate>>(&impl_->params);
}

double ModelSpec::rate(int j, double z) const {
  if (j == 0) throw Error(ErrorKind::InvalidArgument, "jump size 0 is not allowed");
  const double zp = std::max(z, 0.0);
  if (const auto* p = bdi_params()) {
    if (j == -1) return p->d * zp;
    if (j < 1) return 0.0;
    auto it = p->offspring.find(j);
    const double births = it == p->offspring.end() ? 0.0 : p->b * it->second * zp;
    return j == 1 ? p->a + births : births;
  }
  if (const auto* m = affine_params()) {
    auto it = m->find(j);
    if (it == m->end()) return 0.0;
    return std::max(0.0, it->second.intercept + it->second.slope * zp);
  }
  const auto& fns = std::get<std::map<int, RateFn>>(impl_->params);
  auto it = fns.find(j);
  if (it == fns.end()) return 0.0;
  return std::max(0.0, it->second(z));
}

std::optional<double> ModelSpec::rate_derivative(int j, double z) const {
  if (const auto* p = bdi_params()) {
    if (z < 0.0) return 0.0;
    if (j == -1) return p->d;
    if (j < 1) return 0.0;
    auto it = p->offspring.find(j);
    return it == p->offspring.end() ? 0.0 : p->b * it->second;
  }
  if (const auto* m = affine_params()) {
    auto it = m->find(j);
    if (it == m->end() || z < 0.0) return 0.0;
    return it->second.intercept + it->second.slope * z > 0.0 ? it->second.slope : 0.0;
  }
  return std::nullopt;
}

double ModelSpec::drift(double z) const {
  double f = 0.0;
  for (int j : support_) f += j * rate(j, z);
  return f;
}

double ModelSpec::sigma2(double z) const {
  double s = 0.0;
  for (int j : support_) s += static_cast<double>(j) * j * rate(j, z);
  return s;
}

std::optional<double> ModelSpec::drift_derivative(double z) const {
  double f = 0.0;
  for (int j : support_) {
    auto d = rate_derivative(j, z);
    if (!d) return std::nullopt;
    f += j * *d;
  }
  return f;
}

Interval ModelSpec::default_bracket() const {
  if (const auto* p = bdi_params()) {
    const double net = p->d - p->b * p->moment(1);
    return {1e-6, 10.0 * p->a / (net > 0.0 ? net : p->d)};
  }
  return {1e-6, 100.0};
}

RateFn interpolated_rate(std::vector<double> z, std::vector<double> rate) {
  if (z.empty() || z.size() != rate.size())
    throw Error(ErrorKind::InvalidArgument, "tabulated rate needs matching, nonempty z and rate arrays");
  for (std::size_t k = 1; k < z.size(); ++k)
    if (!(z[k] > z[k - 1])) throw Error(ErrorKind::InvalidArgument, "tabulated z must be increasing");
  return [z = std::move(z), r = std::move(rate)](double x) {
    if (x <= z.front()) return std::max(0.0, r.front());
    if (x >= z.back()) return std::max(0.0, r.back());
    const auto k = static_cast<std::size_t>(std::upper_bound(z.begin(), z.end(), x) - z.begin());
    const double t = (x - z[k - 1]) / (z[k] - z[k - 1]);
    return std::max(0.0, r[k - 1] + t * (r[k] - r[k - 1]));
  };
}

double eval_rate(const ModelSpec& model, int j, double z) { return model.rate(j, z); }
double eval_F(const ModelSpec& model, double z) { return model.drift(z); }
double eval_sigma2(const ModelSpec& model, double z) { return model.sigma2(z); }

namespace {

void require_cover(const WindowFn& h, State a, State b) {
  if (!h.covers(a, b))
    throw Error(ErrorKind::WindowTooSmall,
                "function window [" + std::to_string(h.lo()) + ", " + std::to_string(h.hi()) +
                    "] does not cover [" + std::to_string(a) + ", " + std::to_string(b) + "]");
}

double density(State i, long n) { return static_cast<double>(i) / static_cast<double>(n); }

double grad(const WindowFn& g, State i) { return g(i) - g(i - 1); }
double grad2(const WindowFn& g, State i) { return g(i) - 2.0 * g(i - 1) + g(i - 2); }

}  // namespace

double generator_apply(const ModelSpec& model, long n, const WindowFn& h, State i) {
  require_cover(h, std::min<State>(i, i + model.min_jump()), std::max<State>(i, i + model.max_jump()));
  const double z = density(i, n);
  const double hi = h(i);
  double acc = 0.0;
  for (int j : model.jump_support()) acc += static_cast<double>(n) * model.rate(j, z) * (h(i + j) - hi);
  return acc;
}

std::vector<double> generator_apply_range(const ModelSpec& model, long n, const WindowFn& h,
                                          IntWindow states) {
  const auto count = static_cast<std::size_t>(states.size());
  std::vector<double> out(count, 0.0);
  if (count == 0) return out;
  require_cover(h, std::min<State>(states.lo, states.lo + model.min_jump()),
                std::max<State>(states.hi, states.hi + model.max_jump()));
  const auto values = h.values();
  const auto base = values.subspan(static_cast<std::size_t>(states.lo - h.lo()), count);
  std::vector<double> rate(count);
  for (int j : model.jump_support()) {
    for (std::size_t s = 0; s < count; ++s)
      rate[s] = static_cast<double>(n) * model.rate(j, density(states.lo + static_cast<State>(s), n));
    const auto shifted = values.subspan(static_cast<std::size_t>(states.lo + j - h.lo()), count);
    kernels::jump_diff_acc(rate, shifted, base, out);
  }
  return out;
}

WindowFn forward_difference(const WindowFn& h) {
  const auto v = h.values();
  if (v.size() < 2) throw Error(ErrorKind::WindowTooSmall, "need at least two points to difference");
  std::vector<double> g(v.size() - 1);
  for (std::size_t k = 0; k + 1 < v.size(); ++k) g[k] = v[k + 1] - v[k];
  return WindowFn(h.lo(), std::move(g));
}

double a_coefficient(const WindowFn& g, State i, int j) {
  double twice = -static_cast<double>(j) * (j - 1) * grad(g, i);
  for (int k = 1; k <= j - 1; ++k) twice += 2.0 * k * grad(g, i + j - k);
  return 0.5 * twice;
}

double b_coefficient(const WindowFn& g, State i, int j) {
  double twice = static_cast<double>(j) * (j - 1) * grad(g, i);
  for (int k = 1; k <= j - 1; ++k) twice -= 2.0 * k * grad(g, i - j + k);
  return 0.5 * twice;
}

double a_coefficient_second_diff(const WindowFn& g, State i, int j) {
  double s = 0.0;
  for (int k = 2; k <= j; ++k) s += 0.5 * k * (k - 1) * grad2(g, i + j - k + 1);
  return s;
}

double b_coefficient_second_diff(const WindowFn& g, State i, int j) {
  double s = 0.0;
  for (int k = 2; k <= j; ++k) s += 0.5 * k * (k - 1) * grad2(g, i - j + k);
  return s;
}

GeneratorParts generator_decompose(const ModelSpec& model, long n, const WindowFn& h, State i) {
  require_cover(h, std::min<State>(i - 1, i + model.min_jump()), std::max<State>(i + 1, i + model.max_jump()));
  const WindowFn g = forward_difference(h);
  const double z = density(i, n);
  const double nn = static_cast<double>(n);
  const double f = model.drift(z);
  const double dg = grad(g, i);

  GeneratorParts parts;
  parts.main_sigma_term = 0.5 * nn * model.sigma2(z) * dg;
  parts.main_drift_term = nn * f * g(i);
  double rem = -0.5 * nn * f * dg;
  for (int j : model.jump_support()) {
    if (j >= 2) rem += a_coefficient(g, i, j) * nn * model.rate(j, z);
    if (j <= -2) rem -= b_coefficient(g, i, -j) * nn * model.rate(j, z);
  }
  parts.remainder = rem;
  return parts;
}

}  // namespace popeq

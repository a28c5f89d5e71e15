#include "popeq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "popeq/error.hpp"
#include "popeq/kernels.hpp"

namespace popeq {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::UnstableEquilibrium: return "UnstableEquilibrium";
    case ErrorKind::MultipleRoots: return "MultipleRoots";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::RateOverflow: return "RateOverflow";
    case ErrorKind::StuckState: return "StuckState";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

WindowFn::WindowFn(State lo, std::vector<double> values) : lo_(lo), values_(std::move(values)) {}

WindowFn WindowFn::tabulate(IntWindow window, const std::function<double(State)>& f) {
  std::vector<double> v(static_cast<std::size_t>(window.size()));
  for (State k = window.lo; k <= window.hi; ++k) v[static_cast<std::size_t>(k - window.lo)] = f(k);
  return WindowFn(window.lo, std::move(v));
}

double WindowFn::operator()(State k) const {
  if (k < lo() || k > hi())
    throw Error(ErrorKind::WindowTooSmall,
                "function evaluated at " + std::to_string(k) + " outside its window [" +
                    std::to_string(lo()) + ", " + std::to_string(hi()) + "]");
  return values_[static_cast<std::size_t>(k - lo_)];
}

LatticeDist::LatticeDist(State offset, std::vector<double> weights, double tol)
    : offset_(offset), weights_(std::move(weights)) {
  if (weights_.empty()) throw Error(ErrorKind::InvalidArgument, "empty distribution");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::InvalidArgument, "distribution weights must be finite and non-negative");
  const double total = kernels::sum(weights_);
  if (std::abs(total - 1.0) > tol)
    throw Error(ErrorKind::InvalidArgument,
                "distribution mass " + std::to_string(total) + " outside tolerance of 1");
  for (double& w : weights_) w /= total;
}

LatticeDist LatticeDist::point_mass(State at) { return LatticeDist(at, {1.0}); }

double LatticeDist::pmf(State k) const {
  if (k < lo() || k > hi()) return 0.0;
  return weights_[static_cast<std::size_t>(k - offset_)];
}

double LatticeDist::expect(const std::function<double(State)>& f) const {
  std::vector<double> values(weights_.size());
  for (std::size_t k = 0; k < weights_.size(); ++k) values[k] = f(offset_ + static_cast<State>(k));
  return kernels::dot(weights_, values);
}

double LatticeDist::mean() const {
  return expect([](State k) { return static_cast<double>(k); });
}

double LatticeDist::variance() const {
  const double m = mean();
  return expect([m](State k) {
    const double d = static_cast<double>(k) - m;
    return d * d;
  });
}

std::vector<double> LatticeDist::dense_on(IntWindow window) const {
  std::vector<double> out(static_cast<std::size_t>(window.size()), 0.0);
  const State a = std::max(window.lo, lo());
  const State b = std::min(window.hi, hi());
  for (State k = a; k <= b; ++k)
    out[static_cast<std::size_t>(k - window.lo)] = weights_[static_cast<std::size_t>(k - offset_)];
  return out;
}

LatticeDist centre(const LatticeDist& dist, State by) {
  return LatticeDist(dist.offset() - by, std::vector<double>(dist.weights().begin(), dist.weights().end()));
}

IntegerSet IntegerSet::interval(State lo, State hi) {
  IntegerSet s;
  if (hi >= lo) s.pieces_.push_back({lo, hi});
  return s;
}

IntegerSet IntegerSet::from_points(std::vector<State> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  IntegerSet s;
  for (State p : points) {
    if (!s.pieces_.empty() && s.pieces_.back().hi + 1 == p)
      s.pieces_.back().hi = p;
    else
      s.pieces_.push_back({p, p});
  }
  return s;
}

bool IntegerSet::contains(State k) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), k,
                             [](State v, const IntWindow& w) { return v < w.lo; });
  if (it == pieces_.begin()) return false;
  --it;
  return k <= it->hi;
}

State IntegerSet::cardinality() const {
  if (!bounded()) return kUnbounded;
  State n = 0;
  for (const auto& p : pieces_) n += p.size();
  return n;
}

}  // namespace popeq

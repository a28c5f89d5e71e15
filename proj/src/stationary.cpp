#include "popeq/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "popeq/error.hpp"
#include "popeq/kernels.hpp"

namespace popeq {

// Band storage is diagonal-major: diagonal o (offset o - lower_) occupies
// band_[o * N, (o + 1) * N), entry s being Q[s, s + o - lower_].
BandGenerator::BandGenerator(const ModelSpec& model, long n, IntWindow window)
    : window_(window),
      lower_(std::max(0, -model.min_jump())),
      upper_(std::max(0, model.max_jump())),
      width_(static_cast<std::size_t>(lower_ + upper_ + 1)) {
  const std::size_t count = size();
  if (count < 2) throw Error(ErrorKind::WindowTooSmall, "truncation window needs at least two states");
  band_.assign(width_ * count, 0.0);
  const auto last = static_cast<State>(count) - 1;
  for (std::size_t s = 0; s < count; ++s) {
    const double z = static_cast<double>(window.lo + static_cast<State>(s)) / static_cast<double>(n);
    for (int j : model.jump_support()) {
      const double r = static_cast<double>(n) * model.rate(j, z);
      if (!(r > 0.0)) continue;
      if (!std::isfinite(r)) throw Error(ErrorKind::RateOverflow, "non-finite rate while building the generator");
      const State t = std::clamp<State>(static_cast<State>(s) + j, 0, last);
      if (t == static_cast<State>(s)) continue;
      const auto o = static_cast<std::size_t>(t - static_cast<State>(s) + lower_);
      band_[o * count + s] += r;
      band_[static_cast<std::size_t>(lower_) * count + s] -= r;
    }
  }
}

double BandGenerator::at(std::size_t row, std::size_t col) const {
  const auto off = static_cast<long long>(col) - static_cast<long long>(row);
  if (off < -lower_ || off > upper_ || row >= size() || col >= size()) return 0.0;
  return band_[static_cast<std::size_t>(off + lower_) * size() + row];
}

double BandGenerator::residual_norm(std::span<const double> pi) const {
  const std::size_t count = size();
  std::vector<double> y(count, 0.0);
  for (int o = -lower_; o <= upper_; ++o) {
    const std::size_t s0 = o < 0 ? static_cast<std::size_t>(-o) : 0;
    const std::size_t s1 = o > 0 ? count - static_cast<std::size_t>(o) : count;
    if (s1 <= s0) continue;
    const std::span<const double> diag(band_.data() + static_cast<std::size_t>(o + lower_) * count, count);
    kernels::mul_acc(pi.subspan(s0, s1 - s0), diag.subspan(s0, s1 - s0),
                     std::span<double>(y).subspan(static_cast<std::size_t>(static_cast<long long>(s0) + o), s1 - s0));
  }
  return kernels::sum_abs(y);
}

namespace {

/// States of the unique closed communicating class, in increasing order.
/// Throws SingularSystem if there is more than one.
std::vector<std::size_t> closed_class(const BandGenerator& q) {
  const std::size_t count = q.size();
  auto neighbours = [&](std::size_t s, auto&& visit) {
    for (int o = -q.lower(); o <= q.upper(); ++o) {
      if (o == 0) continue;
      const auto t = static_cast<long long>(s) + o;
      if (t < 0 || t >= static_cast<long long>(count)) continue;
      if (q.at(s, static_cast<std::size_t>(t)) > 0.0) visit(static_cast<std::size_t>(t));
    }
  };

  // Iterative Tarjan.
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(count, kUnset), low(count, 0), comp(count, kUnset);
  std::vector<char> on_stack(count, 0);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0, n_comp = 0;
  struct Frame {
    std::size_t s;
    int next_offset;
  };
  std::vector<Frame> call;
  for (std::size_t root = 0; root < count; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, -q.lower()});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      bool descended = false;
      while (fr.next_offset <= q.upper()) {
        const int o = fr.next_offset++;
        if (o == 0) continue;
        const auto t = static_cast<long long>(fr.s) + o;
        if (t < 0 || t >= static_cast<long long>(count)) continue;
        const auto ts = static_cast<std::size_t>(t);
        if (!(q.at(fr.s, ts) > 0.0)) continue;
        if (index[ts] == kUnset) {
          index[ts] = low[ts] = next_index++;
          stack.push_back(ts);
          on_stack[ts] = 1;
          call.push_back({ts, -q.lower()});
          descended = true;
          break;
        }
        if (on_stack[ts]) low[fr.s] = std::min(low[fr.s], index[ts]);
      }
      if (descended) continue;
      const std::size_t s = fr.s;
      if (low[s] == index[s]) {
        std::size_t t;
        do {
          t = stack.back();
          stack.pop_back();
          on_stack[t] = 0;
          comp[t] = n_comp;
        } while (t != s);
        ++n_comp;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().s] = std::min(low[call.back().s], low[s]);
    }
  }

  std::vector<char> leaks(n_comp, 0);
  for (std::size_t s = 0; s < count; ++s)
    neighbours(s, [&](std::size_t t) {
      if (comp[t] != comp[s]) leaks[comp[s]] = 1;
    });
  std::size_t closed = kUnset;
  int n_closed = 0;
  for (std::size_t c = 0; c < n_comp; ++c)
    if (!leaks[c]) {
      ++n_closed;
      closed = c;
    }
  if (n_closed != 1)
    throw Error(ErrorKind::SingularSystem,
                "truncated chain has " + std::to_string(n_closed) + " closed classes; stationary law is not unique");
  std::vector<std::size_t> members;
  for (std::size_t s = 0; s < count; ++s)
    if (comp[s] == closed) members.push_back(s);
  return members;
}

}  // namespace

std::vector<double> solve_direct(const BandGenerator& q) {
  const auto members = closed_class(q);
  const std::size_t m = members.size();
  const int lower = q.lower(), upper = q.upper();
  const auto width = static_cast<std::size_t>(lower + upper + 1);
  std::vector<double> out(q.size(), 0.0);
  if (m == 1) {
    out[members[0]] = 1.0;
    return out;
  }

  // Row-major copy of the off-diagonal rates restricted to the closed class.
  // Member indices are increasing, so compressed offsets stay in the band.
  std::vector<long long> position(q.size(), -1);
  for (std::size_t k = 0; k < m; ++k) position[members[k]] = static_cast<long long>(k);
  std::vector<double> a(width * m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t s = members[k];
    for (int o = -lower; o <= upper; ++o) {
      if (o == 0) continue;
      const auto t = static_cast<long long>(s) + o;
      if (t < 0 || t >= static_cast<long long>(q.size()) || position[static_cast<std::size_t>(t)] < 0) continue;
      const double r = q.at(s, static_cast<std::size_t>(t));
      if (r == 0.0) continue;
      const long long off = position[static_cast<std::size_t>(t)] - static_cast<long long>(k);
      a[k * width + static_cast<std::size_t>(off + lower)] += r;
    }
  }
  auto entry = [&](std::size_t row, long long off) -> double& {
    return a[row * width + static_cast<std::size_t>(off + lower)];
  };

  // Grassmann-Taksar-Heyman state reduction, lowest state first. Only sums
  // of non-negative numbers appear, so every component keeps full relative
  // precision; fill-in stays inside the band.
  std::vector<double> out_rate(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const std::size_t reach = std::min<std::size_t>(static_cast<std::size_t>(upper), m - 1 - k);
    double total = 0.0;
    for (std::size_t o = 1; o <= reach; ++o) total += entry(k, static_cast<long long>(o));
    if (!(total > 0.0))
      throw Error(ErrorKind::SingularSystem, "state reduction met a state with no rate to the remaining states");
    out_rate[k] = total;
    const std::span<const double> src(&entry(k, 1), reach);
    const std::size_t rows = std::min<std::size_t>(static_cast<std::size_t>(lower), m - 1 - k);
    for (std::size_t d = 1; d <= rows; ++d) {
      const std::size_t i = k + d;
      const double into_k = entry(i, -static_cast<long long>(d));
      if (into_k == 0.0) continue;
      // Columns k+1 .. k+reach of row i sit at offsets 1-d .. reach-d.
      std::span<double> dst(&entry(i, 1 - static_cast<long long>(d)), reach);
      kernels::axpy(into_k / total, src, dst);
    }
  }

  std::vector<double> pi(m, 0.0);
  pi[m - 1] = 1.0;
  for (std::size_t kk = m - 1; kk-- > 0;) {
    const std::size_t rows = std::min<std::size_t>(static_cast<std::size_t>(lower), m - 1 - kk);
    double inflow = 0.0;
    for (std::size_t d = 1; d <= rows; ++d) inflow += pi[kk + d] * entry(kk + d, -static_cast<long long>(d));
    pi[kk] = inflow / out_rate[kk];
  }
  const double total = kernels::sum(pi);
  for (std::size_t k = 0; k < m; ++k) out[members[k]] = pi[k] / total;
  return out;
}

std::vector<double> solve_uniformization(const BandGenerator& q, double tol, int max_iter, int* iterations) {
  const std::size_t count = q.size();
  const int lower = q.lower();
  double lambda = 0.0;
  for (std::size_t s = 0; s < count; ++s) lambda = std::max(lambda, -q.at(s, s));
  if (!(lambda > 0.0)) throw Error(ErrorKind::SingularSystem, "generator has no transitions");
  lambda *= 1.05;

  std::vector<double> scaled(q.band_);
  for (double& x : scaled) x /= lambda;

  std::vector<double> pi(count, 1.0 / static_cast<double>(count)), next(count);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::copy(pi.begin(), pi.end(), next.begin());
    for (int o = -lower; o <= q.upper(); ++o) {
      const std::size_t s0 = o < 0 ? static_cast<std::size_t>(-o) : 0;
      const std::size_t s1 = o > 0 ? count - static_cast<std::size_t>(o) : count;
      if (s1 <= s0) continue;
      const std::span<const double> diag(scaled.data() + static_cast<std::size_t>(o + lower) * count, count);
      kernels::mul_acc(std::span<const double>(pi).subspan(s0, s1 - s0), diag.subspan(s0, s1 - s0),
                       std::span<double>(next).subspan(static_cast<std::size_t>(static_cast<long long>(s0) + o), s1 - s0));
    }
    const double change = kernels::sum_abs_diff(pi, next);
    pi.swap(next);
    if (change < tol) break;
  }
  if (iterations) *iterations = it + 1;
  for (double& x : pi) x = std::max(x, 0.0);
  const double total = kernels::sum(pi);
  for (double& x : pi) x /= total;
  return pi;
}

StationaryResult stationary_exact(const ModelSpec& model, long n, const TruncationPolicy& policy,
                                  std::optional<Interval> bracket) {
  if (n <= 0) throw Error(ErrorKind::InvalidArgument, "scale n must be positive");
  long gcd = 0;
  for (int j : model.jump_support()) gcd = std::gcd(gcd, static_cast<long>(std::abs(j)));
  if (gcd != 1)
    throw Error(ErrorKind::SingularSystem,
                "jump sizes share the factor " + std::to_string(gcd) + "; the lattice splits into classes");

  const EquilibriumInfo eq = find_equilibrium(model, bracket);
  const double nn = static_cast<double>(n);
  const double sd = std::sqrt(nn * eq.v_c);
  const State centre_state = policy.center.value_or(static_cast<State>(std::floor(nn * eq.c)));
  State hw = policy.half_width.value_or(static_cast<State>(std::ceil(policy.k * sd)));
  if (static_cast<double>(hw) < 3.0 * sd)
    throw Error(ErrorKind::InvalidArgument, "half width must be at least 3 standard deviations");
  hw = std::max<State>(hw, 2 * std::max(-model.min_jump(), model.max_jump()) + 2);

  for (int attempt = 0;; ++attempt) {
    const IntWindow window{centre_state - hw, centre_state + hw};
    if (window.size() > policy.max_window)
      throw Error(ErrorKind::InvalidArgument,
                  "window of " + std::to_string(window.size()) + " states exceeds max_window");
    const BandGenerator q(model, n, window);
    StationaryDiagnostics diag;
    diag.half_width = hw;
    const bool direct = policy.solver == StationarySolver::Direct ||
                        (policy.solver == StationarySolver::Auto && window.size() <= kDirectSolverLimit);
    std::vector<double> pi;
    if (direct) {
      pi = solve_direct(q);
      diag.solver_used = StationarySolver::Direct;
    } else {
      pi = solve_uniformization(q, 1e-15, 5000000, &diag.iterations);
      diag.solver_used = StationarySolver::Uniformization;
    }
    const std::size_t last = pi.size() - 1;
    diag.boundary_mass = pi[0] + pi[1] + pi[last - 1] + pi[last];
    diag.residual_norm = q.residual_norm(pi);
    if (diag.boundary_mass > policy.boundary_tol) {
      if (policy.retry_doubled && attempt == 0) {
        hw *= 2;
        continue;
      }
      throw Error(ErrorKind::WindowTooSmall,
                  "boundary mass " + std::to_string(diag.boundary_mass) + " exceeds tolerance");
    }
    return {LatticeDist(window.lo, std::move(pi)), diag, eq};
  }
}

}  // namespace popeq

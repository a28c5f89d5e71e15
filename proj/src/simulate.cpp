#include "popeq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "popeq/equilibrium.hpp"
#include "popeq/error.hpp"
#include "popeq/parallel.hpp"

namespace popeq {

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) noexcept {
  std::uint64_t z = (seed ^ replica) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

/// Per-state records over the visited range, grown on demand.
struct StateRecord {
  double occupation = 0.0;
  double holding_time = 0.0;
  long long holding_count = 0;
  bool rates_ready = false;
  double total_rate = 0.0;
  std::vector<double> cumulative;  // cumulative rates over the jump support
};

class StateTable {
 public:
  StateRecord& at(State i) {
    if (rows_.empty()) {
      lo_ = i;
      rows_.resize(1);
    } else if (i < lo_) {
      const auto extra = static_cast<std::size_t>(lo_ - i) + rows_.size() / 2;
      rows_.insert(rows_.begin(), extra, StateRecord{});
      lo_ -= static_cast<State>(extra);
    } else if (i >= lo_ + static_cast<State>(rows_.size())) {
      rows_.resize(static_cast<std::size_t>(i - lo_) + 1 + rows_.size() / 2);
    }
    return rows_[static_cast<std::size_t>(i - lo_)];
  }
  State lo() const { return lo_; }
  const std::vector<StateRecord>& rows() const { return rows_; }

 private:
  State lo_ = 0;
  std::vector<StateRecord> rows_;
};

struct ReplicaResult {
  StateTable table;
  long long jumps = 0;
  double max_excursion = 0.0;
};

ReplicaResult run_replica(const ModelSpec& model, long n, State start, double t_burn, double t_sample,
                          double reference, std::uint64_t seed) {
  const auto& support = model.jump_support();
  const double nn = static_cast<double>(n);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ReplicaResult out;
  const double end = t_burn + t_sample;
  State i = start;
  double t = 0.0;
  for (;;) {
    StateRecord& rec = out.table.at(i);
    if (!rec.rates_ready) {
      rec.cumulative.resize(support.size());
      double acc = 0.0;
      const double z = static_cast<double>(i) / nn;
      for (std::size_t k = 0; k < support.size(); ++k) {
        acc += nn * model.rate(support[k], z);
        rec.cumulative[k] = acc;
      }
      if (!std::isfinite(acc))
        throw Error(ErrorKind::RateOverflow, "total jump rate is not finite at state " + std::to_string(i));
      if (!(acc > 0.0)) throw Error(ErrorKind::StuckState, "total jump rate is zero at state " + std::to_string(i));
      rec.total_rate = acc;
      rec.rates_ready = true;
    }
    const double dt = unit_exp(rng) / rec.total_rate;
    const double t_next = t + dt;
    const double a = std::max(t, t_burn);
    const double b = std::min(t_next, end);
    if (b > a) {
      rec.occupation += b - a;
      out.max_excursion = std::max(out.max_excursion, std::abs(static_cast<double>(i) / nn - reference));
    }
    if (t >= t_burn && t_next <= end) {
      rec.holding_time += dt;
      ++rec.holding_count;
    }
    if (t_next >= end) break;

    const double u = unit(rng) * rec.total_rate;
    const auto k = static_cast<std::size_t>(
        std::upper_bound(rec.cumulative.begin(), rec.cumulative.end(), u) - rec.cumulative.begin());
    i += support[std::min(k, support.size() - 1)];
    t = t_next;
    if (t >= t_burn) ++out.jumps;
  }
  return out;
}

}  // namespace

OccupationEstimate ssa_run(const ModelSpec& model, const SimConfig& cfg) {
  if (cfg.n <= 0) throw Error(ErrorKind::InvalidArgument, "scale n must be positive");
  if (cfg.replicas < 1) throw Error(ErrorKind::InvalidArgument, "replicas must be >= 1");
  if (cfg.t_sample && !(*cfg.t_sample > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_sample must be > 0");
  if (cfg.t_burn && !(*cfg.t_burn >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t_burn must be >= 0");

  const double nn = static_cast<double>(cfg.n);
  std::optional<EquilibriumInfo> eq;
  if (!cfg.initial_state || !cfg.t_burn || !cfg.t_sample) {
    eq = find_equilibrium(model, cfg.bracket);
  } else {
    try {
      eq = find_equilibrium(model, cfg.bracket);
    } catch (const Error&) {
      // Explicit start and horizon: the run does not need c.
    }
  }
  const State start = cfg.initial_state.value_or(eq ? static_cast<State>(std::floor(nn * eq->c)) : 0);
  const double t_burn = cfg.t_burn.value_or(eq ? 5.0 / std::abs(eq->f_prime_c) : 0.0);
  const double t_sample = cfg.t_sample.value_or(eq ? 1e4 * eq->v_c : 0.0);
  const double reference = eq ? eq->c : static_cast<double>(start) / nn;

  std::vector<ReplicaResult> results(static_cast<std::size_t>(cfg.replicas));
  parallel_for(results.size(), cfg.jobs, [&](std::size_t r) {
    results[r] = run_replica(model, cfg.n, start, t_burn, t_sample, reference, replica_seed(cfg.seed, r));
  });

  // Ordered reduction over replicas.
  State lo = std::numeric_limits<State>::max();
  State hi = std::numeric_limits<State>::min();
  for (const auto& res : results) {
    const auto& rows = res.table.rows();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].occupation <= 0.0 && rows[k].holding_count == 0) continue;
      const State s = res.table.lo() + static_cast<State>(k);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> occ(width, 0.0), htime(width, 0.0);
  std::vector<long long> hcount(width, 0);
  OccupationEstimate est;
  for (const auto& res : results) {
    const auto& rows = res.table.rows();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const State s = res.table.lo() + static_cast<State>(k);
      if (s < lo || s > hi) continue;
      const auto idx = static_cast<std::size_t>(s - lo);
      occ[idx] += rows[k].occupation;
      htime[idx] += rows[k].holding_time;
      hcount[idx] += rows[k].holding_count;
    }
    est.total_jumps += res.jumps;
    est.max_excursion = std::max(est.max_excursion, res.max_excursion);
  }
  double total = 0.0;
  for (double x : occ) total += x;
  for (double& x : occ) x /= total;
  est.dist = LatticeDist(lo, std::move(occ));
  est.reference_density = reference;
  est.t_burn = t_burn;
  est.t_sample = t_sample;
  est.holding_count = std::move(hcount);
  est.holding_time = std::move(htime);
  return est;
}

}  // namespace popeq

#include "popeq/run.hpp"

#include <cmath>

#include "popeq/analysis.hpp"
#include "popeq/equilibrium.hpp"
#include "popeq/error.hpp"
#include "popeq/parallel.hpp"
#include "popeq/report.hpp"
#include "popeq/simulate.hpp"
#include "popeq/stationary.hpp"
#include "popeq/stein.hpp"

namespace popeq {

using nlohmann::json;

namespace {

class Emitter {
 public:
  explicit Emitter(const OutputSpec& spec) : spec_(spec), dir_(spec.dir) {
    std::filesystem::create_directories(dir_);
  }
  void csv(const std::string& name, const std::string& content) {
    if (spec_.csv) put(name, content);
  }
  void plot(const std::string& name, const std::string& content) {
    if (spec_.plotdata) put(name, content);
  }
  void report(const json& doc) {
    if (spec_.json) put("report.json", doc.dump(2) + "\n");
  }
  std::vector<std::filesystem::path> files;

 private:
  void put(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    write_atomic(path, content);
    files.push_back(path);
  }
  OutputSpec spec_;
  std::filesystem::path dir_;
};

TruncationPolicy policy_of(const ExperimentConfig& cfg) {
  TruncationPolicy p;
  p.k = cfg.k;
  p.max_window = cfg.max_window;
  p.solver = cfg.solver;
  return p;
}

std::string fmt(double x) { return format_double(x); }

RunResult run_equilibrium(const ExperimentConfig& cfg, const ModelSpec& model, Emitter& out, json doc) {
  const auto eq = find_equilibrium(model, cfg.bracket);
  doc["equilibrium"] = to_json(eq);
  if (const auto* p = model.bdi_params()) doc["closed_form"] = to_json(closed_form_bdi(p->a, p->b, p->d, p->offspring));
  out.report(doc);
  return {"equilibrium: c=" + fmt(eq.c) + " f_prime_c=" + fmt(eq.f_prime_c) + " v_c=" + fmt(eq.v_c), doc, {}};
}

RunResult run_assumptions(const ExperimentConfig& cfg, const ModelSpec& model, Emitter& out, json doc) {
  const Interval window = cfg.assumption_window.value_or(cfg.bracket.value_or(model.default_bracket()));
  const auto r = check_assumptions(model, window, cfg.eta_grid);
  doc["assumptions"] = to_json(r);
  out.report(doc);
  auto flag = [](bool b) { return b ? "ok" : "FAIL"; };
  std::string line = "assumptions: A1=" + std::string(flag(r.a1_ok)) + " A2a=" + flag(r.a2a_ok) +
                     " A2b=" + flag(r.a2b_ok) + " A3=" + flag(r.a3_ok) + " A4=" + flag(r.a4_ok) +
                     " A5=" + flag(r.a5_ok) + " c=" + fmt(r.c) + " gcd=" + std::to_string(r.gcd_of_support);
  return {line, doc, {}};
}

RunResult run_stationary(const ExperimentConfig& cfg, const ModelSpec& model, Emitter& out, json doc) {
  const long n = *cfg.n;
  const auto res = stationary_exact(model, n, policy_of(cfg), cfg.bracket);
  const State c_state = static_cast<State>(std::floor(static_cast<double>(n) * res.equilibrium.c));
  const double v = static_cast<double>(n) * res.equilibrium.v_c;
  const double tv = tv_distance(centre(res.dist, c_state), centred_poisson_dist(v));
  out.csv("stationary_" + std::to_string(n) + ".csv", lattice_csv(res.dist));
  doc["equilibrium"] = to_json(res.equilibrium);
  doc["stationary"] = {{"n", n},
                       {"window", {res.dist.lo(), res.dist.hi()}},
                       {"mean", res.dist.mean()},
                       {"variance", res.dist.variance()},
                       {"tv_to_centred_poisson", tv},
                       {"shift_tv", shift_tv(res.dist)},
                       {"diagnostics", to_json(res.diagnostics)}};
  out.report(doc);
  return {"stationary: n=" + std::to_string(n) + " states=" + std::to_string(res.dist.size()) +
              " tv_to_centred_poisson=" + fmt(tv) + " boundary_mass=" + fmt(res.diagnostics.boundary_mass) +
              " residual_norm=" + fmt(res.diagnostics.residual_norm),
          doc, {}};
}

RunResult run_stein_audit(const ExperimentConfig& cfg, const ModelSpec& model, Emitter& out, json doc, unsigned jobs) {
  std::vector<double> vs = cfg.stein_v;
  std::optional<StationaryResult> st;
  if (cfg.n) {
    st = stationary_exact(model, *cfg.n, policy_of(cfg), cfg.bracket);
    if (vs.empty()) vs.push_back(static_cast<double>(*cfg.n) * st->equilibrium.v_c);
  }

  std::string csv = "v,kind,lo,hi,size,sup_abs_g,sup_abs_dg,sup_abs_lg,max_residual\n";
  json per_v = json::array();
  bool all_ok = true;
  for (double v : vs) {
    const State fl = static_cast<State>(std::floor(v));
    const auto spread = static_cast<State>(std::ceil(cfg.stein_window_sds * std::sqrt(v)));
    const IntWindow solve_window{-fl, fl + spread};
    const auto sets = default_set_family(v, {std::max(-fl, -spread), spread});
    std::vector<SteinBoundReport> reports(sets.size());
    parallel_for(sets.size(), jobs, [&](std::size_t k) {
      reports[k] = stein_solve(v, sets[k], solve_window, cfg.stein_window_sds).bound_report();
    });
    SteinBoundReport worst;
    for (std::size_t k = 0; k < sets.size(); ++k) {
      const auto& r = reports[k];
      const auto& piece = sets[k].pieces().front();
      const bool bounded = sets[k].bounded();
      csv += fmt(v) + ',' + (bounded ? "singleton" : "half_line") + ',' + std::to_string(piece.lo) + ',' +
             (bounded ? std::to_string(piece.hi) : "inf") + ',' +
             (bounded ? std::to_string(sets[k].cardinality()) : "inf") + ',' + fmt(r.sup_abs_g) + ',' +
             fmt(r.sup_abs_dg) + ',' + fmt(r.sup_abs_lg) + ',' + fmt(r.max_residual) + '\n';
      worst.sup_abs_g = std::max(worst.sup_abs_g, r.sup_abs_g);
      worst.sup_abs_dg = std::max(worst.sup_abs_dg, r.sup_abs_dg);
      worst.sup_abs_lg = std::max(worst.sup_abs_lg, r.sup_abs_lg);
      worst.max_residual = std::max(worst.max_residual, r.max_residual);
    }
    const bool ok = worst.sup_abs_g <= std::min(1.0, 1.0 / std::sqrt(v)) + 1e-12 &&
                    worst.sup_abs_dg <= 1.0 / v + 1e-12 && worst.sup_abs_lg <= 3.0 + 1e-12 &&
                    worst.max_residual <= 1e-10;
    all_ok = all_ok && ok;
    per_v.push_back({{"v", v}, {"sets", sets.size()}, {"worst", to_json(worst)}, {"bounds_ok", ok}});
  }
  doc["stein"] = per_v;

  if (st) {
    const double nn = static_cast<double>(*cfg.n);
    const State c_state = static_cast<State>(std::floor(nn * st->equilibrium.c));
    const double v = nn * st->equilibrium.v_c;
    const LatticeDist w = centre(st->dist, c_state);
    const auto family = default_set_family(v, w.window());
    const double bound = stein_tv_bound(w, v, family);
    doc["stationary_check"] = {{"n", *cfg.n},
                               {"v", v},
                               {"stein_bound", bound},
                               {"tv_to_centred_poisson", tv_distance(w, centred_poisson_dist(v))},
                               {"kolmogorov", kolmogorov_distance(w, centred_poisson_dist(v))}};
  }
  out.csv("stein_audit.csv", csv);
  out.report(doc);
  return {"stein_audit: v_values=" + std::to_string(vs.size()) + " bounds_ok=" + (all_ok ? "true" : "false"), doc, {}};
}

RunResult run_simulate(const ExperimentConfig& cfg, const ModelSpec& model, Emitter& out, json doc, unsigned jobs) {
  SimConfig sc;
  sc.n = *cfg.n;
  sc.t_burn = cfg.t_burn;
  sc.t_sample = cfg.t_sample;
  sc.replicas = cfg.replicas;
  sc.seed = cfg.seed;
  sc.jobs = jobs;
  sc.bracket = cfg.bracket;
  const auto est = ssa_run(model, sc);
  doc["simulation"] = summary_json(est);
  std::string tv_text = "n/a";
  try {
    const auto exact = stationary_exact(model, *cfg.n, policy_of(cfg), cfg.bracket);
    const double tv = tv_distance(est.dist, exact.dist);
    doc["simulation"]["tv_to_exact"] = tv;
    tv_text = fmt(tv);
  } catch (const Error& e) {
    doc["simulation"]["tv_to_exact"] = nullptr;
    doc["simulation"]["exact_error"] = {{"kind", std::string(e.name())}, {"message", e.what()}};
  }
  out.csv("occupation_" + std::to_string(*cfg.n) + ".csv", lattice_csv(est.dist));
  out.report(doc);
  return {"simulate: n=" + std::to_string(*cfg.n) + " jumps=" + std::to_string(est.total_jumps) +
              " max_excursion=" + fmt(est.max_excursion) + " tv_to_exact=" + tv_text,
          doc, {}};
}

RunResult run_convergence(const ExperimentConfig& cfg, const ModelSpec& model, Emitter& out, json doc, unsigned jobs) {
  StudyOptions opt;
  opt.truncation = policy_of(cfg);
  opt.bracket = cfg.bracket;
  opt.delta = cfg.delta;
  opt.delta_prime = cfg.delta_prime;
  opt.jobs = jobs;
  const auto report = convergence_study(model, cfg.n_grid, opt);
  out.csv("convergence.csv", convergence_csv(report));
  for (const auto& name : fitted_metrics()) out.plot(name + ".plotdata", plotdata(report, name));
  doc["convergence"] = to_json(report);
  out.report(doc);
  const auto& tv = report.fitted.at("tv_to_centred_poisson");
  const auto& sh = report.fitted.at("shift_tv");
  double max_tv = 0.0;
  for (const auto& r : report.rows) max_tv = std::max(max_tv, r.tv_to_centred_poisson);
  return {"convergence: rows=" + std::to_string(report.rows.size()) + " max_tv=" + fmt(max_tv) +
              " tv_slope=" + fmt(tv.slope) + " shift_tv_slope=" + fmt(sh.slope),
          doc, {}};
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, unsigned jobs) {
  const ModelSpec model = model_from_json(cfg.model);
  Emitter out(cfg.output);
  json doc{{"study", std::string(study_name(cfg.study))}, {"config", config_to_json(cfg)}};
  RunResult result;
  switch (cfg.study) {
    case Study::Equilibrium: result = run_equilibrium(cfg, model, out, doc); break;
    case Study::Assumptions: result = run_assumptions(cfg, model, out, doc); break;
    case Study::StationaryOnce: result = run_stationary(cfg, model, out, doc); break;
    case Study::SteinAudit: result = run_stein_audit(cfg, model, out, doc, jobs); break;
    case Study::Simulate: result = run_simulate(cfg, model, out, doc, jobs); break;
    case Study::Convergence: result = run_convergence(cfg, model, out, doc, jobs); break;
  }
  result.files = out.files;
  return result;
}

}  // namespace popeq

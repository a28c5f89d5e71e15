#include "popeq/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "popeq/error.hpp"

namespace popeq {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json to_json(const EquilibriumInfo& info) {
  return {{"c", info.c},
          {"f_prime_c", info.f_prime_c},
          {"sigma2_c", info.sigma2_c},
          {"v_c", info.v_c},
          {"solver_residual", info.solver_residual}};
}

json to_json(const AssumptionReport& r) {
  json mu = json::array();
  for (const auto& [eta, value] : r.mu_eta) mu.push_back({{"eta", eta}, {"mu", value}});
  json env = json::array();
  for (const auto& [j, cj] : r.envelope) env.push_back({{"j", j}, {"c_j", number_or_null(cj)}});
  return {{"a1_ok", r.a1_ok},
          {"a2a_ok", r.a2a_ok},
          {"a2b_ok", r.a2b_ok},
          {"a3_ok", r.a3_ok},
          {"a4_ok", r.a4_ok},
          {"a5_ok", r.a5_ok},
          {"c", r.c},
          {"f_prime_c", r.f_prime_c},
          {"mu_eta", mu},
          {"gcd_of_support", r.gcd_of_support},
          {"alpha_max", r.alpha_max},
          {"lambda0", r.lambda0},
          {"delta", r.delta},
          {"envelope", env},
          {"moment_sum", number_or_null(r.moment_sum)},
          {"l1", number_or_null(r.l1)},
          {"l2", number_or_null(r.l2)},
          {"notes", r.notes}};
}

json to_json(const StationaryDiagnostics& d) {
  return {{"boundary_mass", d.boundary_mass},
          {"residual_norm", d.residual_norm},
          {"half_width", d.half_width},
          {"solver", d.solver_used == StationarySolver::Direct ? "direct" : "uniformization"},
          {"iterations", d.iterations}};
}

json to_json(const SteinBoundReport& r) {
  return {{"sup_abs_g", r.sup_abs_g},
          {"sup_abs_dg", r.sup_abs_dg},
          {"sup_abs_lg", r.sup_abs_lg},
          {"max_residual", r.max_residual}};
}

json to_json(const LogLogFit& fit) {
  return {{"slope", number_or_null(fit.slope)},
          {"intercept", number_or_null(fit.intercept)},
          {"r2", number_or_null(fit.r2)},
          {"points", fit.points}};
}

json to_json(const ConvergenceReport& report) {
  json fits = json::object();
  for (const auto& [name, fit] : report.fitted) fits[name] = to_json(fit);
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"n", r.n},
                    {"c", r.c},
                    {"v_c", r.v_c},
                    {"centre", r.centre},
                    {"tv_to_centred_poisson", r.tv_to_centred_poisson},
                    {"kolmogorov", r.kolmogorov},
                    {"shift_tv", r.shift_tv},
                    {"mean_abs_dev", r.mean_abs_dev},
                    {"second_moment_in", r.second_moment_in},
                    {"tail_mass", r.tail_mass},
                    {"first_moment_out", r.first_moment_out},
                    {"second_diff_stein", r.second_diff_stein},
                    {"boundary_mass", r.boundary_mass},
                    {"residual_norm", r.residual_norm},
                    {"window_states", r.window_states}});
  return {{"delta", report.delta}, {"delta_prime", report.delta_prime}, {"rows", rows}, {"fitted", fits}};
}

json summary_json(const OccupationEstimate& est) {
  return {{"total_jumps", est.total_jumps},
          {"max_excursion", est.max_excursion},
          {"reference_density", est.reference_density},
          {"t_burn", est.t_burn},
          {"t_sample", est.t_sample},
          {"support", {est.dist.lo(), est.dist.hi()}},
          {"mean", est.dist.mean()},
          {"variance", est.dist.variance()}};
}

std::string lattice_csv(const LatticeDist& dist) {
  std::string out = "state,probability\n";
  const auto w = dist.weights();
  for (std::size_t k = 0; k < w.size(); ++k) {
    out += std::to_string(dist.lo() + static_cast<State>(k));
    out += ',';
    out += format_double(w[k]);
    out += '\n';
  }
  return out;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out = kConvergenceCsvHeader;
  out += '\n';
  for (const auto& r : report.rows) {
    const double cols[] = {r.c, r.v_c};
    out += std::to_string(r.n);
    for (double x : cols) out += ',' + format_double(x);
    out += ',' + std::to_string(r.centre);
    for (double x : {r.tv_to_centred_poisson, r.kolmogorov, r.shift_tv, r.mean_abs_dev, r.second_moment_in,
                     r.tail_mass, r.first_moment_out, r.second_diff_stein, r.boundary_mass, r.residual_norm})
      out += ',' + format_double(x);
    out += ',' + std::to_string(r.window_states);
    out += '\n';
  }
  return out;
}

std::string plotdata(const ConvergenceReport& report, const std::string& metric) {
  std::string out = "# ln_n ln_" + metric + "\n";
  for (const auto& r : report.rows) {
    const double y = ConvergenceReport::metric(r, metric);
    if (!(y > 0.0)) continue;
    out += format_double(std::log(static_cast<double>(r.n))) + ' ' + format_double(std::log(y)) + '\n';
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace popeq

#include "carpetlab_cli/tasks.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "carpetlab/adversary.hpp"
#include "carpetlab/certification.hpp"
#include "carpetlab/diagnostics.hpp"
#include "carpetlab/errors.hpp"
#include "carpetlab/moran.hpp"
#include "carpetlab/schedule.hpp"
#include "carpetlab_cli/render.hpp"

namespace carpetlab::cli {
namespace {

const SystemSpec& need_system(const ExperimentConfig& cfg) {
  if (!cfg.system) throw ConfigError("task '" + cfg.task + "' needs a system");
  return *cfg.system;
}

std::string dec(const Scalar& x) { return to_decimal_string(x, 12); }

Json box_json(const Box& b) {
  Json axes = Json::array();
  for (const auto& iv : b.axes()) {
    axes.push_back({to_fraction_string(iv.lo), to_fraction_string(iv.hi)});
  }
  return axes;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// Isotropy over all cell shapes when the grid is small, else cubes of
// side 1/8 (or the given sides).
IsotropyProfile measured_isotropy(const GridMeasure& mu, const Json& params,
                                  std::uint64_t seed) {
  if (params.contains("isotropy_sides")) {
    const Json& s = params["isotropy_sides"];
    if (!s.is_array()) throw ConfigError("params.isotropy_sides must be a list");
    std::vector<Scalar> sides;
    for (std::size_t i = 0; i < s.size(); ++i) {
      sides.push_back(scalar_from_json(s[i], "params.isotropy_sides"));
    }
    const int samples = param_int(params, "isotropy_samples", 100000);
    if (samples <= 0) throw ConfigError("params.isotropy_samples must be positive");
    return isotropy_constant(mu, sides, static_cast<std::size_t>(samples), seed);
  }
  const std::size_t n = mu.uniform_cells();
  if (n != 0 && n <= 32) return isotropy_constant_all(mu);
  return isotropy_constant(mu, std::vector<Scalar>(static_cast<std::size_t>(mu.dim()),
                                                   Scalar(1, 8)),
                           100000, seed);
}

Json isotropy_json(const IsotropyProfile& p) {
  Json j{{"A", scalar_json(p.A)},
         {"exhaustive", p.exhaustive},
         {"pairs", p.pairs},
         {"shapes", p.shapes.size()},
         {"orientation", "axis-aligned pairs only"}};
  if (p.worst) j["worst_pair"] = {box_json(p.worst->first), box_json(p.worst->second)};
  return j;
}

TaskOutput diagnose(const ExperimentConfig& cfg) {
  const Json& params = cfg.params;
  check_params(params, {"octaves", "isotropy_sides", "isotropy_samples", "slab_alpha",
                        "slab_beta", "homogeneity_s", "homogeneity_scales",
                        "chain_sweep"});
  const GridMeasure mu = realize_measure(cfg);
  TaskOutput out;
  const DoublingProfile prof = empirical_exponents(mu, param_int(params, "octaves", 0));
  Json scales = Json::array();
  for (std::size_t i = 0; i < prof.scales.size(); ++i) {
    scales.push_back({{"r", to_fraction_string(prof.scales[i])},
                      {"C", scalar_json(prof.constants[i])}});
  }
  out.results["measure"] = {{"dimension", mu.dim()},
                            {"cells", mu.partition().cell_count()},
                            {"uniform_cells", mu.uniform_cells()}};
  out.results["doubling"] = {{"C", scalar_json(prof.C)},
                             {"scales", scales},
                             {"alpha", prof.alpha},
                             {"beta", prof.beta},
                             {"c_upper", prof.c_upper},
                             {"c_lower", prof.c_lower},
                             {"beta_cert", prof.beta_cert},
                             {"converged", prof.converged},
                             {"certified_direction", prof.certified_direction},
                             {"pairs", prof.pairs}};
  out.series.header = {"gap", "min_ratio", "min_ratio_decimal", "max_ratio",
                       "max_ratio_decimal"};
  for (const auto& o : prof.octaves) {
    out.series.rows.push_back({std::to_string(o.gap), to_fraction_string(o.min_ratio),
                               dec(o.min_ratio), to_fraction_string(o.max_ratio),
                               dec(o.max_ratio)});
  }

  const IsotropyProfile iso = measured_isotropy(mu, params, cfg.seed);
  out.results["isotropy"] = isotropy_json(iso);

  if (mu.dim() >= 2) {
    Json proj = Json::array();
    for (int k = 0; k < mu.dim(); ++k) {
      const auto [lo, hi] = face_projection_ratio(mu, k);
      proj.push_back({{"axis", k}, {"min", scalar_json(lo)}, {"max", scalar_json(hi)}});
    }
    out.results["projection"] = proj;
  }
  if (params.contains("slab_alpha") || params.contains("slab_beta")) {
    const SlabStats st = slab_ratio_stats(mu, param_double(params, "slab_alpha", 1.0),
                                          param_double(params, "slab_beta", 1.0));
    Json s{{"upper", st.upper}, {"lower", st.lower}, {"pairs", st.pairs}};
    if (st.upper_exact) s["upper_exact"] = scalar_json(*st.upper_exact);
    if (st.lower_exact) s["lower_exact"] = scalar_json(*st.lower_exact);
    out.results["slab"] = s;
  }
  if (auto s = param_scalar_opt(params, "homogeneity_s")) {
    std::vector<Scalar> sc{Scalar(1, 4), Scalar(1, 8)};
    if (params.contains("homogeneity_scales")) {
      sc.clear();
      for (const auto& v : params["homogeneity_scales"]) {
        sc.push_back(scalar_from_json(v, "params.homogeneity_scales"));
      }
    }
    const HomogeneityProfile h = homogeneity_constant(mu, *s, sc);
    Json hj{{"s", to_fraction_string(h.s)}, {"C", h.C}};
    if (h.C_exact) hj["C_exact"] = scalar_json(*h.C_exact);
    out.results["homogeneity"] = hj;
  }
  if (param_bool(params, "chain_sweep", false)) {
    const ChainSweep sw = chain_bound_sweep(mu, iso.A);
    Json cj{{"A", scalar_json(iso.A)},
            {"pairs", sw.pairs},
            {"failures", sw.failures},
            {"translate_failures", sw.translate_failures},
            {"lattice_failures", sw.lattice_failures},
            {"worst_exponent", sw.worst_exponent}};
    if (sw.worst) cj["worst_pair"] = {box_json(sw.worst->first), box_json(sw.worst->second)};
    out.results["chain_bound"] = cj;
  }
  return out;
}

TaskOutput certify(const ExperimentConfig& cfg) {
  const Json& params = cfg.params;
  check_params(params, {"K", "n1", "ball_doubling", "isotropy", "require_explicit",
                        "measure_id"});
  const SystemSpec& spec = need_system(cfg);
  const GridMeasure mu = realize_measure(cfg, spec.dim());
  const int K = param_int(params, "K", 2);
  const int n1 = param_int(params, "n1", 1);
  if (K < 1 || n1 < 1) throw ConfigError("params.K and params.n1 must be >= 1");
  CertificateOptions opt;
  opt.schedule.budget = cfg.budget;
  opt.schedule.require_explicit = param_bool(params, "require_explicit", false);
  opt.budget = cfg.budget;
  opt.measure_id = param_string(params, "measure_id",
                                cfg.measure_desc.dump() + " seed=" + std::to_string(cfg.seed));
  if (param_bool(params, "ball_doubling", true)) opt.D_ball = ball_doubling_constant(mu);
  if (param_bool(params, "isotropy", false)) {
    opt.isotropy_A = measured_isotropy(mu, Json::object(), cfg.seed).A;
  }
  const ThinnessCertificate cert = thinness_certificate(spec, mu, K, n1, opt);
  TaskOutput out;
  out.results["certificate"] = Json::parse(certificate_to_json(cert));
  out.results["disjointness"] = {{"verified", cert.disjointness.verified},
                                 {"structural", cert.disjointness.structural},
                                 {"explicit_ok", cert.disjointness.explicit_ok},
                                 {"holes_checked", cert.disjointness.holes_checked},
                                 {"pairs_checked", cert.disjointness.pairs_checked}};
  out.series.header = {"level", "mass_E", "mass_E_decimal", "mass_G", "c", "c_decimal", "c2"};
  for (const auto& ep : cert.epochs) {
    out.series.rows.push_back({std::to_string(ep.level), to_fraction_string(ep.mass_E),
                               dec(ep.mass_E), to_fraction_string(ep.mass_G),
                               to_fraction_string(ep.c), dec(ep.c), to_fraction_string(ep.c2)});
  }
  return out;
}

AdversarySolution solve_with(const RatioProgram& prog, const Json& params) {
  const std::string solver = param_string(params, "solver", "auto");
  const int iters = param_int(params, "max_iters", 10000);
  const double tol = param_double(params, "tolerance", 1e-9);
  if (iters <= 0 || tol <= 0) throw ConfigError("max_iters and tolerance must be positive");
  if (solver == "exact") return solve_exact(prog);
  if (solver == "iterative") {
    return solve_iterative(prog, static_cast<std::size_t>(iters), tol);
  }
  if (solver != "auto") throw ConfigError("params.solver must be auto, exact or iterative");
  if (prog.cells <= kExactCellBudget) return solve_exact(prog);
  return solve_iterative(prog, static_cast<std::size_t>(iters), tol);
}

TaskOutput adversary(const ExperimentConfig& cfg) {
  const Json& params = cfg.params;
  check_params(params, {"level", "tau", "solver", "max_iters", "tolerance", "export_lp",
                        "solution"});
  const SystemSpec& spec = need_system(cfg);
  const int level = param_int(params, "level", 1);
  if (level < 0) throw ConfigError("params.level must be >= 0");
  const Scalar tau = param_scalar(params, "tau", Scalar(2));
  if (tau < 1) throw ConfigError("params.tau must be >= 1");
  const LevelSet ls = level_set(spec, level, cfg.budget);
  const RatioProgram prog = build_program(ls, tau, cfg.budget);
  TaskOutput out;
  out.results["program"] = {{"level", level},
                            {"tau", to_fraction_string(tau)},
                            {"cells", prog.cells},
                            {"targets", prog.target_count()},
                            {"constraints", prog.constraints.size()}};
  if (param_bool(params, "export_lp", false)) out.files["program.lp"] = export_lp(prog);

  if (params.contains("solution")) {
    const auto path = cfg.base_dir / param_string(params, "solution", "");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read solution " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::vector<Scalar> w;
    try {
      w = import_solution(prog, ss.str());
    } catch (const InvalidParameter& e) {
      throw ConfigError(std::string("bad solution file: ") + e.what());
    }
    const SolutionCheck chk = verify_solution(prog, w, param_double(params, "tolerance", 0.0));
    out.results["verification"] = {{"feasible", chk.feasible},
                                   {"value", scalar_json(chk.value)},
                                   {"total", scalar_json(chk.total)},
                                   {"residual", chk.residual}};
    out.series.header = {"cell", "target", "weight", "weight_decimal"};
    for (std::size_t i = 0; i < prog.cells; ++i) {
      out.series.rows.push_back({std::to_string(i), prog.target[i] ? "1" : "0",
                                 to_fraction_string(w[i]), dec(w[i])});
    }
    return out;
  }

  const AdversarySolution sol = solve_with(prog, params);
  long top = 0;
  for (long k : sol.potentials) top = std::max(top, k);
  const GridMeasure opt(ls.partition(), sol.weights);
  out.results["solution"] = {{"value", scalar_json(sol.value)},
                             {"solver", to_string(sol.kind)},
                             {"iterations", sol.iterations},
                             {"converged", sol.converged},
                             {"residual", sol.residual},
                             {"gap_estimate", sol.gap_estimate},
                             {"max_potential", top},
                             {"induced_doubling", scalar_json(ball_doubling_constant(opt, 1))}};
  out.series.header = {"cell", "target", "potential", "weight", "weight_decimal"};
  for (std::size_t i = 0; i < prog.cells; ++i) {
    out.series.rows.push_back({std::to_string(i), prog.target[i] ? "1" : "0",
                               std::to_string(sol.potentials[i]),
                               to_fraction_string(sol.weights[i]), dec(sol.weights[i])});
  }
  return out;
}

TaskOutput decay(const ExperimentConfig& cfg) {
  const Json& params = cfg.params;
  check_params(params, {"tau", "levels", "solver", "max_iters", "tolerance"});
  const SystemSpec& spec = need_system(cfg);
  const auto levels = param_int_list(params, "levels");
  if (!levels || levels->empty()) throw ConfigError("params.levels must be a nonempty list");
  for (std::size_t i = 0; i < levels->size(); ++i) {
    if ((*levels)[i] < 1 || (i && (*levels)[i] <= (*levels)[i - 1])) {
      throw ConfigError("params.levels must be increasing positive integers");
    }
  }
  const Scalar tau = param_scalar(params, "tau", Scalar(2));
  if (tau < 1) throw ConfigError("params.tau must be >= 1");
  DecayOptions opt;
  opt.budget = cfg.budget;
  opt.max_iters = static_cast<std::size_t>(std::max(1, param_int(params, "max_iters", 10000)));
  opt.tolerance = param_double(params, "tolerance", 1e-9);
  const std::string solver = param_string(params, "solver", "auto");
  if (solver == "iterative") {
    opt.force_iterative = true;
  } else if (solver != "auto") {
    throw ConfigError("params.solver must be auto or iterative");
  }
  const DecayCurve curve = decay_curve(spec, tau, *levels, opt);
  Json pts = Json::array();
  TaskOutput out;
  out.series.header = {"level", "cells", "solver", "value", "value_decimal",
                       "non_increasing", "coarsening_feasible"};
  for (const auto& p : curve.points) {
    pts.push_back({{"level", p.level},
                   {"cells", p.cells},
                   {"solver", to_string(p.kind)},
                   {"value", scalar_json(p.value)},
                   {"converged", p.converged},
                   {"non_increasing", p.non_increasing},
                   {"coarsening_feasible", p.coarsening_feasible},
                   {"induced_doubling", scalar_json(p.induced_doubling)}});
    out.series.rows.push_back({std::to_string(p.level), std::to_string(p.cells),
                               to_string(p.kind), to_fraction_string(p.value), dec(p.value),
                               p.non_increasing ? "1" : "0",
                               p.coarsening_feasible ? "1" : "0"});
  }
  out.results["tau"] = to_fraction_string(tau);
  out.results["points"] = pts;
  out.results["rate"] = curve.rate;
  out.results["strictly_decreasing"] = curve.strictly_decreasing;
  return out;
}

TaskOutput graph(const ExperimentConfig& cfg) {
  const Json& params = cfg.params;
  check_params(params, {"function", "levels"});
  const GridMeasure mu = realize_measure(cfg, 2);
  PiecewiseLinear f;
  if (params.contains("function")) {
    const Json& pts = params["function"];
    if (!pts.is_array()) throw ConfigError("params.function must be a list of [x, y] pairs");
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != 2) {
        throw ConfigError("params.function must be a list of [x, y] pairs");
      }
      f.points.emplace_back(scalar_from_json(p[0], "params.function"),
                            scalar_from_json(p[1], "params.function"));
    }
  } else {
    f.points = {{Scalar(0), Scalar(0)}, {Scalar(1), Scalar(1)}};
  }
  try {
    f.check();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("params.function: ") + e.what());
  }
  std::vector<int> levels{2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (auto l = param_int_list(params, "levels")) levels = *l;
  if (levels.empty()) throw ConfigError("params.levels must be nonempty");
  TaskOutput out;
  out.series.header = {"n", "mass", "mass_decimal"};
  Json rows = Json::array();
  std::vector<double> xs, ys;
  bool monotone = true;
  Scalar prev;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const Scalar m = graph_cover_mass(mu, f, levels[i], std::min<std::uint64_t>(cfg.budget, kGraphBudget));
    if (i && m > prev) monotone = false;
    prev = m;
    rows.push_back({{"n", levels[i]}, {"mass", scalar_json(m)}});
    out.series.rows.push_back({std::to_string(levels[i]), to_fraction_string(m), dec(m)});
    if (sgn(m) > 0) {
      xs.push_back(levels[i]);
      ys.push_back(log2(m) * std::log(2.0));
    }
  }
  out.results["levels"] = rows;
  out.results["non_increasing"] = monotone;
  out.results["log_slope"] = fit_slope(xs, ys);
  return out;
}

TaskOutput render(const ExperimentConfig& cfg) {
  const Json& params = cfg.params;
  check_params(params, {"level", "holes", "hole_level"});
  const SystemSpec& spec = need_system(cfg);
  const int level = param_int(params, "level", 2);
  if (level < 0) throw ConfigError("params.level must be >= 0");
  const LevelSet ls = level_set(spec, level, std::min<std::uint64_t>(cfg.budget, kMaxRenderBoxes));
  std::vector<Box> holes;
  if (param_bool(params, "holes", false)) {
    if (spec.kind() == SystemKind::kInterval) throw ConfigError("interval systems have no holes");
    const int hl = param_int(params, "hole_level", 1);
    if (hl < 1) throw ConfigError("params.hole_level must be >= 1");
    const HoleTemplate hole = find_hole(spec);
    const LevelSet base = level_set(spec, hl, kMaxRenderBoxes);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      total += harvest_size(spec, base.word(i));
      if (total > kMaxRenderBoxes) {
        throw EnumerationBudget("figure holes", total, kMaxRenderBoxes);
      }
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
      auto h = hole_harvest(spec, base.word(i), hole);
      holes.insert(holes.end(), h.begin(), h.end());
    }
  }
  TaskOutput out;
  out.files["figure.svg"] = render_levelset(ls, holes);
  out.results["level"] = level;
  out.results["boxes"] = ls.size();
  out.results["holes"] = holes.size();
  out.results["figure"] = "figure.svg";
  const int d = spec.dim();
  out.series.header = {"kind"};
  for (int k = 0; k < d; ++k) {
    out.series.header.push_back("lo" + std::to_string(k));
    out.series.header.push_back("hi" + std::to_string(k));
  }
  auto row = [&](const char* kind, const Box& b) {
    std::vector<std::string> r{kind};
    for (int k = 0; k < d; ++k) {
      r.push_back(to_fraction_string(b[k].lo));
      r.push_back(to_fraction_string(b[k].hi));
    }
    out.series.rows.push_back(std::move(r));
  };
  for (const auto& b : ls.boxes()) row("box", b);
  for (const auto& h : holes) row("hole", h);
  return out;
}

}  // namespace

TaskOutput run_task(const ExperimentConfig& cfg) {
  if (cfg.task == "diagnose") return diagnose(cfg);
  if (cfg.task == "certify") return certify(cfg);
  if (cfg.task == "adversary") return adversary(cfg);
  if (cfg.task == "decay") return decay(cfg);
  if (cfg.task == "graph") return graph(cfg);
  if (cfg.task == "render") return render(cfg);
  throw ConfigError("unknown task '" + cfg.task + "'");
}

Json run_and_write(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const TaskOutput out = run_task(cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json report = make_report(cfg, out, secs);
  write_outputs(out_dir, report, out);
  return report;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const EnumerationBudget*>(&e)) return kExitBudget;
  if (dynamic_cast<const DisjointnessViolation*>(&e)) return kExitInternal;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SpecError*>(&e) ||
      dynamic_cast<const InvalidParameter*>(&e) || dynamic_cast<const InvalidWord*>(&e) ||
      dynamic_cast<const InvalidFactor*>(&e) ||
      dynamic_cast<const InvalidFactorDimension*>(&e) ||
      dynamic_cast<const DimensionMismatch*>(&e) || dynamic_cast<const NotCongruent*>(&e) ||
      dynamic_cast<const DegenerateMass*>(&e)) {
    return kExitConfig;
  }
  return kExitInternal;
}

}  // namespace carpetlab::cli

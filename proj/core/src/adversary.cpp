// Copyright 2026 The carpetlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "carpetlab/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "carpetlab/certification.hpp"
#include "carpetlab/errors.hpp"
#include "carpetlab/measure.hpp"

namespace carpetlab {
namespace {

// Dinic max-flow where edges may carry unbounded capacity.
template <typename Cap>
class Dinic {
 public:
  Dinic(std::size_t n, Cap eps) : g_(n), level_(n), it_(n), eps_(std::move(eps)) {}

  void add_edge(std::size_t u, std::size_t v, const Cap& cap, bool inf = false) {
    g_[u].push_back(edges_.size());
    edges_.push_back({v, cap, inf});
    g_[v].push_back(edges_.size());
    edges_.push_back({u, Cap(0), false});
  }

  Cap max_flow(std::size_t s, std::size_t t) {
    Cap flow(0);
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (true) {
        Cap f = dfs(s, t, nullptr);
        if (!(f > eps_)) break;
        flow += f;
      }
    }
    return flow;
  }

  // Vertices reachable from s in the residual graph.
  std::vector<bool> reachable(std::size_t s) const {
    std::vector<bool> seen(g_.size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t id : g_[u]) {
        const Edge& e = edges_[id];
        if (!seen[e.to] && open(e)) {
          seen[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    std::size_t to;
    Cap cap;
    bool inf;
  };

  bool open(const Edge& e) const { return e.inf || e.cap > eps_; }

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::size_t> queue{s};
    level_[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::size_t u = queue[h];
      for (std::size_t id : g_[u]) {
        const Edge& e = edges_[id];
        if (level_[e.to] < 0 && open(e)) {
          level_[e.to] = level_[u] + 1;
          queue.push_back(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  Cap dfs(std::size_t u, std::size_t t, const Cap* limit) {
    if (u == t) return *limit;
    for (std::size_t& i = it_[u]; i < g_[u].size(); ++i) {
      const std::size_t id = g_[u][i];
      Edge& e = edges_[id];
      if (level_[e.to] != level_[u] + 1 || !open(e)) continue;
      Cap local;
      const Cap* next = limit;
      if (!e.inf) {
        local = limit && *limit < e.cap ? *limit : e.cap;
        next = &local;
      }
      Cap f = dfs(e.to, t, next);
      if (f > eps_) {
        if (!e.inf) e.cap -= f;
        edges_[id ^ 1].cap += f;
        return f;
      }
    }
    return Cap(0);
  }

  std::vector<std::vector<std::size_t>> g_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
  Cap eps_;
};

void check_program(const RatioProgram& p) {
  if (p.tau < 1) throw InvalidParameter("tau must be >= 1");
  if (p.cells == 0 || p.target.size() != p.cells) {
    throw InvalidParameter("malformed ratio program");
  }
}

// Largest admissible upward shift of the set S.
long shift_amount(const RatioProgram& p, const std::vector<long>& k,
                  const std::vector<bool>& in_s) {
  long delta = std::numeric_limits<long>::max();
  for (const auto& [i, j] : p.constraints) {
    if (in_s[i] && !in_s[j]) delta = std::min(delta, k[j] - k[i] + 1);
  }
  if (delta == std::numeric_limits<long>::max() || delta <= 0) {
    throw Error("potential update found no admissible shift");
  }
  return delta;
}

void normalize_potentials(std::vector<long>& k) {
  const long m = *std::min_element(k.begin(), k.end());
  for (auto& v : k) v -= m;
}

// Exact value and weights for weights tau^k.
void fill_exact(const RatioProgram& p, AdversarySolution& sol) {
  const long K = *std::max_element(sol.potentials.begin(), sol.potentials.end());
  std::vector<Scalar> tp{Scalar(1)};
  for (long i = 1; i <= K; ++i) tp.push_back(tp.back() * p.tau);
  std::vector<BigInt> cnt(static_cast<std::size_t>(K) + 1), cnt_t(cnt.size());
  for (std::size_t i = 0; i < p.cells; ++i) {
    const auto k = static_cast<std::size_t>(sol.potentials[i]);
    cnt[k] += 1;
    if (p.target[i]) cnt_t[k] += 1;
  }
  Scalar A(0), B(0);
  for (std::size_t k = 0; k < cnt.size(); ++k) {
    A += tp[k] * cnt_t[k];
    B += tp[k] * cnt[k];
  }
  sol.value = A / B;
  sol.value_approx = to_double(sol.value);
  sol.weights.resize(p.cells);
  for (std::size_t i = 0; i < p.cells; ++i) {
    sol.weights[i] = tp[static_cast<std::size_t>(sol.potentials[i])] / B;
  }
}

double ratio_residual(const RatioProgram& p, const std::vector<long>& k) {
  // Integer potentials obey the constraints exactly unless |k_i - k_j| > 1.
  double worst = 0;
  for (const auto& [i, j] : p.constraints) {
    if (k[i] > k[j] + 1) {
      worst = std::max(worst, std::pow(to_double(p.tau), static_cast<double>(k[i] - k[j] - 1)) - 1);
    }
  }
  return worst;
}

}  // namespace

std::size_t RatioProgram::target_count() const {
  return static_cast<std::size_t>(std::count(target.begin(), target.end(), true));
}

std::size_t RatioProgram::flat(const std::array<std::size_t, kMaxDim>& idx) const {
  std::size_t f = 0;
  for (int k = dim - 1; k >= 0; --k) f = f * shape[k] + idx[k];
  return f;
}

RatioProgram grid_program(const std::vector<std::size_t>& shape,
                          const std::vector<std::size_t>& target,
                          const Scalar& tau) {
  if (shape.empty() || shape.size() > kMaxDim) {
    throw InvalidParameter("grid must have 1 to 3 axes");
  }
  if (tau < 1) throw InvalidParameter("tau must be >= 1");
  RatioProgram p;
  p.dim = static_cast<int>(shape.size());
  p.cells = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (shape[k] == 0) throw InvalidParameter("empty grid axis");
    p.shape[k] = shape[k];
    p.cells *= shape[k];
  }
  p.tau = tau;
  p.target.assign(p.cells, false);
  for (auto t : target) {
    if (t >= p.cells) throw InvalidParameter("target cell out of range");
    p.target[t] = true;
  }
  std::size_t stride = 1;
  for (int k = 0; k < p.dim; ++k) {
    for (std::size_t f = 0; f < p.cells; ++f) {
      const std::size_t coord = (f / stride) % p.shape[k];
      if (coord + 1 < p.shape[k]) {
        p.constraints.emplace_back(f, f + stride);
        p.constraints.emplace_back(f + stride, f);
      }
    }
    stride *= p.shape[k];
  }
  return p;
}

RatioProgram build_program(const LevelSet& ls, const Scalar& tau,
                           std::uint64_t budget) {
  const int d = ls.spec().dim();
  std::uint64_t cells = 1;
  std::vector<std::size_t> shape;
  for (int k = 0; k < d; ++k) {
    const std::uint64_t g = ls.grid_cells(k);
    if (g == 0 || cells > budget / g) {
      throw EnumerationBudget("ratio program grid", budget + 1, budget);
    }
    cells *= g;
    shape.push_back(static_cast<std::size_t>(g));
  }
  std::vector<std::size_t> target;
  target.reserve(ls.size());
  RatioProgram probe;
  probe.dim = d;
  for (int k = 0; k < d; ++k) probe.shape[k] = shape[k];
  for (const auto& c : ls.cells()) {
    std::array<std::size_t, kMaxDim> idx{};
    for (int k = 0; k < d; ++k) idx[k] = static_cast<std::size_t>(c.index[k]);
    target.push_back(probe.flat(idx));
  }
  RatioProgram p = grid_program(shape, target, tau);
  p.level = ls.level();
  return p;
}

std::string to_string(SolverKind k) {
  return k == SolverKind::kExact ? "exact" : "iterative";
}

AdversarySolution solve_exact(const RatioProgram& p, std::size_t cell_budget) {
  check_program(p);
  if (p.cells > cell_budget) {
    throw EnumerationBudget("exact solver", p.cells, cell_budget);
  }
  AdversarySolution sol;
  sol.kind = SolverKind::kExact;
  sol.potentials.assign(p.cells, 0);
  if (p.tau == 1) {
    sol.iterations = 1;
    fill_exact(p, sol);
    return sol;
  }
  const BigInt P = p.tau.get_num(), Q = p.tau.get_den();
  auto& k = sol.potentials;
  const std::size_t N = p.cells, s = N, t = N + 1;
  std::vector<BigInt> ppow{BigInt(1)}, qpow{BigInt(1)};
  while (true) {
    ++sol.iterations;
    const long K = *std::max_element(k.begin(), k.end());
    while (static_cast<long>(ppow.size()) <= K) {
      ppow.push_back(ppow.back() * P);
      qpow.push_back(qpow.back() * Q);
    }
    std::vector<BigInt> w(N);
    BigInt A(0), B(0);
    for (std::size_t i = 0; i < N; ++i) {
      const auto ki = static_cast<std::size_t>(k[i]);
      w[i] = ppow[ki] * qpow[static_cast<std::size_t>(K) - ki];
      B += w[i];
      if (p.target[i]) A += w[i];
    }
    Dinic<BigInt> flow(N + 2, BigInt(0));
    BigInt supply(0);
    for (std::size_t i = 0; i < N; ++i) {
      BigInt b = ((p.target[i] ? B : BigInt(0)) - A) * w[i];
      if (sgn(b) > 0) {
        supply += b;
        flow.add_edge(s, i, b);
      } else if (sgn(b) < 0) {
        flow.add_edge(i, t, BigInt(-b));
      }
    }
    for (const auto& [i, j] : p.constraints) {
      if (k[i] == k[j] + 1) flow.add_edge(i, j, BigInt(0), true);
    }
    if (flow.max_flow(s, t) == supply) break;
    const auto seen = flow.reachable(s);
    std::vector<bool> in_s(seen.begin(), seen.begin() + static_cast<long>(N));
    const long delta = shift_amount(p, k, in_s);
    for (std::size_t i = 0; i < N; ++i) {
      if (in_s[i]) k[i] += delta;
    }
    normalize_potentials(k);
  }
  fill_exact(p, sol);
  return sol;
}

AdversarySolution solve_iterative(const RatioProgram& p, std::size_t max_iters,
                                  double tolerance) {
  check_program(p);
  if (tolerance <= 0) throw InvalidParameter("tolerance must be positive");
  AdversarySolution sol;
  sol.kind = SolverKind::kIterative;
  const std::size_t N = p.cells;
  if (p.tau == 1) {
    sol.potentials.assign(N, 0);
    sol.iterations = 1;
    fill_exact(p, sol);
    return sol;
  }
  const double lt = std::log(to_double(p.tau));

  // Multiplicative ascent on log-weights (units of log tau) with cyclic
  // projection back onto |x_i - x_j| <= 1.
  std::vector<double> x(N, 0.0);
  auto project = [&] {
    for (int sweep = 0; sweep < 200; ++sweep) {
      double worst = 0;
      for (const auto& [i, j] : p.constraints) {
        const double e = x[i] - x[j] - 1.0;
        if (e > 0) {
          x[i] -= e / 2;
          x[j] += e / 2;
          worst = std::max(worst, e);
        }
      }
      if (worst <= tolerance) break;
    }
  };
  const std::size_t warm = std::min<std::size_t>(max_iters / 2, 200);
  double step = 0.5;
  for (std::size_t it = 0; it < warm; ++it, ++sol.iterations) {
    const double top = *std::max_element(x.begin(), x.end());
    double A = 0, B = 0;
    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) {
      w[i] = std::exp((x[i] - top) * lt);
      B += w[i];
      if (p.target[i]) A += w[i];
    }
    const double f = A / B;
    double gmax = 0;
    std::vector<double> g(N);
    for (std::size_t i = 0; i < N; ++i) {
      g[i] = w[i] * ((p.target[i] ? 1.0 : 0.0) - f);
      gmax = std::max(gmax, std::abs(g[i]));
    }
    if (gmax == 0) break;
    for (std::size_t i = 0; i < N; ++i) x[i] += step * g[i] / gmax;
    project();
    step *= 0.99;
  }

  // Integer potentials, repaired to satisfy |k_i - k_j| <= 1.
  const double lo = *std::min_element(x.begin(), x.end());
  auto& k = sol.potentials;
  k.resize(N);
  for (std::size_t i = 0; i < N; ++i) k[i] = std::lround(x[i] - lo);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [i, j] : p.constraints) {
      if (k[i] > k[j] + 1) {
        k[j] = k[i] - 1;
        changed = true;
      }
    }
  }
  normalize_potentials(k);

  // Cut refinement in floating point.
  const std::size_t s = N, t = N + 1;
  bool done = false;
  double prev = -1;
  while (sol.iterations < max_iters) {
    ++sol.iterations;
    const long K = *std::max_element(k.begin(), k.end());
    std::vector<double> w(N);
    double A = 0, B = 0;
    for (std::size_t i = 0; i < N; ++i) {
      w[i] = std::exp(static_cast<double>(k[i] - K) * lt);
      B += w[i];
      if (p.target[i]) A += w[i];
    }
    const double f = A / B;
    if (f <= prev * (1 + 1e-15)) {
      done = true;  // no measurable progress left
      break;
    }
    prev = f;
    std::vector<double> b(N);
    double supply = 0;
    for (std::size_t i = 0; i < N; ++i) {
      b[i] = ((p.target[i] ? 1.0 : 0.0) - f) * w[i];
      if (b[i] > 0) supply += b[i];
    }
    if (supply <= 0) {
      done = true;
      break;
    }
    Dinic<double> flow(N + 2, supply * 1e-13);
    for (std::size_t i = 0; i < N; ++i) {
      if (b[i] > 0) flow.add_edge(s, i, b[i]);
      if (b[i] < 0) flow.add_edge(i, t, -b[i]);
    }
    for (const auto& [i, j] : p.constraints) {
      if (k[i] == k[j] + 1) flow.add_edge(i, j, 0.0, true);
    }
    const double fv = flow.max_flow(s, t);
    sol.gap_estimate = std::max(0.0, (supply - fv) / supply);
    if (sol.gap_estimate <= tolerance) {
      done = true;
      break;
    }
    const auto seen = flow.reachable(s);
    std::vector<bool> in_s(seen.begin(), seen.begin() + static_cast<long>(N));
    const long delta = shift_amount(p, k, in_s);
    for (std::size_t i = 0; i < N; ++i) {
      if (in_s[i]) k[i] += delta;
    }
    normalize_potentials(k);
  }
  sol.converged = done;
  sol.residual = ratio_residual(p, k);
  fill_exact(p, sol);
  return sol;
}

DecayCurve decay_curve(const SystemSpec& spec, const Scalar& tau,
                       const std::vector<int>& levels,
                       const DecayOptions& options) {
  if (levels.empty()) throw InvalidParameter("decay curve needs levels");
  validate(spec);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) throw InvalidParameter("levels must increase");
  }
  DecayCurve curve;
  RatioProgram prev_prog;
  const int d = spec.dim();
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const int n = levels[li];
    const LevelSet ls = level_set(spec, n, options.budget);
    const RatioProgram prog = build_program(ls, tau, options.budget);
    const bool exact = !options.force_iterative && prog.cells <= options.exact_budget;
    const AdversarySolution sol =
        exact ? solve_exact(prog, options.exact_budget)
              : solve_iterative(prog, options.max_iters, options.tolerance);
    DecayPoint pt;
    pt.level = n;
    pt.value = sol.value;
    pt.value_approx = sol.value_approx;
    pt.kind = sol.kind;
    pt.cells = prog.cells;
    pt.converged = sol.converged;

    // Doubling constant of the optimal measure at dyadic scales.
    const GridMeasure opt(ls.partition(), sol.weights);
    std::uint64_t finest = 1;
    for (int k = 0; k < d; ++k) finest = std::max(finest, ls.grid_cells(k));
    int L = 0;
    while ((std::uint64_t{2} << L) <= finest && std::pow(2.0, d * (L + 1)) <= 1e4) ++L;
    pt.induced_doubling = ball_doubling_constant(opt, std::max(L, 1));

    if (li > 0) {
      const auto& last = curve.points.back();
      pt.non_increasing = pt.value <= last.value;
      // Sum children into the coarser grid and test its constraints.
      const int gap = n - last.level;
      std::vector<Scalar> coarse(prev_prog.cells);
      for (std::size_t f = 0; f < prog.cells; ++f) {
        std::size_t rem = f;
        std::array<std::size_t, kMaxDim> idx{};
        for (int k = 0; k < d; ++k) {
          idx[k] = rem % prog.shape[k];
          rem /= prog.shape[k];
          std::size_t div = 1;
          for (int g = 0; g < gap; ++g) div *= spec.count(k);
          idx[k] /= div;
        }
        coarse[prev_prog.flat(idx)] += sol.weights[f];
      }
      pt.coarsening_feasible = verify_solution(prev_prog, coarse).feasible;
    }
    curve.points.push_back(pt);
    prev_prog = prog;
  }
  curve.strictly_decreasing = true;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (!(curve.points[i].value < curve.points[i - 1].value)) {
      curve.strictly_decreasing = false;
    }
  }
  if (curve.points.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& pt : curve.points) {
      xs.push_back(pt.level);
      ys.push_back(log2(pt.value) * std::log(2.0));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i] / n;
      my += ys[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    curve.rate = std::exp(sxy / sxx);
  }
  return curve;
}

std::string export_lp(const RatioProgram& p) {
  check_program(p);
  std::ostringstream os;
  const BigInt P = p.tau.get_num(), Q = p.tau.get_den();
  auto wrap = [&os](std::size_t& count) {
    if (++count % 8 == 0) os << "\n   ";
  };
  os << "\\ ratio program, level " << p.level << ", " << p.cells << " cells, tau "
     << to_fraction_string(p.tau) << "\n";
  os << "Maximize\n obj:";
  std::size_t c = 0;
  bool any = false;
  for (std::size_t i = 0; i < p.cells; ++i) {
    if (!p.target[i]) continue;
    os << (any ? " + " : " ") << "w" << i;
    any = true;
    wrap(c);
  }
  if (!any) os << " 0 w0";
  os << "\nSubject To\n norm:";
  c = 0;
  for (std::size_t i = 0; i < p.cells; ++i) {
    os << (i ? " + " : " ") << "w" << i;
    wrap(c);
  }
  os << " = 1\n";
  for (std::size_t r = 0; r < p.constraints.size(); ++r) {
    const auto& [i, j] = p.constraints[r];
    os << " r" << r << ": ";
    if (Q != 1) os << Q.get_str() << " ";
    os << "w" << i << " - ";
    if (P != 1) os << P.get_str() << " ";
    os << "w" << j << " <= 0\n";
  }
  os << "Bounds\n";
  for (std::size_t i = 0; i < p.cells; ++i) os << " w" << i << " >= 0\n";
  os << "End\n";
  return os.str();
}

std::vector<Scalar> import_solution(const RatioProgram& p, const std::string& text) {
  std::vector<Scalar> w(p.cells, Scalar(0));
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#\\");
    if (cut != std::string::npos) line.resize(cut);
    std::istringstream ls(line);
    std::string name, value, extra;
    if (!(ls >> name)) continue;
    if (!(ls >> value) || (ls >> extra)) {
      throw InvalidParameter("line " + std::to_string(lineno) + ": expected '<variable> <value>'");
    }
    if (name.size() < 2 || name[0] != 'w' ||
        name.find_first_not_of("0123456789", 1) != std::string::npos) {
      throw InvalidParameter("line " + std::to_string(lineno) + ": unknown variable " + name);
    }
    const std::size_t idx = std::stoul(name.substr(1));
    if (idx >= p.cells) {
      throw InvalidParameter("line " + std::to_string(lineno) + ": variable out of range");
    }
    w[idx] = parse_scalar(value);
  }
  return w;
}

SolutionCheck verify_solution(const RatioProgram& p, const std::vector<Scalar>& w,
                              double tolerance) {
  check_program(p);
  if (w.size() != p.cells) throw DimensionMismatch("weight count differs from cell count");
  SolutionCheck out;
  bool ok = true;
  for (std::size_t i = 0; i < p.cells; ++i) {
    out.total += w[i];
    if (p.target[i]) out.value += w[i];
    if (sgn(w[i]) < 0) {
      ok = false;
      out.residual = std::max(out.residual, -to_double(w[i]));
    }
  }
  const Scalar norm_err = abs(Scalar(out.total - 1));
  out.residual = std::max(out.residual, to_double(norm_err));
  if (tolerance == 0 ? sgn(norm_err) != 0 : to_double(norm_err) > tolerance) ok = false;
  for (const auto& [i, j] : p.constraints) {
    const Scalar excess = w[i] - p.tau * w[j];
    if (sgn(excess) > 0) {
      out.residual = std::max(out.residual, to_double(excess));
      if (tolerance == 0 || to_double(excess) > tolerance) ok = false;
    }
  }
  out.feasible = ok;
  return out;
}

}  // namespace carpetlab

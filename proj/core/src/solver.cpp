#include "lot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "lot/error.hpp"

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_cost_shape(const CostMatrix& cost, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  if (cost.rows() != mu0.size() || cost.cols() != mu1.size()) {
    throw InvalidInputError("cost matrix shape does not match the measures");
  }
  if (mu0.manifold() != mu1.manifold()) throw InvalidInputError("measures live on different manifolds");
  for (Eigen::Index j = 0; j < cost.cols(); ++j) {
    for (Eigen::Index i = 0; i < cost.rows(); ++i) {
      const double c = cost(i, j);
      if (std::isnan(c) || c == -kInf) throw InvalidInputError("cost matrix has NaN or -inf entries");
    }
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Active (positive mass) sub-problem in log domain.
struct Problem {
  std::vector<Eigen::Index> rows, cols;
  Eigen::MatrixXd c;   // active rows x active cols
  Eigen::MatrixXd ct;  // transpose, for contiguous row access
  Eigen::VectorXd log_m0, log_m1, m0, m1;
  std::vector<char> row_isolated, col_isolated;
  // Connected components of the finite-cost bipartite graph, rows then cols.
  std::vector<int> component;
  int component_count = 0;
};

Problem make_problem(const CostMatrix& cost, const Eigen::VectorXd& m0, const Eigen::VectorXd& m1) {
  Problem p;
  for (Eigen::Index i = 0; i < m0.size(); ++i) if (m0(i) > 0.0) p.rows.push_back(i);
  for (Eigen::Index j = 0; j < m1.size(); ++j) if (m1(j) > 0.0) p.cols.push_back(j);
  const auto k0 = static_cast<Eigen::Index>(p.rows.size());
  const auto k1 = static_cast<Eigen::Index>(p.cols.size());
  p.c.resize(k0, k1);
  p.m0.resize(k0);
  p.m1.resize(k1);
  for (Eigen::Index a = 0; a < k0; ++a) p.m0(a) = m0(p.rows[a]);
  for (Eigen::Index b = 0; b < k1; ++b) p.m1(b) = m1(p.cols[b]);
  for (Eigen::Index b = 0; b < k1; ++b)
    for (Eigen::Index a = 0; a < k0; ++a) p.c(a, b) = cost(p.rows[a], p.cols[b]);
  p.ct = p.c.transpose();
  p.log_m0 = p.m0.array().log();
  p.log_m1 = p.m1.array().log();

  p.row_isolated.assign(k0, 1);
  p.col_isolated.assign(k1, 1);
  UnionFind uf(static_cast<int>(k0 + k1));
  for (Eigen::Index b = 0; b < k1; ++b) {
    for (Eigen::Index a = 0; a < k0; ++a) {
      if (std::isfinite(p.c(a, b))) {
        p.row_isolated[a] = 0;
        p.col_isolated[b] = 0;
        uf.unite(static_cast<int>(a), static_cast<int>(k0 + b));
      }
    }
  }
  std::vector<int> label(k0 + k1, -1);
  p.component.resize(k0 + k1);
  for (Eigen::Index v = 0; v < k0 + k1; ++v) {
    const int r = uf.find(static_cast<int>(v));
    if (label[r] < 0) label[r] = p.component_count++;
    p.component[v] = label[r];
  }
  return p;
}

// log sum_j exp((g_j - c_ij) / eps + log_m_j) for one row given as a contiguous column.
double lse(const Eigen::Ref<const Eigen::VectorXd>& costs, const Eigen::VectorXd& g,
           const Eigen::VectorXd& log_m, double eps) {
  double mx = -kInf;
  for (Eigen::Index j = 0; j < costs.size(); ++j) {
    if (!std::isfinite(costs(j))) continue;
    mx = std::max(mx, (g(j) - costs(j)) / eps + log_m(j));
  }
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (Eigen::Index j = 0; j < costs.size(); ++j) {
    if (!std::isfinite(costs(j))) continue;
    s += std::exp((g(j) - costs(j)) / eps + log_m(j) - mx);
  }
  return mx + std::log(s);
}

Eigen::VectorXd row_lse(const Problem& p, const Eigen::VectorXd& g, double eps) {
  Eigen::VectorXd s(p.c.rows());
  for (Eigen::Index a = 0; a < p.c.rows(); ++a) s(a) = lse(p.ct.col(a), g, p.log_m1, eps);
  return s;
}

Eigen::VectorXd col_lse(const Problem& p, const Eigen::VectorXd& f, double eps) {
  Eigen::VectorXd s(p.c.cols());
  for (Eigen::Index b = 0; b < p.c.cols(); ++b) s(b) = lse(p.c.col(b), f, p.log_m0, eps);
  return s;
}

// Potential update; isolated atoms keep a placeholder value of zero.
Eigen::VectorXd update(const Eigen::VectorXd& s, const std::vector<char>& isolated, double scale) {
  Eigen::VectorXd out(s.size());
  for (Eigen::Index a = 0; a < s.size(); ++a) out(a) = isolated[a] ? 0.0 : -scale * s(a);
  return out;
}

// Exact maximization of the HK dual along (f + t, g - t) within each
// connected component. Removes the slowly converging mass-translation mode.
void translate_components(const Problem& p, double lambda, Eigen::VectorXd& f, Eigen::VectorXd& g) {
  const int nc = p.component_count;
  const auto k0 = f.size();
  std::vector<double> la(nc, -kInf), lb(nc, -kInf);
  auto acc = [](double& acc_log, double term) {
    if (acc_log == -kInf) { acc_log = term; return; }
    const double hi = std::max(acc_log, term);
    acc_log = hi + std::log(std::exp(acc_log - hi) + std::exp(term - hi));
  };
  for (Eigen::Index a = 0; a < k0; ++a) {
    if (!p.row_isolated[a]) acc(la[p.component[a]], p.log_m0(a) - f(a) / lambda);
  }
  for (Eigen::Index b = 0; b < g.size(); ++b) {
    if (!p.col_isolated[b]) acc(lb[p.component[k0 + b]], p.log_m1(b) - g(b) / lambda);
  }
  std::vector<double> shift(nc, 0.0);
  for (int c = 0; c < nc; ++c) {
    if (la[c] > -kInf && lb[c] > -kInf) shift[c] = 0.5 * lambda * (la[c] - lb[c]);
  }
  for (Eigen::Index a = 0; a < k0; ++a) f(a) += shift[p.component[a]];
  for (Eigen::Index b = 0; b < g.size(); ++b) g(b) -= shift[p.component[k0 + b]];
}

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

double max_finite(const Eigen::MatrixXd& c) {
  double mx = 0.0;
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      if (std::isfinite(c(i, j))) mx = std::max(mx, c(i, j));
  return mx;
}

enum class Mode { Balanced, Hk };

SolveResult run_sinkhorn(const CostMatrix& cost, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                         const SolverConfig& cfg, Mode mode) {
  cfg.validate();
  check_cost_shape(cost, mu0, mu1);
  const double eps_target = cfg.epsilon_target > 0.0 ? cfg.epsilon_target : default_epsilon(mu0, mu1);
  const double lambda = cfg.kappa * cfg.kappa;
  Problem p = make_problem(cost, mu0.masses(), mu1.masses());
  const auto k0 = static_cast<Eigen::Index>(p.rows.size());
  const auto k1 = static_cast<Eigen::Index>(p.cols.size());

  if (mode == Mode::Balanced) {
    const double a = mu0.total_mass(), b = mu1.total_mass();
    if (std::abs(a - b) > 1e-9 * std::max({1.0, a, b})) {
      throw InvalidInputError("balanced transport needs equal total masses");
    }
    for (char iso : p.row_isolated) if (iso) throw InvalidInputError("balanced transport: an atom has no finite-cost partner");
    for (char iso : p.col_isolated) if (iso) throw InvalidInputError("balanced transport: an atom has no finite-cost partner");
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(k0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(k1);
  SolveStats stats;
  double eps = std::max(max_finite(p.c), eps_target);
  const bool trivial = k0 == 0 || k1 == 0 ||
                       std::all_of(p.row_isolated.begin(), p.row_isolated.end(), [](char c) { return c != 0; });
  if (trivial) eps = eps_target;
  const double mass0 = p.m0.sum();

  while (!trivial) {
    const bool final_stage = eps <= eps_target;
    const double scale = mode == Mode::Hk ? eps * lambda / (lambda + eps) : eps;
    const double tol = final_stage ? cfg.marginal_tol
                                   : std::max(cfg.marginal_tol, mode == Mode::Hk ? 1e-3 * eps : 1e-3 * mass0);
    double residual = kInf;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
      const Eigen::VectorXd s = row_lse(p, g, eps);
      if (mode == Mode::Balanced) {
        double err = 0.0;
        for (Eigen::Index a = 0; a < k0; ++a) err += std::abs(p.m0(a) * std::exp(f(a) / eps + s(a)) - p.m0(a));
        residual = err;
      }
      Eigen::VectorXd f_new = update(s, p.row_isolated, scale);
      Eigen::VectorXd g_new = update(col_lse(p, f_new, eps), p.col_isolated, scale);
      if (mode == Mode::Hk) {
        translate_components(p, lambda, f_new, g_new);
        residual = std::max(max_abs_diff(f_new, f), max_abs_diff(g_new, g));
      }
      f = std::move(f_new);
      g = std::move(g_new);
      if (residual < tol) {
        ++it;
        break;
      }
    }
    stats.iterations += it;
    ++stats.stages;
    stats.residual = residual;
    if (final_stage) {
      if (!(residual < tol)) {
        std::ostringstream os;
        os << "sinkhorn did not converge: residual " << residual << " after " << it
           << " iterations at epsilon " << eps;
        throw ConvergenceError(os.str(), residual);
      }
      break;
    }
    eps = std::max(eps_target, eps * cfg.epsilon_scaling_factor);
  }
  stats.epsilon = eps;

  SolveResult out;
  out.stats = stats;
  Eigen::MatrixXd plan = Eigen::MatrixXd::Zero(mu0.size(), mu1.size());
  for (Eigen::Index b = 0; b < k1; ++b) {
    for (Eigen::Index a = 0; a < k0; ++a) {
      const double c = p.c(a, b);
      if (!std::isfinite(c)) continue;
      plan(p.rows[a], p.cols[b]) = std::exp((f(a) + g(b) - c) / eps + p.log_m0(a) + p.log_m1(b));
    }
  }

  // Potentials on the full index sets. Zero-mass atoms get the value the
  // update rule would assign them; atoms without partners get +inf.
  const double scale = mode == Mode::Hk ? eps * lambda / (lambda + eps) : eps;
  auto fill = [&](Eigen::Index n, const std::vector<Eigen::Index>& active, const Eigen::VectorXd& pot,
                  const std::vector<char>& isolated, const Eigen::VectorXd& other, const Eigen::VectorXd& log_m_other,
                  const std::vector<Eigen::Index>& other_active, bool transpose) {
    Eigen::VectorXd u(n);
    std::vector<char> done(n, 0);
    for (std::size_t a = 0; a < active.size(); ++a) {
      u(active[a]) = isolated[a] ? kInf : pot(static_cast<Eigen::Index>(a));
      done[active[a]] = 1;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[i]) continue;
      Eigen::VectorXd row(other_active.size());
      for (std::size_t b = 0; b < other_active.size(); ++b) {
        row(static_cast<Eigen::Index>(b)) = transpose ? cost(other_active[b], i) : cost(i, other_active[b]);
      }
      const double s = lse(row, other, log_m_other, eps);
      u(i) = s == -kInf ? kInf : -scale * s;
    }
    return u;
  };
  out.potentials.u0 = fill(mu0.size(), p.rows, f, p.row_isolated, g, p.log_m1, p.cols, false);
  out.potentials.u1 = fill(mu1.size(), p.cols, g, p.col_isolated, f, p.log_m0, p.rows, true);

  if (mode == Mode::Hk) {
    auto cone = [lambda](const Eigen::VectorXd& u) {
      Eigen::VectorXd phi(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) phi(i) = u(i) == kInf ? lambda : lambda * -std::expm1(-u(i) / lambda);
      return phi;
    };
    out.potentials.phi0 = cone(out.potentials.u0);
    out.potentials.phi1 = cone(out.potentials.u1);
    out.plan.matrix = std::move(plan);
    out.plan.value = primal_value_hk(out.plan.matrix, cost, mu0.masses(), mu1.masses(), cfg.kappa);
  } else {
    out.potentials.phi0 = out.potentials.u0;
    out.potentials.phi1 = out.potentials.u1;
    double value = 0.0;
    for (Eigen::Index j = 0; j < plan.cols(); ++j)
      for (Eigen::Index i = 0; i < plan.rows(); ++i)
        if (plan(i, j) > 0.0) value += plan(i, j) * cost(i, j);
    out.plan.matrix = std::move(plan);
    out.plan.value = value;
  }
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(epsilon_scaling_factor > 0.0 && epsilon_scaling_factor < 1.0)) {
    throw InvalidInputError("solver: epsilon_scaling_factor must lie in (0, 1)");
  }
  if (max_iters < 1) throw InvalidInputError("solver: max_iters must be positive");
  if (!(marginal_tol > 0.0)) throw InvalidInputError("solver: marginal_tol must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidInputError("solver: kappa must be positive");
  if (!std::isfinite(epsilon_target)) throw InvalidInputError("solver: epsilon must be finite");
}

double truncated_cos(double d, double kappa) {
  const double t = d / kappa;
  return t >= 0.5 * std::numbers::pi ? 0.0 : std::cos(t);
}

double hk_cost(double d, double kappa) {
  const double t = d / kappa;
  if (t >= 0.5 * std::numbers::pi) return kInf;
  return -2.0 * kappa * kappa * std::log(std::cos(t));
}

CostMatrix build_cost_w2(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  if (mu0.manifold() != mu1.manifold()) throw InvalidInputError("measures live on different manifolds");
  const Manifold& m = mu0.manifold();
  CostMatrix c(mu0.size(), mu1.size());
  for (Eigen::Index j = 0; j < mu1.size(); ++j) {
    const Point y = mu1.point(j);
    for (Eigen::Index i = 0; i < mu0.size(); ++i) {
      const double d = m.dist(mu0.point(i), y);
      c(i, j) = d * d;
    }
  }
  return c;
}

CostMatrix build_cost_hk(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double kappa) {
  if (!(kappa > 0.0)) throw InvalidInputError("kappa must be positive");
  if (mu0.manifold() != mu1.manifold()) throw InvalidInputError("measures live on different manifolds");
  const Manifold& m = mu0.manifold();
  CostMatrix c(mu0.size(), mu1.size());
  for (Eigen::Index j = 0; j < mu1.size(); ++j) {
    const Point y = mu1.point(j);
    for (Eigen::Index i = 0; i < mu0.size(); ++i) c(i, j) = hk_cost(m.dist(mu0.point(i), y), kappa);
  }
  return c;
}

double default_epsilon(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  // Spacing within each support. Distances across the two supports are left
  // out: nearly overlapping clouds would otherwise drive epsilon to zero.
  std::vector<double> nn;
  for (const DiscreteMeasure* mu : {&mu0, &mu1}) {
    const Manifold& m = mu->manifold();
    for (Eigen::Index i = 0; i < mu->size(); ++i) {
      double best = kInf;
      const Point x = mu->point(i);
      for (Eigen::Index j = 0; j < mu->size(); ++j) {
        if (i == j) continue;
        const double d = m.dist(x, mu->point(j));
        if (d > 1e-12) best = std::min(best, d);
      }
      if (std::isfinite(best)) nn.push_back(best);
    }
  }
  if (nn.empty()) return 1e-4;
  const auto mid = nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2);
  std::nth_element(nn.begin(), mid, nn.end());
  double med = *mid;
  if (nn.size() % 2 == 0) med = 0.5 * (med + *std::max_element(nn.begin(), mid));
  return med * med;
}

SolveResult sinkhorn_balanced(const CostMatrix& cost, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                              const SolverConfig& cfg) {
  return run_sinkhorn(cost, mu0, mu1, cfg, Mode::Balanced);
}

SolveResult sinkhorn_hk(const CostMatrix& cost, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                        const SolverConfig& cfg) {
  return run_sinkhorn(cost, mu0, mu1, cfg, Mode::Hk);
}

double kl_divergence(const Eigen::VectorXd& rho, const Eigen::VectorXd& mu) {
  if (rho.size() != mu.size()) throw InvalidInputError("kl: size mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    if (rho(i) < 0.0 || mu(i) < 0.0) throw InvalidInputError("kl: negative mass");
    if (rho(i) > 0.0) {
      if (mu(i) == 0.0) return kInf;
      s += rho(i) * std::log(rho(i) / mu(i));
    }
    s += mu(i) - rho(i);
  }
  return std::max(0.0, s);
}

double primal_value_hk(const Eigen::MatrixXd& plan, const CostMatrix& cost, const Eigen::VectorXd& m0,
                       const Eigen::VectorXd& m1, double kappa) {
  if (plan.rows() != m0.size() || plan.cols() != m1.size() || cost.rows() != plan.rows() ||
      cost.cols() != plan.cols()) {
    throw InvalidInputError("primal value: shape mismatch");
  }
  double transport = 0.0;
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    for (Eigen::Index i = 0; i < plan.rows(); ++i) {
      const double pij = plan(i, j);
      if (pij < 0.0) throw InvalidPlanError("plan has negative entries");
      if (pij == 0.0) continue;
      if (!std::isfinite(cost(i, j))) return kInf;
      transport += pij * cost(i, j);
    }
  }
  const double l = kappa * kappa;
  const Eigen::VectorXd p0 = plan.rowwise().sum();
  const Eigen::VectorXd p1 = plan.colwise().sum().transpose();
  return transport + l * kl_divergence(p0, m0) + l * kl_divergence(p1, m1);
}

double primal_value_hk(const Eigen::MatrixXd& plan, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                       double kappa) {
  return primal_value_hk(plan, build_cost_hk(mu0, mu1, kappa), mu0.masses(), mu1.masses(), kappa);
}

double dual_value(const DualPotentials& pot, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  if (pot.phi0.size() != mu0.size() || pot.phi1.size() != mu1.size()) {
    throw InvalidInputError("dual value: potential sizes do not match the measures");
  }
  double s = 0.0;
  for (Eigen::Index i = 0; i < mu0.size(); ++i) if (mu0.mass(i) > 0.0) s += pot.phi0(i) * mu0.mass(i);
  for (Eigen::Index j = 0; j < mu1.size(); ++j) if (mu1.mass(j) > 0.0) s += pot.phi1(j) * mu1.mass(j);
  return s;
}

OptimalityReport check_optimality_conditions(const Eigen::MatrixXd& plan, const DualPotentials& pot,
                                             const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                             double kappa, double tol, double support_rel) {
  if (plan.rows() != mu0.size() || plan.cols() != mu1.size() || pot.phi0.size() != mu0.size() ||
      pot.phi1.size() != mu1.size()) {
    throw InvalidInputError("optimality check: shape mismatch");
  }
  const double l = kappa * kappa;
  const Eigen::VectorXd d0 = (1.0 - pot.phi0.array() / l).matrix();
  const Eigen::VectorXd d1 = (1.0 - pot.phi1.array() / l).matrix();
  const Eigen::VectorXd p0 = plan.rowwise().sum();
  const Eigen::VectorXd p1 = plan.colwise().sum().transpose();
  const Manifold& m = mu0.manifold();
  OptimalityReport r;
  r.tol = tol;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    const double row_max = plan.row(i).maxCoeff();
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      const double c = truncated_cos(m.dist(mu0.point(i), mu1.point(j)), kappa);
      const double prod = d0(i) * d1(j);
      r.admissibility_violation = std::max(r.admissibility_violation, c * c - prod);
      if (plan(i, j) > 0.0 && plan(i, j) >= support_rel * row_max) {
        r.product_violation = std::max(r.product_violation, std::abs(prod - c * c));
      }
    }
  }
  auto marginal = [&](const Eigen::VectorXd& pm, const Eigen::VectorXd& mass, const Eigen::VectorXd& dens) {
    for (Eigen::Index i = 0; i < mass.size(); ++i) {
      if (!(mass(i) > 0.0)) continue;
      const double rho = pm(i) / mass(i);
      r.density_violation = std::max(r.density_violation, std::abs(rho - dens(i)));
      if (pm(i) == 0.0) r.singular_violation = std::max(r.singular_violation, std::abs(dens(i)));
    }
  };
  marginal(p0, mu0.masses(), d0);
  marginal(p1, mu1.masses(), d1);
  r.pass = r.product_violation <= tol && r.admissibility_violation <= tol && r.singular_violation <= tol &&
           r.density_violation <= tol;
  return r;
}

}  // namespace lot

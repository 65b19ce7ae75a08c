#include "lot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include "lot/error.hpp"

namespace lot::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cut_cos(double d, double kappa) {
  const double t = d / kappa;
  return t >= 0.5 * std::numbers::pi ? 0.0 : std::cos(t);
}

Eigen::MatrixXd distances(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  if (mu0.manifold() != mu1.manifold()) throw InvalidInputError("oracle: measures live on different manifolds");
  Eigen::MatrixXd d(mu0.size(), mu1.size());
  for (Eigen::Index i = 0; i < mu0.size(); ++i)
    for (Eigen::Index j = 0; j < mu1.size(); ++j) d(i, j) = mu0.manifold().dist(mu0.point(i), mu1.point(j));
  return d;
}

double entropy_term(double rho, double mu) {
  if (rho == 0.0) return mu;
  if (mu == 0.0) return kInf;
  return rho * std::log(rho / mu) - rho + mu;
}

// Integer units for masses that are multiples of 1/D, D <= 64.
bool integer_units(const Eigen::VectorXd& a, const Eigen::VectorXd& b, std::vector<int>& ua, std::vector<int>& ub,
                   int& denom) {
  for (int d = 1; d <= 64; ++d) {
    auto fits = [d](const Eigen::VectorXd& m) {
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double x = m(i) * d;
        if (std::abs(x - std::round(x)) > 1e-9 * std::max(1.0, x)) return false;
      }
      return true;
    };
    if (fits(a) && fits(b)) {
      ua.resize(a.size());
      ub.resize(b.size());
      for (Eigen::Index i = 0; i < a.size(); ++i) ua[i] = static_cast<int>(std::lround(a(i) * d));
      for (Eigen::Index j = 0; j < b.size(); ++j) ub[j] = static_cast<int>(std::lround(b(j) * d));
      denom = d;
      return true;
    }
  }
  return false;
}

struct VertexSearch {
  const Eigen::MatrixXd& cost;
  int rows;
  std::map<std::vector<int>, std::pair<double, int>> memo;  // state -> (best cost in units, chosen cell)

  double solve(const std::vector<int>& state) {
    if (std::all_of(state.begin(), state.end(), [](int v) { return v == 0; })) return 0.0;
    if (auto it = memo.find(state); it != memo.end()) return it->second.first;
    const int cols = static_cast<int>(state.size()) - rows;
    double best = kInf;
    int best_cell = -1;
    for (int i = 0; i < rows; ++i) {
      if (state[i] == 0) continue;
      for (int j = 0; j < cols; ++j) {
        if (state[rows + j] == 0 || !std::isfinite(cost(i, j))) continue;
        const int x = std::min(state[i], state[rows + j]);
        std::vector<int> next = state;
        next[i] -= x;
        next[rows + j] -= x;
        const double v = x * cost(i, j) + solve(next);
        if (v < best) {
          best = v;
          best_cell = i * cols + j;
        }
      }
    }
    memo[state] = {best, best_cell};
    return best;
  }
};

}  // namespace

ExactPlan exact_balanced(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, const Eigen::MatrixXd& cost) {
  const Eigen::Index k0 = mu0.size(), k1 = mu1.size();
  if (cost.rows() != k0 || cost.cols() != k1) throw InvalidInputError("exact_balanced: cost shape mismatch");
  if (k0 > 6 || k1 > 6) throw UnsupportedError("exact_balanced: at most 6 atoms per side");
  const double a = mu0.total_mass(), b = mu1.total_mass();
  if (std::abs(a - b) > 1e-12 * std::max(1.0, a)) throw InvalidInputError("exact_balanced: total masses differ");

  ExactPlan out;
  out.plan = Eigen::MatrixXd::Zero(k0, k1);
  if (k0 == 0) return out;

  const bool uniform = k0 == k1 && (mu0.masses().array() == mu0.mass(0)).all() &&
                       (mu1.masses().array() == mu0.mass(0)).all();
  if (uniform) {
    std::vector<int> perm(k0);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best_perm;
    double best = kInf;
    do {
      double v = 0.0;
      for (Eigen::Index i = 0; i < k0; ++i) v += cost(i, perm[i]);
      if (v < best) {
        best = v;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!std::isfinite(best)) throw InvalidInputError("exact_balanced: no finite-cost plan");
    const double m = mu0.mass(0);
    for (Eigen::Index i = 0; i < k0; ++i) out.plan(i, best_perm[i]) = m;
    out.value = best * m;
    return out;
  }

  std::vector<int> ua, ub;
  int denom = 0;
  if (!integer_units(mu0.masses(), mu1.masses(), ua, ub, denom)) {
    throw UnsupportedError("exact_balanced: masses are not multiples of 1/D with D <= 64");
  }
  std::vector<int> state(ua);
  state.insert(state.end(), ub.begin(), ub.end());
  VertexSearch search{cost, static_cast<int>(k0), {}};
  const double best = search.solve(state);
  if (!std::isfinite(best)) throw InvalidInputError("exact_balanced: no finite-cost plan");
  while (!std::all_of(state.begin(), state.end(), [](int v) { return v == 0; })) {
    const int cell = search.memo.at(state).second;
    const int i = cell / static_cast<int>(k1), j = cell % static_cast<int>(k1);
    const int x = std::min(state[i], state[k0 + j]);
    out.plan(i, j) += static_cast<double>(x) / denom;
    state[i] -= x;
    state[k0 + j] -= x;
  }
  out.value = best / denom;
  return out;
}

DiracHk hk_dirac_closed_form(double m0, double m1, double distance, double kappa) {
  if (m0 < 0.0 || m1 < 0.0 || distance < 0.0 || !(kappa > 0.0)) {
    throw InvalidInputError("dirac closed form: need nonnegative masses and distance, positive kappa");
  }
  const double l = kappa * kappa;
  const double c = cut_cos(distance, kappa);
  DiracHk r;
  r.plan_mass = std::sqrt(m0 * m1) * c;
  r.value = l * (m0 + m1 - 2.0 * r.plan_mass);
  r.phi0 = m0 > 0.0 ? l * (1.0 - r.plan_mass / m0) : l;
  r.phi1 = m1 > 0.0 ? l * (1.0 - r.plan_mass / m1) : l;
  return r;
}

StarHk hk_to_dirac_closed_form(const DiscreteMeasure& mu0, const Point& y, double m, double kappa) {
  if (m < 0.0 || !(kappa > 0.0)) throw InvalidInputError("star closed form: bad mass or kappa");
  const double l = kappa * kappa;
  const Eigen::Index k = mu0.size();
  Eigen::VectorXd c2(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double c = cut_cos(mu0.manifold().dist(mu0.point(i), y), kappa);
    c2(i) = c * c;
  }
  // Stationarity gives plan_i = mu_i cos_i^2 m / P with P^2 = m sum mu_i cos_i^2.
  const double total = std::sqrt(m * mu0.masses().dot(c2));
  StarHk r;
  r.plan = total > 0.0 ? Eigen::VectorXd(mu0.masses().cwiseProduct(c2) * (m / total)) : Eigen::VectorXd::Zero(k);
  r.phi0.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    r.phi0(i) = mu0.mass(i) > 0.0 ? l * (1.0 - r.plan(i) / mu0.mass(i)) : l * (1.0 - (total > 0.0 ? c2(i) * m / total : 0.0));
  }
  r.phi1 = m > 0.0 ? l * (1.0 - total / m) : l;
  double v = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r.plan(i) > 0.0) v += -l * std::log(c2(i)) * r.plan(i);
    v += l * entropy_term(r.plan(i), mu0.mass(i));
  }
  v += l * entropy_term(total, m);
  r.value = v;
  return r;
}

double hk_objective(const Eigen::MatrixXd& plan, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                    double kappa) {
  const Eigen::MatrixXd d = distances(mu0, mu1);
  const double l = kappa * kappa;
  double v = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      if (plan(i, j) == 0.0) continue;
      const double c = cut_cos(d(i, j), kappa);
      if (c == 0.0) return kInf;
      v += -2.0 * l * std::log(c) * plan(i, j);
    }
  }
  for (Eigen::Index i = 0; i < plan.rows(); ++i) v += l * entropy_term(plan.row(i).sum(), mu0.mass(i));
  for (Eigen::Index j = 0; j < plan.cols(); ++j) v += l * entropy_term(plan.col(j).sum(), mu1.mass(j));
  return v;
}

ExactPlan hk_grid_search(const DiscreteMeasure& mu0, const DiscreteMeasure& mu1, double kappa, double grid_step) {
  const Eigen::Index k0 = mu0.size(), k1 = mu1.size();
  if (k0 > 2 || k1 > 2) throw UnsupportedError("hk_grid_search: at most 2 x 2 atoms");
  if (!(kappa > 0.0) || !(grid_step > 0.0)) throw InvalidInputError("hk_grid_search: bad kappa or grid step");
  const Eigen::MatrixXd d = distances(mu0, mu1);
  Eigen::MatrixXd kernel(k0, k1);  // mu0_i mu1_j cos^2, the product a stationary entry balances
  Eigen::MatrixXd bound(k0, k1);
  for (Eigen::Index i = 0; i < k0; ++i) {
    for (Eigen::Index j = 0; j < k1; ++j) {
      const double c = cut_cos(d(i, j), kappa);
      kernel(i, j) = mu0.mass(i) * mu1.mass(j) * c * c;
      bound(i, j) = c > 0.0 ? std::sqrt(mu0.mass(i) * mu1.mass(j)) : 0.0;
    }
  }

  // Coarse grid over all entries.
  const Eigen::Index n = k0 * k1;
  std::vector<int> steps(n);
  for (Eigen::Index e = 0; e < n; ++e) {
    const double b = bound(e % k0, e / k0);
    steps[e] = b > 0.0 ? std::clamp(static_cast<int>(std::ceil(b / grid_step)), 1, 20) : 0;
  }
  Eigen::MatrixXd best_plan = Eigen::MatrixXd::Zero(k0, k1);
  double best = hk_objective(best_plan, mu0, mu1, kappa);
  std::vector<int> idx(n, 0);
  Eigen::MatrixXd trial(k0, k1);
  while (true) {
    for (Eigen::Index e = 0; e < n; ++e) {
      const double b = bound(e % k0, e / k0);
      trial(e % k0, e / k0) = steps[e] > 0 ? b * idx[e] / steps[e] : 0.0;
    }
    const double v = hk_objective(trial, mu0, mu1, kappa);
    if (v < best) {
      best = v;
      best_plan = trial;
    }
    Eigen::Index e = 0;
    while (e < n && idx[e] == steps[e]) idx[e++] = 0;
    if (e == n) break;
    ++idx[e];
  }

  // Coordinate descent. With the rest of the plan fixed, the objective in
  // entry (i, j) is convex with stationary point (R + x)(C + x) = kernel_ij.
  Eigen::MatrixXd p = best_plan;
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < k0; ++i) {
      for (Eigen::Index j = 0; j < k1; ++j) {
        const double r = p.row(i).sum() - p(i, j);
        const double c = p.col(j).sum() - p(i, j);
        const double k = kernel(i, j);
        double x = 0.0;
        if (k > r * c) x = 2.0 * (k - r * c) / ((r + c) + std::sqrt((r - c) * (r - c) + 4.0 * k));
        change = std::max(change, std::abs(x - p(i, j)));
        p(i, j) = x;
      }
    }
    if (change <= 1e-16 * std::max(1.0, p.maxCoeff())) break;
  }
  ExactPlan out;
  out.plan = p;
  out.value = hk_objective(p, mu0, mu1, kappa);
  return out;
}

SemiCoupling semicoupling_from_plan(const Eigen::MatrixXd& plan, const DiscreteMeasure& mu0,
                                    const DiscreteMeasure& mu1) {
  if (plan.rows() != mu0.size() || plan.cols() != mu1.size()) throw InvalidInputError("semicoupling: shape mismatch");
  SemiCoupling s;
  s.gamma0 = Eigen::MatrixXd::Zero(plan.rows(), plan.cols());
  s.gamma1 = Eigen::MatrixXd::Zero(plan.rows(), plan.cols());
  s.diag0 = Eigen::VectorXd::Zero(plan.rows());
  s.diag1 = Eigen::VectorXd::Zero(plan.cols());
  const Eigen::VectorXd p0 = plan.rowwise().sum();
  const Eigen::VectorXd p1 = plan.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    if (p0(i) > 0.0) s.gamma0.row(i) = plan.row(i) * (mu0.mass(i) / p0(i));
    else s.diag0(i) = mu0.mass(i);
  }
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    if (p1(j) > 0.0) s.gamma1.col(j) = plan.col(j) * (mu1.mass(j) / p1(j));
    else s.diag1(j) = mu1.mass(j);
  }
  return s;
}

double semicoupling_value(const SemiCoupling& s, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                          double kappa) {
  const Eigen::Index k0 = mu0.size(), k1 = mu1.size();
  if (s.gamma0.rows() != k0 || s.gamma0.cols() != k1 || s.gamma1.rows() != k0 || s.gamma1.cols() != k1 ||
      s.diag0.size() != k0 || s.diag1.size() != k1) {
    throw InvalidInputError("semicoupling: shape mismatch");
  }
  if ((s.gamma0.array() < 0.0).any() || (s.gamma1.array() < 0.0).any()) {
    throw InvalidInputError("semicoupling: negative entries");
  }
  const Eigen::VectorXd r0 = s.gamma0.rowwise().sum() + s.diag0;
  const Eigen::VectorXd r1 = s.gamma1.colwise().sum().transpose() + s.diag1;
  const double scale = std::max(1.0, std::max(mu0.total_mass(), mu1.total_mass()));
  if ((r0 - mu0.masses()).cwiseAbs().maxCoeff() > 1e-9 * scale ||
      (r1 - mu1.masses()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InvalidInputError("semicoupling: marginal constraints violated");
  }
  const Eigen::MatrixXd d = distances(mu0, mu1);
  double cross = 0.0;
  for (Eigen::Index i = 0; i < k0; ++i)
    for (Eigen::Index j = 0; j < k1; ++j)
      cross += cut_cos(d(i, j), kappa) * std::sqrt(s.gamma0(i, j) * s.gamma1(i, j));
  return kappa * kappa * (r0.sum() + r1.sum() - 2.0 * cross);
}

}  // namespace lot::oracle

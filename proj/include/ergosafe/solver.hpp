/*
 * Copyright 2026 The ergosafe authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ERGOSAFE_SOLVER_HPP
#define ERGOSAFE_SOLVER_HPP

#include <algorithm>
#include <chrono>
#include <limits>
#include <vector>

#include "ergosafe/problem.hpp"

namespace ergosafe {

/// Per-constraint residual sequences for given controls (no margin applied):
/// the DCBF residuals in Dcbf mode, plain barrier values in PlainH mode.
template <typename Scalar>
std::vector<VectorX<Scalar>> constraintResiduals(
    const ProblemSpec<Scalar>& spec,
    const MatrixRef<Scalar>& controls) {
  const Trajectory<Scalar> traj =
      rollout(spec.dynamics, spec.start, controls, spec.dt);
  const Index T = spec.horizon;
  const Index v = spec.workspace.dim();
  MatrixX<Scalar> W(T, spec.dynamics.workspace_dim);
  for (Index t = 0; t < T; ++t) {
    W.row(t) = spec.dynamics.project(traj.states.row(t).transpose()).transpose();
  }
  std::vector<VectorX<Scalar>> out;
  out.reserve(spec.constraints.size());
  for (const auto& c : spec.constraints) {
    VectorX<Scalar> h(T);
    for (Index t = 0; t < T; ++t) {
      h(t) = c.barrierValue(W.row(t).transpose(), v);
    }
    if (spec.mode == InequalityMode::Dcbf) {
      VectorX<Scalar> res(T - 1);
      for (Index t = 0; t + 1 < T; ++t) {
        res(t) = dcbfResidualFromValues(c.gamma, h(t), h(t + 1));
      }
      out.push_back(std::move(res));
    } else {
      out.push_back(std::move(h));
    }
  }
  return out;
}

namespace detail {

/// Smooth approximation of max(0, q) with width eps (exact limit eps -> 0).
template <typename Scalar>
Scalar smoothPlus(Scalar q, Scalar eps) {
  return (q + std::sqrt(q * q + eps * eps)) / Scalar(2);
}

template <typename Scalar>
Scalar smoothPlusDeriv(Scalar q, Scalar eps) {
  return (Scalar(1) + q / std::sqrt(q * q + eps * eps)) / Scalar(2);
}

template <typename Scalar>
struct AlDiagnostics {
  Scalar augmented = Scalar(0);
  Scalar objective = Scalar(0);  // metric + control effort
  Scalar metric = Scalar(0);
  Scalar equality_violation = Scalar(0);
  Scalar inequality_violation = Scalar(0);  // unshifted residuals
  Scalar shifted_violation = Scalar(0);     // margin-tightened (solver-internal)
  Scalar workspace_violation = Scalar(0);
};

/// Augmented Lagrangian over the control sequence (single shooting). The
/// terminal condition x_{T-1} = goal carries classic multipliers; the
/// inequality rows use the clipped-multiplier form
///   psi(g) = (max(0, mu - rho g)^2 - mu^2) / (2 rho),
/// and workspace overshoot is a plain quadratic penalty weighted by rho.
///
/// All reductions are grouped per robot block so that evaluation commutes
/// bit-exactly with swapping two robots in a stacked problem.
template <typename Scalar>
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const ProblemSpec<Scalar>& spec,
                      const SolverConfig<Scalar>& cfg)
      : spec_(spec), cfg_(cfg), penalty_(cfg.initial_penalty) {
    eq_mult_ = VectorX<Scalar>::Zero(spec_.dynamics.state_dim);
    ineq_mult_.assign(spec_.constraints.size(),
                      VectorX<Scalar>::Zero(residualRows()));
  }

  Index residualRows() const {
    return spec_.mode == InequalityMode::Dcbf ? spec_.horizon - 1
                                              : spec_.horizon;
  }

  bool usesConstraints() const {
    return spec_.mode != InequalityMode::None && !spec_.constraints.empty();
  }

  Scalar penalty() const { return penalty_; }
  void growPenalty() {
    penalty_ = std::min(penalty_ * cfg_.penalty_growth, Scalar(1e8));
  }

  /// Augmented value; optionally the gradient with respect to the controls
  /// and the diagnostic breakdown.
  Scalar evaluate(const Eigen::Ref<const MatrixX<Scalar>>& U,
                  MatrixX<Scalar>* grad, AlDiagnostics<Scalar>* diag) const {
    const Index T = spec_.horizon;
    const Index N = spec_.numRobots();
    const Index v = spec_.workspace.dim();
    const Index nv = spec_.dynamics.workspace_dim;
    const Scalar rho = penalty_;

    const Trajectory<Scalar> traj =
        rollout(spec_.dynamics, spec_.start, U, spec_.dt);
    const MatrixX<Scalar>& X = traj.states;

    MatrixX<Scalar> W(T, nv);
    for (Index t = 0; t < T; ++t) {
      W.row(t) = spec_.dynamics.project(X.row(t).transpose()).transpose();
    }

    MatrixX<Scalar> dX;
    const Scalar metric =
        spec_.objective.metricWithGradient(X, grad != nullptr ? &dX : nullptr);
    const Scalar effort = controlEffort(spec_, U);

    // Terminal equality x_{T-1} = goal.
    const VectorX<Scalar> ceq = X.row(T - 1).transpose() - spec_.goal;
    Scalar eq_term = Scalar(0);
    {
      const Index per = spec_.dynamics.state_dim / N;
      for (Index r = 0; r < N; ++r) {
        const auto cr = ceq.segment(r * per, per);
        const auto lr = eq_mult_.segment(r * per, per);
        eq_term += lr.dot(cr) + (rho / Scalar(2)) * cr.dot(cr);
      }
    }

    MatrixX<Scalar> dW;
    if (grad != nullptr) dW = MatrixX<Scalar>::Zero(T, nv);

    // Barrier inequality rows, grouped per robot (pairwise rows in their own
    // bucket).
    Scalar shifted_viol = Scalar(0);
    Scalar unshifted_viol = Scalar(0);
    VectorX<Scalar> robot_bucket = VectorX<Scalar>::Zero(N);
    Scalar pair_bucket = Scalar(0);
    if (usesConstraints()) {
      const Scalar margin = cfg_.constraint_margin;
      const Scalar eps = rho * cfg_.penalty_smoothing;
      const Index rows = residualRows();
      VectorX<Scalar> h(T), coef(rows);
      for (std::size_t j = 0; j < spec_.constraints.size(); ++j) {
        const auto& c = spec_.constraints[j];
        for (Index t = 0; t < T; ++t) {
          h(t) = c.barrierValue(W.row(t).transpose(), v);
        }
        const VectorX<Scalar>& mu = ineq_mult_[j];
        Scalar local = Scalar(0);
        for (Index t = 0; t < rows; ++t) {
          const Scalar res = spec_.mode == InequalityMode::Dcbf
                                 ? dcbfResidualFromValues(c.gamma, h(t), h(t + 1))
                                 : h(t);
          const Scalar g = res - margin;
          const Scalar q = mu(t) - rho * g;
          const Scalar w = smoothPlus(q, eps);
          local += w * w - mu(t) * mu(t);
          coef(t) = -w * smoothPlusDeriv(q, eps);
          shifted_viol = std::max(shifted_viol, -g);
          unshifted_viol = std::max(unshifted_viol, -res);
        }
        local /= Scalar(2) * rho;
        if (c.isPairwise()) {
          pair_bucket += local;
        } else {
          robot_bucket(c.robot) += local;
        }
        if (grad != nullptr) {
          if (spec_.mode == InequalityMode::Dcbf) {
            const Scalar keep = Scalar(1) - c.gamma;
            for (Index t = 0; t < T; ++t) {
              Scalar a = Scalar(0);
              if (t >= 1) a += coef(t - 1);
              if (t <= T - 2) a -= keep * coef(t);
              if (a != Scalar(0)) {
                dW.row(t) +=
                    a * c.barrierGradient(W.row(t).transpose(), v).transpose();
              }
            }
          } else {
            for (Index t = 0; t < rows; ++t) {
              if (coef(t) != Scalar(0)) {
                dW.row(t) += coef(t) *
                             c.barrierGradient(W.row(t).transpose(), v).transpose();
              }
            }
          }
        }
      }
    }
    Scalar ineq_term = Scalar(0);
    for (Index r = 0; r < N; ++r) ineq_term += robot_bucket(r);
    ineq_term += pair_bucket;

    // Quadratic penalty on workspace overshoot of g(x) (smoothed like the
    // barrier rows; the violation diagnostic stays exact).
    Scalar ws_term = Scalar(0);
    Scalar ws_viol = Scalar(0);
    {
      const Scalar eps = cfg_.penalty_smoothing;
      const VectorX<Scalar>& L = spec_.workspace.extents();
      for (Index r = 0; r < N; ++r) {
        Scalar local = Scalar(0);
        for (Index t = 0; t < T; ++t) {
          for (Index i = 0; i < v; ++i) {
            const Scalar w = W(t, r * v + i);
            const Scalar lo = smoothPlus(-w, eps);
            const Scalar hi = smoothPlus(w - L(i), eps);
            local += lo * lo + hi * hi;
            ws_viol = std::max({ws_viol, -w, w - L(i)});
            if (grad != nullptr) {
              dW(t, r * v + i) += rho * (hi * smoothPlusDeriv(w - L(i), eps) -
                                         lo * smoothPlusDeriv(-w, eps));
            }
          }
        }
        ws_term += (rho / Scalar(2)) * local;
      }
    }
    ws_viol = std::max(ws_viol, Scalar(0));

    const Scalar value = metric + effort + eq_term + ineq_term + ws_term;

    if (diag != nullptr) {
      diag->augmented = value;
      diag->objective = metric + effort;
      diag->metric = metric;
      diag->equality_violation = ceq.cwiseAbs().maxCoeff();
      diag->inequality_violation = std::max(Scalar(0), unshifted_viol);
      diag->shifted_violation = std::max(Scalar(0), shifted_viol);
      diag->workspace_violation = ws_viol;
    }

    if (grad != nullptr) {
      for (Index t = 0; t < T; ++t) {
        dX.row(t) += spec_.dynamics
                         .project_pullback(X.row(t).transpose(),
                                           dW.row(t).transpose())
                         .transpose();
      }
      dX.row(T - 1) += (eq_mult_ + rho * ceq).transpose();

      // Adjoint sweep through the rollout.
      grad->resize(T - 1, spec_.dynamics.control_dim);
      VectorX<Scalar> lam = dX.row(T - 1).transpose();
      for (Index t = T - 2; t >= 0; --t) {
        const VectorX<Scalar> xt = X.row(t).transpose();
        const VectorX<Scalar> ut = U.row(t).transpose();
        grad->row(t) =
            (spec_.dynamics.step_adjoint_control(xt, ut, spec_.dt, lam) +
             Scalar(2) * spec_.dt * (spec_.control_weight * ut))
                .transpose();
        if (t > 0) {
          lam = dX.row(t).transpose() +
                spec_.dynamics.step_adjoint_state(xt, ut, spec_.dt, lam);
        }
      }
    }
    return value;
  }

  void updateMultipliers(const Eigen::Ref<const MatrixX<Scalar>>& U) {
    const Index T = spec_.horizon;
    const Index v = spec_.workspace.dim();
    const Scalar rho = penalty_;
    const Trajectory<Scalar> traj =
        rollout(spec_.dynamics, spec_.start, U, spec_.dt);

    eq_mult_ += rho * (traj.states.row(T - 1).transpose() - spec_.goal);

    if (!usesConstraints()) return;
    MatrixX<Scalar> W(T, spec_.dynamics.workspace_dim);
    for (Index t = 0; t < T; ++t) {
      W.row(t) =
          spec_.dynamics.project(traj.states.row(t).transpose()).transpose();
    }
    const Scalar margin = cfg_.constraint_margin;
    const Index rows = residualRows();
    VectorX<Scalar> h(T);
    for (std::size_t j = 0; j < spec_.constraints.size(); ++j) {
      const auto& c = spec_.constraints[j];
      for (Index t = 0; t < T; ++t) {
        h(t) = c.barrierValue(W.row(t).transpose(), v);
      }
      for (Index t = 0; t < rows; ++t) {
        const Scalar res = spec_.mode == InequalityMode::Dcbf
                               ? dcbfResidualFromValues(c.gamma, h(t), h(t + 1))
                               : h(t);
        const Scalar g = res - margin;
        ineq_mult_[j](t) = std::max(Scalar(0), ineq_mult_[j](t) - rho * g);
      }
    }
  }

  struct InnerResult {
    MatrixX<Scalar> controls;
    Index iterations = 0;
    Scalar pg_norm = std::numeric_limits<Scalar>::infinity();
  };

  /// Limited-memory BFGS with Armijo backtracking, projected onto the
  /// control box. Supersedes the plain gradient-descent inner loop, which
  /// could not reach the 1e-4 stationarity tolerance on active-constraint
  /// subproblems. On curvature breakdown or line-search failure the memory
  /// resets and the step falls back to steepest descent.
  ///
  /// `tolerance` (<= 0 means the configured gradient tolerance) lets the
  /// outer loop solve early subproblems loosely.
  InnerResult minimizeInner(MatrixX<Scalar> U, Scalar tolerance = Scalar(0)) const {
    const Scalar tol =
        tolerance > Scalar(0) ? tolerance : cfg_.gradient_tolerance;
    const Index N = spec_.numRobots();
    const auto project = [this](MatrixX<Scalar> M) {
      if (spec_.dynamics.bounded()) {
        for (Index i = 0; i < M.cols(); ++i) {
          M.col(i) = M.col(i)
                         .cwiseMax(spec_.dynamics.control_lower(i))
                         .cwiseMin(spec_.dynamics.control_upper(i));
        }
      }
      return M;
    };

    constexpr std::size_t kMemory = 30;
    std::vector<MatrixX<Scalar>> mem_s, mem_y;
    std::vector<Scalar> mem_rho;

    U = project(U);
    MatrixX<Scalar> g(U.rows(), U.cols());
    Scalar f = evaluate(U, &g, nullptr);

    InnerResult out;
    Index stagnant = 0;
    for (out.iterations = 0; out.iterations < cfg_.max_inner; ++out.iterations) {
      out.pg_norm = (U - project(U - g)).cwiseAbs().maxCoeff();
      if (out.pg_norm <= tol) break;
      if (stagnant >= 5) break;  // decrease at the numerical floor

      // Two-loop recursion for d = -H g.
      MatrixX<Scalar> d = -g;
      if (!mem_s.empty()) {
        std::vector<Scalar> a(mem_s.size());
        for (std::size_t i = mem_s.size(); i-- > 0;) {
          a[i] = mem_rho[i] * blockDot(mem_s[i], d, N);
          d -= a[i] * mem_y[i];
        }
        const std::size_t last = mem_s.size() - 1;
        const Scalar yy = blockDot(mem_y[last], mem_y[last], N);
        if (yy > Scalar(0)) {
          d *= blockDot(mem_s[last], mem_y[last], N) / yy;
        }
        for (std::size_t i = 0; i < mem_s.size(); ++i) {
          const Scalar b = mem_rho[i] * blockDot(mem_y[i], d, N);
          d += (a[i] - b) * mem_s[i];
        }
      }
      if (blockDot(g, d, N) >= Scalar(0)) {  // not a descent direction
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
        d = -g;
      }

      Scalar alpha = mem_s.empty()
                         ? Scalar(1) / std::max(Scalar(1), g.cwiseAbs().maxCoeff())
                         : Scalar(1);
      bool accepted = false;
      MatrixX<Scalar> U_trial;
      Scalar f_trial = f;
      for (int ls = 0; ls < 60 && !accepted; ++ls) {
        U_trial = project(U + alpha * d);
        const Scalar decrease = -blockDot(g, MatrixX<Scalar>(U_trial - U), N);
        if (decrease > Scalar(0)) {
          f_trial = evaluate(U_trial, nullptr, nullptr);
          if (f_trial <= f - cfg_.armijo * decrease) accepted = true;
        }
        if (!accepted) alpha *= cfg_.backtrack;
      }
      if (!accepted) {
        if (mem_s.empty()) break;  // steepest descent stalled too
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
        continue;  // retry from -g
      }

      MatrixX<Scalar> g_new(U.rows(), U.cols());
      const Scalar f_new = evaluate(U_trial, &g_new, nullptr);
      stagnant = (f - f_new <= Scalar(1e-15) * (Scalar(1) + std::abs(f)))
                     ? stagnant + 1
                     : 0;
      MatrixX<Scalar> s = U_trial - U;
      MatrixX<Scalar> y = g_new - g;
      const Scalar sy = blockDot(s, y, N);
      if (sy > Scalar(1e-12) * blockDot(s, s, N)) {
        mem_s.push_back(std::move(s));
        mem_y.push_back(std::move(y));
        mem_rho.push_back(Scalar(1) / sy);
        if (mem_s.size() > kMemory) {
          mem_s.erase(mem_s.begin());
          mem_y.erase(mem_y.begin());
          mem_rho.erase(mem_rho.begin());
        }
      }
      U = std::move(U_trial);
      f = f_new;
      g = std::move(g_new);
    }
    out.pg_norm = (U - project(U - g)).cwiseAbs().maxCoeff();
    out.controls = std::move(U);
    return out;
  }

 private:
  const ProblemSpec<Scalar>& spec_;
  const SolverConfig<Scalar>& cfg_;
  Scalar penalty_;
  VectorX<Scalar> eq_mult_;
  std::vector<VectorX<Scalar>> ineq_mult_;
};

}  // namespace detail

/// Solves the trajectory optimization by an augmented-Lagrangian outer loop
/// around the projected-gradient inner solver. Returns the best iterate seen
/// (preferring feasible ones) and never throws on non-convergence.
template <typename Scalar>
Solution<Scalar> solve(const ProblemSpec<Scalar>& spec,
                       const SolverConfig<Scalar>& cfg) {
  spec.validate();
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const Scalar eq_tol = cfg.resolvedEqualityTolerance(spec.workspace);

  detail::AugmentedLagrangian<Scalar> al(spec, cfg);
  MatrixX<Scalar> U = initialize(spec, cfg);

  MatrixX<Scalar> best_U = U;
  detail::AlDiagnostics<Scalar> best{};
  al.evaluate(U, nullptr, &best);
  bool best_feasible = false;
  Scalar best_infeasibility = std::numeric_limits<Scalar>::infinity();
  bool converged = false;

  Index total_inner = 0;
  Index outer_used = 0;
  Scalar prev_violation = std::numeric_limits<Scalar>::infinity();

  for (Index outer = 0; outer < cfg.max_outer; ++outer) {
    ++outer_used;
    auto inner = al.minimizeInner(std::move(U));
    U = std::move(inner.controls);
    total_inner += inner.iterations;

    detail::AlDiagnostics<Scalar> d{};
    al.evaluate(U, nullptr, &d);
    const bool feasible = d.equality_violation <= eq_tol &&
                          d.shifted_violation <= cfg.violation_tolerance &&
                          d.workspace_violation <= cfg.violation_tolerance;
    const Scalar infeasibility =
        std::max({d.equality_violation, d.shifted_violation, d.workspace_violation});

    if (feasible) {
      if (!best_feasible || d.objective < best.objective) {
        best_U = U;
        best = d;
        best_feasible = true;
      }
    } else if (!best_feasible && infeasibility < best_infeasibility) {
      best_U = U;
      best = d;
      best_infeasibility = infeasibility;
    }

    if (feasible && inner.pg_norm <= cfg.gradient_tolerance) {
      converged = true;
      break;
    }

    al.updateMultipliers(U);
    if (!feasible && !(infeasibility <= Scalar(0.25) * prev_violation)) {
      al.growPenalty();
    }
    prev_violation = infeasibility;
  }

  Solution<Scalar> sol;
  sol.trajectory = rollout(spec.dynamics, spec.start, best_U, spec.dt);
  sol.objective_value = best.objective;
  sol.metric_value = best.metric;
  sol.equality_violation = best.equality_violation;
  sol.inequality_violation = best.inequality_violation;
  sol.workspace_violation = best.workspace_violation;
  sol.converged = converged && best_feasible;
  sol.outer_iterations = outer_used;
  sol.inner_iterations = total_inner;
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t_start)
                    .count();
  return sol;
}

/// Compares the assembled augmented-objective gradient (fresh multipliers,
/// initial penalty) against central finite differences. Returns the
/// norm-wise relative error max|a - fd| / max(|a|_inf, |fd|_inf).
template <typename Scalar>
Scalar gradCheck(const ProblemSpec<Scalar>& spec, const SolverConfig<Scalar>& cfg,
                 const MatrixRef<Scalar>& controls,
                 Scalar step = Scalar(1e-6)) {
  detail::AugmentedLagrangian<Scalar> al(spec, cfg);
  MatrixX<Scalar> U = controls;
  MatrixX<Scalar> analytic(U.rows(), U.cols());
  al.evaluate(U, &analytic, nullptr);

  MatrixX<Scalar> fd(U.rows(), U.cols());
  for (Index t = 0; t < U.rows(); ++t) {
    for (Index i = 0; i < U.cols(); ++i) {
      const Scalar saved = U(t, i);
      U(t, i) = saved + step;
      const Scalar fp = al.evaluate(U, nullptr, nullptr);
      U(t, i) = saved - step;
      const Scalar fm = al.evaluate(U, nullptr, nullptr);
      U(t, i) = saved;
      fd(t, i) = (fp - fm) / (Scalar(2) * step);
    }
  }
  const Scalar denom = std::max({analytic.cwiseAbs().maxCoeff(),
                                 fd.cwiseAbs().maxCoeff(), Scalar(1e-12)});
  return (analytic - fd).cwiseAbs().maxCoeff() / denom;
}

}  // namespace ergosafe

#endif  // ERGOSAFE_SOLVER_HPP

/*
 * Copyright 2026 The zigar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Core>

#include <vector>

namespace zigar
{

enum class SignConstraint
{
    none,
    nonnegative,
};

/// Penalty of the objective ||y - A b||^2 + lambda * sum_j w_j |b_j|.
/// No 1/n factor. An infinite weight pins the coefficient at zero; an empty
/// weight vector means all weights are one.
struct PenaltySpec
{
    double lambda = 0.0;
    Eigen::VectorXd weights;
    SignConstraint sign = SignConstraint::none;

    double weight(Eigen::Index j) const
    {
        return weights.size() == 0 ? 1.0 : weights[j];
    }
    void validate(Eigen::Index m) const;
};

struct SolverOptions
{
    /// Sweeps stop once the largest coefficient change falls below
    /// tol * max(1, max|b|) ...
    double tol = 1e-7;
    /// ... and the KKT residual (see kkt_residual) is below kkt_tol.
    double kkt_tol = 1e-6;
    int max_iter = 100000;
    bool certify = true;
};

struct SolverReport
{
    int sweeps = 0;
    double objective = 0.0;
    double kkt_residual = 0.0;
    bool objective_monotone = true;
};

struct LassoSolution
{
    Eigen::VectorXd beta;
    SolverReport report;
};

/// Minimizes ||y - A b||^2 + lambda * ||b_P||^2 where P is the set of
/// penalized columns (all columns when `penalized` is empty). Throws
/// RankDeficient when the regularized normal equations are singular.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                            double lambda,
                            const std::vector<bool>& penalized = {});

/// sign(z) * max(|z| - gamma, 0)
inline double soft_threshold(double z, double gamma)
{
    if (z > gamma)
    {
        return z - gamma;
    }
    if (z < -gamma)
    {
        return z + gamma;
    }
    return 0.0;
}

/// Cyclic coordinate descent in fixed ascending column order with an active
/// set. Throws ConvergenceFailure after opts.max_iter sweeps.
LassoSolution coord_descent(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                            const PenaltySpec& penalty,
                            const SolverOptions& opts = {},
                            const Eigen::VectorXd* warm_start = nullptr);

/// Solutions at each of `lambdas` (any order; penalty.lambda is ignored).
/// Follows the exact piecewise-linear path where it can and falls back to
/// warm-started coordinate descent otherwise or when a point fails the KKT
/// check.
std::vector<LassoSolution> lasso_path(const Eigen::MatrixXd& a,
                                      const Eigen::VectorXd& y,
                                      const PenaltySpec& penalty,
                                      const std::vector<double>& lambdas,
                                      const SolverOptions& opts = {});

double lasso_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                       const PenaltySpec& penalty, const Eigen::VectorXd& beta);

/// Largest violation of the optimality conditions at `beta`, with
/// g_j = 2 A_j'(y - A b):
///   b_j != 0:             |g_j - lambda w_j sign(b_j)| / max(1, lambda)
///   b_j == 0:             max(0, |g_j| - lambda w_j)
///   b_j == 0, b >= 0 mode: max(0, g_j - lambda w_j)
/// plus any negative coefficient in nonnegative mode. Each column's term is
/// reduced by the rounding bound 2 n eps |A_j| (|y| + |y - A b|), so badly
/// scaled columns are not held to a tolerance below machine precision.
double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                    const PenaltySpec& penalty, const Eigen::VectorXd& beta);

/// Smallest lambda at which every coefficient is zero:
/// 2 * max_j |A_j' y| / w_j.
double lambda_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& weights = {});

/// Thin SVD of a fixed design; solves the fully penalized ridge problem for
/// any lambda in O(n * rank).
class RidgePath
{
  public:
    explicit RidgePath(const Eigen::MatrixXd& a);

    /// Throws RankDeficient for lambda == 0 on a rank-deficient design.
    Eigen::VectorXd solve(const Eigen::VectorXd& y, double lambda) const;

    Eigen::Index rank() const { return rank_; }
    Eigen::Index cols() const { return cols_; }

  private:
    Eigen::MatrixXd u_;
    Eigen::VectorXd s_;
    Eigen::MatrixXd v_;
    Eigen::Index rank_ = 0;
    Eigen::Index cols_ = 0;
};

}  // namespace zigar

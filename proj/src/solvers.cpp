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

#include "zigar/solvers.hpp"

#include "zigar/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace zigar
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const Eigen::MatrixXd& a, const Eigen::VectorXd& y)
{
    if (a.rows() != y.size())
    {
        throw InvalidInput("design has " + std::to_string(a.rows()) +
                           " rows but outcome has " + std::to_string(y.size()));
    }
}

Eigen::VectorXd residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& beta)
{
    Eigen::VectorXd r = y;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
    {
        if (beta[j] != 0.0)
        {
            r.noalias() -= beta[j] * a.col(j);
        }
    }
    return r;
}

double penalty_value(const PenaltySpec& penalty, const Eigen::VectorXd& beta)
{
    double sum = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
    {
        if (beta[j] != 0.0)
        {
            sum += penalty.weight(j) * std::abs(beta[j]);
        }
    }
    return penalty.lambda * sum;
}

double kkt_from_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& r, const PenaltySpec& penalty,
                         const Eigen::VectorXd& beta)
{
    const bool nonneg = penalty.sign == SignConstraint::nonnegative;
    const double scale = std::max(1.0, penalty.lambda);
    // Rounding bound on a computed gradient entry, per unit of column norm.
    const double noise = 2.0 * static_cast<double>(a.rows()) *
                         std::numeric_limits<double>::epsilon() *
                         (y.norm() + r.norm());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
    {
        const double w = penalty.weight(j);
        if (std::isinf(w))
        {
            worst = std::max(worst, std::abs(beta[j]));
            continue;
        }
        const double g = 2.0 * a.col(j).dot(r);
        const double bound = penalty.lambda * w;
        double violation = 0.0;
        if (beta[j] != 0.0)
        {
            if (nonneg && beta[j] < 0.0)
            {
                violation = kInf;
            }
            else
            {
                const double s = beta[j] > 0.0 ? 1.0 : -1.0;
                violation = std::abs(g - bound * s) / scale;
            }
        }
        else
        {
            violation = std::max(0.0, (nonneg ? g : std::abs(g)) - bound);
        }
        worst = std::max(worst, violation - noise * a.col(j).norm());
    }
    return worst;
}

}  // namespace

void PenaltySpec::validate(Eigen::Index m) const
{
    if (!(lambda >= 0.0) || std::isinf(lambda))
    {
        throw InvalidInput("penalty lambda must be finite and nonnegative");
    }
    if (weights.size() != 0)
    {
        if (weights.size() != m)
        {
            throw InvalidInput("penalty weights length does not match design");
        }
        for (Eigen::Index j = 0; j < m; ++j)
        {
            if (!(weights[j] >= 0.0))
            {
                throw InvalidInput("penalty weights must be nonnegative");
            }
        }
    }
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                            double lambda, const std::vector<bool>& penalized)
{
    check_shapes(a, y);
    if (!(lambda >= 0.0))
    {
        throw InvalidInput("ridge lambda must be nonnegative");
    }
    const auto m = a.cols();
    if (!penalized.empty() && static_cast<Eigen::Index>(penalized.size()) != m)
    {
        throw InvalidInput("ridge penalty mask length does not match design");
    }
    Eigen::MatrixXd gram = a.transpose() * a;
    bool any_unpenalized = lambda == 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
    {
        const bool pen = penalized.empty() || penalized[static_cast<std::size_t>(j)];
        if (pen)
        {
            gram(j, j) += lambda;
        }
        else
        {
            any_unpenalized = true;
        }
    }
    const Eigen::VectorXd rhs = a.transpose() * y;
    if (any_unpenalized)
    {
        // The unpenalized block must be identifiable on its own.
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
        qr.setThreshold(1e-12);
        if (qr.rank() < m)
        {
            throw RankDeficient("ridge system is singular (rank " +
                                std::to_string(qr.rank()) + " < " +
                                std::to_string(m) + ")");
        }
        return qr.solve(rhs);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
    {
        throw RankDeficient("ridge normal equations are not positive definite");
    }
    return llt.solve(rhs);
}

double lasso_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                       const PenaltySpec& penalty, const Eigen::VectorXd& beta)
{
    return residual(a, y, beta).squaredNorm() + penalty_value(penalty, beta);
}

double kkt_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                    const PenaltySpec& penalty, const Eigen::VectorXd& beta)
{
    check_shapes(a, y);
    return kkt_from_residual(a, y, residual(a, y, beta), penalty, beta);
}

double lambda_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& weights)
{
    check_shapes(a, y);
    double best = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
    {
        const double w = weights.size() == 0 ? 1.0 : weights[j];
        if (std::isinf(w))
        {
            continue;
        }
        const double g = 2.0 * std::abs(a.col(j).dot(y));
        if (w == 0.0)
        {
            if (g > 0.0)
            {
                return kInf;
            }
            continue;
        }
        best = std::max(best, g / w);
    }
    return best;
}

// Full sweeps between attempts at an exact active-set solve.
constexpr long kPolishEvery = 8;
// Slow active-set phases are cut short by the same solve.
constexpr long kActivePolishEvery = 64;

namespace
{

// Exact piecewise-linear lasso path (LARS with the lasso modification) on
// the rescaled columns A_j / w_j. Tracks the solution from lambda_max down
// and records it at each requested lambda. Returns false when the path can
// no longer be followed exactly (singular active set, too many steps); the
// caller then finishes the remaining targets with coordinate descent.
class Homotopy
{
  public:
    Homotopy(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
             const PenaltySpec& penalty)
        : y_(y), nonneg_(penalty.sign == SignConstraint::nonnegative),
          n_(a.rows()), m_(a.cols())
    {
        w_ = Eigen::VectorXd::Constant(m_, kInf);
        scaled_ = Eigen::MatrixXd::Zero(n_, m_);
        for (Eigen::Index j = 0; j < m_; ++j)
        {
            const double w = penalty.weight(j);
            if (std::isinf(w) || a.col(j).squaredNorm() == 0.0)
            {
                continue;
            }
            w_[j] = w;
            scaled_.col(j) = a.col(j) / w;
            eligible_.push_back(j);
        }
        gamma_ = Eigen::VectorXd::Zero(m_);
        in_active_.assign(static_cast<std::size_t>(m_), false);
        chol_ = Eigen::MatrixXd::Zero(std::min(n_, m_) + 1,
                                      std::min(n_, m_) + 1);
        r_ = y_;
        c_ = 2.0 * (scaled_.transpose() * r_);
        lambda_ = 0.0;
        for (auto j : eligible_)
        {
            lambda_ = std::max(lambda_, nonneg_ ? c_[j] : std::abs(c_[j]));
        }
    }

    static bool applicable(const PenaltySpec& penalty, Eigen::Index m)
    {
        for (Eigen::Index j = 0; j < m; ++j)
        {
            if (penalty.weight(j) == 0.0)
            {
                return false;
            }
        }
        return true;
    }

    double lambda() const { return lambda_; }

    Eigen::VectorXd beta() const
    {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m_);
        for (auto j : active_)
        {
            b[j] = gamma_[j] / w_[j];
        }
        return b;
    }

    // Follows the path down to `target`; false if it had to give up.
    bool advance_to(double target)
    {
        const long max_steps = 20 * (m_ + n_) + 1000;
        while (lambda_ > target)
        {
            if (++steps_ > max_steps)
            {
                return false;
            }
            if (active_.empty())
            {
                if (!add_leader(target))
                {
                    // Nothing can enter: the zero vector is optimal.
                    lambda_ = target;
                    return true;
                }
                continue;
            }
            if (!step(target))
            {
                return false;
            }
        }
        return true;
    }

  private:
    bool add_leader(double target)
    {
        Eigen::Index best = -1;
        double top = 0.0;
        for (auto j : eligible_)
        {
            const double v = nonneg_ ? c_[j] : std::abs(c_[j]);
            if (v > top)
            {
                top = v;
                best = j;
            }
        }
        if (best < 0 || top <= target)
        {
            return false;
        }
        lambda_ = std::min(lambda_, top);
        return add(best, c_[best] >= 0.0 ? 1.0 : -1.0);
    }

    bool add(Eigen::Index j, double sign)
    {
        const auto k = static_cast<Eigen::Index>(active_.size());
        if (k + 1 >= chol_.rows())
        {
            return false;
        }
        const double self = scaled_.col(j).squaredNorm();
        Eigen::VectorXd g(k);
        for (Eigen::Index i = 0; i < k; ++i)
        {
            g[i] = scaled_.col(active_[i]).dot(scaled_.col(j));
        }
        if (k > 0)
        {
            chol_.topLeftCorner(k, k)
                .triangularView<Eigen::Lower>()
                .solveInPlace(g);
        }
        const double d2 = self - g.squaredNorm();
        if (!(d2 > 1e-10 * self))
        {
            return false;
        }
        chol_.row(k).head(k) = g.transpose();
        chol_(k, k) = std::sqrt(d2);
        active_.push_back(j);
        sign_.push_back(sign);
        in_active_[j] = true;
        gamma_[j] = 0.0;
        last_added_ = j;
        return true;
    }

    void remove(std::size_t pos)
    {
        const auto k = static_cast<Eigen::Index>(active_.size());
        const auto p = static_cast<Eigen::Index>(pos);
        // Drop row p, then rotate columns to restore lower-triangular form.
        for (Eigen::Index r = p; r + 1 < k; ++r)
        {
            chol_.row(r).head(k) = chol_.row(r + 1).head(k);
        }
        for (Eigen::Index c = p; c + 1 < k; ++c)
        {
            const double x = chol_(c, c);
            const double z = chol_(c, c + 1);
            const double h = std::hypot(x, z);
            const double cs = x / h;
            const double sn = z / h;
            for (Eigen::Index r = c; r + 1 < k; ++r)
            {
                const double u = chol_(r, c);
                const double v = chol_(r, c + 1);
                chol_(r, c) = cs * u + sn * v;
                chol_(r, c + 1) = -sn * u + cs * v;
            }
        }
        chol_.row(k - 1).setZero();
        chol_.col(k - 1).setZero();
        const auto j = active_[pos];
        in_active_[j] = false;
        gamma_[j] = 0.0;
        active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(pos));
        sign_.erase(sign_.begin() + static_cast<std::ptrdiff_t>(pos));
        last_dropped_ = j;
    }

    bool step(double target)
    {
        const auto k = static_cast<Eigen::Index>(active_.size());
        Eigen::VectorXd d(k);
        for (Eigen::Index i = 0; i < k; ++i)
        {
            d[i] = sign_[i];
        }
        const auto l = chol_.topLeftCorner(k, k).triangularView<Eigen::Lower>();
        l.solveInPlace(d);
        l.transpose().solveInPlace(d);

        Eigen::VectorXd u = Eigen::VectorXd::Zero(n_);
        for (Eigen::Index i = 0; i < k; ++i)
        {
            u.noalias() += d[i] * scaled_.col(active_[i]);
        }
        const Eigen::VectorXd au = scaled_.transpose() * u;

        // Moving lambda down by delta moves gamma_A by delta/2 * d and every
        // correlation c_j by -delta * au_j; active correlations track
        // sign * (lambda - delta).
        double delta = lambda_ - target;
        enum class Event
        {
            target,
            add,
            drop
        } event = Event::target;
        Eigen::Index who = -1;
        double who_sign = 1.0;
        for (auto j : eligible_)
        {
            if (in_active_[j] || j == last_dropped_)
            {
                continue;
            }
            const double up = 1.0 - au[j];
            if (up > 1e-12)
            {
                const double t = (lambda_ - c_[j]) / up;
                if (t >= 0.0 && t < delta)
                {
                    delta = t;
                    event = Event::add;
                    who = j;
                    who_sign = 1.0;
                }
            }
            const double down = 1.0 + au[j];
            if (!nonneg_ && down > 1e-12)
            {
                const double t = (lambda_ + c_[j]) / down;
                if (t >= 0.0 && t < delta)
                {
                    delta = t;
                    event = Event::add;
                    who = j;
                    who_sign = -1.0;
                }
            }
        }
        std::size_t drop_pos = 0;
        for (Eigen::Index i = 0; i < k; ++i)
        {
            const auto j = active_[i];
            if (j == last_added_ || d[i] == 0.0)
            {
                continue;
            }
            const double t = -2.0 * gamma_[j] / d[i];
            if (t > 0.0 && t < delta)
            {
                delta = t;
                event = Event::drop;
                drop_pos = static_cast<std::size_t>(i);
            }
        }

        for (Eigen::Index i = 0; i < k; ++i)
        {
            gamma_[active_[i]] += 0.5 * delta * d[i];
        }
        lambda_ = event == Event::target ? target : lambda_ - delta;
        last_added_ = -1;
        last_dropped_ = -1;
        bool ok = true;
        if (event == Event::drop)
        {
            remove(drop_pos);
        }
        else if (event == Event::add)
        {
            ok = add(who, who_sign);
        }
        refresh();
        return ok;
    }

    void refresh()
    {
        r_ = y_;
        for (auto j : active_)
        {
            r_.noalias() -= gamma_[j] * scaled_.col(j);
        }
        c_.noalias() = 2.0 * (scaled_.transpose() * r_);
    }

    Eigen::VectorXd y_;
    bool nonneg_;
    Eigen::Index n_;
    Eigen::Index m_;
    Eigen::VectorXd w_;
    Eigen::MatrixXd scaled_;
    std::vector<Eigen::Index> eligible_;
    std::vector<Eigen::Index> active_;
    std::vector<double> sign_;
    std::vector<bool> in_active_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd gamma_;
    Eigen::VectorXd r_;
    Eigen::VectorXd c_;
    double lambda_;
    long steps_ = 0;
    Eigen::Index last_added_ = -1;
    Eigen::Index last_dropped_ = -1;
};


// Exact solution at penalty.lambda by following the path from the top, or
// nothing when the path cannot be followed.
std::optional<Eigen::VectorXd> homotopy_solution(const Eigen::MatrixXd& a,
                                                 const Eigen::VectorXd& y,
                                                 const PenaltySpec& penalty)
{
    if (!(penalty.lambda > 0.0) || !Homotopy::applicable(penalty, a.cols()))
    {
        return std::nullopt;
    }
    Homotopy path(a, y, penalty);
    if (!path.advance_to(penalty.lambda))
    {
        return std::nullopt;
    }
    return path.beta();
}

}  // namespace

LassoSolution coord_descent(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                            const PenaltySpec& penalty,
                            const SolverOptions& opts,
                            const Eigen::VectorXd* warm_start)
{
    check_shapes(a, y);
    const auto m = a.cols();
    penalty.validate(m);
    if (!(opts.tol > 0.0) || opts.max_iter < 1)
    {
        throw InvalidInput("solver options need tol > 0 and max_iter >= 1");
    }
    const bool nonneg = penalty.sign == SignConstraint::nonnegative;

    Eigen::VectorXd col_sq(m);
    std::vector<double> half_pen(static_cast<std::size_t>(m));
    std::vector<bool> frozen(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j)
    {
        col_sq[j] = a.col(j).squaredNorm();
        const double w = penalty.weight(j);
        frozen[j] = std::isinf(w) || col_sq[j] == 0.0;
        half_pen[j] = 0.5 * penalty.lambda * w;
    }

    LassoSolution sol;
    sol.beta = Eigen::VectorXd::Zero(m);

    // Null model certified up to dot-product rounding: return it exactly.
    {
        const double eps = std::numeric_limits<double>::epsilon();
        const double floor = 2.0 * static_cast<double>(a.rows()) * eps * y.norm();
        bool null_ok = true;
        for (Eigen::Index j = 0; j < m && null_ok; ++j)
        {
            if (frozen[j])
            {
                continue;
            }
            const double g = 2.0 * a.col(j).dot(y);
            const double push = nonneg ? g : std::abs(g);
            null_ok = push - 2.0 * half_pen[j] <= floor * std::sqrt(col_sq[j]);
        }
        if (null_ok)
        {
            sol.report.objective = y.squaredNorm();
            sol.report.kkt_residual = kkt_from_residual(a, y, y, penalty, sol.beta);
            return sol;
        }
    }

    if (warm_start != nullptr)
    {
        if (warm_start->size() != m)
        {
            throw InvalidInput("warm start length does not match design");
        }
        for (Eigen::Index j = 0; j < m; ++j)
        {
            double b = (*warm_start)[j];
            if (frozen[j] || (nonneg && b < 0.0))
            {
                b = 0.0;
            }
            sol.beta[j] = b;
        }
    }
    Eigen::VectorXd& beta = sol.beta;
    Eigen::VectorXd r = residual(a, y, beta);
    if (m == 0)
    {
        sol.report.objective = r.squaredNorm();
        return sol;
    }

    auto update = [&](Eigen::Index j) -> double
    {
        const double old = beta[j];
        const double g = a.col(j).dot(r) + col_sq[j] * old;
        const double next =
            nonneg ? std::max(0.0, g - half_pen[j]) / col_sq[j]
                   : soft_threshold(g, half_pen[j]) / col_sq[j];
        const double delta = next - old;
        if (delta != 0.0)
        {
            beta[j] = next;
            r.noalias() -= delta * a.col(j);
        }
        return std::abs(delta);
    };

    auto converged = [&](double max_change)
    {
        const double scale = std::max(1.0, beta.cwiseAbs().maxCoeff());
        return max_change <= opts.tol * scale;
    };

    auto& report = sol.report;
    double last_objective = r.squaredNorm() + penalty_value(penalty, beta);
    auto track_objective = [&]()
    {
        const double obj = r.squaredNorm() + penalty_value(penalty, beta);
        if (obj > last_objective + 1e-12 * std::max(1.0, std::abs(last_objective)))
        {
            report.objective_monotone = false;
        }
        last_objective = obj;
    };

    // Active-set refinement on the current support and sign pattern. On that
    // orthant face the objective is the quadratic b'Gb - 2c'b: step toward
    // its minimizer nearest the iterate (or down the null space of G when c
    // leaves its range), stopping where the first coefficient reaches zero.
    // Such a coefficient leaves the support and the step repeats. The
    // objective decreases along every step. Returns the KKT residual.
    auto polish = [&]() -> double
    {
        for (Eigen::Index round = 0; round <= m; ++round)
        {
            std::vector<Eigen::Index> support;
            for (Eigen::Index j = 0; j < m; ++j)
            {
                if (beta[j] != 0.0 && !frozen[j])
                {
                    support.push_back(j);
                }
            }
            const auto k = static_cast<Eigen::Index>(support.size());
            if (k == 0)
            {
                break;
            }
            Eigen::MatrixXd as(a.rows(), k);
            Eigen::VectorXd c(k);
            Eigen::VectorXd b0(k);
            for (Eigen::Index i = 0; i < k; ++i)
            {
                const auto j = support[static_cast<std::size_t>(i)];
                as.col(i) = a.col(j);
                b0[i] = beta[j];
                c[i] = a.col(j).dot(y) - half_pen[j] * (beta[j] > 0.0 ? 1.0 : -1.0);
            }
            const Eigen::MatrixXd gram = as.transpose() * as;
            Eigen::VectorXd dir;
            bool bounded = true;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-10)
            {
                dir = ldlt.solve(c) - b0;
            }
            else
            {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
                if (eig.info() != Eigen::Success)
                {
                    break;
                }
                const auto& ev = eig.eigenvalues();
                const auto& vecs = eig.eigenvectors();
                const double cutoff =
                    1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300) * static_cast<double>(k);
                Eigen::VectorXd target = Eigen::VectorXd::Zero(k);
                Eigen::VectorXd null_c = Eigen::VectorXd::Zero(k);
                Eigen::VectorXd null_b = Eigen::VectorXd::Zero(k);
                for (Eigen::Index i = 0; i < k; ++i)
                {
                    const auto v = vecs.col(i);
                    if (ev[i] > cutoff)
                    {
                        target += v * (v.dot(c) / ev[i]);
                    }
                    else
                    {
                        null_c += v * v.dot(c);
                        null_b += v * v.dot(b0);
                    }
                }
                bounded = null_c.norm() <= 1e-10 * std::max(c.norm(), 1e-300);
                dir = bounded ? Eigen::VectorXd(target + null_b - b0) : null_c;
            }
            if (!dir.allFinite())
            {
                break;
            }
            double t = bounded ? 1.0 : kInf;
            Eigen::Index hit = -1;
            for (Eigen::Index i = 0; i < k; ++i)
            {
                if (b0[i] * dir[i] < 0.0)
                {
                    const double ti = -b0[i] / dir[i];
                    if (ti < t)
                    {
                        t = ti;
                        hit = i;
                    }
                }
            }
            if (!std::isfinite(t))
            {
                break;
            }
            Eigen::VectorXd cand = beta;
            for (Eigen::Index i = 0; i < k; ++i)
            {
                double v = i == hit ? 0.0 : b0[i] + t * dir[i];
                if (v * b0[i] <= 0.0)
                {
                    v = 0.0;
                }
                cand[support[static_cast<std::size_t>(i)]] = v;
            }
            const Eigen::VectorXd rc = residual(a, y, cand);
            const double obj_old = residual(a, y, beta).squaredNorm() + penalty_value(penalty, beta);
            const double obj_new = rc.squaredNorm() + penalty_value(penalty, cand);
            if (!(obj_new <= obj_old))
            {
                break;
            }
            beta = cand;
            last_objective = obj_new;
            if (hit < 0)
            {
                break;
            }
        }
        r = residual(a, y, beta);
        return kkt_from_residual(a, y, r, penalty, beta);
    };

    // The exact path solution is tried once; polish covers the rest.
    bool path_tried = false;
    auto finish = [&]() -> double
    {
        if (!path_tried)
        {
            path_tried = true;
            if (auto exact = homotopy_solution(a, y, penalty))
            {
                Eigen::VectorXd rr = residual(a, y, *exact);
                const double k = kkt_from_residual(a, y, rr, penalty, *exact);
                if (k <= opts.kkt_tol)
                {
                    beta = std::move(*exact);
                    r = std::move(rr);
                    last_objective = r.squaredNorm() + penalty_value(penalty, beta);
                    return k;
                }
            }
        }
        return polish();
    };

    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(m));
    double kkt = kInf;
    long full_sweeps = 0;
    while (true)
    {
        // Full sweep.
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < m; ++j)
        {
            if (!frozen[j])
            {
                max_change = std::max(max_change, update(j));
            }
        }
        ++report.sweeps;
        ++full_sweeps;
        track_objective();

        if (converged(max_change))
        {
            if (!opts.certify)
            {
                break;
            }
            r = residual(a, y, beta);
            kkt = kkt_from_residual(a, y, r, penalty, beta);
            if (kkt <= opts.kkt_tol)
            {
                break;
            }
            kkt = finish();
            if (kkt <= opts.kkt_tol)
            {
                break;
            }
        }
        else if (opts.certify && full_sweeps % kPolishEvery == 0)
        {
            kkt = finish();
            if (kkt <= opts.kkt_tol)
            {
                break;
            }
        }
        if (report.sweeps >= opts.max_iter)
        {
            r = residual(a, y, beta);
            kkt = kkt_from_residual(a, y, r, penalty, beta);
            throw ConvergenceFailure(
                "coordinate descent did not converge in " +
                    std::to_string(opts.max_iter) + " sweeps",
                beta, kkt);
        }

        // Iterate on the active set until it settles.
        active.clear();
        for (Eigen::Index j = 0; j < m; ++j)
        {
            if (beta[j] != 0.0)
            {
                active.push_back(j);
            }
        }
        long active_sweeps = 0;
        while (!active.empty() && report.sweeps < opts.max_iter)
        {
            double change = 0.0;
            for (auto j : active)
            {
                change = std::max(change, update(j));
            }
            ++report.sweeps;
            track_objective();
            if (converged(change))
            {
                break;
            }
            if (opts.certify && ++active_sweeps % kActivePolishEvery == 0)
            {
                finish();
                break;
            }
        }
    }

    r = residual(a, y, beta);
    report.objective = r.squaredNorm() + penalty_value(penalty, beta);
    report.kkt_residual =
        std::isinf(kkt) ? kkt_from_residual(a, y, r, penalty, beta) : kkt;
    return sol;
}

std::vector<LassoSolution> lasso_path(const Eigen::MatrixXd& a,
                                      const Eigen::VectorXd& y,
                                      const PenaltySpec& penalty,
                                      const std::vector<double>& lambdas,
                                      const SolverOptions& opts)
{
    check_shapes(a, y);
    penalty.validate(a.cols());
    std::vector<std::size_t> order(lambdas.size());
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        if (!(lambdas[i] >= 0.0) || std::isinf(lambdas[i]))
        {
            throw InvalidInput("path lambdas must be finite and >= 0");
        }
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) {
        return lambdas[l] > lambdas[r];
    });

    std::vector<LassoSolution> out(lambdas.size());
    std::optional<Homotopy> path;
    if (Homotopy::applicable(penalty, a.cols()))
    {
        path.emplace(a, y, penalty);
    }
    Eigen::VectorXd warm;
    for (auto idx : order)
    {
        PenaltySpec at = penalty;
        at.lambda = lambdas[idx];
        // lambda = 0 has no unique solution once columns outnumber rows.
        if (path && at.lambda > 0.0 && path->advance_to(at.lambda))
        {
            LassoSolution sol;
            sol.beta = path->beta();
            const Eigen::VectorXd r = residual(a, y, sol.beta);
            sol.report.objective = r.squaredNorm() + penalty_value(at, sol.beta);
            sol.report.kkt_residual = kkt_from_residual(a, y, r, at, sol.beta);
            if (!opts.certify || sol.report.kkt_residual <= opts.kkt_tol)
            {
                warm = sol.beta;
                out[idx] = std::move(sol);
                continue;
            }
        }
        path.reset();
        out[idx] = coord_descent(a, y, at, opts,
                                 warm.size() == 0 ? nullptr : &warm);
        warm = out[idx].beta;
    }
    return out;
}

RidgePath::RidgePath(const Eigen::MatrixXd& a) : cols_(a.cols())
{
    if (a.rows() == 0 || a.cols() == 0)
    {
        return;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? s[0] * 1e-12 *
                                             static_cast<double>(std::max(a.rows(), a.cols()))
                                       : 0.0;
    Eigen::Index r = 0;
    while (r < s.size() && s[r] > cutoff)
    {
        ++r;
    }
    rank_ = r;
    u_ = svd.matrixU().leftCols(r);
    s_ = s.head(r);
    v_ = svd.matrixV().leftCols(r);
}

Eigen::VectorXd RidgePath::solve(const Eigen::VectorXd& y, double lambda) const
{
    if (!(lambda >= 0.0))
    {
        throw InvalidInput("ridge lambda must be nonnegative");
    }
    if (lambda == 0.0 && rank_ < cols_)
    {
        throw RankDeficient("ridge with lambda = 0 needs full column rank (rank " +
                            std::to_string(rank_) + " < " +
                            std::to_string(cols_) + ")");
    }
    if (rank_ == 0)
    {
        return Eigen::VectorXd::Zero(cols_);
    }
    if (u_.rows() != y.size())
    {
        throw InvalidInput("ridge path: outcome length mismatch");
    }
    Eigen::VectorXd coef = u_.transpose() * y;
    coef.array() *= s_.array() / (s_.array().square() + lambda);
    return v_ * coef;
}

}  // namespace zigar

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


// Reference computations that share no code with the library: dense normal
// equations, exhaustive grids and direct recounts.

#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace zt
{

/// (A'A + lambda I)^-1 A'y by full-pivot LU.
inline Eigen::VectorXd normal_equations_ridge(const Eigen::MatrixXd& a,
                                              const Eigen::VectorXd& y,
                                              double lambda)
{
    Eigen::MatrixXd lhs = a.transpose() * a;
    lhs.diagonal().array() += lambda;
    return lhs.fullPivLu().solve(a.transpose() * y);
}

/// Least squares with an intercept column prepended; intercept first.
inline Eigen::VectorXd normal_equations_ols(const Eigen::MatrixXd& x,
                                            const Eigen::VectorXd& y)
{
    Eigen::MatrixXd a(x.rows(), x.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x;
    return normal_equations_ridge(a, y, 0.0);
}

/// ||y - A b||^2 + lambda * sum w_j |b_j|, written out term by term.
inline double penalized_objective(const Eigen::MatrixXd& a,
                                  const Eigen::VectorXd& y, double lambda,
                                  const Eigen::VectorXd& w,
                                  const Eigen::VectorXd& b)
{
    double rss = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
    {
        double fit = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j)
        {
            fit += a(i, j) * b[j];
        }
        rss += (y[i] - fit) * (y[i] - fit);
    }
    double pen = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j)
    {
        pen += (w.size() == 0 ? 1.0 : w[j]) * std::abs(b[j]);
    }
    return rss + lambda * pen;
}

struct GridMinimum
{
    Eigen::VectorXd point;
    double value = std::numeric_limits<double>::infinity();
};

/// Exhaustive search over a box grid with `points` values per axis for an
/// objective with one to three coefficients. `refine` further rounds zoom in
/// on the best point with a 41-point grid spanning +-2 previous steps.
inline GridMinimum grid_minimum(const Eigen::MatrixXd& a,
                                const Eigen::VectorXd& y, double lambda,
                                const Eigen::VectorXd& w,
                                const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, int points,
                                int refine = 0)
{
    const auto m = static_cast<int>(a.cols());
    if (m < 1 || m > 3)
    {
        throw std::invalid_argument("grid_minimum supports 1 to 3 coefficients");
    }
    double gram[3][3] = {};
    double ay[3] = {};
    double pw[3] = {};
    for (int j = 0; j < m; ++j)
    {
        ay[j] = a.col(j).dot(y);
        pw[j] = lambda * (w.size() == 0 ? 1.0 : w[j]);
        for (int k = 0; k < m; ++k)
        {
            gram[j][k] = a.col(j).dot(a.col(k));
        }
    }
    const double yy = y.squaredNorm();

    GridMinimum best;
    best.point = Eigen::VectorXd::Zero(m);
    double low[3] = {0, 0, 0};
    double high[3] = {0, 0, 0};
    for (int j = 0; j < m; ++j)
    {
        low[j] = lo[j];
        high[j] = hi[j];
    }
    int per_axis = points;
    for (int level = 0; level <= refine; ++level)
    {
        double step[3] = {0, 0, 0};
        int count[3] = {1, 1, 1};
        for (int j = 0; j < m; ++j)
        {
            step[j] = (high[j] - low[j]) / (per_axis - 1);
            count[j] = per_axis;
        }
        double b[3] = {0, 0, 0};
        for (int i0 = 0; i0 < count[0]; ++i0)
        {
            b[0] = low[0] + step[0] * i0;
            for (int i1 = 0; i1 < count[1]; ++i1)
            {
                b[1] = low[1] + step[1] * i1;
                for (int i2 = 0; i2 < count[2]; ++i2)
                {
                    b[2] = low[2] + step[2] * i2;
                    double v = yy;
                    for (int j = 0; j < m; ++j)
                    {
                        double gb = 0.0;
                        for (int k = 0; k < m; ++k)
                        {
                            gb += gram[j][k] * b[k];
                        }
                        v += b[j] * gb - 2.0 * b[j] * ay[j] + pw[j] * std::abs(b[j]);
                    }
                    if (v < best.value)
                    {
                        best.value = v;
                        for (int j = 0; j < m; ++j)
                        {
                            best.point[j] = b[j];
                        }
                    }
                }
            }
        }
        for (int j = 0; j < m; ++j)
        {
            low[j] = std::max(lo[j], best.point[j] - 2.0 * step[j]);
            high[j] = std::min(hi[j], best.point[j] + 2.0 * step[j]);
        }
        per_axis = 41;
    }
    return best;
}

/// Sample correlation matrix of the columns of m.
inline Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& m)
{
    const Eigen::RowVectorXd mean = m.colwise().mean();
    const Eigen::MatrixXd c = m.rowwise() - mean;
    Eigen::MatrixXd cov = c.transpose() * c;
    const Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    for (Eigen::Index i = 0; i < cov.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < cov.cols(); ++j)
        {
            cov(i, j) /= sd[i] * sd[j];
        }
    }
    return cov;
}

/// Sample sd (n - 1 denominator) of the listed values.
inline double sample_sd(const std::vector<double>& v)
{
    double mean = 0.0;
    for (double x : v)
    {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
    {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace zt

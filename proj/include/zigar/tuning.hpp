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

#include "zigar/estimators.hpp"
#include "zigar/preprocess.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zigar
{

/// Repeated k-fold partition of n rows. Each repeat is a seeded shuffle dealt
/// round-robin into k folds, so fold sizes differ by at most one.
struct CvPlan
{
    int k = 10;
    int repeats = 10;
    std::uint64_t master_seed = 0;
    std::vector<std::vector<int>> fold_of;  // [repeat][row]

    static CvPlan make(Eigen::Index n, int k, int repeats, std::uint64_t seed);

    Eigen::Index rows() const
    {
        return fold_of.empty() ? 0
                               : static_cast<Eigen::Index>(fold_of[0].size());
    }
    std::vector<int> train_rows(int repeat, int fold) const;
    std::vector<int> test_rows(int repeat, int fold) const;
};

/// Raw analysis data: intensities, outcome and optional demographic
/// covariates. Transforms and offsets are always estimated from whichever
/// rows a fit is trained on.
struct Dataset
{
    IntensityMatrix z;
    Eigen::VectorXd y;
    Eigen::MatrixXd covariates;  // zero columns when there are none
    std::vector<std::string> covariate_names;

    Eigen::Index rows() const { return y.size(); }
    bool has_covariates() const { return covariates.cols() > 0; }
    Dataset subset(std::span<const int> rows) const;
};

struct PipelineOptions
{
    TransformOptions transform;
    SolverOptions solver;
    std::vector<std::string> true_set;  // oracle methods only
    int threads = 1;
};

/// Transform + offset model + centered design for the given training rows.
FitContext make_context(const Dataset& train, const PipelineOptions& options);

/// Applies the training transform and offset model of `ctx` to new rows.
struct HeldOut
{
    ComponentBundle bundle;
    Eigen::VectorXd offset;
    Eigen::VectorXd y;
};
HeldOut prepare_held_out(const FitContext& ctx, const Dataset& test);

FittedModel fit_pipeline(Method method, const Dataset& train,
                         const Penalties& penalties,
                         const PipelineOptions& options);

enum class GridKind
{
    ridge,
    lasso,
    garrote,
};

struct GridOptions
{
    double lasso_min_ratio = 1e-4;
    double ridge_low_ratio = 1e-4;
    double ridge_high_ratio = 1e4;
};

/// Descending, log-spaced grid anchored at
/// lambda_max = 2 max_j |A_j'(y - mean(y))| / w_j.
/// lasso and garrote: [min_ratio, 1] * lambda_max;
/// ridge: [ridge_low_ratio, ridge_high_ratio] * lambda_max.
std::vector<double> lambda_grid(const Eigen::MatrixXd& a,
                                const Eigen::VectorXd& y, int size,
                                GridKind kind,
                                const Eigen::VectorXd& weights = {},
                                const GridOptions& options = {});

/// Same, from an already computed lambda_max.
std::vector<double> lambda_grid_from_max(double lambda_max, int size,
                                         GridKind kind,
                                         const GridOptions& options = {});

/// Called with every model trained inside a fold (repeat, fold, model).
using CvObserver = std::function<void(int, int, const FittedModel&)>;

struct CvResult
{
    double mean_rmspe = 0.0;
    std::vector<double> fold_rmspe;  // repeat-major; NaN when skipped
    int skipped_folds = 0;
};

/// Mean held-out RMSPE over all repeats and folds at fixed penalties. Folds
/// whose training outcome is constant are skipped and counted.
CvResult cv_rmspe(Method method, const Dataset& data,
                  const Penalties& penalties, const CvPlan& plan,
                  const PipelineOptions& options, const CvObserver& observer = {});

struct TwoStageGrid
{
    std::vector<double> lambda1;
    /// One descending lambda2 sequence per lambda1 value.
    std::vector<std::vector<double>> lambda2;
};

struct TuningResult
{
    Method method = Method::ridge;
    std::vector<double> lambda1;
    std::vector<std::vector<double>> lambda2;  // empty for one-stage methods
    /// lambda1.size() x max(1, lambda2 row length); NaN when every fold of
    /// a point was skipped.
    Eigen::MatrixXd mean_cv_rmspe;
    Penalties chosen;
    int chosen_row = 0;
    int chosen_col = 0;
    int ties = 0;  // grid points sharing the minimum, besides the chosen one
    int skipped_folds = 0;

    std::string to_csv() const;
    std::string to_json() const;
};

std::vector<double> default_one_stage_grid(Method method, const FitContext& full,
                                           int size,
                                           const std::vector<std::string>& true_set = {},
                                           const GridOptions& options = {});
TwoStageGrid default_two_stage_grid(Method method, const FitContext& full,
                                    int size, const GridOptions& options = {});

/// Minimizes mean CV RMSPE over a one-dimensional grid; ties go to the
/// larger lambda.
TuningResult tune_one_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            std::vector<double> grid);
TuningResult tune_one_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            int grid_size = 50);

/// Minimizes mean CV RMSPE over (lambda1, lambda2) pairs. Within a fold the
/// stage-one fit for each lambda1 is computed once and reused for the whole
/// lambda2 sequence. Ties go to the larger lambda1, then the larger lambda2.
TuningResult tune_two_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            TwoStageGrid grid);
TuningResult tune_two_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            int grid_size = 50);

/// Any method: oracle-ols has nothing to tune and returns lambda = 0.
TuningResult tune(Method method, const Dataset& data, const CvPlan& plan,
                  const PipelineOptions& options, int grid_size);

double rmspe(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);

}  // namespace zigar

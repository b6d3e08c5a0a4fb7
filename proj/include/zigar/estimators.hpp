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

#include "zigar/preprocess.hpp"
#include "zigar/solvers.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace zigar
{

enum class Method
{
    oracle_ols,
    oracle_ridge,
    ridge,
    lasso,
    lasso_ridge,
    ridge_lasso,
    ridge_garrote,
};

const char* to_string(Method method);
Method method_from_string(const std::string& name);
bool is_two_stage(Method method);
bool is_oracle(Method method);
/// Methods whose retained predictors count as included rather than selected.
bool is_non_selecting(Method method);

enum class Component
{
    U,
    D,
    X,
};

const char* to_string(Component component);

/// The component columns a method reports coefficients for.
std::vector<Component> reported_components(Method method);

struct CoefEntry
{
    int predictor = 0;  // index into FittedModel::transform->column_ids
    Component component = Component::U;
    double value = 0.0;
};

struct Penalties
{
    double lambda1 = 0.0;
    std::optional<double> lambda2;
};

/// Immutable once built; safe to share across threads.
struct FittedModel
{
    Method method = Method::ridge;
    double intercept = 0.0;
    std::vector<CoefEntry> coef;
    std::optional<Eigen::VectorXd> garrote_c;
    Penalties penalties;
    std::shared_ptr<const TransformStats> transform;
    std::optional<OffsetModel> offset_model;

    /// Set when a two-stage fit fell back to the intercept-only model.
    bool intercept_only = false;
    /// Predictors excluded from a weighted second stage (infinite weight).
    std::vector<std::string> excluded;

    std::optional<double> coefficient(const std::string& predictor,
                                      Component component) const;
    const std::string& predictor_id(int index) const
    {
        return transform->column_ids.at(static_cast<std::size_t>(index));
    }
};

/// Centered views of one training bundle, shared by every fit on it. Column
/// means and the outcome mean give back the intercept after a centered fit,
/// so the intercept is never penalized.
class FitContext
{
  public:
    FitContext(ComponentBundle bundle, Eigen::VectorXd y,
               Eigen::VectorXd offset = {}, SolverOptions solver = {});

    const ComponentBundle& bundle() const { return bundle_; }
    Eigen::Index n() const { return bundle_.rows(); }
    Eigen::Index q() const { return bundle_.predictors(); }

    /// y - offset, centered.
    const Eigen::VectorXd& y_centered() const { return yc_; }
    double y_mean() const { return y_mean_; }
    const Eigen::VectorXd& offset() const { return offset_; }

    const Eigen::MatrixXd& ud() const { return ud_; }
    const Eigen::RowVectorXd& ud_means() const { return ud_means_; }
    const Eigen::MatrixXd& x() const { return x_; }
    const Eigen::RowVectorXd& x_means() const { return x_means_; }
    const Eigen::MatrixXd& xd() const { return xd_; }
    const Eigen::RowVectorXd& xd_means() const { return xd_means_; }

    /// SVD of the centered [U | D] block, computed on first use.
    const RidgePath& ud_path() const;

    const SolverOptions& solver() const { return solver_; }

    std::optional<OffsetModel> offset_model;

  private:
    ComponentBundle bundle_;
    Eigen::VectorXd yc_;
    double y_mean_ = 0.0;
    Eigen::VectorXd offset_;
    Eigen::MatrixXd ud_, x_, xd_;
    Eigen::RowVectorXd ud_means_, x_means_, xd_means_;
    SolverOptions solver_;
    mutable std::shared_ptr<const RidgePath> ud_path_;
};

/// Ridge on [U | D] with one common lambda, or lasso on X.
FittedModel fit_one_stage(Method method, const FitContext& ctx, double lambda);

/// Lasso on X along a descending lambda sequence; each fit warm-starts from
/// the previous one.
class LassoFitter
{
  public:
    explicit LassoFitter(const FitContext& ctx);
    FittedModel fit(double lambda);
    /// One model per lambda, in the order given, from a single path.
    std::vector<FittedModel> fit_path(const std::vector<double>& lambdas);

  private:
    FittedModel model_from(const Eigen::VectorXd& beta, double lambda) const;

    const FitContext* ctx_;
    Eigen::VectorXd warm_;
};

/// Stage one: lasso on X. Stage two: ridge on the U and D columns of the
/// lasso-selected predictors.
class LassoRidgeStage
{
  public:
    LassoRidgeStage(const FitContext& ctx, double lambda1);
    /// Reuses a stage-one lasso solution computed elsewhere.
    LassoRidgeStage(const FitContext& ctx, double lambda1,
                    Eigen::VectorXd stage1_beta);
    FittedModel fit(double lambda2) const;
    const std::vector<int>& selected() const { return selected_; }
    const Eigen::VectorXd& stage1_beta() const { return beta_x_; }
    /// Null threshold of the second stage for grid construction.
    double lambda2_max() const;

  private:
    const FitContext* ctx_;
    double lambda1_;
    Eigen::VectorXd beta_x_;
    std::vector<int> selected_;
    Eigen::MatrixXd design_;
    std::optional<RidgePath> path_;
};

/// Stage one: ridge on [U | D]. Stage two: lasso on [X | D] where both
/// columns of predictor j carry the weight 1 / (|b_Uj| + |b_Dj|).
class RidgeLassoStage
{
  public:
    RidgeLassoStage(const FitContext& ctx, double lambda1);
    /// Successive calls warm-start from the previous solution.
    FittedModel fit(double lambda2);
    std::vector<FittedModel> fit_path(const std::vector<double>& lambdas);
    const Eigen::VectorXd& weights() const { return weights_; }
    double lambda2_max() const;

  private:
    FittedModel model_from(const LassoSolution& sol, double lambda2) const;

    const FitContext* ctx_;
    double lambda1_;
    Eigen::VectorXd weights_;  // length 2q, X block then D block
    Eigen::VectorXd warm_;
};

/// Stage one: ridge on [U | D]. Stage two: nonnegative garrote, i.e. a
/// nonnegative lasso on v_j = U_j b_Uj + D_j b_Dj, one factor per predictor.
class RidgeGarroteStage
{
  public:
    RidgeGarroteStage(const FitContext& ctx, double lambda1);
    FittedModel fit(double lambda2);
    std::vector<FittedModel> fit_path(const std::vector<double>& lambdas);
    const Eigen::MatrixXd& garrote_design() const { return v_; }
    const Eigen::VectorXd& stage1_beta() const { return beta_ud_; }
    double lambda2_max() const;

  private:
    FittedModel model_from(const LassoSolution& sol, double lambda2) const;

    const FitContext* ctx_;
    double lambda1_;
    Eigen::VectorXd beta_ud_;
    Eigen::MatrixXd v_;
    Eigen::VectorXd warm_;
};

FittedModel fit_lasso_ridge(const FitContext& ctx, double lambda1,
                            double lambda2);
FittedModel fit_ridge_lasso(const FitContext& ctx, double lambda1,
                            double lambda2);
FittedModel fit_ridge_garrote(const FitContext& ctx, double lambda1,
                              double lambda2);

/// Least squares (kind == oracle_ols, lambda ignored) or ridge on the U and
/// D columns of the true predictors only. Component columns without
/// variation are absorbed by the intercept and get a zero coefficient.
FittedModel fit_oracle(Method kind, const FitContext& ctx,
                       const std::vector<std::string>& true_set,
                       double lambda = 0.0);

/// Oracle fits along a lambda sequence on one context; the design of true
/// predictor columns and its decomposition are built once.
class OracleFitter
{
  public:
    OracleFitter(Method kind, const FitContext& ctx,
                 const std::vector<std::string>& true_set);
    FittedModel fit(double lambda) const;

  private:
    Method kind_;
    const FitContext* ctx_;
    std::vector<int> predictors_;
    std::vector<Eigen::Index> columns_;
    Eigen::MatrixXd design_;
    std::optional<RidgePath> path_;
};

/// Dispatches on method; `true_set` is only used by the oracles.
FittedModel fit_method(Method method, const FitContext& ctx,
                       const Penalties& penalties,
                       const std::vector<std::string>& true_set = {});

/// Convenience entry points on a bundle and raw outcome.
FittedModel fit_one_stage(Method method, const ComponentBundle& bundle,
                          const Eigen::VectorXd& y, double lambda,
                          const Eigen::VectorXd& offset = {});
FittedModel fit_lasso_ridge(const ComponentBundle& bundle,
                            const Eigen::VectorXd& y, double lambda1,
                            double lambda2, const Eigen::VectorXd& offset = {});
FittedModel fit_ridge_lasso(const ComponentBundle& bundle,
                            const Eigen::VectorXd& y, double lambda1,
                            double lambda2, const Eigen::VectorXd& offset = {});
FittedModel fit_ridge_garrote(const ComponentBundle& bundle,
                              const Eigen::VectorXd& y, double lambda1,
                              double lambda2,
                              const Eigen::VectorXd& offset = {});

/// yhat = intercept + offset + sum of coefficients times component columns.
/// The bundle must carry the model's own training transform.
Eigen::VectorXd predict(const FittedModel& model, const ComponentBundle& bundle,
                        const Eigen::VectorXd& offset = {});
Eigen::VectorXd predict(const FittedModel& model, const LogIntensities& logs,
                        const Eigen::VectorXd& offset = {});
/// Raw intensities; offsets come from the stored offset model, which then
/// requires `covariates`.
Eigen::VectorXd predict(const FittedModel& model, const IntensityMatrix& z,
                        const Eigen::MatrixXd* covariates = nullptr);

/// Predictors with any nonzero stored component coefficient.
std::vector<std::string> selected_set(const FittedModel& model);

/// Coefficient export: '#'-prefixed header rows (method, intercept,
/// penalties), then predictor_id,component,coefficient rows.
std::string coefficients_csv(const FittedModel& model);

}  // namespace zigar

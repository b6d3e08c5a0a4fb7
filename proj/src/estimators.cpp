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

#include "zigar/estimators.hpp"

#include "zigar/error.hpp"
#include "zigar/io.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace zigar
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::RowVectorXd center_columns(Eigen::MatrixXd& m)
{
    Eigen::RowVectorXd means = m.rows() > 0
                                   ? Eigen::RowVectorXd(m.colwise().mean())
                                   : Eigen::RowVectorXd::Zero(m.cols());
    m.rowwise() -= means;
    return means;
}

FittedModel base_model(Method method, const FitContext& ctx)
{
    FittedModel model;
    model.method = method;
    model.transform = ctx.bundle().transform;
    model.offset_model = ctx.offset_model;
    model.intercept = ctx.y_mean();
    return model;
}

// Stores U and D coefficients for predictors 0..q-1 from a stacked vector.
void put_ud(FittedModel& model, const Eigen::VectorXd& beta,
            const FitContext& ctx)
{
    const auto q = ctx.q();
    for (Eigen::Index j = 0; j < q; ++j)
    {
        model.coef.push_back({static_cast<int>(j), Component::U, beta[j]});
        model.coef.push_back({static_cast<int>(j), Component::D, beta[q + j]});
    }
    model.intercept = ctx.y_mean() - ctx.ud_means().dot(beta);
}

}  // namespace

const char* to_string(Method method)
{
    switch (method)
    {
    case Method::oracle_ols:
        return "oracle-ols";
    case Method::oracle_ridge:
        return "oracle-ridge";
    case Method::ridge:
        return "ridge";
    case Method::lasso:
        return "lasso";
    case Method::lasso_ridge:
        return "lasso-ridge";
    case Method::ridge_lasso:
        return "ridge-lasso";
    case Method::ridge_garrote:
        return "ridge-garrote";
    }
    return "?";
}

Method method_from_string(const std::string& name)
{
    for (auto m : {Method::oracle_ols, Method::oracle_ridge, Method::ridge,
                   Method::lasso, Method::lasso_ridge, Method::ridge_lasso,
                   Method::ridge_garrote})
    {
        if (name == to_string(m))
        {
            return m;
        }
    }
    throw ConfigError("unknown method '" + name + "'");
}

bool is_two_stage(Method method)
{
    return method == Method::lasso_ridge || method == Method::ridge_lasso ||
           method == Method::ridge_garrote;
}

bool is_oracle(Method method)
{
    return method == Method::oracle_ols || method == Method::oracle_ridge;
}

bool is_non_selecting(Method method)
{
    return is_oracle(method) || method == Method::ridge;
}

const char* to_string(Component component)
{
    switch (component)
    {
    case Component::U:
        return "U";
    case Component::D:
        return "D";
    case Component::X:
        return "X";
    }
    return "?";
}

std::vector<Component> reported_components(Method method)
{
    switch (method)
    {
    case Method::lasso:
        return {Component::X};
    case Method::ridge_lasso:
        return {Component::X, Component::D};
    default:
        return {Component::U, Component::D};
    }
}

std::optional<double> FittedModel::coefficient(const std::string& predictor,
                                               Component component) const
{
    for (const auto& e : coef)
    {
        if (e.component == component && predictor_id(e.predictor) == predictor)
        {
            return e.value;
        }
    }
    return std::nullopt;
}

FitContext::FitContext(ComponentBundle bundle, Eigen::VectorXd y,
                       Eigen::VectorXd offset, SolverOptions solver)
    : bundle_(std::move(bundle)), solver_(solver)
{
    const auto n = bundle_.rows();
    if (y.size() != n)
    {
        throw InvalidInput("outcome length " + std::to_string(y.size()) +
                           " does not match " + std::to_string(n) + " rows");
    }
    if (n < 2)
    {
        throw InvalidInput("need at least two training rows");
    }
    offset_ = offset.size() == 0 ? Eigen::VectorXd::Zero(n) : std::move(offset);
    if (offset_.size() != n)
    {
        throw InvalidInput("offset length does not match rows");
    }
    yc_ = y - offset_;
    y_mean_ = yc_.mean();
    yc_.array() -= y_mean_;

    const auto q = bundle_.predictors();
    ud_.resize(n, 2 * q);
    ud_.leftCols(q) = bundle_.U;
    ud_.rightCols(q) = bundle_.D;
    ud_means_ = center_columns(ud_);

    x_ = bundle_.X;
    x_means_ = center_columns(x_);

    xd_.resize(n, 2 * q);
    xd_.leftCols(q) = x_;
    xd_.rightCols(q) = ud_.rightCols(q);
    xd_means_.resize(2 * q);
    xd_means_.head(q) = x_means_;
    xd_means_.tail(q) = ud_means_.tail(q);
}

const RidgePath& FitContext::ud_path() const
{
    if (!ud_path_)
    {
        ud_path_ = std::make_shared<const RidgePath>(ud_);
    }
    return *ud_path_;
}

FittedModel fit_one_stage(Method method, const FitContext& ctx, double lambda)
{
    auto model = base_model(method, ctx);
    model.penalties.lambda1 = lambda;
    if (method == Method::ridge)
    {
        put_ud(model, ctx.ud_path().solve(ctx.y_centered(), lambda), ctx);
        return model;
    }
    if (method != Method::lasso)
    {
        throw InvalidInput(std::string("fit_one_stage: not a one-stage method: ") +
                           to_string(method));
    }
    return LassoFitter(ctx).fit(lambda);
}

LassoFitter::LassoFitter(const FitContext& ctx)
    : ctx_(&ctx), warm_(Eigen::VectorXd::Zero(ctx.q()))
{
}

FittedModel LassoFitter::fit(double lambda)
{
    const auto& ctx = *ctx_;
    PenaltySpec pen{lambda, {}, SignConstraint::none};
    const auto sol =
        coord_descent(ctx.x(), ctx.y_centered(), pen, ctx.solver(), &warm_);
    warm_ = sol.beta;
    return model_from(sol.beta, lambda);
}

std::vector<FittedModel> LassoFitter::fit_path(
    const std::vector<double>& lambdas)
{
    const auto& ctx = *ctx_;
    const auto sols = lasso_path(ctx.x(), ctx.y_centered(),
                                 {0.0, {}, SignConstraint::none}, lambdas,
                                 ctx.solver());
    std::vector<FittedModel> out;
    out.reserve(sols.size());
    for (std::size_t i = 0; i < sols.size(); ++i)
    {
        out.push_back(model_from(sols[i].beta, lambdas[i]));
    }
    return out;
}

FittedModel LassoFitter::model_from(const Eigen::VectorXd& beta,
                                    double lambda) const
{
    const auto& ctx = *ctx_;
    auto model = base_model(Method::lasso, ctx);
    model.penalties.lambda1 = lambda;
    for (Eigen::Index j = 0; j < ctx.q(); ++j)
    {
        model.coef.push_back({static_cast<int>(j), Component::X, beta[j]});
    }
    model.intercept = ctx.y_mean() - ctx.x_means().dot(beta);
    return model;
}

LassoRidgeStage::LassoRidgeStage(const FitContext& ctx, double lambda1)
    : LassoRidgeStage(
          ctx, lambda1,
          coord_descent(ctx.x(), ctx.y_centered(),
                        {lambda1, {}, SignConstraint::none}, ctx.solver())
              .beta)
{
}

LassoRidgeStage::LassoRidgeStage(const FitContext& ctx, double lambda1,
                                 Eigen::VectorXd stage1_beta)
    : ctx_(&ctx), lambda1_(lambda1), beta_x_(std::move(stage1_beta))
{
    if (beta_x_.size() != ctx.q())
    {
        throw InvalidInput("stage-one coefficients do not match predictors");
    }
    for (Eigen::Index j = 0; j < beta_x_.size(); ++j)
    {
        if (beta_x_[j] != 0.0)
        {
            selected_.push_back(static_cast<int>(j));
        }
    }
    if (selected_.empty())
    {
        return;
    }
    const auto s = static_cast<Eigen::Index>(selected_.size());
    design_.resize(ctx.n(), 2 * s);
    for (Eigen::Index k = 0; k < s; ++k)
    {
        design_.col(k) = ctx.ud().col(selected_[k]);
        design_.col(s + k) = ctx.ud().col(ctx.q() + selected_[k]);
    }
    path_.emplace(design_);
}

double LassoRidgeStage::lambda2_max() const
{
    return lambda_max(ctx_->ud(), ctx_->y_centered());
}

FittedModel LassoRidgeStage::fit(double lambda2) const
{
    const auto& ctx = *ctx_;
    auto model = base_model(Method::lasso_ridge, ctx);
    model.penalties = {lambda1_, lambda2};
    Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * ctx.q());
    if (selected_.empty())
    {
        model.intercept_only = true;
    }
    else
    {
        const auto b = path_->solve(ctx.y_centered(), lambda2);
        const auto s = static_cast<Eigen::Index>(selected_.size());
        for (Eigen::Index k = 0; k < s; ++k)
        {
            full[selected_[k]] = b[k];
            full[ctx.q() + selected_[k]] = b[s + k];
        }
    }
    put_ud(model, full, ctx);
    return model;
}

RidgeLassoStage::RidgeLassoStage(const FitContext& ctx, double lambda1)
    : ctx_(&ctx), lambda1_(lambda1)
{
    const auto q = ctx.q();
    const auto beta = ctx.ud_path().solve(ctx.y_centered(), lambda1);
    weights_.resize(2 * q);
    for (Eigen::Index j = 0; j < q; ++j)
    {
        const double total = std::abs(beta[j]) + std::abs(beta[q + j]);
        const double w = total > 0.0 ? 1.0 / total : kInf;
        weights_[j] = w;
        weights_[q + j] = w;
    }
    warm_ = Eigen::VectorXd::Zero(2 * q);
}

double RidgeLassoStage::lambda2_max() const
{
    return lambda_max(ctx_->xd(), ctx_->y_centered(), weights_);
}

FittedModel RidgeLassoStage::fit(double lambda2)
{
    const auto& ctx = *ctx_;
    PenaltySpec pen{lambda2, weights_, SignConstraint::none};
    const auto sol =
        coord_descent(ctx.xd(), ctx.y_centered(), pen, ctx.solver(), &warm_);
    warm_ = sol.beta;
    return model_from(sol, lambda2);
}

std::vector<FittedModel> RidgeLassoStage::fit_path(
    const std::vector<double>& lambdas)
{
    const auto& ctx = *ctx_;
    const auto sols = lasso_path(ctx.xd(), ctx.y_centered(),
                                 {0.0, weights_, SignConstraint::none},
                                 lambdas, ctx.solver());
    std::vector<FittedModel> out;
    out.reserve(sols.size());
    for (std::size_t i = 0; i < sols.size(); ++i)
    {
        out.push_back(model_from(sols[i], lambdas[i]));
    }
    return out;
}

FittedModel RidgeLassoStage::model_from(const LassoSolution& sol,
                                        double lambda2) const
{
    const auto& ctx = *ctx_;
    const auto q = ctx.q();
    auto model = base_model(Method::ridge_lasso, ctx);
    model.penalties = {lambda1_, lambda2};
    bool any = false;
    for (Eigen::Index j = 0; j < q; ++j)
    {
        model.coef.push_back({static_cast<int>(j), Component::X, sol.beta[j]});
        model.coef.push_back(
            {static_cast<int>(j), Component::D, sol.beta[q + j]});
        any = any || sol.beta[j] != 0.0 || sol.beta[q + j] != 0.0;
        if (std::isinf(weights_[j]))
        {
            model.excluded.push_back(model.predictor_id(static_cast<int>(j)));
        }
    }
    model.intercept = ctx.y_mean() - ctx.xd_means().dot(sol.beta);
    model.intercept_only = !any;
    return model;
}

RidgeGarroteStage::RidgeGarroteStage(const FitContext& ctx, double lambda1)
    : ctx_(&ctx), lambda1_(lambda1)
{
    const auto q = ctx.q();
    beta_ud_ = ctx.ud_path().solve(ctx.y_centered(), lambda1);
    v_.resize(ctx.n(), q);
    for (Eigen::Index j = 0; j < q; ++j)
    {
        v_.col(j) = ctx.ud().col(j) * beta_ud_[j] +
                    ctx.ud().col(q + j) * beta_ud_[q + j];
    }
    warm_ = Eigen::VectorXd::Zero(q);
}

double RidgeGarroteStage::lambda2_max() const
{
    return lambda_max(v_, ctx_->y_centered());
}

FittedModel RidgeGarroteStage::fit(double lambda2)
{
    PenaltySpec pen{lambda2, {}, SignConstraint::nonnegative};
    const auto sol =
        coord_descent(v_, ctx_->y_centered(), pen, ctx_->solver(), &warm_);
    warm_ = sol.beta;
    return model_from(sol, lambda2);
}

std::vector<FittedModel> RidgeGarroteStage::fit_path(
    const std::vector<double>& lambdas)
{
    const auto sols =
        lasso_path(v_, ctx_->y_centered(),
                   {0.0, {}, SignConstraint::nonnegative}, lambdas,
                   ctx_->solver());
    std::vector<FittedModel> out;
    out.reserve(sols.size());
    for (std::size_t i = 0; i < sols.size(); ++i)
    {
        out.push_back(model_from(sols[i], lambdas[i]));
    }
    return out;
}

FittedModel RidgeGarroteStage::model_from(const LassoSolution& sol,
                                          double lambda2) const
{
    const auto& ctx = *ctx_;
    const auto q = ctx.q();
    auto model = base_model(Method::ridge_garrote, ctx);
    model.penalties = {lambda1_, lambda2};
    Eigen::VectorXd full(2 * q);
    for (Eigen::Index j = 0; j < q; ++j)
    {
        full[j] = sol.beta[j] * beta_ud_[j];
        full[q + j] = sol.beta[j] * beta_ud_[q + j];
    }
    put_ud(model, full, ctx);
    model.garrote_c = sol.beta;
    model.intercept_only = (sol.beta.array() == 0.0).all();
    return model;
}

FittedModel fit_lasso_ridge(const FitContext& ctx, double lambda1,
                            double lambda2)
{
    return LassoRidgeStage(ctx, lambda1).fit(lambda2);
}

FittedModel fit_ridge_lasso(const FitContext& ctx, double lambda1,
                            double lambda2)
{
    RidgeLassoStage stage(ctx, lambda1);
    return stage.fit(lambda2);
}

FittedModel fit_ridge_garrote(const FitContext& ctx, double lambda1,
                              double lambda2)
{
    RidgeGarroteStage stage(ctx, lambda1);
    return stage.fit(lambda2);
}

OracleFitter::OracleFitter(Method kind, const FitContext& ctx,
                           const std::vector<std::string>& true_set)
    : kind_(kind), ctx_(&ctx)
{
    if (!is_oracle(kind))
    {
        throw InvalidInput("oracle fit: kind must be oracle-ols or oracle-ridge");
    }
    const auto& ids = ctx.bundle().column_ids();
    std::unordered_map<std::string, int> index;
    for (std::size_t j = 0; j < ids.size(); ++j)
    {
        index.emplace(ids[j], static_cast<int>(j));
    }
    for (const auto& id : true_set)
    {
        if (auto it = index.find(id); it != index.end())
        {
            predictors_.push_back(it->second);
        }
    }
    // U then D of each true predictor; constant columns carry nothing beyond
    // the intercept.
    const auto q = ctx.q();
    for (int j : predictors_)
    {
        for (Eigen::Index c : {static_cast<Eigen::Index>(j), q + j})
        {
            if (ctx.ud().col(c).squaredNorm() > 0.0)
            {
                columns_.push_back(c);
            }
        }
    }
    const auto m = static_cast<Eigen::Index>(columns_.size());
    if (kind == Method::oracle_ols && m + 1 > ctx.n())
    {
        throw RankDeficient("oracle-ols needs " + std::to_string(m + 1) +
                            " rows but has " + std::to_string(ctx.n()) +
                            "; use oracle-ridge");
    }
    design_.resize(ctx.n(), m);
    for (Eigen::Index k = 0; k < m; ++k)
    {
        design_.col(k) = ctx.ud().col(columns_[k]);
    }
    if (kind == Method::oracle_ridge && m > 0)
    {
        path_.emplace(design_);
    }
}

FittedModel OracleFitter::fit(double lambda) const
{
    const auto& ctx = *ctx_;
    const auto m = static_cast<Eigen::Index>(columns_.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    if (m > 0)
    {
        try
        {
            b = path_ ? path_->solve(ctx.y_centered(), lambda)
                      : ridge_solve(design_, ctx.y_centered(), 0.0);
        }
        catch (const RankDeficient& e)
        {
            throw RankDeficient(std::string(e.what()) +
                                "; oracle-ols is not identifiable, use oracle-ridge");
        }
    }
    const auto q = ctx.q();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * q);
    for (Eigen::Index k = 0; k < m; ++k)
    {
        full[columns_[k]] = b[k];
    }
    auto model = base_model(kind_, ctx);
    model.penalties.lambda1 = kind_ == Method::oracle_ols ? 0.0 : lambda;
    for (int j : predictors_)
    {
        model.coef.push_back({j, Component::U, full[j]});
        model.coef.push_back({j, Component::D, full[q + j]});
    }
    model.intercept = ctx.y_mean() - ctx.ud_means().dot(full);
    return model;
}

FittedModel fit_oracle(Method kind, const FitContext& ctx,
                       const std::vector<std::string>& true_set, double lambda)
{
    return OracleFitter(kind, ctx, true_set).fit(lambda);
}

FittedModel fit_method(Method method, const FitContext& ctx,
                       const Penalties& penalties,
                       const std::vector<std::string>& true_set)
{
    auto need_lambda2 = [&]()
    {
        if (!penalties.lambda2)
        {
            throw InvalidInput(std::string(to_string(method)) +
                               " needs two penalties");
        }
        return *penalties.lambda2;
    };
    switch (method)
    {
    case Method::oracle_ols:
    case Method::oracle_ridge:
        return fit_oracle(method, ctx, true_set, penalties.lambda1);
    case Method::ridge:
    case Method::lasso:
        return fit_one_stage(method, ctx, penalties.lambda1);
    case Method::lasso_ridge:
        return fit_lasso_ridge(ctx, penalties.lambda1, need_lambda2());
    case Method::ridge_lasso:
        return fit_ridge_lasso(ctx, penalties.lambda1, need_lambda2());
    case Method::ridge_garrote:
        return fit_ridge_garrote(ctx, penalties.lambda1, need_lambda2());
    }
    throw InvalidInput("unknown method");
}

FittedModel fit_one_stage(Method method, const ComponentBundle& bundle,
                          const Eigen::VectorXd& y, double lambda,
                          const Eigen::VectorXd& offset)
{
    return fit_one_stage(method, FitContext(bundle, y, offset), lambda);
}

FittedModel fit_lasso_ridge(const ComponentBundle& bundle,
                            const Eigen::VectorXd& y, double lambda1,
                            double lambda2, const Eigen::VectorXd& offset)
{
    return fit_lasso_ridge(FitContext(bundle, y, offset), lambda1, lambda2);
}

FittedModel fit_ridge_lasso(const ComponentBundle& bundle,
                            const Eigen::VectorXd& y, double lambda1,
                            double lambda2, const Eigen::VectorXd& offset)
{
    return fit_ridge_lasso(FitContext(bundle, y, offset), lambda1, lambda2);
}

FittedModel fit_ridge_garrote(const ComponentBundle& bundle,
                              const Eigen::VectorXd& y, double lambda1,
                              double lambda2, const Eigen::VectorXd& offset)
{
    return fit_ridge_garrote(FitContext(bundle, y, offset), lambda1, lambda2);
}

namespace
{

Eigen::VectorXd base_prediction(const FittedModel& model, Eigen::Index n,
                                const Eigen::VectorXd& offset)
{
    if (offset.size() != 0 && offset.size() != n)
    {
        throw SchemaError("offset length does not match new data rows");
    }
    Eigen::VectorXd yhat = Eigen::VectorXd::Constant(n, model.intercept);
    if (offset.size() != 0)
    {
        yhat += offset;
    }
    return yhat;
}

}  // namespace

Eigen::VectorXd predict(const FittedModel& model, const ComponentBundle& bundle,
                        const Eigen::VectorXd& offset)
{
    if (bundle.transform != model.transform &&
        bundle.column_ids() != model.transform->column_ids)
    {
        throw SchemaError("bundle columns do not match the fitted model");
    }
    auto yhat = base_prediction(model, bundle.rows(), offset);
    for (const auto& e : model.coef)
    {
        if (e.value == 0.0)
        {
            continue;
        }
        const auto& m = e.component == Component::U   ? bundle.U
                        : e.component == Component::D ? bundle.D
                                                      : bundle.X;
        yhat.noalias() += e.value * m.col(e.predictor);
    }
    return yhat;
}

Eigen::VectorXd predict(const FittedModel& model, const LogIntensities& logs,
                        const Eigen::VectorXd& offset)
{
    const auto& stats = *model.transform;
    if (logs.base != stats.log_base)
    {
        throw SchemaError("log base of new data differs from the fitted model");
    }
    const auto cols = logs.locate(stats.column_ids);
    auto yhat = base_prediction(model, logs.rows(), offset);
    for (const auto& e : model.coef)
    {
        if (e.value == 0.0)
        {
            continue;
        }
        const auto src = logs.log_values.col(cols[e.predictor]);
        const double scale = stats.standardized ? stats.col_sd[e.predictor] : 1.0;
        const double fill = e.component == Component::U ? stats.u_fill[e.predictor]
                            : e.component == Component::X ? stats.x_fill
                                                          : 0.0;
        for (Eigen::Index i = 0; i < src.size(); ++i)
        {
            const double lv = src[i];
            double value;
            if (e.component == Component::D)
            {
                value = std::isnan(lv) ? 0.0 : 1.0;
            }
            else
            {
                value = (std::isnan(lv) ? fill : lv) / scale;
            }
            yhat[i] += e.value * value;
        }
    }
    return yhat;
}

Eigen::VectorXd predict(const FittedModel& model, const IntensityMatrix& z,
                        const Eigen::MatrixXd* covariates)
{
    Eigen::VectorXd offset;
    if (model.offset_model)
    {
        if (covariates == nullptr)
        {
            throw SchemaError("model has an offset model; covariates are required");
        }
        offset = model.offset_model->apply(*covariates);
    }
    if (z.cols() == 0 || model.transform->column_ids.empty())
    {
        return base_prediction(model, z.rows(), offset);
    }
    return predict(model, apply_transform(z, model.transform), offset);
}

std::vector<std::string> selected_set(const FittedModel& model)
{
    std::vector<bool> hit(model.transform->column_ids.size(), false);
    for (const auto& e : model.coef)
    {
        if (e.value != 0.0)
        {
            hit[static_cast<std::size_t>(e.predictor)] = true;
        }
    }
    std::vector<std::string> out;
    for (std::size_t j = 0; j < hit.size(); ++j)
    {
        if (hit[j])
        {
            out.push_back(model.transform->column_ids[j]);
        }
    }
    return out;
}

std::string coefficients_csv(const FittedModel& model)
{
    std::string out;
    out += "# method," + std::string(to_string(model.method)) + "\n";
    out += "# intercept," + io::format_double(model.intercept) + "\n";
    out += "# lambda1," + io::format_double(model.penalties.lambda1) + "\n";
    if (model.penalties.lambda2)
    {
        out += "# lambda2," + io::format_double(*model.penalties.lambda2) + "\n";
    }
    if (model.offset_model)
    {
        const auto& om = *model.offset_model;
        out += "# offset_intercept," + io::format_double(om.coefficients[0]) + "\n";
        for (std::size_t k = 0; k < om.covariate_names.size(); ++k)
        {
            out += "# offset_" + om.covariate_names[k] + "," +
                   io::format_double(om.coefficients[static_cast<Eigen::Index>(k) + 1]) +
                   "\n";
        }
    }
    out += "predictor_id,component,coefficient";
    if (model.garrote_c)
    {
        out += ",garrote_c";
    }
    out += "\n";
    for (const auto& e : model.coef)
    {
        out += io::quote_csv(model.predictor_id(e.predictor)) + "," +
               to_string(e.component) + "," + io::format_double(e.value);
        if (model.garrote_c)
        {
            out += "," + io::format_double((*model.garrote_c)[e.predictor]);
        }
        out += "\n";
    }
    return out;
}

}  // namespace zigar

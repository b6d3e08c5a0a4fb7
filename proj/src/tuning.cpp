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

#include "zigar/tuning.hpp"

#include "zigar/error.hpp"
#include "zigar/io.hpp"
#include "zigar/parallel.hpp"
#include "zigar/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace zigar
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool constant(const Eigen::VectorXd& v)
{
    return v.size() == 0 || (v.array() == v[0]).all();
}

// Grid in evaluation form: lambda1 values and, for two-stage methods, one
// lambda2 row per lambda1. One-stage methods use a single implicit column.
struct Grid
{
    std::vector<double> lambda1;
    std::vector<std::vector<double>> lambda2;

    std::size_t cols() const
    {
        std::size_t c = 1;
        for (const auto& row : lambda2)
        {
            c = std::max(c, row.size());
        }
        return c;
    }
};

// Indices of `values` ordered by decreasing value (stable).
std::vector<std::size_t> descending_order(const std::vector<double>& values)
{
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b)
                     { return values[a] > values[b]; });
    return idx;
}

using ModelSink = std::function<void(const FittedModel&)>;

// Held-out RMSPE for every grid point on one training fold; row-major with
// grid.cols() entries per lambda1 row.
std::vector<double> fold_scores(Method method, const FitContext& ctx,
                                const HeldOut& test, const Grid& grid,
                                const std::vector<std::string>& true_set,
                                const ModelSink& sink)
{
    const auto cols = grid.cols();
    std::vector<double> scores(grid.lambda1.size() * cols, kNaN);
    auto score = [&](const FittedModel& model)
    {
        if (sink)
        {
            sink(model);
        }
        return rmspe(test.y, predict(model, test.bundle, test.offset));
    };

    const auto order1 = descending_order(grid.lambda1);
    switch (method)
    {
    case Method::oracle_ols:
    case Method::oracle_ridge:
    {
        const OracleFitter fitter(method, ctx, true_set);
        for (auto i : order1)
        {
            scores[i * cols] = score(fitter.fit(grid.lambda1[i]));
        }
        break;
    }
    case Method::ridge:
        for (auto i : order1)
        {
            scores[i * cols] = score(fit_one_stage(method, ctx, grid.lambda1[i]));
        }
        break;
    case Method::lasso:
    {
        const auto models = LassoFitter(ctx).fit_path(grid.lambda1);
        for (auto i : order1)
        {
            scores[i * cols] = score(models[i]);
        }
        break;
    }
    case Method::lasso_ridge:
    {
        // One stage-one path serves every lambda1.
        const auto stage1 =
            lasso_path(ctx.x(), ctx.y_centered(),
                       {0.0, {}, SignConstraint::none}, grid.lambda1,
                       ctx.solver());
        for (auto i : order1)
        {
            const LassoRidgeStage stage(ctx, grid.lambda1[i], stage1[i].beta);
            const auto& row = grid.lambda2.at(i);
            for (auto k : descending_order(row))
            {
                scores[i * cols + k] = score(stage.fit(row[k]));
            }
        }
        break;
    }
    case Method::ridge_lasso:
    case Method::ridge_garrote:
        for (auto i : order1)
        {
            const auto& row = grid.lambda2.at(i);
            const auto models =
                method == Method::ridge_lasso
                    ? RidgeLassoStage(ctx, grid.lambda1[i]).fit_path(row)
                    : RidgeGarroteStage(ctx, grid.lambda1[i]).fit_path(row);
            for (auto k : descending_order(row))
            {
                scores[i * cols + k] = score(models[k]);
            }
        }
        break;
    }
    return scores;
}

struct GridEvaluation
{
    Eigen::MatrixXd mean;
    int skipped = 0;
};

GridEvaluation evaluate_grid(Method method, const Dataset& data,
                             const CvPlan& plan, const PipelineOptions& options,
                             const Grid& grid, const CvObserver& observer)
{
    if (plan.rows() != data.rows())
    {
        throw InvalidInput("CV plan was made for a different number of rows");
    }
    const auto tasks = static_cast<std::size_t>(plan.repeats * plan.k);
    std::vector<std::vector<double>> per_task(tasks);
    parallel_for(tasks, options.threads, [&](std::size_t t)
    {
        const int r = static_cast<int>(t) / plan.k;
        const int f = static_cast<int>(t) % plan.k;
        const auto train_rows = plan.train_rows(r, f);
        const auto test_rows = plan.test_rows(r, f);
        if (test_rows.empty())
        {
            return;
        }
        const auto train = data.subset(train_rows);
        if (constant(train.y))
        {
            return;
        }
        const auto ctx = make_context(train, options);
        const auto test = prepare_held_out(ctx, data.subset(test_rows));
        ModelSink sink;
        if (observer)
        {
            sink = [&](const FittedModel& m) { observer(r, f, m); };
        }
        per_task[t] = fold_scores(method, ctx, test, grid, options.true_set, sink);
    });

    GridEvaluation out;
    const auto rows = grid.lambda1.size();
    const auto cols = grid.cols();
    out.mean = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(rows),
                                         static_cast<Eigen::Index>(cols), kNaN);
    std::vector<double> sum(rows * cols, 0.0);
    std::vector<int> count(rows * cols, 0);
    for (const auto& scores : per_task)
    {
        if (scores.empty())
        {
            ++out.skipped;
            continue;
        }
        for (std::size_t p = 0; p < scores.size(); ++p)
        {
            if (!std::isnan(scores[p]))
            {
                sum[p] += scores[p];
                ++count[p];
            }
        }
    }
    if (out.skipped == static_cast<int>(tasks))
    {
        throw InvalidInput("every cross-validation fold was skipped "
                           "(constant outcome)");
    }
    for (std::size_t p = 0; p < sum.size(); ++p)
    {
        if (count[p] > 0)
        {
            out.mean(static_cast<Eigen::Index>(p / cols),
                     static_cast<Eigen::Index>(p % cols)) = sum[p] / count[p];
        }
    }
    return out;
}

TuningResult choose(Method method, const Grid& grid, GridEvaluation eval)
{
    TuningResult result;
    result.method = method;
    result.lambda1 = grid.lambda1;
    result.lambda2 = grid.lambda2;
    result.skipped_folds = eval.skipped;
    result.mean_cv_rmspe = std::move(eval.mean);
    const bool two = !grid.lambda2.empty();

    double best = std::numeric_limits<double>::infinity();
    int bi = -1;
    int bk = -1;
    auto l2 = [&](int i, int k) { return two ? grid.lambda2[i][k] : 0.0; };
    for (int i = 0; i < static_cast<int>(grid.lambda1.size()); ++i)
    {
        const int cols = two ? static_cast<int>(grid.lambda2[i].size()) : 1;
        for (int k = 0; k < cols; ++k)
        {
            const double v = result.mean_cv_rmspe(i, k);
            if (std::isnan(v))
            {
                continue;
            }
            const bool better =
                bi < 0 || v < best ||
                (v == best && (grid.lambda1[i] > grid.lambda1[bi] ||
                               (grid.lambda1[i] == grid.lambda1[bi] &&
                                l2(i, k) > l2(bi, bk))));
            if (better)
            {
                best = v;
                bi = i;
                bk = k;
            }
        }
    }
    if (bi < 0)
    {
        throw InvalidInput("no grid point could be evaluated");
    }
    result.ties = static_cast<int>((result.mean_cv_rmspe.array() == best).count()) - 1;
    result.chosen_row = bi;
    result.chosen_col = bk;
    result.chosen.lambda1 = grid.lambda1[bi];
    if (two)
    {
        result.chosen.lambda2 = grid.lambda2[bi][bk];
    }
    return result;
}

}  // namespace

double rmspe(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat)
{
    if (y.size() != yhat.size() || y.size() == 0)
    {
        throw InvalidInput("rmspe: length mismatch or empty input");
    }
    return std::sqrt((y - yhat).squaredNorm() / static_cast<double>(y.size()));
}

CvPlan CvPlan::make(Eigen::Index n, int k, int repeats, std::uint64_t seed)
{
    if (k < 2 || repeats < 1)
    {
        throw ConfigError("cross-validation needs k >= 2 folds and >= 1 repeat");
    }
    if (n < k)
    {
        throw InvalidInput("cross-validation needs at least k rows");
    }
    CvPlan plan;
    plan.k = k;
    plan.repeats = repeats;
    plan.master_seed = seed;
    for (int r = 0; r < repeats; ++r)
    {
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        Rng rng(derive_seed(seed, {stream::folds, static_cast<std::uint64_t>(r)}));
        // Fisher-Yates with an explicit draw so the shuffle does not depend
        // on the standard library's distribution implementation.
        for (std::size_t i = perm.size(); i > 1; --i)
        {
            const auto j = static_cast<std::size_t>(rng() % i);
            std::swap(perm[i - 1], perm[j]);
        }
        std::vector<int> fold(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < perm.size(); ++i)
        {
            fold[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
        plan.fold_of.push_back(std::move(fold));
    }
    return plan;
}

std::vector<int> CvPlan::train_rows(int repeat, int fold) const
{
    std::vector<int> rows;
    const auto& f = fold_of.at(static_cast<std::size_t>(repeat));
    for (std::size_t i = 0; i < f.size(); ++i)
    {
        if (f[i] != fold)
        {
            rows.push_back(static_cast<int>(i));
        }
    }
    return rows;
}

std::vector<int> CvPlan::test_rows(int repeat, int fold) const
{
    std::vector<int> rows;
    const auto& f = fold_of.at(static_cast<std::size_t>(repeat));
    for (std::size_t i = 0; i < f.size(); ++i)
    {
        if (f[i] == fold)
        {
            rows.push_back(static_cast<int>(i));
        }
    }
    return rows;
}

Dataset Dataset::subset(std::span<const int> rows) const
{
    Dataset out;
    out.z = z.select_rows(rows);
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    out.covariates.resize(static_cast<Eigen::Index>(rows.size()), covariates.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        const auto e = static_cast<Eigen::Index>(i);
        out.y[e] = y[rows[i]];
        if (covariates.cols() > 0)
        {
            out.covariates.row(e) = covariates.row(rows[i]);
        }
    }
    out.covariate_names = covariate_names;
    return out;
}

FitContext make_context(const Dataset& train, const PipelineOptions& options)
{
    if (train.z.rows() != train.rows())
    {
        throw InvalidInput("intensity rows do not match outcome length");
    }
    auto bundle = prepare_components(train.z, options.transform);
    Eigen::VectorXd offset;
    std::optional<OffsetModel> offset_model;
    if (train.has_covariates())
    {
        auto fit = residual_offset(train.covariates, train.y, train.covariate_names);
        offset = std::move(fit.offsets);
        offset_model = std::move(fit.model);
    }
    FitContext ctx(std::move(bundle), train.y, std::move(offset), options.solver);
    ctx.offset_model = std::move(offset_model);
    return ctx;
}

HeldOut prepare_held_out(const FitContext& ctx, const Dataset& test)
{
    HeldOut out;
    out.y = test.y;
    const auto& stats = ctx.bundle().transform;
    if (stats->column_ids.empty())
    {
        out.bundle.U.resize(test.rows(), 0);
        out.bundle.D.resize(test.rows(), 0);
        out.bundle.X.resize(test.rows(), 0);
        out.bundle.transform = stats;
    }
    else
    {
        out.bundle = apply_transform(test.z, stats);
    }
    if (ctx.offset_model)
    {
        out.offset = ctx.offset_model->apply(test.covariates);
    }
    return out;
}

FittedModel fit_pipeline(Method method, const Dataset& train,
                         const Penalties& penalties,
                         const PipelineOptions& options)
{
    const auto ctx = make_context(train, options);
    return fit_method(method, ctx, penalties, options.true_set);
}

std::vector<double> lambda_grid_from_max(double lmax, int size, GridKind kind,
                                         const GridOptions& options)
{
    if (size < 1)
    {
        throw ConfigError("grid size must be at least 1");
    }
    if (!(lmax > 0.0) || std::isinf(lmax))
    {
        throw InvalidInput("cannot build a penalty grid: lambda_max is " +
                           io::format_double(lmax) +
                           " (outcome without variance?)");
    }
    double hi = lmax;
    double lo = lmax * options.lasso_min_ratio;
    if (kind == GridKind::ridge)
    {
        hi = lmax * options.ridge_high_ratio;
        lo = lmax * options.ridge_low_ratio;
    }
    std::vector<double> grid(static_cast<std::size_t>(size));
    if (size == 1)
    {
        grid[0] = hi;
        return grid;
    }
    const double step = (std::log(lo) - std::log(hi)) / (size - 1);
    for (int i = 0; i < size; ++i)
    {
        grid[static_cast<std::size_t>(i)] = std::exp(std::log(hi) + step * i);
    }
    grid.front() = hi;
    grid.back() = lo;
    return grid;
}

std::vector<double> lambda_grid(const Eigen::MatrixXd& a,
                                const Eigen::VectorXd& y, int size,
                                GridKind kind, const Eigen::VectorXd& weights,
                                const GridOptions& options)
{
    if (size < 2)
    {
        throw ConfigError("lambda_grid needs size >= 2");
    }
    if (constant(y))
    {
        throw InvalidInput("lambda_grid: outcome has zero variance");
    }
    const Eigen::VectorXd yc = y.array() - y.mean();
    return lambda_grid_from_max(lambda_max(a, yc, weights), size, kind, options);
}

std::vector<double> default_one_stage_grid(Method method, const FitContext& full,
                                           int size,
                                           const std::vector<std::string>& true_set,
                                           const GridOptions& options)
{
    switch (method)
    {
    case Method::oracle_ols:
        return {0.0};
    case Method::lasso:
        return lambda_grid_from_max(lambda_max(full.x(), full.y_centered()),
                                    size, GridKind::lasso, options);
    case Method::ridge:
        return lambda_grid_from_max(lambda_max(full.ud(), full.y_centered()),
                                    size, GridKind::ridge, options);
    case Method::oracle_ridge:
    {
        // Anchored on the true-predictor columns only.
        double lmax = 0.0;
        const auto& cols = full.bundle().column_ids();
        const auto q = full.q();
        for (std::size_t j = 0; j < cols.size(); ++j)
        {
            if (std::find(true_set.begin(), true_set.end(), cols[j]) == true_set.end())
            {
                continue;
            }
            for (Eigen::Index c : {static_cast<Eigen::Index>(j), q + static_cast<Eigen::Index>(j)})
            {
                lmax = std::max(lmax, 2.0 * std::abs(full.ud().col(c).dot(full.y_centered())));
            }
        }
        return lambda_grid_from_max(lmax, size, GridKind::ridge, options);
    }
    default:
        throw InvalidInput(std::string(to_string(method)) +
                           " is not a one-stage method");
    }
}

TwoStageGrid default_two_stage_grid(Method method, const FitContext& full,
                                    int size, const GridOptions& options)
{
    TwoStageGrid grid;
    switch (method)
    {
    case Method::lasso_ridge:
    {
        grid.lambda1 = lambda_grid_from_max(lambda_max(full.x(), full.y_centered()),
                                            size, GridKind::lasso, options);
        const auto row = lambda_grid_from_max(
            lambda_max(full.ud(), full.y_centered()), size, GridKind::ridge, options);
        grid.lambda2.assign(grid.lambda1.size(), row);
        break;
    }
    case Method::ridge_lasso:
    case Method::ridge_garrote:
    {
        grid.lambda1 = lambda_grid_from_max(lambda_max(full.ud(), full.y_centered()),
                                            size, GridKind::ridge, options);
        for (double l1 : grid.lambda1)
        {
            const double lmax = method == Method::ridge_lasso
                                    ? RidgeLassoStage(full, l1).lambda2_max()
                                    : RidgeGarroteStage(full, l1).lambda2_max();
            grid.lambda2.push_back(lambda_grid_from_max(
                lmax, size,
                method == Method::ridge_lasso ? GridKind::lasso : GridKind::garrote,
                options));
        }
        break;
    }
    default:
        throw InvalidInput(std::string(to_string(method)) +
                           " is not a two-stage method");
    }
    return grid;
}

CvResult cv_rmspe(Method method, const Dataset& data,
                  const Penalties& penalties, const CvPlan& plan,
                  const PipelineOptions& options, const CvObserver& observer)
{
    Grid grid;
    grid.lambda1 = {penalties.lambda1};
    if (is_two_stage(method))
    {
        if (!penalties.lambda2)
        {
            throw InvalidInput("cv_rmspe: two-stage method needs lambda2");
        }
        grid.lambda2 = {{*penalties.lambda2}};
    }
    const auto tasks = static_cast<std::size_t>(plan.repeats * plan.k);
    if (plan.rows() != data.rows())
    {
        throw InvalidInput("CV plan was made for a different number of rows");
    }
    CvResult result;
    result.fold_rmspe.assign(tasks, kNaN);
    parallel_for(tasks, options.threads, [&](std::size_t t)
    {
        const int r = static_cast<int>(t) / plan.k;
        const int f = static_cast<int>(t) % plan.k;
        const auto test_rows = plan.test_rows(r, f);
        const auto train = data.subset(plan.train_rows(r, f));
        if (test_rows.empty() || constant(train.y))
        {
            return;
        }
        const auto ctx = make_context(train, options);
        const auto test = prepare_held_out(ctx, data.subset(test_rows));
        ModelSink sink;
        if (observer)
        {
            sink = [&](const FittedModel& m) { observer(r, f, m); };
        }
        result.fold_rmspe[t] =
            fold_scores(method, ctx, test, grid, options.true_set, sink)[0];
    });
    double sum = 0.0;
    int count = 0;
    for (double v : result.fold_rmspe)
    {
        if (std::isnan(v))
        {
            ++result.skipped_folds;
        }
        else
        {
            sum += v;
            ++count;
        }
    }
    if (count == 0)
    {
        throw InvalidInput("every cross-validation fold was skipped "
                           "(constant outcome)");
    }
    result.mean_rmspe = sum / count;
    return result;
}

TuningResult tune_one_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            std::vector<double> grid)
{
    if (is_two_stage(method))
    {
        throw InvalidInput("tune_one_stage: two-stage method");
    }
    if (grid.empty())
    {
        throw ConfigError("empty penalty grid");
    }
    Grid g;
    g.lambda1 = std::move(grid);
    auto eval = evaluate_grid(method, data, plan, options, g, {});
    return choose(method, g, std::move(eval));
}

TuningResult tune_one_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            int grid_size)
{
    const auto full = make_context(data, options);
    return tune_one_stage(method, data, plan, options,
                          default_one_stage_grid(method, full, grid_size,
                                                 options.true_set));
}

TuningResult tune_two_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            TwoStageGrid grid)
{
    if (!is_two_stage(method))
    {
        throw InvalidInput("tune_two_stage: not a two-stage method");
    }
    if (grid.lambda1.empty() || grid.lambda2.size() != grid.lambda1.size())
    {
        throw ConfigError("two-stage grid needs one lambda2 row per lambda1");
    }
    for (const auto& row : grid.lambda2)
    {
        if (row.empty())
        {
            throw ConfigError("empty lambda2 row in two-stage grid");
        }
    }
    Grid g;
    g.lambda1 = std::move(grid.lambda1);
    g.lambda2 = std::move(grid.lambda2);
    auto eval = evaluate_grid(method, data, plan, options, g, {});
    return choose(method, g, std::move(eval));
}

TuningResult tune_two_stage(Method method, const Dataset& data,
                            const CvPlan& plan, const PipelineOptions& options,
                            int grid_size)
{
    const auto full = make_context(data, options);
    return tune_two_stage(method, data, plan, options,
                          default_two_stage_grid(method, full, grid_size));
}

TuningResult tune(Method method, const Dataset& data, const CvPlan& plan,
                  const PipelineOptions& options, int grid_size)
{
    if (method == Method::oracle_ols)
    {
        TuningResult r;
        r.method = method;
        r.lambda1 = {0.0};
        r.mean_cv_rmspe = Eigen::MatrixXd::Constant(1, 1, kNaN);
        r.chosen.lambda1 = 0.0;
        return r;
    }
    return is_two_stage(method)
               ? tune_two_stage(method, data, plan, options, grid_size)
               : tune_one_stage(method, data, plan, options, grid_size);
}

std::string TuningResult::to_csv() const
{
    std::string out = "lambda1,lambda2,mean_cv_rmspe\n";
    for (std::size_t i = 0; i < lambda1.size(); ++i)
    {
        const auto e = static_cast<Eigen::Index>(i);
        if (lambda2.empty())
        {
            out += io::format_double(lambda1[i]) + ",NA," +
                   io::format_double(mean_cv_rmspe(e, 0)) + "\n";
            continue;
        }
        for (std::size_t k = 0; k < lambda2[i].size(); ++k)
        {
            out += io::format_double(lambda1[i]) + "," +
                   io::format_double(lambda2[i][k]) + "," +
                   io::format_double(mean_cv_rmspe(e, static_cast<Eigen::Index>(k))) +
                   "\n";
        }
    }
    return out;
}

std::string TuningResult::to_json() const
{
    nlohmann::ordered_json j;
    j["method"] = to_string(method);
    j["lambda1"] = chosen.lambda1;
    j["lambda2"] = chosen.lambda2 ? nlohmann::ordered_json(*chosen.lambda2)
                                  : nlohmann::ordered_json(nullptr);
    const double best = mean_cv_rmspe.size() > 0
                            ? mean_cv_rmspe(chosen_row, chosen_col)
                            : kNaN;
    j["mean_cv_rmspe"] = std::isnan(best) ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(best);
    j["grid_rows"] = lambda1.size();
    j["grid_cols"] = lambda2.empty() ? 1 : lambda2.front().size();
    j["ties"] = ties;
    j["skipped_folds"] = skipped_folds;
    return j.dump(2);
}

}  // namespace zigar

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

#include "zigar/preprocess.hpp"

#include "zigar/error.hpp"

#include <Eigen/QR>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <unordered_map>

namespace zigar
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ColumnSummary
{
    int n_plus = 0;
    double mean_log = kNaN;
    double sd_log = kNaN;
    double min_log = kNaN;
    double min_raw = kNaN;
};

ColumnSummary summarize_column(const Eigen::Ref<const Eigen::VectorXd>& col,
                               LogBase base)
{
    ColumnSummary s;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i)
    {
        if (col[i] > 0.0)
        {
            const double v = log_in_base(col[i], base);
            ++s.n_plus;
            sum += v;
            if (!(v >= s.min_log))
            {
                s.min_log = v;
            }
            if (!(col[i] >= s.min_raw))
            {
                s.min_raw = col[i];
            }
        }
    }
    if (s.n_plus == 0)
    {
        return s;
    }
    s.mean_log = sum / s.n_plus;
    if (s.n_plus >= 2)
    {
        double ss = 0.0;
        for (Eigen::Index i = 0; i < col.size(); ++i)
        {
            if (col[i] > 0.0)
            {
                const double d = log_in_base(col[i], base) - s.mean_log;
                ss += d * d;
            }
        }
        s.sd_log = std::sqrt(ss / (s.n_plus - 1));
    }
    return s;
}

}  // namespace

double log_in_base(double value, LogBase base)
{
    return base == LogBase::base2 ? std::log2(value) : std::log(value);
}

const char* to_string(LogBase base)
{
    return base == LogBase::base2 ? "base2" : "natural";
}

LogBase log_base_from_string(const std::string& text)
{
    if (text == "natural" || text == "e" || text == "ln")
    {
        return LogBase::natural;
    }
    if (text == "base2" || text == "2" || text == "log2")
    {
        return LogBase::base2;
    }
    throw ConfigError("unknown log base '" + text + "'");
}

IntensityMatrix IntensityMatrix::with_default_ids(Eigen::MatrixXd values)
{
    IntensityMatrix z;
    z.values = std::move(values);
    z.column_ids.reserve(static_cast<std::size_t>(z.values.cols()));
    for (Eigen::Index j = 0; j < z.values.cols(); ++j)
    {
        z.column_ids.push_back("p" + std::to_string(j + 1));
    }
    z.row_ids.reserve(static_cast<std::size_t>(z.values.rows()));
    for (Eigen::Index i = 0; i < z.values.rows(); ++i)
    {
        z.row_ids.push_back("r" + std::to_string(i + 1));
    }
    return z;
}

void IntensityMatrix::validate() const
{
    if (static_cast<Eigen::Index>(column_ids.size()) != values.cols() ||
        static_cast<Eigen::Index>(row_ids.size()) != values.rows())
    {
        throw InvalidInput("intensity matrix labels do not match its shape");
    }
    for (Eigen::Index j = 0; j < values.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < values.rows(); ++i)
        {
            const double v = values(i, j);
            if (!std::isfinite(v) || v < 0.0)
            {
                throw InvalidInput("intensity in column '" + column_ids[j] +
                                   "', row '" + row_ids[i] +
                                   "' is negative or not finite");
            }
        }
    }
}

IntensityMatrix IntensityMatrix::select_rows(std::span<const int> rows) const
{
    IntensityMatrix out;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
    out.column_ids = column_ids;
    out.row_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
    {
        out.values.row(static_cast<Eigen::Index>(r)) = values.row(rows[r]);
        out.row_ids.push_back(row_ids.at(static_cast<std::size_t>(rows[r])));
    }
    return out;
}

IntensityMatrix IntensityMatrix::select_columns(std::span<const int> cols) const
{
    IntensityMatrix out;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
    out.row_ids = row_ids;
    out.column_ids.reserve(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
    {
        out.values.col(static_cast<Eigen::Index>(c)) = values.col(cols[c]);
        out.column_ids.push_back(
            column_ids.at(static_cast<std::size_t>(cols[c])));
    }
    return out;
}

Eigen::VectorXd IntensityMatrix::pmv_share() const
{
    Eigen::VectorXd share(values.cols());
    for (Eigen::Index j = 0; j < values.cols(); ++j)
    {
        share[j] = values.rows() == 0
                       ? 0.0
                       : static_cast<double>(
                             (values.col(j).array() <= 0.0).count()) /
                             static_cast<double>(values.rows());
    }
    return share;
}

ComponentBundle split_components(const IntensityMatrix& z, LogBase base)
{
    z.validate();
    if (z.rows() == 0 || z.cols() == 0)
    {
        throw InvalidInput("split_components: empty intensity matrix");
    }
    auto stats = std::make_shared<TransformStats>();
    stats->log_base = base;
    stats->x_fill = kNaN;

    std::vector<int> keep;
    std::vector<ColumnSummary> summaries;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        auto s = summarize_column(z.values.col(j), base);
        if (s.n_plus == 0)
        {
            stats->degenerate.emplace_back(z.column_ids[j], "no positive intensities");
            continue;
        }
        keep.push_back(static_cast<int>(j));
        summaries.push_back(s);
    }

    const auto q = static_cast<Eigen::Index>(keep.size());
    const auto n = z.rows();
    ComponentBundle bundle;
    bundle.U.resize(n, q);
    bundle.D.resize(n, q);
    stats->u_fill.resize(q);
    stats->col_sd.resize(q);
    stats->pmv_share.resize(q);
    for (Eigen::Index c = 0; c < q; ++c)
    {
        const auto src = z.values.col(keep[c]);
        const auto& s = summaries[c];
        stats->column_ids.push_back(z.column_ids[keep[c]]);
        stats->u_fill[c] = s.mean_log;
        stats->col_sd[c] = s.sd_log;
        stats->n_plus.push_back(s.n_plus);
        stats->pmv_share[c] =
            1.0 - static_cast<double>(s.n_plus) / static_cast<double>(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const bool present = src[i] > 0.0;
            bundle.D(i, c) = present ? 1.0 : 0.0;
            bundle.U(i, c) = present ? log_in_base(src[i], base) : s.mean_log;
        }
    }
    bundle.transform = std::move(stats);
    return bundle;
}

ImputedMatrix impute_transform(const IntensityMatrix& z, LogBase base,
                               ImputeScale scale)
{
    z.validate();
    double min_log = kNaN;
    double min_raw = kNaN;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < z.rows(); ++i)
        {
            const double v = z.values(i, j);
            if (v > 0.0 && !(v >= min_raw))
            {
                min_raw = v;
            }
        }
    }
    if (std::isnan(min_raw))
    {
        throw InvalidInput("impute_transform: no positive intensities");
    }
    min_log = log_in_base(min_raw, base);

    ImputedMatrix out;
    out.x_fill = scale == ImputeScale::transformed
                     ? 0.5 * min_log
                     : log_in_base(0.5 * min_raw, base);
    out.X.resize(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < z.rows(); ++i)
        {
            const double v = z.values(i, j);
            out.X(i, j) = v > 0.0 ? log_in_base(v, base) : out.x_fill;
        }
    }
    return out;
}

IntensityMatrix filter_max_pmv(const IntensityMatrix& z, double max_pmv)
{
    if (!(max_pmv >= 0.0 && max_pmv <= 1.0))
    {
        throw InvalidInput("max_pmv must lie in [0, 1]");
    }
    const auto share = z.pmv_share();
    std::vector<int> keep;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        if (share[j] <= max_pmv)
        {
            keep.push_back(static_cast<int>(j));
        }
    }
    return z.select_columns(keep);
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& m,
                            const Eigen::VectorXd& sds,
                            const std::vector<std::string>& column_ids)
{
    if (sds.size() != m.cols())
    {
        throw InvalidInput("standardize: scale vector length mismatch");
    }
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
    {
        if (!(sds[j] > 0.0) || !std::isfinite(sds[j]))
        {
            const auto name = j < static_cast<Eigen::Index>(column_ids.size())
                                  ? column_ids[j]
                                  : "#" + std::to_string(j);
            throw DegenerateColumn(name, "scale is not strictly positive");
        }
        out.col(j) = m.col(j) / sds[j];
    }
    return out;
}

ComponentBundle prepare_components(const IntensityMatrix& z,
                                   const TransformOptions& options)
{
    z.validate();
    if (z.rows() == 0)
    {
        throw InvalidInput("prepare_components: no rows");
    }

    std::vector<int> keep;
    std::vector<std::pair<std::string, std::string>> dropped;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        const auto s = summarize_column(z.values.col(j), options.log_base);
        if (s.n_plus == 0)
        {
            dropped.emplace_back(z.column_ids[j], "no positive intensities");
        }
        else if (options.standardize && !(s.sd_log > 0.0))
        {
            dropped.emplace_back(z.column_ids[j],
                                 "positive intensities have no spread");
        }
        else
        {
            keep.push_back(static_cast<int>(j));
        }
    }

    if (keep.empty())
    {
        ComponentBundle empty;
        auto stats = std::make_shared<TransformStats>();
        stats->log_base = options.log_base;
        stats->x_fill_scale = options.x_fill_scale;
        stats->standardized = options.standardize;
        stats->x_fill = kNaN;
        stats->degenerate = std::move(dropped);
        empty.U.resize(z.rows(), 0);
        empty.D.resize(z.rows(), 0);
        empty.X.resize(z.rows(), 0);
        empty.transform = std::move(stats);
        return empty;
    }

    const auto retained = z.select_columns(keep);
    auto bundle = split_components(retained, options.log_base);
    auto imputed =
        impute_transform(retained, options.log_base, options.x_fill_scale);

    auto stats = std::make_shared<TransformStats>(*bundle.transform);
    stats->x_fill_scale = options.x_fill_scale;
    stats->x_fill = imputed.x_fill;
    stats->standardized = options.standardize;
    stats->degenerate = std::move(dropped);

    bundle.X = std::move(imputed.X);
    if (options.standardize)
    {
        bundle.U = standardize(bundle.U, stats->col_sd, stats->column_ids);
        bundle.X = standardize(bundle.X, stats->col_sd, stats->column_ids);
    }
    bundle.transform = std::move(stats);
    return bundle;
}

LogIntensities LogIntensities::from(const IntensityMatrix& z, LogBase base)
{
    z.validate();
    LogIntensities out;
    out.base = base;
    out.column_ids = z.column_ids;
    out.log_values.resize(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < z.rows(); ++i)
        {
            const double v = z.values(i, j);
            out.log_values(i, j) = v > 0.0 ? log_in_base(v, base) : kNaN;
        }
    }
    return out;
}

std::vector<Eigen::Index> LogIntensities::locate(
    const std::vector<std::string>& ids) const
{
    std::unordered_map<std::string, Eigen::Index> index;
    for (std::size_t j = 0; j < column_ids.size(); ++j)
    {
        index.emplace(column_ids[j], static_cast<Eigen::Index>(j));
    }
    std::vector<Eigen::Index> out;
    out.reserve(ids.size());
    for (const auto& id : ids)
    {
        auto it = index.find(id);
        if (it == index.end())
        {
            throw SchemaError("new data lacks column '" + id +
                              "' required by the fitted transform");
        }
        out.push_back(it->second);
    }
    return out;
}

ComponentBundle apply_transform(const LogIntensities& logs,
                                std::shared_ptr<const TransformStats> stats)
{
    if (logs.base != stats->log_base)
    {
        throw SchemaError("log base of new data differs from the fitted transform");
    }
    const auto cols = logs.locate(stats->column_ids);
    const auto n = logs.rows();
    const auto q = static_cast<Eigen::Index>(cols.size());
    ComponentBundle out;
    out.U.resize(n, q);
    out.D.resize(n, q);
    out.X.resize(n, q);
    for (Eigen::Index c = 0; c < q; ++c)
    {
        const double scale = stats->standardized ? stats->col_sd[c] : 1.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double lv = logs.log_values(i, cols[c]);
            if (std::isnan(lv))
            {
                out.D(i, c) = 0.0;
                out.U(i, c) = stats->u_fill[c] / scale;
                out.X(i, c) = stats->x_fill / scale;
            }
            else
            {
                const double v = lv;
                out.D(i, c) = 1.0;
                out.U(i, c) = v / scale;
                out.X(i, c) = v / scale;
            }
        }
    }
    out.transform = std::move(stats);
    return out;
}

ComponentBundle apply_transform(const IntensityMatrix& z,
                                std::shared_ptr<const TransformStats> stats)
{
    LogIntensities ids;
    ids.column_ids = z.column_ids;
    const auto cols = ids.locate(stats->column_ids);
    const std::vector<int> idx(cols.begin(), cols.end());
    const auto base = stats->log_base;
    return apply_transform(LogIntensities::from(z.select_columns(idx), base),
                           std::move(stats));
}

Eigen::VectorXd OffsetModel::apply(const Eigen::MatrixXd& covariates) const
{
    if (covariates.cols() + 1 != coefficients.size())
    {
        throw SchemaError("offset model expects " +
                          std::to_string(coefficients.size() - 1) +
                          " covariates, got " +
                          std::to_string(covariates.cols()));
    }
    Eigen::VectorXd out =
        Eigen::VectorXd::Constant(covariates.rows(), coefficients[0]);
    if (covariates.cols() > 0)
    {
        out += covariates * coefficients.tail(covariates.cols());
    }
    return out;
}

OffsetFit residual_offset(const Eigen::MatrixXd& covariates,
                          const Eigen::VectorXd& y,
                          std::vector<std::string> names)
{
    const auto n = covariates.rows();
    const auto p = covariates.cols();
    if (y.size() != n)
    {
        throw InvalidInput("residual_offset: outcome length mismatch");
    }
    if (p + 1 > n)
    {
        throw InvalidInput("residual_offset: more covariates than rows");
    }
    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = covariates;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p + 1)
    {
        throw InvalidInput("residual_offset: covariate matrix is rank deficient");
    }
    OffsetFit fit;
    fit.model.coefficients = qr.solve(y);
    if (names.empty())
    {
        for (Eigen::Index j = 0; j < p; ++j)
        {
            names.push_back("c" + std::to_string(j + 1));
        }
    }
    fit.model.covariate_names = std::move(names);
    fit.offsets = design * fit.model.coefficients;
    return fit;
}

std::string transform_stats_to_json(const TransformStats& stats)
{
    nlohmann::ordered_json j;
    j["log_base"] = to_string(stats.log_base);
    j["x_fill_scale"] =
        stats.x_fill_scale == ImputeScale::raw ? "raw" : "transformed";
    j["standardized"] = stats.standardized;
    j["x_fill"] = stats.x_fill;
    auto columns = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < stats.size(); ++c)
    {
        const auto e = static_cast<Eigen::Index>(c);
        nlohmann::ordered_json col;
        col["id"] = stats.column_ids[c];
        col["u_fill"] = stats.u_fill[e];
        col["col_sd"] = std::isnan(stats.col_sd[e])
                            ? nlohmann::ordered_json(nullptr)
                            : nlohmann::ordered_json(stats.col_sd[e]);
        col["n_plus"] = stats.n_plus[c];
        col["pmv_share"] = stats.pmv_share[e];
        columns.push_back(std::move(col));
    }
    j["columns"] = std::move(columns);
    auto degenerate = nlohmann::ordered_json::array();
    for (const auto& [id, why] : stats.degenerate)
    {
        degenerate.push_back({{"id", id}, {"reason", why}});
    }
    j["degenerate"] = std::move(degenerate);
    return j.dump(2);
}

TransformStats transform_stats_from_json(const std::string& text)
{
    TransformStats stats;
    try
    {
        const auto j = nlohmann::json::parse(text);
        stats.log_base = log_base_from_string(j.at("log_base").get<std::string>());
        stats.x_fill_scale = j.at("x_fill_scale").get<std::string>() == "raw"
                                 ? ImputeScale::raw
                                 : ImputeScale::transformed;
        stats.standardized = j.at("standardized").get<bool>();
        stats.x_fill = j.at("x_fill").is_null() ? kNaN : j.at("x_fill").get<double>();
        const auto& cols = j.at("columns");
        const auto q = static_cast<Eigen::Index>(cols.size());
        stats.u_fill.resize(q);
        stats.col_sd.resize(q);
        stats.pmv_share.resize(q);
        for (Eigen::Index c = 0; c < q; ++c)
        {
            const auto& col = cols.at(static_cast<std::size_t>(c));
            stats.column_ids.push_back(col.at("id").get<std::string>());
            stats.u_fill[c] = col.at("u_fill").get<double>();
            stats.col_sd[c] =
                col.at("col_sd").is_null() ? kNaN : col.at("col_sd").get<double>();
            stats.n_plus.push_back(col.at("n_plus").get<int>());
            stats.pmv_share[c] = col.at("pmv_share").get<double>();
        }
        for (const auto& d : j.at("degenerate"))
        {
            stats.degenerate.emplace_back(d.at("id").get<std::string>(),
                                          d.at("reason").get<std::string>());
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw SchemaError(std::string("malformed transform statistics: ") +
                          e.what());
    }
    return stats;
}

}  // namespace zigar

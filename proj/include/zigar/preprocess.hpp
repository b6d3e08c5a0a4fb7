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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zigar
{

enum class LogBase
{
    natural,
    base2,
};

/// Where the single imputation value of X is computed: half the minimum of
/// the log-transformed positives, or the log of half the minimum positive.
enum class ImputeScale
{
    transformed,
    raw,
};

double log_in_base(double value, LogBase base);
const char* to_string(LogBase base);
LogBase log_base_from_string(const std::string& text);

/// Raw nonnegative intensities; a zero entry is a point-mass value (PMV).
struct IntensityMatrix
{
    Eigen::MatrixXd values;
    std::vector<std::string> column_ids;
    std::vector<std::string> row_ids;

    /// Labels columns p1..pq and rows r1..rn.
    static IntensityMatrix with_default_ids(Eigen::MatrixXd values);

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    /// Throws InvalidInput on negative or non-finite entries, or when label
    /// counts disagree with the matrix shape.
    void validate() const;

    IntensityMatrix select_rows(std::span<const int> rows) const;
    IntensityMatrix select_columns(std::span<const int> cols) const;

    /// Proportion of zeros per column.
    Eigen::VectorXd pmv_share() const;
};

/// Statistics of a fitted transform, sufficient to reproduce it on new rows.
/// All per-column vectors refer to the retained columns in `column_ids`.
struct TransformStats
{
    LogBase log_base = LogBase::natural;
    ImputeScale x_fill_scale = ImputeScale::transformed;
    bool standardized = false;

    std::vector<std::string> column_ids;
    Eigen::VectorXd u_fill;     // mean of transformed positives per column
    double x_fill = 0.0;        // global PMV value for X (transformed units)
    std::vector<int> n_plus;    // positives per column
    Eigen::VectorXd col_sd;     // sd of transformed positives, NaN if n_plus < 2
    Eigen::VectorXd pmv_share;  // zero share per column

    /// Columns of the source matrix that were dropped, with the reason.
    std::vector<std::pair<std::string, std::string>> degenerate;

    std::size_t size() const { return column_ids.size(); }
};

std::string transform_stats_to_json(const TransformStats& stats);
TransformStats transform_stats_from_json(const std::string& text);

/// Design matrices derived from one intensity matrix. U and X are divided by
/// `transform->col_sd` when `transform->standardized` is set; D never is.
struct ComponentBundle
{
    Eigen::MatrixXd U;
    Eigen::MatrixXd D;
    Eigen::MatrixXd X;
    std::shared_ptr<const TransformStats> transform;

    Eigen::Index rows() const { return D.rows(); }
    Eigen::Index predictors() const { return D.cols(); }
    const std::vector<std::string>& column_ids() const
    {
        return transform->column_ids;
    }
};

/// Strategy A: binary presence D and log intensities U with PMVs at the
/// column mean of the transformed positives. All-zero columns are dropped and
/// listed in the returned stats. X is left empty.
ComponentBundle split_components(const IntensityMatrix& z, LogBase base);

struct ImputedMatrix
{
    Eigen::MatrixXd X;
    double x_fill = 0.0;
};

/// Strategy B: log intensities with every PMV replaced by one global value.
ImputedMatrix impute_transform(const IntensityMatrix& z, LogBase base,
                               ImputeScale scale = ImputeScale::transformed);

/// Keeps the columns whose zero share is at most `max_pmv`, in order.
IntensityMatrix filter_max_pmv(const IntensityMatrix& z, double max_pmv);

/// Divides column j by sds[j]. Throws DegenerateColumn naming the column if
/// a scale is not strictly positive.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& m,
                            const Eigen::VectorXd& sds,
                            const std::vector<std::string>& column_ids);

struct TransformOptions
{
    LogBase log_base = LogBase::natural;
    ImputeScale x_fill_scale = ImputeScale::transformed;
    bool standardize = true;
};

/// Full preprocessing of a training matrix: U, D and X on the same retained
/// columns. With standardization on, columns whose positives have no spread
/// are dropped as degenerate as well.
ComponentBundle prepare_components(const IntensityMatrix& z,
                                   const TransformOptions& options = {});

/// Logs of a raw matrix with NaN at PMVs. Applying several transforms to the
/// same (large) matrix only pays for the logarithms once.
struct LogIntensities
{
    LogBase base = LogBase::natural;
    Eigen::MatrixXd log_values;
    std::vector<std::string> column_ids;

    static LogIntensities from(const IntensityMatrix& z, LogBase base);
    Eigen::Index rows() const { return log_values.rows(); }

    /// Column positions of `ids`; throws SchemaError for a missing id.
    std::vector<Eigen::Index> locate(const std::vector<std::string>& ids) const;
};

/// Re-applies training statistics to new rows (fills, scales and retained
/// columns all come from `stats`).
ComponentBundle apply_transform(const IntensityMatrix& z,
                                std::shared_ptr<const TransformStats> stats);
ComponentBundle apply_transform(const LogIntensities& logs,
                                std::shared_ptr<const TransformStats> stats);

/// Linear model of the outcome on demographic covariates whose fitted values
/// enter the penalized models as an offset.
struct OffsetModel
{
    std::vector<std::string> covariate_names;
    Eigen::VectorXd coefficients;  // intercept first

    Eigen::VectorXd apply(const Eigen::MatrixXd& covariates) const;
};

struct OffsetFit
{
    OffsetModel model;
    Eigen::VectorXd offsets;
};

OffsetFit residual_offset(const Eigen::MatrixXd& covariates,
                          const Eigen::VectorXd& y,
                          std::vector<std::string> names = {});

}  // namespace zigar

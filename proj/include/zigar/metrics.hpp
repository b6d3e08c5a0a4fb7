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

#include <optional>
#include <string>
#include <vector>

namespace zigar
{

/// Undefined values (constant predictions, empty selections, ...) are empty
/// optionals; they are excluded from means and counted.
struct PredictionMetrics
{
    double rmspe = 0.0;
    std::optional<double> r2;
    std::optional<double> calib_slope;
};

PredictionMetrics prediction_metrics(const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& yhat);

std::optional<double> relative_rmspe(double method_rmspe, double oracle_rmspe);

struct SelectionMetrics
{
    int q_selected = 0;
    std::optional<double> tpdr;
    std::optional<double> fndr;
};

/// `q` is the number of candidate predictors.
SelectionMetrics selection_metrics(const std::vector<std::string>& selected,
                                   const std::vector<std::string>& true_set,
                                   int q);

struct ReplicateRecord
{
    int scenario_id = 0;
    int rep_index = 0;
    std::string method;
    std::optional<double> rmspe;
    std::optional<double> relative_rmspe;
    std::optional<double> r2;
    std::optional<double> calib_slope;
    std::optional<int> q_selected;
    std::optional<double> tpdr;
    std::optional<double> fndr;
    std::vector<std::string> selected_ids;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    std::string status = "ok";
    double fit_seconds = 0.0;
};

struct EstimandSummary
{
    std::optional<double> mean;
    std::optional<double> sd;  // undefined with fewer than two values
    int n_defined = 0;
    int n_undefined = 0;
};

EstimandSummary summarize_values(const std::vector<std::optional<double>>& values);

struct MethodSummary
{
    int scenario_id = 0;
    std::string method;
    int reps = 0;
    int failures = 0;
    EstimandSummary rmspe, relative_rmspe, r2, calib_slope, q_selected, tpdr, fndr;
    std::optional<double> mcse_rmspe;
    std::optional<double> median_q_selected;
    /// Inclusion frequency per candidate predictor, in `predictor_ids` order.
    std::vector<double> pif;
};

struct ScenarioSummary
{
    std::vector<std::string> predictor_ids;
    std::vector<MethodSummary> methods;  // in first-appearance order
};

/// Groups by (scenario, method). `predictor_ids` fixes the PIF layout; PIF
/// denominators count every replicate of the method, failed ones included.
ScenarioSummary summarize(const std::vector<ReplicateRecord>& records,
                          const std::vector<std::string>& predictor_ids);

std::optional<double> median(std::vector<double> values);

std::string replicates_csv_header();
std::string replicate_csv_row(const ReplicateRecord& r);
std::string summary_csv_header();
std::string summary_csv_rows(const ScenarioSummary& s);
std::string pif_csv_header();
std::string pif_csv_rows(const ScenarioSummary& s);

}  // namespace zigar

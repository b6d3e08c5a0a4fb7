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
#include "zigar/metrics.hpp"
#include "zigar/simgen.hpp"
#include "zigar/tuning.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace zigar::study
{

using Logger = std::function<void(const std::string&)>;

/// Tuning settings shared by the simulation and the data workflows.
struct CvSettings
{
    int grid_size = 20;
    int folds = 10;
    int repeats = 2;
};

/// The full-scale settings: 50-point grids, 10 x 10-fold CV, 500 replicates.
constexpr int kPaperReps = 500;
constexpr CvSettings kPaperCv{50, 10, 10};

std::vector<Method> default_methods();
std::vector<Method> parse_methods(const std::string& comma_list);
/// "all", "7", "1,5,9" or "1-10" (mixable); ids must lie in 1..486.
std::vector<int> parse_scenario_selector(const std::string& text);

/// Preprocessing used on simulated analyst matrices: natural logs, X fill at
/// half the minimum positive intensity before logging, standardized U and X.
TransformOptions simulation_transform();
/// Preprocessing for user data: log2, X fill at half the minimum log2 value.
TransformOptions data_transform();

struct MethodTiming
{
    int scenario_id = 0;
    int rep = 0;
    std::string method;
    double tuning_seconds = 0.0;
    double final_fit_seconds = 0.0;
};

struct ReplicateOutcome
{
    std::vector<ReplicateRecord> records;  // in method order
    std::vector<MethodTiming> timings;
};

/// Generates one training replicate and runs every method on it.
/// Method failures become records with status "error: ...".
ReplicateOutcome run_replicate(const sim::ScenarioConfig& config,
                               const sim::GroundTruth& truth,
                               const sim::ValidationSet& validation, int rep,
                               const std::vector<Method>& methods,
                               const CvSettings& cv);

struct ScenarioOutcome
{
    sim::ScenarioConfig config;
    sim::GroundTruth truth;
    std::vector<ReplicateRecord> records;  // rep-major, method order within
    std::vector<MethodTiming> timings;
    ScenarioSummary summary;
};

/// Replicates are spread over `threads` workers; the records do not depend
/// on the worker count.
ScenarioOutcome run_scenario(const sim::ScenarioConfig& config,
                             const std::vector<Method>& methods,
                             const CvSettings& cv, int threads,
                             const Logger& log = {});

struct SimulateOptions
{
    std::vector<int> scenario_ids;  // empty: all
    int reps = 50;
    std::vector<Method> methods = default_methods();
    std::uint64_t seed = 20240101;
    std::string out_dir = "zigar-sim";
    CvSettings cv;
    int threads = 0;  // 0: ZIGAR_THREADS or 1
    bool paper_scale = false;
    int n_valid = 100000;
    int n_pilot = 100000;
};

/// Writes replicates.csv, summary.csv, pif.csv, timings.csv,
/// scenario_<id>.json, truth_<id>.json and manifest.json. Returns the number
/// of failed (replicate, method) fits.
int simulate(const SimulateOptions& options, const Logger& log = {});

/// Writes the factorial table as CSV.
void write_scenarios(const std::string& path);

struct FitOptions
{
    std::string data_csv;
    std::string outcome;
    std::vector<std::string> covariates;
    std::string id_column;  // optional row id column, excluded from peptides
    std::vector<Method> methods{Method::ridge_garrote};
    double max_pmv = 1.0;
    CvSettings cv{20, 10, 2};
    int outer_folds = 10;  // 0 disables the cross-validated evaluation
    std::uint64_t seed = 20240101;
    std::string out_dir = "zigar-fit";
    int threads = 0;
};

struct FitSummary
{
    Method method = Method::ridge;
    FittedModel model;
    TuningResult tuning;
    std::vector<std::string> selected;
    std::optional<PredictionMetrics> cv_metrics;  // pooled outer-CV predictions
    std::optional<double> cv_mean_fold_rmspe;
    std::vector<std::string> warnings;
};

/// Loads a CSV into a Dataset; every column that is not the outcome, a
/// covariate or the id column is a peptide intensity.
Dataset load_dataset(const std::string& csv_path, const std::string& outcome,
                     const std::vector<std::string>& covariates,
                     const std::string& id_column = "");

/// Runs the data pipeline and writes coefficients_<method>.csv,
/// selected_<method>.txt, tuning_<method>.csv, folds.csv, metrics.csv and
/// manifest.json.
std::vector<FitSummary> fit(const FitOptions& options, const Logger& log = {});

/// The in-memory part of `fit` for one method on an already loaded dataset.
FitSummary fit_dataset(Method method, const Dataset& data, const CvPlan& plan,
                       const FitOptions& options);

enum class Strategy
{
    components,
    impute,
};

struct TransformCmdOptions
{
    std::string data_csv;
    Strategy strategy = Strategy::components;
    std::string out_dir = "zigar-transform";
    std::string id_column;
    std::vector<std::string> drop_columns;  // non-intensity columns to ignore
    std::string stats_json;  // re-apply saved statistics instead of fitting
    double max_pmv = 1.0;
    bool standardize = true;
    LogBase log_base = LogBase::base2;
};

/// Writes U.csv and D.csv (components) or X.csv (impute) plus
/// transform_stats.json and manifest.json.
void transform(const TransformCmdOptions& options, const Logger& log = {});

}  // namespace zigar::study

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

#include "zigar/zigar.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace
{

void log_stderr(const char* message, void*)
{
    std::fprintf(stderr, "[zigar] %s\n", message);
}

int report(zigar_status status)
{
    if (status == ZIGAR_OK)
    {
        return 0;
    }
    std::fprintf(stderr, "zigar: %s: %s\n", zigar_status_name(status), zigar_last_error());
    return 2;
}

// --threads beats ZIGAR_THREADS; 0 lets the library read the variable.
int thread_flag(const std::optional<int>& flag)
{
    return flag ? *flag : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Penalized regression for zero-inflated predictors"};
    app.set_version_flag("--version", std::string(zigar_version()));
    app.require_subcommand(1);

    // scenarios
    std::string scen_out = "scenarios.csv";
    auto* scen = app.add_subcommand("scenarios", "Write the 486-scenario factorial table");
    scen->add_option("--out", scen_out, "Output CSV path")->capture_default_str();

    // simulate
    zigar_simulate_options sim;
    zigar_simulate_options_init(&sim);
    std::string sim_scenarios = "all";
    std::string sim_methods;
    std::string sim_out = "zigar-sim";
    std::optional<int> sim_threads;
    bool sim_paper = false;
    auto* simc = app.add_subcommand("simulate", "Run the simulation study");
    simc->add_option("--scenario", sim_scenarios, "Scenario ids: all, 7, 1,5 or 1-10")
        ->capture_default_str();
    simc->add_option("--reps", sim.reps, "Replicates per scenario")->capture_default_str();
    simc->add_option("--methods", sim_methods,
                     "Comma-separated methods (default: ridge, lasso, lasso-ridge, "
                     "ridge-lasso, ridge-garrote, oracle-ridge)");
    simc->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    simc->add_option("--out", sim_out, "Output directory")->capture_default_str();
    simc->add_option("--grid-size", sim.grid_size, "Penalty values per dimension")
        ->capture_default_str();
    simc->add_option("--cv-folds", sim.cv_folds, "Cross-validation folds")->capture_default_str();
    simc->add_option("--cv-repeats", sim.cv_repeats, "Cross-validation repeats")
        ->capture_default_str();
    simc->add_option("--threads", sim_threads, "Worker threads (default: ZIGAR_THREADS or 1)");
    simc->add_flag("--paper-scale", sim_paper,
                   "500 replicates, 50-point grids, 10 x 10-fold CV");
    simc->add_option("--n-valid", sim.n_valid, "Validation rows per scenario")
        ->capture_default_str();
    simc->add_option("--n-pilot", sim.n_pilot, "Calibration pilot rows")->capture_default_str();

    // fit
    zigar_fit_options fit;
    zigar_fit_options_init(&fit);
    std::string fit_data, fit_outcome, fit_cov, fit_id, fit_methods = "ridge-garrote";
    std::string fit_out = "zigar-fit";
    std::optional<int> fit_threads;
    bool fit_paper = false;
    auto* fitc = app.add_subcommand("fit", "Tune and fit models on a CSV of intensities");
    fitc->add_option("data", fit_data, "Input CSV")->required();
    fitc->add_option("--outcome", fit_outcome, "Outcome column")->required();
    fitc->add_option("--covariates", fit_cov, "Comma-separated covariate columns");
    fitc->add_option("--id-column", fit_id, "Row id column");
    fitc->add_option("--methods", fit_methods, "Comma-separated methods")->capture_default_str();
    fitc->add_option("--max-pmv", fit.max_pmv, "Maximum zero share of a retained peptide")
        ->capture_default_str();
    fitc->add_option("--grid-size", fit.grid_size, "Penalty values per dimension")
        ->capture_default_str();
    fitc->add_option("--cv-folds", fit.cv_folds, "Tuning folds")->capture_default_str();
    fitc->add_option("--cv-repeats", fit.cv_repeats, "Tuning repeats")->capture_default_str();
    fitc->add_option("--outer-folds", fit.outer_folds,
                     "Folds of the cross-validated evaluation (0 disables)")
        ->capture_default_str();
    fitc->add_option("--seed", fit.seed, "Seed of the fold assignment")->capture_default_str();
    fitc->add_option("--out", fit_out, "Output directory")->capture_default_str();
    fitc->add_option("--threads", fit_threads, "Worker threads (default: ZIGAR_THREADS or 1)");
    fitc->add_flag("--paper-scale", fit_paper, "50-point grids with 10 x 10-fold CV");

    // transform
    zigar_transform_options tr;
    zigar_transform_options_init(&tr);
    std::string tr_data, tr_strategy = "components", tr_out = "zigar-transform", tr_id,
                         tr_drop, tr_stats;
    bool tr_raw = false;
    bool tr_natural = false;
    auto* trc = app.add_subcommand("transform", "Write component or imputed matrices");
    trc->add_option("data", tr_data, "Input CSV of intensities")->required();
    trc->add_option("--strategy", tr_strategy, "components or impute")
        ->check(CLI::IsMember({"components", "impute"}))
        ->capture_default_str();
    trc->add_option("--out", tr_out, "Output directory")->capture_default_str();
    trc->add_option("--id-column", tr_id, "Row id column");
    trc->add_option("--drop", tr_drop, "Comma-separated columns to ignore");
    trc->add_option("--stats", tr_stats, "Re-apply a saved transform_stats.json");
    trc->add_option("--max-pmv", tr.max_pmv, "Maximum zero share of a retained column")
        ->capture_default_str();
    trc->add_flag("--no-standardize", tr_raw, "Keep U and X on the log scale");
    trc->add_flag("--natural-log", tr_natural, "Natural instead of base-2 logarithms");

    CLI11_PARSE(app, argc, argv);

    if (*scen)
    {
        return report(zigar_write_scenarios(scen_out.c_str()));
    }
    if (*simc)
    {
        sim.scenarios = sim_scenarios.c_str();
        sim.methods = sim_methods.empty() ? nullptr : sim_methods.c_str();
        sim.out_dir = sim_out.c_str();
        sim.threads = thread_flag(sim_threads);
        sim.paper_scale = sim_paper ? 1 : 0;
        sim.log = log_stderr;
        int failures = 0;
        const int rc = report(zigar_simulate(&sim, &failures));
        if (rc != 0)
        {
            return rc;
        }
        if (failures > 0)
        {
            std::fprintf(stderr, "zigar: %d fit(s) failed; see the status column of %s/replicates.csv\n",
                         failures, sim_out.c_str());
            return 1;
        }
        return 0;
    }
    if (*fitc)
    {
        fit.data_csv = fit_data.c_str();
        fit.outcome = fit_outcome.c_str();
        fit.covariates = fit_cov.empty() ? nullptr : fit_cov.c_str();
        fit.id_column = fit_id.empty() ? nullptr : fit_id.c_str();
        fit.methods = fit_methods.c_str();
        fit.out_dir = fit_out.c_str();
        fit.threads = thread_flag(fit_threads);
        if (fit_paper)
        {
            fit.grid_size = 50;
            fit.cv_folds = 10;
            fit.cv_repeats = 10;
        }
        fit.log = log_stderr;
        return report(zigar_fit_csv(&fit));
    }
    if (*trc)
    {
        tr.data_csv = tr_data.c_str();
        tr.strategy = tr_strategy == "impute" ? ZIGAR_STRATEGY_IMPUTE : ZIGAR_STRATEGY_COMPONENTS;
        tr.out_dir = tr_out.c_str();
        tr.id_column = tr_id.empty() ? nullptr : tr_id.c_str();
        tr.drop_columns = tr_drop.empty() ? nullptr : tr_drop.c_str();
        tr.stats_json = tr_stats.empty() ? nullptr : tr_stats.c_str();
        tr.standardize = tr_raw ? 0 : 1;
        tr.log2 = tr_natural ? 0 : 1;
        tr.log = log_stderr;
        return report(zigar_transform_csv(&tr));
    }
    return 0;
}

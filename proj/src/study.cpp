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

#include "zigar/study.hpp"

#include "zigar/error.hpp"
#include "zigar/io.hpp"
#include "zigar/parallel.hpp"
#include "zigar/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

namespace zigar::study
{

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace
{

constexpr int kScenarioCount = 486;

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json method_names(const std::vector<Method>& methods)
{
    json a = json::array();
    for (auto m : methods)
    {
        a.push_back(to_string(m));
    }
    return a;
}

json cv_json(const CvSettings& cv)
{
    return json{{"grid_size", cv.grid_size}, {"cv_folds", cv.folds},
                {"cv_repeats", cv.repeats}};
}

json transform_json(const TransformOptions& t)
{
    return json{{"log_base", to_string(t.log_base)},
                {"x_fill_scale", t.x_fill_scale == ImputeScale::raw ? "raw" : "transformed"},
                {"standardize", t.standardize}};
}

void log_line(const Logger& log, const std::string& text)
{
    if (log)
    {
        log(text);
    }
}

std::string one_line(std::string text)
{
    std::replace(text.begin(), text.end(), '\n', ' ');
    std::replace(text.begin(), text.end(), '\r', ' ');
    return text;
}

ReplicateRecord failed_record(int scenario, int rep, Method method, const std::string& why)
{
    ReplicateRecord r;
    r.scenario_id = scenario;
    r.rep_index = rep;
    r.method = to_string(method);
    r.status = "error: " + one_line(why);
    return r;
}

std::string timings_csv_header()
{
    return "scenario_id,rep,method,tuning_seconds,final_fit_seconds\n";
}

std::string timing_row(const MethodTiming& t)
{
    return std::to_string(t.scenario_id) + "," + std::to_string(t.rep) + "," + t.method +
           "," + io::format_double(t.tuning_seconds) + "," +
           io::format_double(t.final_fit_seconds) + "\n";
}

void append_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out)
    {
        throw IoError("cannot append to " + path.string());
    }
    out << text;
    if (!out)
    {
        throw IoError("write failed: " + path.string());
    }
}

// Model with no peptide terms: intercept plus the offset model, if any.
FittedModel intercept_only_model(Method method, const FitContext& ctx)
{
    FittedModel m;
    m.method = method;
    m.intercept = ctx.y_mean();
    m.transform = ctx.bundle().transform;
    m.offset_model = ctx.offset_model;
    m.intercept_only = true;
    return m;
}

struct TunedFit
{
    FittedModel model;
    std::optional<TuningResult> tuning;
    bool no_predictors = false;
};

TunedFit tuned_fit(Method method, const Dataset& data, const CvPlan& plan,
                   const PipelineOptions& popts, int grid_size)
{
    TunedFit out;
    const auto full = make_context(data, popts);
    if (full.q() == 0)
    {
        out.model = intercept_only_model(method, full);
        out.no_predictors = true;
        return out;
    }
    out.tuning = tune(method, data, plan, popts, grid_size);
    out.model = fit_method(method, full, out.tuning->chosen, popts.true_set);
    return out;
}

json manifest_base(const std::string& command, std::uint64_t seed)
{
    json m;
    m["command"] = command;
    m["software"] = "zigar";
    m["version"] = ZIGAR_VERSION;
    m["master_seed"] = seed;
    return m;
}

}  // namespace

std::vector<Method> default_methods()
{
    return {Method::ridge,       Method::lasso,         Method::lasso_ridge,
            Method::ridge_lasso, Method::ridge_garrote, Method::oracle_ridge};
}

std::vector<Method> parse_methods(const std::string& comma_list)
{
    std::vector<Method> out;
    for (const auto& name : io::split(comma_list, ','))
    {
        if (name == "all")
        {
            for (auto m : {Method::oracle_ols, Method::oracle_ridge, Method::ridge,
                           Method::lasso, Method::lasso_ridge, Method::ridge_lasso,
                           Method::ridge_garrote})
            {
                if (std::find(out.begin(), out.end(), m) == out.end())
                {
                    out.push_back(m);
                }
            }
            continue;
        }
        const auto m = method_from_string(name);
        if (std::find(out.begin(), out.end(), m) == out.end())
        {
            out.push_back(m);
        }
    }
    if (out.empty())
    {
        throw ConfigError("no methods given");
    }
    return out;
}

std::vector<int> parse_scenario_selector(const std::string& text)
{
    std::set<int> ids;
    auto parse_id = [](const std::string& s)
    {
        std::size_t used = 0;
        int v = 0;
        try
        {
            v = std::stoi(s, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used != s.size() || v < 1 || v > kScenarioCount)
        {
            throw ConfigError("invalid scenario id '" + s + "' (expected 1.." +
                              std::to_string(kScenarioCount) + ")");
        }
        return v;
    };
    for (const auto& part : io::split(text, ','))
    {
        if (part == "all")
        {
            for (int i = 1; i <= kScenarioCount; ++i)
            {
                ids.insert(i);
            }
            continue;
        }
        const auto dash = part.find('-');
        if (dash == std::string::npos)
        {
            ids.insert(parse_id(part));
            continue;
        }
        const int lo = parse_id(io::trim(part.substr(0, dash)));
        const int hi = parse_id(io::trim(part.substr(dash + 1)));
        if (lo > hi)
        {
            throw ConfigError("empty scenario range '" + part + "'");
        }
        for (int i = lo; i <= hi; ++i)
        {
            ids.insert(i);
        }
    }
    if (ids.empty())
    {
        throw ConfigError("no scenarios selected");
    }
    return {ids.begin(), ids.end()};
}

TransformOptions simulation_transform()
{
    return {LogBase::natural, ImputeScale::raw, true};
}

TransformOptions data_transform()
{
    return {LogBase::base2, ImputeScale::transformed, true};
}

ReplicateOutcome run_replicate(const sim::ScenarioConfig& config,
                               const sim::GroundTruth& truth,
                               const sim::ValidationSet& validation, int rep,
                               const std::vector<Method>& methods, const CvSettings& cv)
{
    ReplicateOutcome out;
    const auto draw = sim::generate_replicate(config, truth, rep);
    Dataset data;
    data.z = draw.z_a;
    data.y = draw.y;
    data.covariates.resize(data.y.size(), 0);
    PipelineOptions popts;
    popts.transform = simulation_transform();
    popts.true_set = truth.true_set;
    popts.threads = 1;
    const auto plan = CvPlan::make(data.rows(), cv.folds, cv.repeats,
                                   derive_seed(sim::scenario_seed(config),
                                               {stream::folds, static_cast<std::uint64_t>(rep)}));

    for (auto method : methods)
    {
        MethodTiming timing{config.id, rep, to_string(method)};
        try
        {
            auto t0 = std::chrono::steady_clock::now();
            const auto tuning = tune(method, data, plan, popts, cv.grid_size);
            timing.tuning_seconds = seconds_since(t0);
            t0 = std::chrono::steady_clock::now();
            const auto model = fit_pipeline(method, data, tuning.chosen, popts);
            timing.final_fit_seconds = seconds_since(t0);

            const auto yhat = predict(model, validation.logs);
            const auto pm = prediction_metrics(validation.y, yhat);
            const auto selected = selected_set(model);
            const auto sm = selection_metrics(selected, truth.true_set, config.q);

            ReplicateRecord r;
            r.scenario_id = config.id;
            r.rep_index = rep;
            r.method = to_string(method);
            r.rmspe = pm.rmspe;
            r.r2 = pm.r2;
            r.calib_slope = pm.calib_slope;
            r.q_selected = sm.q_selected;
            r.tpdr = sm.tpdr;
            r.fndr = sm.fndr;
            r.selected_ids = selected;
            r.lambda1 = tuning.chosen.lambda1;
            r.lambda2 = tuning.chosen.lambda2;
            r.fit_seconds = timing.tuning_seconds + timing.final_fit_seconds;
            out.records.push_back(std::move(r));
        }
        catch (const std::exception& e)
        {
            out.records.push_back(failed_record(config.id, rep, method, e.what()));
        }
        out.timings.push_back(timing);
    }

    std::optional<double> oracle;
    for (const auto& r : out.records)
    {
        if (r.method == to_string(Method::oracle_ridge) && r.status == "ok")
        {
            oracle = r.rmspe;
        }
    }
    for (auto& r : out.records)
    {
        if (oracle && r.rmspe)
        {
            r.relative_rmspe = relative_rmspe(*r.rmspe, *oracle);
        }
    }
    return out;
}

ScenarioOutcome run_scenario(const sim::ScenarioConfig& config,
                             const std::vector<Method>& methods, const CvSettings& cv,
                             int threads, const Logger& log)
{
    ScenarioOutcome out;
    out.config = config;
    out.truth = sim::make_truth(config);
    const auto validation = sim::generate_validation(config, out.truth);

    std::vector<ReplicateOutcome> reps(static_cast<std::size_t>(config.reps));
    std::mutex log_mutex;
    int done = 0;
    parallel_for(reps.size(), threads, [&](std::size_t i)
    {
        reps[i] = run_replicate(config, out.truth, validation, static_cast<int>(i),
                                methods, cv);
        if (log)
        {
            std::lock_guard lock(log_mutex);
            ++done;
            log("scenario " + std::to_string(config.id) + ": replicate " +
                std::to_string(done) + "/" + std::to_string(config.reps) + " done");
        }
    });
    for (auto& r : reps)
    {
        out.records.insert(out.records.end(), r.records.begin(), r.records.end());
        out.timings.insert(out.timings.end(), r.timings.begin(), r.timings.end());
    }
    std::vector<std::string> ids;
    for (int j = 0; j < config.q; ++j)
    {
        ids.push_back(sim::predictor_id(j));
    }
    out.summary = summarize(out.records, ids);
    return out;
}

int simulate(const SimulateOptions& options, const Logger& log)
{
    const auto started = utc_now();
    auto reps = options.reps;
    auto cv = options.cv;
    if (options.paper_scale)
    {
        reps = kPaperReps;
        cv = kPaperCv;
    }
    if (reps < 1 || cv.grid_size < 2 || cv.folds < 2 || cv.repeats < 1)
    {
        throw ConfigError("need reps >= 1, grid size >= 2, folds >= 2, repeats >= 1");
    }
    if (options.methods.empty())
    {
        throw ConfigError("no methods given");
    }
    const int threads = options.threads > 0 ? options.threads : default_thread_count();
    const auto all = sim::enumerate_scenarios();
    std::vector<int> ids = options.scenario_ids;
    if (ids.empty())
    {
        for (const auto& c : all)
        {
            ids.push_back(c.id);
        }
    }

    const fs::path out(options.out_dir);
    fs::create_directories(out);
    io::write_text(out / "replicates.csv", replicates_csv_header());
    io::write_text(out / "summary.csv", summary_csv_header());
    io::write_text(out / "pif.csv", pif_csv_header());
    io::write_text(out / "timings.csv", timings_csv_header());

    int failures = 0;
    for (int id : ids)
    {
        if (id < 1 || id > static_cast<int>(all.size()))
        {
            throw ConfigError("invalid scenario id " + std::to_string(id));
        }
        auto config = all[static_cast<std::size_t>(id - 1)];
        config.reps = reps;
        config.master_seed = options.seed;
        config.n_valid = options.n_valid;
        config.n_pilot = options.n_pilot;
        log_line(log, "scenario " + std::to_string(id) + " (" + sim::to_string(config.ogm) +
                          ", n=" + std::to_string(config.n_train) + ", " +
                          sim::to_string(config.ud) + ")");
        const auto result = run_scenario(config, options.methods, cv, threads, log);

        io::write_text(out / ("scenario_" + std::to_string(id) + ".json"),
                       config.to_json() + "\n");
        io::write_text(out / ("truth_" + std::to_string(id) + ".json"),
                       result.truth.to_json() + "\n");
        std::string rows;
        for (const auto& r : result.records)
        {
            rows += replicate_csv_row(r);
            failures += r.status != "ok";
        }
        append_text(out / "replicates.csv", rows);
        append_text(out / "summary.csv", summary_csv_rows(result.summary));
        append_text(out / "pif.csv", pif_csv_rows(result.summary));
        std::string trows;
        for (const auto& t : result.timings)
        {
            trows += timing_row(t);
        }
        append_text(out / "timings.csv", trows);
    }

    auto m = manifest_base("simulate", options.seed);
    m["config"] = json{{"scenarios", ids},
                       {"reps", reps},
                       {"methods", method_names(options.methods)},
                       {"cv", cv_json(cv)},
                       {"paper_scale", options.paper_scale},
                       {"n_valid", options.n_valid},
                       {"n_pilot", options.n_pilot},
                       {"transform", transform_json(simulation_transform())},
                       {"threads", threads}};
    m["started"] = started;
    m["finished"] = utc_now();
    m["failures"] = failures;
    m["outputs"] = {"replicates.csv", "summary.csv", "pif.csv", "timings.csv",
                    "scenario_<id>.json", "truth_<id>.json"};
    m["timing_log"] = "timings.csv";
    io::write_text(out / "manifest.json", m.dump(2) + "\n");
    return failures;
}

void write_scenarios(const std::string& path)
{
    io::write_text(path, sim::scenarios_csv(sim::enumerate_scenarios()));
}

Dataset load_dataset(const std::string& csv_path, const std::string& outcome,
                     const std::vector<std::string>& covariates,
                     const std::string& id_column)
{
    const auto table = io::read_csv(csv_path);
    if (table.rows.empty())
    {
        throw SchemaError(csv_path + ": no data rows");
    }
    const auto y_col = table.column(outcome);
    std::vector<std::size_t> cov_cols;
    for (const auto& c : covariates)
    {
        cov_cols.push_back(table.column(c));
    }
    std::optional<std::size_t> id_col;
    if (!id_column.empty())
    {
        id_col = table.column(id_column);
    }
    std::vector<std::size_t> pep_cols;
    std::vector<std::string> pep_ids;
    for (std::size_t c = 0; c < table.header.size(); ++c)
    {
        if (c == y_col || (id_col && c == *id_col) ||
            std::find(cov_cols.begin(), cov_cols.end(), c) != cov_cols.end())
        {
            continue;
        }
        pep_cols.push_back(c);
        pep_ids.push_back(table.header[c]);
    }

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    Dataset d;
    d.y.resize(n);
    d.covariates.resize(n, static_cast<Eigen::Index>(cov_cols.size()));
    d.covariate_names = covariates;
    d.z.values.resize(n, static_cast<Eigen::Index>(pep_cols.size()));
    d.z.column_ids = pep_ids;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        const std::string where = " (row " + std::to_string(i + 1) + ")";
        auto numeric = [&](std::size_t c)
        {
            const double v = io::parse_double(row.at(c), table.header[c] + where);
            if (!std::isfinite(v))
            {
                throw SchemaError("column '" + table.header[c] + "'" + where +
                                  ": missing or non-finite value");
            }
            return v;
        };
        d.y[i] = numeric(y_col);
        for (std::size_t k = 0; k < cov_cols.size(); ++k)
        {
            d.covariates(i, static_cast<Eigen::Index>(k)) = numeric(cov_cols[k]);
        }
        for (std::size_t k = 0; k < pep_cols.size(); ++k)
        {
            const double v = numeric(pep_cols[k]);
            if (v < 0.0)
            {
                throw InvalidInput("column '" + table.header[pep_cols[k]] + "'" + where +
                                   ": negative intensity " + io::format_double(v));
            }
            d.z.values(i, static_cast<Eigen::Index>(k)) = v;
        }
        d.z.row_ids.push_back(id_col ? row.at(*id_col) : "r" + std::to_string(i + 1));
    }
    return d;
}

FitSummary fit_dataset(Method method, const Dataset& data, const CvPlan& plan,
                       const FitOptions& options)
{
    if (is_oracle(method))
    {
        throw ConfigError(std::string(to_string(method)) +
                          " needs the true predictor set and only runs in simulations");
    }
    PipelineOptions popts;
    popts.transform = data_transform();
    popts.threads = options.threads > 0 ? options.threads : default_thread_count();

    FitSummary s;
    s.method = method;
    auto full = tuned_fit(method, data, plan, popts, options.cv.grid_size);
    s.model = std::move(full.model);
    if (full.tuning)
    {
        s.tuning = std::move(*full.tuning);
    }
    else
    {
        s.tuning.method = method;
    }
    if (full.no_predictors)
    {
        s.warnings.push_back("no peptides retained; fitted the intercept" +
                             std::string(data.has_covariates() ? " and covariate offset" : "") +
                             " only");
    }
    s.selected = selected_set(s.model);

    if (options.outer_folds >= 2)
    {
        const auto outer = CvPlan::make(data.rows(), options.outer_folds, 1,
                                        derive_seed(options.seed, {stream::folds, 1000}));
        Eigen::VectorXd pooled(data.rows());
        double fold_sum = 0.0;
        for (int f = 0; f < options.outer_folds; ++f)
        {
            const auto train_rows = outer.train_rows(0, f);
            const auto test_rows = outer.test_rows(0, f);
            const auto train = data.subset(train_rows);
            const auto inner = CvPlan::make(train.rows(), options.cv.folds, options.cv.repeats,
                                            derive_seed(options.seed,
                                                        {stream::folds, 2000 + static_cast<std::uint64_t>(f)}));
            const auto fitted = tuned_fit(method, train, inner, popts, options.cv.grid_size);
            const auto ctx = make_context(train, popts);
            const auto held = prepare_held_out(ctx, data.subset(test_rows));
            const auto yhat = predict(fitted.model, held.bundle, held.offset);
            for (std::size_t i = 0; i < test_rows.size(); ++i)
            {
                pooled[test_rows[i]] = yhat[static_cast<Eigen::Index>(i)];
            }
            fold_sum += rmspe(held.y, yhat);
        }
        s.cv_metrics = prediction_metrics(data.y, pooled);
        s.cv_mean_fold_rmspe = fold_sum / options.outer_folds;
    }
    return s;
}

std::vector<FitSummary> fit(const FitOptions& options, const Logger& log)
{
    const auto started = utc_now();
    if (options.methods.empty())
    {
        throw ConfigError("no methods given");
    }
    if (!(options.max_pmv >= 0.0 && options.max_pmv <= 1.0))
    {
        throw ConfigError("max_pmv must lie in [0, 1]");
    }
    auto data = load_dataset(options.data_csv, options.outcome, options.covariates,
                             options.id_column);
    data.z.validate();
    const auto q_in = data.z.cols();
    data.z = filter_max_pmv(data.z, options.max_pmv);
    log_line(log, "retained " + std::to_string(data.z.cols()) + " of " +
                      std::to_string(q_in) + " peptides at max PMV share " +
                      io::format_double(options.max_pmv));

    // One partition shared by every method.
    const auto plan = CvPlan::make(data.rows(), options.cv.folds, options.cv.repeats,
                                   derive_seed(options.seed, {stream::folds}));

    const fs::path out(options.out_dir);
    fs::create_directories(out);
    {
        std::string folds = "row_id";
        for (int r = 0; r < plan.repeats; ++r)
        {
            folds += ",repeat" + std::to_string(r + 1);
        }
        folds += "\n";
        for (Eigen::Index i = 0; i < plan.rows(); ++i)
        {
            folds += io::quote_csv(data.z.row_ids[static_cast<std::size_t>(i)]);
            for (int r = 0; r < plan.repeats; ++r)
            {
                folds += "," + std::to_string(plan.fold_of[static_cast<std::size_t>(r)]
                                                          [static_cast<std::size_t>(i)] + 1);
            }
            folds += "\n";
        }
        io::write_text(out / "folds.csv", folds);
    }

    std::vector<FitSummary> results;
    std::string metrics =
        "method,lambda1,lambda2,q_selected,cv_rmspe,cv_r2,cv_calib_slope,"
        "cv_mean_fold_rmspe,tuning_cv_rmspe\n";
    json timings = json::array();
    for (auto method : options.methods)
    {
        log_line(log, std::string("fitting ") + to_string(method));
        const auto t0 = std::chrono::steady_clock::now();
        auto s = fit_dataset(method, data, plan, options);
        const double secs = seconds_since(t0);
        timings.push_back({{"method", to_string(method)}, {"seconds", secs}});
        for (const auto& w : s.warnings)
        {
            log_line(log, "warning: " + w);
        }
        const std::string name = to_string(method);
        io::write_text(out / ("coefficients_" + name + ".csv"), coefficients_csv(s.model));
        std::string sel;
        for (const auto& id : s.selected)
        {
            sel += id + "\n";
        }
        io::write_text(out / ("selected_" + name + ".txt"), sel);
        if (s.tuning.mean_cv_rmspe.size() > 0)
        {
            io::write_text(out / ("tuning_" + name + ".csv"), s.tuning.to_csv());
        }
        std::optional<double> tuned;
        if (s.tuning.mean_cv_rmspe.size() > 0)
        {
            const double v = s.tuning.mean_cv_rmspe(s.tuning.chosen_row, s.tuning.chosen_col);
            if (!std::isnan(v))
            {
                tuned = v;
            }
        }
        metrics += name + "," +
                   (s.model.intercept_only && !s.tuning.mean_cv_rmspe.size()
                        ? std::string("NA")
                        : io::format_double(s.model.penalties.lambda1)) +
                   "," + io::format_optional(s.model.penalties.lambda2) + "," +
                   std::to_string(s.selected.size()) + "," +
                   (s.cv_metrics ? io::format_double(s.cv_metrics->rmspe) : "NA") + "," +
                   io::format_optional(s.cv_metrics ? s.cv_metrics->r2 : std::nullopt) + "," +
                   io::format_optional(s.cv_metrics ? s.cv_metrics->calib_slope
                                                    : std::nullopt) +
                   "," + io::format_optional(s.cv_mean_fold_rmspe) + "," +
                   io::format_optional(tuned) + "\n";
        results.push_back(std::move(s));
    }
    io::write_text(out / "metrics.csv", metrics);

    auto m = manifest_base("fit", options.seed);
    json warnings = json::array();
    for (const auto& r : results)
    {
        for (const auto& w : r.warnings)
        {
            warnings.push_back(std::string(to_string(r.method)) + ": " + w);
        }
    }
    m["config"] = json{{"data_csv", options.data_csv},
                       {"outcome", options.outcome},
                       {"covariates", options.covariates},
                       {"id_column", options.id_column},
                       {"methods", method_names(options.methods)},
                       {"max_pmv", options.max_pmv},
                       {"cv", cv_json(options.cv)},
                       {"outer_folds", options.outer_folds},
                       {"transform", transform_json(data_transform())}};
    m["rows"] = data.rows();
    m["peptides_in"] = q_in;
    m["peptides_retained"] = data.z.cols();
    m["warnings"] = warnings;
    m["started"] = started;
    m["finished"] = utc_now();
    m["timings"] = timings;
    io::write_text(out / "manifest.json", m.dump(2) + "\n");
    return results;
}

void transform(const TransformCmdOptions& options, const Logger& log)
{
    const auto started = utc_now();
    const auto table = io::read_csv(options.data_csv);
    std::optional<std::size_t> id_col;
    if (!options.id_column.empty())
    {
        id_col = table.column(options.id_column);
    }
    std::set<std::size_t> skip;
    for (const auto& c : options.drop_columns)
    {
        skip.insert(table.column(c));
    }
    IntensityMatrix z;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < table.header.size(); ++c)
    {
        if ((id_col && c == *id_col) || skip.count(c))
        {
            continue;
        }
        cols.push_back(c);
        z.column_ids.push_back(table.header[c]);
    }
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    z.values.resize(n, static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < cols.size(); ++k)
        {
            const auto& name = table.header[cols[k]];
            const double v = io::parse_double(row.at(cols[k]),
                                              name + " (row " + std::to_string(i + 1) + ")");
            if (!std::isfinite(v) || v < 0.0)
            {
                throw InvalidInput("column '" + name + "' (row " + std::to_string(i + 1) +
                                   "): intensities must be finite and nonnegative");
            }
            z.values(i, static_cast<Eigen::Index>(k)) = v;
        }
        z.row_ids.push_back(id_col ? row.at(*id_col) : "r" + std::to_string(i + 1));
    }
    z.validate();

    ComponentBundle bundle;
    if (!options.stats_json.empty())
    {
        auto stats = std::make_shared<const TransformStats>(
            transform_stats_from_json(io::read_text(options.stats_json)));
        bundle = apply_transform(z, stats);
    }
    else
    {
        z = filter_max_pmv(z, options.max_pmv);
        bundle = prepare_components(
            z, {options.log_base, ImputeScale::transformed, options.standardize});
    }
    for (const auto& [id, why] : bundle.transform->degenerate)
    {
        log_line(log, "dropped column " + id + ": " + why);
    }

    const fs::path out(options.out_dir);
    fs::create_directories(out);
    if (options.strategy == Strategy::components)
    {
        io::write_matrix_csv(out / "U.csv", bundle.U, z.row_ids, bundle.column_ids());
        io::write_matrix_csv(out / "D.csv", bundle.D, z.row_ids, bundle.column_ids());
    }
    else
    {
        io::write_matrix_csv(out / "X.csv", bundle.X, z.row_ids, bundle.column_ids());
    }
    io::write_text(out / "transform_stats.json",
                   transform_stats_to_json(*bundle.transform) + "\n");

    auto m = manifest_base("transform", 0);
    m["config"] = json{{"data_csv", options.data_csv},
                       {"strategy", options.strategy == Strategy::components ? "components"
                                                                             : "impute"},
                       {"id_column", options.id_column},
                       {"drop_columns", options.drop_columns},
                       {"stats_json", options.stats_json},
                       {"max_pmv", options.max_pmv},
                       {"standardize", options.standardize},
                       {"log_base", to_string(options.log_base)}};
    m["rows"] = n;
    m["columns_retained"] = bundle.column_ids().size();
    m["started"] = started;
    m["finished"] = utc_now();
    io::write_text(out / "manifest.json", m.dump(2) + "\n");
}

}  // namespace zigar::study

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

#include "zigar/error.hpp"
#include "zigar/io.hpp"
#include "zigar/random.hpp"
#include "zigar/study.hpp"

#include <new>
#include <string>

struct zigar_intensity
{
    zigar::IntensityMatrix z;
};

struct zigar_model
{
    zigar::FittedModel model;
    std::vector<std::string> selected;
    std::string coefficients;
};

namespace
{

thread_local std::string last_error;

zigar_status fail(zigar_status status, const std::string& message)
{
    last_error = message;
    return status;
}

template <class Fn>
zigar_status guarded(Fn&& fn)
{
    try
    {
        fn();
        last_error.clear();
        return ZIGAR_OK;
    }
    catch (const zigar::Error& e)
    {
        return fail(static_cast<zigar_status>(e.code()), e.what());
    }
    catch (const std::bad_alloc&)
    {
        return fail(ZIGAR_ERR_INTERNAL, "out of memory");
    }
    catch (const std::exception& e)
    {
        return fail(ZIGAR_ERR_INTERNAL, e.what());
    }
    catch (...)
    {
        return fail(ZIGAR_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what)
{
    if (p == nullptr)
    {
        throw zigar::InvalidInput(std::string(what) + " must not be NULL");
    }
}

std::string str(const char* s)
{
    return s ? std::string(s) : std::string();
}

std::vector<std::string> list(const char* s)
{
    return s ? zigar::io::split(s, ',') : std::vector<std::string>{};
}

zigar::study::Logger logger(zigar_log_fn fn, void* user)
{
    if (fn == nullptr)
    {
        return {};
    }
    return [fn, user](const std::string& msg) { fn(msg.c_str(), user); };
}

Eigen::VectorXd outcome(const double* y, Eigen::Index n)
{
    require(y, "y");
    return Eigen::Map<const Eigen::VectorXd>(y, n);
}

zigar_model* wrap(zigar::FittedModel model)
{
    auto* m = new zigar_model{std::move(model), {}, {}};
    m->selected = zigar::selected_set(m->model);
    m->coefficients = zigar::coefficients_csv(m->model);
    return m;
}

zigar::PipelineOptions pipeline(int log2)
{
    zigar::PipelineOptions p;
    p.transform = zigar::study::data_transform();
    if (!log2)
    {
        p.transform.log_base = zigar::LogBase::natural;
    }
    return p;
}

}  // namespace

extern "C" {

const char* zigar_last_error(void)
{
    return last_error.c_str();
}

const char* zigar_version(void)
{
    return ZIGAR_VERSION;
}

const char* zigar_status_name(zigar_status status)
{
    switch (status)
    {
    case ZIGAR_OK:
        return "ok";
    case ZIGAR_ERR_INVALID_INPUT:
        return "invalid input";
    case ZIGAR_ERR_DEGENERATE_COLUMN:
        return "degenerate column";
    case ZIGAR_ERR_RANK_DEFICIENT:
        return "rank deficient";
    case ZIGAR_ERR_CONVERGENCE:
        return "convergence failure";
    case ZIGAR_ERR_SCHEMA:
        return "schema error";
    case ZIGAR_ERR_IO:
        return "I/O error";
    case ZIGAR_ERR_CONFIG:
        return "configuration error";
    case ZIGAR_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

zigar_status zigar_write_scenarios(const char* path)
{
    return guarded([&]
    {
        require(path, "path");
        zigar::study::write_scenarios(path);
    });
}

void zigar_simulate_options_init(zigar_simulate_options* o)
{
    if (o == nullptr)
    {
        return;
    }
    const zigar::study::SimulateOptions d;
    *o = zigar_simulate_options{};
    o->scenarios = "all";
    o->reps = d.reps;
    o->methods = nullptr;
    o->seed = d.seed;
    o->out_dir = "zigar-sim";
    o->grid_size = d.cv.grid_size;
    o->cv_folds = d.cv.folds;
    o->cv_repeats = d.cv.repeats;
    o->threads = 0;
    o->paper_scale = 0;
    o->n_valid = d.n_valid;
    o->n_pilot = d.n_pilot;
}

zigar_status zigar_simulate(const zigar_simulate_options* o, int* failures)
{
    return guarded([&]
    {
        require(o, "options");
        zigar::study::SimulateOptions s;
        s.scenario_ids = zigar::study::parse_scenario_selector(o->scenarios ? o->scenarios : "all");
        s.reps = o->reps;
        if (o->methods != nullptr)
        {
            s.methods = zigar::study::parse_methods(o->methods);
        }
        s.seed = o->seed;
        s.out_dir = o->out_dir ? o->out_dir : "zigar-sim";
        s.cv = {o->grid_size, o->cv_folds, o->cv_repeats};
        s.threads = o->threads;
        s.paper_scale = o->paper_scale != 0;
        s.n_valid = o->n_valid;
        s.n_pilot = o->n_pilot;
        const int f = zigar::study::simulate(s, logger(o->log, o->log_user));
        if (failures)
        {
            *failures = f;
        }
    });
}

void zigar_fit_options_init(zigar_fit_options* o)
{
    if (o == nullptr)
    {
        return;
    }
    const zigar::study::FitOptions d;
    *o = zigar_fit_options{};
    o->methods = "ridge-garrote";
    o->max_pmv = d.max_pmv;
    o->grid_size = d.cv.grid_size;
    o->cv_folds = d.cv.folds;
    o->cv_repeats = d.cv.repeats;
    o->outer_folds = d.outer_folds;
    o->seed = d.seed;
    o->out_dir = "zigar-fit";
}

zigar_status zigar_fit_csv(const zigar_fit_options* o)
{
    return guarded([&]
    {
        require(o, "options");
        require(o->data_csv, "data_csv");
        require(o->outcome, "outcome");
        zigar::study::FitOptions f;
        f.data_csv = o->data_csv;
        f.outcome = o->outcome;
        f.covariates = list(o->covariates);
        f.id_column = str(o->id_column);
        f.methods = zigar::study::parse_methods(o->methods ? o->methods : "ridge-garrote");
        f.max_pmv = o->max_pmv;
        f.cv = {o->grid_size, o->cv_folds, o->cv_repeats};
        f.outer_folds = o->outer_folds;
        f.seed = o->seed;
        f.out_dir = o->out_dir ? o->out_dir : "zigar-fit";
        f.threads = o->threads;
        zigar::study::fit(f, logger(o->log, o->log_user));
    });
}

void zigar_transform_options_init(zigar_transform_options* o)
{
    if (o == nullptr)
    {
        return;
    }
    *o = zigar_transform_options{};
    o->strategy = ZIGAR_STRATEGY_COMPONENTS;
    o->out_dir = "zigar-transform";
    o->max_pmv = 1.0;
    o->standardize = 1;
    o->log2 = 1;
}

zigar_status zigar_transform_csv(const zigar_transform_options* o)
{
    return guarded([&]
    {
        require(o, "options");
        require(o->data_csv, "data_csv");
        zigar::study::TransformCmdOptions t;
        t.data_csv = o->data_csv;
        t.strategy = o->strategy == ZIGAR_STRATEGY_IMPUTE ? zigar::study::Strategy::impute
                                                          : zigar::study::Strategy::components;
        t.out_dir = o->out_dir ? o->out_dir : "zigar-transform";
        t.id_column = str(o->id_column);
        t.drop_columns = list(o->drop_columns);
        t.stats_json = str(o->stats_json);
        t.max_pmv = o->max_pmv;
        t.standardize = o->standardize != 0;
        t.log_base = o->log2 ? zigar::LogBase::base2 : zigar::LogBase::natural;
        zigar::study::transform(t, logger(o->log, o->log_user));
    });
}

zigar_status zigar_intensity_create(const double* values, size_t n, size_t q,
                                    const char* const* column_ids, zigar_intensity** out)
{
    return guarded([&]
    {
        require(out, "out");
        *out = nullptr;
        if (n > 0 && q > 0)
        {
            require(values, "values");
        }
        Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(
            values, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q));
        auto z = zigar::IntensityMatrix::with_default_ids(std::move(m));
        if (column_ids != nullptr)
        {
            for (size_t j = 0; j < q; ++j)
            {
                require(column_ids[j], "column id");
                z.column_ids[j] = column_ids[j];
            }
        }
        z.validate();
        *out = new zigar_intensity{std::move(z)};
    });
}

void zigar_intensity_free(zigar_intensity* z)
{
    delete z;
}

void zigar_model_options_init(zigar_model_options* o)
{
    if (o == nullptr)
    {
        return;
    }
    *o = zigar_model_options{};
    o->method = "ridge-garrote";
    o->grid_size = 20;
    o->cv_folds = 10;
    o->cv_repeats = 2;
    o->seed = 20240101;
    o->log2 = 1;
    o->threads = 1;
}

zigar_status zigar_model_fit(const zigar_intensity* z, const double* y,
                             const zigar_model_options* o, zigar_model** out)
{
    return guarded([&]
    {
        require(z, "intensity");
        require(o, "options");
        require(out, "out");
        *out = nullptr;
        const auto method = zigar::method_from_string(str(o->method));
        if (zigar::is_oracle(method))
        {
            throw zigar::ConfigError("oracle methods need the true predictor set");
        }
        zigar::Dataset data;
        data.z = z->z;
        data.y = outcome(y, z->z.rows());
        data.covariates.resize(data.y.size(), 0);
        auto popts = pipeline(o->log2);
        popts.threads = o->threads;
        const auto plan = zigar::CvPlan::make(data.rows(), o->cv_folds, o->cv_repeats,
                                              zigar::derive_seed(o->seed, {zigar::stream::folds}));
        const auto tuning = zigar::tune(method, data, plan, popts, o->grid_size);
        *out = wrap(zigar::fit_pipeline(method, data, tuning.chosen, popts));
    });
}

zigar_status zigar_model_fit_fixed(const zigar_intensity* z, const double* y,
                                   const char* method, double lambda1, double lambda2,
                                   int log2, zigar_model** out)
{
    return guarded([&]
    {
        require(z, "intensity");
        require(out, "out");
        *out = nullptr;
        const auto m = zigar::method_from_string(str(method));
        if (zigar::is_oracle(m))
        {
            throw zigar::ConfigError("oracle methods need the true predictor set");
        }
        zigar::Dataset data;
        data.z = z->z;
        data.y = outcome(y, z->z.rows());
        data.covariates.resize(data.y.size(), 0);
        zigar::Penalties p{lambda1, {}};
        if (zigar::is_two_stage(m))
        {
            p.lambda2 = lambda2;
        }
        *out = wrap(zigar::fit_pipeline(m, data, p, pipeline(log2)));
    });
}

void zigar_model_free(zigar_model* model)
{
    delete model;
}

zigar_status zigar_model_predict(const zigar_model* model, const zigar_intensity* z,
                                 double* yhat)
{
    return guarded([&]
    {
        require(model, "model");
        require(z, "intensity");
        require(yhat, "yhat");
        const auto p = zigar::predict(model->model, z->z);
        Eigen::Map<Eigen::VectorXd>(yhat, p.size()) = p;
    });
}

zigar_status zigar_model_intercept(const zigar_model* model, double* out)
{
    return guarded([&]
    {
        require(model, "model");
        require(out, "out");
        *out = model->model.intercept;
    });
}

zigar_status zigar_model_penalties(const zigar_model* model, double* lambda1, double* lambda2)
{
    return guarded([&]
    {
        require(model, "model");
        if (lambda1)
        {
            *lambda1 = model->model.penalties.lambda1;
        }
        if (lambda2)
        {
            *lambda2 = model->model.penalties.lambda2.value_or(
                std::numeric_limits<double>::quiet_NaN());
        }
    });
}

zigar_status zigar_model_selected_count(const zigar_model* model, size_t* count)
{
    return guarded([&]
    {
        require(model, "model");
        require(count, "count");
        *count = model->selected.size();
    });
}

const char* zigar_model_selected_id(const zigar_model* model, size_t index)
{
    if (model == nullptr || index >= model->selected.size())
    {
        last_error = "selected predictor index out of range";
        return nullptr;
    }
    return model->selected[index].c_str();
}

const char* zigar_model_coefficients_csv(const zigar_model* model)
{
    if (model == nullptr)
    {
        last_error = "model must not be NULL";
        return nullptr;
    }
    return model->coefficients.c_str();
}

}  // extern "C"

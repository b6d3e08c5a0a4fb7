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

#include "zigar/metrics.hpp"

#include "zigar/error.hpp"
#include "zigar/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace zigar
{

PredictionMetrics prediction_metrics(const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& yhat)
{
    if (y.size() != yhat.size() || y.size() < 2)
    {
        throw InvalidInput("prediction metrics need equal lengths >= 2");
    }
    PredictionMetrics m;
    const double n = static_cast<double>(y.size());
    m.rmspe = std::sqrt((y - yhat).squaredNorm() / n);
    const Eigen::ArrayXd dy = y.array() - y.mean();
    const Eigen::ArrayXd dp = yhat.array() - yhat.mean();
    const double spp = dp.square().sum();
    const double syy = dy.square().sum();
    const double syp = (dy * dp).sum();
    if (spp > 0.0)
    {
        m.calib_slope = syp / spp;
        if (syy > 0.0)
        {
            m.r2 = std::clamp(syp * syp / (spp * syy), 0.0, 1.0);
        }
    }
    return m;
}

std::optional<double> relative_rmspe(double method_rmspe, double oracle_rmspe)
{
    if (!(oracle_rmspe > 0.0) || std::isnan(method_rmspe))
    {
        return std::nullopt;
    }
    return method_rmspe / oracle_rmspe;
}

SelectionMetrics selection_metrics(const std::vector<std::string>& selected,
                                   const std::vector<std::string>& true_set, int q)
{
    const std::set<std::string> s(selected.begin(), selected.end());
    const std::set<std::string> t(true_set.begin(), true_set.end());
    if (static_cast<int>(s.size()) > q || static_cast<int>(t.size()) > q)
    {
        throw InvalidInput("selection metrics: more predictors than candidates");
    }
    SelectionMetrics m;
    m.q_selected = static_cast<int>(s.size());
    int hits = 0;
    for (const auto& id : s)
    {
        hits += static_cast<int>(t.count(id));
    }
    if (!s.empty())
    {
        m.tpdr = static_cast<double>(hits) / static_cast<double>(s.size());
    }
    const int unselected = q - m.q_selected;
    if (unselected > 0)
    {
        m.fndr = static_cast<double>(static_cast<int>(t.size()) - hits) / unselected;
    }
    return m;
}

EstimandSummary summarize_values(const std::vector<std::optional<double>>& values)
{
    EstimandSummary s;
    double sum = 0.0;
    for (const auto& v : values)
    {
        if (v && std::isfinite(*v))
        {
            sum += *v;
            ++s.n_defined;
        }
        else
        {
            ++s.n_undefined;
        }
    }
    if (s.n_defined == 0)
    {
        return s;
    }
    const double mean = sum / s.n_defined;
    s.mean = mean;
    if (s.n_defined >= 2)
    {
        double ss = 0.0;
        for (const auto& v : values)
        {
            if (v && std::isfinite(*v))
            {
                ss += (*v - mean) * (*v - mean);
            }
        }
        s.sd = std::sqrt(ss / (s.n_defined - 1));
    }
    return s;
}

std::optional<double> median(std::vector<double> values)
{
    if (values.empty())
    {
        return std::nullopt;
    }
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ScenarioSummary summarize(const std::vector<ReplicateRecord>& records,
                          const std::vector<std::string>& predictor_ids)
{
    ScenarioSummary out;
    out.predictor_ids = predictor_ids;
    std::map<std::string, std::size_t> position;
    for (std::size_t j = 0; j < predictor_ids.size(); ++j)
    {
        position[predictor_ids[j]] = j;
    }
    std::vector<std::pair<int, std::string>> keys;
    std::map<std::pair<int, std::string>, std::vector<const ReplicateRecord*>> groups;
    for (const auto& r : records)
    {
        const auto key = std::make_pair(r.scenario_id, r.method);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted)
        {
            keys.push_back(key);
        }
        it->second.push_back(&r);
    }
    for (const auto& key : keys)
    {
        const auto& rs = groups[key];
        MethodSummary m;
        m.scenario_id = key.first;
        m.method = key.second;
        m.reps = static_cast<int>(rs.size());
        std::vector<std::optional<double>> rmspe, rel, r2, cs, qs, tpdr, fndr;
        std::vector<double> q_defined;
        m.pif.assign(predictor_ids.size(), 0.0);
        for (const auto* r : rs)
        {
            m.failures += r->status != "ok";
            rmspe.push_back(r->rmspe);
            rel.push_back(r->relative_rmspe);
            r2.push_back(r->r2);
            cs.push_back(r->calib_slope);
            tpdr.push_back(r->tpdr);
            fndr.push_back(r->fndr);
            if (r->q_selected)
            {
                qs.emplace_back(static_cast<double>(*r->q_selected));
                q_defined.push_back(static_cast<double>(*r->q_selected));
            }
            else
            {
                qs.emplace_back(std::nullopt);
            }
            for (const auto& id : r->selected_ids)
            {
                const auto it = position.find(id);
                if (it != position.end())
                {
                    m.pif[it->second] += 1.0;
                }
            }
        }
        for (auto& f : m.pif)
        {
            f /= static_cast<double>(m.reps);
        }
        m.rmspe = summarize_values(rmspe);
        m.relative_rmspe = summarize_values(rel);
        m.r2 = summarize_values(r2);
        m.calib_slope = summarize_values(cs);
        m.q_selected = summarize_values(qs);
        m.tpdr = summarize_values(tpdr);
        m.fndr = summarize_values(fndr);
        if (m.rmspe.sd)
        {
            m.mcse_rmspe = *m.rmspe.sd / std::sqrt(static_cast<double>(m.rmspe.n_defined));
        }
        m.median_q_selected = median(q_defined);
        out.methods.push_back(std::move(m));
    }
    return out;
}

namespace
{

std::string opt(const std::optional<double>& v)
{
    return io::format_optional(v);
}

std::string opt(const std::optional<int>& v)
{
    return v ? std::to_string(*v) : "NA";
}

}  // namespace

std::string replicates_csv_header()
{
    return "scenario_id,rep,method,rmspe,relative_rmspe,r2,calib_slope,q_selected,"
           "tpdr,fndr,lambda1,lambda2,selected,status\n";
}

std::string replicate_csv_row(const ReplicateRecord& r)
{
    std::string sel;
    for (std::size_t i = 0; i < r.selected_ids.size(); ++i)
    {
        sel += (i ? ";" : "") + r.selected_ids[i];
    }
    return std::to_string(r.scenario_id) + "," + std::to_string(r.rep_index) + "," +
           r.method + "," + opt(r.rmspe) + "," + opt(r.relative_rmspe) + "," +
           opt(r.r2) + "," + opt(r.calib_slope) + "," + opt(r.q_selected) + "," +
           opt(r.tpdr) + "," + opt(r.fndr) + "," + opt(r.lambda1) + "," +
           opt(r.lambda2) + "," + io::quote_csv(sel) + "," + io::quote_csv(r.status) +
           "\n";
}

std::string summary_csv_header()
{
    std::string h = "scenario_id,method,reps,failures";
    for (const char* e : {"rmspe", "relative_rmspe", "r2", "calib_slope", "q_selected",
                          "tpdr", "fndr"})
    {
        const std::string s(e);
        h += "," + s + "_mean," + s + "_sd," + s + "_n_defined";
    }
    return h + ",mcse_rmspe,median_q_selected\n";
}

std::string summary_csv_rows(const ScenarioSummary& s)
{
    std::string out;
    for (const auto& m : s.methods)
    {
        out += std::to_string(m.scenario_id) + "," + m.method + "," +
               std::to_string(m.reps) + "," + std::to_string(m.failures);
        for (const auto* e : {&m.rmspe, &m.relative_rmspe, &m.r2, &m.calib_slope,
                              &m.q_selected, &m.tpdr, &m.fndr})
        {
            out += "," + opt(e->mean) + "," + opt(e->sd) + "," +
                   std::to_string(e->n_defined);
        }
        out += "," + opt(m.mcse_rmspe) + "," + opt(m.median_q_selected) + "\n";
    }
    return out;
}

std::string pif_csv_header()
{
    return "scenario_id,method,predictor_id,pif\n";
}

std::string pif_csv_rows(const ScenarioSummary& s)
{
    std::string out;
    for (const auto& m : s.methods)
    {
        for (std::size_t j = 0; j < s.predictor_ids.size(); ++j)
        {
            out += std::to_string(m.scenario_id) + "," + m.method + "," +
                   s.predictor_ids[j] + "," + io::format_double(m.pif[j]) + "\n";
        }
    }
    return out;
}

}  // namespace zigar

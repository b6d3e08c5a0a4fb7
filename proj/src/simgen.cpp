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

#include "zigar/simgen.hpp"

#include "zigar/error.hpp"
#include "zigar/io.hpp"
#include "zigar/random.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace zigar::sim
{

namespace
{

// Rows per independently seeded block of a large draw.
constexpr Eigen::Index kBlock = 8192;

double unit_uniform(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::MatrixXd latent_factor(const ScenarioConfig& c)
{
    const Eigen::MatrixXd sigma =
        hub_sigma(c.n_groups, c.group_size, c.rho_hub_max, c.rho_hub_min);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
    {
        throw Error(ErrorCode::internal, "hub correlation is not positive definite");
    }
    return llt.matrixL();
}

// Rows of G = mu + sd * E * L' for one block.
Eigen::MatrixXd latent_block(Eigen::Index rows, const Eigen::MatrixXd& lower,
                             double mu, double sd, std::uint64_t seed)
{
    const auto q = lower.rows();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> e(rows, q);
    Rng rng(seed);
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        for (Eigen::Index j = 0; j < q; ++j)
        {
            e(i, j) = normal(rng);
        }
    }
    Eigen::MatrixXd g = e * lower.transpose();
    g = (sd * g).array() + mu;
    return g;
}

Eigen::MatrixXd latent_log(Eigen::Index n, const Eigen::MatrixXd& lower,
                           double mu, double sd, std::uint64_t seed)
{
    Eigen::MatrixXd g(n, lower.rows());
    for (Eigen::Index start = 0, b = 0; start < n; start += kBlock, ++b)
    {
        const auto rows = std::min(kBlock, n - start);
        g.middleRows(start, rows) = latent_block(
            rows, lower, mu, sd, derive_seed(seed, {static_cast<std::uint64_t>(b)}));
    }
    return g;
}

Eigen::MatrixXd presence_block(Eigen::Index rows, const Eigen::VectorXd& p_struc,
                               std::uint64_t seed)
{
    Eigen::MatrixXd p(rows, p_struc.size());
    Rng rng(seed);
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        for (Eigen::Index j = 0; j < p_struc.size(); ++j)
        {
            p(i, j) = unit_uniform(rng) >= p_struc[j] ? 1.0 : 0.0;
        }
    }
    return p;
}

Eigen::VectorXd noise_block(Eigen::Index rows, double sigma2, std::uint64_t seed)
{
    Eigen::VectorXd e = Eigen::VectorXd::Zero(rows);
    if (sigma2 <= 0.0)
    {
        return e;
    }
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2));
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        e[i] = normal(rng);
    }
    return e;
}

// Analyst intensities of one block: exp(latent) where present and above the
// sampling threshold, else 0.
Eigen::MatrixXd analyst_block(const Eigen::MatrixXd& g,
                              const Eigen::MatrixXd& presence,
                              const Eigen::VectorXd& thresholds)
{
    Eigen::MatrixXd z(g.rows(), g.cols());
    for (Eigen::Index j = 0; j < g.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < g.rows(); ++i)
        {
            const double v = presence(i, j) > 0.0 ? std::exp(g(i, j)) : 0.0;
            z(i, j) = v < thresholds[j] ? 0.0 : v;
        }
    }
    return z;
}

double variance(const Eigen::VectorXd& v)
{
    const double m = v.mean();
    return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

std::vector<std::string> default_ids(int q)
{
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j)
    {
        ids.push_back(predictor_id(j));
    }
    return ids;
}

std::string share_label(int thirds)
{
    return std::to_string(thirds) + "/3";
}

}  // namespace

const char* to_string(Ogm ogm)
{
    switch (ogm)
    {
    case Ogm::A:
        return "A";
    case Ogm::B:
        return "B";
    case Ogm::C:
        return "C";
    }
    return "?";
}

const char* to_string(UdSetting ud)
{
    switch (ud)
    {
    case UdSetting::u_only:
        return "U";
    case UdSetting::u_eq_d:
        return "U=D";
    case UdSetting::u_2d:
        return "U=2D";
    }
    return "?";
}

Ogm ogm_from_string(const std::string& text)
{
    if (text == "A")
    {
        return Ogm::A;
    }
    if (text == "B")
    {
        return Ogm::B;
    }
    if (text == "C")
    {
        return Ogm::C;
    }
    throw ConfigError("unknown OGM '" + text + "' (expected A, B or C)");
}

UdSetting ud_from_string(const std::string& text)
{
    if (text == "U")
    {
        return UdSetting::u_only;
    }
    if (text == "U=D")
    {
        return UdSetting::u_eq_d;
    }
    if (text == "U=2D")
    {
        return UdSetting::u_2d;
    }
    throw ConfigError("unknown U/D setting '" + text + "' (expected U, U=D or U=2D)");
}

std::string predictor_id(int index)
{
    return "p" + std::to_string(index + 1);
}

void ScenarioConfig::validate() const
{
    if (n_groups < 1 || group_size < 1 || q != n_groups * group_size)
    {
        throw ConfigError("q must equal n_groups * group_size");
    }
    if (n_train < 2 || reps < 1 || n_valid < 2 || n_pilot < 2)
    {
        throw ConfigError("sample sizes must be >= 2 and reps >= 1");
    }
    if (!(max_zero >= 0.0 && max_zero < 1.0))
    {
        throw ConfigError("max_zero must lie in [0, 1)");
    }
    if (structural_thirds < 0 || structural_thirds > 3)
    {
        throw ConfigError("structural share must be 0/3 .. 3/3");
    }
    if (!(target_r2 > 0.0 && target_r2 <= 1.0))
    {
        throw ConfigError("target R2 must lie in (0, 1]");
    }
    if (!(rho_hub_min >= 0.0 && rho_hub_min <= rho_hub_max && rho_hub_max < 1.0))
    {
        throw ConfigError("hub correlations need 0 <= min <= max < 1");
    }
    if (!(sd_log >= 0.0) || !std::isfinite(mu_log))
    {
        throw ConfigError("invalid latent log mean or sd");
    }
    if (ogm == Ogm::B && group_size < 5)
    {
        throw ConfigError("OGM B needs groups of at least five predictors");
    }
    if ((ogm == Ogm::A || ogm == Ogm::C) && n_groups < 3)
    {
        throw ConfigError("OGM A and C need at least three groups");
    }
}

std::string ScenarioConfig::to_json() const
{
    nlohmann::ordered_json j;
    j["scenario_id"] = id;
    j["ogm"] = to_string(ogm);
    j["q"] = q;
    j["n_train"] = n_train;
    j["max_zero"] = max_zero;
    j["structural_share"] = share_label(structural_thirds);
    j["target_r2"] = target_r2;
    j["ud_setting"] = to_string(ud);
    j["n_groups"] = n_groups;
    j["group_size"] = group_size;
    j["reps"] = reps;
    j["n_valid"] = n_valid;
    j["n_pilot"] = n_pilot;
    j["master_seed"] = master_seed;
    j["rho_hub_max"] = rho_hub_max;
    j["rho_hub_min"] = rho_hub_min;
    j["mu_log"] = mu_log;
    j["sd_log"] = sd_log;
    return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text)
{
    ScenarioConfig c;
    try
    {
        const auto j = nlohmann::json::parse(text);
        c.id = j.value("scenario_id", 0);
        c.ogm = ogm_from_string(j.at("ogm").get<std::string>());
        c.q = j.value("q", c.q);
        c.n_train = j.at("n_train").get<int>();
        c.max_zero = j.at("max_zero").get<double>();
        const auto share = j.at("structural_share").get<std::string>();
        if (share.size() != 3 || share.substr(1) != "/3" || share[0] < '0' || share[0] > '3')
        {
            throw ConfigError("structural_share must be written as k/3");
        }
        c.structural_thirds = share[0] - '0';
        c.target_r2 = j.at("target_r2").get<double>();
        c.ud = ud_from_string(j.at("ud_setting").get<std::string>());
        c.n_groups = j.value("n_groups", c.n_groups);
        c.group_size = j.value("group_size", c.group_size);
        c.reps = j.value("reps", c.reps);
        c.n_valid = j.value("n_valid", c.n_valid);
        c.n_pilot = j.value("n_pilot", c.n_pilot);
        c.master_seed = j.value("master_seed", std::uint64_t{0});
        c.rho_hub_max = j.value("rho_hub_max", c.rho_hub_max);
        c.rho_hub_min = j.value("rho_hub_min", c.rho_hub_min);
        c.mu_log = j.value("mu_log", c.mu_log);
        c.sd_log = j.value("sd_log", c.sd_log);
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ConfigError(std::string("scenario config: ") + e.what());
    }
    c.validate();
    return c;
}

std::vector<ScenarioConfig> enumerate_scenarios()
{
    std::vector<ScenarioConfig> out;
    int id = 0;
    for (Ogm ogm : {Ogm::A, Ogm::B, Ogm::C})
    {
        for (double mz : {0.25, 0.5, 0.75})
        {
            for (int thirds : {1, 2})
            {
                for (double r2 : {0.3, 0.6, 1.0})
                {
                    for (UdSetting ud : {UdSetting::u_only, UdSetting::u_eq_d, UdSetting::u_2d})
                    {
                        for (int n : {100, 200, 400})
                        {
                            ScenarioConfig c;
                            c.id = ++id;
                            c.ogm = ogm;
                            c.max_zero = mz;
                            c.structural_thirds = thirds;
                            c.target_r2 = r2;
                            c.ud = ud;
                            c.n_train = n;
                            out.push_back(c);
                        }
                    }
                }
            }
        }
    }
    return out;
}

std::string scenarios_csv(const std::vector<ScenarioConfig>& scenarios)
{
    std::string out =
        "scenario_id,ogm,q,max_zero,structural_share,sampling_share,target_r2,"
        "ud_setting,n_train\n";
    for (const auto& c : scenarios)
    {
        out += std::to_string(c.id) + "," + to_string(c.ogm) + "," +
               std::to_string(c.q) + "," + io::format_double(c.max_zero) + "," +
               share_label(c.structural_thirds) + "," +
               share_label(3 - c.structural_thirds) + "," +
               io::format_double(c.target_r2) + "," + io::quote_csv(to_string(c.ud)) +
               "," + std::to_string(c.n_train) + "\n";
    }
    return out;
}

Eigen::MatrixXd hub_sigma(int n_groups, int group_size, double rho_hub_max,
                          double rho_hub_min)
{
    if (n_groups < 1 || group_size < 1)
    {
        throw ConfigError("hub_sigma needs positive group count and size");
    }
    if (!(rho_hub_min >= 0.0 && rho_hub_min <= rho_hub_max && rho_hub_max < 1.0))
    {
        throw ConfigError("hub correlations need 0 <= min <= max < 1");
    }
    const int q = n_groups * group_size;
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(q, q);
    // rho[k]: correlation of member k with the hub (rho[0] = 1 for the hub).
    Eigen::VectorXd rho = Eigen::VectorXd::Ones(group_size);
    for (int k = 1; k < group_size; ++k)
    {
        rho[k] = group_size == 2
                     ? rho_hub_max
                     : rho_hub_max - (k - 1) * (rho_hub_max - rho_hub_min) / (group_size - 2);
    }
    for (int g = 0; g + 1 < n_groups; ++g)
    {
        const int off = g * group_size;
        for (int i = 0; i < group_size; ++i)
        {
            for (int k = 0; k < group_size; ++k)
            {
                if (i != k)
                {
                    s(off + i, off + k) = rho[i] * rho[k];
                }
            }
        }
    }
    return s;
}

Eigen::MatrixXd sample_latent_log(Eigen::Index n, const Eigen::MatrixXd& sigma,
                                  double mu_log, double sd_log, std::uint64_t seed)
{
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
    {
        throw InvalidInput("latent correlation matrix is not positive definite");
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    return latent_log(n, lower, mu_log, sd_log, seed);
}

Eigen::MatrixXd sample_latent(Eigen::Index n, const Eigen::MatrixXd& sigma,
                              double mu_log, double sd_log, std::uint64_t seed)
{
    return sample_latent_log(n, sigma, mu_log, sd_log, seed).array().exp();
}

ZeroProfile zero_profiles(const ScenarioConfig& c)
{
    ZeroProfile p;
    p.p_struc.resize(c.q);
    p.p_samp.resize(c.q);
    const double share = c.structural_share();
    for (int g = 0; g < c.n_groups; ++g)
    {
        for (int k = 0; k < c.group_size; ++k)
        {
            const double total =
                c.group_size == 1 ? c.max_zero
                                  : c.max_zero * k / static_cast<double>(c.group_size - 1);
            const int j = g * c.group_size + k;
            p.p_struc[j] = share * total;
            p.p_samp[j] = (1.0 - share) * total;
        }
    }
    return p;
}

Eigen::MatrixXd draw_presence(Eigen::Index n, const Eigen::VectorXd& p_struc,
                              std::uint64_t seed)
{
    for (Eigen::Index j = 0; j < p_struc.size(); ++j)
    {
        if (!(p_struc[j] >= 0.0 && p_struc[j] < 1.0))
        {
            throw InvalidInput("structural zero probabilities must lie in [0, 1)");
        }
    }
    Eigen::MatrixXd p(n, p_struc.size());
    for (Eigen::Index start = 0, b = 0; start < n; start += kBlock, ++b)
    {
        const auto rows = std::min(kBlock, n - start);
        p.middleRows(start, rows) = presence_block(
            rows, p_struc, derive_seed(seed, {static_cast<std::uint64_t>(b)}));
    }
    return p;
}

StructuralZeros inject_structural_zeros(const Eigen::MatrixXd& z,
                                        const Eigen::VectorXd& p_struc,
                                        std::uint64_t seed)
{
    if (p_struc.size() != z.cols())
    {
        throw InvalidInput("one structural zero probability per column expected");
    }
    StructuralZeros out;
    out.presence = draw_presence(z.rows(), p_struc, seed);
    out.z_d = z.cwiseProduct(out.presence);
    return out;
}

Eigen::VectorXd sampling_thresholds(const Eigen::VectorXd& p_samp, double mu_log,
                                    double sd_log)
{
    const boost::math::normal standard;
    Eigen::VectorXd t(p_samp.size());
    for (Eigen::Index j = 0; j < p_samp.size(); ++j)
    {
        if (!(p_samp[j] >= 0.0 && p_samp[j] < 1.0))
        {
            throw InvalidInput("sampling zero probabilities must lie in [0, 1)");
        }
        t[j] = p_samp[j] == 0.0
                   ? -std::numeric_limits<double>::infinity()
                   : std::exp(mu_log + sd_log * boost::math::quantile(standard, p_samp[j]));
    }
    return t;
}

Eigen::MatrixXd inject_sampling_zeros(const Eigen::MatrixXd& z_d,
                                      const Eigen::VectorXd& p_samp,
                                      double mu_log, double sd_log)
{
    if (p_samp.size() != z_d.cols())
    {
        throw InvalidInput("one sampling zero probability per column expected");
    }
    const auto t = sampling_thresholds(p_samp, mu_log, sd_log);
    Eigen::MatrixXd z = z_d;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < z.rows(); ++i)
        {
            if (z(i, j) < t[j])
            {
                z(i, j) = 0.0;
            }
        }
    }
    return z;
}

Coefficients ogm_coefficients(const ScenarioConfig& c, std::uint64_t seed)
{
    Coefficients out;
    out.beta_u = Eigen::VectorXd::Zero(c.q);
    out.beta_d = Eigen::VectorXd::Zero(c.q);
    auto spaced = [](int count, double lo, double hi)
    {
        return Eigen::VectorXd::LinSpaced(count, lo, hi);
    };
    switch (c.ogm)
    {
    case Ogm::A:
    case Ogm::C:
    {
        const double hi = c.ogm == Ogm::A ? 1.0 : 0.4;
        const Eigen::VectorXd v = spaced(c.group_size, 0.1, hi);
        for (int g : {0, 2})
        {
            out.beta_u.segment(g * c.group_size, c.group_size) = v;
            out.beta_d.segment(g * c.group_size, c.group_size) = v;
        }
        break;
    }
    case Ogm::B:
    {
        const Eigen::VectorXd v = spaced(5, 1.0, 2.0);
        for (int g = 0; g < c.n_groups; ++g)
        {
            for (int comp = 0; comp < 2; ++comp)
            {
                std::vector<int> perm(5);
                std::iota(perm.begin(), perm.end(), 0);
                Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(g),
                                           static_cast<std::uint64_t>(comp)}));
                for (std::size_t i = perm.size(); i > 1; --i)
                {
                    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng() % i)]);
                }
                auto& beta = comp == 0 ? out.beta_u : out.beta_d;
                for (int k = 0; k < 5; ++k)
                {
                    beta[g * c.group_size + k] = v[perm[static_cast<std::size_t>(k)]];
                }
            }
        }
        break;
    }
    }
    for (int j = 0; j < c.q; ++j)
    {
        if (out.beta_u[j] != 0.0 || out.beta_d[j] != 0.0)
        {
            out.true_set.push_back(predictor_id(j));
        }
    }
    return out;
}

Eigen::VectorXd signal(const Eigen::MatrixXd& latent_log,
                       const Eigen::MatrixXd& presence, const GroundTruth& truth,
                       double mu_log)
{
    const Eigen::MatrixXd u =
        (presence.array() > 0.0).select(latent_log, Eigen::MatrixXd::Constant(
                                                        latent_log.rows(),
                                                        latent_log.cols(), mu_log));
    Eigen::VectorXd s = truth.a * (u * truth.beta_u) +
                        (1.0 - truth.a) * (presence * truth.beta_d);
    return s.array() + truth.beta0;
}

GroundTruth calibrate(const ScenarioConfig& c, const Coefficients& coef,
                      std::uint64_t seed)
{
    c.validate();
    const auto lower = latent_factor(c);
    const auto profile = zero_profiles(c);
    const Eigen::Index n = c.n_pilot;
    Eigen::VectorXd su(n);
    Eigen::VectorXd sd(n);
    for (Eigen::Index start = 0, b = 0; start < n; start += kBlock, ++b)
    {
        const auto rows = std::min(kBlock, n - start);
        const auto bs = static_cast<std::uint64_t>(b);
        const auto g = latent_block(rows, lower, c.mu_log, c.sd_log,
                                    derive_seed(seed, {stream::latent, bs}));
        const auto p = presence_block(rows, profile.p_struc,
                                      derive_seed(seed, {stream::structural, bs}));
        const Eigen::MatrixXd u = (p.array() > 0.0).select(
            g, Eigen::MatrixXd::Constant(rows, g.cols(), c.mu_log));
        su.segment(start, rows) = u * coef.beta_u;
        sd.segment(start, rows) = p * coef.beta_d;
    }
    const double vu = variance(su);
    const double vd = variance(sd);

    GroundTruth t;
    t.beta_u = coef.beta_u;
    t.beta_d = coef.beta_d;
    t.true_set = coef.true_set;
    if (c.ud == UdSetting::u_only)
    {
        t.a = 1.0;
    }
    else
    {
        if (!(vu > 0.0) || !(vd > 0.0))
        {
            throw ConfigError("pilot signal of a component has zero variance");
        }
        const double r = c.ud == UdSetting::u_eq_d ? 1.0 : 2.0;
        const double k = std::sqrt(r * vd / vu);
        t.a = k / (1.0 + k);
    }
    const Eigen::VectorXd s = t.a * su + (1.0 - t.a) * sd;
    t.var_signal = variance(s);
    if (!(t.var_signal > 0.0))
    {
        throw ConfigError("pilot signal has zero variance");
    }
    t.sigma2 = c.target_r2 >= 1.0 ? 0.0
                                  : t.var_signal * (1.0 - c.target_r2) / c.target_r2;
    t.beta0 = 0.0;
    return t;
}

std::uint64_t scenario_seed(const ScenarioConfig& c)
{
    return derive_seed(c.master_seed, {static_cast<std::uint64_t>(c.id)});
}

GroundTruth make_truth(const ScenarioConfig& c)
{
    const auto s = scenario_seed(c);
    const auto coef = ogm_coefficients(c, derive_seed(s, {stream::coefficients}));
    return calibrate(c, coef, derive_seed(s, {stream::pilot}));
}

std::string GroundTruth::to_json() const
{
    nlohmann::ordered_json j;
    j["beta0"] = beta0;
    j["a"] = a;
    j["sigma2"] = sigma2;
    j["var_signal"] = var_signal;
    j["true_set"] = true_set;
    j["beta_u"] = std::vector<double>(beta_u.data(), beta_u.data() + beta_u.size());
    j["beta_d"] = std::vector<double>(beta_d.data(), beta_d.data() + beta_d.size());
    return j.dump(2);
}

SimulatedDataset generate_dataset(const ScenarioConfig& c, const GroundTruth& truth,
                                  Eigen::Index n, std::uint64_t seed)
{
    const auto lower = latent_factor(c);
    const auto profile = zero_profiles(c);
    const auto g = latent_log(n, lower, c.mu_log, c.sd_log,
                              derive_seed(seed, {stream::latent}));
    SimulatedDataset d;
    d.presence = draw_presence(n, profile.p_struc, derive_seed(seed, {stream::structural}));
    d.u_outcome = (d.presence.array() > 0.0)
                      .select(g, Eigen::MatrixXd::Constant(n, g.cols(), c.mu_log));
    d.noise = noise_block(n, truth.sigma2, derive_seed(seed, {stream::noise}));
    d.y = signal(g, d.presence, truth, c.mu_log) + d.noise;
    const auto thresholds = sampling_thresholds(profile.p_samp, c.mu_log, c.sd_log);
    d.z_a = IntensityMatrix::with_default_ids(analyst_block(g, d.presence, thresholds));
    return d;
}

SimulatedDataset generate_replicate(const ScenarioConfig& c, const GroundTruth& truth,
                                    int rep_index)
{
    if (rep_index < 0)
    {
        throw InvalidInput("replicate index must be nonnegative");
    }
    const auto seed = derive_seed(scenario_seed(c), {stream::train,
                                                     static_cast<std::uint64_t>(rep_index)});
    return generate_dataset(c, truth, c.n_train, seed);
}

ValidationSet generate_validation(const ScenarioConfig& c, const GroundTruth& truth)
{
    c.validate();
    const auto lower = latent_factor(c);
    const auto profile = zero_profiles(c);
    const auto thresholds = sampling_thresholds(profile.p_samp, c.mu_log, c.sd_log);
    const auto seed = derive_seed(scenario_seed(c), {stream::validation});
    const Eigen::Index n = c.n_valid;

    ValidationSet v;
    v.logs.base = LogBase::natural;
    v.logs.column_ids = default_ids(c.q);
    v.logs.log_values.resize(n, c.q);
    v.y.resize(n);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index start = 0, b = 0; start < n; start += kBlock, ++b)
    {
        const auto rows = std::min(kBlock, n - start);
        const auto bs = static_cast<std::uint64_t>(b);
        const auto g = latent_block(rows, lower, c.mu_log, c.sd_log,
                                    derive_seed(seed, {stream::latent, bs}));
        const auto p = presence_block(rows, profile.p_struc,
                                      derive_seed(seed, {stream::structural, bs}));
        v.y.segment(start, rows) =
            signal(g, p, truth, c.mu_log) +
            noise_block(rows, truth.sigma2, derive_seed(seed, {stream::noise, bs}));
        const auto z = analyst_block(g, p, thresholds);
        for (Eigen::Index j = 0; j < c.q; ++j)
        {
            for (Eigen::Index i = 0; i < rows; ++i)
            {
                const double zi = z(i, j);
                v.logs.log_values(start + i, j) =
                    zi > 0.0 ? log_in_base(zi, LogBase::natural) : nan;
            }
        }
    }
    return v;
}

}  // namespace zigar::sim

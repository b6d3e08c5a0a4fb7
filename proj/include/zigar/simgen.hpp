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

#include "zigar/preprocess.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace zigar::sim
{

enum class Ogm
{
    A,
    B,
    C,
};

/// Relative contribution of the continuous and binary parts to the outcome.
enum class UdSetting
{
    u_only,  // "U": a = 1
    u_eq_d,  // "U=D"
    u_2d,    // "U=2D"
};

const char* to_string(Ogm ogm);
const char* to_string(UdSetting ud);
Ogm ogm_from_string(const std::string& text);
UdSetting ud_from_string(const std::string& text);

struct ScenarioConfig
{
    int id = 0;  // 1-based position in the factorial, 0 for ad-hoc configs
    Ogm ogm = Ogm::A;
    int q = 200;
    int n_train = 100;
    double max_zero = 0.25;
    int structural_thirds = 1;  // structural share of all zeros, in thirds
    double target_r2 = 0.6;
    UdSetting ud = UdSetting::u_eq_d;
    int n_groups = 4;
    int group_size = 50;
    int reps = 500;
    int n_valid = 100000;
    int n_pilot = 100000;
    std::uint64_t master_seed = 0;

    double rho_hub_max = 0.9;
    double rho_hub_min = 0.1;
    double mu_log = 10.0;
    double sd_log = 1.0;

    double structural_share() const { return structural_thirds / 3.0; }
    /// Throws ConfigError on inconsistent fields.
    void validate() const;
    std::string to_json() const;
    static ScenarioConfig from_json(const std::string& text);
};

/// The full factorial in a fixed order (OGM, max zero share, structural
/// share, target R2, U/D setting, n), ids 1..486.
std::vector<ScenarioConfig> enumerate_scenarios();

/// CSV with one row per scenario and one column per factor.
std::string scenarios_csv(const std::vector<ScenarioConfig>& scenarios);

/// Block-diagonal hub correlation; the last group is uncorrelated.
Eigen::MatrixXd hub_sigma(int n_groups = 4, int group_size = 50,
                          double rho_hub_max = 0.9, double rho_hub_min = 0.1);

/// Log-scale latent draws G with mean mu_log and covariance sd_log^2 * sigma.
/// Z = exp(G).
Eigen::MatrixXd sample_latent_log(Eigen::Index n, const Eigen::MatrixXd& sigma,
                                  double mu_log, double sd_log,
                                  std::uint64_t seed);
Eigen::MatrixXd sample_latent(Eigen::Index n, const Eigen::MatrixXd& sigma,
                              double mu_log, double sd_log, std::uint64_t seed);

struct ZeroProfile
{
    Eigen::VectorXd p_struc;
    Eigen::VectorXd p_samp;
};

/// Linear ramp of the total zero share from 0 to max_zero within each group.
ZeroProfile zero_profiles(const ScenarioConfig& config);

struct StructuralZeros
{
    Eigen::MatrixXd z_d;
    Eigen::MatrixXd presence;  // 0/1
};

/// Presence indicators with P(present) = 1 - p_struc[j].
Eigen::MatrixXd draw_presence(Eigen::Index n, const Eigen::VectorXd& p_struc,
                              std::uint64_t seed);
StructuralZeros inject_structural_zeros(const Eigen::MatrixXd& z,
                                        const Eigen::VectorXd& p_struc,
                                        std::uint64_t seed);

/// Theoretical lognormal quantiles; -inf when p is 0.
Eigen::VectorXd sampling_thresholds(const Eigen::VectorXd& p_samp,
                                    double mu_log, double sd_log);
/// Entries below the theoretical p_samp quantile of the latent become zero.
Eigen::MatrixXd inject_sampling_zeros(const Eigen::MatrixXd& z_d,
                                      const Eigen::VectorXd& p_samp,
                                      double mu_log = 10.0, double sd_log = 1.0);

struct Coefficients
{
    Eigen::VectorXd beta_u;
    Eigen::VectorXd beta_d;
    std::vector<std::string> true_set;
};

/// Id of the predictor at 0-based column `index`: p1..pq, shared with
/// IntensityMatrix::with_default_ids.
std::string predictor_id(int index);

Coefficients ogm_coefficients(const ScenarioConfig& config, std::uint64_t seed);

struct GroundTruth
{
    Eigen::VectorXd beta_u;
    Eigen::VectorXd beta_d;
    double beta0 = 0.0;
    std::vector<std::string> true_set;
    double a = 1.0;
    double sigma2 = 0.0;
    double var_signal = 0.0;  // pilot variance of the noiseless outcome

    std::string to_json() const;
};

/// Mixing weight and noise variance from a pilot draw of config.n_pilot rows.
GroundTruth calibrate(const ScenarioConfig& config, const Coefficients& coef,
                      std::uint64_t seed);

/// Seeds of one scenario; every draw is keyed off the scenario seed.
std::uint64_t scenario_seed(const ScenarioConfig& config);

/// Coefficients + calibration for a scenario.
GroundTruth make_truth(const ScenarioConfig& config);

/// Noiseless outcome a*U*beta_u + (1-a)*P*beta_d + beta0, where U is the
/// latent log with structural zeros filled at mu_log and P is presence.
Eigen::VectorXd signal(const Eigen::MatrixXd& latent_log,
                       const Eigen::MatrixXd& presence,
                       const GroundTruth& truth, double mu_log);

struct SimulatedDataset
{
    IntensityMatrix z_a;        // analyst matrix
    Eigen::VectorXd y;
    Eigen::MatrixXd u_outcome;  // U used to generate y
    Eigen::MatrixXd presence;   // structural presence used to generate y
    Eigen::VectorXd noise;
};

/// One training replicate; identical inputs give bit-identical output.
SimulatedDataset generate_replicate(const ScenarioConfig& config,
                                    const GroundTruth& truth, int rep_index);

/// Training-size draw from an explicit seed (the replicate generator uses a
/// seed derived from the scenario and replicate index).
SimulatedDataset generate_dataset(const ScenarioConfig& config,
                                  const GroundTruth& truth, Eigen::Index n,
                                  std::uint64_t seed);

/// The scenario's validation set, kept as natural-log intensities so that
/// the raw 100k x q matrix is never held in memory.
struct ValidationSet
{
    LogIntensities logs;
    Eigen::VectorXd y;
};

ValidationSet generate_validation(const ScenarioConfig& config,
                                  const GroundTruth& truth);

}  // namespace zigar::sim

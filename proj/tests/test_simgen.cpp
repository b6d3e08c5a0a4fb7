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


#include "support/generators.hpp"

#include "zigar/error.hpp"
#include "zigar/simgen.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <vector>

using namespace zigar;
using namespace zigar::sim;

namespace
{

double mean_of(const Eigen::VectorXd& v)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        s += v[i];
    }
    return s / static_cast<double>(v.size());
}

double var_of(const Eigen::VectorXd& v)
{
    const double m = mean_of(v);
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        s += (v[i] - m) * (v[i] - m);
    }
    return s / static_cast<double>(v.size() - 1);
}

double median_of(Eigen::VectorXd v)
{
    std::vector<double> x(v.data(), v.data() + v.size());
    std::sort(x.begin(), x.end());
    const auto n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double zero_share(const Eigen::VectorXd& col)
{
    return static_cast<double>((col.array() == 0.0).count()) /
           static_cast<double>(col.size());
}

ScenarioConfig small_config(Ogm ogm, UdSetting ud, double r2)
{
    ScenarioConfig c;
    c.ogm = ogm;
    c.ud = ud;
    c.target_r2 = r2;
    c.n_train = 50;
    c.n_valid = 500;
    c.n_pilot = 20000;
    c.max_zero = 0.5;
    c.id = 7;
    c.master_seed = 99;
    return c;
}

}  // namespace

TEST_CASE("hub correlation follows the single-factor construction")
{
    const auto s = hub_sigma();
    REQUIRE(s.rows() == 200);
    REQUIRE(s.cols() == 200);
    for (int i = 0; i < 200; ++i)
    {
        for (int j = 0; j < 200; ++j)
        {
            const int gi = i / 50;
            const int gj = j / 50;
            double expected = 0.0;
            if (i == j)
            {
                expected = 1.0;
            }
            else if (gi == gj && gi < 3)
            {
                // 1-based within-group positions; the hub is position 1.
                auto hub = [](int pos) {
                    return pos == 1 ? 1.0 : 0.9 - (pos - 2) * (0.9 - 0.1) / 48.0;
                };
                expected = hub(i % 50 + 1) * hub(j % 50 + 1);
            }
            CHECK(s(i, j) == doctest::Approx(expected).epsilon(1e-14));
        }
    }
    CHECK(s(0, 1) == doctest::Approx(0.9));
    CHECK(s(100, 149) == doctest::Approx(0.1));
    CHECK(s.block(150, 150, 50, 50).isIdentity(0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    CHECK_THROWS_AS(hub_sigma(4, 50, 0.2, 0.5), ConfigError);
    CHECK_THROWS_AS(hub_sigma(4, 50, 1.0, 0.1), ConfigError);
}

TEST_CASE("latent draws have the requested log median and correlation")
{
    const Eigen::Index n = 10000;
    const auto sigma = hub_sigma();
    const auto g = sample_latent_log(n, sigma, 10.0, 1.0, 123);
    REQUIRE(g.rows() == n);
    // Median standard error is 1.2533 / sqrt(n); a 4.5 SE bound keeps the
    // chance of any of the 200 columns failing near 0.1%.
    const double tol = 4.5 * 1.2533 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd medians(200);
    for (Eigen::Index j = 0; j < 200; ++j)
    {
        medians[j] = median_of(g.col(j));
        CHECK(std::abs(medians[j] - 10.0) <= tol);
    }
    CHECK(std::abs(mean_of(medians) - 10.0) <= 3.0 / std::sqrt(static_cast<double>(n)));

    const Eigen::MatrixXd centered = g.rowwise() - g.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    const Eigen::VectorXd sd = cov.diagonal().array().sqrt();
    const Eigen::MatrixXd corr = cov.array() / (sd * sd.transpose()).array();
    CHECK((corr - sigma).cwiseAbs().maxCoeff() <= 0.05);

    const auto z = sample_latent(n, sigma, 10.0, 1.0, 123);
    CHECK((z.array().log() - g.array()).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("zero log sd gives the geometric mean everywhere")
{
    const auto z = sample_latent(100, hub_sigma(2, 5), 10.0, 0.0, 5);
    CHECK((z.array() == std::exp(10.0)).all());
}

TEST_CASE("zero profiles ramp linearly within every group")
{
    ScenarioConfig c;
    c.max_zero = 0.75;
    c.structural_thirds = 1;
    const auto p = zero_profiles(c);
    for (int g = 0; g < 4; ++g)
    {
        const int first = g * 50;
        const int last = first + 49;
        CHECK(p.p_struc[first] == 0.0);
        CHECK(p.p_samp[first] == 0.0);
        CHECK(p.p_struc[last] == doctest::Approx(0.25));
        CHECK(p.p_samp[last] == doctest::Approx(0.50));
        for (int k = first + 1; k <= last; ++k)
        {
            const double total = p.p_struc[k] + p.p_samp[k];
            CHECK(total == doctest::Approx(0.75 * (k - first) / 49.0));
            CHECK(total >= p.p_struc[k - 1] + p.p_samp[k - 1]);
            CHECK(total <= 0.75 + 1e-15);
        }
    }
    c.structural_thirds = 2;
    const auto q = zero_profiles(c);
    CHECK(q.p_struc[49] == doctest::Approx(0.5));
    CHECK(q.p_samp[49] == doctest::Approx(0.25));
}

TEST_CASE("structural zeros hit their target shares")
{
    const Eigen::Index n = 10000;
    const auto z = sample_latent(n, Eigen::MatrixXd::Identity(6, 6), 10.0, 1.0, 1);
    Eigen::VectorXd p(6);
    p << 0.0, 0.05, 0.1, 0.25, 0.5, 0.75;
    const auto out = inject_structural_zeros(z, p, 77);
    CHECK(out.z_d.col(0) == z.col(0));
    CHECK((out.presence.col(0).array() == 1.0).all());
    for (Eigen::Index j = 0; j < 6; ++j)
    {
        const double sd = std::sqrt(p[j] * (1.0 - p[j]) / static_cast<double>(n));
        CHECK(std::abs(zero_share(out.z_d.col(j)) - p[j]) <= 3.0 * sd);
        CHECK((out.presence.col(j).array() == (out.z_d.col(j).array() > 0.0).cast<double>()).all());
    }
    CHECK_THROWS_AS(inject_structural_zeros(z, Eigen::VectorXd::Constant(6, 1.0), 1),
                    InvalidInput);
}

TEST_CASE("sampling thresholds are lognormal quantiles")
{
    Eigen::VectorXd p(3);
    p << 0.0, 0.5, 0.975;
    const auto t = sampling_thresholds(p, 10.0, 1.0);
    CHECK(std::isinf(t[0]));
    CHECK(t[0] < 0.0);
    CHECK(t[1] == doctest::Approx(std::exp(10.0)).epsilon(1e-14));
    CHECK(t[2] == doctest::Approx(std::exp(10.0 + 1.959963984540054)).epsilon(1e-12));

    const Eigen::Index n = 20000;
    const auto z = sample_latent(n, Eigen::MatrixXd::Identity(3, 3), 10.0, 1.0, 8);
    const auto za = inject_sampling_zeros(z, p);
    CHECK(za.col(0) == z.col(0));
    const double below = static_cast<double>((z.col(1).array() < std::exp(10.0)).count()) /
                         static_cast<double>(n);
    CHECK(std::abs(below - 0.5) <= 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
    CHECK(zero_share(za.col(1)) == below);
}

TEST_CASE("realized zero shares respect the inclusion-exclusion bounds")
{
    const Eigen::Index n = 20000;
    const auto z = sample_latent(n, Eigen::MatrixXd::Identity(4, 4), 10.0, 1.0, 9);
    Eigen::VectorXd ps(4);
    Eigen::VectorXd pm(4);
    ps << 0.1, 0.25, 0.5, 0.0;
    pm << 0.2, 0.5, 0.25, 0.3;
    const auto sz = inject_structural_zeros(z, ps, 10);
    const auto za = inject_sampling_zeros(sz.z_d, pm);
    for (Eigen::Index j = 0; j < 4; ++j)
    {
        const double share = zero_share(za.col(j));
        const double sd = 0.5 / std::sqrt(static_cast<double>(n));
        CHECK(share <= ps[j] + pm[j] + 3.0 * sd);
        CHECK(share >= std::max(ps[j], pm[j]) - 3.0 * sd);
        // Independent mechanisms: 1 - (1 - ps)(1 - pm).
        const double expected = 1.0 - (1.0 - ps[j]) * (1.0 - pm[j]);
        CHECK(std::abs(share - expected) <= 3.0 * sd);
    }
}

TEST_CASE("OGM coefficients")
{
    for (Ogm ogm : {Ogm::A, Ogm::B, Ogm::C})
    {
        ScenarioConfig c;
        c.ogm = ogm;
        const auto coef = ogm_coefficients(c, 31);
        std::set<std::string> expected_ids;
        for (int j = 0; j < 200; ++j)
        {
            if (coef.beta_u[j] != 0.0 || coef.beta_d[j] != 0.0)
            {
                expected_ids.insert(predictor_id(j));
            }
        }
        CHECK(std::set<std::string>(coef.true_set.begin(), coef.true_set.end()) == expected_ids);
        if (ogm == Ogm::B)
        {
            CHECK(coef.true_set.size() == 20);
            for (int g = 0; g < 4; ++g)
            {
                for (const auto* beta : {&coef.beta_u, &coef.beta_d})
                {
                    std::vector<double> v(beta->data() + g * 50, beta->data() + g * 50 + 5);
                    std::sort(v.begin(), v.end());
                    for (int k = 0; k < 5; ++k)
                    {
                        CHECK(v[static_cast<std::size_t>(k)] == doctest::Approx(1.0 + 0.25 * k));
                    }
                    CHECK((beta->segment(g * 50 + 5, 45).array() == 0.0).all());
                }
            }
            CHECK(coef.beta_u != coef.beta_d);
        }
        else
        {
            CHECK(coef.true_set.size() == 100);
            const double hi = ogm == Ogm::A ? 1.0 : 0.4;
            for (int j = 0; j < 200; ++j)
            {
                const int g = j / 50;
                if (g == 0 || g == 2)
                {
                    CHECK(coef.beta_u[j] >= 0.1 - 1e-15);
                    CHECK(coef.beta_u[j] <= hi + 1e-15);
                }
                else
                {
                    CHECK(coef.beta_u[j] == 0.0);
                }
            }
            CHECK(coef.beta_u == coef.beta_d);
        }
    }
}

TEST_CASE("calibration hits the target R2 on an independent draw")
{
    for (auto [ogm, ud, r2] : {std::tuple{Ogm::A, UdSetting::u_eq_d, 0.6},
                               std::tuple{Ogm::B, UdSetting::u_2d, 0.3},
                               std::tuple{Ogm::C, UdSetting::u_only, 0.3}})
    {
        auto c = small_config(ogm, ud, r2);
        c.n_pilot = 100000;
        const auto truth = make_truth(c);
        CAPTURE(to_string(ogm));
        CHECK(truth.sigma2 / truth.var_signal == doctest::Approx((1.0 - r2) / r2));
        CHECK(truth.beta0 == 0.0);
        const auto d = generate_dataset(c, truth, 100000, 4242);
        const Eigen::VectorXd s = d.y - d.noise;
        const double realized = var_of(s) / var_of(d.y);
        CHECK(std::abs(realized - r2) <= 0.02);

        const Eigen::VectorXd su = truth.a * (d.u_outcome * truth.beta_u);
        const Eigen::VectorXd sd = (1.0 - truth.a) * (d.presence * truth.beta_d);
        if (ud == UdSetting::u_only)
        {
            CHECK(truth.a == 1.0);
        }
        else
        {
            const double ratio = ud == UdSetting::u_eq_d ? 1.0 : 2.0;
            CHECK(var_of(su) / var_of(sd) == doctest::Approx(ratio).epsilon(0.05));
        }
    }
}

TEST_CASE("a target R2 of one means no noise")
{
    auto c = small_config(Ogm::A, UdSetting::u_only, 1.0);
    const auto truth = make_truth(c);
    CHECK(truth.sigma2 == 0.0);
    const auto d = generate_replicate(c, truth, 0);
    CHECK((d.noise.array() == 0.0).all());
    // y = U beta_u, recomputed entry by entry.
    for (Eigen::Index i = 0; i < d.y.size(); ++i)
    {
        double yi = 0.0;
        for (Eigen::Index j = 0; j < 200; ++j)
        {
            const double u = d.presence(i, j) > 0.0 ? d.u_outcome(i, j) : 10.0;
            yi += u * truth.beta_u[j];
        }
        CHECK(std::abs(d.y[i] - yi) <= 1e-10);
    }
}

TEST_CASE("outcomes follow the linear model with mixing weight")
{
    auto c = small_config(Ogm::B, UdSetting::u_eq_d, 0.6);
    const auto truth = make_truth(c);
    CHECK(truth.a > 0.0);
    CHECK(truth.a < 1.0);
    const auto d = generate_replicate(c, truth, 3);
    for (Eigen::Index i = 0; i < d.y.size(); ++i)
    {
        double yi = truth.beta0 + d.noise[i];
        for (Eigen::Index j = 0; j < 200; ++j)
        {
            yi += truth.a * d.u_outcome(i, j) * truth.beta_u[j] +
                  (1.0 - truth.a) * d.presence(i, j) * truth.beta_d[j];
            // Structurally absent entries are zero in the analyst matrix.
            if (d.presence(i, j) == 0.0)
            {
                CHECK(d.z_a.values(i, j) == 0.0);
                CHECK(d.u_outcome(i, j) == 10.0);
            }
        }
        CHECK(std::abs(d.y[i] - yi) <= 1e-10 * std::max(1.0, std::abs(yi)));
    }
    CHECK((d.z_a.values.array() >= 0.0).all());
    CHECK(d.z_a.column_ids.front() == "p1");
}

TEST_CASE("replicates are deterministic and share one validation set")
{
    auto c = small_config(Ogm::A, UdSetting::u_eq_d, 0.6);
    const auto truth = make_truth(c);
    const auto a = generate_replicate(c, truth, 1);
    const auto b = generate_replicate(c, truth, 1);
    const auto other = generate_replicate(c, truth, 2);
    CHECK(a.z_a.values == b.z_a.values);
    CHECK(a.y == b.y);
    CHECK(a.y != other.y);
    const auto v1 = generate_validation(c, truth);
    const auto v2 = generate_validation(c, truth);
    CHECK(v1.y == v2.y);
    for (Eigen::Index i = 0; i < v1.logs.log_values.size(); ++i)
    {
        const double x = v1.logs.log_values.data()[i];
        const double y = v2.logs.log_values.data()[i];
        CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
    }
    CHECK(make_truth(c).to_json() == truth.to_json());
    auto moved = c;
    moved.master_seed = 100;
    CHECK(generate_replicate(moved, truth, 1).y != a.y);
}

TEST_CASE("outcomes do not depend on sampling zeros")
{
    // Same structural profile, different sampling profiles.
    auto a = small_config(Ogm::A, UdSetting::u_eq_d, 0.6);
    a.max_zero = 0.5;
    a.structural_thirds = 1;
    auto b = a;
    b.max_zero = 0.25;
    b.structural_thirds = 2;
    REQUIRE(zero_profiles(a).p_struc.isApprox(zero_profiles(b).p_struc, 1e-15));
    REQUIRE(zero_profiles(a).p_samp != zero_profiles(b).p_samp);
    const auto truth = make_truth(a);
    const auto da = generate_replicate(a, truth, 0);
    const auto db = generate_replicate(b, truth, 0);
    CHECK(da.y == db.y);
    CHECK(da.presence == db.presence);
    CHECK(da.z_a.values != db.z_a.values);
}

TEST_CASE("the factorial has 486 distinct scenarios drawn from the design")
{
    const auto all = enumerate_scenarios();
    REQUIRE(all.size() == 486);
    std::set<std::tuple<int, double, int, double, int, int>> seen;
    for (std::size_t i = 0; i < all.size(); ++i)
    {
        const auto& c = all[i];
        CHECK(c.id == static_cast<int>(i) + 1);
        CHECK(c.q == 200);
        CHECK(c.reps == 500);
        CHECK(c.n_valid == 100000);
        CHECK((c.max_zero == 0.25 || c.max_zero == 0.5 || c.max_zero == 0.75));
        CHECK((c.structural_thirds == 1 || c.structural_thirds == 2));
        CHECK((c.target_r2 == 0.3 || c.target_r2 == 0.6 || c.target_r2 == 1.0));
        CHECK((c.n_train == 100 || c.n_train == 200 || c.n_train == 400));
        seen.insert({static_cast<int>(c.ogm), c.max_zero, c.structural_thirds, c.target_r2,
                     static_cast<int>(c.ud), c.n_train});
        CHECK_NOTHROW(c.validate());
    }
    CHECK(seen.size() == 486);
    const auto csv = scenarios_csv(all);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 487);
}

TEST_CASE("scenario configs round-trip through JSON and validate")
{
    auto c = enumerate_scenarios()[283];
    c.master_seed = 12345678901234ULL;
    const auto back = ScenarioConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.id == 284);
    CHECK(back.ogm == Ogm::B);
    CHECK(back.master_seed == c.master_seed);
    auto bad = c;
    bad.q = 150;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.target_r2 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(ogm_from_string("B") == Ogm::B);
    CHECK(ud_from_string("U=2D") == UdSetting::u_2d);
    CHECK_THROWS(ogm_from_string("D"));
}

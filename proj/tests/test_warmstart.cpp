// Copyright 2026 The svqs Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "svqs/warmstart.hpp"

using namespace svqs;

namespace {

double uniform_mean(const std::function<double(double)>& f, double r) {
    return oracle::simpson(f, -r, r) / (2.0 * r);
}

SubspaceBasis two_qubit_basis() {
    return SubspaceBasis({StateVector::from_bitstring("00"), StateVector::from_bitstring("11")});
}

} // namespace

TEST(TrigMoments, MatchQuadrature) {
    for (double r : {0.01, 0.1, 0.5, 1.3}) {
        const auto m = trig_moments(r);
        auto c = [](double a) { return std::cos(a); };
        auto s = [](double a) { return std::sin(a); };
        EXPECT_NEAR(m.k_plus, uniform_mean([&](double a) { return std::pow(c(a), 2); }, r), 1e-12) << r;
        EXPECT_NEAR(m.k_minus, uniform_mean([&](double a) { return std::pow(s(a), 2); }, r), 1e-12) << r;
        EXPECT_NEAR(m.c_plus, uniform_mean([&](double a) { return std::pow(c(a), 4); }, r), 1e-12) << r;
        EXPECT_NEAR(m.c_minus, uniform_mean([&](double a) { return std::pow(s(a), 4); }, r), 1e-12) << r;
        EXPECT_NEAR(m.c_zero, uniform_mean([&](double a) { return std::pow(c(a) * s(a), 2); }, r), 1e-12) << r;
    }
}

TEST(TrigMoments, Identities) {
    for (double r : {0.001, 0.04, 0.06, 0.3, 1.0}) {
        const auto m = trig_moments(r);
        EXPECT_NEAR(m.k_plus + m.k_minus, 1.0, 1e-12);
        EXPECT_NEAR(m.c_plus + m.c_minus + 2.0 * m.c_zero, 1.0, 1e-12);
        EXPECT_NEAR(m.c_plus + m.c_zero, m.k_plus, 1e-12);
        // series and closed form agree across the switch
        const double direct = m.c_plus - m.k_plus * m.k_plus;
        EXPECT_NEAR(m.variance_factor(), direct, 1e-12 + 1e-9 * std::abs(direct));
    }
    EXPECT_NEAR(trig_moments(0.1).k_plus, 0.5 + std::sin(0.2) / 0.4, 1e-15);
    EXPECT_THROW(trig_moments(0.0), Error);
}

TEST(Thm2, ConditionsForZxzOnTwoLevelBasis) {
    const auto spec = build_ansatz(AnsatzFamily::ZxzCnot, 2);
    const double t = overlap_term(two_qubit_basis(), first_generator(spec));
    EXPECT_NEAR(t, 2.0 / 3.0, 1e-15);
    const double em = max_abs_energy({2, 1.0, 1.0, 1.0});
    const auto cond = thm2_conditions(t, em, spec.parameter_count, 0.5);
    EXPECT_TRUE(cond.applicable);
    EXPECT_NEAR(cond.dt_max, (std::sqrt(3.0 - 2.0 * t) - 1.0) / (2.0 * em), 1e-15);
    EXPECT_NEAR(cond.margin(cond.dt_max), 0.0, 1e-12);
    const double dt = 0.5 * cond.dt_max;
    const double r = std::sqrt(cond.r2_max(dt));
    const auto ok = thm2_bound(trig_moments(r), 0.5, t, em, spec.parameter_count, dt);
    EXPECT_TRUE(ok.admissible);
    EXPECT_GT(ok.value, 0.0);
    const auto too_wide = thm2_bound(trig_moments(1.1 * r), 0.5, t, em, spec.parameter_count, dt);
    EXPECT_FALSE(too_wide.admissible);
    EXPECT_THROW(thm2_conditions(t, em, spec.parameter_count, 1.0), Error);
}

TEST(Prop2, ZeroWhenIntervalStraddlesZero) {
    const auto m = trig_moments(1.0);
    EXPECT_EQ(prop2_bound(0.0, m, 12), 0.0);
    const double k = m.k_plus;
    EXPECT_NEAR(prop2_bound(1.0, m, 1), m.variance_factor(), 1e-15);
    EXPECT_NEAR(prop2_bound(1.0, m, 2), m.variance_factor() * std::pow(2 * k - 1, 2), 1e-15);
}

TEST(EmpiricalVariance, ConstantAndKnownCosine) {
    const std::vector<double> center = {0.0};
    const auto flat = empirical_variance([](std::span<const double>) { return 1.0; }, center, 0.2, 100, 1);
    EXPECT_EQ(flat.variance, 0.0);
    // cos^2 of a uniform angle: variance = c_+ - k_+^2
    const auto est = empirical_variance([](std::span<const double> p) { return std::pow(std::cos(p[0]), 2); },
                                        center, 0.8, 40000, 2);
    EXPECT_NEAR(est.variance, trig_moments(0.8).variance_factor(), 4.0 * est.standard_error);
}

TEST(WarmStartReport, ReproducesTheDefaultsForZxz) {
    const auto spec = build_ansatz(AnsatzFamily::ZxzCnot, 2);
    WarmStartSetup setup;
    setup.samples = 2000;
    const auto rep = warmstart_report(two_qubit_basis(), spec, identity_params(spec), {2, 1.0, 1.0, 1.0}, setup);
    EXPECT_EQ(rep.M, 12);
    EXPECT_NEAR(rep.dt, 0.5 * rep.dt_max, 1e-15);
    EXPECT_TRUE(rep.thm2_admissible);
    EXPECT_GT(rep.empirical_variance, rep.thm2_bound);
    EXPECT_GT(rep.empirical_variance, rep.prop2_bound);
}

TEST(Thm2, FullOverlapLeavesNoAdmissibleStep) {
    // averaged overlap 1 means the summed term is 3, so 3 - 2 * 1 = 1 and the root vanishes
    const auto cond = thm2_conditions(1.0, 3.0, 12, 0.5);
    EXPECT_FALSE(cond.applicable);
    EXPECT_EQ(cond.dt_max, 0.0);
}

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

#include <numbers>

#include "svqs/analysis.hpp"

using namespace svqs;

namespace {

ExperimentConfig parse(const std::string& text) { return ExperimentConfig::from_file(ConfigFile::parse(text)); }

StateVector bell() {
    CVector v = CVector::Zero(4);
    v[0] = v[3] = 1.0 / std::numbers::sqrt2;
    return StateVector::from_amplitudes(v);
}

} // namespace

TEST(Config, DefaultsAndOverrides) {
    const auto d = parse("");
    EXPECT_EQ(d.model.n_qubits, 2);
    EXPECT_EQ(d.n_steps, 30);
    EXPECT_DOUBLE_EQ(d.dt, 0.1);
    EXPECT_EQ(d.basis().d(), 2);
    const auto c = parse("# comment\nmodel.n_qubits = 3   # trailing\noptimizer.kind = sgd\n\nrun.seed = 17\n"
                         "subspace.states = 000; 111; amps(0, 0.6, 0.8i, 0, 0, 0, 0, 0)\n");
    EXPECT_EQ(c.model.n_qubits, 3);
    EXPECT_EQ(c.optimizer.kind, OptimizerKind::Sgd);
    EXPECT_EQ(c.optimizer.max_iterations, 2000);
    EXPECT_EQ(c.optimizer.rng_seed, 17u);
    EXPECT_EQ(c.basis().d(), 3);
    EXPECT_NEAR(std::abs(c.basis().basis()[2][2] - cplx(0, 0.8)), 0.0, 1e-15);
}

TEST(Config, ComplexEntries) {
    EXPECT_EQ(*detail::parse_complex("0.5"), cplx(0.5, 0));
    EXPECT_EQ(*detail::parse_complex("0.5i"), cplx(0, 0.5));
    EXPECT_EQ(*detail::parse_complex("0.5+0.25i"), cplx(0.5, 0.25));
    EXPECT_EQ(*detail::parse_complex("1e-1-2e-1i"), cplx(0.1, -0.2));
    EXPECT_EQ(*detail::parse_complex("-i"), cplx(0, -1));
    EXPECT_FALSE(detail::parse_complex("x").has_value());
}

TEST(Config, ErrorsCarryLineAndKey) {
    try {
        parse("model.J = 1\nmodel.nqubits = 2\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.key(), "model.nqubits");
    }
    EXPECT_THROW(parse("model.J\n"), ConfigError);
    EXPECT_THROW(parse("model.J = 1\nmodel.J = 2\n"), ConfigError);
    EXPECT_THROW(parse("schedule.dt = -0.1\n"), ConfigError);
    EXPECT_THROW(parse("trotter.order = 4\n"), ConfigError);
    EXPECT_THROW(parse("subspace.states = 00; 0\n"), ConfigError);
    EXPECT_THROW(parse("subspace.states = 00; 00\n"), ConfigError);
    EXPECT_THROW(parse("ansatz.family = mystery\n"), ConfigError);
    EXPECT_THROW(parse("run.shots = 1.5\n"), ConfigError);
}

TEST(Csv, FormatIsStable) {
    CsvTable t("demo", 1, {"a", "b", "c"});
    t.add_row({0.1, std::int64_t{3}, std::string("x")});
    t.add_row({std::numeric_limits<double>::quiet_NaN(), std::int64_t{-1}, std::string("y")});
    EXPECT_EQ(t.str(), "# schema: svqs.demo/1\na,b,c\n0.10000000000000001,3,x\nnan,-1,y\n");
    EXPECT_THROW(t.add_row({1.0}), Error);
}

TEST(ConcentratableEntanglement, KnownStates) {
    EXPECT_NEAR(concentratable_entanglement(StateVector::from_bitstring("00"), {0, 1}), 0.0, 1e-15);
    EXPECT_NEAR(concentratable_entanglement(bell(), {0, 1}), 0.25, 1e-12);
    // two-qubit pure state: (1/2)(1 - Tr rho_1^2)
    const double t = std::numbers::pi / 4;
    CVector v = CVector::Zero(4);
    v[0] = std::cos(t / 2);
    v[3] = std::sin(t / 2);
    const auto psi = StateVector::from_amplitudes(v);
    const double oracle = 0.5 * (1.0 - purity(partial_trace(psi, {0})));
    EXPECT_NEAR(concentratable_entanglement(psi, {0, 1}), oracle, 1e-14);
    EXPECT_THROW(concentratable_entanglement(psi, {}), Error);
}

TEST(TrainExperiment, RowCountAndOrdering) {
    auto cfg = parse("schedule.n_steps = 3\nsweep.random_states = 4\n");
    const auto ex = run_train_experiment(cfg);
    ASSERT_EQ(ex.rows.size(), 3u * (3u + 4u));
    EXPECT_EQ(ex.rows[0].state_label, "basis0");
    EXPECT_EQ(ex.rows[3].state_label, "random0000");
    EXPECT_EQ(ex.rows[3].source, "random-state");
    EXPECT_TRUE(std::isnan(ex.rows[3].prop1_bound));
    for (const auto& r : ex.rows) {
        if (r.source == "training-state") {
            EXPECT_LE(r.prop1_bound, r.fidelity_vs_trotter + 1e-9);
        }
    }
    cfg.n_steps = 0;
    const auto empty = run_train_experiment(cfg);
    EXPECT_EQ(train_table(empty.rows).str(),
              "# schema: svqs.train/1\nstep,state_label,fidelity_vs_trotter,prop1_bound,source\n");
}

TEST(RandomSweep, BasisCoefficientsReproduceTrainingFidelities) {
    const auto cfg = parse("schedule.n_steps = 2\n");
    const auto setup = make_setup(cfg);
    const auto tr = train_subspace(setup.basis, setup.ansatz, setup.trotter, 2, cfg.optimizer);
    CVector e1 = CVector::Zero(2);
    e1[1] = 1.0;
    const auto via_coeffs = fidelity_vs_trotter(setup.basis.combine(e1), tr.trajectory, setup.trotter.circuit);
    const auto direct = fidelity_vs_trotter(setup.basis.basis()[1], tr.trajectory, setup.trotter.circuit);
    EXPECT_EQ(via_coeffs, direct);
    const auto a = random_state_sweep(tr.trajectory, setup.basis, setup.trotter.circuit, 3, 9);
    const auto b = random_state_sweep(tr.trajectory, setup.basis, setup.trotter.circuit, 3, 9);
    EXPECT_EQ(a[2].fidelities, b[2].fidelities);
    EXPECT_TRUE(random_state_sweep(tr.trajectory, setup.basis, setup.trotter.circuit, 0, 9).empty());
}

TEST(Entanglement, InitialColumnsAgree) {
    const auto cfg = parse("schedule.n_steps = 1\n");
    const auto setup = make_setup(cfg);
    const auto tr = train_subspace(setup.basis, setup.ansatz, setup.trotter, 1, cfg.optimizer);
    const auto rows = run_entanglement_experiment(tr.trajectory, setup.basis, setup.trotter.circuit, cfg.model,
                                                  cfg.dt, {0.0, std::numbers::pi / 2});
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NEAR(rows[0].ce_pqc, 0.0, 1e-12);
    EXPECT_NEAR(rows[0].ce_trotter, 0.0, 1e-12);
    EXPECT_NEAR(rows[0].ce_exact, 0.0, 1e-12);
    EXPECT_NEAR(rows[2].ce_pqc, 0.25, 1e-12);
    EXPECT_NEAR(rows[2].ce_trotter, 0.25, 1e-12);
    EXPECT_NEAR(rows[2].ce_exact, 0.25, 1e-12);
    EXPECT_EQ(theta_grid(9).size(), 9u);
    EXPECT_NEAR(theta_grid(9)[4], std::numbers::pi / 2, 1e-15);
}

TEST(BoundSurfaceGrid, AllOnesIsFlat) {
    const auto s = bound_surface(FidelityConstraints::uniform(2, 1.0), 3, 3);
    ASSERT_EQ(s.points.size(), 9u);
    for (const auto& p : s.points) {
        EXPECT_EQ(p.bound.value, 1.0);
    }
}

TEST(CompareFewer, EmitsEverySet) {
    const auto cfg = parse("schedule.n_steps = 2\nsweep.random_states = 2\n");
    const auto ex = compare_fewer_states(cfg);
    const auto t = compare_fewer_table(ex);
    // full: 3 + 2, basis-only: 2 + 2, single-state: 1 + 2 per step
    EXPECT_EQ(t.rows().size(), 2u * (5u + 4u + 3u));
    EXPECT_EQ(std::get<std::string>(t.rows().back()[0]), "single-state");
}

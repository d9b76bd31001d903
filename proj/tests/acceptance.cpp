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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "svqs/analysis.hpp"

using namespace svqs;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what + (ok ? "" : " [miss]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ExperimentConfig two_qubit_config(AnsatzFamily family) {
    ExperimentConfig c;
    c.model = {2, 1.0, 1.0, 1.0};
    c.dt = 0.1;
    c.n_steps = 30;
    c.trotter_order = 2;
    c.ansatz_family = family;
    c.ansatz_layers = 1;
    c.optimizer = OptimizerConfig::defaults_for(OptimizerKind::SequentialMinimal);
    c.optimizer.halting_threshold = 1e-4;
    c.random_sweep_count = 500;
    c.seed = 2024;
    c.optimizer.rng_seed = c.seed;
    c.validate();
    return c;
}

ExperimentConfig six_qubit_config() {
    ExperimentConfig c;
    c.model = {6, 1.0, 1.0, 1.0};
    c.dt = 0.1;
    c.n_steps = 20;
    c.trotter_order = 2;
    c.ansatz_family = AnsatzFamily::Su4Chain;
    c.ansatz_layers = 2;
    c.optimizer = OptimizerConfig::defaults_for(OptimizerKind::Sgd);
    c.optimizer.learning_rate = 0.1;
    c.random_sweep_count = 0;
    c.seed = 2024;
    c.optimizer.rng_seed = c.seed;
    c.validate();
    return c;
}

struct TimedRun {
    TrainExperiment ex;
    std::string csv;
    double seconds = 0.0;
};

TimedRun timed_train(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    TimedRun r{run_train_experiment(cfg), {}, 0.0};
    r.seconds = seconds_since(t0);
    r.csv = train_table(r.ex.rows).str();
    return r;
}

struct Extremes {
    double min_training = 1.0;
    double min_random = 1.0;
};

Extremes extremes(const std::vector<ResultRow>& rows) {
    Extremes e;
    for (const auto& r : rows) {
        double& slot = r.source == "training-state" ? e.min_training : e.min_random;
        slot = std::min(slot, r.fidelity_vs_trotter);
    }
    return e;
}

int prop1_violations(const std::vector<ResultRow>& rows) {
    int v = 0;
    for (const auto& r : rows) {
        if (r.source == "training-state" && !(r.prop1_bound <= r.fidelity_vs_trotter + 1e-9)) {
            ++v;
        }
    }
    return v;
}

FidelityConstraints three(double f) { return FidelityConstraints::uniform(2, f); }

FidelityConstraints four(double f) {
    auto fc = three(f);
    const double s = 1.0 / std::numbers::sqrt2;
    fc.extras.push_back({cplx(s), cplx(-s), 1, f});
    return fc;
}

// ---------------------------------------------------------------------------

Verdict criterion_1(const TimedRun& run) {
    Verdict v;
    const auto e = extremes(run.ex.rows);
    v.check(e.min_training >= 0.999, "min training fidelity " + fmt("%.6f", e.min_training) + " (need >= 0.999)");
    v.check(e.min_random >= 0.995, "min random fidelity " + fmt("%.6f", e.min_random) + " (need >= 0.995)");
    v.check(run.seconds < 120.0, "runtime " + fmt("%.2f", run.seconds) + " s");
    return v;
}

Verdict criterion_2(const TimedRun& su4) {
    Verdict v;
    const auto zxz = run_train_experiment(two_qubit_config(AnsatzFamily::ZxzCnot));
    const int a = prop1_violations(su4.ex.rows);
    const int b = prop1_violations(zxz.rows);
    v.check(a == 0, "su4-block violations " + std::to_string(a));
    v.check(b == 0, "zxz-cnot violations " + std::to_string(b));
    return v;
}

Verdict criterion_3() {
    Verdict v;
    const long double f = 0.99L;
    const long double ref = (2.0L * f - 1.0L) * (2.0L * f - 1.0L);
    const double got = prop1_lower_bound(std::vector<double>{0.99, 0.99});
    const double err = std::abs(static_cast<double>(static_cast<long double>(got) - ref));
    v.check(err <= 1e-12, "value " + fmt("%.15f", got) + ", error " + fmt("%.1e", err));
    return v;
}

Verdict criterion_4() {
    Verdict v;
    const auto t0 = Clock::now();
    const int n = 21;
    const auto s3 = bound_surface(three(0.99), n, n);
    double worst_gap = 0.0, worst_violation = 0.0;
    const SurfacePoint* lowest = &s3.points.front();
    for (const auto& p : s3.points) {
        worst_gap = std::max(worst_gap, std::abs(p.bound.duality_gap));
        worst_violation = std::max(worst_violation, p.bound.max_violation);
        if (p.bound.value < lowest->bound.value) {
            lowest = &p;
        }
    }
    v.check(s3.converged && worst_gap < 1e-7 && worst_violation < 1e-7,
            "(a) worst gap " + fmt("%.1e", worst_gap) + ", worst violation " + fmt("%.1e", worst_violation));

    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> pick(0, s3.points.size() - 1);
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 50; ++k) {
        const auto& p = s3.points[pick(rng)];
        const auto o = qcqp_oracle(two_level_coefficients(p.theta, p.phi), three(0.99), 16, 1 + k);
        worst_excess = std::max(worst_excess, p.bound.value - o.value);
    }
    v.check(worst_excess <= 1e-6, "(b) max SDR - oracle " + fmt("%.2e", worst_excess));

    const double at_basis = s3.points.front().bound.value;
    v.check(std::abs(at_basis - 0.99) <= 1e-4, "(c) bound at basis state " + fmt("%.8f", at_basis));
    v.check(std::abs(lowest->phi - std::numbers::pi) < 1e-12,
            "(d) minimum " + fmt("%.6f", lowest->bound.value) + " at phi " + fmt("%.6f", lowest->phi));

    const auto s4 = bound_surface(four(0.99), n, n);
    double worst_drop = 0.0;
    for (std::size_t k = 0; k < s3.points.size(); ++k) {
        worst_drop = std::max(worst_drop, s3.points[k].bound.value - s4.points[k].bound.value);
    }
    v.check(s4.converged && worst_drop <= 1e-7, "(e) max drop with fourth constraint " + fmt("%.1e", worst_drop));
    const double secs = seconds_since(t0);
    v.check(secs < 300.0, "runtime " + fmt("%.1f", secs) + " s");
    return v;
}

Verdict criterion_5() {
    Verdict v;
    const std::vector<double> eps = {0.001, 0.005, 0.01, 0.05};
    const int n_phi = 21;
    int monotone_breaks = 0;
    int dominance_breaks = 0;
    for (int j = 0; j < n_phi; ++j) {
        const CVector c = two_level_coefficients(std::numbers::pi / 2, j * 2.0 * std::numbers::pi / (n_phi - 1));
        double prev3 = 2.0, prev4 = 2.0;
        for (double e : eps) {
            const double b3 = fidelity_lower_bound(c, three(1.0 - e)).value;
            const double b4 = fidelity_lower_bound(c, four(1.0 - e)).value;
            monotone_breaks += b3 > prev3 + 1e-7;
            monotone_breaks += b4 > prev4 + 1e-7;
            dominance_breaks += b4 < b3 - 1e-7;
            prev3 = b3;
            prev4 = b4;
        }
    }
    v.check(monotone_breaks == 0, "monotonicity breaks " + std::to_string(monotone_breaks));
    v.check(dominance_breaks == 0, "dominance breaks " + std::to_string(dominance_breaks));
    return v;
}

Verdict criterion_6() {
    Verdict v;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uf(0.5, 0.999);
    std::normal_distribution<double> n01;
    double worst_eig = std::numeric_limits<double>::infinity();
    double worst_slack = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100; ++k) {
        FidelityConstraints fc;
        fc.d = 2 + k % 3;
        for (int i = 0; i < fc.d; ++i) {
            fc.F_basis.push_back(uf(rng));
        }
        for (int i = 1; i < fc.d; ++i) {
            fc.F_plus.push_back(uf(rng));
        }
        CVector c(fc.d);
        for (int i = 0; i < fc.d; ++i) {
            c[i] = cplx(n01(rng), n01(rng));
        }
        c /= c.norm();
        const CMatrix x = strictly_feasible_point(fc);
        worst_eig = std::min(worst_eig, Eigen::SelfAdjointEigenSolver<CMatrix>(x).eigenvalues().minCoeff());
        for (const auto& row : build_sdp(c, fc).constraints) {
            const double val = (row.A * x).trace().real();
            worst_slack = std::min({worst_slack, val - row.lower, row.upper - val});
        }
    }
    v.check(worst_eig > 0.0, "min eigenvalue " + fmt("%.3e", worst_eig));
    v.check(worst_slack > 0.0, "min constraint slack " + fmt("%.3e", worst_slack));
    return v;
}

Verdict criterion_7() {
    Verdict v;
    ExperimentConfig cfg = two_qubit_config(AnsatzFamily::ZxzCnot);
    cfg.warmstart.r0 = 0.5;
    cfg.warmstart.samples = 10000;
    cfg.warmstart.center_steps = 1;
    const auto ex = run_warmstart_experiment(cfg);
    const auto& r = ex.report;
    const double lower = r.empirical_variance - r.confidence_interval;
    v.check(r.thm2_admissible, "dt " + fmt("%.5f", r.dt) + " of max " + fmt("%.5f", r.dt_max) + ", r " +
                                   fmt("%.5f", r.r));
    v.check(lower >= r.thm2_bound, "variance " + fmt("%.4e", r.empirical_variance) + " - CI " +
                                       fmt("%.2e", r.confidence_interval) + " vs thm2 " + fmt("%.3e", r.thm2_bound));
    v.check(lower >= r.prop2_bound, "vs prop2 " + fmt("%.3e", r.prop2_bound));
    double worst = 0.0;
    for (double x : {0.001, 0.01, 0.1, r.r, 0.5, 1.0}) {
        const auto m = trig_moments(x);
        worst = std::max({worst, std::abs(m.k_plus + m.k_minus - 1.0),
                          std::abs(m.c_plus + m.c_minus + 2.0 * m.c_zero - 1.0),
                          std::abs(m.c_plus + m.c_zero - m.k_plus), std::abs(m.c_minus + m.c_zero - m.k_minus)});
    }
    v.check(worst <= 1e-12, "moment identity error " + fmt("%.1e", worst));
    return v;
}

Verdict criterion_8(const ExperimentConfig& cfg, const TimedRun& run) {
    Verdict v;
    const auto setup = make_setup(cfg);
    const auto rows = run_entanglement_experiment(run.ex.training.trajectory, setup.basis, setup.trotter.circuit,
                                                  cfg.model, cfg.dt, theta_grid(9));
    double worst = 0.0;
    for (const auto& r : rows) {
        worst = std::max(worst, std::abs(r.ce_pqc - r.ce_exact));
    }
    v.check(worst <= 0.02, "max |ce_pqc - ce_exact| " + fmt("%.5f", worst));
    CVector b = CVector::Zero(4);
    b[0] = b[3] = 1.0 / std::numbers::sqrt2;
    const double ce = concentratable_entanglement(StateVector::from_amplitudes(b), {0, 1});
    v.check(std::abs(ce - 0.25) <= 1e-10, "CE(Bell) " + fmt("%.15f", ce));
    return v;
}

Verdict criterion_9(const TimedRun& run) {
    Verdict v;
    const auto e = extremes(run.ex.rows);
    double worst_step = 0.0;
    for (const auto& s : run.ex.training.record.steps) {
        for (double f : s.fidelities) {
            worst_step = std::max(worst_step, 1.0 - f);
        }
    }
    v.check(1.0 - e.min_training <= 0.05,
            "worst infidelity vs Trotter " + fmt("%.4f", 1.0 - e.min_training) + " (need <= 0.05)");
    v.check(run.seconds < 1800.0, "runtime " + fmt("%.1f", run.seconds) + " s");
    v.detail += "; worst single-step training infidelity " + fmt("%.4f", worst_step) + ", unconverged steps " +
                std::to_string(run.ex.status.unconverged_steps);
    return v;
}

Verdict criterion_10(const ExperimentConfig& c1, const TimedRun& r1, const ExperimentConfig& c9, const TimedRun& r9) {
    Verdict v;
    v.check(timed_train(c1).csv == r1.csv, "two-qubit rerun identical");
    v.check(timed_train(c9).csv == r9.csv, "six-qubit rerun identical");
    return v;
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char* title, const std::function<Verdict()>& body) {
        Verdict v;
        try {
            v = body();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failures += !v.pass;
        std::printf("%s criterion %d: %s | %s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
        std::fflush(stdout);
    };

    const auto c1 = two_qubit_config(AnsatzFamily::Su4Block);
    const auto c9 = six_qubit_config();
    TimedRun r1, r9;
    report(1, "two-qubit subspace training", [&] {
        r1 = timed_train(c1);
        return criterion_1(r1);
    });
    report(2, "accumulated-angle bound soundness", [&] { return criterion_2(r1); });
    report(3, "two-step bound point value", [] { return criterion_3(); });
    report(4, "relaxation surface quality", [] { return criterion_4(); });
    report(5, "perturbation monotonicity", [] { return criterion_5(); });
    report(6, "strictly feasible point", [] { return criterion_6(); });
    report(7, "warm-start variance floors", [] { return criterion_7(); });
    report(8, "entanglement dynamics", [&] { return criterion_8(c1, r1); });
    report(9, "six-qubit chain training", [&] {
        r9 = timed_train(c9);
        return criterion_9(r9);
    });
    report(10, "determinism", [&] { return criterion_10(c1, r1, c9, r9); });

    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}

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
/**
 * @file
 * Experiment drivers behind the command-line tool, and the CSV format they emit.
 *
 * Every table starts with a `# schema: svqs.<name>/<version>` line followed by a
 * header row. Numbers use `%.17g`, missing values are `nan`, lines end in LF.
 */
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "svqs/ansatz.hpp"
#include "svqs/bounds.hpp"
#include "svqs/config.hpp"
#include "svqs/hamiltonian.hpp"
#include "svqs/quantum_core.hpp"
#include "svqs/training.hpp"
#include "svqs/warmstart.hpp"

namespace svqs {

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

using CsvCell = std::variant<double, std::int64_t, std::string>;

class CsvTable {
  public:
    CsvTable(std::string schema, int version, std::vector<std::string> columns)
        : schema_(std::move(schema)), version_(version), columns_(std::move(columns)) {}

    void add_row(std::vector<CsvCell> row) {
        if (row.size() != columns_.size()) {
            throw Error("CSV row has " + std::to_string(row.size()) + " cells, expected " +
                        std::to_string(columns_.size()));
        }
        rows_.push_back(std::move(row));
    }

    [[nodiscard]] const std::string& schema() const noexcept { return schema_; }
    [[nodiscard]] int version() const noexcept { return version_; }
    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<std::vector<CsvCell>>& rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t column(std::string_view name) const {
        for (std::size_t k = 0; k < columns_.size(); ++k) {
            if (columns_[k] == name) {
                return k;
            }
        }
        throw Error("no CSV column named '" + std::string(name) + "'");
    }

    static std::string format_cell(const CsvCell& c) {
        if (const auto* d = std::get_if<double>(&c)) {
            if (std::isnan(*d)) {
                return "nan";
            }
            if (std::isinf(*d)) {
                return *d > 0 ? "inf" : "-inf";
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", *d);
            return buf;
        }
        if (const auto* i = std::get_if<std::int64_t>(&c)) {
            return std::to_string(*i);
        }
        return std::get<std::string>(c);
    }

    [[nodiscard]] std::string str() const {
        std::string out = "# schema: svqs." + schema_ + "/" + std::to_string(version_) + "\n";
        for (std::size_t k = 0; k < columns_.size(); ++k) {
            out += (k ? "," : "") + columns_[k];
        }
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                if (k) {
                    out += ',';
                }
                out += format_cell(row[k]);
            }
            out += '\n';
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error("cannot write '" + path + "'");
        }
        f << str();
        if (!f) {
            throw Error("write to '" + path + "' failed");
        }
    }

  private:
    std::string schema_;
    int version_;
    std::vector<std::string> columns_;
    std::vector<std::vector<CsvCell>> rows_;
};

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

struct ExperimentSetup {
    SubspaceBasis basis;
    AnsatzSpec ansatz;
    TrotterSpec trotter;
};

inline ExperimentSetup make_setup(const ExperimentConfig& cfg) {
    SubspaceBasis basis = cfg.basis();
    return {std::move(basis), build_ansatz(cfg.ansatz_family, cfg.model.n_qubits, cfg.ansatz_layers),
            trotter_step(cfg.model, cfg.dt, cfg.trotter_order)};
}

/// Outcome flags shared by all drivers; `converged` is false if any optimization hit its budget.
struct RunStatus {
    bool converged = true;
    int unconverged_steps = 0;
    bool stalled = false;
};

inline RunStatus status_of(const TrainingRecord& rec) {
    RunStatus s;
    for (const auto& step : rec.steps) {
        if (!step.converged) {
            s.converged = false;
            ++s.unconverged_steps;
        }
        s.stalled = s.stalled || step.stalled;
    }
    return s;
}

inline void merge(RunStatus& into, const RunStatus& other) {
    into.converged = into.converged && other.converged;
    into.unconverged_steps += other.unconverged_steps;
    into.stalled = into.stalled || other.stalled;
}

/// Complex-normal coefficients, normalized: unitarily invariant on the unit sphere of C^d.
template <class Rng>
CVector random_subspace_coefficients(int d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector c(d);
    for (int i = 0; i < d; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        c[i] = cplx(re, im);
    }
    return c / c.norm();
}

/// T^m |psi> for m = 0..n_steps.
inline std::vector<StateVector> trotter_orbit(const StateVector& psi, const Circuit& trotter, int n_steps) {
    std::vector<StateVector> out;
    out.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.push_back(psi);
    for (int m = 1; m <= n_steps; ++m) {
        out.push_back(trotter.apply(out.back()));
    }
    return out;
}

/// |<T^m psi | U(phi_m) psi>|^2 for m = 1..n (index m - 1).
inline std::vector<double> fidelity_vs_trotter(const StateVector& psi, const ParameterTrajectory& traj,
                                               const Circuit& trotter) {
    const int n = static_cast<int>(traj.snapshots.size()) - 1;
    const auto orbit = trotter_orbit(psi, trotter, n);
    std::vector<double> f;
    f.reserve(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) {
        const auto out = apply_ansatz(psi, traj.ansatz, traj.snapshots[static_cast<std::size_t>(m)]);
        f.push_back(fidelity_pure(out, orbit[static_cast<std::size_t>(m)]));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Training-curve experiment
// ---------------------------------------------------------------------------

struct ResultRow {
    int step = 0;
    std::string state_label;
    double fidelity_vs_trotter = 0.0;
    /// nan for random states, which have no per-step training history.
    double prop1_bound = std::numeric_limits<double>::quiet_NaN();
    std::string source;
};

struct RandomStateFidelities {
    std::string label;
    CVector coefficients;
    /// Index m - 1 holds step m.
    std::vector<double> fidelities;
};

/// Random-state stream; independent of the training set so variants see the same draws.
inline constexpr std::uint64_t kRandomStateStream = 0x5eed'0000'0000'0001ULL;

inline std::string random_label(int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "random%04d", k);
    return buf;
}

inline std::vector<RandomStateFidelities> random_state_sweep(const ParameterTrajectory& traj,
                                                             const SubspaceBasis& basis, const Circuit& trotter,
                                                             int count, std::uint64_t seed) {
    if (count < 0) {
        throw Error("random state count must be non-negative");
    }
    std::mt19937_64 rng(detail::mix_seed(seed, kRandomStateStream));
    std::vector<RandomStateFidelities> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        RandomStateFidelities r;
        r.label = random_label(k);
        r.coefficients = random_subspace_coefficients(basis.d(), rng);
        r.fidelities = fidelity_vs_trotter(basis.combine(r.coefficients), traj, trotter);
        out.push_back(std::move(r));
    }
    return out;
}

struct TrainExperiment {
    TrainingResult training;
    std::vector<ResultRow> rows;
    RunStatus status;
};

inline const std::vector<std::string>& train_columns() {
    static const std::vector<std::string> cols = {"step", "state_label", "fidelity_vs_trotter", "prop1_bound",
                                                  "source"};
    return cols;
}

/**
 * Trains, then scores every training state and `random_sweep_count` random
 * subspace states against the m-fold Trotter circuit on the raw state.
 * Rows are ordered by step, training states first.
 */
inline TrainExperiment run_train_experiment(const ExperimentConfig& cfg, bool include_training = true,
                                            std::optional<TrainingSet> set_override = std::nullopt) {
    const ExperimentSetup setup = make_setup(cfg);
    const TrainingSet set = set_override.value_or(cfg.training_set);
    TrainExperiment ex;
    ex.training = train_subspace(setup.basis, setup.ansatz, setup.trotter, cfg.n_steps, cfg.optimizer, cfg.shots, set);
    ex.status = status_of(ex.training.record);

    const auto states = training_states(setup.basis, set);
    std::vector<std::vector<double>> train_f;
    if (include_training) {
        for (const auto& s : states) {
            train_f.push_back(fidelity_vs_trotter(s.state, ex.training.trajectory, setup.trotter.circuit));
        }
    }
    const auto randoms = random_state_sweep(ex.training.trajectory, setup.basis, setup.trotter.circuit,
                                            cfg.random_sweep_count, cfg.seed);
    for (int m = 1; m <= cfg.n_steps; ++m) {
        const auto mi = static_cast<std::size_t>(m - 1);
        for (std::size_t s = 0; s < train_f.size(); ++s) {
            const auto hist = ex.training.record.history(s, static_cast<std::size_t>(m));
            ex.rows.push_back({m, states[s].label, train_f[s][mi], prop1_lower_bound(hist), "training-state"});
        }
        for (const auto& r : randoms) {
            ex.rows.push_back({m, r.label, r.fidelities[mi], std::numeric_limits<double>::quiet_NaN(),
                               "random-state"});
        }
    }
    return ex;
}

inline CsvTable train_table(const std::vector<ResultRow>& rows) {
    CsvTable t("train", 1, train_columns());
    for (const auto& r : rows) {
        t.add_row({std::int64_t{r.step}, r.state_label, r.fidelity_vs_trotter, r.prop1_bound, r.source});
    }
    return t;
}

/// Per-step optimizer outcome, written next to the main table.
inline CsvTable training_log_table(const TrainingRecord& rec) {
    std::vector<std::string> cols = {"step", "cost", "iterations", "converged", "stalled"};
    for (const auto& l : rec.labels) {
        cols.push_back("step_fidelity_" + l);
    }
    CsvTable t("training_log", 1, std::move(cols));
    for (const auto& s : rec.steps) {
        std::vector<CsvCell> row = {std::int64_t{s.step}, s.cost, std::int64_t{s.iterations},
                                    std::int64_t{s.converged ? 1 : 0}, std::int64_t{s.stalled ? 1 : 0}};
        for (double f : s.fidelities) {
            row.emplace_back(f);
        }
        t.add_row(std::move(row));
    }
    return t;
}

struct CompareFewerExperiment {
    std::vector<std::pair<TrainingSet, TrainExperiment>> runs;
    RunStatus status;
};

/// run_train_experiment once per training set with shared seed and schedule.
inline CompareFewerExperiment compare_fewer_states(const ExperimentConfig& cfg) {
    CompareFewerExperiment out;
    for (TrainingSet set : {TrainingSet::Full, TrainingSet::BasisOnly, TrainingSet::SingleState}) {
        auto ex = run_train_experiment(cfg, true, set);
        merge(out.status, ex.status);
        out.runs.emplace_back(set, std::move(ex));
    }
    return out;
}

inline CsvTable compare_fewer_table(const CompareFewerExperiment& ex) {
    std::vector<std::string> cols = {"training_set"};
    cols.insert(cols.end(), train_columns().begin(), train_columns().end());
    CsvTable t("compare_fewer", 1, std::move(cols));
    for (const auto& [set, run] : ex.runs) {
        for (const auto& r : run.rows) {
            t.add_row({std::string(to_string(set)), std::int64_t{r.step}, r.state_label, r.fidelity_vs_trotter,
                       r.prop1_bound, r.source});
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Entanglement dynamics
// ---------------------------------------------------------------------------

/// 1 - 2^{-|s|} sum over subsets a of s of Tr[rho_a^2], with the empty-set purity taken as 1.
inline double concentratable_entanglement(const StateVector& state, const std::set<int>& subset) {
    if (subset.empty()) {
        throw Error("concentratable entanglement needs a nonempty qubit subset");
    }
    const std::vector<int> qubits(subset.begin(), subset.end());
    for (int q : qubits) {
        if (q < 0 || q >= state.n_qubits()) {
            throw Error("qubit " + std::to_string(q) + " outside register");
        }
    }
    const std::size_t k = qubits.size();
    if (k > 20) {
        throw Error("subset too large for exhaustive purity sum");
    }
    double sum = 1.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
        std::set<int> keep;
        for (std::size_t b = 0; b < k; ++b) {
            if (mask & (std::size_t{1} << b)) {
                keep.insert(qubits[b]);
            }
        }
        sum += static_cast<int>(keep.size()) == state.n_qubits() ? state.amplitudes().squaredNorm() *
                                                                       state.amplitudes().squaredNorm()
                                                                 : purity(partial_trace(state, keep));
    }
    return 1.0 - sum / static_cast<double>(std::size_t{1} << k);
}

struct EntanglementRow {
    double theta = 0.0;
    int step = 0;
    double ce_pqc = 0.0;
    double ce_trotter = 0.0;
    double ce_exact = 0.0;
};

/// theta_k = k pi / (points - 1); a single point means theta = 0.
inline std::vector<double> theta_grid(int points) {
    if (points < 1) {
        throw Error("theta grid needs at least one point");
    }
    std::vector<double> g;
    for (int k = 0; k < points; ++k) {
        g.push_back(points == 1 ? 0.0 : k * std::numbers::pi / (points - 1));
    }
    return g;
}

/**
 * CE over all qubits of |psi_0(theta)> = cos(theta/2)|Psi_0> + sin(theta/2)|Psi_1>
 * propagated by the trained circuit, the Trotter circuit and the exact evolution,
 * for every step m = 0..n.
 */
inline std::vector<EntanglementRow> run_entanglement_experiment(const ParameterTrajectory& traj,
                                                                const SubspaceBasis& basis, const Circuit& trotter,
                                                                const IsingParams& model, double dt,
                                                                const std::vector<double>& thetas) {
    if (basis.d() < 2) {
        throw Error("entanglement sweep needs a subspace of dimension at least 2");
    }
    if (traj.ansatz.n_qubits != basis.n_qubits() || model.n_qubits != basis.n_qubits()) {
        throw Error("trajectory and subspace act on different registers");
    }
    const int n = static_cast<int>(traj.snapshots.size()) - 1;
    std::set<int> all;
    for (int q = 0; q < basis.n_qubits(); ++q) {
        all.insert(q);
    }
    std::vector<CMatrix> exact;
    exact.reserve(static_cast<std::size_t>(n) + 1);
    for (int m = 0; m <= n; ++m) {
        exact.push_back(exact_propagator(model, m * dt));
    }
    std::vector<EntanglementRow> rows;
    for (double theta : thetas) {
        CVector c = CVector::Zero(basis.d());
        c[0] = std::cos(theta / 2.0);
        c[1] = std::sin(theta / 2.0);
        const StateVector psi = basis.combine(c);
        const auto orbit = trotter_orbit(psi, trotter, n);
        for (int m = 0; m <= n; ++m) {
            const auto mi = static_cast<std::size_t>(m);
            EntanglementRow r;
            r.theta = theta;
            r.step = m;
            r.ce_pqc = concentratable_entanglement(apply_ansatz(psi, traj.ansatz, traj.snapshots[mi]), all);
            r.ce_trotter = concentratable_entanglement(orbit[mi], all);
            r.ce_exact =
                concentratable_entanglement(StateVector::normalized(exact[mi] * psi.amplitudes()), all);
            rows.push_back(r);
        }
    }
    return rows;
}

inline CsvTable entanglement_table(const std::vector<EntanglementRow>& rows) {
    CsvTable t("entanglement", 1, {"theta", "step", "ce_pqc", "ce_trotter", "ce_exact"});
    for (const auto& r : rows) {
        t.add_row({r.theta, std::int64_t{r.step}, r.ce_pqc, r.ce_trotter, r.ce_exact});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Bound surface
// ---------------------------------------------------------------------------

/// Two-dimensional constraint set from config: F0, F1, F1_plus and optionally F1_minus.
inline FidelityConstraints surface_constraints(const ExperimentConfig::Bounds& b) {
    FidelityConstraints fc;
    fc.d = 2;
    fc.F_basis = {b.F0, b.F1};
    fc.F_plus = {b.F1_plus};
    if (b.F1_minus) {
        const double s = 1.0 / std::numbers::sqrt2;
        fc.extras.push_back({cplx(s, 0.0), cplx(-s, 0.0), 1, *b.F1_minus});
    }
    fc.validate();
    return fc;
}

struct SurfacePoint {
    double theta = 0.0;
    double phi = 0.0;
    FidelityBound bound;
};

struct BoundSurface {
    std::vector<SurfacePoint> points;
    bool converged = true;
};

/// theta in [0, pi] and phi in [0, 2 pi], both endpoints included.
inline BoundSurface bound_surface(const FidelityConstraints& fc, int theta_points, int phi_points,
                                  double tol = 1e-8) {
    if (fc.d != 2) {
        throw Error("bound surface is defined for two-dimensional subspaces");
    }
    if (theta_points < 2 || phi_points < 2) {
        throw Error("bound surface grid needs at least two points per axis");
    }
    BoundSurface s;
    for (int i = 0; i < theta_points; ++i) {
        const double theta = i * std::numbers::pi / (theta_points - 1);
        for (int j = 0; j < phi_points; ++j) {
            const double phi = j * 2.0 * std::numbers::pi / (phi_points - 1);
            SurfacePoint p{theta, phi, fidelity_lower_bound(two_level_coefficients(theta, phi), fc, tol)};
            s.converged = s.converged && p.bound.converged;
            s.points.push_back(p);
        }
    }
    return s;
}

inline CsvTable bound_surface_table(const BoundSurface& s) {
    CsvTable t("bound_surface", 1, {"theta", "phi", "bound", "rank", "gap", "max_violation", "iterations"});
    for (const auto& p : s.points) {
        t.add_row({p.theta, p.phi, p.bound.value, std::int64_t{p.bound.rank_estimate}, p.bound.duality_gap,
                   p.bound.max_violation, std::int64_t{p.bound.iterations}});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Warm-start variance
// ---------------------------------------------------------------------------

struct WarmStartExperiment {
    WarmStartReport report;
    RunStatus status;
};

/// Center = parameters after `warmstart.center_steps` training steps.
inline WarmStartExperiment run_warmstart_experiment(const ExperimentConfig& cfg) {
    const ExperimentSetup setup = make_setup(cfg);
    if (cfg.warmstart.center_steps < 0) {
        throw ConfigError("must be non-negative", 0, "warmstart.center_steps");
    }
    const auto tr = train_subspace(setup.basis, setup.ansatz, setup.trotter, cfg.warmstart.center_steps,
                                   cfg.optimizer, cfg.shots, cfg.training_set);
    WarmStartSetup ws;
    ws.r0 = cfg.warmstart.r0;
    ws.dt = cfg.warmstart.dt;
    ws.r = cfg.warmstart.r;
    ws.samples = cfg.warmstart.samples;
    ws.seed = cfg.seed;
    return {warmstart_report(setup.basis, setup.ansatz, tr.trajectory.snapshots.back(), cfg.model, ws),
            status_of(tr.record)};
}

inline CsvTable warmstart_table(const WarmStartReport& r) {
    CsvTable t("warmstart", 1,
               {"M", "r", "r0", "dt", "E_m", "sigma1", "overlap_term", "delta", "dt_max", "r2_max", "prop2_bound",
                "thm2_bound", "thm2_admissible", "empirical_variance", "confidence_interval", "samples"});
    t.add_row({std::int64_t{r.M}, r.r, r.r0, r.dt, r.E_m, r.sigma1.letters(), r.overlap_term, r.delta, r.dt_max,
               r.r2_max, r.prop2_bound, r.thm2_bound, std::int64_t{r.thm2_admissible ? 1 : 0}, r.empirical_variance,
               r.confidence_interval, std::int64_t{r.sample_count}});
    return t;
}

} // namespace svqs

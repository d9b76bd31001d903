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
 * Subspace training: the per-step fidelity cost, the two optimizers and the
 * step-by-step training loop.
 *
 * At step m the circuit U(phi) is fitted so that, for every training state
 * s, U(phi)|s> matches T(dt) U(phi_{m-1})|s>. The training states are the
 * basis states |Psi_i> and the pairwise superpositions
 * |Psi_i^+> = (|Psi_0> + |Psi_i>)/sqrt(2); the latter pin the relative
 * phases between basis columns.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svqs/ansatz.hpp"
#include "svqs/hamiltonian.hpp"
#include "svqs/quantum_core.hpp"

namespace svqs {

/// Orthonormal basis {|Psi_i>} of the simulated subspace.
class SubspaceBasis {
  public:
    explicit SubspaceBasis(std::vector<StateVector> basis) : basis_(std::move(basis)) {
        if (basis_.empty()) {
            throw Error("subspace basis needs at least one state");
        }
        const int n = basis_.front().n_qubits();
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (basis_[i].n_qubits() != n) {
                throw Error("subspace basis states have different qubit counts");
            }
            for (std::size_t j = 0; j <= i; ++j) {
                const double expect = i == j ? 1.0 : 0.0;
                if (std::abs(inner_product(basis_[i], basis_[j]) - expect) > 1e-10) {
                    throw Error("subspace basis is not orthonormal (states " + std::to_string(j) + ", " +
                                std::to_string(i) + ")");
                }
            }
        }
        const double s = 1.0 / std::numbers::sqrt2;
        for (std::size_t i = 1; i < basis_.size(); ++i) {
            plus_.push_back(StateVector::normalized(s * (basis_[0].amplitudes() + basis_[i].amplitudes())));
        }
    }

    [[nodiscard]] int d() const noexcept { return static_cast<int>(basis_.size()); }
    [[nodiscard]] int n_qubits() const noexcept { return basis_.front().n_qubits(); }
    [[nodiscard]] const std::vector<StateVector>& basis() const noexcept { return basis_; }
    /// plus_states()[i - 1] is |Psi_i^+>.
    [[nodiscard]] const std::vector<StateVector>& plus_states() const noexcept { return plus_; }

    /// sum_i c_i |Psi_i>.
    [[nodiscard]] StateVector combine(const CVector& c) const {
        if (c.size() != d()) {
            throw Error("coefficient vector length differs from subspace dimension");
        }
        CVector v = CVector::Zero(basis_.front().amplitudes().size());
        for (int i = 0; i < d(); ++i) {
            v += c[i] * basis_[static_cast<std::size_t>(i)].amplitudes();
        }
        return StateVector::normalized(std::move(v));
    }

  private:
    std::vector<StateVector> basis_;
    std::vector<StateVector> plus_;
};

/// Which states enter the cost.
enum class TrainingSet {
    Full,        ///< basis and plus states (2d - 1 states)
    BasisOnly,   ///< basis states only
    SingleState, ///< |Psi_0> only
};

inline std::string_view to_string(TrainingSet t) {
    switch (t) {
    case TrainingSet::Full:
        return "full";
    case TrainingSet::BasisOnly:
        return "basis-only";
    case TrainingSet::SingleState:
        return "single-state";
    }
    return "?";
}

inline TrainingSet parse_training_set(std::string_view s) {
    if (s == "full") {
        return TrainingSet::Full;
    }
    if (s == "basis-only") {
        return TrainingSet::BasisOnly;
    }
    if (s == "single-state") {
        return TrainingSet::SingleState;
    }
    throw Error("unknown training set '" + std::string(s) + "'");
}

struct LabeledState {
    std::string label;
    StateVector state;
};

inline std::vector<LabeledState> training_states(const SubspaceBasis& basis, TrainingSet set = TrainingSet::Full) {
    std::vector<LabeledState> out;
    const int n_basis = set == TrainingSet::SingleState ? 1 : basis.d();
    for (int i = 0; i < n_basis; ++i) {
        out.push_back({"basis" + std::to_string(i), basis.basis()[static_cast<std::size_t>(i)]});
    }
    if (set == TrainingSet::Full) {
        for (int i = 1; i < basis.d(); ++i) {
            out.push_back({"plus" + std::to_string(i), basis.plus_states()[static_cast<std::size_t>(i - 1)]});
        }
    }
    return out;
}

/**
 * Cost of one training step with fixed targets T U(prev)|s>:
 *   C(phi) = 1 - (1/S) sum_s |<s| U(phi)^dagger T U(prev) |s>|^2.
 */
class StepObjective {
  public:
    StepObjective(const AnsatzSpec& ansatz, std::vector<StatePair> pairs)
        : ansatz_(&ansatz), pairs_(std::move(pairs)) {
        if (pairs_.empty()) {
            throw Error("step objective needs at least one training state");
        }
    }

    /// Targets from one Trotter step applied after the previous optimum.
    static StepObjective for_step(const AnsatzSpec& ansatz, std::span<const LabeledState> states,
                                  const Circuit& trotter, std::span<const double> prev_params) {
        std::vector<StatePair> pairs;
        pairs.reserve(states.size());
        for (const auto& s : states) {
            StateVector target = trotter.apply(apply_ansatz(s.state, ansatz, prev_params));
            pairs.push_back({s.state, std::move(target)});
        }
        return {ansatz, std::move(pairs)};
    }

    [[nodiscard]] const std::vector<StatePair>& pairs() const noexcept { return pairs_; }

    /// Per-state fidelities |<target_s| U(phi) |s>|^2.
    [[nodiscard]] std::vector<double> fidelities(std::span<const double> params) const {
        std::vector<double> f;
        f.reserve(pairs_.size());
        for (const auto& p : pairs_) {
            f.push_back(fidelity_pure(p.target, apply_ansatz(p.input, *ansatz_, params)));
        }
        return f;
    }

    [[nodiscard]] double cost(std::span<const double> params) const {
        double sum = 0.0;
        for (double f : fidelities(params)) {
            sum += f;
        }
        return 1.0 - sum / static_cast<double>(pairs_.size());
    }

    /// Each fidelity replaced by a binomial estimate over `shots` repetitions.
    template <class Rng>
    [[nodiscard]] double cost_sampled(std::span<const double> params, std::int64_t shots, Rng& rng) const {
        if (shots <= 0) {
            return cost(params);
        }
        double sum = 0.0;
        for (double f : fidelities(params)) {
            std::binomial_distribution<std::int64_t> dist(shots, f);
            sum += static_cast<double>(dist(rng)) / static_cast<double>(shots);
        }
        return 1.0 - sum / static_cast<double>(pairs_.size());
    }

    [[nodiscard]] CostAndGradient gradient(std::span<const double> params) const {
        return ansatz_gradient(pairs_, *ansatz_, params);
    }

  private:
    const AnsatzSpec* ansatz_;
    std::vector<StatePair> pairs_;
};

/**
 * Cost of step m over the full training set (basis plus superpositions):
 *   1 - 1/(2d-1) [ sum_i |<Psi_i(phi)|T|Psi_i(prev)>|^2
 *                + sum_{i>=1} |<Psi_i^+(phi)|T|Psi_i^+(prev)>|^2 ].
 */
inline double cost_m(std::span<const double> params, std::span<const double> prev_params, const SubspaceBasis& basis,
                     const TrotterSpec& trotter, const AnsatzSpec& ansatz, std::int64_t shots = 0,
                     std::uint64_t seed = 0) {
    ansatz.check_params(params);
    ansatz.check_params(prev_params);
    if (basis.n_qubits() != ansatz.n_qubits || trotter.circuit.n_qubits() != ansatz.n_qubits) {
        throw Error("basis, Trotter circuit and ansatz act on different registers");
    }
    if (shots < 0) {
        throw Error("shot count must be non-negative");
    }
    const auto states = training_states(basis, TrainingSet::Full);
    const auto objective = StepObjective::for_step(ansatz, states, trotter.circuit, prev_params);
    std::mt19937_64 rng(seed);
    return objective.cost_sampled(params, shots, rng);
}

enum class OptimizerKind { SequentialMinimal, Sgd };

inline std::string_view to_string(OptimizerKind k) {
    return k == OptimizerKind::SequentialMinimal ? "sequential-minimal" : "sgd";
}

inline OptimizerKind parse_optimizer_kind(std::string_view s) {
    if (s == "sequential-minimal" || s == "smo") {
        return OptimizerKind::SequentialMinimal;
    }
    if (s == "sgd") {
        return OptimizerKind::Sgd;
    }
    throw Error("unknown optimizer '" + std::string(s) + "'");
}

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::SequentialMinimal;
    /// Stop once the cost value drops below this.
    double halting_threshold = 1e-3;
    double learning_rate = 0.1;
    /// Sweeps for sequential-minimal, updates for sgd.
    int max_iterations = 200;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (!(halting_threshold > 0.0)) {
            throw Error("halting threshold must be positive");
        }
        if (kind == OptimizerKind::Sgd && !(learning_rate > 0.0)) {
            throw Error("sgd learning rate must be positive");
        }
        if (max_iterations < 0) {
            throw Error("max_iterations must be non-negative");
        }
    }

    static OptimizerConfig defaults_for(OptimizerKind kind) {
        OptimizerConfig c;
        c.kind = kind;
        c.max_iterations = kind == OptimizerKind::Sgd ? 2000 : 200;
        return c;
    }
};

struct OptimizationResult {
    ParameterVector params;
    double cost = 1.0;
    /// Cost after each sweep (sequential-minimal) or before each update (sgd); entry 0 is the start.
    std::vector<double> trace;
    int iterations = 0;
    bool converged = false;
    /// Full sweep without improvement while above the threshold.
    bool stalled = false;
    /// Single-parameter updates that raised the cost by more than 1e-12.
    int cost_increases = 0;
};

using CostFunction = std::function<double(std::span<const double>)>;
using GradientFunction = std::function<std::vector<double>(std::span<const double>)>;

/**
 * Sequential minimal optimization for costs in which every parameter enters
 * through one exp(-i phi sigma) rotation. Restricted to one parameter the
 * cost is A + B cos(2 phi + C); three evaluations at phi and phi +- pi/4 fix
 * A, B, C and the parameter jumps to the exact minimizer.
 */
inline OptimizationResult sequential_minimal_minimize(const CostFunction& cost, ParameterVector params0,
                                                      const OptimizerConfig& config) {
    config.validate();
    OptimizationResult res;
    res.params = std::move(params0);
    double c = cost(res.params);
    res.trace.push_back(c);
    if (c < config.halting_threshold) {
        res.cost = c;
        res.converged = true;
        return res;
    }
    constexpr double kQuarter = std::numbers::pi / 4.0;
    for (int sweep = 0; sweep < config.max_iterations && !res.converged; ++sweep) {
        const double start = c;
        for (std::size_t k = 0; k < res.params.size(); ++k) {
            const double phi = res.params[k];
            res.params[k] = phi + kQuarter;
            const double y_plus = cost(res.params);
            res.params[k] = phi - kQuarter;
            const double y_minus = cost(res.params);
            const double mean = 0.5 * (y_plus + y_minus);
            const double a = c - mean;
            const double b = 0.5 * (y_minus - y_plus);
            if (std::hypot(a, b) < 1e-15) {
                res.params[k] = phi;
                continue;
            }
            double shift = std::numbers::pi - std::atan2(b, a);
            if (shift > std::numbers::pi) {
                shift -= 2.0 * std::numbers::pi;
            }
            res.params[k] = phi + 0.5 * shift;
            const double next = cost(res.params);
            if (next > c + 1e-12) {
                ++res.cost_increases;
            }
            c = next;
        }
        ++res.iterations;
        res.trace.push_back(c);
        res.converged = c < config.halting_threshold;
        if (!res.converged && c >= start) {
            res.stalled = true;
            break;
        }
    }
    res.cost = c;
    return res;
}

/// Plain gradient descent phi <- phi - lr grad C.
inline OptimizationResult sgd_minimize(const CostFunction& cost, const GradientFunction& gradient,
                                       ParameterVector params0, const OptimizerConfig& config) {
    config.validate();
    OptimizationResult res;
    res.params = std::move(params0);
    double c = cost(res.params);
    for (int it = 0; it < config.max_iterations; ++it) {
        res.trace.push_back(c);
        if (c < config.halting_threshold) {
            break;
        }
        const std::vector<double> g = gradient(res.params);
        if (g.size() != res.params.size()) {
            throw Error("gradient length differs from parameter count");
        }
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!std::isfinite(g[k])) {
                throw NumericalError("non-finite gradient component " + std::to_string(k) + " at update " +
                                     std::to_string(it) + " (cost " + std::to_string(c) + ")");
            }
        }
        for (std::size_t k = 0; k < g.size(); ++k) {
            res.params[k] -= config.learning_rate * g[k];
        }
        ++res.iterations;
        c = cost(res.params);
    }
    if (res.trace.empty() || res.iterations == static_cast<int>(res.trace.size())) {
        res.trace.push_back(c);
    }
    res.cost = c;
    res.converged = c < config.halting_threshold;
    return res;
}

struct StepRecord {
    int step = 0;
    /// Converged fidelity of each training state, |<target_s|U(phi_m)|s>|^2 (exact).
    std::vector<double> fidelities;
    double cost = 1.0;
    int iterations = 0;
    bool converged = false;
    bool stalled = false;
};

struct TrainingRecord {
    std::vector<std::string> labels;
    std::vector<StepRecord> steps;

    [[nodiscard]] bool any_stalled() const {
        for (const auto& s : steps) {
            if (s.stalled) {
                return true;
            }
        }
        return false;
    }

    /// f_{s,1..m} for training state `state`.
    [[nodiscard]] std::vector<double> history(std::size_t state, std::size_t up_to_step) const {
        std::vector<double> h;
        for (std::size_t m = 0; m < up_to_step && m < steps.size(); ++m) {
            h.push_back(steps[m].fidelities.at(state));
        }
        return h;
    }
};

struct TrainingResult {
    ParameterTrajectory trajectory;
    TrainingRecord record;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/**
 * Runs steps m = 1..n_steps. phi_0 is the identity parameter set and step m
 * is warm-started at phi_{m-1}. Optimizer stalls are recorded, not thrown.
 */
inline TrainingResult train_subspace(const SubspaceBasis& basis, const AnsatzSpec& ansatz, const TrotterSpec& trotter,
                                     int n_steps, const OptimizerConfig& config, std::int64_t shots = 0,
                                     TrainingSet set = TrainingSet::Full) {
    config.validate();
    if (n_steps < 0) {
        throw Error("number of steps must be non-negative");
    }
    if (shots < 0) {
        throw Error("shot count must be non-negative");
    }
    if (basis.n_qubits() != ansatz.n_qubits || trotter.circuit.n_qubits() != ansatz.n_qubits) {
        throw Error("basis, Trotter circuit and ansatz act on different registers");
    }
    const auto states = training_states(basis, set);
    TrainingResult out;
    out.trajectory.ansatz = ansatz;
    out.trajectory.snapshots.push_back(identity_params(ansatz));
    for (const auto& s : states) {
        out.record.labels.push_back(s.label);
    }
    for (int m = 1; m <= n_steps; ++m) {
        const ParameterVector& prev = out.trajectory.snapshots.back();
        const auto objective = StepObjective::for_step(ansatz, states, trotter.circuit, prev);
        std::mt19937_64 rng(detail::mix_seed(config.rng_seed, static_cast<std::uint64_t>(m)));
        CostFunction cost = [&](std::span<const double> p) { return objective.cost_sampled(p, shots, rng); };
        OptimizationResult opt;
        if (config.kind == OptimizerKind::SequentialMinimal) {
            opt = sequential_minimal_minimize(cost, prev, config);
        } else {
            GradientFunction grad;
            if (shots == 0) {
                grad = [&](std::span<const double> p) { return objective.gradient(p).gradient; };
            } else {
                // parameter shift on the 2 phi sinusoid: dC/dphi = C(phi + pi/4) - C(phi - pi/4)
                grad = [&](std::span<const double> p) {
                    ParameterVector q(p.begin(), p.end());
                    std::vector<double> g(q.size());
                    for (std::size_t k = 0; k < q.size(); ++k) {
                        const double phi = q[k];
                        q[k] = phi + std::numbers::pi / 4.0;
                        const double up = cost(q);
                        q[k] = phi - std::numbers::pi / 4.0;
                        const double down = cost(q);
                        q[k] = phi;
                        g[k] = up - down;
                    }
                    return g;
                };
            }
            opt = sgd_minimize(cost, grad, prev, config);
        }
        StepRecord rec;
        rec.step = m;
        rec.fidelities = objective.fidelities(opt.params);
        rec.cost = objective.cost(opt.params);
        rec.iterations = opt.iterations;
        rec.converged = opt.converged;
        rec.stalled = opt.stalled;
        out.record.steps.push_back(std::move(rec));
        out.trajectory.snapshots.push_back(std::move(opt.params));
    }
    return out;
}

} // namespace svqs

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
 * Cost variance near the previous optimum.
 *
 * For a step cost over the states {|psi_0>, |psi_1>, |psi_+>} and parameters
 * drawn uniformly from the hypercube of half-width r around phi_bar, the
 * variance admits a closed-form floor built from trigonometric moments of
 * the uniform distribution on [-r, r]. This header evaluates those floors
 * and a Monte Carlo estimate to compare against.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "svqs/ansatz.hpp"
#include "svqs/hamiltonian.hpp"
#include "svqs/quantum_core.hpp"
#include "svqs/training.hpp"

namespace svqs {

/// Moments of cos^2 / sin^2 under alpha ~ Uniform[-r, r].
struct TrigMoments {
    double r = 0.0;
    double c_plus = 1.0;  ///< E[cos^4]
    double c_minus = 0.0; ///< E[sin^4]
    double c_zero = 0.0;  ///< E[cos^2 sin^2]
    double k_plus = 1.0;  ///< E[cos^2]
    double k_minus = 0.0; ///< E[sin^2]

    /// c_plus - k_plus^2, evaluated by series for small r to avoid cancellation.
    [[nodiscard]] double variance_factor() const {
        if (r < 0.05) {
            const double r2 = r * r;
            const double r4 = r2 * r2;
            return r4 * (4.0 / 45.0 - r2 * (16.0 / 315.0 - r2 * (64.0 / 4725.0 -
                                                                  r2 * (1024.0 / 467775.0 - r2 * 2048.0 / 8513505.0))));
        }
        return (-1.0 + 4.0 * r * r + std::cos(4.0 * r) + r * std::sin(4.0 * r)) / (32.0 * r * r);
    }
};

inline TrigMoments trig_moments(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error("hypercube half-width must be positive");
    }
    TrigMoments m;
    m.r = r;
    const double s2 = std::sin(2.0 * r) / (4.0 * r);
    const double s4 = std::sin(4.0 * r) / (32.0 * r);
    m.k_plus = 0.5 + s2;
    m.k_minus = 0.5 - s2;
    m.c_plus = 0.375 + s2 + s4;
    m.c_minus = 0.375 - s2 + s4;
    m.c_zero = 0.125 - s4;
    return m;
}

/**
 * (1/3) sum_j ( |<psi_j|w_j>|^2 - |<psi_j|sigma|w_j>|^2 ),  w_j = U^dagger e^{-iH dt} U |psi_j>,
 * over |psi_0>, |psi_1> and |psi_+>, with sigma the first rotation generator.
 */
inline double delta_phibar(const SubspaceBasis& basis, const AnsatzSpec& ansatz, std::span<const double> params,
                           double dt, const IsingParams& hamiltonian) {
    if (basis.d() != 2) {
        throw Error("variance floor is defined for a two-state subspace");
    }
    if (hamiltonian.n_qubits != ansatz.n_qubits || basis.n_qubits() != ansatz.n_qubits) {
        throw Error("basis, Hamiltonian and ansatz act on different registers");
    }
    ansatz.check_params(params);
    const PauliString sigma = first_generator(ansatz);
    const CMatrix u = ansatz_unitary(ansatz, params);
    const CMatrix evolve = u.adjoint() * exact_propagator(hamiltonian, dt) * u;
    const StateVector states[3] = {basis.basis()[0], basis.basis()[1], basis.plus_states()[0]};
    double sum = 0.0;
    for (const auto& psi : states) {
        const CVector w = evolve * psi.amplitudes();
        CVector sw;
        detail::apply_pauli(sigma, w, sw);
        sum += std::norm(psi.amplitudes().dot(w)) - std::norm(psi.amplitudes().dot(sw));
    }
    return sum / 3.0;
}

/// (1/3) sum_j Tr[sigma rho_j sigma rho_j] = (1/3) sum_j |<psi_j|sigma|psi_j>|^2.
inline double overlap_term(const SubspaceBasis& basis, const PauliString& sigma) {
    if (basis.d() != 2) {
        throw Error("overlap term is defined for a two-state subspace");
    }
    const StateVector states[3] = {basis.basis()[0], basis.basis()[1], basis.plus_states()[0]};
    double sum = 0.0;
    for (const auto& psi : states) {
        CVector s;
        detail::apply_pauli(sigma, psi.amplitudes(), s);
        sum += std::norm(psi.amplitudes().dot(s));
    }
    return sum / 3.0;
}

/**
 * (c_+ - k_+^2) min_{xi in [-1,1]} (k Delta + (1-k) xi)^2 with k = k_+^{M-1}.
 * The minimum is 0 when the xi-interval straddles 0, else the nearer endpoint.
 */
inline double prop2_bound(double delta, const TrigMoments& moments, int M) {
    if (M < 1) {
        throw Error("parameter count must be at least 1");
    }
    const double k = std::pow(moments.k_plus, M - 1);
    const double lo = k * delta - (1.0 - k);
    const double hi = k * delta + (1.0 - k);
    double nearest = 0.0;
    if (lo > 0.0) {
        nearest = lo;
    } else if (hi < 0.0) {
        nearest = hi;
    }
    return moments.variance_factor() * nearest * nearest;
}

struct Thm2Conditions {
    /// Upper limit on dt; 0 when the overlap term leaves no admissible step.
    double dt_max = 0.0;
    bool applicable = false;
    double overlap_term = 0.0;
    double E_m = 0.0;
    int M = 0;
    double r0 = 0.0;

    /// Shared drift 1 - T - 2|E| dt - 2 E^2 dt^2.
    [[nodiscard]] double margin(double dt) const {
        const double e = std::abs(E_m);
        return 1.0 - overlap_term - 2.0 * e * dt - 2.0 * e * e * dt * dt;
    }

    /// Largest admissible r^2 at step dt.
    [[nodiscard]] double r2_max(double dt) const {
        const double a = margin(dt);
        return (3.0 * r0 * r0 / (M - 1)) * a / (1.0 + a);
    }
};

/**
 * With T the (1/3)-averaged Tr[sigma rho sigma rho]:
 *   dt_max = (sqrt(3 - 2T) - 1) / (2|E_m|)
 *   r^2 <= (3 r0^2/(M-1)) (1 - T - 2|E|dt - 2E^2 dt^2) / (2 - T - 2|E|dt - 2E^2 dt^2).
 */
inline Thm2Conditions thm2_conditions(double overlap, double E_m, int M, double r0) {
    if (!(r0 > 0.0 && r0 < 1.0)) {
        throw Error("r0 must lie in (0, 1)");
    }
    if (M < 2) {
        throw Error("conditions need at least two parameters");
    }
    if (!(overlap >= -1.0 && overlap <= 1.0)) {
        throw Error("overlap term outside [-1, 1]");
    }
    Thm2Conditions c;
    c.overlap_term = overlap;
    c.E_m = E_m;
    c.M = M;
    c.r0 = r0;
    const double disc = 3.0 - 2.0 * overlap;
    const double root = std::sqrt(std::max(disc, 0.0)) - 1.0;
    if (root <= 0.0 || E_m == 0.0) {
        c.dt_max = E_m == 0.0 && root > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        c.applicable = E_m == 0.0 && root > 0.0;
        return c;
    }
    c.dt_max = root / (2.0 * std::abs(E_m));
    c.applicable = true;
    return c;
}

struct Thm2Bound {
    double value = 0.0;
    bool admissible = false;
};

/// (4r^4/45)(1 - 4r^2/7)(1 - r0^2)^2 margin(dt)^2, or 0 flagged when dt or r is out of range.
inline Thm2Bound thm2_bound(const TrigMoments& moments, double r0, double overlap, double E_m, int M, double dt) {
    const Thm2Conditions cond = thm2_conditions(overlap, E_m, M, r0);
    const double r = moments.r;
    Thm2Bound out;
    if (!cond.applicable || !(dt >= 0.0) || dt >= cond.dt_max || r * r > cond.r2_max(dt)) {
        return out;
    }
    const double a = cond.margin(dt);
    const double one_minus = 1.0 - r0 * r0;
    out.value = (4.0 * std::pow(r, 4) / 45.0) * (1.0 - 4.0 * r * r / 7.0) * one_minus * one_minus * a * a;
    out.admissible = true;
    return out;
}

struct VarianceEstimate {
    double mean = 0.0;
    double variance = 0.0;
    /// Standard error of the variance estimator, sqrt((m4 - s^4)/n).
    double standard_error = 0.0;
    /// One-sided 99% half-width (2.326 standard errors).
    double confidence_interval = 0.0;
    int samples = 0;
};

/**
 * Unbiased variance of `cost` over uniform draws from the hypercube of
 * half-width r. Sample i uses its own generator seeded from (seed, i).
 */
inline VarianceEstimate empirical_variance(const std::function<double(std::span<const double>)>& cost,
                                           std::span<const double> center, double r, int samples,
                                           std::uint64_t seed) {
    if (samples < 2) {
        throw Error("variance estimate needs at least two samples");
    }
    if (!(r >= 0.0)) {
        throw Error("hypercube half-width must be non-negative");
    }
    std::vector<double> values(static_cast<std::size_t>(samples));
    ParameterVector p(center.begin(), center.end());
    std::uniform_real_distribution<double> offset(-r, r);
    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(i)));
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] = center[k] + offset(rng);
        }
        values[static_cast<std::size_t>(i)] = cost(p);
    }
    VarianceEstimate out;
    out.samples = samples;
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= samples;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    out.mean = mean;
    out.variance = m2 / (samples - 1);
    const double s2 = m2 / samples;
    m4 /= samples;
    out.standard_error = std::sqrt(std::max(m4 - s2 * s2, 0.0) / samples);
    out.confidence_interval = 2.326 * out.standard_error;
    return out;
}

/**
 * Step cost against the exact propagator:
 * (1/3) sum_j 1 - |<psi_j| U(phi)^dagger e^{-iH dt} U(phi_bar) |psi_j>|^2.
 */
inline std::function<double(std::span<const double>)> exact_step_cost(const SubspaceBasis& basis,
                                                                      const AnsatzSpec& ansatz,
                                                                      std::span<const double> phi_bar, double dt,
                                                                      const IsingParams& hamiltonian) {
    if (basis.d() != 2) {
        throw Error("exact step cost is defined for a two-state subspace");
    }
    const CMatrix prop = exact_propagator(hamiltonian, dt);
    std::vector<StatePair> pairs;
    const StateVector states[3] = {basis.basis()[0], basis.basis()[1], basis.plus_states()[0]};
    for (const auto& s : states) {
        StateVector moved = apply_ansatz(s, ansatz, phi_bar);
        pairs.push_back({s, StateVector::normalized(prop * moved.amplitudes())});
    }
    return [pairs = std::move(pairs), &ansatz](std::span<const double> p) {
        double sum = 0.0;
        for (const auto& pr : pairs) {
            sum += fidelity_pure(pr.target, apply_ansatz(pr.input, ansatz, p));
        }
        return 1.0 - sum / static_cast<double>(pairs.size());
    };
}

struct WarmStartReport {
    int M = 0;
    double r = 0.0;
    double r0 = 0.0;
    double dt = 0.0;
    double E_m = 0.0;
    PauliString sigma1;
    double overlap_term = 0.0;
    double delta = 0.0;
    double dt_max = 0.0;
    double r2_max = 0.0;
    double prop2_bound = 0.0;
    double thm2_bound = 0.0;
    bool thm2_admissible = false;
    double empirical_variance = 0.0;
    double confidence_interval = 0.0;
    int sample_count = 0;
};

struct WarmStartSetup {
    double r0 = 0.5;
    /// Step size; <= 0 picks half of dt_max.
    double dt = 0.0;
    /// Half-width; <= 0 picks sqrt(r2_max(dt)).
    double r = 0.0;
    int samples = 10000;
    std::uint64_t seed = 0;
};

/**
 * Full comparison at center phi_bar: closed-form floors next to the sampled
 * variance of the exact-propagator step cost.
 */
inline WarmStartReport warmstart_report(const SubspaceBasis& basis, const AnsatzSpec& ansatz,
                                        std::span<const double> phi_bar, const IsingParams& hamiltonian,
                                        const WarmStartSetup& setup) {
    WarmStartReport rep;
    rep.M = ansatz.parameter_count;
    rep.r0 = setup.r0;
    rep.E_m = max_abs_energy(hamiltonian);
    rep.sigma1 = first_generator(ansatz);
    rep.overlap_term = overlap_term(basis, rep.sigma1);
    const Thm2Conditions cond = thm2_conditions(rep.overlap_term, rep.E_m, rep.M, setup.r0);
    rep.dt_max = cond.dt_max;
    rep.dt = setup.dt > 0.0 ? setup.dt : 0.5 * cond.dt_max;
    if (!(rep.dt > 0.0) || !std::isfinite(rep.dt)) {
        throw Error("no admissible time step: set warmstart.dt explicitly");
    }
    rep.r2_max = cond.applicable && rep.dt < cond.dt_max ? cond.r2_max(rep.dt) : 0.0;
    rep.r = setup.r > 0.0 ? setup.r : std::sqrt(rep.r2_max);
    if (!(rep.r > 0.0)) {
        throw Error("no admissible hypercube width: set warmstart.r explicitly");
    }
    const TrigMoments mom = trig_moments(rep.r);
    rep.delta = delta_phibar(basis, ansatz, phi_bar, rep.dt, hamiltonian);
    rep.prop2_bound = prop2_bound(rep.delta, mom, rep.M);
    const Thm2Bound tb = thm2_bound(mom, setup.r0, rep.overlap_term, rep.E_m, rep.M, rep.dt);
    rep.thm2_bound = tb.value;
    rep.thm2_admissible = tb.admissible;
    const auto cost = exact_step_cost(basis, ansatz, phi_bar, rep.dt, hamiltonian);
    const VarianceEstimate est = empirical_variance(cost, phi_bar, rep.r, setup.samples, setup.seed);
    rep.empirical_variance = est.variance;
    rep.confidence_interval = est.confidence_interval;
    rep.sample_count = est.samples;
    return rep;
}

} // namespace svqs

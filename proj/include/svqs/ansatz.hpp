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
 * Parameterized circuit families, identity initialization, unitary fitting
 * and adjoint-mode gradients of fidelity costs.
 *
 * Families:
 *  - su4-block: two-qubit block R(x)R, CNOT, Rx(x)Rz, H(q0), CNOT,
 *    H(q0) & Rz(q1), CNOT, R(x)R. R is the Euler rotation Rz Rx Rz
 *    (three parameters, applied in that time order). 15 parameters.
 *  - zxz-cnot: Rz Rx Rz on each qubit then CNOT, twice. 12 parameters.
 *  - su4-chain: su4-block on (0,1), (1,2), ..., (n-2,n-1) per layer.
 *
 * `layers` repeats the whole figure for su4-block and zxz-cnot.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "svqs/quantum_core.hpp"

namespace svqs {

enum class AnsatzFamily { Su4Block, ZxzCnot, Su4Chain };

inline std::string_view to_string(AnsatzFamily f) {
    switch (f) {
    case AnsatzFamily::Su4Block:
        return "su4-block";
    case AnsatzFamily::ZxzCnot:
        return "zxz-cnot";
    case AnsatzFamily::Su4Chain:
        return "su4-chain";
    }
    return "?";
}

inline AnsatzFamily parse_ansatz_family(std::string_view s) {
    if (s == "su4-block" || s == "su4") {
        return AnsatzFamily::Su4Block;
    }
    if (s == "zxz-cnot") {
        return AnsatzFamily::ZxzCnot;
    }
    if (s == "su4-chain") {
        return AnsatzFamily::Su4Chain;
    }
    throw Error("unknown ansatz family '" + std::string(s) + "'");
}

using ParameterVector = std::vector<double>;

/// One gate of the template. Parameterized slots are Pauli rotations whose
/// angle is read from params[param]; fixed slots have param = -1.
struct AnsatzGate {
    Gate gate;
    int param = -1;
    /// Conjugate of a fixed gate, kept for reverse sweeps.
    CMatrix inverse;
};

struct AnsatzSpec {
    AnsatzFamily family = AnsatzFamily::Su4Block;
    int n_qubits = 2;
    int layers = 1;
    std::vector<AnsatzGate> gates;
    int parameter_count = 0;
    /// Parameters with U = I up to global phase.
    ParameterVector identity;

    void check_params(std::span<const double> params) const {
        if (static_cast<int>(params.size()) != parameter_count) {
            throw Error("parameter vector has length " + std::to_string(params.size()) + ", ansatz expects " +
                        std::to_string(parameter_count));
        }
    }
};

struct ParameterTrajectory {
    AnsatzSpec ansatz;
    std::vector<ParameterVector> snapshots;
};

namespace detail {

class TemplateBuilder {
  public:
    explicit TemplateBuilder(int n_qubits) : n_(n_qubits) {}

    void rot(int q, char axis) {
        gates_.push_back({gates::rotation(PauliString::single(n_, q, axis), 0.0), next_++, {}});
    }
    void euler(int q) {
        rot(q, 'Z');
        rot(q, 'X');
        rot(q, 'Z');
    }
    void fixed(FixedUnitary u) {
        CMatrix inv = u.matrix.adjoint();
        gates_.push_back({std::move(u), -1, std::move(inv)});
    }

    void su4_block(int a, int b) {
        euler(a);
        euler(b);
        fixed(gates::cnot(a, b));
        rot(a, 'X');
        rot(b, 'Z');
        fixed(gates::hadamard(a));
        fixed(gates::cnot(a, b));
        fixed(gates::hadamard(a));
        rot(b, 'Z');
        fixed(gates::cnot(a, b));
        euler(a);
        euler(b);
    }

    void zxz_cnot_layer() {
        euler(0);
        euler(1);
        fixed(gates::cnot(0, 1));
        euler(0);
        euler(1);
        fixed(gates::cnot(0, 1));
    }

    [[nodiscard]] int count() const noexcept { return next_; }
    std::vector<AnsatzGate> take() { return std::move(gates_); }

  private:
    int n_;
    int next_ = 0;
    std::vector<AnsatzGate> gates_;
};

inline AnsatzSpec build_template(AnsatzFamily family, int n_qubits, int layers) {
    if (layers < 1) {
        throw Error("ansatz needs at least one layer");
    }
    if ((family == AnsatzFamily::Su4Block || family == AnsatzFamily::ZxzCnot) && n_qubits != 2) {
        throw Error(std::string(to_string(family)) + " acts on exactly 2 qubits, got " + std::to_string(n_qubits));
    }
    if (family == AnsatzFamily::Su4Chain && n_qubits < 2) {
        throw Error("su4-chain needs at least 2 qubits");
    }
    TemplateBuilder b(n_qubits);
    for (int l = 0; l < layers; ++l) {
        switch (family) {
        case AnsatzFamily::Su4Block:
            b.su4_block(0, 1);
            break;
        case AnsatzFamily::ZxzCnot:
            b.zxz_cnot_layer();
            break;
        case AnsatzFamily::Su4Chain:
            for (int q = 0; q + 1 < n_qubits; ++q) {
                b.su4_block(q, q + 1);
            }
            break;
        }
    }
    AnsatzSpec spec;
    spec.family = family;
    spec.n_qubits = n_qubits;
    spec.layers = layers;
    spec.parameter_count = b.count();
    spec.gates = b.take();
    return spec;
}

inline void apply_template(const AnsatzSpec& spec, std::span<const double> params, CVector& amps) {
    for (const auto& ag : spec.gates) {
        if (ag.param >= 0) {
            const auto& r = std::get<PauliRotation>(ag.gate);
            apply_pauli_rotation(r.axis, params[static_cast<std::size_t>(ag.param)], amps);
        } else {
            apply_fixed(std::get<FixedUnitary>(ag.gate), spec.n_qubits, amps);
        }
    }
}

inline void apply_template_adjoint_gate(const AnsatzSpec& spec, const AnsatzGate& ag, std::span<const double> params,
                                        CVector& amps) {
    if (ag.param >= 0) {
        const auto& r = std::get<PauliRotation>(ag.gate);
        apply_pauli_rotation(r.axis, -params[static_cast<std::size_t>(ag.param)], amps);
    } else {
        const auto& u = std::get<FixedUnitary>(ag.gate);
        if (u.targets.size() == 1) {
            apply_fixed_1q(ag.inverse, bit_of(spec.n_qubits, u.targets[0]), amps);
        } else if (u.targets.size() == 2) {
            apply_fixed_2q(ag.inverse, bit_of(spec.n_qubits, u.targets[0]), bit_of(spec.n_qubits, u.targets[1]), amps);
        } else {
            apply_fixed(FixedUnitary{ag.inverse, u.targets, u.name}, spec.n_qubits, amps);
        }
    }
}

} // namespace detail

/// Dense unitary of the bound circuit.
inline CMatrix ansatz_unitary(const AnsatzSpec& spec, std::span<const double> params) {
    spec.check_params(params);
    if (spec.n_qubits > kMaxDenseQubits) {
        throw Error("dense ansatz unitary requested for too many qubits");
    }
    const auto dim = static_cast<Eigen::Index>(detail::dim_of(spec.n_qubits));
    CMatrix u = CMatrix::Identity(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        CVector col = u.col(j);
        detail::apply_template(spec, params, col);
        u.col(j) = col;
    }
    return u;
}

/// min over alpha of ||U - e^{i alpha} V||_F, evaluated entrywise.
inline double phase_distance(const CMatrix& u, const CMatrix& v) {
    const cplx t = (v.adjoint() * u).trace();
    const cplx phase = std::abs(t) > 0.0 ? t / std::abs(t) : cplx(1.0);
    return (u - phase * v).norm();
}

struct UnitaryFit {
    ParameterVector params;
    double residual = std::numeric_limits<double>::infinity();
    int starts_used = 0;
};

/**
 * Finds parameters with U(params) = e^{i alpha} target by damped
 * Gauss-Newton on the entrywise residual, restarting from random points.
 * Stops at the first start reaching `tolerance`.
 */
inline UnitaryFit fit_unitary(const AnsatzSpec& spec, const CMatrix& target, int max_starts = 32,
                              std::uint64_t seed = 7, double tolerance = 1e-12) {
    const auto dim = static_cast<Eigen::Index>(detail::dim_of(spec.n_qubits));
    if (target.rows() != dim || target.cols() != dim) {
        throw Error("fit target has the wrong dimension");
    }
    const int m = spec.parameter_count;
    const Eigen::Index n_res = 2 * dim * dim;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

    auto residual = [&](const ParameterVector& p, double alpha) {
        const CMatrix diff = ansatz_unitary(spec, p) - std::polar(1.0, alpha) * target;
        Eigen::VectorXd r(n_res);
        for (Eigen::Index i = 0; i < dim * dim; ++i) {
            r[2 * i] = diff.data()[i].real();
            r[2 * i + 1] = diff.data()[i].imag();
        }
        return r;
    };

    auto jacobian = [&](const ParameterVector& p, double alpha) {
        Eigen::MatrixXd jac(n_res, m + 1);
        for (int k = 0; k < m; ++k) {
            CMatrix d = CMatrix::Identity(dim, dim);
            for (Eigen::Index j = 0; j < dim; ++j) {
                CVector col = d.col(j);
                for (const auto& ag : spec.gates) {
                    if (ag.param >= 0) {
                        const auto& r = std::get<PauliRotation>(ag.gate);
                        detail::apply_pauli_rotation(r.axis, p[static_cast<std::size_t>(ag.param)], col);
                        if (ag.param == k) {
                            CVector tmp;
                            detail::apply_pauli(r.axis, col, tmp);
                            col = cplx(0.0, -1.0) * tmp;
                        }
                    } else {
                        detail::apply_fixed(std::get<FixedUnitary>(ag.gate), spec.n_qubits, col);
                    }
                }
                d.col(j) = col;
            }
            for (Eigen::Index i = 0; i < dim * dim; ++i) {
                jac(2 * i, k) = d.data()[i].real();
                jac(2 * i + 1, k) = d.data()[i].imag();
            }
        }
        const CMatrix da = cplx(0.0, -1.0) * std::polar(1.0, alpha) * target;
        for (Eigen::Index i = 0; i < dim * dim; ++i) {
            jac(2 * i, m) = da.data()[i].real();
            jac(2 * i + 1, m) = da.data()[i].imag();
        }
        return jac;
    };

    UnitaryFit best;
    for (int start = 0; start < max_starts; ++start) {
        ParameterVector p(static_cast<std::size_t>(m));
        for (auto& x : p) {
            x = angle(rng);
        }
        double alpha = std::arg((target.adjoint() * ansatz_unitary(spec, p)).trace());
        Eigen::VectorXd r = residual(p, alpha);
        double cost = r.squaredNorm();
        double lambda = 1e-3;
        for (int it = 0; it < 400 && cost > 1e-28; ++it) {
            const Eigen::MatrixXd jac = jacobian(p, alpha);
            const Eigen::MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd jtr = jac.transpose() * r;
            bool improved = false;
            for (int tries = 0; tries < 20 && !improved; ++tries) {
                Eigen::MatrixXd a = jtj;
                a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
                const Eigen::VectorXd step = a.ldlt().solve(-jtr);
                ParameterVector trial = p;
                for (int k = 0; k < m; ++k) {
                    trial[static_cast<std::size_t>(k)] += step[k];
                }
                const double trial_alpha = alpha + step[m];
                const Eigen::VectorXd trial_r = residual(trial, trial_alpha);
                const double trial_cost = trial_r.squaredNorm();
                if (trial_cost < cost) {
                    p = std::move(trial);
                    alpha = trial_alpha;
                    r = trial_r;
                    improved = cost - trial_cost > 0.0;
                    cost = trial_cost;
                    lambda = std::max(lambda / 5.0, 1e-15);
                } else {
                    lambda *= 4.0;
                }
            }
            if (!improved) {
                break;
            }
        }
        const double res = phase_distance(ansatz_unitary(spec, p), target);
        if (res < best.residual) {
            best.params = p;
            best.residual = res;
        }
        best.starts_used = start + 1;
        if (best.residual < tolerance) {
            break;
        }
    }
    return best;
}

namespace detail {

/// Identity parameters of one su4 block, solved once per process.
inline const ParameterVector& su4_block_identity() {
    static const ParameterVector cached = [] {
        const AnsatzSpec block = build_template(AnsatzFamily::Su4Block, 2, 1);
        const UnitaryFit fit = fit_unitary(block, CMatrix::Identity(4, 4), 64, 20260101, 1e-13);
        if (fit.residual > 1e-10) {
            throw NumericalError("could not solve su4-block identity parameters (residual " +
                                 std::to_string(fit.residual) + ")");
        }
        return fit.params;
    }();
    return cached;
}

} // namespace detail

inline AnsatzSpec build_ansatz(AnsatzFamily family, int n_qubits, int layers = 1) {
    AnsatzSpec spec = detail::build_template(family, n_qubits, layers);
    switch (family) {
    case AnsatzFamily::ZxzCnot:
        spec.identity.assign(static_cast<std::size_t>(spec.parameter_count), 0.0);
        break;
    case AnsatzFamily::Su4Block:
    case AnsatzFamily::Su4Chain: {
        const auto& block = detail::su4_block_identity();
        spec.identity.clear();
        while (static_cast<int>(spec.identity.size()) < spec.parameter_count) {
            spec.identity.insert(spec.identity.end(), block.begin(), block.end());
        }
        break;
    }
    }
    return spec;
}

/// min over alpha of ||U - e^{i alpha} I||_F.
inline double identity_residual(const AnsatzSpec& spec, std::span<const double> params) {
    const CMatrix u = ansatz_unitary(spec, params);
    return phase_distance(u, CMatrix::Identity(u.rows(), u.cols()));
}

/// Parameters with U = I up to global phase, verified to residual 1e-8
/// when the register is small enough for a dense check.
inline ParameterVector identity_params(const AnsatzSpec& spec) {
    spec.check_params(spec.identity);
    if (spec.n_qubits <= 6) {
        const double res = identity_residual(spec, spec.identity);
        if (res >= 1e-8) {
            throw NumericalError("identity parameters miss tolerance (residual " + std::to_string(res) + ")");
        }
    }
    return spec.identity;
}

inline Circuit bind(const AnsatzSpec& spec, std::span<const double> params) {
    spec.check_params(params);
    Circuit c(spec.n_qubits);
    for (const auto& ag : spec.gates) {
        if (ag.param >= 0) {
            const auto& r = std::get<PauliRotation>(ag.gate);
            c.append(PauliRotation{r.axis, params[static_cast<std::size_t>(ag.param)]});
        } else {
            c.append(ag.gate);
        }
    }
    return c;
}

inline StateVector apply_ansatz(StateVector state, const AnsatzSpec& spec, std::span<const double> params) {
    spec.check_params(params);
    if (state.n_qubits() != spec.n_qubits) {
        throw Error("state and ansatz qubit counts differ");
    }
    detail::apply_template(spec, params, state.mutable_amplitudes());
    return state;
}

/// Generator of the `index`-th parameterized gate in template order.
inline PauliString parameter_generator(const AnsatzSpec& spec, int index = 0) {
    for (const auto& ag : spec.gates) {
        if (ag.param == index) {
            return std::get<PauliRotation>(ag.gate).axis;
        }
    }
    throw Error("ansatz has no parameterized gate with index " + std::to_string(index));
}

/// Generator of the first gate acting on the input; it must be parameterized.
inline PauliString first_generator(const AnsatzSpec& spec) {
    if (spec.gates.empty() || spec.gates.front().param < 0) {
        throw Error("ansatz does not start with a Pauli rotation");
    }
    return std::get<PauliRotation>(spec.gates.front().gate).axis;
}

/// An input state and the state its image should overlap with.
struct StatePair {
    StateVector input;
    StateVector target;
};

struct CostAndGradient {
    double cost = 0.0;
    std::vector<double> gradient;
};

/**
 * Mean infidelity 1 - (1/S) sum_s |<target_s| U(params) |input_s>|^2 and
 * its exact gradient by a reverse sweep over the circuit.
 */
inline CostAndGradient ansatz_gradient(std::span<const StatePair> pairs, const AnsatzSpec& spec,
                                       std::span<const double> params) {
    spec.check_params(params);
    if (pairs.empty()) {
        throw Error("gradient needs at least one state pair");
    }
    CostAndGradient out;
    out.gradient.assign(static_cast<std::size_t>(spec.parameter_count), 0.0);
    const double w = 1.0 / static_cast<double>(pairs.size());
    double fid_sum = 0.0;
    CVector tmp;
    for (const auto& pr : pairs) {
        if (pr.input.n_qubits() != spec.n_qubits || pr.target.n_qubits() != spec.n_qubits) {
            throw Error("state pair does not match the ansatz width");
        }
        CVector psi = pr.input.amplitudes();
        detail::apply_template(spec, params, psi);
        CVector lam = pr.target.amplitudes();
        const cplx overlap = lam.dot(psi);
        fid_sum += std::norm(overlap);
        for (auto it = spec.gates.rbegin(); it != spec.gates.rend(); ++it) {
            if (it->param >= 0) {
                const auto& r = std::get<PauliRotation>(it->gate);
                detail::apply_pauli(r.axis, psi, tmp);
                // d overlap = <lam| -i sigma |psi>
                const cplx d = cplx(0.0, -1.0) * lam.dot(tmp);
                out.gradient[static_cast<std::size_t>(it->param)] -= w * 2.0 * (std::conj(overlap) * d).real();
            }
            detail::apply_template_adjoint_gate(spec, *it, params, psi);
            detail::apply_template_adjoint_gate(spec, *it, params, lam);
        }
    }
    out.cost = 1.0 - w * fid_sum;
    return out;
}

} // namespace svqs

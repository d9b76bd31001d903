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
 * Ising chain with transverse and longitudinal fields, its product-formula
 * step circuits and exact propagators.
 *
 *   H = -J sum_{j<N} X_j X_{j+1} - g sum_j Z_j - h sum_j X_j
 *
 * with an open boundary.
 */
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svqs/quantum_core.hpp"

namespace svqs {

struct IsingParams {
    int n_qubits = 2;
    double J = 1.0;
    double g = 1.0;
    double h = 1.0;

    void validate() const {
        if (n_qubits < 1) {
            throw Error("Ising chain needs at least one spin");
        }
        if (!std::isfinite(J) || !std::isfinite(g) || !std::isfinite(h)) {
            throw Error("Ising couplings must be finite");
        }
    }
};

/// Sum of weighted Pauli strings on a common register.
class PauliSum {
  public:
    explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

    PauliSum& add(PauliString term) {
        if (term.n_qubits() != n_qubits_) {
            throw Error("Pauli term width does not match the sum");
        }
        terms_.push_back(std::move(term));
        return *this;
    }

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const std::vector<PauliString>& terms() const noexcept { return terms_; }

    [[nodiscard]] CMatrix matrix() const {
        if (n_qubits_ > kMaxDenseQubits) {
            throw Error("dense Hamiltonian requested for " + std::to_string(n_qubits_) + " qubits");
        }
        const auto dim = static_cast<Eigen::Index>(detail::dim_of(n_qubits_));
        CMatrix m = CMatrix::Zero(dim, dim);
        for (const auto& t : terms_) {
            const std::size_t flip = t.flip_mask();
            const std::size_t sign = t.sign_mask();
            const int ny = t.y_count();
            for (Eigen::Index y = 0; y < dim; ++y) {
                m(static_cast<Eigen::Index>(static_cast<std::size_t>(y) ^ flip), y) +=
                    t.coefficient() * detail::pauli_phase(static_cast<std::size_t>(y), sign, ny);
            }
        }
        return m;
    }

  private:
    int n_qubits_;
    std::vector<PauliString> terms_;
};

/// Terms in order: couplings -J X_j X_{j+1}, then -g Z_j, then -h X_j.
inline PauliSum build_ising(const IsingParams& p) {
    p.validate();
    PauliSum sum(p.n_qubits);
    for (int j = 0; j + 1 < p.n_qubits; ++j) {
        sum.add(PauliString::pair(p.n_qubits, j, 'X', j + 1, 'X', -p.J));
    }
    for (int j = 0; j < p.n_qubits; ++j) {
        sum.add(PauliString::single(p.n_qubits, j, 'Z', -p.g));
    }
    for (int j = 0; j < p.n_qubits; ++j) {
        sum.add(PauliString::single(p.n_qubits, j, 'X', -p.h));
    }
    return sum;
}

struct TrotterSpec {
    double dt = 0.1;
    int order = 2;
    Circuit circuit;
};

namespace detail {

/// exp(-i tau (-g Z - h X)) on one spin, exact.
inline FixedUnitary field_exponential(const IsingParams& p, int qubit, double tau) {
    const double w = std::hypot(p.g, p.h);
    CMatrix m = CMatrix::Identity(2, 2);
    if (w > 0.0) {
        const double c = std::cos(tau * w);
        const double s = std::sin(tau * w);
        // exp(i tau (g Z + h X)) = cos(tau w) + i sin(tau w) (g Z + h X) / w
        const cplx i(0.0, 1.0);
        m(0, 0) = c + i * s * p.g / w;
        m(1, 1) = c - i * s * p.g / w;
        m(0, 1) = i * s * p.h / w;
        m(1, 0) = i * s * p.h / w;
    }
    return gates::fixed(std::move(m), {qubit}, "field");
}

inline void append_field_layer(Circuit& c, const IsingParams& p, double tau) {
    for (int j = 0; j < p.n_qubits; ++j) {
        c.append(field_exponential(p, j, tau));
    }
}

inline void append_coupling_layer(Circuit& c, const IsingParams& p, double tau) {
    for (int j = 0; j + 1 < p.n_qubits; ++j) {
        c.append(gates::rotation(PauliString::pair(p.n_qubits, j, 'X', j + 1, 'X'), -p.J * tau));
    }
}

} // namespace detail

/**
 * One product-formula step of length dt.
 *
 * Field terms {Z_j, X_j} form layer A, couplings X_j X_{j+1} layer B; both
 * layers are exact exponentials (A as one single-qubit unitary per spin,
 * B as commuting XX rotations).
 *
 *   order 1: A(dt) then B(dt)                      N + (N-1) gates
 *   order 2: A(dt/2), B(dt), A(dt/2)               2N + (N-1) gates
 */
inline TrotterSpec trotter_step(const IsingParams& p, double dt, int order = 2) {
    p.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error("Trotter step needs dt > 0");
    }
    Circuit c(p.n_qubits);
    switch (order) {
    case 1:
        detail::append_field_layer(c, p, dt);
        detail::append_coupling_layer(c, p, dt);
        break;
    case 2:
        detail::append_field_layer(c, p, 0.5 * dt);
        detail::append_coupling_layer(c, p, dt);
        detail::append_field_layer(c, p, 0.5 * dt);
        break;
    default:
        throw Error("unsupported Trotter order " + std::to_string(order));
    }
    return {dt, order, std::move(c)};
}

/// Eigendecomposition of the dense Hamiltonian.
inline Eigen::SelfAdjointEigenSolver<CMatrix> ising_spectrum(const IsingParams& p) {
    p.validate();
    if (p.n_qubits > kMaxDenseQubits) {
        throw Error("exact diagonalization limited to " + std::to_string(kMaxDenseQubits) + " qubits");
    }
    return Eigen::SelfAdjointEigenSolver<CMatrix>(build_ising(p).matrix());
}

/// exp(-i H t) by Hermitian eigendecomposition.
inline CMatrix exact_propagator(const IsingParams& p, double t) {
    const auto es = ising_spectrum(p);
    const cplx mi(0.0, -1.0);
    const CVector phases = (mi * t * es.eigenvalues().cast<cplx>()).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// max |lambda| over the spectrum of H.
inline double max_abs_energy(const IsingParams& p) {
    return ising_spectrum(p).eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace svqs

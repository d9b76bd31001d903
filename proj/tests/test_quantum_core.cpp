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
#include <random>

#include "oracles.hpp"
#include "svqs/quantum_core.hpp"

using namespace svqs;

TEST(StateVector, BitstringOrderPutsQubitZeroFirst) {
    const auto s = StateVector::from_bitstring("10");
    EXPECT_EQ(s.n_qubits(), 2);
    EXPECT_EQ(s[2], cplx(1.0));
    EXPECT_THROW(StateVector::from_bitstring("1a"), Error);
    EXPECT_THROW(StateVector::from_bitstring(""), Error);
}

TEST(StateVector, RejectsUnnormalizedAmplitudes) {
    CVector v(2);
    v << 1.0, 1.0;
    EXPECT_THROW(StateVector::from_amplitudes(v), Error);
    EXPECT_NEAR(StateVector::normalized(v)[0].real(), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_THROW(StateVector::normalized(CVector::Zero(2)), Error);
}

TEST(PauliRotation, MatchesDenseExponential) {
    std::mt19937_64 rng(3);
    for (const std::string p : {"XI", "IZ", "YX", "ZZ", "XYZ", "YIY"}) {
        const double theta = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
        const int n = static_cast<int>(p.size());
        Circuit c(n);
        c.append(gates::rotation(PauliString(p), theta));
        EXPECT_LT((c.matrix() - oracle::rotation(p, theta)).norm(), 1e-12) << p;
    }
}

TEST(PauliString, DenseMatrixMatchesKronecker) {
    for (const std::string p : {"X", "Y", "ZX", "YYZ", "IXY"}) {
        EXPECT_LT((PauliString(p).matrix() - oracle::pauli_string(p)).norm(), 1e-15) << p;
    }
}

TEST(FixedGates, CnotAndHadamardOnThreeQubits) {
    Circuit c(3);
    c.append(gates::hadamard(1));
    c.append(gates::cnot(1, 2));
    c.append(gates::cnot(0, 1));
    oracle::Mat h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::numbers::sqrt2;
    // CNOT(c, t) = |0><0|_c + |1><1|_c X_t
    auto cnot = [](int ctl, int tgt) {
        oracle::Mat p0(2, 2), p1(2, 2);
        p0 << 1, 0, 0, 0;
        p1 << 0, 0, 0, 1;
        return oracle::Mat(oracle::embed(p0, ctl, 3) +
                           oracle::embed(p1, ctl, 3) * oracle::embed(oracle::pauli('X'), tgt, 3));
    };
    const oracle::Mat expect = cnot(0, 1) * cnot(1, 2) * oracle::embed(h, 1, 3);
    EXPECT_LT((c.matrix() - expect).norm(), 1e-12);
}

TEST(Circuit, InverseUndoes) {
    Circuit c(3);
    c.append(gates::rx(3, 0, 0.3)).append(gates::cnot(0, 2)).append(gates::ry(3, 2, -1.1)).append(gates::hadamard(1));
    Circuit both = c;
    both.append(c.inverse());
    EXPECT_LT((both.matrix() - CMatrix::Identity(8, 8)).norm(), 1e-12);
}

TEST(Fidelity, ShotEstimateIsExactAtZeroShotsAndUnbiased) {
    Circuit a(1);
    a.append(gates::ry(1, 0, 0.4));
    Circuit b(1);
    const double exact = fidelity_shot_estimate(a, b, 0, 0);
    EXPECT_NEAR(exact, std::pow(std::cos(0.4), 2), 1e-14);
    double mean = 0.0;
    for (int k = 0; k < 200; ++k) {
        mean += fidelity_shot_estimate(a, b, 1000, static_cast<std::uint64_t>(k));
    }
    mean /= 200.0;
    // standard error ~ sqrt(p(1-p)/2e5) ~ 8e-4
    EXPECT_NEAR(mean, exact, 4e-3);
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
    CVector v = CVector::Zero(4);
    v[0] = v[3] = 1.0 / std::numbers::sqrt2;
    const auto bell = StateVector::from_amplitudes(v);
    const auto rho = partial_trace(bell, {0});
    EXPECT_LT((rho.matrix() - 0.5 * CMatrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_NEAR(purity(rho), 0.5, 1e-15);
}

TEST(PartialTrace, ProductStateKeepsFactor) {
    Circuit c(3);
    c.append(gates::ry(3, 0, 0.7)).append(gates::rx(3, 1, 0.2)).append(gates::ry(3, 2, 1.3));
    const auto s = c.apply(StateVector(3));
    const auto rho = partial_trace(s, {1});
    const CVector q1 = oracle::rotation("X", 0.2).col(0);
    EXPECT_LT((rho.matrix() - q1 * q1.adjoint()).norm(), 1e-13);
    EXPECT_THROW(partial_trace(s, {}), Error);
}

TEST(HaarState, IsNormalizedAndSeedDeterministic) {
    std::mt19937_64 r1(9), r2(9);
    const auto a = haar_state(4, r1);
    const auto b = haar_state(4, r2);
    EXPECT_NEAR(a.amplitudes().norm(), 1.0, 1e-14);
    EXPECT_EQ(a.amplitudes(), b.amplitudes());
}

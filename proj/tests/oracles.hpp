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

// Reference computations written independently of the library: Kronecker
// products, dense matrix exponentials and plain quadrature.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <functional>
#include <string>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli(char c) {
    Mat m(2, 2);
    switch (c) {
    case 'X':
        m << 0, 1, 1, 0;
        break;
    case 'Y':
        m << 0, cplx(0, -1), cplx(0, 1), 0;
        break;
    case 'Z':
        m << 1, 0, 0, -1;
        break;
    default:
        m = Mat::Identity(2, 2);
    }
    return m;
}

/// Leftmost letter is the most significant factor.
inline Mat pauli_string(const std::string& s) {
    Mat m = Mat::Identity(1, 1);
    for (char c : s) {
        m = Eigen::kroneckerProduct(m, pauli(c)).eval();
    }
    return m;
}

/// Single-qubit operator on `q` of an n-qubit register, qubit 0 most significant.
inline Mat embed(const Mat& op, int q, int n) {
    Mat m = Mat::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
        m = Eigen::kroneckerProduct(m, k == q ? op : Mat::Identity(2, 2)).eval();
    }
    return m;
}

inline Mat expm(const Mat& a) { return a.exp(); }

/// exp(-i theta P).
inline Mat rotation(const std::string& p, double theta) { return expm(cplx(0, -theta) * pauli_string(p)); }

/// -J sum XX - g sum Z - h sum X, open chain.
inline Mat ising(int n, double J, double g, double h) {
    const auto dim = Eigen::Index{1} << n;
    Mat H = Mat::Zero(dim, dim);
    for (int q = 0; q + 1 < n; ++q) {
        H -= J * embed(pauli('X'), q, n) * embed(pauli('X'), q + 1, n);
    }
    for (int q = 0; q < n; ++q) {
        H -= g * embed(pauli('Z'), q, n) + h * embed(pauli('X'), q, n);
    }
    return H;
}

/// Composite Simpson rule with `n` (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) {
        s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    }
    return s * h / 3.0;
}

} // namespace oracle

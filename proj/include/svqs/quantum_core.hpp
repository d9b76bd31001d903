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
 * Dense statevector primitives: states, Pauli strings, gates, circuits,
 * overlaps and reduced density matrices.
 *
 * Qubit ordering: qubit 0 is the most significant bit of the amplitude
 * index. For n qubits, qubit q lives at bit position (n - 1 - q).
 *
 * Rotation convention: a Pauli rotation with axis P and angle t is
 * exp(-i t P), without the customary half angle.
 */
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace svqs {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical routine cannot meet its contract.
class NumericalError : public Error {
  public:
    using Error::Error;
};

inline constexpr int kMaxDenseQubits = 12;

namespace detail {

inline std::size_t dim_of(int n_qubits) { return std::size_t{1} << n_qubits; }

inline std::size_t bit_of(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

inline int qubits_for_dim(std::size_t dim) {
    if (dim == 0 || !std::has_single_bit(dim)) {
        throw Error("amplitude count " + std::to_string(dim) + " is not a power of two");
    }
    return std::countr_zero(dim);
}

} // namespace detail

/**
 * Normalized pure state of n qubits.
 */
class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(int n_qubits) : StateVector(n_qubits, 0) {}

    /// Computational basis state |index>.
    StateVector(int n_qubits, std::size_t index) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > 30) {
            throw Error("qubit count out of range: " + std::to_string(n_qubits));
        }
        amps_ = CVector::Zero(static_cast<Eigen::Index>(detail::dim_of(n_qubits)));
        if (index >= detail::dim_of(n_qubits)) {
            throw Error("basis index out of range");
        }
        amps_[static_cast<Eigen::Index>(index)] = 1.0;
    }

    /// Takes amplitudes as given; they must already be normalized within 1e-10.
    static StateVector from_amplitudes(CVector amps) {
        StateVector s(detail::qubits_for_dim(static_cast<std::size_t>(amps.size())));
        const double norm2 = amps.squaredNorm();
        if (std::abs(norm2 - 1.0) > 1e-10) {
            throw Error("state is not normalized (norm^2 = " + std::to_string(norm2) + ")");
        }
        s.amps_ = std::move(amps);
        return s;
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    static StateVector normalized(CVector amps) {
        const double norm = amps.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw Error("cannot normalize a zero or non-finite vector");
        }
        amps /= norm;
        return from_amplitudes(std::move(amps));
    }

    /// Basis state from a bitstring such as "0110"; character k is qubit k.
    static StateVector from_bitstring(std::string_view bits) {
        if (bits.empty()) {
            throw Error("empty bitstring");
        }
        std::size_t index = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') {
                throw Error("invalid bitstring '" + std::string(bits) + "'");
            }
            index = (index << 1) | static_cast<std::size_t>(c == '1');
        }
        return StateVector(static_cast<int>(bits.size()), index);
    }

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
    [[nodiscard]] const CVector& amplitudes() const noexcept { return amps_; }
    [[nodiscard]] cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

    /// Mutable access for in-place kernels; callers keep the state unitary.
    CVector& mutable_amplitudes() noexcept { return amps_; }

  private:
    int n_qubits_;
    CVector amps_;
};

/**
 * Tensor product of single-qubit Paulis with a real coefficient. The
 * coefficient is used by Pauli sums; rotations only read the letters.
 */
class PauliString {
  public:
    PauliString() = default;

    PauliString(std::string letters, double coefficient = 1.0)
        : letters_(std::move(letters)), coefficient_(coefficient) {
        if (letters_.empty()) {
            throw Error("Pauli string needs at least one letter");
        }
        for (char c : letters_) {
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
                throw Error("invalid Pauli letter '" + std::string(1, c) + "'");
            }
        }
        const int n = n_qubits();
        for (int q = 0; q < n; ++q) {
            const char c = letters_[static_cast<std::size_t>(q)];
            const std::size_t bit = detail::bit_of(n, q);
            if (c == 'X' || c == 'Y') {
                flip_ |= bit;
            }
            if (c == 'Z' || c == 'Y') {
                sign_ |= bit;
            }
            ny_ += c == 'Y';
        }
    }

    /// A single letter on `qubit`, identity elsewhere.
    static PauliString single(int n_qubits, int qubit, char letter, double coefficient = 1.0) {
        check_qubit(n_qubits, qubit);
        std::string s(static_cast<std::size_t>(n_qubits), 'I');
        s[static_cast<std::size_t>(qubit)] = letter;
        return {std::move(s), coefficient};
    }

    static PauliString pair(int n_qubits, int q0, char l0, int q1, char l1, double coefficient = 1.0) {
        check_qubit(n_qubits, q0);
        check_qubit(n_qubits, q1);
        if (q0 == q1) {
            throw Error("Pauli pair needs distinct qubits");
        }
        std::string s(static_cast<std::size_t>(n_qubits), 'I');
        s[static_cast<std::size_t>(q0)] = l0;
        s[static_cast<std::size_t>(q1)] = l1;
        return {std::move(s), coefficient};
    }

    [[nodiscard]] int n_qubits() const noexcept { return static_cast<int>(letters_.size()); }
    [[nodiscard]] const std::string& letters() const noexcept { return letters_; }
    [[nodiscard]] double coefficient() const noexcept { return coefficient_; }
    [[nodiscard]] char letter(int qubit) const { return letters_.at(static_cast<std::size_t>(qubit)); }

    /// Bits flipped by the string (X or Y positions).
    [[nodiscard]] std::size_t flip_mask() const noexcept { return flip_; }
    /// Bits contributing a (-1)^bit sign (Z or Y positions).
    [[nodiscard]] std::size_t sign_mask() const noexcept { return sign_; }
    [[nodiscard]] int y_count() const noexcept { return ny_; }

    /// True when the string has no non-identity letter.
    [[nodiscard]] bool is_identity() const noexcept {
        return std::all_of(letters_.begin(), letters_.end(), [](char c) { return c == 'I'; });
    }

    /// Dense 2^n x 2^n matrix, coefficient excluded.
    [[nodiscard]] CMatrix matrix() const;

    friend bool operator==(const PauliString&, const PauliString&) = default;

  private:
    static void check_qubit(int n_qubits, int qubit) {
        if (qubit < 0 || qubit >= n_qubits) {
            throw Error("qubit index " + std::to_string(qubit) + " out of range for " +
                        std::to_string(n_qubits) + " qubits");
        }
    }

    std::string letters_;
    double coefficient_ = 1.0;
    std::size_t flip_ = 0;
    std::size_t sign_ = 0;
    int ny_ = 0;
};

namespace detail {

/// Phase picked up by basis state |y> under the Pauli string: P|y> = phase(y)|y ^ flip>.
inline cplx pauli_phase(std::size_t y, std::size_t sign_mask, int y_count) {
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    cplx p = kIPow[y_count & 3];
    if (std::popcount(y & sign_mask) & 1) {
        p = -p;
    }
    return p;
}

/// out = P in (coefficient ignored).
inline void apply_pauli(const PauliString& p, const CVector& in, CVector& out) {
    const std::size_t flip = p.flip_mask();
    const std::size_t sign = p.sign_mask();
    const int ny = p.y_count();
    const auto dim = static_cast<std::size_t>(in.size());
    out.resize(in.size());
    for (std::size_t y = 0; y < dim; ++y) {
        out[static_cast<Eigen::Index>(y ^ flip)] = pauli_phase(y, sign, ny) * in[static_cast<Eigen::Index>(y)];
    }
}

/// amps <- (cos t - i sin t P) amps, in place.
inline void apply_pauli_rotation(const PauliString& p, double angle, CVector& amps) {
    const std::size_t flip = p.flip_mask();
    const std::size_t sign = p.sign_mask();
    const int ny = p.y_count();
    const double c = std::cos(angle);
    const cplx mis(0.0, -std::sin(angle));
    const auto dim = static_cast<std::size_t>(amps.size());
    if (flip == 0) {
        for (std::size_t x = 0; x < dim; ++x) {
            const auto i = static_cast<Eigen::Index>(x);
            amps[i] = (c + mis * pauli_phase(x, sign, ny)) * amps[i];
        }
        return;
    }
    for (std::size_t x = 0; x < dim; ++x) {
        const std::size_t y = x ^ flip;
        if (y < x) {
            continue;
        }
        const auto ix = static_cast<Eigen::Index>(x);
        const auto iy = static_cast<Eigen::Index>(y);
        const cplx ax = amps[ix];
        const cplx ay = amps[iy];
        // (P a)[x] = phase(y) a[y], (P a)[y] = phase(x) a[x]
        amps[ix] = c * ax + mis * pauli_phase(y, sign, ny) * ay;
        amps[iy] = c * ay + mis * pauli_phase(x, sign, ny) * ax;
    }
}

} // namespace detail

inline CMatrix PauliString::matrix() const {
    const auto dim = static_cast<Eigen::Index>(detail::dim_of(n_qubits()));
    CMatrix m = CMatrix::Zero(dim, dim);
    const std::size_t flip = flip_mask();
    const std::size_t sign = sign_mask();
    const int ny = y_count();
    for (Eigen::Index y = 0; y < dim; ++y) {
        m(static_cast<Eigen::Index>(static_cast<std::size_t>(y) ^ flip), y) =
            detail::pauli_phase(static_cast<std::size_t>(y), sign, ny);
    }
    return m;
}

/// exp(-i angle axis).
struct PauliRotation {
    PauliString axis;
    double angle = 0.0;
};

/// A fixed k-qubit unitary; targets[0] is the most significant bit of the
/// matrix index.
struct FixedUnitary {
    CMatrix matrix;
    std::vector<int> targets;
    std::string name;
};

using Gate = std::variant<PauliRotation, FixedUnitary>;

namespace gates {

inline PauliRotation rotation(const PauliString& axis, double angle) { return {axis, angle}; }

inline PauliRotation rx(int n_qubits, int q, double angle) {
    return {PauliString::single(n_qubits, q, 'X'), angle};
}
inline PauliRotation ry(int n_qubits, int q, double angle) {
    return {PauliString::single(n_qubits, q, 'Y'), angle};
}
inline PauliRotation rz(int n_qubits, int q, double angle) {
    return {PauliString::single(n_qubits, q, 'Z'), angle};
}

/// Builds a fixed gate after checking U^dagger U = I within 1e-12.
inline FixedUnitary fixed(CMatrix matrix, std::vector<int> targets, std::string name = "U") {
    const auto k = static_cast<int>(targets.size());
    if (k == 0) {
        throw Error("fixed gate needs at least one target");
    }
    const auto dim = static_cast<Eigen::Index>(detail::dim_of(k));
    if (matrix.rows() != dim || matrix.cols() != dim) {
        throw Error("fixed gate matrix does not match its target count");
    }
    const double dev = (matrix.adjoint() * matrix - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (dev > 1e-12) {
        throw Error("fixed gate '" + name + "' is not unitary (deviation " + std::to_string(dev) + ")");
    }
    std::vector<int> sorted = targets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error("fixed gate targets must be distinct");
    }
    return {std::move(matrix), std::move(targets), std::move(name)};
}

inline FixedUnitary hadamard(int q) {
    const double s = 1.0 / std::numbers::sqrt2;
    CMatrix m(2, 2);
    m << s, s, s, -s;
    return fixed(std::move(m), {q}, "H");
}

inline FixedUnitary pauli_x(int q) {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return fixed(std::move(m), {q}, "X");
}

inline FixedUnitary cnot(int control, int target) {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 3) = m(3, 2) = 1.0;
    return fixed(std::move(m), {control, target}, "CNOT");
}

} // namespace gates

namespace detail {

inline void check_gate_qubits(const Gate& gate, int n_qubits) {
    if (const auto* r = std::get_if<PauliRotation>(&gate)) {
        if (r->axis.n_qubits() != n_qubits) {
            throw Error("rotation axis acts on " + std::to_string(r->axis.n_qubits()) +
                        " qubits, state has " + std::to_string(n_qubits));
        }
        return;
    }
    const auto& u = std::get<FixedUnitary>(gate);
    for (int t : u.targets) {
        if (t < 0 || t >= n_qubits) {
            throw Error("gate target " + std::to_string(t) + " out of range for " +
                        std::to_string(n_qubits) + " qubits");
        }
    }
}

inline void apply_fixed_1q(const CMatrix& m, std::size_t bit, CVector& amps) {
    const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    const auto dim = static_cast<std::size_t>(amps.size());
    for (std::size_t x = 0; x < dim; ++x) {
        if (x & bit) {
            continue;
        }
        const auto i0 = static_cast<Eigen::Index>(x);
        const auto i1 = static_cast<Eigen::Index>(x | bit);
        const cplx a0 = amps[i0];
        const cplx a1 = amps[i1];
        amps[i0] = m00 * a0 + m01 * a1;
        amps[i1] = m10 * a0 + m11 * a1;
    }
}

inline void apply_fixed_2q(const CMatrix& m, std::size_t hi, std::size_t lo, CVector& amps) {
    const auto dim = static_cast<std::size_t>(amps.size());
    const std::size_t off[4] = {0, lo, hi, hi | lo};
    for (std::size_t x = 0; x < dim; ++x) {
        if (x & (hi | lo)) {
            continue;
        }
        cplx a[4];
        for (int l = 0; l < 4; ++l) {
            a[l] = amps[static_cast<Eigen::Index>(x | off[l])];
        }
        for (int r = 0; r < 4; ++r) {
            amps[static_cast<Eigen::Index>(x | off[r])] = m(r, 0) * a[0] + m(r, 1) * a[1] + m(r, 2) * a[2] + m(r, 3) * a[3];
        }
    }
}

inline void apply_fixed(const FixedUnitary& u, int n_qubits, CVector& amps) {
    const auto k = u.targets.size();
    if (k == 1) {
        apply_fixed_1q(u.matrix, bit_of(n_qubits, u.targets[0]), amps);
        return;
    }
    if (k == 2) {
        apply_fixed_2q(u.matrix, bit_of(n_qubits, u.targets[0]), bit_of(n_qubits, u.targets[1]), amps);
        return;
    }
    const std::size_t local_dim = std::size_t{1} << k;
    std::vector<std::size_t> offsets(local_dim, 0);
    std::size_t target_mask = 0;
    for (std::size_t l = 0; l < local_dim; ++l) {
        for (std::size_t t = 0; t < k; ++t) {
            if (l & (std::size_t{1} << (k - 1 - t))) {
                offsets[l] |= bit_of(n_qubits, u.targets[t]);
            }
        }
    }
    for (int t : u.targets) {
        target_mask |= bit_of(n_qubits, t);
    }
    CVector local(static_cast<Eigen::Index>(local_dim));
    const auto dim = static_cast<std::size_t>(amps.size());
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & target_mask) {
            continue;
        }
        for (std::size_t l = 0; l < local_dim; ++l) {
            local[static_cast<Eigen::Index>(l)] = amps[static_cast<Eigen::Index>(base | offsets[l])];
        }
        const CVector out = u.matrix * local;
        for (std::size_t l = 0; l < local_dim; ++l) {
            amps[static_cast<Eigen::Index>(base | offsets[l])] = out[static_cast<Eigen::Index>(l)];
        }
    }
}

/// In-place gate application on a raw amplitude vector.
inline void apply_gate_inplace(const Gate& gate, int n_qubits, CVector& amps) {
    if (const auto* r = std::get_if<PauliRotation>(&gate)) {
        apply_pauli_rotation(r->axis, r->angle, amps);
    } else {
        apply_fixed(std::get<FixedUnitary>(gate), n_qubits, amps);
    }
}

} // namespace detail

/// Hermitian conjugate of a gate.
inline Gate adjoint(const Gate& gate) {
    if (const auto* r = std::get_if<PauliRotation>(&gate)) {
        return PauliRotation{r->axis, -r->angle};
    }
    const auto& u = std::get<FixedUnitary>(gate);
    return FixedUnitary{u.matrix.adjoint(), u.targets, u.name + "^dag"};
}

inline StateVector apply_gate(StateVector state, const Gate& gate) {
    detail::check_gate_qubits(gate, state.n_qubits());
    detail::apply_gate_inplace(gate, state.n_qubits(), state.mutable_amplitudes());
    return state;
}

/**
 * Ordered gate list; gates are applied front to back.
 */
class Circuit {
  public:
    explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1) {
            throw Error("circuit needs at least one qubit");
        }
    }

    Circuit& append(Gate gate) {
        detail::check_gate_qubits(gate, n_qubits_);
        gates_.push_back(std::move(gate));
        return *this;
    }

    Circuit& append(const Circuit& other) {
        if (other.n_qubits_ != n_qubits_) {
            throw Error("cannot concatenate circuits of different widths");
        }
        gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
        return *this;
    }

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::span<const Gate> gates() const noexcept { return gates_; }
    [[nodiscard]] std::size_t size() const noexcept { return gates_.size(); }

    /// Reverse order, each gate conjugated.
    [[nodiscard]] Circuit inverse() const {
        Circuit inv(n_qubits_);
        for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
            inv.gates_.push_back(adjoint(*it));
        }
        return inv;
    }

    void apply_inplace(CVector& amps) const {
        for (const auto& g : gates_) {
            detail::apply_gate_inplace(g, n_qubits_, amps);
        }
    }

    [[nodiscard]] StateVector apply(StateVector state) const {
        if (state.n_qubits() != n_qubits_) {
            throw Error("circuit/state qubit count mismatch");
        }
        apply_inplace(state.mutable_amplitudes());
        return state;
    }

    /// Dense unitary, column j = circuit applied to |j>.
    [[nodiscard]] CMatrix matrix() const {
        if (n_qubits_ > kMaxDenseQubits) {
            throw Error("dense circuit matrix requested for too many qubits");
        }
        const auto dim = static_cast<Eigen::Index>(detail::dim_of(n_qubits_));
        CMatrix m = CMatrix::Identity(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            CVector col = m.col(j);
            apply_inplace(col);
            m.col(j) = col;
        }
        return m;
    }

  private:
    int n_qubits_;
    std::vector<Gate> gates_;
};

inline cplx inner_product(const StateVector& a, const StateVector& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw Error("inner product of states with different qubit counts");
    }
    return a.amplitudes().dot(b.amplitudes());
}

namespace detail {

/// Clamps rounding excursions just outside [0, 1]; larger ones are errors.
inline double clamp_fidelity(double f) {
    if (f < -1e-12 || f > 1.0 + 1e-12 || !std::isfinite(f)) {
        throw NumericalError("fidelity " + std::to_string(f) + " outside [0, 1]");
    }
    return std::clamp(f, 0.0, 1.0);
}

} // namespace detail

/// |<a|b>|^2.
inline double fidelity_pure(const StateVector& a, const StateVector& b) {
    return detail::clamp_fidelity(std::norm(inner_product(a, b)));
}

/**
 * Compute-uncompute fidelity estimate: probability of reading all zeros
 * after b_prep^dagger a_prep |0...0>. shots = 0 returns the exact value,
 * otherwise the binomial sample mean over `shots` repetitions.
 */
inline double fidelity_shot_estimate(const Circuit& a_prep, const Circuit& b_prep, std::int64_t shots,
                                     std::uint64_t rng_seed) {
    if (shots < 0) {
        throw Error("shot count must be non-negative");
    }
    if (a_prep.n_qubits() != b_prep.n_qubits()) {
        throw Error("preparation circuits act on different qubit counts");
    }
    CVector amps = StateVector(a_prep.n_qubits()).amplitudes();
    a_prep.apply_inplace(amps);
    b_prep.inverse().apply_inplace(amps);
    const double p = detail::clamp_fidelity(std::norm(amps[0]));
    if (shots == 0) {
        return p;
    }
    std::mt19937_64 rng(rng_seed);
    std::binomial_distribution<std::int64_t> dist(shots, p);
    return static_cast<double>(dist(rng)) / static_cast<double>(shots);
}

/**
 * Density matrix of n qubits. Construction validates Hermiticity (1e-12),
 * unit trace (1e-10) and positivity (eigenvalues >= -1e-10).
 */
class DensityMatrix {
  public:
    explicit DensityMatrix(CMatrix matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols()) {
            throw Error("density matrix must be square");
        }
        n_qubits_ = detail::qubits_for_dim(static_cast<std::size_t>(matrix_.rows()));
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
            throw Error("density matrix is not Hermitian");
        }
        if (std::abs(matrix_.trace() - cplx(1.0)) > 1e-10) {
            throw Error("density matrix trace is not 1");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw Error("density matrix has a negative eigenvalue");
        }
    }

    static DensityMatrix from_state(const StateVector& s) {
        return DensityMatrix(s.amplitudes() * s.amplitudes().adjoint());
    }

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const CMatrix& matrix() const noexcept { return matrix_; }

  private:
    int n_qubits_ = 0;
    CMatrix matrix_;
};

namespace detail {

inline std::vector<int> validated_keep(const std::set<int>& keep, int n_qubits) {
    if (keep.empty()) {
        throw Error("partial trace needs a nonempty set of kept qubits");
    }
    for (int q : keep) {
        if (q < 0 || q >= n_qubits) {
            throw Error("kept qubit " + std::to_string(q) + " out of range");
        }
    }
    return {keep.begin(), keep.end()};
}

/// Splits a full index into (kept index, traced index) following ascending qubit order.
struct IndexSplit {
    std::vector<int> kept;
    std::vector<int> traced;
    int n_qubits;

    [[nodiscard]] std::pair<std::size_t, std::size_t> split(std::size_t x) const {
        std::size_t k = 0;
        std::size_t t = 0;
        for (int q : kept) {
            k = (k << 1) | static_cast<std::size_t>((x & bit_of(n_qubits, q)) != 0);
        }
        for (int q : traced) {
            t = (t << 1) | static_cast<std::size_t>((x & bit_of(n_qubits, q)) != 0);
        }
        return {k, t};
    }
};

inline IndexSplit make_split(const std::vector<int>& kept, int n_qubits) {
    IndexSplit s{kept, {}, n_qubits};
    for (int q = 0; q < n_qubits; ++q) {
        if (std::find(kept.begin(), kept.end(), q) == kept.end()) {
            s.traced.push_back(q);
        }
    }
    return s;
}

} // namespace detail

/// Reduced state on `keep` (kept qubits ordered ascending, lowest first = MSB).
inline DensityMatrix partial_trace(const StateVector& state, const std::set<int>& keep) {
    const auto kept = detail::validated_keep(keep, state.n_qubits());
    const auto split = detail::make_split(kept, state.n_qubits());
    const auto kdim = static_cast<Eigen::Index>(detail::dim_of(static_cast<int>(kept.size())));
    const auto tdim = static_cast<Eigen::Index>(std::size_t{1} << split.traced.size());
    // psi reshaped as a (kept x traced) matrix; rho = M M^dagger
    CMatrix m = CMatrix::Zero(kdim, tdim);
    for (std::size_t x = 0; x < state.dim(); ++x) {
        const auto [k, t] = split.split(x);
        m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) = state[x];
    }
    CMatrix rho = m * m.adjoint();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    return DensityMatrix(std::move(rho));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& keep) {
    const auto kept = detail::validated_keep(keep, rho.n_qubits());
    const auto split = detail::make_split(kept, rho.n_qubits());
    const auto kdim = static_cast<Eigen::Index>(detail::dim_of(static_cast<int>(kept.size())));
    const auto dim = detail::dim_of(rho.n_qubits());
    CMatrix out = CMatrix::Zero(kdim, kdim);
    for (std::size_t x = 0; x < dim; ++x) {
        const auto [kx, tx] = split.split(x);
        for (std::size_t y = 0; y < dim; ++y) {
            const auto [ky, ty] = split.split(y);
            if (tx == ty) {
                out(static_cast<Eigen::Index>(kx), static_cast<Eigen::Index>(ky)) +=
                    rho.matrix()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
            }
        }
    }
    out = (0.5 * (out + out.adjoint())).eval();
    return DensityMatrix(std::move(out));
}

/// Tr[rho^2].
inline double purity(const DensityMatrix& rho) { return rho.matrix().squaredNorm(); }

/// Tr[rho^2] for a raw matrix; rejects non-Hermitian input.
inline double purity(const CMatrix& rho) {
    if (rho.rows() != rho.cols() || (rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw Error("purity requires a Hermitian matrix");
    }
    return (rho * rho).trace().real();
}

/// Haar-random pure state.
template <class Rng>
StateVector haar_state(int n_qubits, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    CVector v(static_cast<Eigen::Index>(detail::dim_of(n_qubits)));
    for (auto& a : v) {
        a = cplx(n01(rng), n01(rng));
    }
    return StateVector::normalized(std::move(v));
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fix.
template <class Rng>
CMatrix haar_unitary(Eigen::Index dim, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    CMatrix g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            g(i, j) = cplx(n01(rng), n01(rng));
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const cplx d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

} // namespace svqs

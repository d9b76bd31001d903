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
 * Fidelity lower bounds for states inside a trained subspace.
 *
 * Two layers: the accumulated-angle bound for one state over many steps, and
 * the semidefinite relaxation that turns per-state fidelity constraints into
 * a worst-case bound for an arbitrary superposition.
 *
 * In the relaxation the unknowns are the overlaps f_ij = <Phi_i|Psi_j>
 * between target states Phi_i and approximations Psi_j, stored at index
 * i*d + j. A superposition with coefficients c has fidelity
 * |sum_ij c_i^* c_j f_ij|^2 = f^dagger C f.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "svqs/quantum_core.hpp"

namespace svqs {

/// Raised when a strictly feasible point is requested for constraints that admit none.
class NotStrictlyFeasibleError : public Error {
  public:
    using Error::Error;
};

/**
 * cos^2(min(sum_j arccos sqrt(f_j), pi/2)): the fidelity floor after chaining
 * per-step fidelities f_1..f_m through the angle triangle inequality.
 */
inline double prop1_lower_bound(std::span<const double> f_history) {
    double angle = 0.0;
    for (double f : f_history) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw Error("per-step fidelity outside [0, 1]: " + std::to_string(f));
        }
        angle += std::acos(std::sqrt(f));
    }
    if (angle >= std::numbers::pi / 2.0) {
        return 0.0;
    }
    const double c = std::cos(angle);
    return c * c;
}

struct ExtraConstraint {
    /// State a_0 |0> + a_1 |alpha> in the basis-index pair (0, alpha).
    cplx a0;
    cplx a1;
    int alpha = 1;
    double value = 0.0;
};

struct FidelityConstraints {
    int d = 1;
    std::vector<double> F_basis;
    /// F_plus[b - 1] constrains (|0> + |b>)/sqrt(2).
    std::vector<double> F_plus;
    std::vector<ExtraConstraint> extras;

    void validate() const {
        if (d < 1) {
            throw Error("subspace dimension must be at least 1");
        }
        if (static_cast<int>(F_basis.size()) != d || static_cast<int>(F_plus.size()) != d - 1) {
            throw Error("constraint vectors need d basis and d-1 plus values");
        }
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        for (double v : F_basis) {
            if (!in_unit(v)) {
                throw Error("basis fidelity outside [0, 1]");
            }
        }
        for (double v : F_plus) {
            if (!in_unit(v)) {
                throw Error("plus-state fidelity outside [0, 1]");
            }
        }
        for (const auto& e : extras) {
            if (!in_unit(e.value)) {
                throw Error("extra-constraint fidelity outside [0, 1]");
            }
            if (std::abs(std::norm(e.a0) + std::norm(e.a1) - 1.0) > 1e-10) {
                throw Error("extra-constraint coefficients are not normalized");
            }
            if (e.alpha < 1 || e.alpha >= d) {
                throw Error("extra-constraint index out of range");
            }
        }
    }

    /// Every basis, plus and extra value equal to `f`.
    static FidelityConstraints uniform(int d, double f) {
        FidelityConstraints c;
        c.d = d;
        c.F_basis.assign(static_cast<std::size_t>(d), f);
        c.F_plus.assign(static_cast<std::size_t>(std::max(d - 1, 0)), f);
        return c;
    }

    [[nodiscard]] double max_value() const {
        double m = 0.0;
        for (double v : F_basis) {
            m = std::max(m, v);
        }
        for (double v : F_plus) {
            m = std::max(m, v);
        }
        for (const auto& e : extras) {
            m = std::max(m, e.value);
        }
        return m;
    }

    [[nodiscard]] bool all_one() const {
        auto one = [](double v) { return v >= 1.0 - 1e-12; };
        return std::all_of(F_basis.begin(), F_basis.end(), one) && std::all_of(F_plus.begin(), F_plus.end(), one) &&
               std::all_of(extras.begin(), extras.end(), [&](const ExtraConstraint& e) { return one(e.value); });
    }
};

namespace detail {

inline Eigen::Index pair_index(int i, int j, int d) { return static_cast<Eigen::Index>(i) * d + j; }

/// w w^dagger for the linear functional f -> sum w_k^* f_k.
inline CMatrix rank_one(const CVector& w) { return w * w.adjoint(); }

inline void check_unit(const CVector& c) {
    if (std::abs(c.norm() - 1.0) > 1e-10) {
        throw Error("coefficient vector is not normalized (norm " + std::to_string(c.norm()) + ")");
    }
}

} // namespace detail

/// d^2 x d^2 rank-one matrix with f^dagger C f = |sum_ij c_i^* c_j f_ij|^2.
inline CMatrix objective_matrix(const CVector& c) {
    detail::check_unit(c);
    const int d = static_cast<int>(c.size());
    CVector v(static_cast<Eigen::Index>(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            v[detail::pair_index(i, j, d)] = c[i] * std::conj(c[j]);
        }
    }
    return detail::rank_one(v);
}

struct ConstraintMatrices {
    std::vector<CMatrix> basis; ///< basis[a]: |f_aa|^2
    std::vector<CMatrix> plus;  ///< plus[b - 1]: (1/4)|f_00 + f_0b + f_b0 + f_bb|^2
    std::vector<CMatrix> norm;  ///< norm[g]: sum_i |f_ig|^2
};

inline ConstraintMatrices constraint_matrices(int d) {
    if (d < 1) {
        throw Error("subspace dimension must be at least 1");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    ConstraintMatrices out;
    for (int a = 0; a < d; ++a) {
        CMatrix m = CMatrix::Zero(n, n);
        m(detail::pair_index(a, a, d), detail::pair_index(a, a, d)) = 1.0;
        out.basis.push_back(std::move(m));
    }
    for (int b = 1; b < d; ++b) {
        CMatrix m = CMatrix::Zero(n, n);
        const Eigen::Index idx[4] = {detail::pair_index(0, 0, d), detail::pair_index(0, b, d),
                                     detail::pair_index(b, 0, d), detail::pair_index(b, b, d)};
        for (auto r : idx) {
            for (auto s : idx) {
                m(r, s) = 0.25;
            }
        }
        out.plus.push_back(std::move(m));
    }
    for (int g = 0; g < d; ++g) {
        CMatrix m = CMatrix::Zero(n, n);
        for (int i = 0; i < d; ++i) {
            m(detail::pair_index(i, g, d), detail::pair_index(i, g, d)) = 1.0;
        }
        out.norm.push_back(std::move(m));
    }
    return out;
}

/// Fidelity of a_0|0> + a_1|alpha> as a quadratic form on the block {00, 0a, a0, aa}.
inline CMatrix extra_constraint_matrix(cplx a0, cplx a1, int alpha, int d) {
    if (alpha < 1 || alpha >= d) {
        throw Error("extra-constraint index must lie in [1, d-1]");
    }
    CVector a(2);
    a << a0, a1;
    detail::check_unit(a);
    const int idx[2] = {0, alpha};
    CVector w = CVector::Zero(static_cast<Eigen::Index>(d) * d);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            w[detail::pair_index(idx[i], idx[j], d)] = a[i] * std::conj(a[j]);
        }
    }
    return detail::rank_one(w);
}

struct SdpConstraint {
    CMatrix A;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    std::string label;
};

/// min Tr[C F] over Hermitian F >= 0 with lower_k <= Tr[A_k F] <= upper_k.
struct SdpInstance {
    int dim = 0;
    CMatrix objective;
    std::vector<SdpConstraint> constraints;

    void validate() const {
        auto check = [&](const CMatrix& m, const std::string& what) {
            if (m.rows() != dim || m.cols() != dim) {
                throw Error(what + " has the wrong dimension");
            }
            if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
                throw Error(what + " is not Hermitian");
            }
        };
        check(objective, "objective matrix");
        for (const auto& c : constraints) {
            check(c.A, "constraint '" + c.label + "'");
            if (c.lower > c.upper) {
                throw Error("constraint '" + c.label + "' has lower > upper");
            }
        }
    }
};

struct SdpSolution {
    CMatrix F;
    double optimum = 0.0;
    double dual_optimum = 0.0;
    double duality_gap = 0.0;
    /// Largest violation of any interval constraint or of F >= 0.
    double max_violation = 0.0;
    int rank_estimate = 0;
    int iterations = 0;
    bool converged = false;
};

/// The relaxation for coefficients c under the given fidelity constraints.
inline SdpInstance build_sdp(const CVector& c, const FidelityConstraints& fc) {
    fc.validate();
    if (c.size() != fc.d) {
        throw Error("coefficient vector length differs from subspace dimension");
    }
    const auto mats = constraint_matrices(fc.d);
    SdpInstance inst;
    inst.dim = fc.d * fc.d;
    inst.objective = objective_matrix(c);
    for (int a = 0; a < fc.d; ++a) {
        inst.constraints.push_back({mats.basis[static_cast<std::size_t>(a)], fc.F_basis[static_cast<std::size_t>(a)],
                                    1.0, "basis" + std::to_string(a)});
    }
    for (int b = 1; b < fc.d; ++b) {
        inst.constraints.push_back({mats.plus[static_cast<std::size_t>(b - 1)],
                                    fc.F_plus[static_cast<std::size_t>(b - 1)], 1.0, "plus" + std::to_string(b)});
    }
    for (int g = 0; g < fc.d; ++g) {
        inst.constraints.push_back({mats.norm[static_cast<std::size_t>(g)],
                                    -std::numeric_limits<double>::infinity(), 1.0, "norm" + std::to_string(g)});
    }
    for (std::size_t k = 0; k < fc.extras.size(); ++k) {
        const auto& e = fc.extras[k];
        inst.constraints.push_back({extra_constraint_matrix(e.a0, e.a1, e.alpha, fc.d), e.value, 1.0,
                                    "extra" + std::to_string(k)});
    }
    return inst;
}

/**
 * (F_top - eps) u u^dagger + eps I with u = sum_i e_ii. Every lower-bounded
 * constraint evaluates to F_top and each column norm to F_top + (d-1) eps.
 * F_top is the midpoint of (F_max, 1) and eps the midpoint of
 * (0, (1 - F_top)/(d-1)), so all constraints hold strictly.
 */
inline CMatrix strictly_feasible_point(const FidelityConstraints& fc) {
    fc.validate();
    const double f_max = fc.max_value();
    if (f_max >= 1.0) {
        throw NotStrictlyFeasibleError("a fidelity constraint equals 1; the feasible set has no interior");
    }
    const int d = fc.d;
    const double top = 0.5 * (f_max + 1.0);
    const double eps = d > 1 ? (1.0 - top) / (2.0 * (d - 1)) : 0.0;
    const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
    CVector u = CVector::Zero(n);
    for (int i = 0; i < d; ++i) {
        u[detail::pair_index(i, i, d)] = 1.0;
    }
    CMatrix f = (top - eps) * u * u.adjoint();
    f.diagonal().array() += eps;
    return f;
}

namespace detail {

/// [[Re A, -Im A], [Im A, Re A]]; Tr of a product of two embeddings is twice the complex trace.
inline Eigen::MatrixXd real_embedding(const CMatrix& a) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = a.real();
    r.topRightCorner(n, n) = -a.imag();
    r.bottomLeftCorner(n, n) = a.imag();
    r.bottomRightCorner(n, n) = a.real();
    return r;
}

inline CMatrix complex_from_embedding(const Eigen::MatrixXd& x, Eigen::Index n) {
    const Eigen::MatrixXd re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
    const Eigen::MatrixXd im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
    CMatrix f(n, n);
    f.real() = re;
    f.imag() = im;
    return 0.5 * (f + f.adjoint());
}

/// Largest alpha in (0, 1] keeping x + alpha dx positive definite, scaled by tau.
inline double max_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx, double tau) {
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    Eigen::MatrixXd s;
    if (llt.info() == Eigen::Success) {
        const auto l = llt.matrixL();
        Eigen::MatrixXd t = l.solve(dx);
        s = l.solve(t.transpose());
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
        const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd w = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
        s = w * dx * w;
    }
    s = (0.5 * (s + s.transpose())).eval();
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (lmin >= 0.0) {
        return 1.0;
    }
    return std::min(1.0, -tau / lmin);
}

inline double frob_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

} // namespace detail

/**
 * Primal-dual interior-point method on the real symmetric embedding.
 *
 * Interval rows become equalities with nonnegative slacks, which sit on the
 * diagonal of one extra block of the PSD variable. Search directions use the
 * HKM scaling with a Mehrotra predictor-corrector; the start is the supplied
 * primal point (if any) and Z = I, y = 0.
 */
inline SdpSolution solve_sdp(const SdpInstance& inst, double tol = 1e-8,
                             const std::optional<CMatrix>& warm_start = std::nullopt, int max_iterations = 100) {
    inst.validate();
    if (!(tol > 0.0)) {
        throw Error("solver tolerance must be positive");
    }
    const Eigen::Index n = inst.dim;
    const Eigen::Index ne = 2 * n;

    struct Row {
        std::size_t source;
        double rhs;
        double slack_sign; // -1: Tr >= rhs, +1: Tr <= rhs, 0: equality
    };
    std::vector<Row> rows;
    for (std::size_t k = 0; k < inst.constraints.size(); ++k) {
        const auto& c = inst.constraints[k];
        const bool lo = std::isfinite(c.lower);
        const bool hi = std::isfinite(c.upper);
        if (lo && hi && c.lower >= c.upper - 1e-12) {
            rows.push_back({k, c.upper, 0.0});
            continue;
        }
        if (lo) {
            rows.push_back({k, c.lower, -1.0});
        }
        if (hi) {
            rows.push_back({k, c.upper, 1.0});
        }
    }
    Eigen::Index n_slack = 0;
    for (const auto& r : rows) {
        n_slack += r.slack_sign != 0.0 ? 1 : 0;
    }
    const Eigen::Index big = ne + n_slack;
    const auto m = static_cast<Eigen::Index>(rows.size());

    std::vector<Eigen::MatrixXd> a(rows.size(), Eigen::MatrixXd::Zero(big, big));
    Eigen::VectorXd b(m);
    {
        Eigen::Index slack = ne;
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& r = rows[static_cast<std::size_t>(i)];
            a[static_cast<std::size_t>(i)].topLeftCorner(ne, ne) =
                0.5 * detail::real_embedding(inst.constraints[r.source].A);
            if (r.slack_sign != 0.0) {
                a[static_cast<std::size_t>(i)](slack, slack) = r.slack_sign;
                ++slack;
            }
            b[i] = r.rhs;
        }
    }
    Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(big, big);
    cmat.topLeftCorner(ne, ne) = 0.5 * detail::real_embedding(inst.objective);

    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(big, big);
    if (warm_start) {
        if (warm_start->rows() != n || warm_start->cols() != n) {
            throw Error("warm start has the wrong dimension");
        }
        x.setZero();
        x.topLeftCorner(ne, ne) = detail::real_embedding(*warm_start);
        Eigen::Index slack = ne;
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& r = rows[static_cast<std::size_t>(i)];
            if (r.slack_sign == 0.0) {
                continue;
            }
            const double value = detail::frob_dot(a[static_cast<std::size_t>(i)].topLeftCorner(ne, ne),
                                                  x.topLeftCorner(ne, ne));
            x(slack, slack) = std::max((r.rhs - value) * r.slack_sign, 1e-3);
            ++slack;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) <= 0.0) {
            x.diagonal().array() += 1e-3 - es.eigenvalues()(0);
        }
    }
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(big, big);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    auto op_a = [&](const Eigen::MatrixXd& v) {
        Eigen::VectorXd out(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            out[i] = detail::frob_dot(a[static_cast<std::size_t>(i)], v);
        }
        return out;
    };
    auto op_at = [&](const Eigen::VectorXd& v) {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(big, big);
        for (Eigen::Index i = 0; i < m; ++i) {
            out += v[i] * a[static_cast<std::size_t>(i)];
        }
        return out;
    };

    const double b_scale = 1.0 + b.norm();
    const double c_scale = 1.0 + cmat.norm();
    SdpSolution sol;
    for (int it = 0;; ++it) {
        const Eigen::VectorXd rp = b - op_a(x);
        const Eigen::MatrixXd rd = cmat - op_at(y) - z;
        const double pobj = detail::frob_dot(cmat, x);
        const double dobj = b.dot(y);
        const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double pinf = rp.norm() / b_scale;
        const double dinf = rd.norm() / c_scale;
        const double mu = detail::frob_dot(x, z) / static_cast<double>(big);
        sol.iterations = it;
        if (std::max({rel_gap, pinf, dinf, mu}) < tol) {
            sol.converged = true;
            break;
        }
        if (it >= max_iterations) {
            break;
        }

        const Eigen::MatrixXd zinv = Eigen::LLT<Eigen::MatrixXd>(z).solve(Eigen::MatrixXd::Identity(big, big));
        Eigen::MatrixXd schur(m, m);
        std::vector<Eigen::MatrixXd> xaz(rows.size());
        for (Eigen::Index j = 0; j < m; ++j) {
            xaz[static_cast<std::size_t>(j)] = x * a[static_cast<std::size_t>(j)] * zinv;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                schur(i, j) = detail::frob_dot(a[static_cast<std::size_t>(i)],
                                               xaz[static_cast<std::size_t>(j)].transpose());
            }
        }
        schur = (0.5 * (schur + schur.transpose())).eval();
        const Eigen::LDLT<Eigen::MatrixXd> schur_f(schur);
        const Eigen::MatrixXd x_rd_zinv = x * rd * zinv;

        auto direction = [&](const Eigen::MatrixXd& rc, Eigen::MatrixXd& dx, Eigen::VectorXd& dy,
                             Eigen::MatrixXd& dz) {
            const Eigen::MatrixXd rc_zinv = rc * zinv;
            Eigen::VectorXd rhs(m);
            for (Eigen::Index i = 0; i < m; ++i) {
                const auto& ai = a[static_cast<std::size_t>(i)];
                rhs[i] = rp[i] - detail::frob_dot(ai, rc_zinv.transpose()) +
                         detail::frob_dot(ai, x_rd_zinv.transpose());
            }
            dy = schur_f.solve(rhs);
            dz = rd - op_at(dy);
            dx = (rc - x * dz) * zinv;
            dx = (0.5 * (dx + dx.transpose())).eval();
        };

        const Eigen::MatrixXd xz = x * z;
        Eigen::MatrixXd dxa, dza;
        Eigen::VectorXd dya;
        direction(-xz, dxa, dya, dza);
        const double ap_aff = detail::max_step(x, dxa, 1.0);
        const double ad_aff = detail::max_step(z, dza, 1.0);
        const double mu_aff = detail::frob_dot(x + ap_aff * dxa, z + ad_aff * dza) / static_cast<double>(big);
        const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

        Eigen::MatrixXd rc = -xz - dxa * dza;
        rc.diagonal().array() += sigma * mu;
        Eigen::MatrixXd dx, dz;
        Eigen::VectorXd dy;
        direction(rc, dx, dy, dz);
        const double ap = detail::max_step(x, dx, 0.98);
        const double ad = detail::max_step(z, dz, 0.98);
        x += ap * dx;
        y += ad * dy;
        z += ad * dz;
        x = (0.5 * (x + x.transpose())).eval();
        z = (0.5 * (z + z.transpose())).eval();
    }

    sol.F = detail::complex_from_embedding(x.topLeftCorner(ne, ne), n);
    sol.optimum = (inst.objective * sol.F).trace().real();
    sol.dual_optimum = b.dot(y);
    sol.duality_gap = std::abs(detail::frob_dot(cmat, x) - sol.dual_optimum);
    double viol = 0.0;
    for (const auto& c : inst.constraints) {
        const double v = (c.A * sol.F).trace().real();
        viol = std::max({viol, c.lower - v, v - c.upper});
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<CMatrix>(sol.F, Eigen::EigenvaluesOnly).eigenvalues();
    sol.max_violation = std::max(viol, -ev(0));
    const double tr = sol.F.trace().real();
    sol.rank_estimate = 0;
    if (tr > 0.0) {
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            sol.rank_estimate += ev(i) / tr > 1e-7 ? 1 : 0;
        }
    }
    return sol;
}

struct FidelityBound {
    double value = 0.0;
    int rank_estimate = 0;
    double duality_gap = 0.0;
    double max_violation = 0.0;
    int iterations = 0;
    bool converged = true;
};

/**
 * Worst-case fidelity of sum_i c_i |Psi_i> given the constraints, clamped to
 * [0, 1]. With every constraint at 1 the answer is 1 exactly (F = u u^dagger).
 */
inline FidelityBound fidelity_lower_bound(const CVector& c, const FidelityConstraints& fc, double tol = 1e-8) {
    const SdpInstance inst = build_sdp(c, fc);
    if (fc.all_one()) {
        return {1.0, 1, 0.0, 0.0, 0, true};
    }
    std::optional<CMatrix> start;
    if (fc.max_value() < 1.0) {
        start = strictly_feasible_point(fc);
    }
    const SdpSolution sol = solve_sdp(inst, tol, start);
    FidelityBound out;
    out.value = std::clamp(sol.optimum, 0.0, 1.0);
    out.rank_estimate = sol.rank_estimate;
    out.duality_gap = sol.duality_gap;
    out.max_violation = sol.max_violation;
    out.iterations = sol.iterations;
    out.converged = sol.converged;
    return out;
}

/// cos(theta/2)|Psi_0> + e^{i phi} sin(theta/2)|Psi_1>.
inline CVector two_level_coefficients(double theta, double phi) {
    CVector c(2);
    c << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
    return c;
}

namespace detail {

/// Overlap matrix f = top d x d block of an isometry V = G (G^dagger G)^{-1/2}.
inline CMatrix overlaps_from_generator(const Eigen::VectorXd& x, int d) {
    const Eigen::Index rows = 2 * static_cast<Eigen::Index>(d);
    CMatrix g(rows, d);
    for (Eigen::Index k = 0; k < rows * d; ++k) {
        g.data()[k] = cplx(x[2 * k], x[2 * k + 1]);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g.adjoint() * g);
    if (es.eigenvalues()(0) < 1e-12) {
        return CMatrix::Constant(d, d, cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
    }
    const CMatrix inv_sqrt =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    return (g * inv_sqrt).topRows(d);
}

/// Nelder-Mead with the standard coefficients.
template <class F>
std::pair<Eigen::VectorXd, double> nelder_mead(const F& f, Eigen::VectorXd x0, double scale, int max_evals) {
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> vals(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        pts[static_cast<std::size_t>(i + 1)][i] += scale;
    }
    int evals = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        vals[i] = f(pts[i]);
        ++evals;
    }
    std::vector<std::size_t> order(pts.size());
    while (evals < max_evals) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return vals[p] < vals[q]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];
        if (std::isfinite(vals[worst]) && vals[worst] - vals[best] < 1e-15) {
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            centroid += pts[order[i]];
        }
        centroid /= static_cast<double>(n);
        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = f(xr);
        ++evals;
        if (fr < vals[best]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = f(xe);
            ++evals;
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const Eigen::VectorXd xc = centroid + 0.5 * (pts[worst] - centroid);
        const double fc = f(xc);
        ++evals;
        if (fc < vals[worst]) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) {
                continue;
            }
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = f(pts[i]);
            ++evals;
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i) {
        if (vals[i] < vals[best]) {
            best = i;
        }
    }
    return {pts[best], vals[best]};
}

} // namespace detail

struct OracleResult {
    double value = 1.0;
    /// Overlap matrix f_ij = <Phi_i|Psi_j> of the best construction.
    CMatrix overlaps;
    int feasible_trials = 0;
};

/**
 * Explicit-state search: Phi_i = e_i and Psi_j = columns of a random-restart
 * isometry in C^{2d}. Infeasible constructions score +infinity. The returned
 * value is feasible, so it upper-bounds the exact minimum.
 */
inline OracleResult qcqp_oracle(const CVector& c, const FidelityConstraints& fc, int trials = 16,
                                std::uint64_t seed = 1, int evals_per_trial = 20000) {
    fc.validate();
    if (fc.d > 3) {
        throw Error("explicit-state oracle supports d <= 3");
    }
    if (c.size() != fc.d) {
        throw Error("coefficient vector length differs from subspace dimension");
    }
    detail::check_unit(c);
    const int d = fc.d;
    const SdpInstance inst = build_sdp(c, fc);

    auto flatten = [d](const CMatrix& f) {
        CVector v(static_cast<Eigen::Index>(d) * d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                v[detail::pair_index(i, j, d)] = f(i, j);
            }
        }
        return v;
    };
    auto quad = [](const CMatrix& a, const CVector& v) { return v.dot(a * v).real(); };
    auto evaluate = [&](const Eigen::VectorXd& x) {
        const CMatrix f = detail::overlaps_from_generator(x, d);
        if (!f.allFinite()) {
            return std::numeric_limits<double>::infinity();
        }
        const CVector v = flatten(f);
        for (const auto& con : inst.constraints) {
            const double q = quad(con.A, v);
            if (q < con.lower - 1e-12 || q > con.upper + 1e-12) {
                return std::numeric_limits<double>::infinity();
            }
        }
        return quad(inst.objective, v);
    };

    const Eigen::Index n_real = 2 * 2 * static_cast<Eigen::Index>(d) * d;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    OracleResult out;
    out.value = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_real);
        // G = [I; s R]: overlaps near the identity, always feasible for small s.
        for (int i = 0; i < d; ++i) {
            x[2 * (static_cast<Eigen::Index>(i) * (2 * d) + i)] = 1.0;
        }
        const double spread = t == 0 ? 0.0 : 0.05 * t;
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < 2 * d; ++i) {
                const Eigen::Index k = static_cast<Eigen::Index>(j) * (2 * d) + i;
                x[2 * k] += spread * normal(rng);
                x[2 * k + 1] += spread * normal(rng);
            }
        }
        if (!std::isfinite(evaluate(x))) {
            continue;
        }
        ++out.feasible_trials;
        auto [xb, vb] = detail::nelder_mead(evaluate, x, 0.1, evals_per_trial / 2);
        auto [xr, vr] = detail::nelder_mead(evaluate, xb, 0.01, evals_per_trial / 2);
        if (vr < out.value) {
            out.value = vr;
            out.overlaps = detail::overlaps_from_generator(xr, d);
        }
    }
    if (out.feasible_trials == 0) {
        throw NumericalError("oracle found no feasible construction");
    }
    return out;
}

} // namespace svqs

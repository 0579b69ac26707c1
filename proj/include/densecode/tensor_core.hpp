// Copyright 2026 The densecode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense complex linear algebra used throughout the library: Schmidt
 * decomposition, dual bases, partial traces, numeric rank, positivity and
 * von Neumann entropy. Every tolerance-sensitive routine takes an explicit
 * ToleranceConfig.
 *
 * Bipartite index convention: a vector on H_1 (x) H_2 with dimensions
 * (d1, d2) stores the amplitude of |i>|j> at position i * d2 + j.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace densecode {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when an operation's precondition is violated by its input.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ToleranceConfig {
    double abs_tol = 1e-9;
    /// Singular values below rank_tol * (largest singular value) count as zero.
    double rank_tol = 1e-10;

    void validate() const {
        auto ok = [](double v) { return std::isfinite(v) && v > 0.0 && v < 1e-3; };
        if (!ok(abs_tol) || !ok(rank_tol)) {
            throw DomainError("tolerances must lie in (0, 1e-3)");
        }
    }

    /// Defaults, overridden by DENSECODE_ABS_TOL / DENSECODE_RANK_TOL when set.
    static ToleranceConfig from_environment() {
        ToleranceConfig tol;
        if (const char *v = std::getenv("DENSECODE_ABS_TOL")) {
            tol.abs_tol = std::stod(v);
        }
        if (const char *v = std::getenv("DENSECODE_RANK_TOL")) {
            tol.rank_tol = std::stod(v);
        }
        tol.validate();
        return tol;
    }
};

inline void require_finite(const ComplexMatrix &m, const char *what) {
    if (!m.allFinite()) {
        throw DomainError(std::string(what) + ": non-finite entry");
    }
}

inline void require_square(const ComplexMatrix &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw DomainError(std::string(what) + ": matrix is not square");
    }
}

inline double hermitian_defect(const ComplexMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const ComplexMatrix &m, const ToleranceConfig &tol, const char *what) {
    require_square(m, what);
    require_finite(m, what);
    if (hermitian_defect(m) > tol.abs_tol) {
        throw DomainError(std::string(what) + ": matrix is not Hermitian");
    }
}

/// Kronecker product a (x) b.
inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Ascending eigenvalues of a Hermitian matrix (the upper triangle is ignored).
inline RealVector hermitian_eigenvalues(const ComplexMatrix &m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline RealVector singular_values(const ComplexMatrix &m) {
    if (m.size() == 0) {
        return RealVector();
    }
    return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
}

/// Count of singular values above rank_tol times the largest one.
inline std::size_t numeric_rank(const ComplexMatrix &m, const ToleranceConfig &tol = {}) {
    require_finite(m, "numeric_rank");
    const RealVector s = singular_values(m);
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    const double cutoff = tol.rank_tol * s(0);
    return static_cast<std::size_t>((s.array() > cutoff).count());
}

inline bool is_positive_semidefinite(const ComplexMatrix &m, const ToleranceConfig &tol = {}) {
    require_hermitian(m, tol, "is_positive_semidefinite");
    if (m.size() == 0) {
        return true;
    }
    return hermitian_eigenvalues(m)(0) >= -tol.abs_tol;
}

/// Rotate v so that its first component with modulus above `eps` is real positive.
inline ComplexVector fix_phase(const ComplexVector &v, double eps = 1e-12) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > eps) {
            return v * (std::abs(v(i)) / v(i));
        }
    }
    return v;
}

struct SchmidtDecomposition {
    std::vector<double> coefficients;      // descending, strictly positive
    std::vector<ComplexVector> left_basis;  // on the first factor
    std::vector<ComplexVector> right_basis; // on the second factor

    [[nodiscard]] std::size_t rank() const { return coefficients.size(); }

    [[nodiscard]] ComplexVector reconstruct() const {
        if (coefficients.empty()) {
            return ComplexVector();
        }
        const auto da = left_basis.front().size();
        const auto db = right_basis.front().size();
        ComplexVector psi = ComplexVector::Zero(da * db);
        for (std::size_t k = 0; k < coefficients.size(); ++k) {
            for (Eigen::Index i = 0; i < da; ++i) {
                psi.segment(i * db, db) += coefficients[k] * left_basis[k](i) * right_basis[k];
            }
        }
        return psi;
    }
};

/// Schmidt form of a normalized bipartite pure state. Coefficients below
/// rank_tol * largest are discarded. The left vectors carry the phase
/// convention; the right vectors absorb the compensating phase.
inline SchmidtDecomposition schmidt_decompose(const ComplexVector &psi, std::size_t dim_a, std::size_t dim_b,
                                              const ToleranceConfig &tol = {}) {
    tol.validate();
    if (dim_a == 0 || dim_b == 0 || static_cast<std::size_t>(psi.size()) != dim_a * dim_b) {
        throw DomainError("schmidt_decompose: vector length does not match dim_a * dim_b");
    }
    require_finite(psi, "schmidt_decompose");
    const double norm = psi.norm();
    if (norm == 0.0) {
        throw DomainError("schmidt_decompose: zero vector");
    }
    if (std::abs(norm - 1.0) > tol.abs_tol) {
        throw DomainError("schmidt_decompose: state is not normalized");
    }

    const auto da = static_cast<Eigen::Index>(dim_a);
    const auto db = static_cast<Eigen::Index>(dim_b);
    ComplexMatrix coeff(da, db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < db; ++j) {
            coeff(i, j) = psi(i * db + j);
        }
    }
    // coeff = U S V^dagger  =>  psi = sum_k s_k u_k (x) conj(v_k)
    Eigen::JacobiSVD<ComplexMatrix> svd(coeff, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector s = svd.singularValues();

    SchmidtDecomposition out;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) <= tol.rank_tol * s(0)) {
            break;
        }
        ComplexVector u = svd.matrixU().col(k);
        ComplexVector v = svd.matrixV().col(k).conjugate();
        const ComplexVector u_fixed = fix_phase(u);
        // u_fixed = u * phase  =>  v must carry conj(phase)
        Complex phase{1.0, 0.0};
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            if (std::abs(u(i)) > 1e-12) {
                phase = u_fixed(i) / u(i);
                break;
            }
        }
        out.coefficients.push_back(s(k));
        out.left_basis.push_back(u_fixed);
        out.right_basis.push_back(v * std::conj(phase));
    }
    return out;
}

/// Reciprocal basis: returns duals d_y with <d_y|b_x> = delta_yx.
inline std::vector<ComplexVector> dual_basis(const std::vector<ComplexVector> &basis, const ToleranceConfig &tol = {}) {
    if (basis.empty()) {
        throw DomainError("dual_basis: empty basis");
    }
    const auto n = basis.front().size();
    if (static_cast<std::size_t>(n) != basis.size()) {
        throw DomainError("dual_basis: vector count must equal the dimension");
    }
    ComplexMatrix b(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (basis[static_cast<std::size_t>(k)].size() != n) {
            throw DomainError("dual_basis: vectors have mismatched lengths");
        }
        b.col(k) = basis[static_cast<std::size_t>(k)];
    }
    require_finite(b, "dual_basis");
    if (numeric_rank(b, tol) < static_cast<std::size_t>(n)) {
        throw DomainError("dual_basis: vectors are linearly dependent");
    }
    // D^dagger B = I  =>  D = (B^{-1})^dagger
    const ComplexMatrix duals = b.fullPivLu().inverse().adjoint();
    std::vector<ComplexVector> out;
    out.reserve(basis.size());
    for (Eigen::Index k = 0; k < n; ++k) {
        out.emplace_back(duals.col(k));
    }
    return out;
}

enum class Factor { First, Second };

/// Partial trace of an operator on H_1 (x) H_2, keeping the requested factor.
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::size_t dim_first, std::size_t dim_second, Factor keep,
                                   const ToleranceConfig &tol = {}) {
    const auto d1 = static_cast<Eigen::Index>(dim_first);
    const auto d2 = static_cast<Eigen::Index>(dim_second);
    if (rho.rows() != d1 * d2 || rho.cols() != d1 * d2) {
        throw DomainError("partial_trace: dimension mismatch");
    }
    require_hermitian(rho, tol, "partial_trace");
    if (keep == Factor::First) {
        ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
        for (Eigen::Index i = 0; i < d1; ++i) {
            for (Eigen::Index k = 0; k < d1; ++k) {
                Complex acc{0.0, 0.0};
                for (Eigen::Index j = 0; j < d2; ++j) {
                    acc += rho(i * d2 + j, k * d2 + j);
                }
                out(i, k) = acc;
            }
        }
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
    for (Eigen::Index i = 0; i < d1; ++i) {
        out += rho.block(i * d2, i * d2, d2, d2);
    }
    return out;
}

/// Von Neumann entropy in bits.
inline double von_neumann_entropy(const ComplexMatrix &rho, const ToleranceConfig &tol = {}) {
    require_hermitian(rho, tol, "von_neumann_entropy");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol.abs_tol) {
        throw DomainError("von_neumann_entropy: trace is not 1");
    }
    const RealVector ev = hermitian_eigenvalues(rho);
    if (ev.size() > 0 && ev(0) < -tol.abs_tol) {
        throw DomainError("von_neumann_entropy: negative eigenvalue");
    }
    double h = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double p = ev(i);
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

/// Shannon entropy in bits of a probability list, with 0 log 0 = 0.
inline double shannon_entropy(const std::vector<double> &probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

/// Principal square root of a PSD Hermitian matrix (negative round-off clipped).
inline ComplexMatrix psd_sqrt(const ComplexMatrix &m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
    const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

/// exp(Z) for anti-Hermitian Z, computed through the Hermitian eigenbasis of iZ.
inline ComplexMatrix expm_antihermitian(const ComplexMatrix &z) {
    const Complex i_unit{0.0, 1.0};
    const ComplexMatrix h = i_unit * z; // Hermitian
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
    const ComplexVector phases = (-i_unit * es.eigenvalues().cast<Complex>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Orthonormal basis (columns) of the column span of m.
inline ComplexMatrix range_basis(const ComplexMatrix &m, const ToleranceConfig &tol = {}) {
    if (m.size() == 0) {
        return ComplexMatrix(m.rows(), 0);
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU);
    const std::size_t r = numeric_rank(m, tol);
    return svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
}

/// Symmetric (Loewdin) orthonormalization of linearly independent columns.
inline ComplexMatrix symmetric_orthonormalize(const ComplexMatrix &m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

} // namespace densecode

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
 * Alice's encoding maps. An encoder sends her half of the shared state
 * (dimension Dbar, the Schmidt rank) into the channel space (dimension D).
 *
 * Matrices are D x Dbar. Kets produced by transpose_to_ket live on
 * H_c (x) H_a with the channel index major: |A> has component A(c, j) at
 * position c * Dbar + j. Output states of an encoding live on H_c (x) H_b
 * with the same layout.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "states.hpp"
#include "tensor_core.hpp"

namespace densecode {

/// A^dagger A = I on the Dbar-dimensional input space. Requires Dbar <= D.
class Isometry {
  public:
    explicit Isometry(ComplexMatrix m, const ToleranceConfig &tol = {}) : m_(std::move(m)) {
        require_finite(m_, "Isometry");
        if (m_.cols() == 0 || m_.cols() > m_.rows()) {
            throw DomainError("Isometry: requires 1 <= input dimension <= output dimension");
        }
        const auto n = m_.cols();
        if ((m_.adjoint() * m_ - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > tol.abs_tol) {
            throw DomainError("Isometry: A^dagger A != I");
        }
    }

    [[nodiscard]] const ComplexMatrix &matrix() const { return m_; }
    [[nodiscard]] std::size_t input_dim() const { return static_cast<std::size_t>(m_.cols()); }
    [[nodiscard]] std::size_t output_dim() const { return static_cast<std::size_t>(m_.rows()); }

  private:
    ComplexMatrix m_;
};

/// sum_l A_l^dagger A_l = I on the input space.
class KrausChannel {
  public:
    explicit KrausChannel(std::vector<ComplexMatrix> ops, const ToleranceConfig &tol = {}) : ops_(std::move(ops)) {
        if (ops_.empty()) {
            throw DomainError("KrausChannel: no operators");
        }
        const auto rows = ops_.front().rows();
        const auto cols = ops_.front().cols();
        if (rows == 0 || cols == 0) {
            throw DomainError("KrausChannel: empty operator");
        }
        ComplexMatrix sum = ComplexMatrix::Zero(cols, cols);
        for (const auto &a : ops_) {
            require_finite(a, "KrausChannel");
            if (a.rows() != rows || a.cols() != cols) {
                throw DomainError("KrausChannel: operators have mismatched shapes");
            }
            sum += a.adjoint() * a;
        }
        if ((sum - ComplexMatrix::Identity(cols, cols)).cwiseAbs().maxCoeff() > tol.abs_tol) {
            throw DomainError("KrausChannel: sum of A_l^dagger A_l != I");
        }
    }

    explicit KrausChannel(const Isometry &iso) : ops_{iso.matrix()} {}

    [[nodiscard]] const std::vector<ComplexMatrix> &operators() const { return ops_; }
    [[nodiscard]] std::size_t input_dim() const { return static_cast<std::size_t>(ops_.front().cols()); }
    [[nodiscard]] std::size_t output_dim() const { return static_cast<std::size_t>(ops_.front().rows()); }
    [[nodiscard]] std::size_t operator_count() const { return ops_.size(); }
    [[nodiscard]] bool is_isometric() const { return ops_.size() == 1; }

  private:
    std::vector<ComplexMatrix> ops_;
};

struct OrthogonalityCheck {
    bool orthogonal = true;
    double max_deviation = 0.0;
};

/// Tests Tr(A_x^dag A_y) = Dbar delta_xy over all pairs; reports the worst deviation.
inline OrthogonalityCheck check_orthogonality(std::span<const ComplexMatrix> members, const ToleranceConfig &tol = {}) {
    OrthogonalityCheck out;
    if (members.empty()) {
        return out;
    }
    const auto rows = members.front().rows();
    const auto cols = members.front().cols();
    for (const auto &m : members) {
        if (m.rows() != rows || m.cols() != cols) {
            throw DomainError("check_orthogonality: members have mismatched shapes");
        }
    }
    const double dbar = static_cast<double>(cols);
    for (std::size_t x = 0; x < members.size(); ++x) {
        for (std::size_t y = x; y < members.size(); ++y) {
            const Complex t = (members[x].adjoint() * members[y]).trace();
            const double target = (x == y) ? dbar : 0.0;
            out.max_deviation = std::max(out.max_deviation, std::abs(t - target));
        }
    }
    out.orthogonal = out.max_deviation <= tol.abs_tol;
    return out;
}

inline OrthogonalityCheck check_orthogonality(std::span<const Isometry> members, const ToleranceConfig &tol = {}) {
    std::vector<ComplexMatrix> mats;
    mats.reserve(members.size());
    for (const auto &m : members) {
        mats.push_back(m.matrix());
    }
    return check_orthogonality(std::span<const ComplexMatrix>(mats), tol);
}

class IsometryFamily {
  public:
    explicit IsometryFamily(std::vector<Isometry> members, const ToleranceConfig &tol = {})
        : members_(std::move(members)) {
        if (members_.empty()) {
            throw DomainError("IsometryFamily: no members");
        }
        const auto check = check_orthogonality(std::span<const Isometry>(members_), tol);
        orthogonal_ = check.orthogonal;
        max_deviation_ = check.max_deviation;
    }

    [[nodiscard]] const std::vector<Isometry> &members() const { return members_; }
    [[nodiscard]] std::size_t size() const { return members_.size(); }
    [[nodiscard]] bool orthogonal() const { return orthogonal_; }
    [[nodiscard]] double max_deviation() const { return max_deviation_; }
    [[nodiscard]] std::size_t input_dim() const { return members_.front().input_dim(); }
    [[nodiscard]] std::size_t output_dim() const { return members_.front().output_dim(); }

  private:
    std::vector<Isometry> members_;
    bool orthogonal_ = false;
    double max_deviation_ = 0.0;
};

/// The Dbar * D orthogonal isometries S^beta Q R^alpha, where R is the clock
/// phase on the input, S the cyclic shift on the channel and Q the
/// embedding of the input basis into the first Dbar channel states.
/// Member x = alpha * D + beta.
inline IsometryFamily standard_family(std::size_t d_bar, std::size_t d_chan) {
    if (d_bar == 0 || d_chan == 0) {
        throw DomainError("standard_family: dimensions must be positive");
    }
    if (d_bar > d_chan) {
        throw DomainError("standard_family: Dbar > D, isometric encoding is impossible");
    }
    const auto n = static_cast<Eigen::Index>(d_bar);
    const auto d = static_cast<Eigen::Index>(d_chan);
    ComplexMatrix q = ComplexMatrix::Zero(d, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        q(j, j) = 1.0;
    }
    ComplexMatrix shift = ComplexMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        shift((k + 1) % d, k) = 1.0;
    }
    std::vector<Isometry> members;
    members.reserve(d_bar * d_chan);
    for (Eigen::Index alpha = 0; alpha < n; ++alpha) {
        ComplexVector clock(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            clock(j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(alpha * j) / static_cast<double>(n));
        }
        ComplexMatrix base = q * clock.asDiagonal();
        for (Eigen::Index beta = 0; beta < d; ++beta) {
            members.emplace_back(base);
            base = shift * base;
        }
    }
    return IsometryFamily(std::move(members));
}

/// Map-state duality: |A> = sum_j (A|a^j>) (x) |a^j>.
inline ComplexVector transpose_to_ket(const ComplexMatrix &a) {
    const auto rows = a.rows();
    const auto cols = a.cols();
    ComplexVector ket(rows * cols);
    for (Eigen::Index c = 0; c < rows; ++c) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            ket(c * cols + j) = a(c, j);
        }
    }
    return ket;
}

/// Inverse of transpose_to_ket.
inline ComplexMatrix ket_to_operator(const ComplexVector &ket, std::size_t out_dim, std::size_t in_dim) {
    const auto rows = static_cast<Eigen::Index>(out_dim);
    const auto cols = static_cast<Eigen::Index>(in_dim);
    if (ket.size() != rows * cols) {
        throw DomainError("ket_to_operator: length mismatch");
    }
    ComplexMatrix a(rows, cols);
    for (Eigen::Index c = 0; c < rows; ++c) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            a(c, j) = ket(c * cols + j);
        }
    }
    return a;
}

/// The state viewed as the map sum_j lambda_j |b^j><a^j|: diag(lambda).
inline ComplexMatrix phi_map(const EntangledState &s) {
    RealVector d(static_cast<Eigen::Index>(s.rank()));
    for (std::size_t j = 0; j < s.rank(); ++j) {
        d(static_cast<Eigen::Index>(j)) = s.coefficients()[j];
    }
    return d.cast<Complex>().asDiagonal();
}

/// Number of linearly independent Kraus operators (rank of the matrix whose
/// columns are the column-stacked operators).
inline std::size_t kraus_rank(const KrausChannel &ch, const ToleranceConfig &tol = {}) {
    const auto &ops = ch.operators();
    const auto len = ops.front().size();
    ComplexMatrix stacked(len, static_cast<Eigen::Index>(ops.size()));
    for (std::size_t l = 0; l < ops.size(); ++l) {
        stacked.col(static_cast<Eigen::Index>(l)) = ops[l].reshaped(); // column-major storage
    }
    return numeric_rank(stacked, tol);
}

/// Output kets (A_l (x) I)|Phi> for each Kraus operator, on H_c (x) H_b.
inline std::vector<ComplexVector> output_kets(const KrausChannel &ch, const EntangledState &s) {
    if (ch.input_dim() != s.rank()) {
        throw DomainError("output_kets: channel input dimension differs from the Schmidt rank");
    }
    const ComplexMatrix phi = phi_map(s);
    std::vector<ComplexVector> kets;
    kets.reserve(ch.operator_count());
    for (const auto &a : ch.operators()) {
        // (A (x) I) sum_j lambda_j |j>|j>  has component A(c, j) lambda_j at (c, j)
        kets.push_back(transpose_to_ket(a * phi));
    }
    return kets;
}

/// rho_cb = sum_l (A_l (x) I)|Phi><Phi|(A_l (x) I)^dagger.
inline ComplexMatrix bob_state(const KrausChannel &ch, const EntangledState &s) {
    const auto kets = output_kets(ch, s);
    const auto n = kets.front().size();
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    for (const auto &k : kets) {
        rho += k * k.adjoint();
    }
    return rho;
}

enum class ExtensionStatus {
    Extended,
    /// More members than channel dimensions: provably impossible.
    ObstructedByCount,
    /// N <= D but no orthonormal set of new columns was found.
    NotFound,
};

struct ExtensionResult {
    ExtensionStatus status = ExtensionStatus::NotFound;
    std::optional<IsometryFamily> family;
    std::string reason;

    [[nodiscard]] bool ok() const { return status == ExtensionStatus::Extended; }
};

namespace detail {

/// Orthonormal basis (columns) of the orthogonal complement of range(m).
inline ComplexMatrix complement_basis(const ComplexMatrix &m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU);
    const auto r = static_cast<Eigen::Index>(numeric_rank(m));
    return svd.matrixU().rightCols(m.rows() - r);
}

inline ComplexMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            g(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return g;
}

/// Greedy pass: each new column is a random vector of its allowed subspace
/// orthogonal to the columns chosen before it.
inline std::optional<ComplexMatrix> greedy_columns(const std::vector<ComplexMatrix> &allowed, Eigen::Index dim,
                                                   std::mt19937_64 &rng) {
    ComplexMatrix cols(dim, 0);
    for (const auto &w : allowed) {
        ComplexMatrix free = w;
        if (cols.cols() > 0) {
            // null space of cols^dag w, as coordinates in w
            const ComplexMatrix constraint = cols.adjoint() * w;
            Eigen::JacobiSVD<ComplexMatrix> svd(constraint, Eigen::ComputeFullV);
            const auto r = static_cast<Eigen::Index>(numeric_rank(constraint));
            if (r >= w.cols()) {
                return std::nullopt;
            }
            free = w * svd.matrixV().rightCols(w.cols() - r);
        }
        ComplexVector v = free * random_gaussian(free.cols(), 1, rng);
        v.normalize();
        cols.conservativeResize(Eigen::NoChange, cols.cols() + 1);
        cols.col(cols.cols() - 1) = v;
    }
    return cols;
}

/// Alternating projections between the product of allowed subspaces and the
/// set of orthonormal frames.
inline std::optional<ComplexMatrix> alternating_columns(const std::vector<ComplexMatrix> &allowed, Eigen::Index dim,
                                                        std::mt19937_64 &rng, double tol, int max_iters) {
    const auto n = static_cast<Eigen::Index>(allowed.size());
    ComplexMatrix v(dim, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto &w = allowed[static_cast<std::size_t>(k)];
        v.col(k) = (w * random_gaussian(w.cols(), 1, rng)).normalized();
    }
    for (int it = 0; it < max_iters; ++it) {
        const ComplexMatrix frame = symmetric_orthonormalize(v);
        double off = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto &w = allowed[static_cast<std::size_t>(k)];
            const ComplexVector proj = w * (w.adjoint() * frame.col(k));
            off = std::max(off, (frame.col(k) - proj).norm());
            v.col(k) = proj.norm() > 0.0 ? ComplexVector(proj.normalized()) : ComplexVector(frame.col(k));
        }
        const ComplexMatrix gram = v.adjoint() * v - ComplexMatrix::Identity(n, n);
        if (gram.cwiseAbs().maxCoeff() <= tol) {
            return v;
        }
        if (off < 1e-15) {
            break;
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Appends one input dimension to every member of an orthogonal family while
/// keeping each member isometric and the family orthogonal. The appended
/// columns must be mutually orthonormal, which is impossible when the family
/// has more members than channel dimensions.
inline ExtensionResult extend_orthogonal_family(const IsometryFamily &family, std::uint64_t seed = 0x5eed,
                                                const ToleranceConfig &tol = {}) {
    if (!family.orthogonal()) {
        throw DomainError("extend_orthogonal_family: family is not orthogonal");
    }
    const auto d = family.input_dim();
    const auto dim = family.output_dim();
    if (d >= dim) {
        throw DomainError("extend_orthogonal_family: input dimension must be below the channel dimension");
    }
    ExtensionResult result;
    if (family.size() > dim) {
        result.status = ExtensionStatus::ObstructedByCount;
        result.reason = "family has " + std::to_string(family.size()) + " members but the channel has only " +
                        std::to_string(dim) + " dimensions; the appended columns cannot be mutually orthogonal";
        return result;
    }

    std::vector<ComplexMatrix> allowed;
    allowed.reserve(family.size());
    for (const auto &m : family.members()) {
        allowed.push_back(detail::complement_basis(m.matrix()));
    }

    std::mt19937_64 rng(seed);
    const auto edim = static_cast<Eigen::Index>(dim);
    std::optional<ComplexMatrix> cols = detail::greedy_columns(allowed, edim, rng);
    const double frame_tol = 0.1 * tol.abs_tol;
    for (int restart = 0; !cols && restart < 16; ++restart) {
        cols = detail::alternating_columns(allowed, edim, rng, frame_tol, 4000);
    }
    if (!cols) {
        result.status = ExtensionStatus::NotFound;
        result.reason = "no orthonormal set of appended columns found in the allowed subspaces";
        return result;
    }

    std::vector<Isometry> extended;
    extended.reserve(family.size());
    for (std::size_t n = 0; n < family.size(); ++n) {
        const auto &old = family.members()[n].matrix();
        ComplexMatrix k(old.rows(), old.cols() + 1);
        k.leftCols(old.cols()) = old;
        k.col(old.cols()) = cols->col(static_cast<Eigen::Index>(n));
        extended.emplace_back(std::move(k), tol);
    }
    IsometryFamily out(std::move(extended), tol);
    if (!out.orthogonal()) {
        result.status = ExtensionStatus::NotFound;
        result.reason = "extension lost orthogonality beyond tolerance";
        return result;
    }
    result.status = ExtensionStatus::Extended;
    result.family = std::move(out);
    return result;
}

} // namespace densecode

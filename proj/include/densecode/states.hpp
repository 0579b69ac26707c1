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
 * Shared entangled pure states in Schmidt form, together with Bob's local
 * filtering operations (entanglement concentration and truncation).
 *
 * A state of Schmidt rank n is sum_j lambda_j |j>_a |j>_b with both local
 * spaces of dimension n and canonical computational bases.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "tensor_core.hpp"

namespace densecode {

class EntangledState {
  public:
    /// Sorts descending, drops zeros and normalizes the squares to 1.
    static EntangledState from_coefficients(std::vector<double> raw) {
        if (raw.empty()) {
            throw DomainError("EntangledState: empty coefficient list");
        }
        for (double c : raw) {
            if (!std::isfinite(c) || c < 0.0) {
                throw DomainError("EntangledState: coefficients must be finite and nonnegative");
            }
        }
        std::erase_if(raw, [](double c) { return c == 0.0; });
        if (raw.empty()) {
            throw DomainError("EntangledState: all coefficients are zero");
        }
        std::sort(raw.begin(), raw.end(), std::greater<>());
        const double norm = std::sqrt(std::inner_product(raw.begin(), raw.end(), raw.begin(), 0.0));
        for (double &c : raw) {
            c /= norm;
        }
        return EntangledState(std::move(raw));
    }

    /// Same as from_coefficients but takes the squared coefficients, in any order.
    static EntangledState from_squared(std::vector<double> lambda_sq) {
        for (double &p : lambda_sq) {
            if (!std::isfinite(p) || p < 0.0) {
                throw DomainError("EntangledState: squared coefficients must be finite and nonnegative");
            }
            p = std::sqrt(p);
        }
        return from_coefficients(std::move(lambda_sq));
    }

    static EntangledState uniform(std::size_t d) {
        if (d == 0) {
            throw DomainError("uniform_state: dimension must be at least 1");
        }
        return EntangledState(std::vector<double>(d, 1.0 / std::sqrt(static_cast<double>(d))));
    }

    [[nodiscard]] const std::vector<double> &coefficients() const { return coeffs_; }
    [[nodiscard]] std::size_t rank() const { return coeffs_.size(); }
    [[nodiscard]] double largest() const { return coeffs_.front(); }
    [[nodiscard]] double smallest() const { return coeffs_.back(); }

    [[nodiscard]] std::vector<double> squared() const {
        std::vector<double> out(coeffs_.size());
        std::transform(coeffs_.begin(), coeffs_.end(), out.begin(), [](double c) { return c * c; });
        return out;
    }

    /// True when every coefficient equals the largest within a relative tolerance.
    [[nodiscard]] bool is_uniform(double rel_tol = 1e-9) const {
        return (largest() - smallest()) <= rel_tol * largest();
    }

    /// sum_j lambda_j |j>|j> as a vector on the (rank x rank) space.
    [[nodiscard]] ComplexVector joint_vector() const {
        const auto n = static_cast<Eigen::Index>(rank());
        ComplexVector psi = ComplexVector::Zero(n * n);
        for (Eigen::Index j = 0; j < n; ++j) {
            psi(j * n + j) = coeffs_[static_cast<std::size_t>(j)];
        }
        return psi;
    }

    /// Bob's marginal: diag(lambda_j^2).
    [[nodiscard]] ComplexMatrix reduced_density() const {
        RealVector d(static_cast<Eigen::Index>(rank()));
        for (std::size_t j = 0; j < rank(); ++j) {
            d(static_cast<Eigen::Index>(j)) = coeffs_[j] * coeffs_[j];
        }
        return d.cast<Complex>().asDiagonal();
    }

  private:
    explicit EntangledState(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

    std::vector<double> coeffs_;
};

/// H_E = -sum_j lambda_j^2 log2 lambda_j^2, in bits.
inline double entanglement_entropy(const EntangledState &s) { return shannon_entropy(s.squared()); }

/// Two-outcome local operation on Bob's side. k1 is the success branch.
struct LocalFilter {
    ComplexMatrix k1;
    ComplexMatrix k2;
    double success_prob = 0.0;

    /// max |K1^dag K1 + K2^dag K2 - I|.
    [[nodiscard]] double completeness_defect() const {
        const auto n = k1.cols();
        return (k1.adjoint() * k1 + k2.adjoint() * k2 - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    }
};

/// <Phi| (I (x) K^dag K) |Phi> for a Bob-side operator K.
inline double branch_probability(const EntangledState &s, const ComplexMatrix &k) {
    const ComplexMatrix kk = k.adjoint() * k;
    double p = 0.0;
    for (std::size_t j = 0; j < s.rank(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        p += s.coefficients()[j] * s.coefficients()[j] * kk(jj, jj).real();
    }
    return p;
}

/// Schmidt form of (I (x) K)|Phi>, renormalized. Throws if the branch has zero weight.
inline EntangledState filtered_state(const EntangledState &s, const ComplexMatrix &k) {
    const auto n = static_cast<Eigen::Index>(s.rank());
    if (k.rows() != n || k.cols() != n) {
        throw DomainError("filtered_state: operator dimension does not match the Schmidt rank");
    }
    // As an operator a -> b the state is diag(lambda); the filter acts on the b side.
    RealVector lambda(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        lambda(j) = s.coefficients()[static_cast<std::size_t>(j)];
    }
    const ComplexMatrix m = k * lambda.cast<Complex>().asDiagonal();
    const RealVector sv = singular_values(m);
    if (sv.size() == 0 || sv(0) == 0.0) {
        throw DomainError("filtered_state: branch has zero probability");
    }
    std::vector<double> raw;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        raw.push_back(sv(i) > 1e-14 * sv(0) ? sv(i) : 0.0);
    }
    return EntangledState::from_coefficients(std::move(raw));
}

/// Procrustean concentration: K1 = sum_j (lambda_min / lambda_j) |b^j><b^j|.
/// On success (probability rank * lambda_min^2) the state becomes uniform.
inline LocalFilter concentration_filter(const EntangledState &s) {
    if (s.rank() < 2) {
        throw DomainError("concentration_filter: Schmidt rank 1, nothing to concentrate");
    }
    const auto n = static_cast<Eigen::Index>(s.rank());
    RealVector k1(n);
    RealVector k2(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double ratio = s.smallest() / s.coefficients()[static_cast<std::size_t>(j)];
        k1(j) = ratio;
        k2(j) = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
    }
    LocalFilter f;
    f.k1 = k1.cast<Complex>().asDiagonal();
    f.k2 = k2.cast<Complex>().asDiagonal();
    f.success_prob = branch_probability(s, f.k1);
    return f;
}

/// Projects out the smallest Schmidt component.
inline LocalFilter truncation_filter(const EntangledState &s) {
    if (s.rank() < 2) {
        throw DomainError("truncation_filter: Schmidt rank 1, nothing to truncate");
    }
    const auto n = static_cast<Eigen::Index>(s.rank());
    LocalFilter f;
    f.k1 = ComplexMatrix::Identity(n, n);
    f.k1(n - 1, n - 1) = 0.0;
    f.k2 = ComplexMatrix::Zero(n, n);
    f.k2(n - 1, n - 1) = 1.0;
    f.success_prob = branch_probability(s, f.k1);
    return f;
}

} // namespace densecode

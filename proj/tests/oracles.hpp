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


// Reference routines for tests. Deliberately naive and independent of the
// Eigen decompositions the library uses.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "densecode/tensor_core.hpp"

namespace oracle {

using densecode::Complex;
using densecode::ComplexMatrix;

/// Eigenvalues (ascending) of a Hermitian matrix: cyclic Jacobi on the real
/// symmetric embedding [[Re, -Im], [Im, Re]], whose spectrum is each eigenvalue twice.
inline std::vector<double> jacobi_eigenvalues(const ComplexMatrix &h, int sweeps = 100) {
    const auto n = h.rows();
    const auto m = 2 * n;
    Eigen::MatrixXd a(m, m);
    a << h.real(), -h.imag(), h.imag(), h.real();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < m; ++p) {
            for (Eigen::Index q = p + 1; q < m; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (Eigen::Index p = 0; p < m; ++p) {
            for (Eigen::Index q = p + 1; q < m; ++q) {
                if (std::abs(a(p, q)) < 1e-300) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> all(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        all[static_cast<std::size_t>(i)] = a(i, i);
    }
    std::sort(all.begin(), all.end());
    std::vector<double> ev;
    for (std::size_t i = 0; i < all.size(); i += 2) {
        ev.push_back(0.5 * (all[i] + all[i + 1]));
    }
    return ev;
}

/// Singular values (descending) as square roots of the Jacobi spectrum of A^dag A.
inline std::vector<double> singular_values(const ComplexMatrix &a) {
    auto ev = jacobi_eigenvalues(a.adjoint() * a);
    std::vector<double> sv;
    for (auto it = ev.rbegin(); it != ev.rend(); ++it) {
        sv.push_back(std::sqrt(std::max(0.0, *it)));
    }
    return sv;
}

/// Gauss-Jordan inverse with partial pivoting.
inline ComplexMatrix inverse(ComplexMatrix a) {
    const auto n = a.rows();
    ComplexMatrix inv = ComplexMatrix::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) {
                piv = r;
            }
        }
        if (std::abs(a(piv, col)) < 1e-14) {
            throw std::runtime_error("oracle::inverse: singular");
        }
        a.row(col).swap(a.row(piv));
        inv.row(col).swap(inv.row(piv));
        const Complex d = a(col, col);
        a.row(col) /= d;
        inv.row(col) /= d;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r != col) {
                const Complex f = a(r, col);
                a.row(r) -= f * a.row(col);
                inv.row(r) -= f * inv.row(col);
            }
        }
    }
    return inv;
}

/// Index-loop partial trace; keep_first selects the surviving factor.
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, int d1, int d2, bool keep_first) {
    const int keep = keep_first ? d1 : d2;
    ComplexMatrix out = ComplexMatrix::Zero(keep, keep);
    for (int i = 0; i < keep; ++i) {
        for (int j = 0; j < keep; ++j) {
            const int other = keep_first ? d2 : d1;
            for (int k = 0; k < other; ++k) {
                const int r = keep_first ? i * d2 + k : k * d2 + i;
                const int c = keep_first ? j * d2 + k : k * d2 + j;
                out(i, j) += rho(r, c);
            }
        }
    }
    return out;
}

/// Rank by Gaussian elimination with complete pivoting; pivots below
/// rel * (largest entry) count as zero.
inline int rank(ComplexMatrix a, double rel = 1e-10) {
    const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) {
        return 0;
    }
    int r = 0;
    for (Eigen::Index step = 0; step < std::min(a.rows(), a.cols()); ++step) {
        Eigen::Index pr = step;
        Eigen::Index pc = step;
        for (Eigen::Index i = step; i < a.rows(); ++i) {
            for (Eigen::Index j = step; j < a.cols(); ++j) {
                if (std::abs(a(i, j)) > std::abs(a(pr, pc))) {
                    pr = i;
                    pc = j;
                }
            }
        }
        if (std::abs(a(pr, pc)) <= rel * scale) {
            break;
        }
        a.row(step).swap(a.row(pr));
        a.col(step).swap(a.col(pc));
        for (Eigen::Index i = step + 1; i < a.rows(); ++i) {
            a.row(i) -= (a(i, step) / a(step, step)) * a.row(step);
        }
        ++r;
    }
    return r;
}

inline double entropy_bits(const std::vector<double> &p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) {
            h -= v * std::log2(v);
        }
    }
    return h;
}

} // namespace oracle

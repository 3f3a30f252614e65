// Copyright 2026 The qpoly Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense multipartite index arithmetic on raw Eigen expressions.
//
// Every routine here works on any complex square Eigen matrix (float or
// double scalar) together with a list of local dimensions. Subsystem ordering
// is big-endian: for dims (d0, d1, ..., dn-1) the flat index of the basis
// state |i0 i1 ... in-1> is
//
//     i0 * (d1 * ... * dn-1) + i1 * (d2 * ... * dn-1) + ... + in-1.
//
// The typed wrappers in qcore.hpp validate their inputs and forward here.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qpoly::linalg {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline std::size_t product(std::span<const int> dims) {
    std::size_t p = 1;
    for (int d : dims) p *= static_cast<std::size_t>(d);
    return p;
}

/// Row-major strides for big-endian subsystem ordering.
inline std::vector<std::size_t> strides(std::span<const int> dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) s[k - 1] = s[k] * static_cast<std::size_t>(dims[k]);
    return s;
}

/// Splits a flat index into its per-subsystem digits.
inline void unflatten(std::size_t index, std::span<const int> dims, std::span<std::size_t> digits) {
    for (std::size_t k = dims.size(); k-- > 0;) {
        const auto d = static_cast<std::size_t>(dims[k]);
        digits[k] = index % d;
        index /= d;
    }
}

/// Permutation that reorders a state vector so that the subsystems listed in
/// `front` become the most significant factors (in the listed order), followed
/// by the remaining subsystems in their original order. Entry `i` of the result
/// is the original flat index that lands at permuted position `i`.
inline std::vector<std::size_t> grouping_permutation(std::span<const int> dims, std::span<const int> front) {
    const std::size_t n = dims.size();
    std::vector<int> order(front.begin(), front.end());
    for (std::size_t k = 0; k < n; ++k)
        if (std::find(front.begin(), front.end(), static_cast<int>(k)) == front.end()) order.push_back(static_cast<int>(k));

    std::vector<int> new_dims(n);
    for (std::size_t k = 0; k < n; ++k) new_dims[k] = dims[static_cast<std::size_t>(order[k])];

    const auto old_strides = strides(dims);
    const std::size_t total = product(dims);
    std::vector<std::size_t> perm(total);
    std::vector<std::size_t> digits(n);
    for (std::size_t i = 0; i < total; ++i) {
        unflatten(i, new_dims, digits);
        std::size_t src = 0;
        for (std::size_t k = 0; k < n; ++k) src += digits[k] * old_strides[static_cast<std::size_t>(order[k])];
        perm[i] = src;
    }
    return perm;
}

/// Reduced operator on the subsystems in `keep` (sorted ascending, nonempty).
template <typename Derived>
MatrixX<typename Derived::Scalar> partial_trace(const Eigen::MatrixBase<Derived>& rho, std::span<const int> dims,
                                                std::span<const int> keep) {
    using Scalar = typename Derived::Scalar;
    const std::size_t n = dims.size();
    std::vector<int> traced;
    for (std::size_t k = 0; k < n; ++k)
        if (std::find(keep.begin(), keep.end(), static_cast<int>(k)) == keep.end()) traced.push_back(static_cast<int>(k));

    std::vector<int> keep_dims, traced_dims;
    for (int k : keep) keep_dims.push_back(dims[static_cast<std::size_t>(k)]);
    for (int k : traced) traced_dims.push_back(dims[static_cast<std::size_t>(k)]);
    const std::size_t dk = product(keep_dims);
    const std::size_t dt = product(traced_dims);

    // perm maps (kept digits, traced digits) to the original flat index.
    std::vector<int> front(keep.begin(), keep.end());
    const auto perm = grouping_permutation(dims, front);

    MatrixX<Scalar> out = MatrixX<Scalar>::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t r = 0; r < dk; ++r)
        for (std::size_t c = 0; c < dk; ++c) {
            Scalar acc(0);
            for (std::size_t t = 0; t < dt; ++t)
                acc += rho(static_cast<Eigen::Index>(perm[r * dt + t]), static_cast<Eigen::Index>(perm[c * dt + t]));
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
        }
    return out;
}

/// Transposes the listed subsystems of `rho` in place of their indices.
template <typename Derived>
MatrixX<typename Derived::Scalar> partial_transpose(const Eigen::MatrixBase<Derived>& rho, std::span<const int> dims,
                                                    std::span<const int> parts) {
    using Scalar = typename Derived::Scalar;
    const std::size_t n = dims.size();
    const std::size_t total = product(dims);
    const auto st = strides(dims);
    MatrixX<Scalar> out(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    std::vector<std::size_t> rd(n), cd(n);
    for (std::size_t r = 0; r < total; ++r) {
        unflatten(r, dims, rd);
        for (std::size_t c = 0; c < total; ++c) {
            unflatten(c, dims, cd);
            std::size_t r2 = 0, c2 = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const bool swap = std::find(parts.begin(), parts.end(), static_cast<int>(k)) != parts.end();
                r2 += (swap ? cd[k] : rd[k]) * st[k];
                c2 += (swap ? rd[k] : cd[k]) * st[k];
            }
            out(static_cast<Eigen::Index>(r2), static_cast<Eigen::Index>(c2)) =
                rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real trace_norm(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(a.eval(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

/// Positive square root of a Hermitian matrix. Eigenvalues in
/// [-clamp, 0) are treated as zero; anything more negative throws.
template <typename Derived>
MatrixX<typename Derived::Scalar> sqrt_psd(const Eigen::MatrixBase<Derived>& a,
                                           typename Eigen::NumTraits<typename Derived::Scalar>::Real clamp) {
    using Scalar = typename Derived::Scalar;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(a.eval());
    auto ev = es.eigenvalues().eval();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -clamp) throw std::domain_error("sqrt_psd: matrix has a significantly negative eigenvalue");
        ev(i) = ev(i) < 0 ? 0 : std::sqrt(ev(i));
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// |A| = (A^dagger A)^(1/2) for Hermitian A, computed from one eigensolve.
template <typename Derived>
MatrixX<typename Derived::Scalar> abs_hermitian(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(a.eval());
    return es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() * es.eigenvectors().adjoint();
}

/// Largest entrywise deviation from Hermiticity.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<typename Eigen::NumTraits<typename Derived::Scalar>::Real>::infinity();
    if (a.size() == 0) return 0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace qpoly::linalg

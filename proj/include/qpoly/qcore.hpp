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

// Quantum-state value types for small multipartite Hilbert spaces.
//
// States carry their subsystem dimensions explicitly; all matrices are dense
// and use big-endian subsystem ordering (see linalg.hpp). Value types validate
// on construction and are immutable afterwards.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qpoly {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numeric policy shared by every module. Defaults are the library-wide
/// values; callers may pass a modified copy.
struct Tolerances {
    double ket_norm = 1e-12;
    double hermitian = 1e-12;
    double trace = 1e-12;
    double eig_clamp = 1e-10;        // eigenvalues in [-eig_clamp, 0) are clamped to zero
    double weight_sum = 1e-10;       // ensemble weights
    double reconstruction = 1e-9;    // ensemble mixture vs. target, trace norm
    double rank = 1e-12;             // eigenvalues above this count toward the rank
};

inline constexpr Tolerances kDefaultTolerances{};

class Dims {
public:
    Dims() = default;
    Dims(std::initializer_list<int> dims);
    explicit Dims(std::vector<int> dims);

    [[nodiscard]] std::size_t size() const { return dims_.size(); }
    [[nodiscard]] int operator[](std::size_t k) const { return dims_[k]; }
    [[nodiscard]] Eigen::Index total() const { return total_; }
    [[nodiscard]] std::span<const int> span() const { return dims_; }
    [[nodiscard]] const std::vector<int>& vec() const { return dims_; }
    /// Product of the listed subsystem dimensions.
    [[nodiscard]] Eigen::Index total_of(std::span<const int> parts) const;
    /// Dimensions of the listed subsystems, in the listed order.
    [[nodiscard]] Dims select(std::span<const int> parts) const;
    [[nodiscard]] Dims concat(const Dims& other) const;
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Dims&, const Dims&) = default;

private:
    std::vector<int> dims_;
    Eigen::Index total_ = 0;
};

class Ket {
public:
    Ket(Dims dims, Vector amplitudes, const Tolerances& tol = kDefaultTolerances);
    /// Normalizes `amplitudes`; throws if it is zero.
    static Ket normalized(Dims dims, Vector amplitudes);
    static Ket basis(Dims dims, Eigen::Index index);

    [[nodiscard]] const Dims& dims() const { return dims_; }
    [[nodiscard]] const Vector& amplitudes() const { return amp_; }
    [[nodiscard]] Matrix projector() const { return amp_ * amp_.adjoint(); }

private:
    Dims dims_;
    Vector amp_;
};

class HermitianOp {
public:
    HermitianOp(Dims dims, Matrix matrix, const Tolerances& tol = kDefaultTolerances);

    [[nodiscard]] const Dims& dims() const { return dims_; }
    [[nodiscard]] const Matrix& matrix() const { return mat_; }

private:
    Dims dims_;
    Matrix mat_;
};

class DensityOp {
public:
    DensityOp(Dims dims, Matrix matrix, const Tolerances& tol = kDefaultTolerances);
    explicit DensityOp(const Ket& ket);

    [[nodiscard]] const Dims& dims() const { return dims_; }
    [[nodiscard]] const Matrix& matrix() const { return mat_; }
    [[nodiscard]] HermitianOp as_hermitian() const { return {dims_, mat_}; }
    /// Eigenvalues in ascending order, clamped at zero.
    [[nodiscard]] RealVector spectrum() const;
    [[nodiscard]] int rank(double tol = kDefaultTolerances.rank) const;
    [[nodiscard]] double purity() const;

private:
    Dims dims_;
    Matrix mat_;
};

struct EnsembleMember {
    double weight;
    Ket state;
};

/// Realization of a mixed state as a probability mixture of pure states.
class Ensemble {
public:
    Ensemble() = default;
    explicit Ensemble(std::vector<EnsembleMember> members, const Tolerances& tol = kDefaultTolerances);

    [[nodiscard]] const std::vector<EnsembleMember>& members() const { return members_; }
    [[nodiscard]] std::size_t size() const { return members_.size(); }
    [[nodiscard]] bool empty() const { return members_.empty(); }
    /// sum_i p_i |psi_i><psi_i|
    [[nodiscard]] Matrix mixture() const;
    /// Trace-norm distance between the mixture and `target`.
    [[nodiscard]] double residual(const DensityOp& target) const;

private:
    std::vector<EnsembleMember> members_;
};

/// Seed for every stochastic routine. Equal seeds give identical streams.
struct RngSeed {
    std::uint64_t value = 0;

    /// Independent sub-stream seed for work item `index`.
    [[nodiscard]] RngSeed derive(std::uint64_t index) const;
    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

using Rng = std::mt19937_64;
inline Rng make_rng(RngSeed seed) { return Rng(seed.value); }

/// Reduced state on `keep` (any order; the result follows ascending order).
DensityOp partial_trace(const DensityOp& rho, std::vector<int> keep);
HermitianOp partial_transpose(const DensityOp& rho, int part);
HermitianOp partial_transpose(const HermitianOp& a, std::span<const int> parts);
/// Purification on dims ++ (rank); tracing out the last subsystem returns rho.
Ket purify(const DensityOp& rho, const Tolerances& tol = kDefaultTolerances);

Ket haar_ket(const Dims& dims, Rng& rng);
Ket haar_ket(const Dims& dims, RngSeed seed);
/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
Matrix haar_unitary(Eigen::Index n, Rng& rng);

double trace_norm(const HermitianOp& a);
HermitianOp matrix_sqrt(const HermitianOp& a, const Tolerances& tol = kDefaultTolerances);

Matrix kron(const Matrix& a, const Matrix& b);
DensityOp tensor(const DensityOp& a, const DensityOp& b);
Ket tensor(const Ket& a, const Ket& b);

}  // namespace qpoly

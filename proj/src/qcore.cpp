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

#include "qpoly/qcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpoly/linalg.hpp"

namespace qpoly {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void check_square(const Dims& dims, const Matrix& m, const char* what) {
    if (m.rows() != dims.total() || m.cols() != dims.total())
        throw std::invalid_argument(std::string(what) + ": matrix side does not match dims " + dims.to_string());
}

}  // namespace

// ---------------------------------------------------------------------------
// Dims

Dims::Dims(std::initializer_list<int> dims) : Dims(std::vector<int>(dims)) {}

Dims::Dims(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("Dims: at least one subsystem required");
    total_ = 1;
    for (int d : dims_) {
        if (d < 1) throw std::invalid_argument("Dims: local dimensions must be positive");
        total_ *= d;
    }
}

Eigen::Index Dims::total_of(std::span<const int> parts) const {
    Eigen::Index t = 1;
    for (int k : parts) {
        if (k < 0 || static_cast<std::size_t>(k) >= dims_.size()) throw std::out_of_range("Dims: subsystem index out of range");
        t *= dims_[static_cast<std::size_t>(k)];
    }
    return t;
}

Dims Dims::select(std::span<const int> parts) const {
    std::vector<int> out;
    for (int k : parts) {
        if (k < 0 || static_cast<std::size_t>(k) >= dims_.size()) throw std::out_of_range("Dims: subsystem index out of range");
        out.push_back(dims_[static_cast<std::size_t>(k)]);
    }
    return Dims(std::move(out));
}

Dims Dims::concat(const Dims& other) const {
    std::vector<int> out = dims_;
    out.insert(out.end(), other.dims_.begin(), other.dims_.end());
    return Dims(std::move(out));
}

std::string Dims::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "," : "") << dims_[k];
    os << ')';
    return os.str();
}

// ---------------------------------------------------------------------------
// Ket / HermitianOp / DensityOp

Ket::Ket(Dims dims, Vector amplitudes, const Tolerances& tol) : dims_(std::move(dims)), amp_(std::move(amplitudes)) {
    if (amp_.size() != dims_.total()) throw std::invalid_argument("Ket: amplitude count does not match dims " + dims_.to_string());
    if (std::abs(amp_.norm() - 1.0) > tol.ket_norm) throw std::invalid_argument("Ket: amplitudes are not normalized");
}

Ket Ket::normalized(Dims dims, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0)) throw std::invalid_argument("Ket: cannot normalize a zero vector");
    amplitudes /= n;
    return Ket(std::move(dims), std::move(amplitudes));
}

Ket Ket::basis(Dims dims, Eigen::Index index) {
    if (index < 0 || index >= dims.total()) throw std::out_of_range("Ket::basis: index out of range");
    Vector v = Vector::Zero(dims.total());
    v(index) = 1.0;
    return Ket(std::move(dims), std::move(v));
}

HermitianOp::HermitianOp(Dims dims, Matrix matrix, const Tolerances& tol) : dims_(std::move(dims)), mat_(std::move(matrix)) {
    check_square(dims_, mat_, "HermitianOp");
    if (linalg::hermiticity_defect(mat_) > tol.hermitian) throw std::invalid_argument("HermitianOp: matrix is not Hermitian");
    mat_ = (0.5 * (mat_ + mat_.adjoint())).eval();
}

DensityOp::DensityOp(Dims dims, Matrix matrix, const Tolerances& tol) : dims_(std::move(dims)), mat_(std::move(matrix)) {
    check_square(dims_, mat_, "DensityOp");
    if (linalg::hermiticity_defect(mat_) > tol.hermitian) throw std::invalid_argument("DensityOp: matrix is not Hermitian");
    mat_ = (0.5 * (mat_ + mat_.adjoint())).eval();
    if (std::abs(mat_.trace().real() - 1.0) > tol.trace) throw std::invalid_argument("DensityOp: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.eig_clamp) throw std::invalid_argument("DensityOp: matrix is not positive semidefinite");
}

DensityOp::DensityOp(const Ket& ket) : dims_(ket.dims()), mat_(ket.projector()) {}

RealVector DensityOp::spectrum() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMax(0.0);
}

int DensityOp::rank(double tol) const {
    const RealVector ev = spectrum();
    return static_cast<int>((ev.array() > tol).count());
}

double DensityOp::purity() const { return (mat_ * mat_).trace().real(); }

// ---------------------------------------------------------------------------
// Ensemble

Ensemble::Ensemble(std::vector<EnsembleMember> members, const Tolerances& tol) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("Ensemble: no members");
    double total = 0;
    for (const auto& m : members_) {
        if (!(m.weight > 0) || m.weight > 1 + tol.weight_sum) throw std::invalid_argument("Ensemble: weight outside (0, 1]");
        if (!(m.state.dims() == members_.front().state.dims())) throw std::invalid_argument("Ensemble: members have different dims");
        total += m.weight;
    }
    if (std::abs(total - 1.0) > tol.weight_sum) throw std::invalid_argument("Ensemble: weights do not sum to 1");
}

Matrix Ensemble::mixture() const {
    if (members_.empty()) return {};
    const auto n = members_.front().state.dims().total();
    Matrix out = Matrix::Zero(n, n);
    for (const auto& m : members_) out.noalias() += m.weight * m.state.projector();
    return out;
}

double Ensemble::residual(const DensityOp& target) const {
    if (members_.empty() || !(members_.front().state.dims() == target.dims()))
        throw std::invalid_argument("Ensemble::residual: dims mismatch");
    return linalg::trace_norm(mixture() - target.matrix());
}

// ---------------------------------------------------------------------------
// RNG

RngSeed RngSeed::derive(std::uint64_t index) const { return RngSeed{splitmix64(value ^ splitmix64(index + 0x632be59bd9b4e019ULL))}; }

// ---------------------------------------------------------------------------
// Operations

DensityOp partial_trace(const DensityOp& rho, std::vector<int> keep) {
    const auto n = static_cast<int>(rho.dims().size());
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int k : keep)
        if (k < 0 || k >= n) throw std::out_of_range("partial_trace: subsystem index out of range");
    if (keep.empty() || static_cast<int>(keep.size()) == n)
        throw std::invalid_argument("partial_trace: keep must be a nonempty proper subset of the subsystems");
    Matrix reduced = linalg::partial_trace(rho.matrix(), rho.dims().span(), keep);
    return DensityOp(rho.dims().select(keep), std::move(reduced));
}

HermitianOp partial_transpose(const DensityOp& rho, int part) {
    const std::array<int, 1> parts{part};
    return partial_transpose(rho.as_hermitian(), parts);
}

HermitianOp partial_transpose(const HermitianOp& a, std::span<const int> parts) {
    for (int k : parts)
        if (k < 0 || static_cast<std::size_t>(k) >= a.dims().size()) throw std::out_of_range("partial_transpose: subsystem index out of range");
    return HermitianOp(a.dims(), linalg::partial_transpose(a.matrix(), a.dims().span(), parts));
}

Ket purify(const DensityOp& rho, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    const RealVector& ev = es.eigenvalues();
    if (ev.minCoeff() < -tol.eig_clamp) throw std::invalid_argument("purify: input is not positive semidefinite");
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = ev.size(); i-- > 0;)
        if (ev(i) > tol.rank) support.push_back(i);
    const auto r = static_cast<Eigen::Index>(support.size());
    if (r == 0) throw std::invalid_argument("purify: zero operator");

    const Eigen::Index n = rho.dims().total();
    Vector amp = Vector::Zero(n * r);
    // |psi> = sum_j sqrt(lambda_j) |e_j> (x) |j>, ancilla least significant.
    for (Eigen::Index j = 0; j < r; ++j) {
        const double w = std::sqrt(ev(support[static_cast<std::size_t>(j)]));
        const auto col = es.eigenvectors().col(support[static_cast<std::size_t>(j)]);
        for (Eigen::Index i = 0; i < n; ++i) amp(i * r + j) = w * col(i);
    }
    return Ket::normalized(rho.dims().concat(Dims{static_cast<int>(r)}), std::move(amp));
}

Ket haar_ket(const Dims& dims, Rng& rng) {
    std::normal_distribution<double> gauss;
    Vector v(dims.total());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v(i) = Complex(re, im);
    }
    return Ket::normalized(dims, std::move(v));
}

Ket haar_ket(const Dims& dims, RngSeed seed) {
    Rng rng = make_rng(seed);
    return haar_ket(dims, rng);
}

Matrix haar_unitary(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> gauss;
    Matrix z(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity of QR so the distribution is exactly Haar.
    for (Eigen::Index j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        const double a = std::abs(d);
        if (a > 0) q.col(j) *= d / a;
    }
    return q;
}

double trace_norm(const HermitianOp& a) { return linalg::trace_norm(a.matrix()); }

HermitianOp matrix_sqrt(const HermitianOp& a, const Tolerances& tol) {
    return HermitianOp(a.dims(), linalg::sqrt_psd(a.matrix(), tol.eig_clamp));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

DensityOp tensor(const DensityOp& a, const DensityOp& b) { return DensityOp(a.dims().concat(b.dims()), kron(a.matrix(), b.matrix())); }

Ket tensor(const Ket& a, const Ket& b) {
    Vector v(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
        v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
    return Ket::normalized(a.dims().concat(b.dims()), std::move(v));
}

}  // namespace qpoly

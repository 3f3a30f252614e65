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

#include <cmath>
#include <random>

#include "doctest.h"
#include "qpoly/qcore.hpp"
#include "qpoly/states.hpp"

using namespace qpoly;

namespace {

// Reference partial trace by explicit index loops over a multi-index.
Matrix loop_partial_trace(const Matrix& rho, const std::vector<int>& dims, const std::vector<int>& keep) {
    const int n = static_cast<int>(dims.size());
    std::vector<bool> kept(n, false);
    for (int k : keep) kept[k] = true;
    int dk = 1, total = 1;
    for (int p = 0; p < n; ++p) {
        total *= dims[p];
        if (kept[p]) dk *= dims[p];
    }
    auto digits = [&](int idx) {
        std::vector<int> d(n);
        for (int p = n - 1; p >= 0; --p) {
            d[p] = idx % dims[p];
            idx /= dims[p];
        }
        return d;
    };
    auto kept_index = [&](const std::vector<int>& d) {
        int r = 0;
        for (int p = 0; p < n; ++p)
            if (kept[p]) r = r * dims[p] + d[p];
        return r;
    };
    Matrix out = Matrix::Zero(dk, dk);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j) {
            const auto di = digits(i), dj = digits(j);
            bool traced_equal = true;
            for (int p = 0; p < n; ++p)
                if (!kept[p] && di[p] != dj[p]) traced_equal = false;
            if (traced_equal) out(kept_index(di), kept_index(dj)) += rho(i, j);
        }
    return out;
}

// Reference partial transpose on one subsystem by index loops.
Matrix loop_partial_transpose(const Matrix& rho, const std::vector<int>& dims, int part) {
    const int n = static_cast<int>(dims.size());
    const int total = static_cast<int>(rho.rows());
    auto digits = [&](int idx) {
        std::vector<int> d(n);
        for (int p = n - 1; p >= 0; --p) {
            d[p] = idx % dims[p];
            idx /= dims[p];
        }
        return d;
    };
    auto index = [&](const std::vector<int>& d) {
        int r = 0;
        for (int p = 0; p < n; ++p) r = r * dims[p] + d[p];
        return r;
    };
    Matrix out(total, total);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j) {
            auto di = digits(i), dj = digits(j);
            std::swap(di[part], dj[part]);
            out(index(di), index(dj)) = rho(i, j);
        }
    return out;
}

}  // namespace

TEST_CASE("Dims validates entries") {
    CHECK(Dims{2, 3, 4}.total() == 24);
    CHECK_THROWS_AS(Dims({2, 0}), std::invalid_argument);
    CHECK(Dims{2, 3}.to_string() == "(2,3)");
}

TEST_CASE("Ket rejects unnormalized amplitudes") {
    Vector v = Vector::Zero(2);
    v(0) = 1.0;
    v(1) = 1e-3;
    CHECK_THROWS_AS(Ket(Dims{2}, v), std::invalid_argument);
    CHECK_NOTHROW(Ket::normalized(Dims{2}, v));
    CHECK_THROWS_AS(Ket(Dims{3}, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("DensityOp validation") {
    Matrix m = Matrix::Identity(2, 2) / 2.0;
    CHECK_NOTHROW(DensityOp(Dims{2}, m));
    Matrix bad_trace = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityOp(Dims{2}, bad_trace), std::invalid_argument);
    Matrix non_herm = m;
    non_herm(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityOp(Dims{2}, non_herm), std::invalid_argument);
    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.2;
    negative(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityOp(Dims{2}, negative), std::invalid_argument);
}

TEST_CASE("partial trace matches index-loop reference") {
    const std::vector<int> dims = {2, 3, 2};
    const DensityOp rho = sample_density(Dims(dims), 3, RngSeed{11});
    for (const std::vector<int>& keep : {std::vector<int>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
        const DensityOp r = partial_trace(rho, keep);
        CHECK((r.matrix() - loop_partial_trace(rho.matrix(), dims, keep)).norm() < 1e-13);
        CHECK(std::abs(r.matrix().trace() - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {0, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {3}), std::out_of_range);
}

TEST_CASE("partial trace of a product returns the factor") {
    const Ket a = haar_ket(Dims{2}, RngSeed{1});
    const Ket b = haar_ket(Dims{3}, RngSeed{2});
    const DensityOp rho(tensor(a, b));
    CHECK((partial_trace(rho, {0}).matrix() - DensityOp(a).matrix()).norm() < 1e-13);
    CHECK((partial_trace(rho, {1}).matrix() - DensityOp(b).matrix()).norm() < 1e-13);
}

TEST_CASE("partial transpose matches index-loop reference") {
    const std::vector<int> dims = {2, 3};
    const DensityOp rho = sample_density(Dims(dims), 4, RngSeed{5});
    for (int part : {0, 1})
        CHECK((partial_transpose(rho, part).matrix() - loop_partial_transpose(rho.matrix(), dims, part)).norm() < 1e-14);
}

TEST_CASE("Bell partial transpose has eigenvalue -1/2") {
    const HermitianOp pt = partial_transpose(DensityOp(bell_ket()), 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt.matrix());
    CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(trace_norm(pt) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("purification traces back to the state") {
    for (int r = 1; r <= 4; ++r) {
        const DensityOp rho = sample_density(Dims{2, 2}, r, RngSeed{static_cast<std::uint64_t>(r)});
        const Ket psi = purify(rho);
        CHECK(psi.dims().size() == 3);
        CHECK(psi.dims()[2] == rho.rank());
        CHECK((partial_trace(DensityOp(psi), {0, 1}).matrix() - rho.matrix()).norm() < 1e-12);
    }
}

TEST_CASE("Haar sampling is deterministic per seed") {
    const Ket a = haar_ket(Dims{2, 3}, RngSeed{42});
    const Ket b = haar_ket(Dims{2, 3}, RngSeed{42});
    const Ket c = haar_ket(Dims{2, 3}, RngSeed{43});
    CHECK(a.amplitudes() == b.amplitudes());
    CHECK((a.amplitudes() - c.amplitudes()).norm() > 1e-3);
    CHECK(RngSeed{7}.derive(0) == RngSeed{7}.derive(0));
    CHECK(!(RngSeed{7}.derive(0) == RngSeed{7}.derive(1)));
}

TEST_CASE("Haar mean reduced purity matches the eigenvalue-density integral") {
    // Reduced spectrum (l, 1-l) of a Haar 2x2 ket has density proportional to
    // (2l - 1)^2 on [0, 1]; integrate the purity against it with Simpson's rule.
    const int n = 2000;
    double num = 0, den = 0;
    for (int i = 0; i <= n; ++i) {
        const double l = static_cast<double>(i) / n;
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        const double dens = (2 * l - 1) * (2 * l - 1);
        num += w * dens * (l * l + (1 - l) * (1 - l));
        den += w * dens;
    }
    const double oracle = num / den;

    Rng rng = make_rng(RngSeed{2024});
    const int samples = 20000;
    double mean = 0;
    for (int i = 0; i < samples; ++i) mean += partial_trace(DensityOp(haar_ket(Dims{2, 2}, rng)), {0}).purity();
    mean /= samples;
    CHECK(oracle == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(std::abs(mean - oracle) < 5e-3);
}

TEST_CASE("Haar unitary is unitary") {
    Rng rng = make_rng(RngSeed{3});
    for (int n : {1, 2, 5}) {
        const Matrix u = haar_unitary(n, rng);
        CHECK((u.adjoint() * u - Matrix::Identity(n, n)).norm() < 1e-12);
    }
}

TEST_CASE("Ensemble validates weights and reproduces its mixture") {
    const Ket z = Ket::basis(Dims{2}, 0), o = Ket::basis(Dims{2}, 1);
    const Ensemble e({{0.25, z}, {0.75, o}});
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 0.25;
    expect(1, 1) = 0.75;
    CHECK((e.mixture() - expect).norm() < 1e-15);
    CHECK_THROWS_AS(Ensemble({{0.5, z}, {0.6, o}}), std::invalid_argument);
    CHECK_THROWS_AS(Ensemble({{-0.1, z}, {1.1, o}}), std::invalid_argument);
}

TEST_CASE("matrix square root squares back") {
    const DensityOp rho = sample_density(Dims{3}, 3, RngSeed{9});
    const HermitianOp s = matrix_sqrt(rho.as_hermitian());
    CHECK((s.matrix() * s.matrix() - rho.matrix()).norm() < 1e-12);
}

TEST_CASE("tensor concatenates dims and matches kron") {
    const DensityOp a = sample_density(Dims{2}, 2, RngSeed{1});
    const DensityOp b = sample_density(Dims{3}, 2, RngSeed{2});
    const DensityOp ab = tensor(a, b);
    CHECK(ab.dims().total() == 6);
    CHECK((ab.matrix() - kron(a.matrix(), b.matrix())).norm() < 1e-15);
}

TEST_CASE("partial trace chains and preserves positivity") {
    const DensityOp rho = sample_density(Dims{2, 3, 2}, 5, RngSeed{17});
    const DensityOp step = partial_trace(partial_trace(rho, {0, 1}), {0});
    const DensityOp direct = partial_trace(rho, {0});
    CHECK((step.matrix() - direct.matrix()).norm() < 1e-12);
    for (const std::vector<int>& keep : {std::vector<int>{0}, {1, 2}, {0, 2}}) {
        const DensityOp r = partial_trace(rho, keep);
        Eigen::SelfAdjointEigenSolver<Matrix> es(r.matrix());
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("purification round trip for every rank") {
    for (int r = 1; r <= 6; ++r) {
        const DensityOp rho = sample_density(Dims{2, 3}, r, RngSeed{static_cast<std::uint64_t>(30 + r)});
        const DensityOp back = partial_trace(DensityOp(purify(rho)), {0, 1});
        CHECK(trace_norm(HermitianOp(Dims{2, 3}, back.matrix() - rho.matrix())) < 1e-10);
    }
}

TEST_CASE("trace norm is a norm") {
    Rng rng = make_rng(RngSeed{12});
    std::normal_distribution<double> n(0.0, 1.0);
    auto random_herm = [&] {
        Matrix g(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) g(i, j) = Complex(n(rng), n(rng));
        return HermitianOp(Dims{4}, (g + g.adjoint()) / 2.0);
    };
    for (int i = 0; i < 50; ++i) {
        const HermitianOp a = random_herm(), b = random_herm();
        const double c = n(rng);
        CHECK(trace_norm(HermitianOp(Dims{4}, a.matrix() + b.matrix())) <= trace_norm(a) + trace_norm(b) + 1e-10);
        CHECK(std::abs(trace_norm(HermitianOp(Dims{4}, c * a.matrix())) - std::abs(c) * trace_norm(a)) < 1e-10);
    }
}

TEST_CASE("matrix square root examples") {
    CHECK((matrix_sqrt(HermitianOp(Dims{2}, Matrix::Identity(2, 2))).matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 9;
    const Matrix s = matrix_sqrt(HermitianOp(Dims{2}, d)).matrix();
    CHECK(s(0, 0).real() == doctest::Approx(2.0));
    CHECK(s(1, 1).real() == doctest::Approx(3.0));
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1;
    neg(1, 1) = -1e-3;
    CHECK_THROWS(matrix_sqrt(HermitianOp(Dims{2}, neg)));
}

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
#include "qpoly/measures.hpp"
#include "qpoly/states.hpp"

using namespace qpoly;

namespace {

const Cut kAB = Cut::single(0, 2);

// Werner state p |Phi+><Phi+| + (1 - p) I/4.
DensityOp werner(double p) {
    const Matrix bell = DensityOp(bell_ket()).matrix();
    return DensityOp(Dims{2, 2}, p * bell + (1 - p) * Matrix::Identity(4, 4) / 4.0);
}

// Reduced density of the left subsystem by explicit summation.
Matrix left_reduced(const Ket& psi, int dl, int dr) {
    Matrix r = Matrix::Zero(dl, dl);
    for (int i = 0; i < dl; ++i)
        for (int j = 0; j < dl; ++j)
            for (int k = 0; k < dr; ++k) r(i, j) += psi.amplitudes()(i * dr + k) * std::conj(psi.amplitudes()(j * dr + k));
    return r;
}

}  // namespace

TEST_CASE("MeasureId parses and prints") {
    for (const char* s : {"concurrence", "tangle", "negativity", "formation", "tsallis:2", "renyi:0.5"})
        CHECK(MeasureId::parse(s).to_string() == s);
    CHECK(MeasureId::parse("renyi:0.5") == MeasureId::renyi(0.5));
    CHECK_THROWS_AS(MeasureId::parse("tsallis:1"), std::invalid_argument);
    CHECK_THROWS_AS(MeasureId::parse("renyi:0"), std::invalid_argument);
    CHECK_THROWS_AS(MeasureId::parse("renyi:-2"), std::invalid_argument);
    CHECK_THROWS_AS(MeasureId::parse("tsallis:abc"), std::invalid_argument);
    CHECK_THROWS_AS(MeasureId::parse("entropy"), std::invalid_argument);
}

TEST_CASE("Cut parsing") {
    const Cut c = Cut::parse("A|BC", 3);
    CHECK(c.left == std::vector<int>{0});
    CHECK(c.right == std::vector<int>{1, 2});
    CHECK(Cut::parse("AC|B", 3).to_string() == "AC|B");
    CHECK_THROWS_AS(Cut::parse("A|A", 2), std::invalid_argument);
    CHECK_THROWS_AS(Cut::parse("AB|", 2), std::invalid_argument);
    CHECK_THROWS_AS(Cut::parse("A|B", 3), std::invalid_argument);
    CHECK_THROWS_AS(Cut::parse("A|D", 3), std::invalid_argument);
}

TEST_CASE("Bell state values") {
    const Ket b = bell_ket();
    CHECK(pure_measure(MeasureId::concurrence(), b, kAB) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pure_measure(MeasureId::tangle(), b, kAB) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pure_measure(MeasureId::negativity(), b, kAB) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pure_measure(MeasureId::formation(), b, kAB) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pure_measure(MeasureId::tsallis(2), b, kAB) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pure_measure(MeasureId::renyi(2), b, kAB) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("product states have zero entanglement") {
    const Ket p = tensor(haar_ket(Dims{2}, RngSeed{1}), haar_ket(Dims{3}, RngSeed{2}));
    for (const char* s : {"concurrence", "tangle", "negativity", "formation", "tsallis:1.5", "renyi:0.5"})
        CHECK(std::abs(pure_measure(MeasureId::parse(s), p, kAB)) < 1e-12);
}

TEST_CASE("concurrence agrees with the reduced-purity formula") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Ket psi = haar_ket(Dims{3, 4}, RngSeed{s});
        const Matrix ra = left_reduced(psi, 3, 4);
        const double purity = (ra * ra).trace().real();
        CHECK(pure_measure(MeasureId::concurrence(), psi, kAB) ==
              doctest::Approx(std::sqrt(2 * (1 - purity))).epsilon(1e-12));
        const RealVector sc = schmidt_coefficients(psi, kAB);
        CHECK(sc.size() == 3);
        CHECK(sc.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sc(0) >= sc(1));
        const double neg = (sc.sum() * sc.sum() - 1) / 2;
        const double pt = (trace_norm(partial_transpose(DensityOp(psi), 0)) - 1) / 2;
        CHECK(pure_measure(MeasureId::negativity(), psi, kAB) == doctest::Approx(neg).epsilon(1e-12));
        CHECK(neg == doctest::Approx(pt).epsilon(1e-10));
    }
}

TEST_CASE("Tsallis and Renyi limits at parameter 1") {
    // Tsallis uses the natural logarithm, formation log2.
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Ket psi = haar_ket(Dims{2, 3}, RngSeed{100 + s});
        const double ef = pure_measure(MeasureId::formation(), psi, kAB);
        CHECK(pure_measure(MeasureId::tsallis(1 + 1e-5), psi, kAB) == doctest::Approx(ef * std::log(2.0)).epsilon(1e-4));
        CHECK(pure_measure(MeasureId::tsallis(1 - 1e-5), psi, kAB) == doctest::Approx(ef * std::log(2.0)).epsilon(1e-4));
        CHECK(pure_measure(MeasureId::renyi(1 + 1e-5), psi, kAB) == doctest::Approx(ef).epsilon(1e-4));
    }
}

TEST_CASE("pure_measure_max is attained on the maximally entangled state") {
    for (int d : {2, 3}) {
        Vector v = Vector::Zero(d * d);
        for (int j = 0; j < d; ++j) v(j * d + j) = 1;
        const Ket phi = Ket::normalized(Dims{d, d}, v);
        for (const char* s : {"concurrence", "tangle", "negativity", "formation", "tsallis:2", "renyi:0.5"}) {
            const MeasureId m = MeasureId::parse(s);
            CHECK(pure_measure(m, phi, kAB) == doctest::Approx(pure_measure_max(m, d, d)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Wootters concurrence on pure states and Werner states") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Ket psi = haar_ket(Dims{2, 2}, RngSeed{s});
        CHECK(wootters_concurrence(DensityOp(psi)) ==
              doctest::Approx(pure_measure(MeasureId::concurrence(), psi, kAB)).epsilon(1e-9));
        CHECK(ca_closed_bound(DensityOp(psi)) ==
              doctest::Approx(pure_measure(MeasureId::concurrence(), psi, kAB)).epsilon(1e-9));
    }
    for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
        CHECK(wootters_concurrence(werner(p)) == doctest::Approx(std::max(0.0, (3 * p - 1) / 2)).epsilon(1e-9));
        // Bell-diagonal states are spin-flip invariant, so the fidelity is the trace.
        CHECK(ca_closed_bound(werner(p)) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("spin flip is an involution and the closed form dominates Wootters") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const DensityOp rho = sample_density(Dims{2, 2}, 1 + static_cast<int>(s % 4), RngSeed{s});
        CHECK((spin_flip(spin_flip(rho)).matrix() - rho.matrix()).norm() < 1e-13);
        CHECK(ca_closed_bound(rho) >= wootters_concurrence(rho) - 1e-12);
        CHECK(ca_closed_bound(rho) <= 1 + 1e-12);
    }
    CHECK_THROWS_AS(wootters_concurrence(sample_density(Dims{2, 3}, 2, RngSeed{1})), std::invalid_argument);
}

TEST_CASE("PPT classification") {
    const PptResult bell = ppt_check(DensityOp(bell_ket()), kAB);
    CHECK(!bell.is_ppt);
    CHECK(bell.min_eig == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(bell.separability == Separability::EntangledCertified);

    const DensityOp prod23 = tensor(sample_density(Dims{2}, 2, RngSeed{1}), sample_density(Dims{3}, 3, RngSeed{2}));
    CHECK(ppt_check(prod23, kAB).separability == Separability::SeparableCertified);

    // PPT at 3x3 does not certify separability.
    const DensityOp mixed33(Dims{3, 3}, Matrix::Identity(9, 9) / 9.0);
    const PptResult r = ppt_check(mixed33, kAB);
    CHECK(r.is_ppt);
    CHECK(r.separability == Separability::Inconclusive);

    CHECK(ppt_check(werner(0.3), kAB).separability == Separability::SeparableCertified);
    CHECK(ppt_check(werner(0.4), kAB).separability == Separability::EntangledCertified);
}

TEST_CASE("concurrence of assistance on Hermitian operators") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const DensityOp rho = sample_density(Dims{2, 2}, 2, RngSeed{s});
        CHECK(ca_of_hermitian(rho.as_hermitian()) == doctest::Approx(ca_closed_bound(rho)).epsilon(1e-10));
        const HermitianOp neg(Dims{2, 2}, -2.5 * rho.matrix());
        CHECK(ca_of_hermitian(neg) == doctest::Approx(2.5 * ca_closed_bound(rho)).epsilon(1e-10));
    }
    CHECK(ca_of_hermitian(HermitianOp(Dims{2, 2}, Matrix::Zero(4, 4))) == 0.0);
}

TEST_CASE("pure measures are local-unitary invariant") {
    Rng rng = make_rng(RngSeed{33});
    for (int i = 0; i < 10; ++i) {
        const Ket psi = haar_ket(Dims{2, 3}, rng);
        const Matrix u = kron(haar_unitary(2, rng), haar_unitary(3, rng));
        const Ket moved(Dims{2, 3}, u * psi.amplitudes());
        for (const char* name : {"concurrence", "tangle", "negativity", "formation", "tsallis:0.5", "renyi:2"}) {
            const MeasureId m = MeasureId::parse(name);
            CHECK(std::abs(pure_measure(m, moved, kAB) - pure_measure(m, psi, kAB)) < 1e-10);
        }
    }
}

TEST_CASE("tangle is the squared concurrence and concurrence respects its range") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Ket psi = haar_ket(Dims{3, 3}, RngSeed{400 + s});
        const double c = pure_measure(MeasureId::concurrence(), psi, kAB);
        CHECK(pure_measure(MeasureId::tangle(), psi, kAB) == doctest::Approx(c * c).epsilon(1e-14));
        CHECK(c <= std::sqrt(2.0 * 2 / 3) + 1e-12);
    }
    // Schmidt rank 2 inside a 3x3 system.
    const Ket r2 = Ket::normalized(Dims{3, 3}, [] {
        Vector v = Vector::Zero(9);
        v(0) = 0.8;
        v(4) = 0.6;
        return v;
    }());
    CHECK(pure_measure(MeasureId::concurrence(), r2, kAB) <= 1 + 1e-12);
}

TEST_CASE("Tsallis near q = 1 tracks formation within 1e-3") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Ket psi = haar_ket(Dims{2, 2}, RngSeed{500 + s});
        const double target = pure_measure(MeasureId::formation(), psi, kAB) * std::log(2.0);
        for (double q : {1 - 1e-4, 1 + 1e-4})
            CHECK(std::abs(pure_measure(MeasureId::tsallis(q), psi, kAB) - target) < 1e-3);
    }
}

TEST_CASE("spin flip of the maximally mixed state") {
    const DensityOp mixed(Dims{2, 2}, Matrix::Identity(4, 4) / 4.0);
    CHECK((spin_flip(mixed).matrix() - mixed.matrix()).norm() < 1e-15);
    CHECK(wootters_concurrence(mixed) == 0.0);
}

TEST_CASE("concurrence of assistance of scaled Bell projector") {
    const HermitianOp a(Dims{2, 2}, 2.0 * DensityOp(bell_ket()).matrix());
    CHECK(ca_of_hermitian(a) == doctest::Approx(2.0).epsilon(1e-12));
}

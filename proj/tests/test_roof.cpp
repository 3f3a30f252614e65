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

#include "doctest.h"
#include "qpoly/roof.hpp"
#include "qpoly/states.hpp"

using namespace qpoly;

namespace {

const Cut kAB = Cut::single(0, 2);
const MeasureId kC = MeasureId::concurrence();

RoofOptions small(long budget = 100'000) {
    RoofOptions o;
    o.budget = budget;
    o.restarts = 4;
    return o;
}

DensityOp ghz_marginal() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(3, 3) = 0.5;
    return DensityOp(Dims{2, 2}, m);
}

double average(const Ensemble& e, const MeasureId& m, const Cut& cut) {
    double v = 0;
    for (const auto& mem : e.members()) v += mem.weight * pure_measure(m, mem.state, cut);
    return v;
}

}  // namespace

TEST_CASE("ensembles from unitaries reproduce the state") {
    const DensityOp rho = sample_density(Dims{2, 3}, 3, RngSeed{4});
    Rng rng = make_rng(RngSeed{5});
    for (int m : {3, 5, 9}) {
        const Ensemble e = ensemble_from_isometry(rho, haar_unitary(m, rng));
        CHECK(e.residual(rho) < 1e-9);
        CHECK(e.size() <= static_cast<std::size_t>(m));
    }
    const Ensemble eig = ensemble_from_isometry(rho, Matrix::Identity(3, 3));
    CHECK(eig.size() == 3);
    CHECK(eig.residual(rho) < 1e-12);
    CHECK_THROWS_AS(ensemble_from_isometry(rho, haar_unitary(2, rng)), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_from_isometry(rho, haar_unitary(10, rng)), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_from_isometry(rho, 2.0 * Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("GHZ marginal has unit concurrence of assistance and zero convex roof") {
    const DensityOp rho = ghz_marginal();
    const RoofResult hi = roof_optimize(rho, kAB, kC, RoofDirection::Max, small(), RngSeed{1});
    CHECK(hi.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hi.ensemble.residual(rho) < 1e-9);
    const RoofResult lo = roof_optimize(rho, kAB, kC, RoofDirection::Min, small(), RngSeed{1});
    CHECK(lo.value < 1e-9);
}

TEST_CASE("reported value is the average over the reported ensemble") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const DensityOp rho = sample_density(Dims{2, 3}, 2 + static_cast<int>(s % 3), RngSeed{s});
        for (RoofDirection d : {RoofDirection::Max, RoofDirection::Min}) {
            for (const char* name : {"concurrence", "formation", "negativity"}) {
                const MeasureId m = MeasureId::parse(name);
                const RoofResult r = roof_optimize(rho, kAB, m, d, small(20'000), RngSeed{s});
                CHECK(r.ensemble.residual(rho) < 1e-9);
                CHECK(r.value == doctest::Approx(average(r.ensemble, m, kAB)).epsilon(1e-12));
                CHECK(r.evaluations <= 20'000);
            }
        }
    }
}

TEST_CASE("Max dominates Min and respects the closed forms") {
    for (std::uint64_t s = 0; s < 8; ++s) {
        const DensityOp rho = sample_density(Dims{2, 2}, 2 + static_cast<int>(s % 3), RngSeed{50 + s});
        const double hi = roof_optimize(rho, kAB, kC, RoofDirection::Max, small(), RngSeed{s}).value;
        const double lo = roof_optimize(rho, kAB, kC, RoofDirection::Min, small(), RngSeed{s}).value;
        CHECK(hi >= lo);
        CHECK(hi <= ca_closed_bound(rho) + 1e-9);
        CHECK(lo >= wootters_concurrence(rho) - 1e-9);
    }
}

TEST_CASE("roof search is deterministic and independent of parallelism") {
    const DensityOp rho = sample_density(Dims{2, 2}, 3, RngSeed{8});
    RoofOptions par = small(), seq = small();
    seq.parallel = false;
    const RoofResult a = roof_optimize(rho, kAB, kC, RoofDirection::Max, par, RngSeed{3});
    const RoofResult b = roof_optimize(rho, kAB, kC, RoofDirection::Max, seq, RngSeed{3});
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("value is monotone in the budget") {
    const DensityOp rho = sample_density(Dims{2, 2}, 4, RngSeed{21});
    for (RoofDirection d : {RoofDirection::Max, RoofDirection::Min}) {
        double prev = d == RoofDirection::Max ? -1.0 : 2.0;
        for (long budget : {1L, 100L, 1'000L, 10'000L, 100'000L}) {
            const double v = roof_optimize(rho, kAB, kC, d, small(budget), RngSeed{9}).value;
            if (d == RoofDirection::Max)
                CHECK(v >= prev);
            else
                CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("rank-one input and invalid options") {
    const DensityOp pure(haar_ket(Dims{2, 2}, RngSeed{1}));
    const RoofResult r = roof_optimize(pure, kAB, kC, RoofDirection::Max, small(), RngSeed{1});
    CHECK(r.ensemble.size() == 1);
    CHECK(r.value == doctest::Approx(wootters_concurrence(pure)).epsilon(1e-9));
    CHECK_THROWS_AS(roof_optimize(ghz_marginal(), kAB, kC, RoofDirection::Max, small(0), RngSeed{1}), std::invalid_argument);
}

TEST_CASE("positivity witness") {
    const auto w = assistance_positivity_witness(ghz_marginal(), kAB);
    REQUIRE(w.has_value());
    CHECK(w->lower_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w->ensemble.residual(ghz_marginal()) < 1e-12);

    // |0><0| (x) I/2: every pure state in the support is a product.
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = 0.5;
    CHECK(!assistance_positivity_witness(DensityOp(Dims{2, 2}, m), kAB).has_value());
}

TEST_CASE("assistance estimate bounds") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const DensityOp rho = sample_density(Dims{2, 2}, 2, RngSeed{70 + s});
        const BoundedValue b = ea_estimate(rho, kAB, kC, small(), RngSeed{s});
        CHECK(b.lower <= b.upper);
        CHECK(b.lower_certified);
        CHECK(b.upper_certified);
        CHECK(b.upper - b.lower <= 5e-3);
    }
    const DensityOp rank4 = sample_density(Dims{2, 2}, 4, RngSeed{80});
    const BoundedValue b4 = ea_estimate(rank4, kAB, kC, small(), RngSeed{1});
    CHECK(b4.lower <= b4.upper);

    const DensityOp pure(haar_ket(Dims{2, 3}, RngSeed{3}));
    const BoundedValue bp = ea_estimate(pure, kAB, MeasureId::formation(), small(), RngSeed{1});
    CHECK(bp.is_exact());
    CHECK(bp.lower == doctest::Approx(pure_measure(MeasureId::formation(), haar_ket(Dims{2, 3}, RngSeed{3}), kAB)).epsilon(1e-9));
}

TEST_CASE("reduced-state bound") {
    const DensityOp rho = sample_density(Dims{2, 3}, 3, RngSeed{90});
    for (const char* name : {"concurrence", "tangle", "formation", "tsallis:2", "renyi:0.5"}) {
        const MeasureId m = MeasureId::parse(name);
        const auto bound = reduced_state_bound(rho, kAB, m);
        REQUIRE(bound.has_value());
        CHECK(roof_optimize(rho, kAB, m, RoofDirection::Max, small(20'000), RngSeed{1}).value <= *bound + 1e-9);
    }
    CHECK(!reduced_state_bound(rho, kAB, MeasureId::negativity()).has_value());
    CHECK(!reduced_state_bound(rho, kAB, MeasureId::renyi(2)).has_value());
}

TEST_CASE("search never falls behind the eigen-ensemble") {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const DensityOp rho = sample_density(Dims{2, 3}, 2 + static_cast<int>(s % 4), RngSeed{200 + s});
        const int r = rho.rank();
        for (const char* name : {"concurrence", "tangle", "formation"}) {
            const MeasureId m = MeasureId::parse(name);
            const double eig = average(ensemble_from_isometry(rho, Matrix::Identity(r, r)), m, kAB);
            CHECK(roof_optimize(rho, kAB, m, RoofDirection::Max, small(5'000), RngSeed{s}).value >= eig - 1e-12);
            CHECK(roof_optimize(rho, kAB, m, RoofDirection::Min, small(5'000), RngSeed{s}).value <= eig + 1e-12);
        }
    }
}

TEST_CASE("rank-2 diagonal example") {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 0.3;
    m(3, 3) = 0.7;
    const DensityOp rho(Dims{2, 2}, m);
    const BoundedValue b = ea_estimate(rho, kAB, kC, small(), RngSeed{1});
    CHECK(b.upper == doctest::Approx(2 * std::sqrt(0.21)).epsilon(1e-9));
    CHECK(b.upper_certified);
    CHECK(std::abs(b.lower - 2 * std::sqrt(0.21)) < 1e-3);
    const BoundedValue bell = ea_estimate(DensityOp(bell_ket()), kAB, kC, small(), RngSeed{1});
    CHECK(bell.is_exact());
    CHECK(bell.lower == doctest::Approx(1.0).epsilon(1e-12));
}

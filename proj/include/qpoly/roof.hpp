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

// Optimization over the pure-state ensembles of a mixed state.
//
// Every ensemble {p_i, |psi_i>} of rho with m members arises from an m x m
// unitary U acting on the eigen-ensemble:
//
//     sqrt(p_i) |psi_i> = sum_j U_ij sqrt(lambda_j) |e_j>,   j < rank(rho).
//
// roof_optimize searches this parametrization. Since every value it reports
// belongs to an explicit ensemble, the Max direction gives a certified lower
// bound on the entanglement of assistance and the Min direction a certified
// upper bound on the convex roof.

#pragma once

#include <optional>
#include <string>

#include "qpoly/measures.hpp"
#include "qpoly/qcore.hpp"

namespace qpoly {

/// An interval known to contain a quantity. A `*_certified` flag states that
/// the corresponding end is a proven bound rather than an estimate.
struct BoundedValue {
    double lower = 0;
    double upper = 0;
    bool lower_certified = false;
    bool upper_certified = false;

    static BoundedValue exact(double v) { return {v, v, true, true}; }
    [[nodiscard]] bool is_exact() const { return lower_certified && upper_certified && upper - lower <= 1e-12; }
};

enum class RoofDirection { Max, Min };
std::string to_string(RoofDirection d);

struct RoofOptions {
    long budget = 2'000'000;      // objective evaluations (one per two-member update)
    int restarts = 16;
    int extra_members = 4;        // cardinalities rank .. min(rank^2, rank + extra); < 0 scans to rank^2
    double cycle_tol = 1e-8;      // a restart ends after a sweep improving by less than this
    int grid = 12;                // coarse angle samples before golden-section refinement
    int golden_iterations = 28;
    bool parallel = true;         // evaluate restarts on the worker pool
};

struct RoofResult {
    double value = 0;
    RoofDirection direction = RoofDirection::Max;
    Ensemble ensemble;
    long evaluations = 0;
    bool converged = false;
};

/// Ensemble obtained from `u` (m x m, rank <= m <= rank^2) acting on the
/// eigen-ensemble of `rho`. Members of numerically zero weight are dropped.
Ensemble ensemble_from_isometry(const DensityOp& rho, const Matrix& u, const Tolerances& tol = kDefaultTolerances);

RoofResult roof_optimize(const DensityOp& rho, const Cut& cut, const MeasureId& m, RoofDirection direction,
                         const RoofOptions& options, RngSeed seed);

struct AssistanceWitness {
    Ensemble ensemble;
    double lower_bound;
};

/// Explicit ensemble of `rho` with a positive average of `m`, built by
/// superposing two product eigenvectors with independent local factors
/// (falling back to superpositions of arbitrary eigenvector pairs).
/// Absent when no such ensemble is found.
std::optional<AssistanceWitness> assistance_positivity_witness(const DensityOp& rho, const Cut& cut,
                                                               const MeasureId& m = MeasureId::concurrence());

/// Interval for the entanglement of assistance of `rho` across `cut`.
BoundedValue ea_estimate(const DensityOp& rho, const Cut& cut, const MeasureId& m, const RoofOptions& options,
                         RngSeed seed);

/// Upper bound on any ensemble average of `m` from the reduced state on the
/// left side of `cut`, valid when the pure-state measure is a concave function
/// of that reduced state. Empty for measures where that does not hold.
std::optional<double> reduced_state_bound(const DensityOp& rho, const Cut& cut, const MeasureId& m);

}  // namespace qpoly

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

// Polygamy and monogamy analysis of tripartite states.
//
// A state rho^{ABC} is summarized by its triple
//
//     x = Q(A|BC),   y = Q(AB),   z = Q(AC),
//
// where Q is either a bipartite measure E or its assistance counterpart E_a.
// The polygamy exponent of a triple with x > max(y, z) > 0 is the unique root
// gamma* of
//
//     g(gamma) = (y/x)^gamma + (z/x)^gamma - 1,
//
// so Q^gamma(A|BC) <= Q^gamma(AB) + Q^gamma(AC) holds exactly for gamma <= gamma*.
// The polygamy power at fixed dimensions is the infimum of gamma* over states.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "qpoly/measures.hpp"
#include "qpoly/qcore.hpp"
#include "qpoly/roof.hpp"

namespace qpoly {

struct PowerTriple {
    BoundedValue x;  // A|BC
    BoundedValue y;  // AB
    BoundedValue z;  // AC
    MeasureId measure;
    bool assisted = false;
    /// Two-qubit marginals of rank > 2 whose assisted value came from the
    /// fidelity bound rather than an exact evaluation.
    bool closed_form_rank_flag = false;
};

struct AnalysisOptions {
    double epsilon = 1e-7;         // zero threshold
    double equality_tol = 1e-6;    // |x - y| tolerance for the disentangling condition
    double bisection_tol = 1e-12;  // |g(gamma*)| target
    int bisection_iterations = 200;
    double bracket_cap = 16384.0;  // 2^14
    /// Evaluate the assistance of two-qubit marginals by the fidelity closed
    /// form (exact for rank <= 2) instead of running the roof optimizer.
    bool closed_form_two_qubit = false;
    RoofOptions roof;
};

/// Computes the triple of a three-subsystem state. Pure A|BC values are
/// exact; mixed values carry the bound directions of their estimator.
PowerTriple eval_triple(const DensityOp& rho, const MeasureId& m, bool assisted, const AnalysisOptions& options,
                        RngSeed seed);

/// Interval for the (unassisted) entanglement of rho across `cut`: exact for
/// pure states, negativity (from the partial transpose) and two-qubit
/// concurrence, tangle and formation, zero for certified-separable states,
/// otherwise [0, convex-roof upper bound].
BoundedValue entanglement_estimate(const DensityOp& rho, const Cut& cut, const MeasureId& m, const RoofOptions& options,
                                   RngSeed seed);

struct FClassification {
    enum class Kind { Defined, NotApplicable, Violation, DegenerateSaturation };
    Kind kind = Kind::NotApplicable;
    double gamma = 0;     // meaningful for Defined
    double residual = 0;  // g(gamma) for Defined
    bool certified = false;
};

std::string to_string(FClassification::Kind k);

/// Classifies a triple of point values (x, y, z) >= 0.
FClassification classify_exponent(double x, double y, double z, const AnalysisOptions& options = {});
/// Classifies using the lower ends of x, y, z; certified when every corner
/// of the bound box gives the same class and all bounds are certified.
FClassification polygamy_exponent(const PowerTriple& t, const AnalysisOptions& options = {});

struct PolygamyVerdict {
    enum class Kind { PolygamousInstance, ViolatesPolygamy, Vacuous };
    Kind kind = Kind::Vacuous;
    bool certified = false;
};
std::string to_string(PolygamyVerdict::Kind k);

/// If x > max(y,z) > eps then min(y,z) > eps must hold.
PolygamyVerdict check_polygamy_def1(const PowerTriple& t, double epsilon = AnalysisOptions{}.epsilon);

struct MonogamyVerdict {
    enum class Kind { DisentanglingHolds, MonogamyViolated, ConditionNotMet };
    Kind kind = Kind::ConditionNotMet;
    bool certified = false;
};
std::string to_string(MonogamyVerdict::Kind k);

/// If x = y > eps (within tol) then z must be zero.
MonogamyVerdict check_monogamy_disentangling(const PowerTriple& t, double epsilon = AnalysisOptions{}.epsilon,
                                            double tol = AnalysisOptions{}.equality_tol);

/// Whether x^beta <= y^beta + z^beta implies x^gamma <= y^gamma + z^gamma
/// for the lower ends of the triple. Requires 0 <= gamma <= beta.
bool power_preservation_check(const PowerTriple& t, double beta, double gamma);
bool power_preservation_check(double x, double y, double z, double beta, double gamma);

enum class SampleKind { PureHaar, MixedRank };

struct BetaOptions {
    SampleKind kind = SampleKind::PureHaar;
    int mixed_rank = 2;
    bool refine = false;
    int refine_iterations = 500;
    std::size_t block = 256;  // samples evaluated per parallel block
    AnalysisOptions analysis;
};

struct SampleRecord {
    std::size_t index = 0;
    double x = 0, y = 0, z = 0;
    FClassification f;
};

struct BetaEstimate {
    std::optional<double> beta_hat;  // empty when no sample was applicable
    std::optional<DensityOp> argmin_state;
    std::optional<Ket> argmin_ket;   // set for pure samples
    std::size_t samples_used = 0;
    std::size_t defined_count = 0;
    bool refined = false;
    bool violation = false;          // a sample admitted no finite exponent
    double sample_min = 0;           // minimum before refinement
    bool closed_form_rank_flag = false;
};

/// Monte-Carlo estimate of the polygamy power at fixed dims. `on_sample`
/// receives every evaluated sample in index order.
BetaEstimate beta_estimate(const Dims& dims, const MeasureId& m, bool assisted, std::size_t samples,
                           const BetaOptions& options, RngSeed seed,
                           const std::function<void(const SampleRecord&)>& on_sample = {});

}  // namespace qpoly

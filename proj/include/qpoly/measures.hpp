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

// Bipartite entanglement measures: pure-state functions of the Schmidt
// spectrum, two-qubit closed forms, PPT separability, and the extension of
// the concurrence of assistance to Hermitian operators.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qpoly/qcore.hpp"

namespace qpoly {

struct MeasureId {
    enum class Kind { Concurrence, Tangle, Negativity, EntanglementOfFormation, Tsallis, Renyi };

    Kind kind = Kind::Concurrence;
    double param = 0;  // q for Tsallis, alpha for Renyi

    static MeasureId concurrence() { return {Kind::Concurrence, 0}; }
    static MeasureId tangle() { return {Kind::Tangle, 0}; }
    static MeasureId negativity() { return {Kind::Negativity, 0}; }
    static MeasureId formation() { return {Kind::EntanglementOfFormation, 0}; }
    static MeasureId tsallis(double q);
    static MeasureId renyi(double alpha);

    /// "concurrence", "tangle", "negativity", "formation", "tsallis:1.5", "renyi:0.5".
    static MeasureId parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;
    /// Throws std::invalid_argument on an out-of-range parameter.
    void validate() const;

    friend bool operator==(const MeasureId&, const MeasureId&) = default;
};

/// Bipartition of the subsystems of a state. Letters A, B, C, ... name
/// subsystems 0, 1, 2, ... in string form, e.g. "A|BC".
struct Cut {
    std::vector<int> left;
    std::vector<int> right;

    static Cut parse(std::string_view text, std::size_t subsystems);
    /// The cut {part} | rest.
    static Cut single(int part, std::size_t subsystems);
    [[nodiscard]] std::string to_string() const;
    /// Throws unless left and right are a nonempty disjoint cover of 0..n-1.
    void validate(std::size_t subsystems) const;
};

/// Schmidt coefficients across `cut`, descending, length min(dL, dR).
RealVector schmidt_coefficients(const Ket& psi, const Cut& cut);

/// Measure value from the squared Schmidt coefficients (reduced spectrum).
double measure_from_spectrum(const MeasureId& m, const RealVector& probabilities);
double pure_measure(const MeasureId& m, const Ket& psi, const Cut& cut);
/// Largest value `m` takes on pure states of a dL x dR system.
double pure_measure_max(const MeasureId& m, Eigen::Index left_dim, Eigen::Index right_dim);

DensityOp spin_flip(const DensityOp& rho);
double wootters_concurrence(const DensityOp& rho);
/// Fidelity F(rho, spin_flip(rho)). An upper bound on the concurrence of
/// assistance of any two-qubit state, and equal to it for rank <= 2.
double ca_closed_bound(const DensityOp& rho);

enum class Separability { SeparableCertified, EntangledCertified, Inconclusive };
std::string to_string(Separability s);

struct PptResult {
    bool is_ppt;
    double min_eig;
    Separability separability;
};

PptResult ppt_check(const DensityOp& rho, const Cut& cut, const Tolerances& tol = kDefaultTolerances);

/// Tr|A| * C_a(|A| / Tr|A|) for a two-qubit Hermitian operator, with C_a
/// evaluated by ca_closed_bound. Zero operator maps to zero.
double ca_of_hermitian(const HermitianOp& a);

}  // namespace qpoly

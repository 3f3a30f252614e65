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

// State factories and the JSON state file format.
//
// File schema:
//
//     { "dims": [2, 2, 2],
//       "kind": "ket" | "density",
//       "data": [[re, im], ...],
//       "meta": { ... } }            // optional provenance
//
// Density matrices are flattened row-major. Reals are written with 17
// significant digits so that load(save(s)) reproduces s bit for bit.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qpoly/qcore.hpp"

namespace qpoly {

/// Sum_j lambda_j |j>|j>...|j> over the computational basis.
struct GhzSpec {
    std::vector<double> lambdas;
    Dims local_dims;
};

Ket ghz_class(const GhzSpec& spec);
/// (sqrt2 |000> + sqrt2 |110> + |111>) / sqrt5.
Ket example2();
Ket bell_ket();
/// |psi><psi|^{AB} (x) rho^C as a three-subsystem state.
DensityOp product_pure_mixed(const Ket& psi_ab, const DensityOp& rho_c);

struct TripartiteSampleKind {
    int rank = 1;  // 1 = Haar pure; r > 1 = induced measure with an r-dimensional ancilla

    static TripartiteSampleKind pure() { return {1}; }
    static TripartiteSampleKind mixed(int r) { return {r}; }
};

DensityOp sample_tripartite(const Dims& dims, TripartiteSampleKind kind, RngSeed seed);
/// Induced-measure state of rank <= r on `dims` (partial trace of a Haar ket
/// on dims (x) C^r).
DensityOp sample_density(const Dims& dims, int rank, RngSeed seed);

using State = std::variant<Ket, DensityOp>;

DensityOp to_density(const State& s);
const Dims& dims_of(const State& s);

class StateFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string serialize_state(const State& s, const nlohmann::json& meta = nullptr);
State parse_state(const std::string& text, const Tolerances& tol = kDefaultTolerances);
void save_state(const State& s, const std::filesystem::path& path, const nlohmann::json& meta = nullptr);
State load_state(const std::filesystem::path& path, const Tolerances& tol = kDefaultTolerances);

/// FNV-1a hash of the serialized state without metadata.
std::uint64_t state_hash(const State& s);
std::string hex64(std::uint64_t v);

}  // namespace qpoly

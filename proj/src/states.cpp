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

#include "qpoly/states.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qpoly {

namespace {

void append_real(std::string& out, double v) {
    if (!std::isfinite(v)) throw StateFormatError("serialize_state: non-finite amplitude");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void append_complex_list(std::string& out, const Complex* data, Eigen::Index n) {
    out += '[';
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i) out += ',';
        out += '[';
        append_real(out, data[i].real());
        out += ',';
        append_real(out, data[i].imag());
        out += ']';
    }
    out += ']';
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories

Ket ghz_class(const GhzSpec& spec) {
    const Dims& dims = spec.local_dims;
    if (dims.size() < 3) throw std::invalid_argument("ghz_class: at least three subsystems required");
    const auto k = static_cast<int>(spec.lambdas.size());
    if (k < 1) throw std::invalid_argument("ghz_class: no coefficients");
    for (std::size_t p = 0; p < dims.size(); ++p)
        if (k > dims[p]) throw std::invalid_argument("ghz_class: more coefficients than a local dimension allows");
    double norm2 = 0;
    for (double l : spec.lambdas) {
        if (!(l > 0)) throw std::invalid_argument("ghz_class: coefficients must be positive");
        norm2 += l * l;
    }
    if (std::abs(norm2 - 1.0) > 1e-12) throw std::invalid_argument("ghz_class: coefficients are not normalized");

    Vector v = Vector::Zero(dims.total());
    for (int j = 0; j < k; ++j) {
        Eigen::Index index = 0;
        for (std::size_t p = 0; p < dims.size(); ++p) index = index * dims[p] + j;
        v(index) = spec.lambdas[static_cast<std::size_t>(j)];
    }
    return Ket::normalized(dims, std::move(v));
}

Ket example2() {
    Vector v = Vector::Zero(8);
    v(0b000) = std::sqrt(2.0);
    v(0b110) = std::sqrt(2.0);
    v(0b111) = 1.0;
    return Ket::normalized(Dims{2, 2, 2}, v / std::sqrt(5.0));
}

Ket bell_ket() {
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return Ket::normalized(Dims{2, 2}, std::move(v));
}

DensityOp product_pure_mixed(const Ket& psi_ab, const DensityOp& rho_c) {
    if (psi_ab.dims().size() != 2) throw std::invalid_argument("product_pure_mixed: |psi> must live on two subsystems");
    if (rho_c.dims().size() != 1) throw std::invalid_argument("product_pure_mixed: rho^C must live on one subsystem");
    return tensor(DensityOp(psi_ab), rho_c);
}

DensityOp sample_tripartite(const Dims& dims, TripartiteSampleKind kind, RngSeed seed) {
    if (dims.size() != 3) throw std::invalid_argument("sample_tripartite: dims must have three subsystems");
    if (kind.rank < 1 || kind.rank > dims.total()) throw std::invalid_argument("sample_tripartite: rank out of range");
    return sample_density(dims, kind.rank, seed);
}

DensityOp sample_density(const Dims& dims, int rank, RngSeed seed) {
    if (rank < 1 || rank > dims.total()) throw std::invalid_argument("sample_density: rank out of range");
    if (rank == 1) return DensityOp(haar_ket(dims, seed));
    std::vector<int> keep(dims.size());
    for (std::size_t k = 0; k < keep.size(); ++k) keep[k] = static_cast<int>(k);
    return partial_trace(DensityOp(haar_ket(dims.concat(Dims{rank}), seed)), keep);
}

DensityOp to_density(const State& s) {
    if (const auto* k = std::get_if<Ket>(&s)) return DensityOp(*k);
    return std::get<DensityOp>(s);
}

const Dims& dims_of(const State& s) {
    return std::visit([](const auto& v) -> const Dims& { return v.dims(); }, s);
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize_state(const State& s, const nlohmann::json& meta) {
    std::string out = "{\"dims\":[";
    const Dims& dims = dims_of(s);
    for (std::size_t k = 0; k < dims.size(); ++k) out += (k ? "," : "") + std::to_string(dims[k]);
    out += "],";
    if (const auto* k = std::get_if<Ket>(&s)) {
        out += "\"kind\":\"ket\",\"data\":";
        append_complex_list(out, k->amplitudes().data(), k->amplitudes().size());
    } else {
        const auto& rho = std::get<DensityOp>(s);
        using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const RowMajor flat = rho.matrix();
        out += "\"kind\":\"density\",\"data\":";
        append_complex_list(out, flat.data(), flat.size());
    }
    if (!meta.is_null()) out += ",\"meta\":" + meta.dump();
    out += "}";
    return out;
}

State parse_state(const std::string& text, const Tolerances& tol) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw StateFormatError(std::string("state file: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw StateFormatError("state file: top level must be an object");
    for (const char* key : {"dims", "kind", "data"})
        if (!doc.contains(key)) throw StateFormatError(std::string("state file: missing '") + key + "'");

    std::vector<int> dv;
    if (!doc["dims"].is_array() || doc["dims"].empty()) throw StateFormatError("state file: 'dims' must be a nonempty array");
    for (const auto& d : doc["dims"]) {
        if (!d.is_number_integer() || d.get<long>() < 1 || d.get<long>() > 1024)
            throw StateFormatError("state file: 'dims' entries must be positive integers");
        dv.push_back(d.get<int>());
    }
    const Dims dims(std::move(dv));
    if (dims.total() > 4096) throw StateFormatError("state file: total dimension too large");

    const auto& kind = doc["kind"];
    if (!kind.is_string() || (kind != "ket" && kind != "density")) throw StateFormatError("state file: 'kind' must be \"ket\" or \"density\"");
    const bool is_ket = kind == "ket";
    const Eigen::Index expected = is_ket ? dims.total() : dims.total() * dims.total();

    const auto& data = doc["data"];
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != expected)
        throw StateFormatError("state file: 'data' length does not match dims");
    std::vector<Complex> values;
    values.reserve(static_cast<std::size_t>(expected));
    for (const auto& pair : data) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw StateFormatError("state file: each 'data' entry must be [re, im]");
        values.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }

    try {
        if (is_ket) {
            const Vector v = Eigen::Map<const Vector>(values.data(), expected);
            return Ket(dims, v, tol);
        }
        using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Matrix m = Eigen::Map<const RowMajor>(values.data(), dims.total(), dims.total());
        return DensityOp(dims, m, tol);
    } catch (const std::invalid_argument& e) {
        throw StateFormatError(std::string("state file: invalid state: ") + e.what());
    }
}

void save_state(const State& s, const std::filesystem::path& path, const nlohmann::json& meta) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_state: cannot open " + path.string());
    os << serialize_state(s, meta) << '\n';
    if (!os) throw std::runtime_error("save_state: write failed for " + path.string());
}

State load_state(const std::filesystem::path& path, const Tolerances& tol) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw StateFormatError("load_state: cannot open " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_state(buf.str(), tol);
}

std::uint64_t state_hash(const State& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_state(s)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace qpoly

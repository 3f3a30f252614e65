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

#include "qpoly/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpoly/linalg.hpp"

namespace qpoly {

namespace {

constexpr double kUnitParamGap = 1e-6;

void require_two_qubits(const Dims& dims, const char* what) {
    if (dims.size() != 2 || dims[0] != 2 || dims[1] != 2)
        throw std::invalid_argument(std::string(what) + ": requires a two-qubit operator, got dims " + dims.to_string());
}

const Matrix& yy() {
    static const Matrix m = [] {
        Matrix s = Matrix::Zero(4, 4);
        s(0, 3) = -1;
        s(1, 2) = 1;
        s(2, 1) = 1;
        s(3, 0) = -1;
        return s;
    }();
    return m;
}

double parse_double(std::string_view s) {
    // std::from_chars for double is not available on every toolchain we target.
    std::string copy(s);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(copy, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("measure: bad numeric parameter '" + copy + "'");
    }
    if (used != copy.size()) throw std::invalid_argument("measure: bad numeric parameter '" + copy + "'");
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// MeasureId

MeasureId MeasureId::tsallis(double q) {
    MeasureId m{Kind::Tsallis, q};
    m.validate();
    return m;
}

MeasureId MeasureId::renyi(double alpha) {
    MeasureId m{Kind::Renyi, alpha};
    m.validate();
    return m;
}

void MeasureId::validate() const {
    if (kind == Kind::Tsallis || kind == Kind::Renyi) {
        if (!(param > 0) || !std::isfinite(param)) throw std::invalid_argument("measure: parameter must be positive and finite");
        if (std::abs(param - 1.0) <= kUnitParamGap)
            throw std::invalid_argument("measure: parameter 1 is excluded; use 'formation' for the entropy limit");
    }
}

MeasureId MeasureId::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    const bool has_param = colon != std::string_view::npos;
    auto no_param = [&](Kind k) {
        if (has_param) throw std::invalid_argument("measure: '" + std::string(name) + "' takes no parameter");
        return MeasureId{k, 0};
    };
    if (name == "concurrence") return no_param(Kind::Concurrence);
    if (name == "tangle") return no_param(Kind::Tangle);
    if (name == "negativity") return no_param(Kind::Negativity);
    if (name == "formation" || name == "entanglement_of_formation") return no_param(Kind::EntanglementOfFormation);
    if (name == "tsallis" || name == "renyi") {
        if (!has_param) throw std::invalid_argument("measure: '" + std::string(name) + "' needs a parameter, e.g. tsallis:2");
        const double p = parse_double(text.substr(colon + 1));
        return name == "tsallis" ? tsallis(p) : renyi(p);
    }
    throw std::invalid_argument("measure: unknown measure '" + std::string(text) + "'");
}

std::string MeasureId::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Concurrence: return "concurrence";
        case Kind::Tangle: return "tangle";
        case Kind::Negativity: return "negativity";
        case Kind::EntanglementOfFormation: return "formation";
        case Kind::Tsallis: os << "tsallis:" << param; return os.str();
        case Kind::Renyi: os << "renyi:" << param; return os.str();
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Cut

Cut Cut::parse(std::string_view text, std::size_t subsystems) {
    const auto bar = text.find('|');
    if (bar == std::string_view::npos || text.find('|', bar + 1) != std::string_view::npos)
        throw std::invalid_argument("cut: expected exactly one '|' in '" + std::string(text) + "'");
    auto letters = [&](std::string_view side) {
        std::vector<int> out;
        for (char c : side) {
            if (c < 'A' || c > 'Z') throw std::invalid_argument("cut: subsystems are named by capital letters");
            out.push_back(c - 'A');
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    Cut cut{letters(text.substr(0, bar)), letters(text.substr(bar + 1))};
    cut.validate(subsystems);
    return cut;
}

Cut Cut::single(int part, std::size_t subsystems) {
    Cut cut;
    cut.left = {part};
    for (int k = 0; k < static_cast<int>(subsystems); ++k)
        if (k != part) cut.right.push_back(k);
    cut.validate(subsystems);
    return cut;
}

std::string Cut::to_string() const {
    std::string s;
    for (int k : left) s += static_cast<char>('A' + k);
    s += '|';
    for (int k : right) s += static_cast<char>('A' + k);
    return s;
}

void Cut::validate(std::size_t subsystems) const {
    if (left.empty() || right.empty()) throw std::invalid_argument("cut: both sides must be nonempty");
    std::vector<int> all(left);
    all.insert(all.end(), right.begin(), right.end());
    std::sort(all.begin(), all.end());
    if (all.size() != subsystems) throw std::invalid_argument("cut: does not cover the " + std::to_string(subsystems) + " subsystems");
    for (std::size_t k = 0; k < all.size(); ++k)
        if (all[k] != static_cast<int>(k)) throw std::invalid_argument("cut: sides must be a disjoint cover of the subsystems");
}

// ---------------------------------------------------------------------------
// Pure-state measures

RealVector schmidt_coefficients(const Ket& psi, const Cut& cut) {
    const Dims& dims = psi.dims();
    cut.validate(dims.size());
    const Eigen::Index dl = dims.total_of(cut.left);
    const Eigen::Index dr = dims.total_of(cut.right);
    const auto perm = linalg::grouping_permutation(dims.span(), cut.left);
    Matrix m(dl, dr);
    for (Eigen::Index r = 0; r < dl; ++r)
        for (Eigen::Index c = 0; c < dr; ++c) m(r, c) = psi.amplitudes()(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(r * dr + c)]));
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();  // already descending
}

double measure_from_spectrum(const MeasureId& m, const RealVector& probabilities) {
    m.validate();
    const Eigen::ArrayXd p = probabilities.array().cwiseMax(0.0);
    switch (m.kind) {
        case MeasureId::Kind::Concurrence: return std::sqrt(std::max(0.0, 2.0 * (1.0 - p.square().sum())));
        case MeasureId::Kind::Tangle: return std::max(0.0, 2.0 * (1.0 - p.square().sum()));
        case MeasureId::Kind::Negativity: {
            const double s = p.sqrt().sum();
            return std::max(0.0, (s * s - 1.0) / 2.0);
        }
        case MeasureId::Kind::EntanglementOfFormation: {
            double h = 0;
            for (double x : p)
                if (x > 0) h -= x * std::log2(x);
            return std::max(0.0, h);
        }
        case MeasureId::Kind::Tsallis: {
            const double s = p.pow(m.param).sum();
            return std::max(0.0, (1.0 - s) / (m.param - 1.0));
        }
        case MeasureId::Kind::Renyi: {
            const double s = p.pow(m.param).sum();
            return std::max(0.0, std::log2(s) / (1.0 - m.param));
        }
    }
    return 0;
}

double pure_measure(const MeasureId& m, const Ket& psi, const Cut& cut) {
    const RealVector s = schmidt_coefficients(psi, cut);
    return measure_from_spectrum(m, s.array().square().matrix());
}

double pure_measure_max(const MeasureId& m, Eigen::Index left_dim, Eigen::Index right_dim) {
    const Eigen::Index k = std::min(left_dim, right_dim);
    return measure_from_spectrum(m, RealVector::Constant(k, 1.0 / static_cast<double>(k)));
}

// ---------------------------------------------------------------------------
// Two-qubit closed forms

DensityOp spin_flip(const DensityOp& rho) {
    require_two_qubits(rho.dims(), "spin_flip");
    return DensityOp(rho.dims(), yy() * rho.matrix().conjugate() * yy());
}

namespace {

// Descending square roots of the eigenvalues of rho * spin_flip(rho). With
// rho = W W^dag over its support these are the singular values of
// tau = W^T (sy x sy) W, which avoids square roots of rounding-level
// eigenvalues.
RealVector flip_roots(const DensityOp& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < 4; ++j)
        if (es.eigenvalues()(j) > kDefaultTolerances.rank) support.push_back(j);
    Matrix w(4, static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j)
        w.col(static_cast<Eigen::Index>(j)) = std::sqrt(es.eigenvalues()(support[j])) * es.eigenvectors().col(support[j]);
    RealVector mu = RealVector::Zero(4);
    if (!support.empty()) {
        const Matrix tau = w.transpose() * yy() * w;
        const RealVector sv = Eigen::JacobiSVD<Matrix>(tau).singularValues();
        mu.head(sv.size()) = sv;
    }
    std::sort(mu.data(), mu.data() + mu.size(), std::greater<>());
    return mu;
}

}  // namespace

double wootters_concurrence(const DensityOp& rho) {
    require_two_qubits(rho.dims(), "wootters_concurrence");
    const RealVector mu = flip_roots(rho);
    return std::max(0.0, mu(0) - mu(1) - mu(2) - mu(3));
}

double ca_closed_bound(const DensityOp& rho) {
    require_two_qubits(rho.dims(), "ca_closed_bound");
    return flip_roots(rho).sum();
}

// ---------------------------------------------------------------------------
// Separability

std::string to_string(Separability s) {
    switch (s) {
        case Separability::SeparableCertified: return "SeparableCertified";
        case Separability::EntangledCertified: return "EntangledCertified";
        case Separability::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

PptResult ppt_check(const DensityOp& rho, const Cut& cut, const Tolerances& tol) {
    cut.validate(rho.dims().size());
    const HermitianOp pt = partial_transpose(rho.as_hermitian(), cut.left);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt.matrix(), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    const bool is_ppt = min_eig >= -tol.eig_clamp;
    const Eigen::Index dl = rho.dims().total_of(cut.left);
    const Eigen::Index dr = rho.dims().total_of(cut.right);
    const bool ppt_is_sufficient = (dl == 2 && dr == 2) || (dl == 2 && dr == 3) || (dl == 3 && dr == 2);
    Separability sep = Separability::Inconclusive;
    if (!is_ppt)
        sep = Separability::EntangledCertified;
    else if (ppt_is_sufficient)
        sep = Separability::SeparableCertified;
    return {is_ppt, min_eig, sep};
}

// ---------------------------------------------------------------------------
// Hermitian extension

double ca_of_hermitian(const HermitianOp& a) {
    require_two_qubits(a.dims(), "ca_of_hermitian");
    const double norm = trace_norm(a);
    if (norm <= 0) return 0;
    Matrix abs_a = linalg::abs_hermitian(a.matrix()) / norm;
    return norm * ca_closed_bound(DensityOp(a.dims(), std::move(abs_a)));
}

}  // namespace qpoly

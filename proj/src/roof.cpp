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

#include "qpoly/roof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qpoly/linalg.hpp"
#include "qpoly/parallel.hpp"

namespace qpoly {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kDropWeight = 1e-14;
constexpr double kProductTol = 1e-6;      // second Schmidt coefficient of a product eigenvector
constexpr double kIndependenceTol = 1e-6; // smallest singular value of a stacked factor pair
constexpr double kSmoothStart = 1e-2;     // Min-direction smoothing schedule
constexpr double kSmoothDecay = 0.3;
constexpr double kSmoothEnd = 1e-10;

/// Eigen-ensemble of rho: columns sqrt(lambda_j) e_j, lambda descending,
/// restricted to the support.
struct SupportBasis {
    Matrix scaled;      // n x r
    RealVector weights; // lambda_j
};

SupportBasis support_basis(const DensityOp& rho, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    const RealVector& ev = es.eigenvalues();
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = ev.size(); i-- > 0;)
        if (ev(i) > tol.rank) idx.push_back(i);
    SupportBasis out;
    out.scaled.resize(rho.dims().total(), static_cast<Eigen::Index>(idx.size()));
    out.weights.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out.weights(jj) = ev(idx[j]);
        out.scaled.col(jj) = std::sqrt(ev(idx[j])) * es.eigenvectors().col(idx[j]);
    }
    return out;
}

/// p * E(v / sqrt(p)) with p = |v|^2, for vectors stored with the left side
/// of the cut as the most significant factor.
class MemberValue {
public:
    MemberValue(MeasureId m, Eigen::Index dl, Eigen::Index dr) : m_(m), dl_(dl), dr_(dr) {}

    double operator()(const Vector& v) const {
        const Eigen::Map<const RowMajorMatrix> mat(v.data(), dl_, dr_);
        if (dl_ == 2 && dr_ == 2 && m_.kind == MeasureId::Kind::Concurrence)
            return 2.0 * std::abs(mat(0, 0) * mat(1, 1) - mat(0, 1) * mat(1, 0));
        const Matrix g = dl_ <= dr_ ? Matrix(mat * mat.adjoint()) : Matrix(mat.adjoint() * mat);
        const double p = g.trace().real();
        if (!(p > 0)) return 0;
        switch (m_.kind) {
            case MeasureId::Kind::Concurrence: return std::sqrt(std::max(0.0, 2.0 * (p * p - g.squaredNorm())));
            case MeasureId::Kind::Tangle: return std::max(0.0, 2.0 * (p * p - g.squaredNorm()) / p);
            default: {
                Eigen::SelfAdjointEigenSolver<Matrix> es(g / p, Eigen::EigenvaluesOnly);
                return p * measure_from_spectrum(m_, es.eigenvalues());
            }
        }
    }

private:
    MeasureId m_;
    Eigen::Index dl_, dr_;
};

Matrix permute_rows(const Matrix& a, const std::vector<std::size_t>& perm) {
    Matrix out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) out.row(i) = a.row(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
    return out;
}

Vector unpermute(const Vector& v, const std::vector<std::size_t>& perm) {
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])) = v(i);
    return out;
}

/// Ensemble from unnormalized member columns (original ordering).
Ensemble ensemble_from_columns(const Dims& dims, const Matrix& cols) {
    std::vector<EnsembleMember> members;
    double total = 0;
    for (Eigen::Index i = 0; i < cols.cols(); ++i) {
        const double p = cols.col(i).squaredNorm();
        if (p <= kDropWeight) continue;
        members.push_back({p, Ket::normalized(dims, cols.col(i))});
        total += p;
    }
    for (auto& m : members) m.weight /= total;
    return Ensemble(std::move(members));
}

double ensemble_average(const Ensemble& e, const MeasureId& m, const Cut& cut) {
    double v = 0;
    for (const auto& member : e.members()) v += member.weight * pure_measure(m, member.state, cut);
    return v;
}

Ket dominant_ket(const DensityOp& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    const Eigen::Index top = es.eigenvalues().size() - 1;
    return Ket::normalized(rho.dims(), es.eigenvectors().col(top));
}

/// One restart of the Givens-rotation search. Columns of `w` are the
/// unnormalized members in cut-grouped ordering.
class GivensSearch {
public:
    GivensSearch(Matrix w, const MemberValue& eval, double sign, long budget, const RoofOptions& opt)
        : w_(std::move(w)), eval_(eval), sign_(sign), budget_(budget), opt_(opt), a_(w_.rows()), b_(w_.rows()) {
        vals_.resize(static_cast<std::size_t>(w_.cols()));
        for (Eigen::Index i = 0; i < w_.cols(); ++i) vals_[static_cast<std::size_t>(i)] = eval_(w_.col(i));
    }

    void run() {
        const Eigen::Index m = w_.cols();
        // The Min objective sum_i |v_i| has kinks at vanishing members where
        // coordinate moves stall; search a smoothed version first and anneal
        // the smoothing to zero.
        delta_ = sign_ < 0 ? kSmoothStart : 0.0;
        best_raw_ = objective();
        best_w_ = w_;
        while (!exhausted()) {
            double gain = 0;
            for (Eigen::Index i = 0; i < m && !exhausted(); ++i)
                for (Eigen::Index k = i + 1; k < m && !exhausted(); ++k) gain += optimize_pair(i, k);
            if (delta_ > 0) {
                delta_ = delta_ * kSmoothDecay < kSmoothEnd ? 0.0 : delta_ * kSmoothDecay;
                continue;
            }
            if (gain < opt_.cycle_tol) break;
        }
    }

    [[nodiscard]] double objective() const {
        double s = 0;
        for (double v : vals_) s += v;
        return s;
    }
    [[nodiscard]] double best_objective() const { return best_raw_; }
    [[nodiscard]] const Matrix& best_members() const { return best_w_; }
    [[nodiscard]] long used() const { return used_; }

private:
    struct Point {
        double theta, phi, score;
    };

    [[nodiscard]] bool exhausted() const { return used_ >= budget_; }

    [[nodiscard]] double smooth(double v) const { return delta_ > 0 ? std::hypot(v, delta_) : v; }

    double score(Eigen::Index i, Eigen::Index k, double theta, double phi) {
        const double c = std::cos(theta), s = std::sin(theta);
        const Complex e = std::polar(1.0, phi);
        a_ = c * w_.col(i) - (e * s) * w_.col(k);
        b_ = (std::conj(e) * s) * w_.col(i) + c * w_.col(k);
        ++used_;
        return sign_ * (smooth(eval_(a_)) + smooth(eval_(b_)));
    }

    // Coarse grid then golden-section over one periodic coordinate.
    void line_search(Eigen::Index i, Eigen::Index k, Point& best, bool over_theta) {
        const double period = over_theta ? std::numbers::pi : 2.0 * std::numbers::pi;
        const double origin = over_theta ? best.theta : best.phi;
        const double step = period / opt_.grid;
        auto probe = [&](double t) {
            const double th = over_theta ? t : best.theta;
            const double ph = over_theta ? best.phi : t;
            const double sc = score(i, k, th, ph);
            if (sc > best.score) best = {th, ph, sc};
            return sc;
        };
        // The origin is the incumbent, so its score is best.score.
        double center = origin, center_score = best.score;
        for (int g = 1; g < opt_.grid && !exhausted(); ++g) {
            const double t = origin + g * step;
            const double sc = probe(t);
            if (sc > center_score) center = t, center_score = sc;
        }
        constexpr double inv_phi = 0.6180339887498949;
        double lo = center - step, hi = center + step;
        double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
        if (exhausted()) return;
        double f1 = probe(x1);
        if (exhausted()) return;
        double f2 = probe(x2);
        for (int it = 0; it < opt_.golden_iterations && !exhausted(); ++it) {
            if (f1 > f2) {
                hi = x2, x2 = x1, f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = probe(x1);
            } else {
                lo = x1, x1 = x2, f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = probe(x2);
            }
        }
    }

    double optimize_pair(Eigen::Index i, Eigen::Index k) {
        const double current =
            sign_ * (smooth(vals_[static_cast<std::size_t>(i)]) + smooth(vals_[static_cast<std::size_t>(k)]));
        Point best{0, 0, current};
        line_search(i, k, best, true);
        if (!exhausted()) line_search(i, k, best, false);
        if (!exhausted()) line_search(i, k, best, true);
        // A search cut short by the budget is discarded, so a smaller budget
        // visits a prefix of the states a larger one visits.
        if (exhausted() || !(best.score > current)) return 0;
        const double c = std::cos(best.theta), s = std::sin(best.theta);
        const Complex e = std::polar(1.0, best.phi);
        a_ = c * w_.col(i) - (e * s) * w_.col(k);
        b_ = (std::conj(e) * s) * w_.col(i) + c * w_.col(k);
        w_.col(i) = a_;
        w_.col(k) = b_;
        vals_[static_cast<std::size_t>(i)] = eval_(a_);
        vals_[static_cast<std::size_t>(k)] = eval_(b_);
        if (sign_ * objective() > sign_ * best_raw_) best_raw_ = objective(), best_w_ = w_;
        return best.score - current;
    }

    Matrix w_;
    const MemberValue& eval_;
    double sign_;
    long budget_;
    const RoofOptions& opt_;
    long used_ = 0;
    std::vector<double> vals_;
    Vector a_, b_;
    double delta_ = 0;
    double best_raw_ = 0;
    Matrix best_w_;
};

}  // namespace

std::string to_string(RoofDirection d) { return d == RoofDirection::Max ? "max" : "min"; }

Ensemble ensemble_from_isometry(const DensityOp& rho, const Matrix& u, const Tolerances& tol) {
    const SupportBasis basis = support_basis(rho, tol);
    const Eigen::Index r = basis.scaled.cols();
    const Eigen::Index m = u.rows();
    if (u.cols() != m) throw std::invalid_argument("ensemble_from_isometry: U must be square");
    if (m < r || m > r * r) throw std::invalid_argument("ensemble_from_isometry: side must lie between rank and rank^2");
    if ((u.adjoint() * u - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("ensemble_from_isometry: U is not unitary");
    const Matrix cols = basis.scaled * u.leftCols(r).transpose();
    return ensemble_from_columns(rho.dims(), cols);
}

RoofResult roof_optimize(const DensityOp& rho, const Cut& cut, const MeasureId& m, RoofDirection direction,
                         const RoofOptions& options, RngSeed seed) {
    cut.validate(rho.dims().size());
    m.validate();
    if (options.budget < 1) throw std::invalid_argument("roof_optimize: budget must be at least 1");
    if (options.restarts < 1) throw std::invalid_argument("roof_optimize: restarts must be at least 1");

    const SupportBasis basis = support_basis(rho, kDefaultTolerances);
    const Eigen::Index r = basis.scaled.cols();
    RoofResult result;
    result.direction = direction;

    if (r <= 1) {
        const Ket psi = dominant_ket(rho);
        result.ensemble = Ensemble({{1.0, psi}});
        result.value = pure_measure(m, psi, cut);
        result.evaluations = 1;
        result.converged = true;
        return result;
    }

    const Eigen::Index dl = rho.dims().total_of(cut.left);
    const Eigen::Index dr = rho.dims().total_of(cut.right);
    const auto perm = linalg::grouping_permutation(rho.dims().span(), cut.left);
    const Matrix grouped = permute_rows(basis.scaled, perm);
    const MemberValue eval(m, dl, dr);
    const double sign = direction == RoofDirection::Max ? 1.0 : -1.0;

    const Eigen::Index max_m = options.extra_members < 0 ? r * r : std::min(r * r, r + options.extra_members);
    std::vector<Eigen::Index> cards;
    for (Eigen::Index c = r; c <= max_m; ++c) cards.push_back(c);

    // Baseline: the eigen-ensemble itself.
    double best_score = 0;
    for (Eigen::Index j = 0; j < r; ++j) best_score += sign * eval(grouped.col(j));
    Matrix best_cols = grouped;
    long used = 1;

    const std::size_t runs = cards.size() * static_cast<std::size_t>(options.restarts);
    const long share = (options.budget - 1) / static_cast<long>(runs);

    struct Outcome {
        double score = -std::numeric_limits<double>::infinity();
        Matrix cols;
        long used = 0;
    };
    std::vector<Outcome> outcomes(runs);
    if (share > 0) {
        parallel_for(
            runs,
            [&](std::size_t run) {
                const Eigen::Index card = cards[run / static_cast<std::size_t>(options.restarts)];
                const auto restart = static_cast<std::uint64_t>(run % static_cast<std::size_t>(options.restarts));
                Matrix u;
                if (restart == 0) {
                    u = Matrix::Identity(card, card);
                } else {
                    Rng rng = make_rng(seed.derive((static_cast<std::uint64_t>(card) << 32) | restart));
                    u = haar_unitary(card, rng);
                }
                GivensSearch search(grouped * u.leftCols(r).transpose(), eval, sign, share, options);
                search.run();
                outcomes[run] = {sign * search.best_objective(), search.best_members(), search.used()};
            },
            options.parallel);
    }

    // Reduce in run order so ties and the convergence flag do not depend on scheduling.
    std::size_t last_improvement = 0;
    for (std::size_t run = 0; run < runs && share > 0; ++run) {
        used += outcomes[run].used;
        if (outcomes[run].score > best_score) {
            if (outcomes[run].score > best_score + 1e-8) last_improvement = run + 1;
            best_score = outcomes[run].score;
            best_cols = outcomes[run].cols;
        }
    }
    const std::size_t tail = (runs + 3) / 4;
    result.converged = share > 0 && last_improvement + tail <= runs;

    Matrix original(best_cols.rows(), best_cols.cols());
    for (Eigen::Index i = 0; i < best_cols.cols(); ++i) original.col(i) = unpermute(best_cols.col(i), perm);
    result.ensemble = ensemble_from_columns(rho.dims(), original);
    result.value = ensemble_average(result.ensemble, m, cut);
    result.evaluations = used;
    return result;
}

std::optional<AssistanceWitness> assistance_positivity_witness(const DensityOp& rho, const Cut& cut, const MeasureId& m) {
    cut.validate(rho.dims().size());
    const SupportBasis basis = support_basis(rho, kDefaultTolerances);
    const Eigen::Index r = basis.scaled.cols();
    const Dims& dims = rho.dims();

    if (r <= 1) {
        const Ket psi = dominant_ket(rho);
        const double v = pure_measure(m, psi, cut);
        if (v > 0) return AssistanceWitness{Ensemble({{1.0, psi}}), v};
        return std::nullopt;
    }

    const Eigen::Index dl = dims.total_of(cut.left);
    const Eigen::Index dr = dims.total_of(cut.right);
    const auto perm = linalg::grouping_permutation(dims.span(), cut.left);
    const Matrix grouped = permute_rows(basis.scaled, perm);

    struct Factors {
        bool product = false;
        Vector x, y;
    };
    std::vector<Factors> factors(static_cast<std::size_t>(r));
    for (Eigen::Index j = 0; j < r; ++j) {
        const Vector e = grouped.col(j).normalized();
        const Eigen::Map<const RowMajorMatrix> mat(e.data(), dl, dr);
        Eigen::JacobiSVD<Matrix> svd(Matrix(mat), Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RealVector& s = svd.singularValues();
        auto& f = factors[static_cast<std::size_t>(j)];
        f.product = s.size() < 2 || s(1) <= kProductTol;
        f.x = svd.matrixU().col(0);
        f.y = svd.matrixV().col(0).conjugate();
    }
    auto independent = [](const Vector& a, const Vector& b) {
        Matrix stacked(a.size(), 2);
        stacked << a, b;
        Eigen::JacobiSVD<Matrix> svd(stacked);
        return svd.singularValues()(1) > kIndependenceTol;
    };

    // Columns of the candidate ensemble: (e_j + e_k)/sqrt2, (e_j - e_k)/sqrt2
    // scaled by the eigenweights, plus every other eigenvector unchanged.
    auto candidate = [&](Eigen::Index j, Eigen::Index k) {
        Matrix cols = grouped;
        cols.col(j) = (grouped.col(j) + grouped.col(k)) / std::sqrt(2.0);
        cols.col(k) = (grouped.col(j) - grouped.col(k)) / std::sqrt(2.0);
        return cols;
    };
    const MemberValue eval(m, dl, dr);
    auto average = [&](const Matrix& cols) {
        double v = 0;
        for (Eigen::Index i = 0; i < cols.cols(); ++i) v += eval(cols.col(i));
        return v;
    };

    double best = 0;
    Matrix best_cols;
    for (Eigen::Index j = 0; j < r; ++j)
        for (Eigen::Index k = j + 1; k < r; ++k) {
            const auto& fj = factors[static_cast<std::size_t>(j)];
            const auto& fk = factors[static_cast<std::size_t>(k)];
            if (!fj.product || !fk.product || !independent(fj.x, fk.x) || !independent(fj.y, fk.y)) continue;
            Matrix cols = candidate(j, k);
            const double v = average(cols);
            if (v > best) best = v, best_cols = std::move(cols);
        }
    if (best_cols.size() == 0) {
        best = average(grouped);
        if (best > 0) best_cols = grouped;
        for (Eigen::Index j = 0; j < r; ++j)
            for (Eigen::Index k = j + 1; k < r; ++k) {
                Matrix cols = candidate(j, k);
                const double v = average(cols);
                if (v > best) best = v, best_cols = std::move(cols);
            }
    }
    if (best_cols.size() == 0 || !(best > 0)) return std::nullopt;

    Matrix original(best_cols.rows(), best_cols.cols());
    for (Eigen::Index i = 0; i < best_cols.cols(); ++i) original.col(i) = unpermute(best_cols.col(i), perm);
    Ensemble ens = ensemble_from_columns(dims, original);
    const double lb = ensemble_average(ens, m, cut);
    if (!(lb > 0)) return std::nullopt;
    return AssistanceWitness{std::move(ens), lb};
}

std::optional<double> reduced_state_bound(const DensityOp& rho, const Cut& cut, const MeasureId& m) {
    cut.validate(rho.dims().size());
    using K = MeasureId::Kind;
    const bool concave = m.kind == K::Concurrence || m.kind == K::Tangle || m.kind == K::EntanglementOfFormation ||
                         m.kind == K::Tsallis || (m.kind == K::Renyi && m.param < 1);
    if (!concave) return std::nullopt;
    const DensityOp left = partial_trace(rho, cut.left);
    return measure_from_spectrum(m, left.spectrum());
}

BoundedValue ea_estimate(const DensityOp& rho, const Cut& cut, const MeasureId& m, const RoofOptions& options, RngSeed seed) {
    cut.validate(rho.dims().size());
    const int rank = rho.rank();
    if (rank <= 1) return BoundedValue::exact(pure_measure(m, dominant_ket(rho), cut));

    BoundedValue out;
    out.lower = roof_optimize(rho, cut, m, RoofDirection::Max, options, seed).value;
    if (const auto w = assistance_positivity_witness(rho, cut, m)) out.lower = std::max(out.lower, w->lower_bound);
    out.lower_certified = true;

    const Eigen::Index dl = rho.dims().total_of(cut.left);
    const Eigen::Index dr = rho.dims().total_of(cut.right);
    const bool two_qubit = rho.dims().size() == 2 && dl == 2 && dr == 2;
    if (two_qubit && m.kind == MeasureId::Kind::Concurrence) {
        out.upper = ca_closed_bound(rho);
        out.upper_certified = rank <= 2;
    } else {
        out.upper = pure_measure_max(m, dl, dr);
        out.upper_certified = true;
    }
    if (const auto bound = reduced_state_bound(rho, cut, m); bound && *bound < out.upper) {
        out.upper = *bound;
        out.upper_certified = true;
    }
    out.upper = std::max(out.upper, out.lower);
    return out;
}

}  // namespace qpoly

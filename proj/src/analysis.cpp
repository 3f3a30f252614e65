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

#include "qpoly/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpoly/parallel.hpp"
#include "qpoly/states.hpp"

namespace qpoly {

namespace {

bool is_two_qubit(const Dims& d) { return d.size() == 2 && d[0] == 2 && d[1] == 2; }

double binary_entropy(double p) {
    double h = 0;
    if (p > 0) h -= p * std::log2(p);
    if (p < 1) h -= (1 - p) * std::log2(1 - p);
    return h;
}

Ket top_ket(const DensityOp& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    return Ket::normalized(rho.dims(), es.eigenvectors().col(es.eigenvalues().size() - 1));
}

BoundedValue assisted_marginal(const DensityOp& rho, const MeasureId& m, const AnalysisOptions& opt, RngSeed seed,
                               bool& rank_flag) {
    const Cut cut = Cut::single(0, 2);
    if (opt.closed_form_two_qubit && is_two_qubit(rho.dims()) && m.kind == MeasureId::Kind::Concurrence) {
        if (rho.rank() <= 1) return BoundedValue::exact(pure_measure(m, top_ket(rho), cut));
        const double f = ca_closed_bound(rho);
        const bool exact = rho.rank() <= 2;
        if (!exact) rank_flag = true;
        return {f, f, exact, exact};
    }
    return ea_estimate(rho, cut, m, opt.roof, seed);
}

double g_of(double a, double b, double gamma) { return std::pow(a, gamma) + std::pow(b, gamma) - 1.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Triples

BoundedValue entanglement_estimate(const DensityOp& rho, const Cut& cut, const MeasureId& m, const RoofOptions& options,
                                   RngSeed seed) {
    cut.validate(rho.dims().size());
    if (rho.rank() <= 1) return BoundedValue::exact(pure_measure(m, top_ket(rho), cut));
    if (m.kind == MeasureId::Kind::Negativity) {
        const HermitianOp pt = partial_transpose(rho.as_hermitian(), cut.left);
        return BoundedValue::exact(std::max(0.0, (trace_norm(pt) - 1.0) / 2.0));
    }
    if (is_two_qubit(rho.dims())) {
        using K = MeasureId::Kind;
        const double c = wootters_concurrence(rho);
        if (m.kind == K::Concurrence) return BoundedValue::exact(c);
        if (m.kind == K::Tangle) return BoundedValue::exact(c * c);
        if (m.kind == K::EntanglementOfFormation)
            return BoundedValue::exact(binary_entropy((1 + std::sqrt(std::max(0.0, 1 - c * c))) / 2));
    }
    if (ppt_check(rho, cut).separability == Separability::SeparableCertified) return BoundedValue::exact(0);
    const RoofResult roof = roof_optimize(rho, cut, m, RoofDirection::Min, options, seed);
    return {0.0, roof.value, true, true};
}

PowerTriple eval_triple(const DensityOp& rho, const MeasureId& m, bool assisted, const AnalysisOptions& options,
                        RngSeed seed) {
    if (rho.dims().size() != 3) throw std::invalid_argument("eval_triple: state must have exactly three subsystems");
    m.validate();
    PowerTriple t;
    t.measure = m;
    t.assisted = assisted;

    const Cut a_bc = Cut::single(0, 3);
    if (rho.rank() <= 1)
        t.x = BoundedValue::exact(pure_measure(m, top_ket(rho), a_bc));
    else
        t.x = assisted ? ea_estimate(rho, a_bc, m, options.roof, seed.derive(0))
                       : entanglement_estimate(rho, a_bc, m, options.roof, seed.derive(0));

    const DensityOp ab = partial_trace(rho, {0, 1});
    const DensityOp ac = partial_trace(rho, {0, 2});
    const Cut a_b = Cut::single(0, 2);
    if (assisted) {
        t.y = assisted_marginal(ab, m, options, seed.derive(1), t.closed_form_rank_flag);
        t.z = assisted_marginal(ac, m, options, seed.derive(2), t.closed_form_rank_flag);
    } else {
        t.y = entanglement_estimate(ab, a_b, m, options.roof, seed.derive(1));
        t.z = entanglement_estimate(ac, a_b, m, options.roof, seed.derive(2));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Exponent

std::string to_string(FClassification::Kind k) {
    switch (k) {
        case FClassification::Kind::Defined: return "Defined";
        case FClassification::Kind::NotApplicable: return "NotApplicable";
        case FClassification::Kind::Violation: return "Violation";
        case FClassification::Kind::DegenerateSaturation: return "DegenerateSaturation";
    }
    return "NotApplicable";
}

FClassification classify_exponent(double x, double y, double z, const AnalysisOptions& opt) {
    if (!(x >= 0) || !(y >= 0) || !(z >= 0)) throw std::invalid_argument("polygamy exponent: values must be nonnegative");
    using Kind = FClassification::Kind;
    const double hi_side = std::max(y, z);
    const double lo_side = std::min(y, z);
    FClassification out;
    if (x <= opt.epsilon || x <= hi_side + opt.epsilon) {
        out.kind = Kind::NotApplicable;
        return out;
    }
    if (x - hi_side <= opt.equality_tol && lo_side <= opt.epsilon) {
        out.kind = Kind::DegenerateSaturation;
        return out;
    }
    if (lo_side <= opt.epsilon) {
        // g(gamma) = (max/x)^gamma - 1 < 0 for every gamma > 0.
        out.kind = Kind::Violation;
        out.residual = hi_side / x - 1.0;
        return out;
    }

    const double a = y / x, b = z / x;
    double hi = 1.0;
    while (g_of(a, b, hi) >= 0 && hi < opt.bracket_cap) hi *= 2;
    if (g_of(a, b, hi) >= 0) {
        // Ratios so close to 1 that no root lies below the cap.
        out.kind = Kind::DegenerateSaturation;
        out.residual = g_of(a, b, hi);
        return out;
    }
    double lo = hi > 1.0 ? hi / 2 : 0.0;
    double mid = 0.5 * (lo + hi);
    double gm = g_of(a, b, mid);
    // Keep halving past the residual target until the bracket is at rounding
    // width, so gamma is stable under rescaling of the triple.
    const auto done = [&] {
        return std::abs(gm) <= opt.bisection_tol && hi - lo <= 8 * std::numeric_limits<double>::epsilon() * hi;
    };
    for (int it = 0; it < opt.bisection_iterations && !done() && gm != 0; ++it) {
        if (gm > 0)
            lo = mid;
        else
            hi = mid;
        mid = 0.5 * (lo + hi);
        gm = g_of(a, b, mid);
    }
    out.kind = Kind::Defined;
    out.gamma = mid;
    out.residual = gm;
    return out;
}

FClassification polygamy_exponent(const PowerTriple& t, const AnalysisOptions& opt) {
    FClassification out = classify_exponent(t.x.lower, t.y.lower, t.z.lower, opt);
    bool certified = t.x.lower_certified && t.x.upper_certified && t.y.lower_certified && t.y.upper_certified &&
                     t.z.lower_certified && t.z.upper_certified;
    for (int corner = 0; corner < 8 && certified; ++corner) {
        const double x = corner & 1 ? t.x.upper : t.x.lower;
        const double y = corner & 2 ? t.y.upper : t.y.lower;
        const double z = corner & 4 ? t.z.upper : t.z.lower;
        if (classify_exponent(x, y, z, opt).kind != out.kind) certified = false;
    }
    out.certified = certified;
    return out;
}

// ---------------------------------------------------------------------------
// Verdicts

std::string to_string(PolygamyVerdict::Kind k) {
    switch (k) {
        case PolygamyVerdict::Kind::PolygamousInstance: return "PolygamousInstance";
        case PolygamyVerdict::Kind::ViolatesPolygamy: return "ViolatesPolygamy";
        case PolygamyVerdict::Kind::Vacuous: return "Vacuous";
    }
    return "Vacuous";
}

std::string to_string(MonogamyVerdict::Kind k) {
    switch (k) {
        case MonogamyVerdict::Kind::DisentanglingHolds: return "DisentanglingHolds";
        case MonogamyVerdict::Kind::MonogamyViolated: return "MonogamyViolated";
        case MonogamyVerdict::Kind::ConditionNotMet: return "ConditionNotMet";
    }
    return "ConditionNotMet";
}

PolygamyVerdict check_polygamy_def1(const PowerTriple& t, double eps) {
    using Kind = PolygamyVerdict::Kind;
    const auto& [x, y, z] = std::tie(t.x, t.y, t.z);
    const double side_max_lo = std::max(y.lower, z.lower);
    const double side_max_hi = std::max(y.upper, z.upper);
    const bool side_hi_cert = y.upper_certified && z.upper_certified;
    const bool side_lo_cert = y.lower_certified && z.lower_certified;

    PolygamyVerdict v;
    const bool antecedent = x.lower > side_max_lo && side_max_lo > eps;
    if (!antecedent) {
        v.kind = Kind::Vacuous;
        // Certainly false: x cannot exceed the larger side, or both sides are certainly zero.
        v.certified = (x.upper_certified && side_lo_cert && x.upper <= side_max_lo) || (side_hi_cert && side_max_hi <= eps);
        return v;
    }
    const bool antecedent_certain = x.lower_certified && side_hi_cert && x.lower > side_max_hi && side_lo_cert;
    const BoundedValue& weaker = y.lower <= z.lower ? y : z;
    if (weaker.lower > eps) {
        v.kind = Kind::PolygamousInstance;
        v.certified = antecedent_certain && weaker.lower_certified;
    } else {
        v.kind = Kind::ViolatesPolygamy;
        v.certified = antecedent_certain && weaker.upper_certified && weaker.upper <= eps;
    }
    return v;
}

MonogamyVerdict check_monogamy_disentangling(const PowerTriple& t, double eps, double tol) {
    using Kind = MonogamyVerdict::Kind;
    const auto& [x, y, z] = std::tie(t.x, t.y, t.z);
    MonogamyVerdict v;
    if (!(std::abs(x.lower - y.lower) <= tol && x.lower > eps)) {
        v.kind = Kind::ConditionNotMet;
        v.certified = x.upper_certified && x.upper <= eps;
        return v;
    }
    const bool condition_certain = x.lower_certified && x.upper_certified && y.lower_certified && y.upper_certified &&
                                   std::max(x.upper, y.upper) - std::min(x.lower, y.lower) <= tol;
    if (z.lower <= eps) {
        v.kind = Kind::DisentanglingHolds;
        v.certified = condition_certain && z.upper_certified && z.upper <= eps;
    } else {
        v.kind = Kind::MonogamyViolated;
        v.certified = condition_certain && z.lower_certified;
    }
    return v;
}

bool power_preservation_check(double x, double y, double z, double beta, double gamma) {
    if (!(gamma >= 0) || !(beta >= gamma)) throw std::invalid_argument("power_preservation_check: requires 0 <= gamma <= beta");
    if (!(x >= 0) || !(y >= 0) || !(z >= 0)) throw std::invalid_argument("power_preservation_check: values must be nonnegative");
    const bool premise = std::pow(x, beta) <= std::pow(y, beta) + std::pow(z, beta);
    if (!premise) return true;
    const double lhs = std::pow(x, gamma), rhs = std::pow(y, gamma) + std::pow(z, gamma);
    // Relative slack for rounding in pow near equality.
    return lhs <= rhs * (1 + 1e-12) + 1e-300;
}

bool power_preservation_check(const PowerTriple& t, double beta, double gamma) {
    return power_preservation_check(t.x.lower, t.y.lower, t.z.lower, beta, gamma);
}

// ---------------------------------------------------------------------------
// Polygamy power

namespace {

struct SampleOutcome {
    DensityOp state;
    std::optional<Ket> ket;
    PowerTriple triple;
    FClassification f;
};

class RefineObjective {
public:
    RefineObjective(Dims dims, MeasureId m, bool assisted, const AnalysisOptions& opt, RngSeed seed)
        : dims_(std::move(dims)), m_(m), assisted_(assisted), opt_(opt), seed_(seed) {}

    double operator()(const std::vector<double>& params) const {
        Vector v(dims_.total());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) = Complex(params[static_cast<std::size_t>(2 * i)], params[static_cast<std::size_t>(2 * i + 1)]);
        if (!(v.norm() > 0)) return std::numeric_limits<double>::infinity();
        const Ket psi = Ket::normalized(dims_, v);
        const PowerTriple t = eval_triple(DensityOp(psi), m_, assisted_, opt_, seed_);
        const FClassification f = polygamy_exponent(t, opt_);
        return f.kind == FClassification::Kind::Defined ? f.gamma : std::numeric_limits<double>::infinity();
    }

private:
    Dims dims_;
    MeasureId m_;
    bool assisted_;
    AnalysisOptions opt_;
    RngSeed seed_;
};

}  // namespace

BetaEstimate beta_estimate(const Dims& dims, const MeasureId& m, bool assisted, std::size_t samples,
                           const BetaOptions& options, RngSeed seed, const std::function<void(const SampleRecord&)>& on_sample) {
    if (dims.size() != 3) throw std::invalid_argument("beta_estimate: dims must have three subsystems");
    if (samples < 1) throw std::invalid_argument("beta_estimate: at least one sample required");
    m.validate();

    AnalysisOptions inner = options.analysis;
    inner.roof.parallel = false;
    const std::size_t block = std::max<std::size_t>(1, options.block);

    BetaEstimate est;
    for (std::size_t start = 0; start < samples; start += block) {
        const std::size_t count = std::min(block, samples - start);
        std::vector<std::optional<SampleOutcome>> out(count);
        parallel_for(count, [&](std::size_t j) {
            const std::size_t index = start + j;
            const RngSeed s = seed.derive(index);
            std::optional<Ket> ket;
            const DensityOp state = [&] {
                if (options.kind == SampleKind::PureHaar) {
                    ket = haar_ket(dims, s);
                    return DensityOp(*ket);
                }
                return sample_tripartite(dims, TripartiteSampleKind{options.mixed_rank}, s);
            }();
            PowerTriple t = eval_triple(state, m, assisted, inner, s.derive(7));
            const FClassification f = polygamy_exponent(t, inner);
            out[j] = SampleOutcome{state, std::move(ket), std::move(t), f};
        });

        for (std::size_t j = 0; j < count; ++j) {
            const SampleOutcome& o = *out[j];
            const std::size_t index = start + j;
            est.samples_used = index + 1;
            est.closed_form_rank_flag = est.closed_form_rank_flag || o.triple.closed_form_rank_flag;
            if (on_sample) on_sample(SampleRecord{index, o.triple.x.lower, o.triple.y.lower, o.triple.z.lower, o.f});
            if (o.f.kind == FClassification::Kind::Violation) {
                est.violation = true;
                est.beta_hat = 0.0;
                est.argmin_state = o.state;
                est.argmin_ket = o.ket;
                return est;
            }
            if (o.f.kind == FClassification::Kind::Defined) {
                ++est.defined_count;
                if (!est.beta_hat || o.f.gamma < *est.beta_hat) {
                    est.beta_hat = o.f.gamma;
                    est.argmin_state = o.state;
                    est.argmin_ket = o.ket;
                }
            }
        }
    }
    if (est.beta_hat) est.sample_min = *est.beta_hat;

    if (options.refine && est.beta_hat && est.argmin_ket) {
        // Coordinate search on the real and imaginary amplitude parts.
        const RefineObjective objective(dims, m, assisted, inner, seed.derive(~0ULL));
        std::vector<double> params;
        for (Eigen::Index i = 0; i < est.argmin_ket->amplitudes().size(); ++i) {
            params.push_back(est.argmin_ket->amplitudes()(i).real());
            params.push_back(est.argmin_ket->amplitudes()(i).imag());
        }
        double best = objective(params);
        double step = 0.05;
        for (int it = 0; it < options.refine_iterations && step > 1e-10; ++it) {
            bool improved = false;
            for (std::size_t c = 0; c < params.size(); ++c) {
                for (double dir : {1.0, -1.0}) {
                    std::vector<double> trial = params;
                    trial[c] += dir * step;
                    const double v = objective(trial);
                    if (v < best) {
                        best = v;
                        params = std::move(trial);
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        est.refined = true;
        if (best < *est.beta_hat) {
            Vector v(dims.total());
            for (Eigen::Index i = 0; i < v.size(); ++i)
                v(i) = Complex(params[static_cast<std::size_t>(2 * i)], params[static_cast<std::size_t>(2 * i + 1)]);
            est.argmin_ket = Ket::normalized(dims, v);
            est.argmin_state = DensityOp(*est.argmin_ket);
            est.beta_hat = best;
        }
    }
    return est;
}

}  // namespace qpoly

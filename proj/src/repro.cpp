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

#include "qpoly/repro.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "qpoly/analysis.hpp"
#include "qpoly/measures.hpp"
#include "qpoly/parallel.hpp"
#include "qpoly/roof.hpp"
#include "qpoly/states.hpp"

namespace qpoly {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void add(SuiteReport& r, std::string name, bool ok, std::string detail) {
    r.checks.push_back(Check{std::move(name), ok, std::move(detail)});
}

const Cut kAB = Cut::single(0, 2);

std::vector<double> random_lambdas(int k, Rng& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> l(static_cast<std::size_t>(k));
    double n2 = 0;
    for (auto& v : l) {
        v = u(rng);
        n2 += v * v;
    }
    for (auto& v : l) v /= std::sqrt(n2);
    return l;
}

// Random Hermitian matrix with standard normal entries.
Matrix random_hermitian(int d, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = Complex(n(rng), n(rng));
    return (g + g.adjoint()) / 2.0;
}

// ---------------------------------------------------------------------------

void suite_example2(SuiteReport& r, const ReproOptions&) {
    r.title = "example2 state values";
    r.time_limit = 1;
    const Ket psi = example2();
    const double c = pure_measure(MeasureId::concurrence(), psi, Cut::single(0, 3));
    const double expect = std::sqrt(24.0) / 5.0;
    add(r, "concurrence A|BC = sqrt(24)/5", std::abs(c - expect) <= 1e-9, fmt("%.12f (diff %.2e)", c, c - expect));

    const DensityOp rho(psi);
    const double w = wootters_concurrence(partial_trace(rho, {0, 1}));
    add(r, "Wootters concurrence of AB = 0.8", std::abs(w - 0.8) <= 1e-9, fmt("%.12f (diff %.2e)", w, w - 0.8));

    const PptResult ppt = ppt_check(partial_trace(rho, {0, 2}), kAB);
    add(r, "AC is PPT, separable certified", ppt.separability == Separability::SeparableCertified,
        fmt("%s, min eigenvalue %.3e", to_string(ppt.separability).c_str(), ppt.min_eig));
}

void suite_ghz(SuiteReport& r, const ReproOptions& opt) {
    r.title = "no finite exponent for unassisted concurrence";
    r.time_limit = 10;
    const MeasureId c = MeasureId::concurrence();
    AnalysisOptions ao;

    auto fails_for_all_beta = [](const PowerTriple& t) {
        for (double beta = 0.125; beta <= 16.0; beta += 0.125)
            if (std::pow(t.x.lower, beta) <= std::pow(t.y.upper, beta) + std::pow(t.z.upper, beta)) return false;
        return true;
    };

    {
        const PowerTriple t = eval_triple(DensityOp(example2()), c, false, ao, opt.seed.derive(1));
        const FClassification f = polygamy_exponent(t, ao);
        add(r, "example2: exponent Violation (certified)",
            f.kind == FClassification::Kind::Violation && f.certified && fails_for_all_beta(t),
            fmt("x=%.6f y=%.6f z=[%.1e,%.1e] %s", t.x.lower, t.y.lower, t.z.lower, t.z.upper, to_string(f.kind).c_str()));
        const PolygamyVerdict v = check_polygamy_def1(t, ao.epsilon);
        add(r, "example2: polygamy verdict ViolatesPolygamy (certified)",
            v.kind == PolygamyVerdict::Kind::ViolatesPolygamy && v.certified, to_string(v.kind));
    }

    Rng rng = make_rng(opt.seed.derive(2));
    for (int d : {2, 3}) {
        int ok = 0;
        std::string detail;
        for (int trial = 0; trial < 5; ++trial) {
            const Ket psi = ghz_class(GhzSpec{random_lambdas(d, rng), Dims{d, d, d}});
            const PowerTriple t = eval_triple(DensityOp(psi), c, false, ao, opt.seed.derive(100 + 10 * d + trial));
            const FClassification f = polygamy_exponent(t, ao);
            const bool good = f.kind == FClassification::Kind::Violation && f.certified && fails_for_all_beta(t);
            ok += good;
            if (!good) detail += fmt(" trial %d: %s y<=%.2e z<=%.2e;", trial, to_string(f.kind).c_str(), t.y.upper, t.z.upper);
        }
        add(r, fmt("GHZ class dims (%d,%d,%d): exponent Violation on 5/5", d, d, d), ok == 5,
            fmt("%d/5%s", ok, detail.c_str()));
    }
}

void suite_table1_ca(SuiteReport& r, const ReproOptions& opt) {
    r.title = "assisted concurrence exponent at three qubits";
    r.time_limit = 600;
    BetaOptions bo;
    bo.refine = true;
    bo.analysis.closed_form_two_qubit = true;
    std::size_t below = 0;
    double worst = std::numeric_limits<double>::infinity();
    const BetaEstimate est = beta_estimate(Dims{2, 2, 2}, MeasureId::concurrence(), true, 10000, bo, opt.seed.derive(3),
                                           [&](const SampleRecord& s) {
                                               if (s.f.kind != FClassification::Kind::Defined) return;
                                               worst = std::min(worst, s.f.gamma);
                                               if (s.f.gamma < 2.0 - 1e-6) ++below;
                                           });
    add(r, "every Defined exponent >= 2 - 1e-6", below == 0 && est.defined_count > 0 && !est.violation,
        fmt("%zu defined of %zu, %zu below, sample min %.6f%s", est.defined_count, est.samples_used, below, worst,
            est.closed_form_rank_flag ? ", rank>2 marginals flagged" : ""));
    const double beta = est.beta_hat.value_or(std::numeric_limits<double>::infinity());
    add(r, "refined minimum < 2.1", est.refined && beta < 2.1, fmt("%.6f (from %.6f)", beta, est.sample_min));
    add(r, "refined minimum >= 2 - 1e-6", beta >= 2.0 - 1e-6, fmt("%.9f", beta));

    // Product states |psi>^{AB} (x) |phi>^C: x = y and z = 0, equality for every power.
    const Ket prod = tensor(haar_ket(Dims{2, 2}, opt.seed.derive(4)), haar_ket(Dims{2}, opt.seed.derive(5)));
    const PowerTriple t = eval_triple(DensityOp(prod), MeasureId::concurrence(), true, bo.analysis, opt.seed.derive(6));
    add(r, "product family saturates: x = y, z = 0",
        std::abs(t.x.lower - t.y.lower) <= 1e-9 && t.z.upper <= 1e-9 && t.y.is_exact() && t.z.is_exact(),
        fmt("x=%.9f y=%.9f z=%.1e", t.x.lower, t.y.lower, t.z.upper));
}

void suite_roof(SuiteReport& r, const ReproOptions& opt) {
    r.title = "roof optimizer against two-qubit closed forms";
    r.time_limit = 300;
    const MeasureId c = MeasureId::concurrence();
    const RoofOptions ro;

    double worst_gap = 0, worst_excess = -1;
    for (int i = 0; i < 50; ++i) {
        const DensityOp rho = sample_density(Dims{2, 2}, 2, opt.seed.derive(10).derive(i));
        const double f = ca_closed_bound(rho);
        const RoofResult res = roof_optimize(rho, kAB, c, RoofDirection::Max, ro, opt.seed.derive(11).derive(i));
        worst_gap = std::max(worst_gap, f - res.value);
        worst_excess = std::max(worst_excess, res.value - f);
    }
    add(r, "Max reaches the closed form on 50 rank-2 states", worst_gap <= 5e-3 && worst_excess <= 1e-9,
        fmt("max shortfall %.2e, max excess %.2e", worst_gap, worst_excess));

    worst_excess = -1;
    for (int i = 0; i < 50; ++i) {
        const DensityOp rho = sample_density(Dims{2, 2}, 3 + i % 2, opt.seed.derive(12).derive(i));
        const RoofResult res = roof_optimize(rho, kAB, c, RoofDirection::Max, ro, opt.seed.derive(13).derive(i));
        worst_excess = std::max(worst_excess, res.value - ca_closed_bound(rho));
    }
    add(r, "Max never exceeds the closed form on 50 rank-3/4 states", worst_excess <= 1e-9,
        fmt("max excess %.2e", worst_excess));

    double worst_below = -1, worst_above = 0;
    for (int i = 0; i < 50; ++i) {
        const DensityOp rho = sample_density(Dims{2, 2}, 2 + i % 3, opt.seed.derive(14).derive(i));
        const double w = wootters_concurrence(rho);
        const RoofResult res = roof_optimize(rho, kAB, c, RoofDirection::Min, ro, opt.seed.derive(15).derive(i));
        worst_below = std::max(worst_below, w - res.value);
        worst_above = std::max(worst_above, res.value - w);
    }
    add(r, "Min matches Wootters on 50 states", worst_below <= 1e-9 && worst_above <= 5e-3,
        fmt("max undershoot %.2e, max overshoot %.2e", worst_below, worst_above));
}

void suite_thm5(SuiteReport& r, const ReproOptions& opt) {
    r.title = "assisted concurrence violates the disentangling condition";
    r.time_limit = 60;
    const MeasureId c = MeasureId::concurrence();
    const AnalysisOptions ao;
    for (double p : {0.5, 0.7}) {
        Matrix rc = Matrix::Zero(2, 2);
        rc(0, 0) = p;
        rc(1, 1) = 1 - p;
        const DensityOp rho = product_pure_mixed(bell_ket(), DensityOp(Dims{2}, rc));
        const PowerTriple t = eval_triple(rho, c, true, ao, opt.seed.derive(20).derive(static_cast<std::uint64_t>(p * 10)));
        const MonogamyVerdict v = check_monogamy_disentangling(t, ao.epsilon, ao.equality_tol);
        const std::string tag = fmt("p=%.1f: ", p);
        add(r, tag + "|x - y| <= 1e-6", std::abs(t.x.lower - t.y.lower) <= 1e-6,
            fmt("x=%.12f y=%.12f", t.x.lower, t.y.lower));
        add(r, tag + "x >= 0.999", t.x.lower >= 0.999, fmt("%.12f", t.x.lower));
        add(r, tag + "certified lower bound on z >= 0.5", t.z.lower_certified && t.z.lower >= 0.5,
            fmt("z in [%.6f, %.6f]", t.z.lower, t.z.upper));
        if (p == 0.5)
            add(r, tag + "z = 1", std::abs(t.z.lower - 1) <= 5e-3 && std::abs(t.z.upper - 1) <= 5e-3,
                fmt("z in [%.6f, %.6f]", t.z.lower, t.z.upper));
        add(r, tag + "verdict MonogamyViolated (certified)", v.kind == MonogamyVerdict::Kind::MonogamyViolated && v.certified,
            to_string(v.kind) + (v.certified ? " certified" : " uncertified"));
    }
    Matrix pure_c = Matrix::Zero(2, 2);
    pure_c(0, 0) = 1;
    const DensityOp rho = product_pure_mixed(bell_ket(), DensityOp(Dims{2}, pure_c));
    for (bool assisted : {true, false}) {
        const PowerTriple t = eval_triple(rho, c, assisted, ao, opt.seed.derive(21));
        const MonogamyVerdict v = check_monogamy_disentangling(t, ao.epsilon, ao.equality_tol);
        add(r, std::string("pure C, ") + (assisted ? "assisted" : "unassisted") + ": verdict DisentanglingHolds (certified)",
            v.kind == MonogamyVerdict::Kind::DisentanglingHolds && v.certified,
            to_string(v.kind) + fmt(", z <= %.1e", t.z.upper));
    }
}

void suite_sampled_polygamy(SuiteReport& r, const ReproOptions& opt) {
    r.title = "assisted concurrence is polygamous on random pure states";
    r.time_limit = 300;
    AnalysisOptions ao;
    ao.roof.budget = 200'000;
    ao.roof.restarts = 4;
    ao.roof.parallel = false;
    const int n = 1000;
    std::vector<PolygamyVerdict> verdicts(n);
    parallel_for(n, [&](std::size_t i) {
        const Ket psi = haar_ket(Dims{2, 2, 2}, opt.seed.derive(30).derive(i));
        const PowerTriple t = eval_triple(DensityOp(psi), MeasureId::concurrence(), true, ao, opt.seed.derive(31).derive(i));
        verdicts[i] = check_polygamy_def1(t, ao.epsilon);
    });
    int violated = 0, instances = 0, vacuous = 0;
    for (const auto& v : verdicts) {
        if (v.kind == PolygamyVerdict::Kind::ViolatesPolygamy && v.certified) ++violated;
        if (v.kind == PolygamyVerdict::Kind::PolygamousInstance) ++instances;
        if (v.kind == PolygamyVerdict::Kind::Vacuous) ++vacuous;
    }
    add(r, "zero certified ViolatesPolygamy on 1000 states", violated == 0,
        fmt("%d violated, %d polygamous instances, %d vacuous", violated, instances, vacuous));
}

void suite_continuity(SuiteReport& r, const ReproOptions& opt) {
    r.title = "continuity and order properties of the assistance closed form";
    r.time_limit = 60;
    Rng rng = make_rng(opt.seed.derive(40));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double worst = -1;
    for (int i = 0; i < 1000; ++i) {
        // Purifications on 2x2x2 give rank <= 2; half the pairs are close.
        const Ket a = haar_ket(Dims{2, 2, 2}, rng);
        Vector vb = haar_ket(Dims{2, 2, 2}, rng).amplitudes();
        if (i % 2 == 0) vb = a.amplitudes() + std::pow(10.0, -1 - 4 * unit(rng)) * vb;
        const Ket b = Ket::normalized(Dims{2, 2, 2}, vb);
        const DensityOp rho = partial_trace(DensityOp(a), {0, 1});
        const DensityOp sigma = partial_trace(DensityOp(b), {0, 1});
        const double lhs = std::abs(ca_closed_bound(rho) - ca_closed_bound(sigma));
        const double rhs = std::sqrt(2.0) * trace_norm(HermitianOp(Dims{2, 2}, rho.matrix() - sigma.matrix()));
        worst = std::max(worst, lhs - rhs);
    }
    add(r, "|C_a(rho) - C_a(sigma)| <= sqrt2 |rho - sigma|_1 on 1000 pairs", worst <= 1e-9,
        fmt("max of lhs - rhs %.3e", worst));

    double worst_h = 0;
    for (int i = 0; i < 100; ++i) {
        const HermitianOp a(Dims{2, 2}, random_hermitian(4, rng));
        const double s = std::exp(6 * unit(rng) - 3);
        const double base = ca_of_hermitian(a);
        const double scaled = ca_of_hermitian(HermitianOp(Dims{2, 2}, s * a.matrix()));
        worst_h = std::max(worst_h, std::abs(scaled - s * base) / std::max(1.0, s * base));
    }
    add(r, "positive homogeneity C_a(sA) = s C_a(A)", worst_h <= 1e-9, fmt("max relative error %.3e", worst_h));

    double worst_m = -1;
    for (int i = 0; i < 100; ++i) {
        Matrix ma, mb;
        if (i % 2 == 0) {
            // Shared eigenbasis: |A| = V diag(a) V^dag <= V diag(b) V^dag = |B|.
            const Matrix v = haar_unitary(4, rng);
            RealVector ea(4), eb(4);
            for (int k = 0; k < 4; ++k) {
                eb(k) = 2 * unit(rng);
                ea(k) = (unit(rng) < 0.5 ? -1 : 1) * unit(rng) * eb(k);
            }
            ma = v * ea.cast<Complex>().asDiagonal() * v.adjoint();
            mb = v * eb.cast<Complex>().asDiagonal() * v.adjoint();
        } else {
            // A = P >= 0 and B = P + Q with Q >= 0.
            const Matrix p = random_hermitian(4, rng), q = random_hermitian(4, rng);
            ma = p * p.adjoint();
            mb = ma + 0.3 * unit(rng) * q * q.adjoint();
        }
        const double ca = ca_of_hermitian(HermitianOp(Dims{2, 2}, ma));
        const double cb = ca_of_hermitian(HermitianOp(Dims{2, 2}, mb));
        worst_m = std::max(worst_m, ca - cb);
    }
    add(r, "|A| <= |B| implies C_a(A) <= C_a(B) on 100 pairs", worst_m <= 1e-9, fmt("max of C_a(A) - C_a(B) %.3e", worst_m));
}

void suite_exponent(SuiteReport& r, const ReproOptions& opt) {
    r.title = "exponent solver properties";
    r.time_limit = 60;
    Rng rng = make_rng(opt.seed.derive(50));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const AnalysisOptions ao;

    int defined = 0;
    double worst_res = 0, worst_scale = 0;
    for (int i = 0; i < 10000; ++i) {
        const double x = std::exp(8 * unit(rng) - 4);
        // Ratios spread over (1e-3, 0.999) on a log scale.
        const double y = x * std::exp(std::log(1e-3) * unit(rng)) * 0.999;
        const double z = x * std::exp(std::log(1e-3) * unit(rng)) * 0.999;
        const FClassification f = classify_exponent(x, y, z, ao);
        if (f.kind != FClassification::Kind::Defined) continue;
        ++defined;
        worst_res = std::max(worst_res, std::abs(f.residual));
        // Scale factors in [1e-3, 1e3] that keep every entry above the zero threshold.
        const double s_min = std::max(1e-3, 10 * ao.epsilon / std::min(y, z));
        const double s = s_min * std::pow(1e3 / s_min, unit(rng));
        const FClassification g = classify_exponent(s * x, s * y, s * z, ao);
        worst_scale = std::max(worst_scale, g.kind == FClassification::Kind::Defined ? std::abs(g.gamma - f.gamma)
                                                                                       : std::numeric_limits<double>::infinity());
    }
    add(r, "bisection residual <= 1e-10", defined >= 9000 && worst_res <= 1e-10,
        fmt("%d defined of 10000, max |g| %.2e", defined, worst_res));
    add(r, "scale invariance within 1e-9", worst_scale <= 1e-9, fmt("max |gamma(sx,sy,sz) - gamma| %.2e", worst_scale));

    int failures = 0, premises = 0;
    for (int i = 0; i < 100000; ++i) {
        const double x = unit(rng), y = unit(rng), z = unit(rng);
        const double beta = 6 * unit(rng);
        const double gamma = beta * unit(rng);
        premises += std::pow(x, beta) <= std::pow(y, beta) + std::pow(z, beta);
        failures += !power_preservation_check(x, y, z, beta, gamma);
    }
    add(r, "power preservation on 100000 cases", failures == 0, fmt("%d failures, %d with premise true", failures, premises));
}

struct SuiteEntry {
    const char* name;
    void (*run)(SuiteReport&, const ReproOptions&);
};

const SuiteEntry kSuites[] = {
    {"example2", suite_example2},
    {"ghz", suite_ghz},
    {"table1_ca", suite_table1_ca},
    {"roof", suite_roof},
    {"thm5", suite_thm5},
    {"sampled_polygamy", suite_sampled_polygamy},
    {"continuity", suite_continuity},
    {"exponent", suite_exponent},
};

}  // namespace

std::size_t SuiteReport::passed_count() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.passed; }));
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& s : kSuites) v.emplace_back(s.name);
        return v;
    }();
    return names;
}

bool is_suite(std::string_view name) {
    return std::any_of(std::begin(kSuites), std::end(kSuites), [&](const SuiteEntry& s) { return name == s.name; });
}

SuiteReport run_suite(std::string_view name, const ReproOptions& options) {
    for (const auto& s : kSuites) {
        if (name != s.name) continue;
        SuiteReport r;
        r.name = s.name;
        const auto t0 = std::chrono::steady_clock::now();
        s.run(r, options);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    }
    throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

}  // namespace qpoly

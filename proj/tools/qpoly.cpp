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

// qpoly command-line front end. Every command writes one JSON document
// {"manifest": ..., "records": [...]} to stdout and a readable summary to
// stderr. Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpoly/analysis.hpp"
#include "qpoly/measures.hpp"
#include "qpoly/repro.hpp"
#include "qpoly/roof.hpp"
#include "qpoly/states.hpp"

namespace {

using nlohmann::json;
using namespace qpoly;

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string state_path;
    std::string cut;
    std::string measure = "concurrence";
    bool assisted = false;
    std::string dims = "2,2,2";
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    long budget = RoofOptions{}.budget;
    bool refine = false;
    std::string out_path;
    std::string jsonl_path;
    std::vector<double> triple;
    std::string check_kind;
    std::string suite;
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

json bounds_json(const BoundedValue& b) {
    return {{"lower", b.lower}, {"upper", b.upper}, {"lower_certified", b.lower_certified},
            {"upper_certified", b.upper_certified}, {"exact", b.is_exact()}};
}

json triple_json(const PowerTriple& t) {
    return {{"x", bounds_json(t.x)}, {"y", bounds_json(t.y)}, {"z", bounds_json(t.z)},
            {"measure", t.measure.to_string()}, {"assisted", t.assisted},
            {"closed_form_rank_flag", t.closed_form_rank_flag}};
}

json f_json(const FClassification& f) {
    json j = {{"kind", to_string(f.kind)}, {"certified", f.certified}};
    if (f.kind == FClassification::Kind::Defined) {
        j["gamma"] = f.gamma;
        j["residual"] = f.residual;
    }
    return j;
}

json ensemble_summary(const Ensemble& e, const DensityOp& rho, const Cut& cut, const MeasureId& m) {
    json members = json::array();
    for (const auto& mem : e.members())
        members.push_back({{"weight", mem.weight}, {"value", pure_measure(m, mem.state, cut)}});
    return {{"size", e.size()}, {"residual", e.residual(rho)}, {"members", members}};
}

class Session {
public:
    Session(std::string command, const Config& cfg) : cfg_(cfg), started_(utc_now()) {
        manifest_["command"] = std::move(command);
        manifest_["seed"] = cfg.seed;
        manifest_["version"] = kVersion;
    }

    State load(const std::string& path) {
        if (path.empty()) throw UsageError("--state is required");
        State s = [&] {
            try {
                return load_state(path);
            } catch (const StateFormatError& e) {
                throw IoError(e.what());
            }
        }();
        state_hashes_.push_back(hex64(state_hash(s)));
        return s;
    }

    // Runs `body` and appends its record, timing it in the manifest.
    template <class Fn>
    void record(const std::string& op, json inputs, Fn&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        json outputs = body();
        wall_times_.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        records_.push_back({{"operation", op}, {"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}});
    }

    void finish(const json& config) {
        manifest_["config_hash"] = hex64(fnv1a(config.dump()));
        manifest_["started"] = started_;
        manifest_["finished"] = utc_now();
        manifest_["state_hashes"] = state_hashes_;
        manifest_["wall_times"] = wall_times_;
        const json doc = {{"manifest", manifest_}, {"records", records_}};
        const std::string text = doc.dump();
        std::cout << doc.dump(2) << '\n';
        if (!cfg_.out_path.empty()) {
            std::ofstream os(cfg_.out_path, std::ios::app);
            if (!os) throw IoError("cannot open log " + cfg_.out_path);
            os << text << '\n';
            if (!os) throw IoError("write failed for " + cfg_.out_path);
        }
    }

private:
    const Config& cfg_;
    std::string started_;
    json manifest_;
    std::vector<std::string> state_hashes_;
    std::vector<double> wall_times_;
    json records_ = json::array();
};

Cut resolve_cut(const Config& cfg, std::size_t n) {
    if (cfg.cut.empty()) return Cut::single(0, n);
    return Cut::parse(cfg.cut, n);
}

RoofOptions roof_options(const Config& cfg) {
    if (cfg.budget < 1) throw UsageError("--budget must be at least 1");
    RoofOptions ro;
    ro.budget = cfg.budget;
    return ro;
}

Dims parse_dims(const std::string& text) {
    std::vector<int> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            const int d = std::stoi(part, &used);
            if (used != part.size() || d < 1) throw std::invalid_argument(part);
            v.push_back(d);
        } catch (const std::exception&) {
            throw UsageError("--dims: '" + text + "' is not a comma-separated list of positive integers");
        }
    }
    if (v.size() != 3) throw UsageError("--dims: expected three subsystems");
    return Dims(v);
}

std::string bound_text(const BoundedValue& b) {
    char buf[96];
    if (b.is_exact())
        std::snprintf(buf, sizeof buf, "%.10g", b.lower);
    else
        std::snprintf(buf, sizeof buf, "[%.10g, %.10g]", b.lower, b.upper);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_measure(Session& s, const Config& cfg, bool assist) {
    const State st = s.load(cfg.state_path);
    const MeasureId m = MeasureId::parse(cfg.measure);
    const DensityOp rho = to_density(st);
    const Cut cut = resolve_cut(cfg, rho.dims().size());
    json inputs = {{"state", cfg.state_path}, {"cut", cut.to_string()}, {"measure", m.to_string()}};
    if (assist) {
        const RoofOptions ro = roof_options(cfg);
        inputs["budget"] = ro.budget;
        s.record("assist", inputs, [&] {
            const BoundedValue b = ea_estimate(rho, cut, m, ro, RngSeed{cfg.seed});
            json out = {{"assistance", bounds_json(b)}};
            if (rho.rank() > 1) {
                const RoofResult r = roof_optimize(rho, cut, m, RoofDirection::Max, ro, RngSeed{cfg.seed});
                out["ensemble"] = ensemble_summary(r.ensemble, rho, cut, m);
                out["evaluations"] = r.evaluations;
                out["converged"] = r.converged;
            }
            std::cerr << m.to_string() << " assistance " << cut.to_string() << ": " << bound_text(b) << '\n';
            return out;
        });
        return kOk;
    }
    s.record("measure", inputs, [&] {
        json out;
        if (const auto* k = std::get_if<Ket>(&st)) {
            const double v = pure_measure(m, *k, cut);
            out["value"] = v;
            out["pure"] = true;
            std::cerr << m.to_string() << " " << cut.to_string() << ": " << bound_text(BoundedValue::exact(v)) << '\n';
        } else {
            const BoundedValue b = entanglement_estimate(rho, cut, m, roof_options(cfg), RngSeed{cfg.seed});
            out["bounds"] = bounds_json(b);
            out["pure"] = false;
            if (b.is_exact()) out["value"] = b.lower;
            std::cerr << m.to_string() << " " << cut.to_string() << ": " << bound_text(b) << '\n';
        }
        return out;
    });
    return kOk;
}

int cmd_fpow(Session& s, const Config& cfg) {
    if (cfg.triple.size() != 3) throw UsageError("fpow: expected three values x y z");
    for (double v : cfg.triple)
        if (!(v >= 0)) throw UsageError("fpow: values must be nonnegative");
    s.record("fpow", {{"x", cfg.triple[0]}, {"y", cfg.triple[1]}, {"z", cfg.triple[2]}}, [&] {
        const FClassification f = classify_exponent(cfg.triple[0], cfg.triple[1], cfg.triple[2]);
        std::fprintf(stderr, "f = %s", to_string(f.kind).c_str());
        if (f.kind == FClassification::Kind::Defined) std::fprintf(stderr, "(%.6f)", f.gamma);
        std::fprintf(stderr, "\n");
        json fj = f_json(f);
        fj["certified"] = true;  // point values are taken as given
        return json{{"f", fj}};
    });
    return kOk;
}

int cmd_beta(Session& s, const Config& cfg) {
    const Dims dims = parse_dims(cfg.dims);
    const MeasureId m = MeasureId::parse(cfg.measure);
    if (cfg.samples < 1) throw UsageError("--samples must be at least 1");
    BetaOptions bo;
    bo.refine = cfg.refine;
    bo.analysis.roof = roof_options(cfg);
    bo.analysis.closed_form_two_qubit = true;

    std::optional<std::ofstream> jsonl;
    if (!cfg.jsonl_path.empty()) {
        jsonl.emplace(cfg.jsonl_path, std::ios::trunc);
        if (!*jsonl) throw IoError("cannot open " + cfg.jsonl_path);
    }
    json inputs = {{"dims", dims.vec()}, {"measure", m.to_string()}, {"assisted", cfg.assisted},
                   {"samples", cfg.samples}, {"refine", cfg.refine}};
    s.record("beta", inputs, [&] {
        const BetaEstimate est = beta_estimate(dims, m, cfg.assisted, cfg.samples, bo, RngSeed{cfg.seed},
                                               [&](const SampleRecord& r) {
                                                   if (!jsonl) return;
                                                   *jsonl << json{{"index", r.index}, {"x", r.x}, {"y", r.y}, {"z", r.z},
                                                                  {"f", f_json(r.f)}}
                                                                 .dump()
                                                          << std::endl;
                                                   if (!*jsonl) throw IoError("write failed for " + cfg.jsonl_path);
                                               });
        json out = {{"samples_used", est.samples_used}, {"defined_count", est.defined_count},
                    {"refined", est.refined}, {"violation", est.violation},
                    {"closed_form_rank_flag", est.closed_form_rank_flag}};
        out["beta_hat"] = est.beta_hat ? json(*est.beta_hat) : json(nullptr);
        if (est.beta_hat) out["sample_min"] = est.sample_min;
        if (est.argmin_state) out["argmin_state"] = json::parse(serialize_state(*est.argmin_state));
        std::fprintf(stderr, "beta_hat(%s%s, %s) = %s over %zu samples (%zu defined)%s\n", cfg.assisted ? "assisted " : "",
                     m.to_string().c_str(), cfg.dims.c_str(),
                     est.beta_hat ? std::to_string(*est.beta_hat).c_str() : "none", est.samples_used, est.defined_count,
                     est.violation ? ", violation found" : "");
        return out;
    });
    return kOk;
}

int cmd_check(Session& s, const Config& cfg) {
    if (cfg.check_kind != "polygamy" && cfg.check_kind != "monogamy")
        throw UsageError("check: kind must be 'polygamy' or 'monogamy'");
    const State st = s.load(cfg.state_path);
    const DensityOp rho = to_density(st);
    if (rho.dims().size() != 3) throw UsageError("check: state must have three subsystems");
    const MeasureId m = MeasureId::parse(cfg.measure);
    AnalysisOptions ao;
    ao.roof = roof_options(cfg);
    json inputs = {{"kind", cfg.check_kind}, {"state", cfg.state_path}, {"measure", m.to_string()},
                   {"assisted", cfg.assisted}, {"budget", ao.roof.budget}};
    s.record("check", inputs, [&] {
        const PowerTriple t = eval_triple(rho, m, cfg.assisted, ao, RngSeed{cfg.seed});
        json out = {{"triple", triple_json(t)}, {"f", f_json(polygamy_exponent(t, ao))}};
        std::string verdict;
        bool certified;
        if (cfg.check_kind == "polygamy") {
            const PolygamyVerdict v = check_polygamy_def1(t, ao.epsilon);
            verdict = to_string(v.kind);
            certified = v.certified;
        } else {
            const MonogamyVerdict v = check_monogamy_disentangling(t, ao.epsilon, ao.equality_tol);
            verdict = to_string(v.kind);
            certified = v.certified;
        }
        out["verdict"] = verdict;
        out["certified"] = certified;
        std::cerr << "x = " << bound_text(t.x) << ", y = " << bound_text(t.y) << ", z = " << bound_text(t.z) << '\n'
                  << cfg.check_kind << ": " << verdict << (certified ? " (certified)" : " (uncertified)") << '\n';
        return out;
    });
    return kOk;
}

int cmd_repro(Session& s, const Config& cfg) {
    if (!is_suite(cfg.suite)) throw UsageError("repro: unknown suite '" + cfg.suite + "'");
    bool ok = false;
    s.record("repro", {{"suite", cfg.suite}}, [&] {
        ReproOptions ro;
        ro.seed = RngSeed{cfg.seed};
        const SuiteReport r = run_suite(cfg.suite, ro);
        ok = r.passed();
        json checks = json::array();
        std::fprintf(stderr, "%s: %s\n", r.name.c_str(), r.title.c_str());
        for (const auto& c : r.checks) {
            checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            std::fprintf(stderr, "  %-4s %-60s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        }
        std::fprintf(stderr, "%zu/%zu checks pass (%.2f s, limit %.0f s)\n", r.passed_count(), r.checks.size(), r.seconds,
                     r.time_limit);
        return json{{"suite", r.name}, {"checks", checks}, {"passed", r.passed_count()}, {"total", r.checks.size()},
                    {"all_passed", ok}, {"time_limit", r.time_limit}};
    });
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpoly: entanglement measures, assistance and polygamy analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Config cfg;

    app.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    app.add_option("--out", cfg.out_path, "append the JSON document to this log");

    auto add_state = [&](CLI::App* c) { c->add_option("--state", cfg.state_path, "state file")->required(); };
    auto add_measure = [&](CLI::App* c) {
        c->add_option("--measure", cfg.measure, "concurrence|tangle|negativity|formation|tsallis:q|renyi:a")
            ->capture_default_str();
    };
    auto add_budget = [&](CLI::App* c) {
        c->add_option("--budget", cfg.budget, "roof optimizer evaluation budget")->capture_default_str();
    };

    auto* measure = app.add_subcommand("measure", "entanglement of a state across a cut");
    add_state(measure);
    measure->add_option("--cut", cfg.cut, "bipartition such as A|BC (default: first subsystem vs rest)");
    add_measure(measure);
    add_budget(measure);

    auto* assist = app.add_subcommand("assist", "entanglement of assistance across a cut");
    add_state(assist);
    assist->add_option("--cut", cfg.cut, "bipartition such as A|BC (default: first subsystem vs rest)");
    add_measure(assist);
    add_budget(assist);

    auto* fpow = app.add_subcommand("fpow", "polygamy exponent of a triple x y z");
    fpow->add_option("values", cfg.triple, "x y z")->expected(3)->required();

    auto* beta = app.add_subcommand("beta", "Monte-Carlo estimate of the polygamy power");
    beta->add_option("--dims", cfg.dims, "local dimensions a,b,c")->capture_default_str();
    add_measure(beta);
    beta->add_flag("--assisted", cfg.assisted, "use the entanglement of assistance");
    beta->add_option("--samples", cfg.samples, "number of samples")->capture_default_str();
    beta->add_flag("--refine", cfg.refine, "refine the minimizing sample");
    beta->add_option("--jsonl", cfg.jsonl_path, "stream per-sample records to this file");
    add_budget(beta);

    auto* check = app.add_subcommand("check", "polygamy or monogamy verdict for a tripartite state");
    check->add_option("kind", cfg.check_kind, "polygamy|monogamy")->required();
    add_state(check);
    add_measure(check);
    check->add_flag("--assisted", cfg.assisted, "use the entanglement of assistance");
    add_budget(check);

    auto* repro = app.add_subcommand("repro", "run a reproduction suite");
    std::string suites;
    for (const auto& n : suite_names()) suites += (suites.empty() ? "" : "|") + n;
    repro->add_option("suite", cfg.suite, suites)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    std::string command;
    for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);
    const json config = {{"seed", cfg.seed},     {"cut", cfg.cut},       {"measure", cfg.measure},
                         {"assisted", cfg.assisted}, {"dims", cfg.dims},   {"samples", cfg.samples},
                         {"budget", cfg.budget}, {"refine", cfg.refine}, {"triple", cfg.triple},
                         {"kind", cfg.check_kind}, {"suite", cfg.suite},
                         {"subcommand", app.get_subcommands().front()->get_name()}};

    Session session(command, cfg);
    try {
        int code = kOk;
        if (measure->parsed()) code = cmd_measure(session, cfg, false);
        if (assist->parsed()) code = cmd_measure(session, cfg, true);
        if (fpow->parsed()) code = cmd_fpow(session, cfg);
        if (beta->parsed()) code = cmd_beta(session, cfg);
        if (check->parsed()) code = cmd_check(session, cfg);
        if (repro->parsed()) code = cmd_repro(session, cfg);
        session.finish(config);
        return code;
    } catch (const IoError& e) {
        std::cerr << "qpoly: " << e.what() << '\n';
        return kIo;
    } catch (const UsageError& e) {
        std::cerr << "qpoly: " << e.what() << '\n';
        return kUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "qpoly: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "qpoly: " << e.what() << '\n';
        return kIo;
    }
}

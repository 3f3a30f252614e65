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

// Reproduction suites. Each suite runs a fixed, seeded experiment and reports
// a list of named checks; the CLI `repro` command and the acceptance test
// share these implementations.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qpoly/qcore.hpp"

namespace qpoly {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteReport {
    std::string name;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0;
    double time_limit = 0;  // seconds

    [[nodiscard]] std::size_t passed_count() const;
    [[nodiscard]] bool within_time() const { return seconds <= time_limit; }
    [[nodiscard]] bool passed() const { return passed_count() == checks.size() && within_time(); }
};

struct ReproOptions {
    RngSeed seed{0x5eed2026};
};

/// Names accepted by run_suite, in a stable order.
const std::vector<std::string>& suite_names();
bool is_suite(std::string_view name);
/// Throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(std::string_view name, const ReproOptions& options = {});

}  // namespace qpoly

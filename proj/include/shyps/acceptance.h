// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace shyps {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

/// Trial counts for the acceptance checks. `full()` is the configuration the acceptance binary runs;
/// `quick()` is a reduced subset for the CLI self-test.
struct AcceptanceConfig {
    size_t decomposition_trials_r3 = 1000;
    size_t decomposition_trials_r4 = 200;
    size_t clifford_factorizations = 100;
    size_t symmetric_products = 10000;
    bool all_phase_pairs = true;
    size_t cnot_generators = 200;
    size_t random_cliffords = 20;
    bool include_r5 = true;
    uint64_t seed = 2025;

    static AcceptanceConfig full() { return {}; }
    static AcceptanceConfig quick();
};

CheckResult check_code_parameters(const AcceptanceConfig &cfg);
CheckResult check_distance_oracle(const AcceptanceConfig &cfg);
CheckResult check_decomposition_theorems(const AcceptanceConfig &cfg);
CheckResult check_clifford_factorizations(const AcceptanceConfig &cfg);
CheckResult check_generator_verification(const AcceptanceConfig &cfg);
CheckResult check_end_to_end_compile(const AcceptanceConfig &cfg);
CheckResult check_gate_costs(const AcceptanceConfig &cfg);
CheckResult check_syndrome_extraction(const AcceptanceConfig &cfg);

/// Runs the checks whose ids are listed (all eight when empty), in id order.
std::vector<CheckResult> run_acceptance(const AcceptanceConfig &cfg, const std::vector<int> &ids = {});
std::string format_result(const CheckResult &r);

}  // namespace shyps

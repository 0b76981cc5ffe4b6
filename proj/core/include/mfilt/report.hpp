#pragma once

#include "mfilt/filtered_space.hpp"
#include "mfilt/norm_estimator.hpp"
#include "mfilt/positive_operator.hpp"
#include "mfilt/sawyer_testing.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfilt {

struct CheckResult {
    std::string name;
    std::string status;  // "pass", "fail" or "skipped"
    double slack = 0.0;  // worst observed ratio against the asserted bound
};

struct VerifyConfig {
    int i0 = 0;
    std::uint64_t seed = 1;
    int restarts = 8;
    int iters = 500;
    double tol = 1e-12;
    bool brute_force = false;  // run the exhaustive testing oracle even off the fast path
};

/// End-to-end verification of one instance: testing constants, operator-norm
/// lower bound, and every identity and inequality check, with slacks.
struct VerificationReport {
    std::string instance;
    std::uint64_t seed = 0;
    double p = 0.0, q = 0.0;
    double C2 = 0.0, C2_q = 0.0, C2_pprime = 0.0;
    double C1_lb = 0.0;
    std::optional<double> ratio;  // C1_lb / C2; nullopt when C2 == 0
    TestingWitness witness;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::string to_json() const;
};

VerificationReport run_verification(const FilteredSpace& space, const CoefficientFamily& alpha,
                                    const ExponentPair& ep, const VerifyConfig& config);

struct SweepShape {
    int n_levels = 3;
    int n_leaves = 8;
};

struct SweepConfig {
    std::vector<SweepShape> shapes;
    std::vector<std::pair<double, double>> exponents;
    int n_instances = 0;
    std::uint64_t seed = 1;
    int restarts = 4;
    int iters = 200;
};

struct SweepSummary {
    double min_ratio = 0.0;
    double median_ratio = 0.0;
    double max_ratio = 0.0;
    int n_defined = 0;  // rows where C2 > 0
    bool all_pass = true;
};

/// One CSV row per instance plus a trailing summary line; byte-identical for
/// identical inputs and seed. Parallelism is capped by MFILT_THREADS.
std::string run_sweep_csv(const SweepConfig& config, SweepSummary* summary = nullptr);

/// Thread cap from MFILT_THREADS, defaulting to hardware concurrency.
unsigned sweep_thread_cap();

}  // namespace mfilt

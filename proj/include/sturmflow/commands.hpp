#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sturmflow/em_pipeline.hpp"
#include "sturmflow/morse_pipeline.hpp"

namespace sturmflow {

/// Outcome of running both pipelines on the same (possibly regularized) problem.
struct VerifyReport {
    EmResult em;
    MorseResult morse;
    std::optional<double> delta;
    std::uint64_t seed = 0;

    bool agree() const { return em.index == morse.index; }
};

struct EmReport {
    EmResult em;
    std::optional<double> delta;
    std::uint64_t seed = 0;
};

struct MorseReport {
    MorseResult morse;
    std::optional<double> delta;
    std::uint64_t seed = 0;
};

/// With params.delta set, that shift is applied up front. Otherwise the raw
/// problem is tried first; on EndpointDegeneracyError or NonRegularCrossingError
/// up to five shifts are drawn uniformly from [1e-4, 1e-3] using params.seed,
/// and RegularizationError is thrown when all of them fail.
VerifyReport run_verify(const SturmProblem& problem, const PipelineParams& params = {});
EmReport run_em(const SturmProblem& problem, const PipelineParams& params = {});
MorseReport run_morse(const SturmProblem& problem, const PipelineParams& params = {});

std::string format_verify_json(const VerifyReport& report);
std::string format_em_json(const EmReport& report);
std::string format_morse_json(const MorseReport& report);
/// Header "lambda,kernel_dim,signature", one row per conjugate instant.
std::string format_conjugate_points_csv(const ConjugatePoints& points);

struct SweepRow {
    double param = 0.0;
    std::optional<int> em_index;
    std::optional<int> morse_index;
    std::optional<double> delta;
    std::string status;  // "agree", "disagree" or "error: ..."
};

/// Sets the number at `path` in the config to `steps` equally spaced values in
/// [from, to] (just `from` when steps == 1) and runs verify on each. Samples
/// run concurrently; rows come back sorted by parameter value.
std::vector<SweepRow> run_sweep(const std::string& config_text, const std::string& path, double from,
                                double to, int steps, const PipelineParams& params = {});
/// Header "param,em_index,morse_index,delta,status".
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sturmflow

#pragma once

#include <cstdint>
#include <optional>

#include "sturmflow/hermitian.hpp"

namespace sturmflow {

/// Settings shared by the EM and Morse pipelines.
struct PipelineParams {
    TolerancePolicy tol;
    int galerkin_N = 16;
    /// Fixed start of the EM path; certified automatically when empty.
    std::optional<double> epsilon;
    /// Zero-order shift applied by the command layer; drawn at random when needed.
    std::optional<double> delta;
    std::uint64_t seed = 0;
    int grid = 512;
};

}  // namespace sturmflow

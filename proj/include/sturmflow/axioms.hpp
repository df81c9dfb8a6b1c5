#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sturmflow {

struct AxiomCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AxiomOptions {
    std::uint64_t seed = 0;
    /// Test hook: flips every crossing form inside the index computation.
    bool negate_crossing_forms = false;
};

/// Localization, catenation and homotopy checks of the EM index on graph paths
/// in the standard space. Failures (including thrown errors) are reported, not thrown.
std::vector<AxiomCheck> run_axiom_battery(const AxiomOptions& options = {});

}  // namespace sturmflow

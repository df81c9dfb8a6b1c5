#pragma once

#include <functional>
#include <vector>

namespace sturmflow {

/// Hooks describing a one-parameter family with isolated degeneracies.
struct LocatorHooks {
    /// Nonnegative and near zero exactly at crossings.
    std::function<double(double)> indicator;
    /// Signed number of crossings in (lo, hi], from data at the endpoints only
    /// (an inertia difference or a winding count).
    std::function<int(double, double)> net_count;
    /// True when `net_count` cannot be trusted with t as an endpoint.
    std::function<bool(double)> ambiguous;
    /// Signature of the crossing form at a located crossing.
    std::function<int(double)> signature;
};

struct LocatorOptions {
    int grid = 512;
    /// A refined dip counts as a crossing when the indicator is at most this.
    double threshold = 1e-8;
    double t_tol = 1e-12;
    int subgrid = 64;
    int max_depth = 3;
};

/// Crossings of the family on [a, b], ascending.
///
/// Scans the indicator on a uniform grid, refines every local minimum by golden
/// section and keeps the refined points below the threshold. Each grid cell is
/// then checked against `net_count`; a mismatch triggers a finer search inside
/// the cell. Throws InconsistencyError when a mismatch survives max_depth levels.
std::vector<double> locate_crossings(const LocatorHooks& hooks, double a, double b,
                                     const LocatorOptions& options);

/// Minimizer of f on [lo, hi] by golden-section search.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double t_tol);

}  // namespace sturmflow

#pragma once

#include <vector>

#include "sturmflow/ode.hpp"
#include "sturmflow/params.hpp"
#include "sturmflow/superlag.hpp"

namespace sturmflow {

/// a(lambda): the solution space of l_lambda u = 0 mapped into C^{4mn} by
/// u -> (j^m u(0), A(0) j^{2m} u(0), j^m u(1), A(1) j^{2m} u(1)).
struct SolutionSpacePoint {
    double lambda = 0.0;
    /// All 2mn solutions with initial full jets e_k, one column each.
    SolutionHandle solutions;
    CMatrix frame;  // 4mn x 2mn
    IsotropyReport isotropy;
    /// max over x of |h(x) - h(0)| for the sesquilinear h on the basis, relative
    /// to max |j^m u| |A j^{2m} u|.
    double h_drift = 0.0;
};

/// Doubled standard space of dimension 4mn and the Dirichlet plane
/// {0} + C^{mn} + {0} + C^{mn}.
SuperhermitianSpace solution_ambient(int mn);
SuperlagFrame reference_plane(int mn);

/// Throws GeometryError when the frame is not isotropic or h drifts by more
/// than 1e-8 along x.
SolutionSpacePoint solution_path(const SturmProblem& problem, double lambda,
                                 const TolerancePolicy& tol = {});

/// The frame of a(lambda) from endpoint data only; no dense output.
CMatrix solution_frame(const SturmProblem& problem, double lambda, const TolerancePolicy& tol = {});

struct EpsilonCertificate {
    double epsilon = 0.0;
    /// min over the guard grid of sigma_min(W) / scale.
    double min_indicator = 0.0;
    int halvings = 0;
};

/// Largest epsilon = 2^{-k}/64, k <= 6, such that W(lambda) is nonsingular at
/// 128 grid points of (0, epsilon], each local minimum refined by golden section.
/// With `fixed`, only that value is tried.
/// Throws GuardError.
EpsilonCertificate epsilon_guard(const SturmProblem& problem, const TolerancePolicy& tol = {},
                                 std::optional<double> fixed = std::nullopt);

/// Gamma[a][b] = int_0^1 sum_ij <D^i u_a, d/dlambda omega^lambda_ij D^j u_b> dx.
HermMatrix crossing_form_analytic(const SturmProblem& problem, double lambda0,
                                  const std::vector<SolutionHandle>& kernel);

struct CrossingCheck {
    HermMatrix geometric;  // numeric form in the kernel-solution basis
    Inertia geometric_inertia;
    /// max entry difference to the analytic form, relative to its largest entry.
    double entry_error = 0.0;
};

struct ConjugatePoints {
    double epsilon = 0.0;
    std::vector<CrossingRecord> crossings;  // ascending lambda
    std::vector<CrossingCheck> checks;       // parallel to crossings
};

/// Conjugate instants in [epsilon, 1) with their analytic crossing forms, each
/// cross-checked against the geometric crossing form of a(lambda). Throws
/// EndpointDegeneracyError when lambda = 1 is conjugate, NonRegularCrossingError
/// for degenerate crossing forms and InconsistencyError when the two forms
/// disagree or the winding count contradicts the located crossings.
ConjugatePoints conjugate_points(const SturmProblem& problem, const PipelineParams& params = {});

struct EmResult {
    int index = 0;
    ConjugatePoints points;
};

EmResult em_index_of_form(const SturmProblem& problem, const PipelineParams& params = {});

}  // namespace sturmflow

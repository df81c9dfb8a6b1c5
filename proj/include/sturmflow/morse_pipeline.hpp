#pragma once

#include <optional>
#include <vector>

#include "sturmflow/params.hpp"
#include "sturmflow/sturm_form.hpp"
#include "sturmflow/superlag.hpp"

namespace sturmflow {

/// phi_k(x) = x^m (1-x)^m L_k(2x - 1) / |D^m phi_k|, k < N, tensored with the n
/// coordinate directions (index k * n + alpha).
class GalerkinBasis {
public:
    GalerkinBasis(int m, int n, int count);

    int m() const { return m_; }
    int n() const { return n_; }
    int count() const { return count_; }
    int size() const { return count_ * n_; }
    /// Polynomial degree of phi_k for the largest k.
    int degree() const { return 2 * m_ + count_ - 1; }

    /// Row d, column k: D^d phi_k(x) for d = 0..order.
    Eigen::MatrixXd derivatives(double x, int order) const;

private:
    Eigen::MatrixXd raw(double x, int order) const;

    int m_, n_, count_;
    Eigen::VectorXd scale_;
};

/// G_N(lambda)[a][b] = q_lambda(phi_a, phi_b), exact Gauss-Legendre quadrature.
HermMatrix gram(const SturmProblem& problem, double lambda, int count);
/// d/dlambda G_N(lambda) from the exact derivative of the rescaled coefficients.
HermMatrix gram_derivative(const SturmProblem& problem, double lambda, int count);

/// n_minus(G_N(0)) - n_minus(G_N(1)). Throws EndpointDegeneracyError when either
/// endpoint matrix is singular.
int spectral_flow_inertia(const SturmProblem& problem, int count, const TolerancePolicy& tol = {});

struct SpectralFlowCrossings {
    int index = 0;
    std::vector<CrossingRecord> crossings;
};

/// Sum of crossing-form signatures of the discrete family. Throws
/// NonRegularCrossingError for degenerate discrete crossings and
/// InconsistencyError when the located crossings do not explain the inertia change.
SpectralFlowCrossings spectral_flow_crossings(const SturmProblem& problem, int count,
                                              const PipelineParams& params = {});

struct MorseResult {
    int index = 0;
    /// Smallest N of the stable triple N, N+4, N+8.
    int galerkin_N = 0;
    std::vector<int> indices;  // at N, N+4, N+8
    SpectralFlowCrossings crossings;  // at N+8
    /// n_minus(G_N(1)) when nu = 0, where G_N(0) is positive definite.
    std::optional<int> classical_morse_index;
};

/// Starting at params.galerkin_N, shifts the triple N, N+4, N+8 up by 4 until
/// the three inertia indices agree; throws ConvergenceError past N + 8 = 32
/// (or past params.galerkin_N + 8 when that is larger).
MorseResult morse_index(const SturmProblem& problem, const PipelineParams& params = {});

/// omega00 + (3 delta / 2) I. Throws DomainError for negative delta.
SturmProblem delta_regularize(const SturmProblem& problem, double delta);

}  // namespace sturmflow

#pragma once

#include <memory>
#include <vector>

#include "sturmflow/sturm_form.hpp"

namespace sturmflow {

/// First-order companion form y' = M(x) y of l(x, D) u = 0 acting on the
/// stacked jet y = (u, u', ..., u^{(2m-1)}) in C^{2mn}.
class FirstOrderSystem {
public:
    explicit FirstOrderSystem(OperatorCoefficients op);

    int m() const { return op_.m; }
    int n() const { return op_.n; }
    int dim() const { return 2 * op_.m * op_.n; }

    CMatrix matrix(double x) const { return companion_(x); }
    const MatrixPolynomial& companion() const { return companion_; }
    const OperatorCoefficients& op() const { return op_; }

private:
    OperatorCoefficients op_;
    MatrixPolynomial companion_;
};

/// Companion system of l_lambda, i.e. of the operator whose coefficients are
/// p_k(lambda x) lambda^{2m-k}. `coeffs` are those of the unscaled operator.
FirstOrderSystem to_first_order(const OperatorCoefficients& coeffs, double lambda);

/// Dense solution of y' = M(x) y for one or several initial jets (columns).
class SolutionHandle {
public:
    SolutionHandle(std::shared_ptr<const FirstOrderSystem> system, std::vector<double> nodes,
                   std::vector<CMatrix> states, double rel_tol);

    /// Stacked jets at x, one column per initial condition. Between accepted
    /// steps the state comes from a single partial step of the same RK pair.
    CMatrix state(double x) const;
    /// Jet of column `col` at x: (u, ..., u^{(2m-1)}).
    CVector jet(double x, Eigen::Index col = 0) const;

    const CMatrix& initial() const { return states_.front(); }
    const CMatrix& final_state() const { return states_.back(); }
    double x_begin() const { return nodes_.front(); }
    double x_end() const { return nodes_.back(); }
    const std::vector<double>& nodes() const { return nodes_; }
    const FirstOrderSystem& system() const { return *system_; }

    /// Relative residual |y'(x) - M(x) y(x)| / (|M(x)| |y(x)|) with y' from a
    /// five-point difference of the dense output.
    double residual(double x, Eigen::Index col = 0) const;

private:
    std::shared_ptr<const FirstOrderSystem> system_;
    std::vector<double> nodes_;
    std::vector<CMatrix> states_;
    double rel_tol_;
};

/// Adaptive Dormand-Prince 5(4) integration with relative tolerance tol.integ_rel_tol
/// and absolute floor 1e-13, both measured per column. Throws IntegrationError on
/// step-size underflow.
SolutionHandle integrate(std::shared_ptr<const FirstOrderSystem> system, double x0, double x1,
                         const CMatrix& initial, const TolerancePolicy& tol = {});

/// Same integration without dense storage; returns the state at x1.
CMatrix integrate_endpoint(const FirstOrderSystem& system, double x0, double x1,
                           const CMatrix& initial, const TolerancePolicy& tol = {});

/// W(lambda): columns j^m u_k(1) for the solutions of l_lambda u = 0 with
/// j^m u_k(0) = 0 and upper jet (u^{(m)}, ..., u^{(2m-1)})(0) = e_k.
struct ShootingMatrix {
    double lambda = 0.0;
    CMatrix w;
    /// Full jets at x = 1 of the same solutions (2mn x mn); w is its upper block.
    CMatrix endpoint_jets;
    RVector singular_values;  // descending
    double sigma_min() const { return singular_values.size() ? singular_values.tail(1)(0) : 0.0; }
    /// Normalization for singularity decisions: largest singular value of endpoint_jets.
    double scale = 1.0;
    double relative_sigma_min() const { return sigma_min() / scale; }
};

ShootingMatrix shooting_matrix(const SturmProblem& problem, double lambda,
                               const TolerancePolicy& tol = {});
ShootingMatrix shooting_matrix(const OperatorCoefficients& coeffs, double lambda,
                               const TolerancePolicy& tol = {});

/// Independent solutions spanning the Dirichlet kernel at a conjugate instant.
/// Throws EmptyKernelError when W(lambda0) is nonsingular.
std::vector<SolutionHandle> kernel_solutions(const SturmProblem& problem, double lambda0,
                                             const TolerancePolicy& tol = {});

}  // namespace sturmflow

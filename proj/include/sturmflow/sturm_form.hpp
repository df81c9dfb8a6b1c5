#pragma once

#include <string>
#include <vector>

#include "sturmflow/matrix_polynomial.hpp"

namespace sturmflow {

/// Table of n x n matrix polynomials w(i, j), 0 <= i, j <= m, defining
///   Omega(x)[v, u] = sum_{i,j} <D^i v(x), w(i, j)(x) D^j u(x)>.
class FormCoefficients {
public:
    FormCoefficients() = default;
    FormCoefficients(int m, int n);

    int m() const { return m_; }
    int n() const { return n_; }

    MatrixPolynomial& at(int i, int j) { return entries_[index(i, j)]; }
    const MatrixPolynomial& at(int i, int j) const { return entries_[index(i, j)]; }

    int max_degree() const;

    /// Omega(x)[v, u] for jets v, u stored as stacked blocks (D^0, D^1, ...) of length >= (m+1) n.
    Complex density(double x, const CVector& jet_v, const CVector& jet_u) const;

private:
    std::size_t index(int i, int j) const;

    int m_ = 0;
    int n_ = 0;
    std::vector<MatrixPolynomial> entries_;
};

/// diag(I_{n - nu}, -I_nu).
CMatrix leading_symmetry(int n, int nu);

/// A generalized Sturm form: half-order m, system size n, signature index nu and
/// coefficients omega with omega(m, m) = diag(I_{n-nu}, -I_nu).
struct SturmProblem {
    int m = 1;
    int n = 1;
    int nu = 0;
    FormCoefficients omega;

    SturmProblem() = default;
    SturmProblem(int m_, int n_, int nu_) : m(m_), n(n_), nu(nu_), omega(m_, n_) {}

    CMatrix symmetry() const { return leading_symmetry(n, nu); }
};

/// Every violated invariant, one message each; empty when the problem is valid.
std::vector<std::string> diagnose(const SturmProblem& problem);

/// Throws ValidationError carrying diagnose(problem) when it is nonempty.
const SturmProblem& validate(const SturmProblem& problem);

/// Coefficients of l(x, D) u = sum_k p_k(x) D^k u, k = 0..2m, obtained from
/// l u = sum_{i,j} (-1)^i D^i (omega_ij D^j u). The leading coefficient
/// p_{2m} = leading_sign * symmetry with leading_sign = (-1)^m.
struct OperatorCoefficients {
    int m = 0;
    int n = 0;
    int leading_sign = 1;
    CMatrix symmetry;
    std::vector<MatrixPolynomial> p;

    /// p_k(lambda x) lambda^{2m-k}: the operator of the form rescaled by lambda.
    OperatorCoefficients rescaled(double lambda) const;

    /// (l u)(x) for a 2m+1 jet (u, u', ..., u^{(2m)}) stored as stacked blocks.
    CVector apply(double x, const CVector& jet) const;
};

OperatorCoefficients assemble_operator(const SturmProblem& problem);

/// Block matrix A(x) : C^{2mn} -> C^{mn} collecting the integration-by-parts
/// boundary terms, phi(v, u) = [<j^m v(x), A(x) j^{2m} u(x)>]_{x=0}^{1}.
struct BoundaryMap {
    int m = 0;
    int n = 0;
    std::vector<MatrixPolynomial> blocks;  // row-major, m x 2m

    MatrixPolynomial& at(int j, int k) { return blocks[j * 2 * m + k]; }
    const MatrixPolynomial& at(int j, int k) const { return blocks[j * 2 * m + k]; }

    CMatrix operator()(double x) const;
};

BoundaryMap assemble_boundary_map(const SturmProblem& problem);

/// omega^lambda_ij(x) = lambda^{2m-(i+j)} omega_ij(lambda x). Throws DomainError
/// for lambda outside [0, 1].
SturmProblem rescale(const SturmProblem& problem, double lambda);

/// d/dlambda of the rescaled table, exact.
FormCoefficients rescale_derivative(const SturmProblem& problem, double lambda);

}  // namespace sturmflow

#pragma once

#include <vector>

#include "sturmflow/hermitian.hpp"

namespace sturmflow {

/// Polynomial in x with complex rows x cols matrix coefficients.
/// coefficient(p) multiplies x^p. Differentiation and substitution x -> c*x are exact.
class MatrixPolynomial {
public:
    MatrixPolynomial() = default;
    MatrixPolynomial(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

    static MatrixPolynomial constant(const CMatrix& c);
    static MatrixPolynomial zero(Eigen::Index n) { return {n, n}; }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    /// Adds coeff * x^power.
    void add_term(int power, const CMatrix& coeff);
    CMatrix coefficient(int power) const;
    const std::vector<CMatrix>& coefficients() const { return coeffs_; }

    CMatrix operator()(double x) const;

    MatrixPolynomial derivative(int order = 1) const;
    /// x -> p(c * x).
    MatrixPolynomial scaled_argument(double c) const;

    MatrixPolynomial& operator+=(const MatrixPolynomial& other);
    MatrixPolynomial& operator*=(Complex s);
    friend MatrixPolynomial operator+(MatrixPolynomial a, const MatrixPolynomial& b) { return a += b; }
    friend MatrixPolynomial operator*(Complex s, MatrixPolynomial a) { return a *= s; }
    /// Right multiplication of every coefficient by a constant matrix.
    MatrixPolynomial times(const CMatrix& right) const;
    /// Left multiplication of every coefficient by a constant matrix.
    MatrixPolynomial left_times(const CMatrix& left) const;

    bool is_zero() const { return coeffs_.empty(); }
    /// Largest |coefficient entry|.
    double max_abs() const;

private:
    void trim();

    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    std::vector<CMatrix> coeffs_;
};

}  // namespace sturmflow

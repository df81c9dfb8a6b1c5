#include "sturmflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sturmflow/errors.hpp"

namespace sturmflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kAbsFloor = 1e-13;

struct StepResult {
    CMatrix y;
    CMatrix k7;  // derivative at the new point (FSAL)
    double err = 0.0;
};

StepResult dp_step(const FirstOrderSystem& sys, double x, const CMatrix& y, const CMatrix& k1,
                   double h, double rtol)
{
    const CMatrix k2 = sys.matrix(x + c2 * h) * (y + h * a21 * k1);
    const CMatrix k3 = sys.matrix(x + c3 * h) * (y + h * (a31 * k1 + a32 * k2));
    const CMatrix k4 = sys.matrix(x + c4 * h) * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const CMatrix k5 =
        sys.matrix(x + c5 * h) * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const CMatrix k6 =
        sys.matrix(x + h) * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    StepResult r;
    r.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    r.k7 = sys.matrix(x + h) * r.y;
    const CMatrix e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * r.k7);
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const double scale =
            kAbsFloor + rtol * std::max(y.col(c).cwiseAbs().maxCoeff(), r.y.col(c).cwiseAbs().maxCoeff());
        r.err = std::max(r.err, e.col(c).cwiseAbs().maxCoeff() / scale);
    }
    return r;
}

template <typename OnAccept>
void drive(const FirstOrderSystem& sys, double x0, double x1, const CMatrix& initial,
           const TolerancePolicy& tol, OnAccept&& on_accept)
{
    if (initial.rows() != sys.dim()) {
        throw DomainError("initial jet has " + std::to_string(initial.rows()) +
                          " rows, system dimension is " + std::to_string(sys.dim()));
    }
    const double span = x1 - x0;
    if (span == 0.0) return;
    const double dir = span > 0 ? 1.0 : -1.0;
    const double rtol = tol.integ_rel_tol;
    const double hmin = 1e-14 * std::max(1.0, std::abs(span));

    double x = x0;
    CMatrix y = initial;
    CMatrix k1 = sys.matrix(x) * y;
    // Initial step from the size of M.
    const double mnorm = std::max(1.0, sys.matrix(x0).cwiseAbs().rowwise().sum().maxCoeff());
    double h = dir * std::min(std::abs(span), std::pow(rtol, 0.2) / mnorm);

    while ((x1 - x) * dir > 0) {
        if ((x + h - x1) * dir > 0) h = x1 - x;
        const StepResult r = dp_step(sys, x, y, k1, h, rtol);
        if (r.err <= 1.0 || std::abs(h) <= hmin) {
            if (r.err > 1.0) {
                char buf[128];
                std::snprintf(buf, sizeof buf,
                              "step size underflow at x = %.17g (error ratio %.3g)", x, r.err);
                throw IntegrationError(buf);
            }
            const bool last = std::abs(x1 - (x + h)) <= 1e-15 * std::max(1.0, std::abs(x1));
            x = last ? x1 : x + h;
            y = r.y;
            k1 = r.k7;
            on_accept(x, y);
            const double fac = r.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(r.err, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            h *= std::clamp(0.9 * std::pow(r.err, -0.2), 0.1, 0.9);
        }
        if (std::abs(h) < hmin) h = dir * hmin;
    }
}

}  // namespace

FirstOrderSystem::FirstOrderSystem(OperatorCoefficients op) : op_(std::move(op))
{
    const int m = op_.m, n = op_.n, d = 2 * m * n;
    companion_ = MatrixPolynomial(d, d);
    CMatrix shift = CMatrix::Zero(d, d);
    for (int k = 0; k + 1 < 2 * m; ++k) shift.block(k * n, (k + 1) * n, n, n).setIdentity();
    companion_.add_term(0, shift);
    // D^{2m} u = -(leading)^{-1} sum_{k<2m} p_k D^k u, and (s J)^{-1} = s J.
    const CMatrix inv_lead = static_cast<double>(op_.leading_sign) * op_.symmetry;
    for (int k = 0; k < 2 * m; ++k) {
        const auto& pk = op_.p[k];
        for (int p = 0; p <= pk.degree(); ++p) {
            CMatrix term = CMatrix::Zero(d, d);
            term.block((2 * m - 1) * n, k * n, n, n) = -inv_lead * pk.coefficient(p);
            companion_.add_term(p, term);
        }
    }
}

FirstOrderSystem to_first_order(const OperatorCoefficients& coeffs, double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
    return FirstOrderSystem(coeffs.rescaled(lambda));
}

SolutionHandle::SolutionHandle(std::shared_ptr<const FirstOrderSystem> system,
                               std::vector<double> nodes, std::vector<CMatrix> states,
                               double rel_tol)
    : system_(std::move(system)), nodes_(std::move(nodes)), states_(std::move(states)),
      rel_tol_(rel_tol)
{
}

CMatrix SolutionHandle::state(double x) const
{
    const bool forward = nodes_.back() >= nodes_.front();
    const double lo = std::min(nodes_.front(), nodes_.back());
    const double hi = std::max(nodes_.front(), nodes_.back());
    if (x < lo - 1e-14 || x > hi + 1e-14) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "x = %.17g outside the integrated range [%g, %g]", x, lo, hi);
        throw DomainError(buf);
    }
    // index of the last node not beyond x in the integration direction
    std::size_t k;
    if (forward) {
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
        k = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    } else {
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x, std::greater<double>());
        k = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    }
    const double h = x - nodes_[k];
    if (h == 0.0) return states_[k];
    const CMatrix k1 = system_->matrix(nodes_[k]) * states_[k];
    return dp_step(*system_, nodes_[k], states_[k], k1, h, rel_tol_).y;
}

CVector SolutionHandle::jet(double x, Eigen::Index col) const { return state(x).col(col); }

double SolutionHandle::residual(double x, Eigen::Index col) const
{
    const double lo = std::min(x_begin(), x_end()), hi = std::max(x_begin(), x_end());
    const double step = 1e-3 * (hi - lo);
    const double xc = std::clamp(x, lo + 2 * step, hi - 2 * step);
    const CVector ym2 = jet(xc - 2 * step, col), ym1 = jet(xc - step, col);
    const CVector yp1 = jet(xc + step, col), yp2 = jet(xc + 2 * step, col);
    const CVector dy = (ym2 - 8.0 * ym1 + 8.0 * yp1 - yp2) / (12.0 * step);
    const CMatrix mx = system_->matrix(xc);
    const CVector y = jet(xc, col);
    const double denom = std::max(1e-300, mx.norm() * y.norm());
    return (dy - mx * y).norm() / denom;
}

SolutionHandle integrate(std::shared_ptr<const FirstOrderSystem> system, double x0, double x1,
                         const CMatrix& initial, const TolerancePolicy& tol)
{
    std::vector<double> nodes{x0};
    std::vector<CMatrix> states{initial};
    drive(*system, x0, x1, initial, tol, [&](double x, const CMatrix& y) {
        nodes.push_back(x);
        states.push_back(y);
    });
    return SolutionHandle(std::move(system), std::move(nodes), std::move(states), tol.integ_rel_tol);
}

CMatrix integrate_endpoint(const FirstOrderSystem& system, double x0, double x1,
                           const CMatrix& initial, const TolerancePolicy& tol)
{
    CMatrix last = initial;
    drive(system, x0, x1, initial, tol, [&](double, const CMatrix& y) { last = y; });
    return last;
}

ShootingMatrix shooting_matrix(const OperatorCoefficients& coeffs, double lambda,
                               const TolerancePolicy& tol)
{
    const int m = coeffs.m, n = coeffs.n, mn = m * n;
    const FirstOrderSystem sys = to_first_order(coeffs, lambda);
    CMatrix init = CMatrix::Zero(2 * mn, mn);
    init.bottomRows(mn).setIdentity();
    ShootingMatrix s;
    s.lambda = lambda;
    s.endpoint_jets = integrate_endpoint(sys, 0.0, 1.0, init, tol);
    s.w = s.endpoint_jets.topRows(mn);
    Eigen::JacobiSVD<CMatrix> svd(s.w);
    s.singular_values = svd.singularValues();
    Eigen::JacobiSVD<CMatrix> full(s.endpoint_jets);
    s.scale = std::max(full.singularValues()(0), 1e-300);
    return s;
}

ShootingMatrix shooting_matrix(const SturmProblem& problem, double lambda, const TolerancePolicy& tol)
{
    return shooting_matrix(assemble_operator(problem), lambda, tol);
}

std::vector<SolutionHandle> kernel_solutions(const SturmProblem& problem, double lambda0,
                                             const TolerancePolicy& tol)
{
    const OperatorCoefficients op = assemble_operator(problem);
    const int mn = problem.m * problem.n;
    const ShootingMatrix s = shooting_matrix(op, lambda0, tol);
    Eigen::JacobiSVD<CMatrix> svd(s.w, Eigen::ComputeFullV);
    const RVector sv = svd.singularValues();
    const double thr = tol.shooting_tol() * s.scale;
    auto system = std::make_shared<const FirstOrderSystem>(to_first_order(op, lambda0));
    std::vector<SolutionHandle> out;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv[k] > thr) continue;
        CMatrix init = CMatrix::Zero(2 * mn, 1);
        init.bottomRows(mn) = svd.matrixV().col(k);
        out.push_back(integrate(system, 0.0, 1.0, init, tol));
    }
    if (out.empty()) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "lambda = %.17g is not a conjugate instant (relative sigma_min %.3g)", lambda0,
                      s.relative_sigma_min());
        throw EmptyKernelError(buf);
    }
    return out;
}

}  // namespace sturmflow

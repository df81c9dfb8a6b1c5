#include "sturmflow/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "sturmflow/errors.hpp"
#include "sturmflow/ode.hpp"

namespace sturmflow {

int oracle_zero_count(const SturmProblem& problem, const TolerancePolicy& tol)
{
    if (problem.m != 1 || problem.n != 1 || problem.nu != 0)
        throw DomainError("the zero-count oracle needs m = 1, n = 1, nu = 0");
    validate(problem);
    auto system = std::make_shared<const FirstOrderSystem>(assemble_operator(problem));
    CMatrix init(2, 1);
    init << 0.0, 1.0;
    const SolutionHandle u = integrate(system, 0.0, 1.0, init, tol);

    // accepted nodes plus a uniform grid; a zero at x = 1 is not interior
    std::vector<double> xs;
    constexpr int grid = 4096;
    for (int k = 1; k < grid; ++k) xs.push_back(static_cast<double>(k) / grid);
    for (double x : u.nodes())
        if (x > 0.0 && x < 1.0) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    const CVector end = u.final_state().col(0);
    const double scale = end.norm();
    if (std::abs(end(0).real()) > tol.shooting_tol() * scale) xs.push_back(1.0);

    int changes = 0;
    double prev = 1.0;  // u > 0 just right of 0
    for (double x : xs) {
        const double v = u.jet(x)(0).real();
        if (v == 0.0) continue;
        if ((v < 0) != (prev < 0)) ++changes;
        prev = v;
    }
    return changes;
}

}  // namespace sturmflow

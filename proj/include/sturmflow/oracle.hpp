#pragma once

#include "sturmflow/sturm_form.hpp"

namespace sturmflow {

/// Classical scalar case (m = n = 1, nu = 0): interior sign changes on (0, 1) of
/// the solution with u(0) = 0, u'(0) = 1. Throws DomainError for other problems.
int oracle_zero_count(const SturmProblem& problem, const TolerancePolicy& tol = {});

}  // namespace sturmflow

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sturmflow/hermitian.hpp"

namespace sturmflow {

/// C^{2N} with a nondegenerate Hermitian form h(a, b) = <a, H b> of signature zero.
class SuperhermitianSpace {
public:
    /// Throws SymmetryError for a non-Hermitian matrix and GeometryError unless
    /// the inertia is (N, N, 0).
    explicit SuperhermitianSpace(CMatrix structure);

    int dim() const { return static_cast<int>(h_.rows()); }
    int half_dim() const { return dim() / 2; }
    const CMatrix& structure() const { return h_; }

    Complex h(const CVector& a, const CVector& b) const { return a.dot(h_ * b); }
    double h(const CVector& z) const { return h(z, z).real(); }

    /// Unitary U with L = {z_- = U z_+} in coordinates that diagonalize h as
    /// |z_+|^2 - |z_-|^2. Requires an isotropic N-dimensional L.
    CMatrix unitary(const CMatrix& frame) const;

private:
    CMatrix h_;
    CMatrix plus_;   // rows: sqrt(mu) v* for positive eigenvalues
    CMatrix minus_;  // same for negative eigenvalues
};

/// h = Im <xi, eta> on C^N + C^N.
SuperhermitianSpace standard_space(int n);

/// (S + S, -h + h).
SuperhermitianSpace doubled_space(const SuperhermitianSpace& base);

struct IsotropyReport {
    double residual = 0.0;  // max |F* H F| entry
    double bound = 0.0;     // 1e-8 |H| |F|^2
    bool isotropic = false;
};

/// Throws GeometryError when the frame is not N columns of full rank.
IsotropyReport is_superlagrangian(const CMatrix& frame, const SuperhermitianSpace& space,
                                  const TolerancePolicy& tol = {});

/// A superlagrangian subspace, stored through an orthonormal basis.
class SuperlagFrame {
public:
    /// Throws GeometryError for rank-deficient or non-isotropic frames.
    SuperlagFrame(const SuperhermitianSpace& space, const CMatrix& frame,
                  const TolerancePolicy& tol = {});

    const CMatrix& basis() const { return q_; }
    const SuperhermitianSpace& space() const { return space_; }
    /// Isotropy residual of the frame as handed to the constructor.
    const IsotropyReport& report() const { return report_; }

private:
    SuperhermitianSpace space_;
    CMatrix q_;
    IsotropyReport report_;
};

/// Standard space pieces: {(u, 0)}, {(0, u)} and {(u, T u)}.
SuperlagFrame base_plane(int n);
SuperlagFrame fiber_plane(int n);
SuperlagFrame graph_frame(const CMatrix& t, const TolerancePolicy& tol = {});

/// Largest principal angle between two subspaces of equal dimension.
double max_principal_angle(const SuperlagFrame& a, const SuperlagFrame& b);

struct Intersection {
    int dimension = 0;
    CMatrix basis;            // orthonormal columns
    RVector singular_values;  // of [P, -P0], ascending
};

/// P cap P0 from the null space of the stacked orthonormal frames. A singular
/// value counts as zero below tol.rank_rel_tol.
Intersection intersection(const SuperlagFrame& p, const SuperlagFrame& p0,
                          const TolerancePolicy& tol = {});

/// Smallest singular value of the stacked frames; zero exactly when P meets P0.
double intersection_indicator(const SuperlagFrame& p, const SuperlagFrame& p0);

/// Hermitian matrix of the chart of P with respect to the splitting P0 + P1:
/// with P = {E0 x + E1 T x}, the matrix is 2i (E0* H E1) T, so that for
/// v = E0 c + E1 T c one has c* M c = -2 Im h(E0 c, v). Throws GeometryError
/// when P is not transverse to P1 or P0, P1 are not complementary.
HermMatrix chart(const SuperlagFrame& p, const SuperlagFrame& p0, const SuperlagFrame& p1);

/// Random superlagrangian complementary to p0 and transverse to every frame in
/// `avoid` (smallest singular value of the stacked frames above 1e-3). Throws
/// GeometryError after 64 failed draws.
SuperlagFrame random_complement(const SuperlagFrame& p0, const std::vector<SuperlagFrame>& avoid,
                                std::mt19937_64& rng);

class SuperlagPath {
public:
    using Evaluator = std::function<SuperlagFrame(double)>;

    SuperlagPath(SuperhermitianSpace space, double a, double b, Evaluator eval);

    double a() const { return a_; }
    double b() const { return b_; }
    const SuperhermitianSpace& space() const { return space_; }
    SuperlagFrame operator()(double t) const { return eval_(t); }

    /// Largest principal angle between consecutive samples of a uniform grid.
    double max_step_angle(int samples) const;

private:
    SuperhermitianSpace space_;
    double a_, b_;
    Evaluator eval_;
};

/// Path t -> graph(T(t)) in the standard space.
SuperlagPath graph_path(std::function<CMatrix(double)> t, int n, double a, double b);

struct NumericCrossingForm {
    HermMatrix form;          // on `basis`
    CMatrix basis;            // orthonormal basis of p(t0) cap P0
    double richardson_gap = 0.0;  // |D(h) - D(h/2)| relative to |D(h/2)|
};

/// Crossing form of the path at t0 from the chart derivative, by central
/// differences at step and step/2 combined by Richardson extrapolation. The
/// complement P1 is drawn from a generator seeded with `seed`.
NumericCrossingForm crossing_form_numeric(const SuperlagPath& path, const SuperlagFrame& p0,
                                          double t0, double step, std::uint64_t seed = 0,
                                          const TolerancePolicy& tol = {});

/// Conjugate instant or crossing of a path, with its crossing form.
struct CrossingRecord {
    double lambda = 0.0;
    int kernel_dim = 0;
    HermMatrix form;
    Inertia inertia;
    bool regular = false;

    int signature() const { return inertia.signature(); }
};

/// Unitary V = U_0* U_P, where U_X is the unitary of X. Its eigenvalues equal
/// to 1 correspond to the directions of P cap P0.
CMatrix relative_unitary(const SuperlagFrame& p, const SuperlagFrame& p0);

/// Eigenvalue phases of a unitary matrix in [0, 2pi), ascending.
RVector unitary_phases(const CMatrix& v);

/// Distance of the closest eigenvalue phase to 0 mod 2pi.
double phase_gap(const CMatrix& v);

/// Signed number of eigenvalues of v(t) passing through 1 on (lo, hi];
/// counterclockwise passages count +1, which is the sign of a positive
/// crossing form. Both endpoints must have phase_gap well above zero.
int winding_count(const std::function<CMatrix(double)>& v, double lo, double hi);

struct EmIndexOptions {
    int grid = 512;
    std::uint64_t seed = 0;
    /// Finite-difference step for crossing forms, relative to the interval length.
    double step_fraction = 1e-4;
    /// Test hook: flips every crossing form.
    bool negate_crossing_forms = false;
};

struct EmIndexResult {
    int index = 0;
    std::vector<CrossingRecord> crossings;
};

/// EM index of the path relative to P0: the sum of the signatures
/// of the crossing forms. Throws AdmissibilityError when an endpoint meets P0,
/// NonRegularCrossingError when a crossing form is degenerate.
EmIndexResult em_index(const SuperlagPath& path, const SuperlagFrame& p0,
                       const TolerancePolicy& tol = {}, const EmIndexOptions& options = {});

}  // namespace sturmflow

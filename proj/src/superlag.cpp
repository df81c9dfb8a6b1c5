#include "sturmflow/superlag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include "sturmflow/errors.hpp"
#include "sturmflow/locator.hpp"

namespace sturmflow {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

CMatrix orthonormalize(const CMatrix& f)
{
    Eigen::HouseholderQR<CMatrix> qr(f);
    return qr.householderQ() * CMatrix::Identity(f.rows(), f.cols());
}

void check_rank(const CMatrix& frame, int n, const TolerancePolicy& tol)
{
    if (frame.cols() != n) {
        throw GeometryError("superlagrangian frame needs " + std::to_string(n) + " columns, got " +
                            std::to_string(frame.cols()));
    }
    Eigen::JacobiSVD<CMatrix> svd(frame);
    const RVector s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= tol.rank_rel_tol * std::max(s(0), 1e-300)) {
        throw GeometryError("frame is rank deficient");
    }
}

double wrap(double a)
{
    while (a > std::numbers::pi) a -= two_pi;
    while (a <= -std::numbers::pi) a += two_pi;
    return a;
}

}  // namespace

SuperhermitianSpace::SuperhermitianSpace(CMatrix structure)
{
    const HermMatrix h(std::move(structure));
    h_ = h.matrix();
    const Inertia in = inertia(h);
    if (h_.rows() % 2 != 0 || in.n_zero != 0 || in.n_plus != in.n_minus) {
        throw GeometryError("superhermitian structure must have inertia (N, N, 0), got (" +
                            std::to_string(in.n_plus) + ", " + std::to_string(in.n_minus) + ", " +
                            std::to_string(in.n_zero) + ")");
    }
    const EigenDecomposition eig = eigen_decompose(h);
    const int n = half_dim();
    minus_ = CMatrix(n, dim());
    plus_ = CMatrix(n, dim());
    for (int k = 0; k < n; ++k) {
        minus_.row(k) = std::sqrt(-eig.values(k)) * eig.vectors.col(k).adjoint();
        plus_.row(k) = std::sqrt(eig.values(n + k)) * eig.vectors.col(n + k).adjoint();
    }
}

CMatrix SuperhermitianSpace::unitary(const CMatrix& frame) const
{
    const CMatrix zp = plus_ * frame, zm = minus_ * frame;
    // U zp = zm
    return zp.transpose().partialPivLu().solve(zm.transpose()).transpose();
}

SuperhermitianSpace standard_space(int n)
{
    if (n < 1) throw DomainError("standard space needs N >= 1");
    CMatrix h = CMatrix::Zero(2 * n, 2 * n);
    const Complex c = 1.0 / Complex(0.0, 2.0);
    h.block(0, n, n, n) = c * CMatrix::Identity(n, n);
    h.block(n, 0, n, n) = -c * CMatrix::Identity(n, n);
    return SuperhermitianSpace(h);
}

SuperhermitianSpace doubled_space(const SuperhermitianSpace& base)
{
    const int d = base.dim();
    CMatrix h = CMatrix::Zero(2 * d, 2 * d);
    h.topLeftCorner(d, d) = -base.structure();
    h.bottomRightCorner(d, d) = base.structure();
    return SuperhermitianSpace(h);
}

IsotropyReport is_superlagrangian(const CMatrix& frame, const SuperhermitianSpace& space,
                                  const TolerancePolicy& tol)
{
    if (frame.rows() != space.dim()) {
        throw GeometryError("frame has " + std::to_string(frame.rows()) +
                            " rows, ambient dimension is " + std::to_string(space.dim()));
    }
    check_rank(frame, space.half_dim(), tol);
    IsotropyReport r;
    r.residual = (frame.adjoint() * space.structure() * frame).cwiseAbs().maxCoeff();
    const double fn = Eigen::JacobiSVD<CMatrix>(frame).singularValues()(0);
    const double hn = Eigen::JacobiSVD<CMatrix>(space.structure()).singularValues()(0);
    r.bound = 1e-8 * hn * fn * fn;
    r.isotropic = r.residual <= r.bound;
    return r;
}

SuperlagFrame::SuperlagFrame(const SuperhermitianSpace& space, const CMatrix& frame,
                             const TolerancePolicy& tol)
    : space_(space), report_(is_superlagrangian(frame, space, tol))
{
    if (!report_.isotropic) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "frame is not isotropic: residual %.3g above bound %.3g",
                      report_.residual, report_.bound);
        throw GeometryError(buf);
    }
    q_ = orthonormalize(frame);
}

SuperlagFrame base_plane(int n)
{
    CMatrix f = CMatrix::Zero(2 * n, n);
    f.topRows(n).setIdentity();
    return SuperlagFrame(standard_space(n), f);
}

SuperlagFrame fiber_plane(int n)
{
    CMatrix f = CMatrix::Zero(2 * n, n);
    f.bottomRows(n).setIdentity();
    return SuperlagFrame(standard_space(n), f);
}

SuperlagFrame graph_frame(const CMatrix& t, const TolerancePolicy& tol)
{
    const auto n = t.rows();
    CMatrix f(2 * n, n);
    f.topRows(n).setIdentity();
    f.bottomRows(n) = t;
    return SuperlagFrame(standard_space(static_cast<int>(n)), f, tol);
}

double max_principal_angle(const SuperlagFrame& a, const SuperlagFrame& b)
{
    const RVector s = Eigen::JacobiSVD<CMatrix>(a.basis().adjoint() * b.basis()).singularValues();
    return std::acos(std::clamp(s(s.size() - 1), 0.0, 1.0));
}

Intersection intersection(const SuperlagFrame& p, const SuperlagFrame& p0,
                          const TolerancePolicy& tol)
{
    const auto n = p.basis().cols();
    CMatrix stacked(p.basis().rows(), 2 * n);
    stacked << p.basis(), -p0.basis();
    Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
    Intersection out;
    out.singular_values = svd.singularValues().reverse();
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = stacked.cols() - 1; k >= 0; --k)
        if (svd.singularValues()(k) <= tol.rank_rel_tol) idx.push_back(k);
    out.dimension = static_cast<int>(idx.size());
    CMatrix vecs(p.basis().rows(), out.dimension);
    for (int c = 0; c < out.dimension; ++c) {
        const CVector v = svd.matrixV().col(idx[c]);
        vecs.col(c) = 0.5 * (p.basis() * v.head(n) + p0.basis() * v.tail(n));
    }
    out.basis = out.dimension ? orthonormalize(vecs) : vecs;
    return out;
}

double intersection_indicator(const SuperlagFrame& p, const SuperlagFrame& p0)
{
    CMatrix stacked(p.basis().rows(), 2 * p.basis().cols());
    stacked << p.basis(), p0.basis();
    const RVector s = Eigen::JacobiSVD<CMatrix>(stacked).singularValues();
    return s(s.size() - 1);
}

HermMatrix chart(const SuperlagFrame& p, const SuperlagFrame& p0, const SuperlagFrame& p1)
{
    const CMatrix& e0 = p0.basis();
    const CMatrix& e1 = p1.basis();
    const auto n = e0.cols();
    if (intersection_indicator(p0, p1) < 1e-8) throw GeometryError("chart planes are not complementary");
    if (intersection_indicator(p, p1) < 1e-8) throw GeometryError("subspace is not in the chart domain");
    CMatrix split(e0.rows(), 2 * n);
    split << e0, e1;
    const CMatrix z = split.partialPivLu().solve(p.basis());
    const CMatrix x = z.topRows(n), y = z.bottomRows(n);
    const CMatrix t = x.transpose().partialPivLu().solve(y.transpose()).transpose();
    const CMatrix g = e0.adjoint() * p.space().structure() * e1;
    return HermMatrix::hermitian_part(Complex(0.0, 2.0) * g * t);
}

SuperlagFrame random_complement(const SuperlagFrame& p0, const std::vector<SuperlagFrame>& avoid,
                                std::mt19937_64& rng)
{
    const CMatrix& e0 = p0.basis();
    const CMatrix& h = p0.space().structure();
    const auto n = e0.cols(), d = e0.rows();
    Eigen::HouseholderQR<CMatrix> qr(e0);
    const CMatrix full = qr.householderQ() * CMatrix::Identity(d, d);
    const CMatrix x = full.rightCols(d - n);
    // L = X + E0 beta is isotropic for beta = -G^{-1} K / 2
    const CMatrix g = x.adjoint() * h * e0, k = x.adjoint() * h * x;
    const CMatrix l = x - 0.5 * e0 * g.partialPivLu().solve(k);
    const CMatrix gl = l.adjoint() * h * e0;
    std::normal_distribution<double> gauss;
    for (int attempt = 0; attempt < 64; ++attempt) {
        CMatrix a(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) a(r, c) = Complex(gauss(rng), gauss(rng));
        const CMatrix s = 0.5 * (a + a.adjoint());
        const CMatrix gamma = gl.partialPivLu().solve(Complex(0.0, 1.0) * s);
        const CMatrix frame = l + e0 * gamma;
        const SuperlagFrame p1(p0.space(), frame);
        bool ok = intersection_indicator(p1, p0) > 1e-3;
        for (const auto& f : avoid) ok = ok && intersection_indicator(p1, f) > 1e-3;
        if (ok) return p1;
    }
    throw GeometryError("no complementary superlagrangian found after 64 draws");
}

SuperlagPath::SuperlagPath(SuperhermitianSpace space, double a, double b, Evaluator eval)
    : space_(std::move(space)), a_(a), b_(b), eval_(std::move(eval))
{
    if (!(b > a)) throw DomainError("path interval must satisfy a < b");
}

double SuperlagPath::max_step_angle(int samples) const
{
    double worst = 0.0;
    SuperlagFrame prev = eval_(a_);
    for (int k = 1; k < samples; ++k) {
        const double t = (k + 1 == samples) ? b_ : a_ + (b_ - a_) * k / (samples - 1);
        SuperlagFrame cur = eval_(t);
        worst = std::max(worst, max_principal_angle(prev, cur));
        prev = std::move(cur);
    }
    return worst;
}

SuperlagPath graph_path(std::function<CMatrix(double)> t, int n, double a, double b)
{
    return SuperlagPath(standard_space(n), a, b,
                        [t = std::move(t)](double s) { return graph_frame(t(s)); });
}

NumericCrossingForm crossing_form_numeric(const SuperlagPath& path, const SuperlagFrame& p0,
                                          double t0, double step, std::uint64_t seed,
                                          const TolerancePolicy& tol)
{
    if (!(t0 > path.a() && t0 < path.b())) throw DomainError("crossing form needs an interior parameter");
    step = std::min({step, 0.5 * (t0 - path.a()), 0.5 * (path.b() - t0)});
    const SuperlagFrame here = path(t0);
    const Intersection cap = intersection(here, p0, tol);
    if (cap.dimension == 0) throw GeometryError("path does not meet the reference plane here");
    std::mt19937_64 rng(seed);
    const SuperlagFrame p1 = random_complement(p0, {here}, rng);
    const auto derivative = [&](double h) {
        return ((chart(path(t0 + h), p0, p1).matrix() - chart(path(t0 - h), p0, p1).matrix()) /
                (2.0 * h))
            .eval();
    };
    const CMatrix d1 = derivative(step), d2 = derivative(0.5 * step);
    const CMatrix c = p0.basis().adjoint() * cap.basis;
    NumericCrossingForm out;
    out.basis = cap.basis;
    out.form = HermMatrix::hermitian_part(c.adjoint() * ((4.0 * d2 - d1) / 3.0) * c);
    const double ref = std::max((c.adjoint() * d2 * c).norm(), 1e-300);
    out.richardson_gap = (c.adjoint() * (d1 - d2) * c).norm() / ref;
    return out;
}

CMatrix relative_unitary(const SuperlagFrame& p, const SuperlagFrame& p0)
{
    const SuperhermitianSpace& s = p.space();
    return s.unitary(p0.basis()).adjoint() * s.unitary(p.basis());
}

RVector unitary_phases(const CMatrix& v)
{
    Eigen::ComplexEigenSolver<CMatrix> es(v, false);
    RVector out(v.rows());
    for (Eigen::Index k = 0; k < v.rows(); ++k) {
        double a = std::arg(es.eigenvalues()(k));
        if (a < 0) a += two_pi;
        if (a >= two_pi) a -= two_pi;
        out(k) = a;
    }
    std::sort(out.begin(), out.end());
    return out;
}

double phase_gap(const CMatrix& v)
{
    double g = std::numbers::pi;
    for (double a : unitary_phases(v)) g = std::min({g, a, two_pi - a});
    return g;
}

namespace {

// Unwrapped change of arg det v over [lo, hi]. An increment is accepted when it
// and both half increments are below pi/2 and add up, which rules out aliasing.
double unwrapped_arg_change(const std::function<CMatrix(double)>& v, double lo, double hi,
                            Complex dlo, Complex dhi, int depth)
{
    const double mid = 0.5 * (lo + hi);
    const Complex dm = v(mid).determinant();
    const double d = wrap(std::arg(dhi) - std::arg(dlo));
    const double d1 = wrap(std::arg(dm) - std::arg(dlo));
    const double d2 = wrap(std::arg(dhi) - std::arg(dm));
    const double quarter = 0.5 * std::numbers::pi;
    const bool small = std::abs(d) <= quarter && std::abs(d1) <= quarter && std::abs(d2) <= quarter;
    if ((small && std::abs(d1 + d2 - d) < 1e-8) || depth > 40) return d1 + d2;
    return unwrapped_arg_change(v, lo, mid, dlo, dm, depth + 1) +
           unwrapped_arg_change(v, mid, hi, dm, dhi, depth + 1);
}

}  // namespace

int winding_count(const std::function<CMatrix(double)>& v, double lo, double hi)
{
    const CMatrix vlo = v(lo), vhi = v(hi);
    const double total =
        unwrapped_arg_change(v, lo, hi, vlo.determinant(), vhi.determinant(), 0);
    const double principal = unitary_phases(vhi).sum() - unitary_phases(vlo).sum();
    return static_cast<int>(std::lround((total - principal) / two_pi));
}

EmIndexResult em_index(const SuperlagPath& path, const SuperlagFrame& p0,
                       const TolerancePolicy& tol, const EmIndexOptions& options)
{
    for (double t : {path.a(), path.b()}) {
        if (intersection(path(t), p0, tol).dimension > 0) {
            char buf[120];
            std::snprintf(buf, sizeof buf, "path endpoint t = %.17g meets the reference plane", t);
            throw AdmissibilityError(buf);
        }
    }
    const double step = options.step_fraction * (path.b() - path.a());
    std::map<double, CrossingRecord> records;
    std::vector<double> irregular;
    const auto v_of = [&](double t) { return relative_unitary(path(t), p0); };

    LocatorHooks hooks;
    hooks.indicator = [&](double t) { return intersection_indicator(path(t), p0); };
    hooks.net_count = [&](double lo, double hi) { return winding_count(v_of, lo, hi); };
    hooks.ambiguous = [&](double t) { return phase_gap(v_of(t)) < 1e-6; };
    hooks.signature = [&](double t) {
        const NumericCrossingForm f = crossing_form_numeric(path, p0, t, step, options.seed, tol);
        CrossingRecord r;
        r.lambda = t;
        r.kernel_dim = static_cast<int>(f.basis.cols());
        r.form = options.negate_crossing_forms ? -f.form : f.form;
        r.inertia = inertia(r.form, tol);
        r.regular = r.inertia.nondegenerate();
        if (!r.regular) irregular.push_back(t);
        records[t] = r;
        return r.signature();
    };
    LocatorOptions lo;
    lo.grid = options.grid;
    lo.threshold = tol.rank_rel_tol;
    std::vector<double> zeros;
    try {
        zeros = locate_crossings(hooks, path.a(), path.b(), lo);
    } catch (const InconsistencyError&) {
        // a degenerate crossing form explains a count mismatch
        if (irregular.empty()) throw;
    }
    if (!irregular.empty()) {
        throw NonRegularCrossingError("degenerate crossing form on the path", irregular);
    }
    EmIndexResult out;
    for (double t : zeros) {
        out.crossings.push_back(records.at(t));
        out.index += records.at(t).signature();
    }
    return out;
}

}  // namespace sturmflow

#include "sturmflow/em_pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "sturmflow/errors.hpp"
#include "sturmflow/locator.hpp"
#include "sturmflow/quadrature.hpp"

namespace sturmflow {

namespace {

constexpr double kGuardThreshold = 1e-4;
constexpr double kHDriftTol = 1e-8;
constexpr double kFormAgreement = 1e-4;

// Rows (j^m u, A j^{2m} u) of a block of full jets.
CMatrix boundary_rows(const CMatrix& jets, const CMatrix& a, int mn)
{
    CMatrix out(2 * mn, jets.cols());
    out.topRows(mn) = jets.topRows(mn);
    out.bottomRows(mn) = a * jets;
    return out;
}

CMatrix assemble_frame(const CMatrix& start, const CMatrix& end, const BoundaryMap& a, int mn)
{
    CMatrix f(4 * mn, start.cols());
    f.topRows(2 * mn) = boundary_rows(start, a(0.0), mn);
    f.bottomRows(2 * mn) = boundary_rows(end, a(1.0), mn);
    return f;
}

std::string fmt(const char* pattern, double v)
{
    char buf[200];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

// Endpoint data of a(lambda) on demand, memoized per lambda.
class PathSamples {
public:
    PathSamples(const SturmProblem& problem, const TolerancePolicy& tol)
        : problem_(problem), op_(assemble_operator(problem)), tol_(tol),
          mn_(problem.m * problem.n), space_(solution_ambient(mn_)), p0_(reference_plane(mn_))
    {
    }

    struct Sample {
        CMatrix frame;
        double indicator = 0.0;
        std::optional<CMatrix> v;
    };

    Sample& at(double lambda)
    {
        auto it = samples_.find(lambda);
        if (it != samples_.end()) return it->second;
        const FirstOrderSystem sys = to_first_order(op_, lambda);
        const CMatrix id = CMatrix::Identity(2 * mn_, 2 * mn_);
        const CMatrix phi = integrate_endpoint(sys, 0.0, 1.0, id, tol_);
        Sample s;
        s.frame = assemble_frame(id, phi, assemble_boundary_map(rescale(problem_, lambda)), mn_);
        const CMatrix w = phi.block(0, mn_, mn_, mn_);
        const double sw = Eigen::JacobiSVD<CMatrix>(w).singularValues().tail(1)(0);
        const double scale = Eigen::JacobiSVD<CMatrix>(phi.rightCols(mn_)).singularValues()(0);
        s.indicator = sw / std::max(scale, 1e-300);
        return samples_.emplace(lambda, std::move(s)).first->second;
    }

    SuperlagFrame frame(double lambda) { return SuperlagFrame(space_, at(lambda).frame, tol_); }

    const CMatrix& v(double lambda)
    {
        Sample& s = at(lambda);
        if (!s.v) s.v = relative_unitary(frame(lambda), p0_);
        return *s.v;
    }

    const SuperhermitianSpace& space() const { return space_; }
    const SuperlagFrame& p0() const { return p0_; }

private:
    const SturmProblem& problem_;
    OperatorCoefficients op_;
    TolerancePolicy tol_;
    int mn_;
    SuperhermitianSpace space_;
    SuperlagFrame p0_;
    std::map<double, Sample> samples_;
};

}  // namespace

SuperhermitianSpace solution_ambient(int mn) { return doubled_space(standard_space(mn)); }

SuperlagFrame reference_plane(int mn)
{
    CMatrix f = CMatrix::Zero(4 * mn, 2 * mn);
    f.block(mn, 0, mn, mn).setIdentity();
    f.block(3 * mn, mn, mn, mn).setIdentity();
    return SuperlagFrame(solution_ambient(mn), f);
}

CMatrix solution_frame(const SturmProblem& problem, double lambda, const TolerancePolicy& tol)
{
    const int mn = problem.m * problem.n;
    const FirstOrderSystem sys = to_first_order(assemble_operator(problem), lambda);
    const CMatrix id = CMatrix::Identity(2 * mn, 2 * mn);
    const CMatrix phi = integrate_endpoint(sys, 0.0, 1.0, id, tol);
    return assemble_frame(id, phi, assemble_boundary_map(rescale(problem, lambda)), mn);
}

SolutionSpacePoint solution_path(const SturmProblem& problem, double lambda,
                                 const TolerancePolicy& tol)
{
    const int mn = problem.m * problem.n;
    auto sys = std::make_shared<const FirstOrderSystem>(to_first_order(assemble_operator(problem), lambda));
    const CMatrix id = CMatrix::Identity(2 * mn, 2 * mn);
    SolutionHandle sol = integrate(sys, 0.0, 1.0, id, tol);
    const BoundaryMap a = assemble_boundary_map(rescale(problem, lambda));
    CMatrix frame = assemble_frame(sol.initial(), sol.final_state(), a, mn);
    const IsotropyReport iso = is_superlagrangian(frame, solution_ambient(mn), tol);

    const auto h_at = [&](double x, double& scale) {
        const CMatrix s = sol.state(x);
        const CMatrix rows = boundary_rows(s, a(x), mn);
        const CMatrix jm = rows.topRows(mn), aj = rows.bottomRows(mn);
        scale = std::max(scale, jm.norm() * aj.norm());
        const CMatrix p = jm.adjoint() * aj;
        return ((p - p.adjoint()) / Complex(0.0, 2.0)).eval();
    };
    double scale = 0.0;
    const CMatrix h0 = h_at(0.0, scale);
    double drift = 0.0;
    for (int k = 1; k <= 32; ++k) {
        const CMatrix hx = h_at(k / 32.0, scale);
        drift = std::max(drift, (hx - h0).cwiseAbs().maxCoeff());
    }
    drift /= std::max(scale, 1e-300);
    if (!iso.isotropic) {
        throw GeometryError(fmt("solution frame is not isotropic (residual %.3g)", iso.residual));
    }
    if (drift > kHDriftTol) throw GeometryError(fmt("h varies along x by %.3g", drift));
    return SolutionSpacePoint{lambda, std::move(sol), std::move(frame), iso, drift};
}

EpsilonCertificate epsilon_guard(const SturmProblem& problem, const TolerancePolicy& tol,
                                 std::optional<double> fixed)
{
    const OperatorCoefficients op = assemble_operator(problem);
    const int tries = fixed ? 1 : 7;
    double eps = fixed ? *fixed : 1.0 / 64.0;
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
    for (int k = 0; k < tries; ++k, eps *= 0.5) {
        const auto f = [&](double t) { return shooting_matrix(op, t, tol).relative_sigma_min(); };
        std::vector<double> g(129);
        for (int j = 1; j <= 128; ++j) g[j] = f(eps * j / 128.0);
        g[0] = g[1];
        double worst = INFINITY;
        for (int j = 1; j <= 128; ++j) {
            worst = std::min(worst, g[j]);
            // an instant between grid points shows up as a local minimum
            const bool dip = g[j] <= g[j - 1] && (j == 128 || g[j] <= g[j + 1]);
            if (dip) {
                const double lo = eps * (j - 1) / 128.0, hi = eps * std::min(j + 1, 128) / 128.0;
                worst = std::min(worst, f(golden_section_min(f, std::max(lo, 1e-3 * eps), hi, 1e-12)));
            }
        }
        if (worst > kGuardThreshold) return EpsilonCertificate{eps, worst, k};
    }
    throw GuardError("no conjugate-free initial interval could be certified");
}

HermMatrix crossing_form_analytic(const SturmProblem& problem, double lambda0,
                                  const std::vector<SolutionHandle>& kernel)
{
    const FormCoefficients d = rescale_derivative(problem, lambda0);
    const QuadratureRule q = gauss_legendre(64);
    const auto dim = static_cast<Eigen::Index>(kernel.size());
    CMatrix g = CMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        const double x = q.nodes[k];
        std::vector<CVector> jets;
        for (const auto& u : kernel) jets.push_back(u.jet(x));
        for (Eigen::Index a = 0; a < dim; ++a)
            for (Eigen::Index b = 0; b < dim; ++b)
                g(a, b) += q.weights[k] * d.density(x, jets[a], jets[b]);
    }
    return HermMatrix::hermitian_part(g);
}

ConjugatePoints conjugate_points(const SturmProblem& problem, const PipelineParams& params)
{
    validate(problem);
    const TolerancePolicy& tol = params.tol;
    tol.validate();
    const EpsilonCertificate cert = epsilon_guard(problem, tol, params.epsilon);
    const double eps = cert.epsilon;
    const double threshold = tol.shooting_tol();
    const int mn = problem.m * problem.n;
    PathSamples samples(problem, tol);

    if (samples.at(1.0).indicator <= threshold) {
        throw EndpointDegeneracyError("lambda = 1 is a conjugate instant: the form is degenerate");
    }

    std::map<double, CrossingRecord> records;
    std::map<double, std::vector<SolutionHandle>> kernels;
    std::vector<double> irregular;
    LocatorHooks hooks;
    hooks.indicator = [&](double t) { return samples.at(t).indicator; };
    hooks.net_count = [&](double lo, double hi) {
        return winding_count([&](double t) { return samples.v(t); }, lo, hi);
    };
    hooks.ambiguous = [&](double t) { return phase_gap(samples.v(t)) < 1e-6; };
    hooks.signature = [&](double t) {
        std::vector<SolutionHandle> ker = kernel_solutions(problem, t, tol);
        CrossingRecord r;
        r.lambda = t;
        r.kernel_dim = static_cast<int>(ker.size());
        r.form = crossing_form_analytic(problem, t, ker);
        r.inertia = inertia(r.form, tol);
        r.regular = r.inertia.nondegenerate();
        if (!r.regular) irregular.push_back(t);
        records[t] = r;
        kernels.emplace(t, std::move(ker));
        return r.signature();
    };
    LocatorOptions lo;
    lo.grid = params.grid;
    lo.threshold = threshold;
    std::vector<double> zeros;
    try {
        zeros = locate_crossings(hooks, eps, 1.0, lo);
    } catch (const InconsistencyError&) {
        if (irregular.empty()) throw;
    }
    if (!irregular.empty()) {
        std::string msg = "non-regular crossing at lambda =";
        for (double t : irregular) msg += fmt(" %.17g", t);
        throw NonRegularCrossingError(msg, irregular);
    }

    ConjugatePoints out;
    out.epsilon = eps;
    TolerancePolicy geo = tol;
    geo.rank_rel_tol = threshold;
    const SuperlagPath path(samples.space(), eps, 1.0, [&](double t) { return samples.frame(t); });
    for (double t : zeros) {
        const CrossingRecord& r = records.at(t);
        const auto& ker = kernels.at(t);
        const NumericCrossingForm num =
            crossing_form_numeric(path, samples.p0(), t, 1e-4 * (1.0 - eps), params.seed, geo);
        if (num.basis.cols() != r.kernel_dim) {
            throw InconsistencyError(fmt("intersection dimension differs from the kernel dimension at lambda = %.17g", t));
        }
        const BoundaryMap a = assemble_boundary_map(rescale(problem, t));
        CMatrix vk(4 * mn, r.kernel_dim);
        for (int c = 0; c < r.kernel_dim; ++c)
            vk.col(c) = assemble_frame(ker[c].initial(), ker[c].final_state(), a, mn).col(0);
        const CMatrix rot = num.basis.adjoint() * vk;
        CrossingCheck check;
        check.geometric = HermMatrix::hermitian_part(rot.adjoint() * num.form.matrix() * rot);
        check.geometric_inertia = inertia(check.geometric, tol);
        const double ref = std::max(r.form.matrix().cwiseAbs().maxCoeff(), 1e-300);
        check.entry_error = (check.geometric.matrix() - r.form.matrix()).cwiseAbs().maxCoeff() / ref;
        if (check.geometric_inertia.signature() != r.signature() || check.entry_error > kFormAgreement) {
            char buf[240];
            std::snprintf(buf, sizeof buf,
                          "analytic and geometric crossing forms disagree at lambda = %.17g "
                          "(signatures %d and %d, relative entry error %.3g)",
                          t, r.signature(), check.geometric_inertia.signature(), check.entry_error);
            throw InconsistencyError(buf);
        }
        out.crossings.push_back(r);
        out.checks.push_back(std::move(check));
    }
    return out;
}

EmResult em_index_of_form(const SturmProblem& problem, const PipelineParams& params)
{
    EmResult out;
    out.points = conjugate_points(problem, params);
    for (const auto& r : out.points.crossings) out.index += r.signature();
    return out;
}

}  // namespace sturmflow

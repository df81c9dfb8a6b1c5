#include "sturmflow/locator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "sturmflow/errors.hpp"

namespace sturmflow {

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double t_tol)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    double best = f1 < f2 ? x1 : x2, fbest = std::min(f1, f2);
    while (hi - lo > t_tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
            if (f1 < fbest) best = x1, fbest = f1;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
            if (f2 < fbest) best = x2, fbest = f2;
        }
    }
    return best;
}

namespace {

class Locator {
public:
    Locator(const LocatorHooks& hooks, const LocatorOptions& options)
        : hooks_(hooks), opt_(options)
    {
    }

    std::vector<double> run(double a, double b)
    {
        scan(a, b, opt_.grid, true);
        const std::vector<double> edges = cell_edges(a, b, opt_.grid, true);
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) verify(edges[k], edges[k + 1], 1);
        std::vector<double> out;
        for (const auto& z : zeros_) out.push_back(z.first);
        return out;
    }

private:
    double indicator(double t)
    {
        auto it = cache_.find(t);
        if (it != cache_.end()) return it->second;
        const double v = hooks_.indicator(t);
        cache_.emplace(t, v);
        return v;
    }

    bool known(double t, double sep) const
    {
        auto it = zeros_.lower_bound(t - sep);
        return it != zeros_.end() && it->first <= t + sep;
    }

    // Grid points of [a, b]; interior points are nudged off ambiguous values.
    // Endpoints of the whole interval are kept as they are.
    std::vector<double> cell_edges(double a, double b, int count, bool keep_ends)
    {
        std::vector<double> t(count);
        const double h = (b - a) / (count - 1);
        for (int k = 0; k < count; ++k) t[k] = (k + 1 == count) ? b : a + h * k;
        for (int k = 0; k < count; ++k) {
            if ((k == 0 || k + 1 == count) && keep_ends) continue;
            if (!hooks_.ambiguous(t[k]) && !known(t[k], 1e-3 * h)) continue;
            const double base = t[k];
            for (double f : {0.25, -0.25, 0.4, -0.4, 0.1, -0.1}) {
                const double s = base + f * h;
                if (s <= a || s >= b) continue;
                if (!hooks_.ambiguous(s) && !known(s, 1e-3 * h)) {
                    t[k] = s;
                    break;
                }
            }
        }
        return t;
    }

    // Local minima of the indicator on a grid of [a, b], refined and filtered.
    void scan(double a, double b, int count, bool whole)
    {
        std::vector<double> t(count), f(count);
        const double h = (b - a) / (count - 1);
        for (int k = 0; k < count; ++k) {
            t[k] = (k + 1 == count) ? b : a + h * k;
            f[k] = indicator(t[k]);
        }
        const double sep = std::max(10.0 * opt_.t_tol, 1e-6 * h);
        for (int k = 0; k < count; ++k) {
            const bool left = k == 0 || f[k] <= f[k - 1];
            const bool right = k + 1 == count || f[k] <= f[k + 1];
            if (!(left && right)) continue;
            // flat stretches (constant families, noise plateaus) are not dips
            const double nb = std::max(k > 0 ? f[k - 1] : 0.0, k + 1 < count ? f[k + 1] : 0.0);
            if (f[k] > opt_.threshold && f[k] >= (1.0 - 1e-6) * nb) continue;
            if (!whole && (k == 0 || k + 1 == count)) {
                // a subgrid edge minimum belongs to the neighbouring cell
                if (f[k] > opt_.threshold) continue;
            }
            const double lo = t[std::max(k - 1, 0)], hi = t[std::min(k + 1, count - 1)];
            double z = golden_section_min([&](double s) { return indicator(s); }, lo, hi,
                                          opt_.t_tol);
            // a minimum at the very end of the interval is not interior
            if (whole && (z - a < opt_.t_tol || b - z < opt_.t_tol)) continue;
            if (indicator(z) > opt_.threshold) continue;
            if (known(z, sep)) continue;
            zeros_.emplace(z, hooks_.signature(z));
        }
    }

    void verify(double lo, double hi, int depth)
    {
        const int net = hooks_.net_count(lo, hi);
        int sum = 0;
        for (auto it = zeros_.upper_bound(lo); it != zeros_.end() && it->first <= hi; ++it)
            sum += it->second;
        if (net == sum) return;
        if (depth > opt_.max_depth) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "crossing count in (%.17g, %.17g] is %d but located crossings sum to %d",
                          lo, hi, net, sum);
            throw InconsistencyError(buf);
        }
        scan(lo, hi, opt_.subgrid, false);
        const std::vector<double> edges = cell_edges(lo, hi, opt_.subgrid, true);
        for (std::size_t k = 0; k + 1 < edges.size(); ++k) verify(edges[k], edges[k + 1], depth + 1);
    }

    const LocatorHooks& hooks_;
    LocatorOptions opt_;
    std::map<double, double> cache_;
    std::map<double, int> zeros_;
};

}  // namespace

std::vector<double> locate_crossings(const LocatorHooks& hooks, double a, double b,
                                     const LocatorOptions& options)
{
    if (!(b > a)) throw DomainError("crossing search needs a nonempty interval");
    if (options.grid < 3 || options.subgrid < 3) throw DomainError("grid needs at least 3 points");
    Locator loc(hooks, options);
    return loc.run(a, b);
}

}  // namespace sturmflow

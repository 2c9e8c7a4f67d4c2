#include "fdl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <queue>

namespace fdl {

namespace {
int g_thread_override = 0;
}

int default_thread_count() {
    if (g_thread_override > 0) return g_thread_override;
    static int cached = [] {
        if (const char* env = std::getenv("FDL_THREADS")) {
            const int n = std::atoi(env);
            if (n > 0) return n;
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }();
    return cached;
}

void set_thread_count(int n) { g_thread_override = n; }

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes by Newton iteration on P_n.
// ---------------------------------------------------------------------------

namespace {

GaussLegendre compute_gl(int n) {
    GaussLegendre gl;
    gl.nodes.resize(static_cast<size_t>(n));
    gl.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // evaluate P_n(x) and P_n'(x) by recurrence
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.nodes[static_cast<size_t>(n - 1 - i)] = x;
        gl.weights[static_cast<size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

std::mutex g_gl_mutex;
std::map<int, GaussLegendre> g_gl_cache;

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1) throw InvalidInput("gauss_legendre: order must be >= 1");
    std::lock_guard<std::mutex> lock(g_gl_mutex);
    auto it = g_gl_cache.find(n);
    if (it == g_gl_cache.end()) it = g_gl_cache.emplace(n, compute_gl(n)).first;
    return it->second;
}

void gl_panel(double a, double b, int n, std::vector<double>& x, std::vector<double>& w) {
    const GaussLegendre& gl = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        x.push_back(mid + half * gl.nodes[i]);
        w.push_back(half * gl.weights[i]);
    }
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7-15.  Standard node/weight table.
// ---------------------------------------------------------------------------

namespace {

// abscissa, Gauss-7 weight (0 where absent), Kronrod-15 weight
constexpr double kGK[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct PanelEstimate {
    double value;
    double error;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double f0 = f(mid);
    double g7 = kGK[0][1] * f0;
    double k15 = kGK[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kGK[i][0];
        const double fi = f(mid + dx) + f(mid - dx);
        g7 += kGK[i][1] * fi;
        k15 += kGK[i][2] * fi;
    }
    g7 *= half;
    k15 *= half;
    const double diff = std::abs(k15 - g7);
    // classic rescaled error estimate (200|K-G|)^{3/2}
    const double err = std::min(diff, std::pow(200.0 * diff, 1.5) / 200.0);
    return {k15, err};
}

struct PanelEntry {
    double err;
    double a, b, value;
    bool operator<(const PanelEntry& o) const { return err < o.err; }
};

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_panels) {
    QuadResult res;
    if (a == b) return res;
    std::priority_queue<PanelEntry> heap;
    PanelEstimate first = gk15(f, a, b);
    heap.push({first.error, a, b, first.value});
    double total = first.value;
    double toterr = first.error;
    int panels = 1;
    while (toterr > std::max(abs_tol, rel_tol * std::abs(total)) && panels < max_panels) {
        PanelEntry top = heap.top();
        heap.pop();
        const double m = 0.5 * (top.a + top.b);
        if (m == top.a || m == top.b) {  // interval exhausted at double precision
            heap.push({0.0, top.a, top.b, top.value});
            toterr -= top.err;
            continue;
        }
        const PanelEstimate l = gk15(f, top.a, m), r = gk15(f, m, top.b);
        total += l.value + r.value - top.value;
        toterr += l.error + r.error - top.err;
        heap.push({l.error, top.a, m, l.value});
        heap.push({r.error, m, top.b, r.value});
        ++panels;
    }
    res.value = total;
    res.error = toterr;
    res.converged = toterr <= std::max(abs_tol, rel_tol * std::abs(total)) + 1e-300;
    return res;
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double rel_tol, int max_doublings) {
    if (a <= 0.0) throw InvalidInput("integrate_to_infinity: lower bound must be positive");
    QuadResult res;
    double lo = a;
    double total = 0.0, toterr = 0.0;
    double last = 0.0;
    int quiet = 0;
    for (int i = 0; i < max_doublings; ++i) {
        const double hi = 2.0 * lo;
        QuadResult panel = integrate(f, lo, hi, rel_tol * 0.1, 0.0, 600);
        total += panel.value;
        toterr += panel.error;
        // stop once several consecutive octaves contribute nothing
        if (std::abs(panel.value) <= rel_tol * std::abs(total) + 1e-300) {
            if (++quiet >= 3 && std::abs(panel.value) <= std::abs(last)) break;
        } else {
            quiet = 0;
        }
        last = panel.value;
        lo = hi;
        if (!std::isfinite(total))
            throw NumericalFailure("integrate_to_infinity: integral appears divergent");
    }
    res.value = total;
    res.error = toterr;
    res.converged = quiet >= 3;
    return res;
}

QuadResult integrate_with_algebraic_singularity(const std::function<double(double)>& f,
                                                double a, double b, double s, double beta,
                                                double rel_tol) {
    if (beta <= -1.0)
        throw NumericalFailure("algebraic singularity |u-s|^beta with beta <= -1 is not integrable");
    if (beta == 0.0) return integrate(f, a, b, rel_tol);
    if (beta > 0.0) {
        auto g = [&](double u) { return f(u) * std::pow(std::abs(u - s), beta); };
        if (s <= a || s >= b) return integrate(g, a, b, rel_tol);
        QuadResult l = integrate(g, a, s, rel_tol);
        QuadResult r = integrate(g, s, b, rel_tol);
        return {l.value + r.value, l.error + r.error, l.converged && r.converged};
    }
    // beta in (-1, 0): substitute t = |u-s|^{1+beta} side by side, so that
    // |u-s|^beta du = dt/(1+beta) and the singularity disappears exactly.
    const double q = 1.0 + beta;
    auto right_part = [&](double u0, double u1) -> QuadResult {  // [u0,u1] with u0 >= s
        auto g = [&](double t) { return f(s + std::pow(t, 1.0 / q)) / q; };
        return integrate(g, std::pow(u0 - s, q), std::pow(u1 - s, q), rel_tol);
    };
    auto left_part = [&](double u0, double u1) -> QuadResult {  // [u0,u1] with u1 <= s
        auto g = [&](double t) { return f(s - std::pow(t, 1.0 / q)) / q; };
        return integrate(g, std::pow(s - u1, q), std::pow(s - u0, q), rel_tol);
    };
    if (s <= a) return right_part(a, b);
    if (s >= b) return left_part(a, b);
    QuadResult l = left_part(a, s);
    QuadResult r = right_part(s, b);
    return {l.value + r.value, l.error + r.error, l.converged && r.converged};
}

}  // namespace fdl

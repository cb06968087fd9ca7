#include "fibrelay/potential.hpp"
#include "fibrelay/errors.hpp"

#include <cmath>
#include <sstream>

namespace fibrelay {

PotentialSpec PotentialSpec::family(double K, double s) {
    if (!(K > 0.0)) throw ConfigError("potential.K must satisfy K > 0");
    if (!(s >= 1.0)) throw ConfigError("potential.s must satisfy s >= 1");
    PotentialSpec p;
    p.kind = PotentialKind::Family;
    p.K = K;
    p.s = s;
    return p;
}

PotentialSpec PotentialSpec::quadratic(double omega) {
    if (!(omega > 0.0)) throw ConfigError("potential.omega must satisfy omega > 0");
    PotentialSpec p;
    p.kind = PotentialKind::Quadratic;
    p.omega = omega;
    return p;
}

bool PotentialSpec::gradient_bounded() const {
    return kind == PotentialKind::Family && s == 1.0;
}

double PotentialSpec::grad_sup() const {
    if (!gradient_bounded()) throw HypothesisError("grad_sup requested for a potential with unbounded gradient");
    // |grad V| = K r / sqrt(1+r^2) increases to K.
    return K;
}

std::string PotentialSpec::describe() const {
    std::ostringstream os;
    if (kind == PotentialKind::Family)
        os << "family(K=" << K << ", s=" << s << ")";
    else
        os << "quadratic(omega=" << omega << ")";
    return os.str();
}

PotentialValue eval_potential(const PotentialSpec& p, const Vec2& x) {
    PotentialValue out{};
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (p.kind == PotentialKind::Quadratic) {
        out.V = 0.5 * p.omega * r2 + p.shift;
        out.grad = {p.omega * x[0], p.omega * x[1]};
        out.hess = {{{p.omega, 0.0}, {0.0, p.omega}}};
        return out;
    }
    // V = K (1+r^2)^{s/2}:
    //   grad V  = K s (1+r^2)^{s/2-1} x
    //   hess V  = K s (1+r^2)^{s/2-1} I + K s (s-2) (1+r^2)^{s/2-2} x x^T
    const double u = 1.0 + r2;
    const double a = p.K * p.s * std::pow(u, 0.5 * p.s - 1.0);
    const double b = p.K * p.s * (p.s - 2.0) * std::pow(u, 0.5 * p.s - 2.0);
    out.V = p.K * std::pow(u, 0.5 * p.s) + p.shift;
    out.grad = {a * x[0], a * x[1]};
    out.hess[0][0] = a + b * x[0] * x[0];
    out.hess[0][1] = b * x[0] * x[1];
    out.hess[1][0] = out.hess[0][1];
    out.hess[1][1] = a + b * x[1] * x[1];
    return out;
}

double truncation_radius(const PotentialSpec& p, double cut) {
    const double target = -std::log(cut); // need V(L,0) > target
    double lo = 0.0, hi = 1.0;
    auto v = [&](double r) { return eval_potential(p, {r, 0.0}).V; };
    int guard = 0;
    while (v(hi) < target) {
        hi *= 2.0;
        if (++guard > 64) throw ConfigError("truncation radius search diverged; potential decays too slowly");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (v(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

namespace {

// Composite Simpson on [-L,L]^2 of e^{-V}. n must be even.
double simpson2d_expmV(const PotentialSpec& p, double L, int n) {
    const double h = 2.0 * L / n;
    auto w1 = [&](int i) -> double {
        if (i == 0 || i == n) return 1.0;
        return (i % 2 == 1) ? 4.0 : 2.0;
    };
    double total = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double y = -L + j * h;
        double row = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = -L + i * h;
            row += w1(i) * std::exp(-eval_potential(p, {x, y}).V);
        }
        total += w1(j) * row;
    }
    return total * h * h / 9.0;
}

} // namespace

PotentialSpec normalize_potential(const PotentialSpec& p, const QuadratureCfg& quad) {
    PotentialSpec q = p;
    const double L = truncation_radius(q, quad.tail_cut);
    int n = quad.n_init;
    double I_prev = simpson2d_expmV(q, L, n);
    double I = I_prev;
    bool converged = false;
    for (int r = 0; r < quad.max_refine; ++r) {
        n *= 2;
        I = simpson2d_expmV(q, L, n);
        if (std::abs(I - I_prev) <= 0.25 * quad.tol * std::abs(I)) {
            converged = true;
            break;
        }
        I_prev = I;
    }
    if (!converged)
        throw ConfigError("normalisation quadrature did not converge to tol=" + std::to_string(quad.tol) +
                          " on [-L,L]^2 with L=" + std::to_string(L));
    if (!(I > 0.0) || !std::isfinite(I))
        throw ConfigError("normalisation integral is not finite/positive");
    q.shift += std::log(I);
    return q;
}

HypothesisReport check_hypotheses(const PotentialSpec& p, const std::vector<double>& radii) {
    HypothesisReport rep;
    QuadratureCfg quad;
    {
        const double L = truncation_radius(p, quad.tail_cut);
        rep.h2_integral = simpson2d_expmV(p, L, 512);
    }
    rep.radii = radii;
    const int n_dir = 32;
    double c1 = 0.0;
    for (double r : radii) {
        double worst_g_over_V = 0.0, worst_h_over_g = 0.0;
        for (int d = 0; d < n_dir; ++d) {
            const double th = 2.0 * M_PI * d / n_dir;
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            const PotentialValue pv = eval_potential(p, x);
            const double gn = std::hypot(pv.grad[0], pv.grad[1]);
            const double hn = std::sqrt(pv.hess[0][0] * pv.hess[0][0] + 2.0 * pv.hess[0][1] * pv.hess[0][1] +
                                        pv.hess[1][1] * pv.hess[1][1]);
            c1 = std::max(c1, hn / (1.0 + gn));
            if (pv.V > 0.0) worst_g_over_V = std::max(worst_g_over_V, gn / pv.V);
            if (gn > 0.0) worst_h_over_g = std::max(worst_h_over_g, hn / gn);
        }
        rep.h5_grad_over_V.push_back(worst_g_over_V);
        rep.h5_hess_over_grad.push_back(worst_h_over_g);
    }
    rep.h4_c1_estimate = c1;
    rep.gradient_bounded = p.gradient_bounded();
    if (rep.gradient_bounded) rep.grad_inf_norm = p.grad_sup();
    return rep;
}

} // namespace fibrelay

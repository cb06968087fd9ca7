#include "fibrelay/weight.hpp"
#include "fibrelay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fibrelay {

void WeightParams::validate() const {
    std::ostringstream bad;
    auto fail = [&](const char* what) { bad << what << "; "; };
    if (!(kappa >= 0.0 && kappa < 1.0 / 3.0)) fail("kappa must lie in [0, 1/3)");
    if (!(D > 0.0)) fail("D > 0");
    if (!(0.0 < delta_minus && delta_minus < delta_plus && delta_plus < 1.0 / D))
        fail("0 < delta_minus < delta_plus < 1/D");
    if (!(eps0 > 0.0 && eps0 < 1.0)) fail("eps0 in (0,1)");
    const double lo = 1.0 + D * (delta_plus + delta_minus) / 2.0;
    const double hi = (eps0 / (kappa + eps0)) * (1.0 + D * delta_plus);
    if (!(lo < beta && beta < hi)) fail("beta interval 1 + D(d+ + d-)/2 < beta < (eps0/(kappa+eps0))(1 + D d+)");
    if (!(beta > 1.0 && beta < 2.0)) fail("beta in (1,2)");
    const double kb = D * (delta_plus - delta_minus) / (2.0 + D * (delta_plus + delta_minus));
    if (!(kappa < kb)) fail("kappa < D(d+ - d-)/(2 + D(d+ + d-))");
    if (!(std::abs(gamma - eps0 * (1.0 + D * delta_plus - beta)) <= 1e-12 * std::max(1.0, std::abs(gamma))))
        fail("gamma = eps0 (1 + D d+ - beta)");
    if (!(std::abs(gamma_tilde - eps0 * (beta - 1.0 - D * delta_minus)) <= 1e-12 * std::max(1.0, std::abs(gamma_tilde))))
        fail("gamma_tilde = eps0 (beta - 1 - D d-)");
    if (!(gamma > kappa * beta)) fail("gamma > kappa beta");
    if (!(0.0 < gamma && gamma < gamma_tilde)) fail("0 < gamma < gamma_tilde");
    if (!(c > 0.0 && std::abs(c - 0.5 * (gamma - kappa * beta)) <= 1e-12 * std::max(1.0, c)))
        fail("c = (gamma - kappa beta)/2 > 0");
    if (!(gamma0 > 0.0)) fail("gamma0 > 0");
    if (!bad.str().empty()) throw HypothesisError("weight parameters invalid: " + bad.str());
}

WeightParams weight_params(double kappa, double D) {
    if (!(D > 0.0)) throw ConfigError("D must satisfy D > 0");
    if (!(kappa >= 0.0 && kappa < 1.0 / 3.0))
        throw HypothesisError("weight construction needs kappa in [0, 1/3); got kappa=" + std::to_string(kappa));
    WeightParams w;
    w.kappa = kappa;
    w.D = D;
    w.delta_plus = 3.0 * (1.0 + kappa) / (4.0 * D);
    w.delta_minus = (1.0 - 3.0 * kappa) / (4.0 * D);
    w.eps0 = 0.5 * (1.0 + 9.0 * kappa) / (1.0 + 3.0 * kappa);
    w.beta = 0.75 + (1.0 + 9.0 * kappa) * (7.0 + 3.0 * kappa) /
                        (8.0 * (6.0 * kappa * kappa + 11.0 * kappa + 1.0));
    w.gamma = w.eps0 * (1.0 + D * w.delta_plus - w.beta);
    w.gamma_tilde = w.eps0 * (w.beta - 1.0 - D * w.delta_minus);
    w.c = 0.5 * (w.gamma - kappa * w.beta);
    w.gamma0 = w.delta_minus;
    w.validate();
    return w;
}

GammaValue gamma_profile(const WeightParams& w, double Y) {
    if (std::abs(Y) > 1.0 + 1e-12)
        throw ConfigError("gamma_profile argument must satisfy |Y| <= 1");
    Y = std::clamp(Y, -1.0, 1.0);
    const double dm = w.delta_minus, dp = w.delta_plus, e0 = w.eps0;
    const double m = (dp - dm) / (2.0 * e0);
    GammaValue out{};
    // Gamma(-1) = gamma0; integrate the slope profile piecewise.
    const double g_at_me0 = w.gamma0 + dm * (1.0 - e0);
    if (Y < -e0) {
        out.GammaPrime = dm;
        out.Gamma = w.gamma0 + dm * (Y + 1.0);
    } else if (Y <= e0) {
        const double t = Y + e0;
        out.GammaPrime = m * t + dm;
        out.Gamma = g_at_me0 + 0.5 * m * t * t + dm * t;
    } else {
        const double g_at_pe0 = g_at_me0 + 0.5 * m * (2.0 * e0) * (2.0 * e0) + dm * 2.0 * e0;
        out.GammaPrime = dp;
        out.Gamma = g_at_pe0 + dp * (Y - e0);
    }
    return out;
}

double gamma_second(const WeightParams& w, double Y) {
    if (std::abs(Y) > 1.0 + 1e-12)
        throw ConfigError("gamma_second argument must satisfy |Y| <= 1");
    // Knots take the ramp-side value.
    if (std::abs(Y) <= w.eps0) return (w.delta_plus - w.delta_minus) / (2.0 * w.eps0);
    return 0.0;
}

namespace {

struct Frame {
    double V;
    double gn;      // |grad V|
    Vec2 n;         // grad V / |grad V|
    Vec2 tau, tperp;
    double Y, Yperp;
    Mat2 H;
};

Frame make_frame(const PotentialSpec& p, const Vec2& x, double alpha) {
    const PotentialValue pv = eval_potential(p, x);
    Frame f{};
    f.V = pv.V;
    f.H = pv.hess;
    f.gn = std::hypot(pv.grad[0], pv.grad[1]);
    if (f.gn == 0.0)
        throw NumericalError("weight evaluation at a critical point of V (grad V = 0)");
    f.n = {pv.grad[0] / f.gn, pv.grad[1] / f.gn};
    f.tau = {std::cos(alpha), std::sin(alpha)};
    f.tperp = {-f.tau[1], f.tau[0]};
    f.Y = f.tau[0] * f.n[0] + f.tau[1] * f.n[1];
    f.Yperp = f.tperp[0] * f.n[0] + f.tperp[1] * f.n[1];
    return f;
}

Vec2 mat_vec(const Mat2& H, const Vec2& v) {
    return {H[0][0] * v[0] + H[0][1] * v[1], H[1][0] * v[0] + H[1][1] * v[1]};
}

} // namespace

double eval_log_weight(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha) {
    const Frame f = make_frame(p, x, alpha);
    const GammaValue gv = gamma_profile(w, std::clamp(f.Y, -1.0, 1.0));
    return w.beta * f.V + f.gn * gv.Gamma;
}

double eval_weight(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha) {
    return std::exp(eval_log_weight(w, p, x, alpha));
}

double eval_weight_diff_term(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha) {
    const Frame f = make_frame(p, x, alpha);
    const double Yc = std::clamp(f.Y, -1.0, 1.0);
    const GammaValue gv = gamma_profile(w, Yc);
    // grad(|grad V| Gamma(Y)) = Gamma Hn + Gamma' (H tau - Y Hn)
    const Vec2 Hn = mat_vec(f.H, f.n);
    const Vec2 Ht = mat_vec(f.H, f.tau);
    Vec2 grad_term;
    for (int d = 0; d < 2; ++d)
        grad_term[d] = gv.Gamma * Hn[d] + gv.GammaPrime * (Ht[d] - f.Y * Hn[d]);
    const Vec2 vel{f.tau[0] + w.kappa, f.tau[1]};
    return (vel[0] * grad_term[0] + vel[1] * grad_term[1]) / f.gn;
}

double eval_weight_generator(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha) {
    const Frame f = make_frame(p, x, alpha);
    const double Yc = std::clamp(f.Y, -1.0, 1.0);
    const GammaValue gv = gamma_profile(w, Yc);
    const double gpp = gamma_second(w, Yc);

    const double diff = eval_weight_diff_term(w, p, x, alpha); // already / |grad V|
    const double e1gradV = f.gn * f.n[0];
    const double yp2 = f.Yperp * f.Yperp;

    return (w.beta - 1.0 - w.D * gv.GammaPrime) * f.gn * f.Y + w.kappa * w.beta * e1gradV +
           f.gn * diff +
           yp2 * (w.D * f.gn * gpp + f.gn * f.gn * (w.D * gv.GammaPrime * gv.GammaPrime - gv.GammaPrime));
}

LyapunovReport verify_lyapunov(const WeightParams& w, const PotentialSpec& p, const SearchCfg& search) {
    if (p.gradient_bounded())
        throw HypothesisError("Lyapunov weight verification needs an unbounded potential gradient "
                              "(for bounded gradients g = 0 and no weight is used); got " + p.describe());
    w.validate();

    LyapunovReport rep;
    rep.c = w.c;

    // Worst margin over directions and angles, per radius, on a log-r grid.
    const double lr0 = std::log(search.r_min), lr1 = std::log(search.r_max);
    std::vector<double> worst(search.n_r);
    rep.sweep_r.resize(search.n_r);
    long n_samples_per_r = static_cast<long>(search.n_dir) * search.n_alpha;
    for (int ir = 0; ir < search.n_r; ++ir) {
        const double r = std::exp(lr0 + (lr1 - lr0) * ir / (search.n_r - 1.0));
        rep.sweep_r[ir] = r;
        double m = std::numeric_limits<double>::infinity();
        for (int id = 0; id < search.n_dir; ++id) {
            const double th = 2.0 * M_PI * id / search.n_dir;
            const Vec2 x{r * std::cos(th), r * std::sin(th)};
            for (int ia = 0; ia < search.n_alpha; ++ia) {
                const double alpha = 2.0 * M_PI * ia / search.n_alpha;
                const Frame f = make_frame(p, x, alpha);
                const double ratio = eval_weight_generator(w, p, x, alpha);
                m = std::min(m, -ratio / f.gn - w.c);
            }
        }
        worst[ir] = m;
    }
    rep.sweep_margin = worst;
    rep.samples = static_cast<long>(search.n_r) * n_samples_per_r;

    // The drift bound on the region beyond R is applied with |grad V| >= 1
    // there, so R may not undercut the |grad V| = 1 level set.
    double r_grad1 = 0.0;
    {
        double lo = 0.0, hi = search.r_max;
        auto gn = [&](double r) {
            const PotentialValue pv = eval_potential(p, {r, 0.0});
            return std::hypot(pv.grad[0], pv.grad[1]);
        };
        if (gn(hi) >= 1.0) {
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (gn(mid) < 1.0 ? lo : hi) = mid;
            }
            r_grad1 = hi;
        } else {
            r_grad1 = search.r_max; // will trigger the failure path below
        }
    }

    int first_ok = search.n_r;
    for (int ir = search.n_r - 1; ir >= 0; --ir) {
        if (worst[ir] >= 0.0 && rep.sweep_r[ir] >= r_grad1)
            first_ok = ir;
        else
            break;
    }
    if (first_ok >= search.n_r)
        throw NumericalError("no radius up to r_max=" + std::to_string(search.r_max) +
                             " satisfies the weight drift condition; either kappa is too large or the sweep "
                             "range is too small");
    // R = largest radius still violating (or the sweep floor).
    rep.R = (first_ok == 0) ? search.r_min : rep.sweep_r[first_ok - 1];
    rep.margin_min = *std::min_element(worst.begin() + first_ok, worst.end());

    // Closed-form ramp-branch radius r1: smallest r with
    //   D (d+ - d-)/(2 eps0) - delta_minus (1 - D delta_plus) |grad V| < -2 gamma_tilde / (1 - eps0^2).
    {
        const double lhs_const = w.D * (w.delta_plus - w.delta_minus) / (2.0 * w.eps0) +
                                 2.0 * w.gamma_tilde / (1.0 - w.eps0 * w.eps0);
        const double coef = w.delta_minus * (1.0 - w.D * w.delta_plus);
        const double g_target = lhs_const / coef;
        double lo = 0.0, hi = search.r_max;
        auto gn = [&](double r) {
            const PotentialValue pv = eval_potential(p, {r, 0.0});
            return std::hypot(pv.grad[0], pv.grad[1]);
        };
        if (gn(hi) > g_target) {
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (gn(mid) < g_target ? lo : hi) = mid;
            }
            rep.r1 = hi;
        }
    }

    // Sampled r2: smallest sweep radius past which the drift remainder stays <= c.
    {
        std::vector<double> worst_diff(search.n_r, 0.0);
        for (int ir = 0; ir < search.n_r; ++ir) {
            const double r = rep.sweep_r[ir];
            double m = 0.0;
            for (int id = 0; id < search.n_dir; ++id) {
                const double th = 2.0 * M_PI * id / search.n_dir;
                const Vec2 x{r * std::cos(th), r * std::sin(th)};
                for (int ia = 0; ia < search.n_alpha; ++ia)
                    m = std::max(m, eval_weight_diff_term(w, p, x, 2.0 * M_PI * ia / search.n_alpha));
            }
            worst_diff[ir] = m;
        }
        int ok = search.n_r;
        for (int ir = search.n_r - 1; ir >= 0; --ir) {
            if (worst_diff[ir] <= w.c)
                ok = ir;
            else
                break;
        }
        if (ok < search.n_r) rep.r2 = rep.sweep_r[ok];
    }

    return rep;
}

} // namespace fibrelay

#include "cnchtv/solver.hpp"

#include <chrono>
#include <cmath>

namespace cnchtv {

namespace {

constexpr double kGoldenRatio = 1.6180339887498949;

double l2(const Image& a) { return std::sqrt(a.square().sum()); }

double l2(const VectorField& a) {
    return std::sqrt(a.dx.square().sum() + a.dy.square().sum());
}

double l2(const TensorField& a) {
    return std::sqrt(a.dxx.square().sum() + a.dxy.square().sum() + a.dyx.square().sum() +
                     a.dyy.square().sum());
}

// Shrink factor per pixel: (|x|-t)+ / |x|, exact zero at or below threshold.
Image shrink_factor(const Image& magnitude, const Image& threshold) {
    return (magnitude - threshold).max(0.0) / magnitude.max(1e-300);
}

bool finite(const VectorField& a) { return a.dx.allFinite() && a.dy.allFinite(); }

bool finite(const TensorField& a) {
    return a.dxx.allFinite() && a.dxy.allFinite() && a.dyx.allFinite() && a.dyy.allFinite();
}

} // namespace

void SolverConfig::validate() const {
    if (mu <= 0.0) throw ArgumentError("SolverConfig: mu must be positive");
    if (beta1 <= 0.0 || beta2 <= 0.0 || beta3 <= 0.0) {
        throw ArgumentError("SolverConfig: penalties beta1..beta3 must be positive");
    }
    if (gamma <= 0.0 || gamma > kGoldenRatio + 1e-12) {
        throw ArgumentError("SolverConfig: gamma must lie in (0, (1+sqrt(5))/2]");
    }
    if (box_lo >= box_hi) throw ArgumentError("SolverConfig: box_lo must be below box_hi");
    if (max_iters < 1) throw ArgumentError("SolverConfig: max_iters must be positive");
    if (tol <= 0.0) throw ArgumentError("SolverConfig: tol must be positive");
    if (inner_sweeps < 1) throw ArgumentError("SolverConfig: inner_sweeps must be positive");
    if (fixed_zeta && (*fixed_zeta < 0.0 || *fixed_zeta > 1.0)) {
        throw ArgumentError("SolverConfig: fixed_zeta must lie in [0,1]");
    }
    weights.validate();
}

VectorField shrink_iso(const VectorField& x, const Image& threshold) {
    const Image factor = shrink_factor((x.dx.square() + x.dy.square()).sqrt(), threshold);
    return {x.dx * factor, x.dy * factor};
}

TensorField shrink_iso(const TensorField& x, const Image& threshold) {
    const Image factor = shrink_factor(
        (x.dxx.square() + x.dxy.square() + x.dyx.square() + x.dyy.square()).sqrt(), threshold);
    return {x.dxx * factor, x.dxy * factor, x.dyx * factor, x.dyy * factor};
}

VectorField v_step(const SolverState& state, const SolverConfig& cfg) {
    const VectorField df = grad(state.f);
    const VectorField chi{df.dx + state.omega.dx / cfg.beta1,
                          df.dy + state.omega.dy / cfg.beta1};
    return shrink_iso(chi, state.zeta * state.psi1 / cfg.beta1);
}

TensorField w_step(const SolverState& state, const SolverConfig& cfg) {
    const TensorField d2f = hessian(state.f);
    const TensorField chi{d2f.dxx + state.lambda.dxx / cfg.beta2,
                          d2f.dxy + state.lambda.dxy / cfg.beta2,
                          d2f.dyx + state.lambda.dyx / cfg.beta2,
                          d2f.dyy + state.lambda.dyy / cfg.beta2};
    return shrink_iso(chi, (1.0 - state.zeta) * state.psi2 / cfg.beta2);
}

Image u_step(const SolverState& state, const SolverConfig& cfg) {
    return clamp(state.f + state.xi / cfg.beta3, cfg.box_lo, cfg.box_hi);
}

FStepPlan make_f_step_plan(const Image& g, const Psf& psf, const SolverConfig& cfg) {
    const Index m = g.rows();
    const Index n = g.cols();
    FStepPlan plan;
    plan.blur = psf_to_spectrum(psf, m, n);
    plan.denom = cfg.mu * plan.blur.abs2() + cfg.beta1 * grad_gram_spectrum(m, n) +
                 cfg.beta2 * hessian_gram_spectrum(m, n) + cfg.beta3;
    if (!plan.denom.allFinite()) {
        for (Index j = 0; j < n; ++j) {
            for (Index i = 0; i < m; ++i) {
                if (!std::isfinite(plan.denom(i, j))) {
                    throw Error("f_step: non-finite denominator at frequency (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
                }
            }
        }
    }
    plan.mu_ht_g = cfg.mu * ifft2_real(plan.blur.conjugate() * fft2(g));
    return plan;
}

Image f_step(const SolverState& state, const SolverConfig& cfg, const FStepPlan& plan) {
    const VectorField vres{cfg.beta1 * state.v.dx - state.omega.dx,
                           cfg.beta1 * state.v.dy - state.omega.dy};
    const TensorField wres{cfg.beta2 * state.w.dxx - state.lambda.dxx,
                           cfg.beta2 * state.w.dxy - state.lambda.dxy,
                           cfg.beta2 * state.w.dyx - state.lambda.dyx,
                           cfg.beta2 * state.w.dyy - state.lambda.dyy};
    const Image rhs =
        plan.mu_ht_g + grad_adjoint(vres) + hessian_adjoint(wres) + cfg.beta3 * state.u - state.xi;
    return ifft2_real(fft2(rhs) / plan.denom);
}

Image f_step(const SolverState& state, const SolverConfig& cfg, const Image& g, const Psf& psf) {
    return f_step(state, cfg, make_f_step_plan(g, psf, cfg));
}

MultiplierUpdate multiplier_update(const SolverState& state, const SolverConfig& cfg) {
    const VectorField df = grad(state.f);
    const TensorField d2f = hessian(state.f);
    MultiplierUpdate next;
    next.omega = {state.omega.dx - cfg.gamma * cfg.beta1 * (state.v.dx - df.dx),
                  state.omega.dy - cfg.gamma * cfg.beta1 * (state.v.dy - df.dy)};
    next.lambda = {state.lambda.dxx - cfg.gamma * cfg.beta2 * (state.w.dxx - d2f.dxx),
                   state.lambda.dxy - cfg.gamma * cfg.beta2 * (state.w.dxy - d2f.dxy),
                   state.lambda.dyx - cfg.gamma * cfg.beta2 * (state.w.dyx - d2f.dyx),
                   state.lambda.dyy - cfg.gamma * cfg.beta2 * (state.w.dyy - d2f.dyy)};
    next.xi = state.xi - cfg.gamma * cfg.beta3 * (state.u - state.f);
    return next;
}

double objective(const Image& f, const Image& g, const Psf& psf, const Image& zeta_map,
                 const SolverConfig& cfg) {
    const double fidelity = 0.5 * cfg.mu * (convolve_periodic(f, psf) - g).square().sum();
    const VectorField df = grad(f);
    const TensorField d2f = hessian(f);
    const Image mag1 = (df.dx.square() + df.dy.square()).sqrt();
    const Image mag2 =
        (d2f.dxx.square() + d2f.dxy.square() + d2f.dyx.square() + d2f.dyy.square()).sqrt();
    // pow(0, nu) = 0 for nu > 0, so no special-casing is needed.
    const double first = (zeta_map * mag1.pow(cfg.weights.nu1)).sum();
    const double second = ((1.0 - zeta_map) * mag2.pow(cfg.weights.nu2)).sum();
    return fidelity + first + second;
}

namespace {

void refresh_weights(SolverState& state, const SolverConfig& cfg) {
    if (cfg.fixed_zeta) {
        state.zeta = Image::Constant(state.f.rows(), state.f.cols(), *cfg.fixed_zeta);
    } else {
        state.zeta = zeta(state.f, cfg.weights);
    }
    std::tie(state.psi1, state.psi2) = irls_weights(state.f, cfg.weights);
}

} // namespace

SolverReport deblur(const Image& g, const Psf& psf, const SolverConfig& cfg,
                    const IterationCallback& on_iteration) {
    cfg.validate();
    require_valid(g, "deblur");
    const auto start = std::chrono::steady_clock::now();

    const FStepPlan plan = make_f_step_plan(g, psf, cfg);

    SolverState state;
    state.f = g;
    state.u = g;
    state.v = grad(state.f);
    state.w = hessian(state.f);
    state.omega = VectorField::Zero(g.rows(), g.cols());
    state.lambda = TensorField::Zero(g.rows(), g.cols());
    state.xi = Image::Zero(g.rows(), g.cols());
    refresh_weights(state, cfg);

    SolverReport report;
    const double initial_objective = objective(state.f, g, psf, state.zeta, cfg);
    report.objective_trace.push_back(initial_objective);
    if (!std::isfinite(initial_objective)) {
        throw DivergenceError(0, std::move(report), "deblur: initial objective is non-finite");
    }

    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto finish = [&](const std::string& reason) {
        report.restored = state.u;
        report.iterations = state.iter;
        report.exit_reason = reason;
        report.final_gap = l2(state.u - state.f);
        report.wall_time_s = elapsed();
        return report;
    };

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const Image f_prev = state.f;
        state.iter = iter;

        for (int sweep = 0; sweep < cfg.inner_sweeps; ++sweep) {
            state.v = v_step(state, cfg);
            state.w = w_step(state, cfg);
            state.u = u_step(state, cfg);
            state.f = f_step(state, cfg, plan);

            if (sweep + 1 == cfg.inner_sweeps) break; // multipliers updated below
            const MultiplierUpdate next = multiplier_update(state, cfg);
            state.omega = next.omega;
            state.lambda = next.lambda;
            state.xi = next.xi;
        }

        IterationStats stats;
        stats.iter = iter;
        stats.objective = objective(state.f, g, psf, state.zeta, cfg);
        const double fn = std::max(l2(state.f), 1e-300);
        const VectorField df = grad(state.f);
        const TensorField d2f = hessian(state.f);
        stats.res_v = l2(VectorField{state.v.dx - df.dx, state.v.dy - df.dy}) / fn;
        stats.res_w = l2(TensorField{state.w.dxx - d2f.dxx, state.w.dxy - d2f.dxy,
                                     state.w.dyx - d2f.dyx, state.w.dyy - d2f.dyy}) /
                      fn;
        stats.res_u = l2(state.u - state.f) / fn;
        stats.rel_change = l2(state.f - f_prev) / std::max(l2(f_prev), 1e-300);

        report.objective_trace.push_back(stats.objective);
        report.primal_residuals.push_back({stats.res_v, stats.res_w, stats.res_u});
        report.iterations = iter;

        const bool state_finite = state.f.allFinite() && state.u.allFinite() &&
                                  finite(state.v) && finite(state.w) && finite(state.omega) &&
                                  finite(state.lambda) && state.xi.allFinite();
        const bool objective_exploded =
            initial_objective > 0.0 && stats.objective > 1e3 * initial_objective;
        if (!state_finite || !std::isfinite(stats.objective) || objective_exploded) {
            SolverReport partial = finish("divergence");
            throw DivergenceError(iter, std::move(partial),
                                  "deblur: diverged at iteration " + std::to_string(iter) +
                                      (state_finite ? " (objective explosion)"
                                                    : " (non-finite iterate)"));
        }

        // Normal-equation state for this iteration: multipliers still lag f.
        if (on_iteration) on_iteration(state, stats);

        const MultiplierUpdate next = multiplier_update(state, cfg);
        state.omega = next.omega;
        state.lambda = next.lambda;
        state.xi = next.xi;

        refresh_weights(state, cfg);

        if (stats.rel_change <= cfg.tol) {
            return finish("tolerance");
        }
    }
    return finish("max_iters");
}

ColorDeblurResult deblur_color(const ColorImage& g, const Psf& psf, const SolverConfig& cfg) {
    require_valid(g, "deblur_color");
    ColorDeblurResult result;
    for (const Image& plane : g.planes) {
        SolverReport report = deblur(plane, psf, cfg);
        result.restored.planes.push_back(report.restored);
        result.reports.push_back(std::move(report));
    }
    return result;
}

SolverConfig config_for_noise(double level_percent) {
    if (level_percent < 0.0) {
        throw ArgumentError("config_for_noise: noise level must be non-negative");
    }
    SolverConfig cfg;
    cfg.weights.kappa = 0.05;
    cfg.weights.sigma = 2.0;
    if (level_percent == 0.0) {
        return cfg; // mu=5e5, beta=1e2 defaults
    }
    // Measured operating points; log-log interpolation in between, 1/level^2
    // falloff beyond the last entry.
    constexpr double levels[] = {1.0, 2.0, 5.0};
    constexpr double mus[] = {0.4, 0.18, 0.03};
    double mu;
    if (level_percent <= levels[0]) {
        mu = mus[0] * (levels[0] / level_percent) * (levels[0] / level_percent);
        if (mu >= cfg.mu) return cfg; // vanishing noise: noise-free settings
    } else if (level_percent >= levels[2]) {
        mu = mus[2] * (levels[2] / level_percent) * (levels[2] / level_percent);
    } else {
        const int k = level_percent <= levels[1] ? 0 : 1;
        const double t = (std::log(level_percent) - std::log(levels[k])) /
                         (std::log(levels[k + 1]) - std::log(levels[k]));
        mu = std::exp((1.0 - t) * std::log(mus[k]) + t * std::log(mus[k + 1]));
    }
    cfg.mu = mu;
    cfg.beta1 = cfg.beta2 = cfg.beta3 = 25.0 * mu;
    cfg.tol = 1e-5;
    cfg.max_iters = 600;
    return cfg;
}

} // namespace cnchtv

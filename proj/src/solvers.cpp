#include "fbsplit/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace fbsplit {

const std::vector<std::string>& algorithm_ids() {
    static const std::vector<std::string> ids = {"ihpa", "ispa", "mttm",
                                                 "vttm", "tseng", "lpfb"};
    return ids;
}

std::string to_string(Algorithm alg) {
    switch (alg) {
        case Algorithm::Ihpa: return "ihpa";
        case Algorithm::Ispa: return "ispa";
        case Algorithm::Mttm: return "mttm";
        case Algorithm::Vttm: return "vttm";
        case Algorithm::Tseng: return "tseng";
        case Algorithm::Lpfb: return "lpfb";
    }
    throw std::logic_error("to_string: unknown algorithm");
}

std::optional<Algorithm> algorithm_from_id(const std::string& id) {
    if (id == "ihpa") return Algorithm::Ihpa;
    if (id == "ispa") return Algorithm::Ispa;
    if (id == "mttm") return Algorithm::Mttm;
    if (id == "vttm") return Algorithm::Vttm;
    if (id == "tseng") return Algorithm::Tseng;
    if (id == "lpfb") return Algorithm::Lpfb;
    return std::nullopt;
}

StepsizePolicy::StepsizePolicy(double gamma0_, double mu_) : gamma0(gamma0_), mu(mu_) {
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
        throw std::invalid_argument("StepsizePolicy: gamma0 must be positive");
    }
    if (!(mu > 0.0) || !(mu < 1.0)) {
        throw std::invalid_argument("StepsizePolicy: mu must lie in (0,1)");
    }
}

double stepsize_update(double gamma, double mu, const Vector& w, const Vector& y,
                       const Vector& f_diff, double noise_floor) {
    if (!(gamma > 0.0)) throw std::invalid_argument("stepsize_update: gamma must be positive");
    if (!(mu > 0.0) || !(mu < 1.0)) {
        throw std::invalid_argument("stepsize_update: mu must lie in (0,1)");
    }
    if (!(noise_floor >= 0.0)) {
        throw std::invalid_argument("stepsize_update: noise floor must be nonnegative");
    }
    const double diff = norm(f_diff);
    // Once the subtracted operator values agree to within the caller's noise
    // floor the ratio |w-y|/|F(w)-F(y)| is pure quantization noise (it wanders
    // by factors of 2), and taking it at face value ratchets gamma below the
    // lower bound the convergence analysis guarantees.
    if (diff <= noise_floor || diff == 0.0) return gamma;
    return std::min(mu * norm(w - y) / diff, gamma);
}

InertiaPolicy InertiaPolicy::sequence(std::function<double(int)> rule) {
    if (!rule) throw std::invalid_argument("InertiaPolicy: rule required");
    InertiaPolicy p;
    p.sequence_rule_ = std::move(rule);
    return p;
}

InertiaPolicy InertiaPolicy::adaptive(double alpha, std::function<double(int)> xi) {
    if (!(alpha >= 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("InertiaPolicy: alpha must lie in [0,1)");
    }
    if (!xi) throw std::invalid_argument("InertiaPolicy: xi rule required");
    InertiaPolicy p;
    p.alpha_ = alpha;
    p.xi_ = std::move(xi);
    return p;
}

InertiaPolicy InertiaPolicy::none() {
    return sequence([](int) { return 0.0; });
}

InertiaPolicy InertiaPolicy::fista_like() {
    return sequence([](int n) { return n < 1 ? 0.0 : (n - 1.0) / (n + 3.0); });
}

InertiaPolicy InertiaPolicy::default_adaptive() {
    return adaptive(0.6, [](int n) { return 1.0 / ((n + 1.0) * (n + 1.0)); });
}

double InertiaPolicy::value(int n, const Vector& x_curr, const Vector& x_prev) const {
    if (sequence_rule_) {
        const double a = sequence_rule_(n);
        if (!(a >= 0.0) || !(a < 1.0)) {
            throw std::domain_error("InertiaPolicy: sequence rule produced a value outside [0,1)");
        }
        return a;
    }
    if (x_curr == x_prev) return alpha_;
    const double xi = xi_(n);
    if (!(xi > 0.0) || !std::isfinite(xi)) {
        throw std::domain_error("InertiaPolicy: xi rule must produce positive values");
    }
    return std::min(alpha_, xi / norm(x_curr - x_prev));
}

std::function<double(int)> default_delta() {
    return [](int n) { return 1.0 / (n + 1.0); };
}

std::function<double(int)> default_theta() {
    return [](int n) { return n / (2.0 * (n + 1.0)); };
}

std::function<Vector(const Vector&)> default_contraction() {
    return [](const Vector& x) { return 0.5 * x; };
}

SolverState::SolverState(Vector start, double gamma0)
    : anchor(start), x_prev(start), x_curr(start), gamma(gamma0), stack(start.dim()) {}

namespace {

InertiaPolicy default_inertia_for(Algorithm alg) {
    switch (alg) {
        case Algorithm::Ihpa: return InertiaPolicy::fista_like();
        case Algorithm::Ispa:
        case Algorithm::Lpfb: return InertiaPolicy::default_adaptive();
        default: return InertiaPolicy::none();
    }
}

// Quantization floor for a difference formed by subtracting two separate
// forward evaluations; operators with an exact difference map have none.
double difference_noise_floor(const ProblemInstance& problem, const Vector& f_w,
                              const Vector& f_y) {
    if (problem.forward.has_exact_difference()) return 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    return 8.0 * eps * (norm(f_w) + norm(f_y));
}

}  // namespace

Solver::Solver(ProblemInstance problem, Algorithm alg, SolverOptions opts)
    : problem_(std::move(problem)),
      alg_(alg),
      opts_(std::move(opts)),
      inertia_(opts_.inertia ? *opts_.inertia : default_inertia_for(alg)),
      state_(opts_.start ? *opts_.start : Vector::ones(problem_.dim),
             StepsizePolicy(opts_.stepsize.gamma0, opts_.stepsize.mu).gamma0) {
    if (opts_.max_iters < 0) throw std::invalid_argument("Solver: max_iters must be nonnegative");
    if (state_.x_curr.dim() != problem_.dim) {
        throw std::invalid_argument("Solver: start point has wrong dimension");
    }
    if (opts_.residual_tol && !(*opts_.residual_tol > 0.0)) {
        throw std::invalid_argument("Solver: residual tolerance must be positive");
    }
}

void Solver::fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "[" << to_string(alg_) << "][n=" << state_.n << "] " << what;
    throw InvariantViolation(msg.str());
}

void Solver::check_stepsize(const Vector& w, const TsengStep& ts, double gamma_next) const {
    if (!(gamma_next <= state_.gamma)) {
        fail("stepsize increased: " + std::to_string(state_.gamma) + " -> " +
             std::to_string(gamma_next));
    }
    // The bound gamma'|F(w)-F(y)| <= mu|w-y| is checked in multiplied form: the
    // division form scales the rounding noise by |F(w)-F(y)|, which outgrows a
    // fixed tolerance on steep problems.
    const double eps = std::numeric_limits<double>::epsilon();
    const double diff = norm(ts.f_diff);
    const double lhs = gamma_next * diff;
    const double core = opts_.stepsize.mu * norm(w - ts.y);
    if (!(lhs <= core + 1e-12 + 8.0 * eps * core)) {
        fail("stepsize bound violated: gamma'|F(w)-F(y)| = " + std::to_string(lhs) +
             " exceeds mu|w-y| = " + std::to_string(core));
    }
    // In exact arithmetic the stepsize never drops below min(gamma0, mu/L), but the
    // computed quotient mu|w-y|/|F(w)-F(y)| inherits a relative error of order
    // eps*(|F(w)|+|F(y)|)/|F(w)-F(y)| from the two forward evaluations, which blows
    // up as the iterates converge; the slack must grow with that ratio or a long
    // converged run would trip this check on rounding noise alone. When the two
    // forward values are bitwise equal the update kept gamma, so there is nothing
    // new to check.
    if (problem_.forward.lipschitz_hint() && diff > 0.0) {
        const double floor =
            std::min(opts_.stepsize.gamma0, opts_.stepsize.mu / *problem_.forward.lipschitz_hint());
        const double slack =
            1e-12 + floor * std::min(1.0, 8.0 * eps * (norm(ts.f_w) + norm(ts.f_y)) / diff);
        if (!(gamma_next >= floor - slack)) {
            fail("stepsize fell below min(gamma0, mu/L): " + std::to_string(gamma_next));
        }
    }
}

void Solver::check_projection_invariants(const Vector& w, const TsengStep& ts, double gamma_next,
                                         const HalfSpace& cut, const HalfSpace* anchor_halfspace,
                                         const Vector& x_next) const {
    // Per-step contraction inequality at the known solution.
    if (problem_.known_solution) {
        const Vector& p = *problem_.known_solution;
        const double ratio = opts_.stepsize.mu * state_.gamma / gamma_next;
        const double lhs = (ts.z - p).raw().squaredNorm();
        const double rhs = (w - p).raw().squaredNorm() -
                           (1.0 - ratio * ratio) * (w - ts.y).raw().squaredNorm() + 1e-9;
        if (!(lhs <= rhs)) {
            fail("contraction inequality violated at the known solution: |z-p|^2 = " +
                 std::to_string(lhs) + " > " + std::to_string(rhs));
        }
        if (!cut.contains(p)) fail("known solution left the contraction cut");
        if (anchor_halfspace && !anchor_halfspace->contains(p)) {
            fail("known solution left the anchoring cut");
        }
    }

    if (!cut.contains(x_next)) fail("new iterate outside the contraction cut");
    if (anchor_halfspace && !anchor_halfspace->contains(x_next)) {
        fail("new iterate outside the anchoring cut");
    }
    if (alg_ == Algorithm::Ispa) {
        for (std::size_t i = 0; i < state_.stack.size(); ++i) {
            if (!state_.stack[i].contains(x_next)) {
                fail("new iterate outside accumulated cut #" + std::to_string(i));
            }
        }
    }

    const double dist_next = norm(x_next - state_.anchor);
    const double dist_curr = norm(state_.x_curr - state_.anchor);
    if (!(dist_next >= dist_curr - 1e-10)) {
        fail("anchor distance decreased: " + std::to_string(dist_curr) + " -> " +
             std::to_string(dist_next));
    }
}

Solver::StepOutcome Solver::projection_step(bool shrinking) {
    const double alpha = inertia_.value(state_.n, state_.x_curr, state_.x_prev);
    const Vector w = axpy(alpha, state_.x_curr - state_.x_prev, state_.x_curr);
    const TsengStep ts = tseng_map(w, state_.gamma, problem_);
    const double gamma_next =
        stepsize_update(state_.gamma, opts_.stepsize.mu, w, ts.y, ts.f_diff,
                        difference_noise_floor(problem_, ts.f_w, ts.f_y));
    HalfSpace cut = fejer_cut(w, ts.z, ts.y, state_.gamma, gamma_next, opts_.stepsize.mu);

    Vector x_next = [&] {
        if (shrinking) {
            state_.stack.append(cut);
            return project_polyhedron(state_.anchor, state_.stack);
        }
        const HalfSpace anchoring = anchor_cut(state_.x_curr, state_.anchor);
        Vector next = project_two_halfspaces(state_.anchor, cut, anchoring);
        if (opts_.checked) {
            check_stepsize(w, ts, gamma_next);
            check_projection_invariants(w, ts, gamma_next, cut, &anchoring, next);
        }
        return next;
    }();

    if (shrinking && opts_.checked) {
        check_stepsize(w, ts, gamma_next);
        check_projection_invariants(w, ts, gamma_next, state_.stack[state_.stack.size() - 1],
                                    nullptr, x_next);
    }

    return StepOutcome{std::move(x_next), gamma_next, alpha, norm(w - ts.y)};
}

Solver::StepOutcome Solver::mann_step() {
    const int n = state_.n;
    const double delta = opts_.delta(n);
    const double theta = opts_.theta(n);
    if (!(delta > 0.0) || !(delta <= 1.0)) {
        throw std::domain_error("mann step: delta_n must lie in (0,1]");
    }
    if (!(theta >= 0.0) || !(theta <= 1.0 - delta)) {
        throw std::domain_error("mann step: theta_n must lie in [0, 1-delta_n]");
    }

    const TsengStep ts = tseng_map(state_.x_curr, state_.gamma, problem_);
    const double gamma_next =
        stepsize_update(state_.gamma, opts_.stepsize.mu, state_.x_curr, ts.y, ts.f_diff,
                        difference_noise_floor(problem_, ts.f_w, ts.f_y));
    if (opts_.checked) check_stepsize(state_.x_curr, ts, gamma_next);

    Vector x_next((1.0 - delta - theta) * state_.x_curr.raw() + theta * ts.z.raw());
    return StepOutcome{std::move(x_next), gamma_next, 0.0, norm(state_.x_curr - ts.y)};
}

Solver::StepOutcome Solver::viscosity_step() {
    const int n = state_.n;
    const double delta = opts_.delta(n);
    if (!(delta > 0.0) || !(delta <= 1.0)) {
        throw std::domain_error("viscosity step: delta_n must lie in (0,1]");
    }

    const TsengStep ts = tseng_map(state_.x_curr, state_.gamma, problem_);
    const double gamma_next =
        stepsize_update(state_.gamma, opts_.stepsize.mu, state_.x_curr, ts.y, ts.f_diff,
                        difference_noise_floor(problem_, ts.f_w, ts.f_y));
    if (opts_.checked) check_stepsize(state_.x_curr, ts, gamma_next);

    Vector fx = opts_.contraction(state_.x_curr);
    if (fx.dim() != problem_.dim) {
        throw std::domain_error("viscosity step: contraction changed dimension");
    }
    Vector x_next(delta * fx.raw() + (1.0 - delta) * ts.z.raw());
    return StepOutcome{std::move(x_next), gamma_next, 0.0, norm(state_.x_curr - ts.y)};
}

Solver::StepOutcome Solver::tseng_step() {
    const TsengStep ts = tseng_map(state_.x_curr, state_.gamma, problem_);
    const double gamma_next =
        stepsize_update(state_.gamma, opts_.stepsize.mu, state_.x_curr, ts.y, ts.f_diff,
                        difference_noise_floor(problem_, ts.f_w, ts.f_y));
    if (opts_.checked) check_stepsize(state_.x_curr, ts, gamma_next);
    return StepOutcome{ts.z, gamma_next, 0.0, norm(state_.x_curr - ts.y)};
}

Solver::StepOutcome Solver::forward_backward_step() {
    const double alpha = inertia_.value(state_.n, state_.x_curr, state_.x_prev);
    const Vector w = axpy(alpha, state_.x_curr - state_.x_prev, state_.x_curr);
    const Vector f_w = problem_.forward(w);
    const Vector x_next = problem_.resolvent(state_.gamma, Vector(w.raw() - state_.gamma * f_w.raw()));
    const Vector f_next = problem_.forward(x_next);
    const Vector f_diff = problem_.forward.difference(w, x_next, f_w, f_next);
    const double gamma_next =
        stepsize_update(state_.gamma, opts_.stepsize.mu, w, x_next, f_diff,
                        difference_noise_floor(problem_, f_w, f_next));
    if (opts_.checked) {
        // The resolvent output plays the role of y in the stepsize bound.
        check_stepsize(w, TsengStep{x_next, x_next, f_w, f_next, f_diff}, gamma_next);
    }
    return StepOutcome{x_next, gamma_next, alpha, norm(w - x_next)};
}

IterationRecord Solver::step() {
    using clock = std::chrono::steady_clock;
    const bool timed = !opts_.checked;
    const auto t0 = clock::now();

    StepOutcome out = [&] {
        switch (alg_) {
            case Algorithm::Ihpa: return projection_step(false);
            case Algorithm::Ispa: return projection_step(true);
            case Algorithm::Mttm: return mann_step();
            case Algorithm::Vttm: return viscosity_step();
            case Algorithm::Tseng: return tseng_step();
            case Algorithm::Lpfb: return forward_backward_step();
        }
        throw std::logic_error("Solver::step: unknown algorithm");
    }();

    IterationRecord rec;
    rec.n = state_.n + 1;
    if (problem_.known_solution) {
        rec.err_x = norm(out.x_next - *problem_.known_solution);
    }
    if (problem_.objective && problem_.optimal_value) {
        rec.err_obj = std::abs((*problem_.objective)(out.x_next) - *problem_.optimal_value);
    }
    rec.gamma = out.gamma_next;
    rec.alpha = out.alpha;
    rec.residual = out.residual;
    if (timed) {
        rec.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }

    state_.x_prev = std::move(state_.x_curr);
    state_.x_curr = std::move(out.x_next);
    state_.gamma = out.gamma_next;
    state_.n += 1;
    state_.trace.push_back(rec);
    return rec;
}

const std::vector<IterationRecord>& Solver::run() {
    while (state_.n < opts_.max_iters) {
        const IterationRecord rec = step();
        if (opts_.residual_tol && rec.residual < *opts_.residual_tol) break;
    }
    return state_.trace;
}

std::vector<IterationRecord> run(const ProblemInstance& problem, Algorithm alg,
                                 SolverOptions opts) {
    Solver solver(problem, alg, std::move(opts));
    return solver.run();
}

}  // namespace fbsplit

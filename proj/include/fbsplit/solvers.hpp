#pragma once

#include "fbsplit/operators.hpp"
#include "fbsplit/projections.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fbsplit {

/**
 * The solver family:
 *   ihpa  - inertial hybrid projection: project the anchor onto the
 *           intersection of the contraction cut and the anchoring cut.
 *   ispa  - inertial shrinking projection: project the anchor onto the
 *           intersection of all contraction cuts accumulated so far.
 *   mttm  - Mann-type forward-backward-forward baseline (no inertia).
 *   vttm  - viscosity-type forward-backward-forward baseline (no inertia).
 *   tseng - plain forward-backward-forward iteration.
 *   lpfb  - inertial forward-backward baseline (single resolvent step).
 */
enum class Algorithm { Ihpa, Ispa, Mttm, Vttm, Tseng, Lpfb };

const std::vector<std::string>& algorithm_ids();
std::string to_string(Algorithm alg);
std::optional<Algorithm> algorithm_from_id(const std::string& id);

/// Initial stepsize and the backtracking factor of the adaptive rule.
struct StepsizePolicy {
    double gamma0 = 0.4;
    double mu = 0.5;

    StepsizePolicy() = default;
    StepsizePolicy(double gamma0_, double mu_);
};

/**
 * Adaptive stepsize recursion: keep gamma when F(w) == F(y), otherwise
 * gamma_next = min(mu |w - y| / |F(w) - F(y)|, gamma), with f_diff the
 * (ideally exactly evaluated) difference F(w) - F(y). The result is
 * nonincreasing and stays bounded away from zero for Lipschitz F.
 *
 * noise_floor guards difference values computed by subtracting two separate
 * operator evaluations: when |f_diff| falls at or below it, the ratio is
 * quantization noise and gamma is kept. Pass 0 when f_diff is exact.
 */
double stepsize_update(double gamma, double mu, const Vector& w, const Vector& y,
                       const Vector& f_diff, double noise_floor = 0.0);

/**
 * Extrapolation weight rule. Two variants:
 *  - sequence: alpha_n = rule(n), each value validated to lie in [0,1);
 *  - adaptive: alpha_n = alpha when x_n == x_{n-1} exactly, otherwise
 *    min(alpha, xi(n) / |x_n - x_{n-1}|).
 */
class InertiaPolicy {
public:
    static InertiaPolicy sequence(std::function<double(int)> rule);
    static InertiaPolicy adaptive(double alpha, std::function<double(int)> xi);
    static InertiaPolicy none();

    /// alpha_n = (n-1)/(n+3), clamped to 0 at n = 0 (where the previous and
    /// current iterates coincide anyway, so the value is immaterial).
    static InertiaPolicy fista_like();

    /// Adaptive rule with alpha = 0.6 and xi_n = 1/(n+1)^2. Note: the
    /// classical convergence conditions for this family ask for a
    /// non-summable xi; 1/(n+1)^2 is summable but is kept as the benchmark
    /// default schedule.
    static InertiaPolicy default_adaptive();

    double value(int n, const Vector& x_curr, const Vector& x_prev) const;

private:
    InertiaPolicy() = default;
    std::function<double(int)> sequence_rule_;
    double alpha_ = 0.0;
    std::function<double(int)> xi_;
};

/**
 * One row of a solver trace, describing the state after the n-th iteration
 * (n is 1-based). err_x and err_obj are measured at the new iterate and are
 * present only when the problem carries the matching metadata. gamma is the
 * updated stepsize (the value the next iteration will consume); alpha and
 * residual = |w - y| belong to the step that produced this iterate.
 * elapsed_ms is absent in checked mode, where invariant verification would
 * pollute timings.
 */
struct IterationRecord {
    int n = 0;
    std::optional<double> err_x;
    std::optional<double> err_obj;
    double gamma = 0.0;
    double alpha = 0.0;
    double residual = 0.0;
    std::optional<double> elapsed_ms;
};

std::function<double(int)> default_delta();        // 1/(n+1)
std::function<double(int)> default_theta();        // n/(2(n+1))
std::function<Vector(const Vector&)> default_contraction();  // x -> 0.5 x

struct SolverOptions {
    int max_iters = 100;
    std::optional<double> residual_tol;   // stop early when |w - y| < tol
    std::optional<Vector> start;          // defaults to the all-ones point
    StepsizePolicy stepsize;
    std::optional<InertiaPolicy> inertia;  // per-algorithm default when unset
    std::function<double(int)> delta = default_delta();   // mttm, vttm
    std::function<double(int)> theta = default_theta();   // mttm
    std::function<Vector(const Vector&)> contraction = default_contraction();  // vttm
    bool checked = true;
};

/// Raised in checked mode when a step breaks one of its own guarantees.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct SolverState {
    int n = 0;
    Vector anchor;   // the fixed point the projection methods keep projecting
    Vector x_prev;
    Vector x_curr;
    double gamma = 0.0;
    HalfSpaceStack stack;   // contraction cuts accumulated by ispa
    std::vector<IterationRecord> trace;

    SolverState(Vector start, double gamma0);
};

/**
 * Driver holding one algorithm run. step() advances a single iteration and
 * appends to the trace; run() loops until max_iters or the residual stop.
 * In checked mode every iteration verifies: the stepsize bound
 * |F(w)-F(y)| <= (mu/gamma_next)|w - y|, monotonicity and the lower bound of
 * the stepsize, the per-step contraction inequality at the known solution,
 * cut membership of the new iterate and the known solution, and
 * monotonicity of the anchor distance. Violations raise InvariantViolation.
 */
class Solver {
public:
    Solver(ProblemInstance problem, Algorithm alg, SolverOptions opts = {});

    const SolverState& state() const { return state_; }
    const ProblemInstance& problem() const { return problem_; }
    Algorithm algorithm() const { return alg_; }

    IterationRecord step();
    const std::vector<IterationRecord>& run();

private:
    struct StepOutcome {
        Vector x_next;
        double gamma_next;
        double alpha;
        double residual;
    };

    StepOutcome projection_step(bool shrinking);
    StepOutcome mann_step();
    StepOutcome viscosity_step();
    StepOutcome tseng_step();
    StepOutcome forward_backward_step();

    void check_stepsize(const Vector& w, const TsengStep& ts, double gamma_next) const;
    void check_projection_invariants(const Vector& w, const TsengStep& ts, double gamma_next,
                                     const HalfSpace& cut, const HalfSpace* anchor_halfspace,
                                     const Vector& x_next) const;
    [[noreturn]] void fail(const std::string& what) const;

    ProblemInstance problem_;
    Algorithm alg_;
    SolverOptions opts_;
    InertiaPolicy inertia_;
    SolverState state_;
};

/// Convenience wrapper: construct, run, return the trace.
std::vector<IterationRecord> run(const ProblemInstance& problem, Algorithm alg,
                                 SolverOptions opts = {});

}  // namespace fbsplit

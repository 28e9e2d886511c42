#pragma once

#include "fbsplit/core.hpp"

#include <functional>
#include <optional>

namespace fbsplit {

/**
 * Single-valued monotone map F : R^n -> R^n, with an optional Lipschitz
 * constant hint used by diagnostic checks (it is never required for the
 * adaptive stepsize rule to work).
 *
 * An operator may also supply an exact difference map (w, y) -> F(w) - F(y).
 * For affine F the difference A(w - y) is free of the catastrophic
 * cancellation that F(w) - F(y) suffers once w and y nearly coincide, which
 * keeps the adaptive stepsize ratio |w - y| / |F(w) - F(y)| meaningful all
 * the way down to machine-scale residuals.
 */
class ForwardMap {
public:
    using Fn = std::function<Vector(const Vector&)>;
    using DiffFn = std::function<Vector(const Vector&, const Vector&)>;

    explicit ForwardMap(Fn eval, std::optional<double> lipschitz_hint = {},
                        DiffFn exact_difference = {});

    Vector operator()(const Vector& x) const;
    const std::optional<double>& lipschitz_hint() const { return lipschitz_hint_; }

    bool has_exact_difference() const { return static_cast<bool>(exact_difference_); }

    /// F(w) - F(y), via the exact difference map when available; f_w and f_y
    /// are the already-computed operator values, reused by the fallback.
    Vector difference(const Vector& w, const Vector& y, const Vector& f_w,
                      const Vector& f_y) const;

private:
    Fn eval_;
    std::optional<double> lipschitz_hint_;
    DiffFn exact_difference_;
};

/**
 * Resolvent family (gamma, v) -> (I + gamma G)^{-1} v of a maximal monotone
 * operator G. Evaluations must be single-valued and dimension preserving.
 */
class ResolventFamily {
public:
    using Fn = std::function<Vector(double, const Vector&)>;

    explicit ResolventFamily(Fn eval);

    Vector operator()(double gamma, const Vector& v) const;

private:
    Fn eval_;
};

/**
 * A monotone inclusion 0 in F(x) + G(x), presented as the forward map F and
 * the resolvent family of G, plus optional metadata consumed by error
 * traces: a known solution, and an objective with its optimal value when the
 * inclusion arises from minimization.
 */
struct ProblemInstance {
    ProblemInstance(ForwardMap forward_map, ResolventFamily resolvent_family, Eigen::Index n,
                    std::optional<Vector> solution = {},
                    std::optional<std::function<double(const Vector&)>> objective_fn = {},
                    std::optional<double> objective_optimum = {});

    ForwardMap forward;
    ResolventFamily resolvent;
    Eigen::Index dim;
    std::optional<Vector> known_solution;
    std::optional<std::function<double(const Vector&)>> objective;
    std::optional<double> optimal_value;
};

/// Proximal map of gamma * l1-norm: componentwise sign(y_i) * max(|y_i| - gamma, 0).
Vector soft_threshold(const Vector& y, double gamma);

/**
 * Closed-form forward-backward step for the linear benchmark problem
 * ("example1" in the registry): F(x) = 2x + 1, G(x) = 5x in R^10. Returns
 * (I + gamma G)^{-1}(w - gamma F(w)) = ((1-2g)/(1+5g)) w - (g/(1+5g)) 1.
 * Kept as a fused cross-check; the registry problem evaluates F and the
 * resolvent separately.
 */
Vector example1_forward_backward(const Vector& w, double gamma);

/// Gradient of the smooth part of the l1-regularized benchmark ("example2"): 2x + (3,5).
Vector example2_gradient(const Vector& x);

/// Full objective of "example2": |x|^2 + 3 x_1 + 5 x_2 + |x_1| + |x_2|.
double example2_objective(const Vector& x);

/**
 * One forward-backward-forward step at the point w:
 *   y = (I + gamma G)^{-1}(w - gamma F(w)),  z = y - gamma (F(y) - F(w)).
 * The operator evaluations are returned as well since callers reuse them for
 * the stepsize update and for diagnostic checks; f_diff = F(w) - F(y) is the
 * difference the z-update consumed (exact when the operator provides it).
 */
struct TsengStep {
    Vector y;
    Vector z;
    Vector f_w;
    Vector f_y;
    Vector f_diff;
};

TsengStep tseng_map(const Vector& w, double gamma, const ProblemInstance& problem);

}  // namespace fbsplit

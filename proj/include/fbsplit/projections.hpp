#pragma once

#include "fbsplit/core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fbsplit {

/// Nearest point of a halfspace: x0 itself when feasible, otherwise
/// x0 + ((b - <a,x0>)/|a|^2) a. The normal must be nonzero.
Vector project_halfspace(const Vector& x0, const HalfSpace& h);

/// Nearest point of {x : A x = b}: x0 + A^T (A A^T)^{-1} (b - A x0).
Vector project_affine(const Vector& x0, const AffineSet& set);

/**
 * Halfspace form of the per-iteration contraction cut
 *   {u : |z - u|^2 <= |w - u|^2 - (1 - mu^2 g^2 / g'^2) |w - y|^2},
 * which reduces to <2(w-z), u> <= <w-z, w+z> - (1 - mu^2 g^2/g'^2)|w-y|^2.
 * The offset is evaluated in the factored form <w-z, w+z> so that the cut
 * stays meaningful when w and z nearly coincide (late iterations); expanding
 * |w|^2 - |z|^2 directly would drown the bound in cancellation error.
 *
 * When w == z exactly the cut is the whole space if the right-hand side is
 * nonnegative; a negative right-hand side means the upstream iteration broke
 * its own contraction inequality, and construction fails.
 */
HalfSpace fejer_cut(const Vector& w, const Vector& z, const Vector& y, double gamma,
                    double gamma_next, double mu);

/**
 * Halfspace form of the anchoring cut {u : <x - u, x - anchor> <= 0}, i.e.
 * <anchor - x, u> <= <anchor - x, x>. It is the whole space when x == anchor.
 */
HalfSpace anchor_cut(const Vector& x, const Vector& anchor);

/**
 * Exact nearest point of the intersection of two halfspaces, by case
 * analysis on the active set: feasible point, one active constraint, or both
 * active via the 2x2 Gram system with nonnegative multipliers. Single-active
 * candidates move along their own normals, so they stay exact for arbitrarily
 * close normals; when no case certifies (a sliver or contradiction between
 * nearly parallel boundaries) the pair is handed to project_polyhedron, whose
 * contradiction policy applies — macroscopically empty pairs throw.
 */
Vector project_two_halfspaces(const Vector& x0, const HalfSpace& h1, const HalfSpace& h2);

/**
 * Append-only collection of halfspace constraints in a fixed dimension. One
 * constraint is added per solver iteration; existing entries never change,
 * so concurrent readers are safe between appends (single writer).
 */
class HalfSpaceStack {
public:
    explicit HalfSpaceStack(Eigen::Index dim);

    void append(HalfSpace h);

    Eigen::Index dim() const { return dim_; }
    std::size_t size() const { return constraints_.size(); }
    bool empty() const { return constraints_.empty(); }
    const HalfSpace& operator[](std::size_t i) const { return constraints_[i]; }
    const std::vector<HalfSpace>& constraints() const { return constraints_; }

private:
    Eigen::Index dim_;
    std::vector<HalfSpace> constraints_;
};

struct DykstraOptions {
    double tol = 1e-12;
    int max_sweeps = 10000;
};

/**
 * Resumable state for the cyclic projection below. The invariant
 * iterate + sum(corrections) == anchor is preserved by every sweep, which is
 * what makes warm starts across a growing stack valid: appended constraints
 * simply receive a zero correction.
 */
struct DykstraState {
    Eigen::VectorXd iterate;
    std::vector<Eigen::VectorXd> corrections;
};

/// Raised when the sweep budget runs out before the tolerance is met.
class DykstraError : public std::runtime_error {
public:
    DykstraError(const std::string& what, Vector best_iterate, double sweep_change,
                 double worst_violation);

    const Vector& best_iterate() const { return best_iterate_; }
    double sweep_change() const { return sweep_change_; }
    double worst_violation() const { return worst_violation_; }

private:
    Vector best_iterate_;
    double sweep_change_;
    double worst_violation_;
};

/**
 * Nearest point of the intersection of all stack constraints, computed with
 * Dykstra's cyclic projection anchored at x0. Returns once the change across
 * a full sweep drops below opts.tol (scaled by the iterate norm) and every
 * constraint is satisfied within 10 * opts.tol (scaled); throws DykstraError
 * with the best iterate when the sweep budget is exhausted first.
 *
 * Passing `warm` resumes from a previous call against a stack that has only
 * grown since. Note the convergence rate of cyclic projection degrades with
 * the angle between constraints; for the nearly parallel cut bundles the
 * shrinking-projection solver accumulates, prefer project_polyhedron.
 */
Vector project_halfspace_stack(const Vector& x0, const HalfSpaceStack& stack,
                               const DykstraOptions& opts = {}, DykstraState* warm = nullptr);

/**
 * Nearest point of the intersection of all stack constraints, computed by a
 * dual active-set method (the Goldfarb-Idnani scheme specialized to the
 * Euclidean metric) carried out in extended precision. Unlike the cyclic
 * scheme this has no sweep-count/accuracy trade-off: it terminates after
 * finitely many active-set changes with a KKT-certified point, and it stays
 * accurate on nearly parallel constraint bundles where cyclic sweeps crawl
 * at rate 1 - sin^2(angle). Constraints contradicting the rest only at
 * rounding scale are dropped; throws std::domain_error when the intersection
 * is empty beyond rounding scale, and std::runtime_error if the active-set
 * iteration cap is hit (a defect, not an input condition).
 */
Vector project_polyhedron(const Vector& x0, const HalfSpaceStack& stack);

}  // namespace fbsplit

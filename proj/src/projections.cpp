#include "fbsplit/projections.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace fbsplit {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

// Relative feasibility slack used when picking among KKT candidates.
double candidate_slack(const HalfSpace& h, const Vector& u) {
    return 1e-12 * std::max(1.0, std::sqrt(h.normal_squared()) * norm(u));
}

}  // namespace

Vector project_halfspace(const Vector& x0, const HalfSpace& h) {
    require_same_dim(x0.dim(), h.dim(), "project_halfspace");
    if (h.is_trivial()) {
        throw std::invalid_argument("project_halfspace: normal must be nonzero");
    }
    const double v = h.violation(x0);
    if (v <= 0.0) return x0;
    return Vector(x0.raw() - (v / h.normal_squared()) * h.normal().raw());
}

Vector project_affine(const Vector& x0, const AffineSet& set) {
    require_same_dim(x0.dim(), set.dim(), "project_affine");
    const Eigen::MatrixXd& A = set.coeffs();
    const Eigen::VectorXd residual = set.rhs() - A * x0.raw();
    Eigen::LLT<Eigen::MatrixXd> llt(A * A.transpose());
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("project_affine: A A^T is numerically singular");
    }
    return Vector(x0.raw() + A.transpose() * llt.solve(residual));
}

HalfSpace fejer_cut(const Vector& w, const Vector& z, const Vector& y, double gamma,
                    double gamma_next, double mu) {
    require_same_dim(w.dim(), z.dim(), "fejer_cut");
    require_same_dim(w.dim(), y.dim(), "fejer_cut");
    if (!(gamma > 0.0) || !(gamma_next > 0.0)) {
        throw std::invalid_argument("fejer_cut: stepsizes must be positive");
    }
    if (!(mu > 0.0) || !(mu < 1.0)) {
        throw std::invalid_argument("fejer_cut: mu must lie in (0,1)");
    }

    const double ratio = mu * gamma / gamma_next;
    const double shrink = (1.0 - ratio * ratio) * (w - y).raw().squaredNorm();
    const Eigen::VectorXd d = w.raw() - z.raw();
    const double offset = d.dot(w.raw() + z.raw()) - shrink;

    const double eps = std::numeric_limits<double>::epsilon();
    const double scale2 = std::max(1.0, w.raw().squaredNorm() + y.raw().squaredNorm());

    if (d.isZero(0.0)) {
        if (offset < 0.0) {
            // In exact arithmetic |w - z| >= (1 - ratio)|w - y|, so w == z with
            // |w - y| > 0 is impossible.  Near machine-precision convergence the
            // forward-backward-forward step can still round z onto w while y sits
            // an ulp away; that needs |w - y| <= eps * scale, so the shrink term
            // is O(eps^2 * scale^2) and the "empty" cut is a rounding artifact.
            // Accept those as trivial, reject anything macroscopic.
            if (shrink > 64.0 * eps * eps * scale2) {
                throw std::domain_error(
                    "fejer_cut: w == z but the contraction right-hand side is negative");
            }
            return HalfSpace(Vector::zeros(w.dim()), 0.0);
        }
        return HalfSpace(Vector::zeros(w.dim()), offset);
    }
    // A normal at rounding scale is all cancellation error: its direction (even
    // its sign) is meaningless, and normalizing it would manufacture a confident
    // constraint out of noise — stacked with its neighbours that can turn into a
    // numerically contradictory wedge.  Degrade to the whole space instead.
    const double dn = d.norm();
    if (dn <= 64.0 * eps * std::sqrt(scale2)) {
        return HalfSpace(Vector::zeros(w.dim()), 0.0);
    }
    // Scale-free representation: |w - z| shrinks toward rounding scale as the
    // iteration converges, and a unit normal keeps violation measures and the
    // cyclic-projection stop test in distance units for every cut in a stack.
    return HalfSpace(Vector(d / dn), offset / (2.0 * dn));
}

HalfSpace anchor_cut(const Vector& x, const Vector& anchor) {
    require_same_dim(x.dim(), anchor.dim(), "anchor_cut");
    const Eigen::VectorXd a = anchor.raw() - x.raw();
    if (a.isZero(0.0)) {
        return HalfSpace(Vector::zeros(x.dim()), 0.0);
    }
    Eigen::VectorXd unit = a / a.norm();
    const double b = unit.dot(x.raw());
    return HalfSpace(Vector(std::move(unit)), b);
}

Vector project_two_halfspaces(const Vector& x0, const HalfSpace& h1, const HalfSpace& h2) {
    require_same_dim(x0.dim(), h1.dim(), "project_two_halfspaces");
    require_same_dim(x0.dim(), h2.dim(), "project_two_halfspaces");

    if (h1.is_trivial() && h2.is_trivial()) return x0;
    if (h1.is_trivial()) return project_halfspace(x0, h2);
    if (h2.is_trivial()) return project_halfspace(x0, h1);

    const double v1 = h1.violation(x0);
    const double v2 = h2.violation(x0);
    if (v1 <= 0.0 && v2 <= 0.0) return x0;

    const Eigen::VectorXd& a1 = h1.normal().raw();
    const Eigen::VectorXd& a2 = h2.normal().raw();
    const double g11 = h1.normal_squared();
    const double g22 = h2.normal_squared();

    // KKT case analysis: exactly one case certifies the projection; keep the
    // nearest feasible candidate to stay robust near case boundaries. Each
    // single-constraint candidate moves along its own normal, so it lands on
    // its boundary to full precision no matter the angle to the other normal —
    // reducing the pair to coordinates along one shared direction would
    // mismeasure the other constraint by (tilt between the normals)*|x0|.
    std::optional<Vector> best;
    double best_dist = std::numeric_limits<double>::infinity();
    auto consider = [&](Vector candidate) {
        const double dist = norm(candidate - x0);
        if (dist < best_dist) {
            best_dist = dist;
            best = std::move(candidate);
        }
    };

    if (v1 > 0.0) {
        Vector p1(x0.raw() - (v1 / g11) * a1);
        if (h2.violation(p1) <= candidate_slack(h2, p1)) consider(std::move(p1));
    }
    if (v2 > 0.0) {
        Vector p2(x0.raw() - (v2 / g22) * a2);
        if (h1.violation(p2) <= candidate_slack(h1, p2)) consider(std::move(p2));
    }

    // Both constraints active: project onto the intersection of the two
    // boundary hyperplanes, worked in an orthonormal basis of span{a1, a2} in
    // extended precision — the subtraction vh2 - c*vh1 cancels catastrophically
    // for nearly parallel normals, and the result feeds straight into
    // distance-monotonicity invariants.
    using LongVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const LongVec al1 = a1.cast<long double>();
    const LongVec al2 = a2.cast<long double>();
    const long double n1 = al1.norm();
    const long double n2 = al2.norm();
    const LongVec q1 = al1 / n1;
    const LongVec e2 = al2 / n2;
    const long double c = q1.dot(e2);
    const long double s2 = (1.0L - c) * (1.0L + c);

    // Below sin^2 ~ 1e-15 (angle ~3e-8) the Gram system is numerically
    // singular; whatever sliver the two boundaries still enclose is left to
    // the fallback.
    if (s2 > 1e-15L) {
        const long double vh1 = static_cast<long double>(v1) / n1;
        const long double vh2 = static_cast<long double>(v2) / n2;
        // s2 * (multipliers in the unit-normal scaling); only the signs matter
        const long double lam1 = vh1 - c * vh2;
        const long double lam2 = vh2 - c * vh1;
        const long double slack = -1e-12L * std::max({std::abs(vh1), std::abs(vh2), 1.0L});
        if (lam1 >= slack && lam2 >= slack) {
            const long double s = std::sqrt(s2);
            const LongVec q2 = (e2 - c * q1) / s;
            const LongVec xl = x0.raw().cast<long double>() - vh1 * q1 - (lam2 / s) * q2;
            consider(Vector(xl.cast<double>()));
        }
    }

    if (best) return *best;

    // No case certified: nearly parallel normals whose single-constraint
    // projections each land outside the other constraint — a sliver (or an
    // outright contradiction) below the closed form's angle resolution. The
    // dual active-set solver measures every constraint against its own normal
    // and carries the contradiction policy: rounding-scale gaps drop a row,
    // macroscopic gaps reject the pair.
    HalfSpaceStack pair(x0.dim());
    pair.append(h1);
    pair.append(h2);
    return project_polyhedron(x0, pair);
}

HalfSpaceStack::HalfSpaceStack(Eigen::Index dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("HalfSpaceStack: dimension must be at least 1");
}

void HalfSpaceStack::append(HalfSpace h) {
    require_same_dim(h.dim(), dim_, "HalfSpaceStack::append");
    constraints_.push_back(std::move(h));
}

DykstraError::DykstraError(const std::string& what, Vector best_iterate, double sweep_change,
                           double worst_violation)
    : std::runtime_error(what),
      best_iterate_(std::move(best_iterate)),
      sweep_change_(sweep_change),
      worst_violation_(worst_violation) {}

namespace {

// Largest constraint violation scaled the same way HalfSpace::contains scales.
double worst_scaled_violation(const Eigen::VectorXd& x, const HalfSpaceStack& stack) {
    double worst = 0.0;
    const double nx = x.norm();
    for (const HalfSpace& h : stack.constraints()) {
        const double raw = h.normal().raw().dot(x) - h.offset();
        const double scale = std::max(1.0, std::sqrt(h.normal_squared()) * nx);
        worst = std::max(worst, raw / scale);
    }
    return worst;
}

}  // namespace

Vector project_halfspace_stack(const Vector& x0, const HalfSpaceStack& stack,
                               const DykstraOptions& opts, DykstraState* warm) {
    require_same_dim(x0.dim(), stack.dim(), "project_halfspace_stack");
    if (stack.empty()) {
        throw std::invalid_argument("project_halfspace_stack: stack must be nonempty");
    }
    if (!(opts.tol > 0.0)) {
        throw std::invalid_argument("project_halfspace_stack: tolerance must be positive");
    }
    if (opts.max_sweeps < 1) {
        throw std::invalid_argument("project_halfspace_stack: sweep budget must be positive");
    }

    DykstraState local;
    DykstraState& st = warm ? *warm : local;
    if (st.corrections.size() > stack.size()) {
        throw std::logic_error("project_halfspace_stack: warm state refers to a larger stack");
    }
    if (st.iterate.size() == 0) {
        st.iterate = x0.raw();
    } else if (st.iterate.size() != x0.dim()) {
        throw std::invalid_argument("project_halfspace_stack: warm state dimension mismatch");
    }
    st.corrections.resize(stack.size(), Eigen::VectorXd::Zero(x0.dim()));

    Eigen::VectorXd x = st.iterate;
    Eigen::VectorXd u(x0.dim());
    double change = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const Eigen::VectorXd before = x;
        for (std::size_t i = 0; i < stack.size(); ++i) {
            const HalfSpace& h = stack[i];
            if (h.is_trivial()) continue;
            u = x + st.corrections[i];
            const double viol = h.normal().raw().dot(u) - h.offset();
            if (viol > 0.0) {
                x = u - (viol / h.normal_squared()) * h.normal().raw();
            } else {
                x = u;
            }
            st.corrections[i] = u - x;
        }
        change = (x - before).norm();
        // Relative stop: deep stacks of nearly parallel cuts settle into a
        // machine-precision limit cycle whose residual movement scales with the
        // iterate, so a fixed absolute threshold would never trigger there.
        // The feasibility check keeps a short sweep budget honest.
        const double scale = std::max(1.0, x.norm());
        if (change < opts.tol * scale &&
            worst_scaled_violation(x, stack) <= 10.0 * opts.tol) {
            st.iterate = x;
            return Vector(x);
        }
    }
    throw DykstraError("project_halfspace_stack: sweep budget exhausted (" +
                           std::to_string(opts.max_sweeps) + " sweeps, last change " +
                           std::to_string(change) + ")",
                       Vector(x), change, worst_scaled_violation(x, stack));
}

/*
 * Dual active-set projection. Starting from the unconstrained optimum u = x0,
 * the most violated constraint is driven to equality while the duals of the
 * active constraints stay nonnegative; constraints whose dual would go
 * negative leave the active set first (partial steps). Each iterate keeps the
 * stationarity identity u = x0 - sum_k lambda_k a_k, so the exit point is
 * KKT-certified. The active normal matrix carries a thin QR factorization,
 * rebuilt by twice-iterated Gram-Schmidt after drops; everything runs in long
 * double because the shrinking-projection solver feeds this nearly parallel
 * cut bundles, where the active triangular factor is ill-conditioned in
 * proportion to 1/sin(angle).
 */
Vector project_polyhedron(const Vector& x0, const HalfSpaceStack& stack) {
    require_same_dim(x0.dim(), stack.dim(), "project_polyhedron");
    if (stack.empty()) {
        throw std::invalid_argument("project_polyhedron: stack must be nonempty");
    }

    using LongVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    using LongMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

    const Eigen::Index n = x0.dim();

    // Unit-normal long-double rows; trivial constraints carry no information.
    std::vector<LongVec> normals;
    std::vector<long double> offsets;
    normals.reserve(stack.size());
    offsets.reserve(stack.size());
    for (const HalfSpace& h : stack.constraints()) {
        if (h.is_trivial()) continue;
        LongVec a = h.normal().raw().cast<long double>();
        const long double na = a.norm();
        normals.push_back(a / na);
        offsets.push_back(static_cast<long double>(h.offset()) / na);
    }
    if (normals.empty()) return x0;
    const int m = static_cast<int>(normals.size());

    LongVec u = x0.raw().cast<long double>();
    std::vector<int> active;        // constraint indices, entry order
    LongVec lambda = LongVec::Zero(n);  // duals aligned with `active`
    LongMat q_basis(n, n);          // orthonormal basis of the active normals
    LongMat r_factor = LongMat::Zero(n, n);  // N_active = Q R, R upper-triangular
    int q = 0;
    std::vector<char> unenforceable(m, 0);  // rounding-scale contradictions

    // Refactor Q R after a drop. The survivors entered through an independence
    // test, so a subset of them stays safely independent.
    const auto refactor = [&]() {
        for (int j = 0; j < q; ++j) {
            LongVec v = normals[active[static_cast<std::size_t>(j)]];
            for (int i = 0; i < j; ++i) r_factor(i, j) = 0.0L;
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i < j; ++i) {
                    const long double c = q_basis.col(i).dot(v);
                    v -= c * q_basis.col(i);
                    r_factor(i, j) += c;
                }
            }
            const long double vn = v.norm();
            r_factor(j, j) = vn;
            q_basis.col(j) = v / vn;
        }
    };
    const auto drop_active = [&](int k) {
        active.erase(active.begin() + k);
        for (int j = k; j + 1 < q; ++j) lambda(j) = lambda(j + 1);
        --q;
        refactor();
    };

    const int pivot_cap = 50 * m + 1000;
    for (int pivot = 0; pivot < pivot_cap; ++pivot) {
        // Violations are in distance units thanks to the unit normals.
        const long double scale = std::max<long double>(1.0L, u.norm());
        const long double feas_tol = 1e-13L * scale;
        int p = -1;
        long double worst = feas_tol;
        for (int i = 0; i < m; ++i) {
            if (unenforceable[static_cast<std::size_t>(i)]) continue;
            const long double v = normals[static_cast<std::size_t>(i)].dot(u) -
                                  offsets[static_cast<std::size_t>(i)];
            if (v > worst) {
                worst = v;
                p = i;
            }
        }
        if (p < 0) return Vector(u.cast<double>());

        long double lam_p = 0.0L;
        for (;;) {
            const long double violation =
                normals[static_cast<std::size_t>(p)].dot(u) - offsets[static_cast<std::size_t>(p)];
            if (violation <= feas_tol) break;  // resolved by partial steps

            LongVec z = normals[static_cast<std::size_t>(p)];
            LongVec qa(q), r(q);
            if (q > 0) {
                qa = q_basis.leftCols(q).transpose() * z;
                z -= q_basis.leftCols(q) * qa;
                r = r_factor.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(qa);
            }
            const long double zn2 = z.squaredNorm();
            // With unit normals |z| is the sine of the angle between a_p and
            // the active span; below 1e-11 the direction is unresolvable.
            const bool dependent = zn2 <= 1e-22L;

            long double t1 = std::numeric_limits<long double>::infinity();
            int k1 = -1;
            for (int k = 0; k < q; ++k) {
                if (r(k) > 0.0L) {
                    const long double cand = lambda(k) / r(k);
                    if (cand < t1) {
                        t1 = cand;
                        k1 = k;
                    }
                }
            }

            if (dependent) {
                if (k1 < 0) {
                    // a_p is a nonnegative combination of the active normals,
                    // so the constraint contradicts them. At rounding scale
                    // that is an artifact of cut construction; accept the
                    // noise-level violation and stop enforcing the row.
                    if (violation <= 1e-11L * scale) {
                        unenforceable[static_cast<std::size_t>(p)] = 1;
                        break;
                    }
                    throw std::domain_error("project_polyhedron: empty intersection");
                }
                lambda.head(q) -= t1 * r;
                lam_p += t1;
                drop_active(k1);
                continue;
            }

            const long double t2 = violation / zn2;  // step driving a_p to equality
            const long double t = std::min(t1, t2);
            u -= t * z;
            if (q > 0) lambda.head(q) -= t * r;
            lam_p += t;
            if (t2 <= t1) {
                const long double zn = std::sqrt(zn2);
                r_factor.col(q).head(q) = qa;
                r_factor(q, q) = zn;
                q_basis.col(q) = z / zn;
                active.push_back(p);
                lambda(q) = lam_p;
                ++q;
                break;
            }
            drop_active(k1);
        }
    }
    throw std::runtime_error("project_polyhedron: active-set iteration cap exceeded");
}

}  // namespace fbsplit

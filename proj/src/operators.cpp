#include "fbsplit/operators.hpp"

#include <cmath>
#include <string>

namespace fbsplit {

namespace {

void require_dim(const Vector& x, Eigen::Index dim, const char* what) {
    if (x.dim() != dim) {
        throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                    std::to_string(dim) + ", got " + std::to_string(x.dim()));
    }
}

void require_positive_gamma(double gamma, const char* what) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument(std::string(what) + ": gamma must be positive");
    }
}

}  // namespace

ForwardMap::ForwardMap(Fn eval, std::optional<double> lipschitz_hint, DiffFn exact_difference)
    : eval_(std::move(eval)),
      lipschitz_hint_(lipschitz_hint),
      exact_difference_(std::move(exact_difference)) {
    if (!eval_) throw std::invalid_argument("ForwardMap: evaluation function required");
    if (lipschitz_hint_ && !(*lipschitz_hint_ > 0.0)) {
        throw std::invalid_argument("ForwardMap: Lipschitz hint must be positive");
    }
}

Vector ForwardMap::operator()(const Vector& x) const {
    Vector out = eval_(x);
    if (out.dim() != x.dim()) {
        throw std::domain_error("ForwardMap: evaluation changed dimension");
    }
    return out;
}

Vector ForwardMap::difference(const Vector& w, const Vector& y, const Vector& f_w,
                              const Vector& f_y) const {
    if (!exact_difference_) return Vector(f_w.raw() - f_y.raw());
    Vector out = exact_difference_(w, y);
    if (out.dim() != w.dim()) {
        throw std::domain_error("ForwardMap: difference map changed dimension");
    }
    return out;
}

ResolventFamily::ResolventFamily(Fn eval) : eval_(std::move(eval)) {
    if (!eval_) throw std::invalid_argument("ResolventFamily: evaluation function required");
}

Vector ResolventFamily::operator()(double gamma, const Vector& v) const {
    require_positive_gamma(gamma, "ResolventFamily");
    Vector out = eval_(gamma, v);
    if (out.dim() != v.dim()) {
        throw std::domain_error("ResolventFamily: evaluation changed dimension");
    }
    return out;
}

ProblemInstance::ProblemInstance(ForwardMap forward_map, ResolventFamily resolvent_family,
                                 Eigen::Index n, std::optional<Vector> solution,
                                 std::optional<std::function<double(const Vector&)>> objective_fn,
                                 std::optional<double> objective_optimum)
    : forward(std::move(forward_map)),
      resolvent(std::move(resolvent_family)),
      dim(n),
      known_solution(std::move(solution)),
      objective(std::move(objective_fn)),
      optimal_value(objective_optimum) {
    if (dim < 1) throw std::invalid_argument("ProblemInstance: dimension must be at least 1");
    if (known_solution && known_solution->dim() != dim) {
        throw std::invalid_argument("ProblemInstance: known solution has wrong dimension");
    }
    if (optimal_value && !std::isfinite(*optimal_value)) {
        throw std::invalid_argument("ProblemInstance: optimal value must be finite");
    }
    if (objective && optimal_value && known_solution) {
        const double at_solution = (*objective)(*known_solution);
        if (std::abs(at_solution - *optimal_value) > 1e-9) {
            throw std::invalid_argument(
                "ProblemInstance: objective at the known solution disagrees with optimal value");
        }
    }
}

Vector soft_threshold(const Vector& y, double gamma) {
    require_positive_gamma(gamma, "soft_threshold");
    Eigen::VectorXd out(y.dim());
    for (Eigen::Index i = 0; i < y.dim(); ++i) {
        const double v = y[i];
        const double mag = std::abs(v) - gamma;
        out(i) = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
    }
    return Vector(std::move(out));
}

Vector example1_forward_backward(const Vector& w, double gamma) {
    require_dim(w, 10, "example1_forward_backward");
    require_positive_gamma(gamma, "example1_forward_backward");
    const double scale = (1.0 - 2.0 * gamma) / (1.0 + 5.0 * gamma);
    const double shift = gamma / (1.0 + 5.0 * gamma);
    return Vector(scale * w.raw() - shift * Eigen::VectorXd::Ones(w.dim()));
}

Vector example2_gradient(const Vector& x) {
    require_dim(x, 2, "example2_gradient");
    return Vector{2.0 * x[0] + 3.0, 2.0 * x[1] + 5.0};
}

double example2_objective(const Vector& x) {
    require_dim(x, 2, "example2_objective");
    return x.raw().squaredNorm() + 3.0 * x[0] + 5.0 * x[1] + std::abs(x[0]) + std::abs(x[1]);
}

TsengStep tseng_map(const Vector& w, double gamma, const ProblemInstance& problem) {
    require_dim(w, problem.dim, "tseng_map");
    require_positive_gamma(gamma, "tseng_map");
    Vector f_w = problem.forward(w);
    Vector y = problem.resolvent(gamma, Vector(w.raw() - gamma * f_w.raw()));
    Vector f_y = problem.forward(y);
    Vector f_diff = problem.forward.difference(w, y, f_w, f_y);
    Vector z(y.raw() + gamma * f_diff.raw());
    return TsengStep{std::move(y), std::move(z), std::move(f_w), std::move(f_y),
                     std::move(f_diff)};
}

}  // namespace fbsplit

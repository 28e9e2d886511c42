#include "fbsplit/core.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace fbsplit {

namespace {

void validate_entries(const Eigen::VectorXd& v, const char* what) {
    if (v.size() < 1) {
        throw std::invalid_argument(std::string(what) + ": dimension must be at least 1");
    }
    if (!v.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": entries must be finite");
    }
}

void require_same_dim(const Vector& x, const Vector& y, const char* what) {
    if (x.dim() != y.dim()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(x.dim()) + " vs " + std::to_string(y.dim()) +
                                    ")");
    }
}

}  // namespace

Vector::Vector(Eigen::VectorXd entries) : entries_(std::move(entries)) {
    validate_entries(entries_, "Vector");
}

Vector::Vector(std::initializer_list<double> entries)
    : Vector(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
          entries.begin(), static_cast<Eigen::Index>(entries.size())))) {}

Vector Vector::zeros(Eigen::Index dim) { return Vector(Eigen::VectorXd::Zero(dim)); }

Vector Vector::ones(Eigen::Index dim) { return Vector(Eigen::VectorXd::Ones(dim)); }

Vector Vector::constant(Eigen::Index dim, double value) {
    return Vector(Eigen::VectorXd::Constant(dim, value));
}

bool operator==(const Vector& x, const Vector& y) {
    return x.dim() == y.dim() && (x.entries_.array() == y.entries_.array()).all();
}

double inner(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "inner");
    return x.raw().dot(y.raw());
}

double norm(const Vector& x) { return x.raw().norm(); }

Vector axpy(double alpha, const Vector& x, const Vector& y) {
    require_same_dim(x, y, "axpy");
    if (!std::isfinite(alpha)) throw std::invalid_argument("axpy: alpha must be finite");
    return Vector(alpha * x.raw() + y.raw());
}

Vector operator+(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "operator+");
    return Vector(x.raw() + y.raw());
}

Vector operator-(const Vector& x, const Vector& y) {
    require_same_dim(x, y, "operator-");
    return Vector(x.raw() - y.raw());
}

Vector operator*(double alpha, const Vector& x) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("operator*: alpha must be finite");
    return Vector(alpha * x.raw());
}

HalfSpace::HalfSpace(Vector normal, double offset)
    : normal_(std::move(normal)), offset_(offset), normal_squared_(normal_.raw().squaredNorm()) {
    if (!std::isfinite(offset_)) throw std::invalid_argument("HalfSpace: offset must be finite");
    if (normal_squared_ == 0.0 && offset_ < 0.0) {
        throw std::invalid_argument("HalfSpace: zero normal with negative offset is empty");
    }
}

double HalfSpace::violation(const Vector& u) const { return inner(normal_, u) - offset_; }

bool HalfSpace::contains(const Vector& u, double tol) const {
    const double scale = std::max(1.0, std::sqrt(normal_squared_) * norm(u));
    return violation(u) <= tol * scale;
}

AffineSet::AffineSet(Eigen::MatrixXd coeffs, Vector rhs)
    : coeffs_(std::move(coeffs)), rhs_(rhs.raw()) {
    const Eigen::Index m = coeffs_.rows();
    const Eigen::Index n = coeffs_.cols();
    if (m < 1) throw std::invalid_argument("AffineSet: need at least one equation");
    if (m >= n) {
        throw std::invalid_argument("AffineSet: need strictly fewer equations than unknowns");
    }
    if (rhs_.size() != m) throw std::invalid_argument("AffineSet: rhs dimension mismatch");
    if (!coeffs_.allFinite()) throw std::invalid_argument("AffineSet: entries must be finite");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(coeffs_);
    const auto& sigma = svd.singularValues();
    if (sigma(0) <= 0.0 || sigma(m - 1) <= 1e-10 * sigma(0)) {
        throw std::invalid_argument("AffineSet: coefficient matrix is not of full row rank");
    }
}

}  // namespace fbsplit

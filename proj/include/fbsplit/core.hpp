#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <stdexcept>

namespace fbsplit {

/**
 * Dense point in R^n with construction-time validation: every entry must be
 * finite and the dimension must be at least one. NaN/Inf therefore cannot
 * propagate silently through solver state; a bad operator evaluation fails
 * at the type boundary instead of iterations later.
 */
class Vector {
public:
    explicit Vector(Eigen::VectorXd entries);
    Vector(std::initializer_list<double> entries);

    static Vector zeros(Eigen::Index dim);
    static Vector ones(Eigen::Index dim);
    static Vector constant(Eigen::Index dim, double value);

    Eigen::Index dim() const { return entries_.size(); }
    double operator[](Eigen::Index i) const { return entries_(i); }

    /// Underlying storage, for arithmetic via Eigen expressions.
    const Eigen::VectorXd& raw() const { return entries_; }

    /// Exact elementwise equality (used for branch tests in the solvers).
    friend bool operator==(const Vector& x, const Vector& y);
    friend bool operator!=(const Vector& x, const Vector& y) { return !(x == y); }

private:
    Eigen::VectorXd entries_;
};

double inner(const Vector& x, const Vector& y);
double norm(const Vector& x);

/// alpha * x + y
Vector axpy(double alpha, const Vector& x, const Vector& y);

Vector operator+(const Vector& x, const Vector& y);
Vector operator-(const Vector& x, const Vector& y);
Vector operator*(double alpha, const Vector& x);

/**
 * Closed halfspace {u : <a,u> <= b}.
 *
 * A zero normal with b >= 0 denotes the whole space (a "trivial" constraint,
 * which the projection solvers produce once an iterate has converged). A zero
 * normal with b < 0 would denote the empty set and is rejected.
 */
class HalfSpace {
public:
    HalfSpace(Vector normal, double offset);

    const Vector& normal() const { return normal_; }
    double offset() const { return offset_; }
    Eigen::Index dim() const { return normal_.dim(); }

    double normal_squared() const { return normal_squared_; }
    bool is_trivial() const { return normal_squared_ == 0.0; }

    /// <a,u> - b; positive means u lies outside.
    double violation(const Vector& u) const;

    /// Membership within an absolute slack scaled by max(1, |a||u|).
    bool contains(const Vector& u, double tol = 1e-10) const;

private:
    Vector normal_;
    double offset_;
    double normal_squared_;
};

/**
 * Affine subspace {x : A x = b} with A of full row rank m < n. Rank is
 * validated at construction via SVD; singular values below 1e-10 times the
 * largest are treated as zero.
 */
class AffineSet {
public:
    AffineSet(Eigen::MatrixXd coeffs, Vector rhs);

    const Eigen::MatrixXd& coeffs() const { return coeffs_; }
    const Eigen::VectorXd& rhs() const { return rhs_; }
    Eigen::Index rows() const { return coeffs_.rows(); }
    Eigen::Index dim() const { return coeffs_.cols(); }

private:
    Eigen::MatrixXd coeffs_;
    Eigen::VectorXd rhs_;
};

}  // namespace fbsplit

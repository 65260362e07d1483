#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace caladin {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised on malformed input to the dense kernels (dimension mismatch,
/// non-finite entries, asymmetric matrices).
class LinalgError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
/// Only obtainable through cholesky().
class SpdFactor {
public:
    const Mat& lower() const { return lower_; }
    Eigen::Index dim() const { return lower_.rows(); }

    /// L * L^T
    Mat reconstruct() const { return lower_ * lower_.transpose(); }

private:
    friend std::optional<SpdFactor> cholesky(const Mat& m);
    explicit SpdFactor(Mat lower) : lower_(std::move(lower)) {}

    Mat lower_;
};

/// Relative asymmetry max|M - M^T| / max(1, max|M|).
double asymmetry(const Mat& m);

/// Symmetrizes m as (M + M^T)/2. Throws LinalgError if m is not square or its
/// relative asymmetry exceeds 1e-12.
Mat symmetrized(const Mat& m);

/// Cholesky factorization. Returns std::nullopt when a pivot is <= 0 (the
/// matrix is not positive definite); the caller decides how to regularize.
std::optional<SpdFactor> cholesky(const Mat& m);

/// Solves M x = b given the factor of M.
Vec spd_solve(const SpdFactor& factor, const Vec& b);

/// Solves M X = B column by column.
Mat spd_solve(const SpdFactor& factor, const Mat& b);

/// Certified lower bound on the smallest eigenvalue of a symmetric matrix.
///
/// Bisects on the shift t: if M - tI admits a Cholesky factorization then
/// lambda_min(M) > t. The returned value t is always such a certified shift
/// (or a Gershgorin bound when none was found), within 1e-9 of lambda_min.
double min_eig_lower_bound(const Mat& m);

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

}  // namespace caladin

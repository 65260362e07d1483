#include "caladin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace caladin {

namespace {

constexpr double kSymmetryTol = 1e-12;

void require_square(const Mat& m, const char* what)
{
    if (m.rows() != m.cols()) {
        throw LinalgError(std::string(what) + ": matrix is not square");
    }
}

// Plain column-oriented Cholesky; false if any pivot <= 0.
bool factor_in_place(const Mat& a, Mat& l)
{
    const Eigen::Index n = a.rows();
    l.setZero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double d = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(d > 0.0)) {
            return false;
        }
        l(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double sum = l.row(j).head(j).dot(l.row(i).head(j));
            l(i, j) = (a(i, j) - sum) / l(j, j);
        }
    }
    return true;
}

}  // namespace

bool all_finite(const Vec& v) { return v.allFinite(); }
bool all_finite(const Mat& m) { return m.allFinite(); }

double asymmetry(const Mat& m)
{
    require_square(m, "asymmetry");
    if (m.size() == 0) {
        return 0.0;
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Mat symmetrized(const Mat& m)
{
    require_square(m, "symmetrized");
    if (!m.allFinite()) {
        throw LinalgError("symmetrized: non-finite entry");
    }
    if (asymmetry(m) > kSymmetryTol) {
        throw LinalgError("symmetrized: matrix is not symmetric");
    }
    return 0.5 * (m + m.transpose());
}

std::optional<SpdFactor> cholesky(const Mat& m)
{
    const Mat a = symmetrized(m);
    Mat l;
    if (!factor_in_place(a, l)) {
        return std::nullopt;
    }
    return SpdFactor(std::move(l));
}

Vec spd_solve(const SpdFactor& factor, const Vec& b)
{
    if (b.size() != factor.dim()) {
        throw LinalgError("spd_solve: dimension mismatch");
    }
    const auto& l = factor.lower();
    const Eigen::Index n = b.size();

    // forward substitution
    Vec y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = (b(i) - l.row(i).head(i).dot(y.head(i))) / l(i, i);
    }
    // backward substitution
    Vec x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        x(i) = (y(i) - l.col(i).tail(n - i - 1).dot(x.tail(n - i - 1))) / l(i, i);
    }
    return x;
}

Mat spd_solve(const SpdFactor& factor, const Mat& b)
{
    if (b.rows() != factor.dim()) {
        throw LinalgError("spd_solve: dimension mismatch");
    }
    Mat x(b.rows(), b.cols());
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        x.col(c) = spd_solve(factor, Vec(b.col(c)));
    }
    return x;
}

double min_eig_lower_bound(const Mat& m)
{
    const Mat a = symmetrized(m);
    const Eigen::Index n = a.rows();
    if (n == 0) {
        return 0.0;
    }

    // Gershgorin enclosure of the spectrum.
    double lo = a(0, 0);
    double hi = a(0, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double radius = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
        lo = std::min(lo, a(i, i) - radius);
        hi = std::max(hi, a(i, i) + radius);
    }
    // lambda_min <= smallest diagonal entry
    hi = std::min(hi, a.diagonal().minCoeff());

    const Mat eye = Mat::Identity(n, n);
    Mat l;
    // Invariant: lo is a certified lower bound; M - hi*I is not known SPD.
    for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (factor_in_place(a - mid * eye, l)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace caladin

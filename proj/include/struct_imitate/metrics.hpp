#ifndef STRUCT_IMITATE_METRICS_HPP
#define STRUCT_IMITATE_METRICS_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace struct_imitate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct EvalReport {
    double c_m = 0.0;
    double c_cov = 0.0;
    std::vector<std::pair<double, double>> per_point_errors; // (mean error, covariance distance)
    double wall_time = 0.0;                                  // seconds
};

namespace detail {
    inline constexpr double kEigenFloor = 1e-12;

    /// Eigendecomposition of a symmetric matrix whose spectrum must lie above the floor.
    inline Eigen::SelfAdjointEigenSolver<Matrix> spd_eigen(const Matrix& m, const std::string& what)
    {
        if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite())
            throw NotPositiveDefinite(what + ": not a finite square matrix");
        Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < kEigenFloor) {
            std::ostringstream msg;
            msg << what << ": smallest eigenvalue " << eig.eigenvalues().minCoeff() << " is below " << kEigenFloor;
            throw NotPositiveDefinite(msg.str());
        }
        return eig;
    }
} // namespace detail

/// ‖logm(A^{-1/2} B A^{-1/2})‖_F, the affine-invariant distance of SPD matrices.
inline double spd_distance(const Matrix& reference, const Matrix& predicted)
{
    if (reference.rows() != predicted.rows() || reference.cols() != predicted.cols())
        throw DimensionMismatch("spd_distance: matrix sizes differ");
    auto ref = detail::spd_eigen(reference, "reference covariance");
    detail::spd_eigen(predicted, "predicted covariance");
    // logm(I) = 0 exactly; whitening would leave rounding noise of order 1e-16.
    if (reference == predicted)
        return 0.0;
    Matrix inv_sqrt = ref.eigenvectors() * ref.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * ref.eigenvectors().transpose();
    auto whitened = detail::spd_eigen(inv_sqrt * predicted * inv_sqrt, "whitened covariance");
    return whitened.eigenvalues().array().log().matrix().norm();
}

/// C_m = sqrt(Σ_n ‖ŝ_m(x_n) − μ_n‖²), cumulative over the sequence.
inline double mean_error(const std::vector<Vector>& predicted, const std::vector<Vector>& reference)
{
    if (predicted.size() != reference.size())
        throw DimensionMismatch("mean_error: " + std::to_string(predicted.size()) + " predictions vs " + std::to_string(reference.size()) + " references");
    double sum = 0.0;
    for (std::size_t n = 0; n < predicted.size(); ++n) {
        if (predicted[n].size() != reference[n].size())
            throw DimensionMismatch("mean_error: length mismatch at point " + std::to_string(n));
        sum += (predicted[n] - reference[n]).squaredNorm();
    }
    return std::sqrt(sum);
}

/// C_cov = sqrt(Σ_n ‖logm(Σ_n^{-1/2} Ŝ_n Σ_n^{-1/2})‖_F²).
inline double cov_error(const std::vector<Matrix>& predicted, const std::vector<Matrix>& reference)
{
    if (predicted.size() != reference.size())
        throw DimensionMismatch("cov_error: " + std::to_string(predicted.size()) + " predictions vs " + std::to_string(reference.size()) + " references");
    double sum = 0.0;
    for (std::size_t n = 0; n < predicted.size(); ++n) {
        double d = spd_distance(reference[n], predicted[n]);
        sum += d * d;
    }
    return std::sqrt(sum);
}

inline EvalReport evaluate(const std::vector<Vector>& pred_means, const std::vector<Matrix>& pred_covs, const std::vector<Vector>& ref_means,
    const std::vector<Matrix>& ref_covs)
{
    EvalReport report;
    report.c_m = mean_error(pred_means, ref_means);
    report.c_cov = cov_error(pred_covs, ref_covs);
    if (pred_means.size() != pred_covs.size())
        throw DimensionMismatch("evaluate: means and covariances differ in length");
    for (std::size_t n = 0; n < pred_means.size(); ++n)
        report.per_point_errors.emplace_back((pred_means[n] - ref_means[n]).norm(), spd_distance(ref_covs[n], pred_covs[n]));
    return report;
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_METRICS_HPP

#ifndef STRUCT_IMITATE_RIEMANNIAN_HPP
#define STRUCT_IMITATE_RIEMANNIAN_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "euclidean.hpp"
#include "kernel.hpp"
#include "manifold.hpp"
#include "trajectory.hpp"

namespace struct_imitate {

enum class RgdInit { FirstAnchor, MaxAlphaAnchor };

/// Riemannian gradient descent with a fixed step.
struct RgdConfig {
    double eta = 0.01;
    int max_iter = 1000;
    double tol = 1e-9; // on the Riemannian gradient norm
    RgdInit init = RgdInit::MaxAlphaAnchor;

    void validate() const
    {
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw InvalidArgument("rgd eta must be positive");
        if (!(tol > 0.0))
            throw InvalidArgument("rgd tol must be positive");
        if (max_iter < 0)
            throw InvalidArgument("rgd max_iter must be non-negative");
    }
};

struct FrechetResult {
    Vector mu;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    double grad_norm = 0.0;
};

/// Minimizes F(μ) = Σ α_n dist²(μ_n, μ) by μ ← R_μ(−η ∇F(μ)).
inline FrechetResult frechet_predict_mean(const ManifoldSpec& spec, const Vector& alpha, const std::vector<Vector>& anchors, const RgdConfig& cfg = {})
{
    cfg.validate();
    if (anchors.empty() || alpha.size() != static_cast<Eigen::Index>(anchors.size()))
        throw DimensionMismatch("frechet_predict_mean: " + std::to_string(alpha.size()) + " weights for " + std::to_string(anchors.size()) + " anchors");
    if (!(alpha.cwiseAbs().maxCoeff() > 1e-12))
        throw DegenerateWeights("frechet_predict_mean: all weights vanish");

    Eigen::Index start = 0;
    if (cfg.init == RgdInit::MaxAlphaAnchor)
        alpha.maxCoeff(&start); // first index on ties
    FrechetResult res;
    res.mu = anchors[static_cast<std::size_t>(start)];
    check_point(spec, res.mu, "frechet_predict_mean");

    for (int it = 0;; ++it) {
        Vector grad = riemannian_grad_weighted_dist2(spec, alpha, anchors, res.mu);
        res.grad_norm = grad.norm();
        res.iterations = it;
        if (res.grad_norm <= cfg.tol) {
            res.converged = true;
            break;
        }
        if (it >= cfg.max_iter)
            break;
        res.mu = retract(spec, res.mu, -cfg.eta * grad);
    }
    res.objective = weighted_dist2(spec, alpha, anchors, res.mu);
    return res;
}

/// Σ_∥ = Σ_j Γ(u_j) Γ(u_j)ᵀ with Σ_n = Σ_j u_j u_jᵀ from its eigenpairs.
/// `sigma_n` is in tangent_basis(spec, mu_n); the result is in
/// tangent_basis(spec, mu).
inline Matrix transported_covariance(const ManifoldSpec& spec, const Matrix& sigma_n, const Vector& mu_n, const Vector& mu)
{
    const auto d = spec.intrinsic_dim();
    if (sigma_n.rows() != d || sigma_n.cols() != d)
        throw DimensionMismatch("transported_covariance: covariance must be " + std::to_string(d) + "x" + std::to_string(d));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma_n + sigma_n.transpose()));
    if (eig.info() != Eigen::Success)
        throw NotPositiveDefinite("transported_covariance: eigendecomposition failed");
    const Matrix from_basis = tangent_basis(spec, mu_n);
    const Matrix to_basis = tangent_basis(spec, mu);
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        double lambda = std::max(eig.eigenvalues()[j], 0.0);
        Vector u = from_basis * (std::sqrt(lambda) * eig.eigenvectors().col(j));
        Vector moved = to_basis.transpose() * parallel_transport(spec, mu_n, mu, u);
        out += moved * moved.transpose();
    }
    return 0.5 * (out + out.transpose());
}

/// Manifold decode for given weights: Fréchet mean of the anchors under α,
/// then the α-weighted transported covariances (plus Log outer products for
/// the exact variant), in tangent_basis(spec, μ).
inline Prediction decode_manifold(const ManifoldSpec& spec, const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs,
    const RgdConfig& cfg = {}, CovVariant variant = CovVariant::Approx)
{
    detail::check_lengths(alpha, means.size(), "decode_manifold");
    if (means.size() != covs.size())
        throw DimensionMismatch("decode_manifold: means and covariances differ in length");
    const double s = detail::checked_weight_sum(alpha, "decode_manifold");

    FrechetResult mean = frechet_predict_mean(spec, alpha, means, cfg);
    const Matrix basis = tangent_basis(spec, mean.mu);
    const auto d = spec.intrinsic_dim();
    Matrix sigma = Matrix::Zero(d, d);
    for (std::size_t n = 0; n < means.size(); ++n) {
        const double a = alpha[static_cast<Eigen::Index>(n)];
        sigma += a * transported_covariance(spec, covs[n], means[n], mean.mu);
        if (variant == CovVariant::Exact) {
            Vector l = basis.transpose() * log_map(spec, mean.mu, means[n]);
            sigma += a * l * l.transpose();
        }
    }
    Prediction out;
    out.mu = mean.mu;
    out.negative_weights = (alpha.array() < 0.0).any();
    out.sigma = finalize_covariance(sigma / s, out.negative_weights);
    out.converged = mean.converged;
    out.iterations = mean.iterations;
    return out;
}

/// Manifold-valued prediction at x with the weights α(x) of a fitted model.
inline Prediction predict_manifold(const SurrogateModel& model, const ProbabilisticTrajectory& data, const Vector& x, const RgdConfig& cfg = {},
    CovVariant variant = CovVariant::Approx)
{
    if (!data.manifold)
        throw InvalidArgument("predict_manifold: trajectory has no manifold");
    if (static_cast<Eigen::Index>(data.size()) != model.size())
        throw DimensionMismatch("predict_manifold: model was fitted on " + std::to_string(model.size()) + " points, trajectory has " + std::to_string(data.size()));
    return decode_manifold(*data.manifold, model.alpha(x), data.means(), data.covariances(), cfg, variant);
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_RIEMANNIAN_HPP

#ifndef STRUCT_IMITATE_EUCLIDEAN_HPP
#define STRUCT_IMITATE_EUCLIDEAN_HPP

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "trajectory.hpp"

namespace struct_imitate {

enum class Divergence { KL, RKL };
enum class CovVariant { Exact, Approx };

struct ImitationMode {
    Divergence divergence = Divergence::KL;
    CovVariant kl_cov = CovVariant::Exact;
};

/// Output Gaussian at one query. For manifold predictions `mu` is ambient and
/// `sigma` is expressed in tangent_basis(spec, mu).
struct Prediction {
    Vector mu;
    Matrix sigma;
    bool negative_weights = false; // some α_n < 0; sigma was eigen-clamped at 0
    bool converged = true;         // manifold mean only
    int iterations = 0;            // manifold mean only

    enum Flag : unsigned { kNegativeWeights = 1u, kNotConverged = 2u };

    unsigned flags() const
    {
        return (negative_weights ? kNegativeWeights : 0u) | (converged ? 0u : kNotConverged);
    }
};

/// Minimizers of Σ α_n Δ_m and Σ α_n Δ_c for one imitation mode. KL and RKL
/// ship as closed forms; other f-divergences can be supplied by the caller.
struct DecodeRule {
    std::function<Vector(const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs)> mean;
    std::function<Matrix(const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs, const Vector& mu)> covariance;
};

namespace detail {

    inline constexpr double kDegenerateWeightSum = 1e-12;

    inline double checked_weight_sum(const Vector& alpha, const char* what)
    {
        double s = alpha.sum();
        if (!(std::abs(s) > kDegenerateWeightSum)) {
            std::ostringstream msg;
            msg << what << ": weights sum to " << s << ", prediction undefined";
            throw DegenerateWeights(msg.str());
        }
        return s;
    }

    inline void check_lengths(const Vector& alpha, std::size_t n, const char* what)
    {
        if (alpha.size() != static_cast<Eigen::Index>(n) || n == 0)
            throw DimensionMismatch(std::string(what) + ": " + std::to_string(alpha.size()) + " weights for " + std::to_string(n) + " samples");
    }

    inline Matrix spd_inverse(const Matrix& m, std::size_t index)
    {
        Eigen::LLT<Matrix> llt(m);
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("covariance " + std::to_string(index) + " is not positive definite");
        return llt.solve(Matrix::Identity(m.rows(), m.cols()));
    }

    /// Σ α_n Σ_n^{-1}, with the singular-value guard of the RKL forms.
    inline Matrix precision_sum(const Vector& alpha, const std::vector<Matrix>& covs, std::vector<Matrix>* inverses)
    {
        const auto d = covs.front().rows();
        Matrix P = Matrix::Zero(d, d);
        for (std::size_t n = 0; n < covs.size(); ++n) {
            Matrix inv = spd_inverse(covs[n], n);
            P += alpha[static_cast<Eigen::Index>(n)] * inv;
            if (inverses)
                inverses->push_back(std::move(inv));
        }
        Eigen::JacobiSVD<Matrix> svd(P);
        double smin = svd.singularValues().minCoeff();
        if (!(smin > 1e-12)) {
            std::ostringstream msg;
            msg << "weighted precision sum is singular (smallest singular value " << smin << ")";
            throw SingularSystem(msg.str(), smin > 0 ? svd.singularValues().maxCoeff() / smin : INFINITY);
        }
        return P;
    }

} // namespace detail

/// μ = Σ α_n μ_n / Σ α_n
inline Vector predict_mean_kl(const Vector& alpha, const std::vector<Vector>& means)
{
    detail::check_lengths(alpha, means.size(), "predict_mean_kl");
    double s = detail::checked_weight_sum(alpha, "predict_mean_kl");
    Vector mu = Vector::Zero(means.front().size());
    for (std::size_t n = 0; n < means.size(); ++n)
        mu += alpha[static_cast<Eigen::Index>(n)] * means[n];
    return mu / s;
}

/// Exact: Σ α_n((μ−μ_n)(μ−μ_n)ᵀ + Σ_n)/Σ α_n; approx drops the outer products.
inline Matrix predict_cov_kl(const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs, const Vector& mu,
    CovVariant variant = CovVariant::Exact)
{
    detail::check_lengths(alpha, covs.size(), "predict_cov_kl");
    if (variant == CovVariant::Exact && means.size() != covs.size())
        throw DimensionMismatch("predict_cov_kl: means and covariances differ in length");
    double s = detail::checked_weight_sum(alpha, "predict_cov_kl");
    Matrix sigma = Matrix::Zero(covs.front().rows(), covs.front().cols());
    for (std::size_t n = 0; n < covs.size(); ++n) {
        const double a = alpha[static_cast<Eigen::Index>(n)];
        sigma += a * covs[n];
        if (variant == CovVariant::Exact) {
            Vector e = mu - means[n];
            sigma += a * e * e.transpose();
        }
    }
    return sigma / s;
}

/// μ = (Σ α_n Σ_n^{-1})^{-1} Σ α_n Σ_n^{-1} μ_n
inline Vector predict_mean_rkl(const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs)
{
    detail::check_lengths(alpha, means.size(), "predict_mean_rkl");
    if (means.size() != covs.size())
        throw DimensionMismatch("predict_mean_rkl: means and covariances differ in length");
    std::vector<Matrix> inverses;
    Matrix P = detail::precision_sum(alpha, covs, &inverses);
    // Negative weights can make the normalized precision indefinite; the
    // stationary point is then a saddle and the mean is not a minimizer.
    Matrix Pn = P / alpha.sum();
    if (Eigen::LLT<Matrix>(0.5 * (Pn + Pn.transpose())).info() != Eigen::Success)
        warn("negative weights made the weighted precision sum indefinite; reverse-KL mean is a saddle point");
    Vector b = Vector::Zero(means.front().size());
    for (std::size_t n = 0; n < means.size(); ++n)
        b += alpha[static_cast<Eigen::Index>(n)] * (inverses[n] * means[n]);
    return P.partialPivLu().solve(b);
}

/// Σ = (Σ α_n Σ_n^{-1} / Σ α_n)^{-1}
inline Matrix predict_cov_rkl(const Vector& alpha, const std::vector<Matrix>& covs)
{
    detail::check_lengths(alpha, covs.size(), "predict_cov_rkl");
    double s = detail::checked_weight_sum(alpha, "predict_cov_rkl");
    Matrix P = detail::precision_sum(alpha, covs, nullptr);
    return s * P.partialPivLu().inverse();
}

inline DecodeRule kl_rule(CovVariant variant = CovVariant::Exact)
{
    return {
        [](const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>&) { return predict_mean_kl(alpha, means); },
        [variant](const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs, const Vector& mu) {
            return predict_cov_kl(alpha, means, covs, mu, variant);
        },
    };
}

inline DecodeRule rkl_rule()
{
    return {
        [](const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs) { return predict_mean_rkl(alpha, means, covs); },
        [](const Vector& alpha, const std::vector<Vector>&, const std::vector<Matrix>& covs, const Vector&) { return predict_cov_rkl(alpha, covs); },
    };
}

inline DecodeRule rule_for(const ImitationMode& mode)
{
    return mode.divergence == Divergence::KL ? kl_rule(mode.kl_cov) : rkl_rule();
}

/// Symmetrize; when any α_n < 0, clamp negative eigenvalues at 0.
inline Matrix finalize_covariance(const Matrix& sigma, bool negative_weights)
{
    Matrix sym = 0.5 * (sigma + sigma.transpose());
    if (!negative_weights)
        return sym;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    Vector values = eig.eigenvalues();
    if (values.minCoeff() >= 0.0)
        return sym;
    std::ostringstream msg;
    msg << "negative weights produced covariance eigenvalue " << values.minCoeff() << "; clamped at 0";
    warn(msg.str());
    values = values.cwiseMax(0.0);
    Matrix clamped = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (clamped + clamped.transpose());
}

/// Mean first, then covariance against that mean.
inline Prediction decode(const Vector& alpha, const std::vector<Vector>& means, const std::vector<Matrix>& covs, const DecodeRule& rule)
{
    Prediction out;
    out.negative_weights = (alpha.array() < 0.0).any();
    out.mu = rule.mean(alpha, means, covs);
    out.sigma = finalize_covariance(rule.covariance(alpha, means, covs, out.mu), out.negative_weights);
    return out;
}

inline Prediction predict(const SurrogateModel& model, const ProbabilisticTrajectory& data, const DecodeRule& rule, const Vector& x)
{
    if (data.manifold)
        throw InvalidArgument("predict: trajectory is manifold-valued; use predict_manifold");
    if (static_cast<Eigen::Index>(data.size()) != model.size())
        throw DimensionMismatch("predict: model was fitted on " + std::to_string(model.size()) + " points, trajectory has " + std::to_string(data.size()));
    return decode(model.alpha(x), data.means(), data.covariances(), rule);
}

inline Prediction predict(const SurrogateModel& model, const ProbabilisticTrajectory& data, const ImitationMode& mode, const Vector& x)
{
    return predict(model, data, rule_for(mode), x);
}

/// Prediction from H prioritized trajectories: the double sums over (n, h)
/// with weights α_n w_h reduce to the single-trajectory closed forms applied
/// to the concatenated samples.
inline Prediction superpose_predict(const SurrogateModel& model, const SuperpositionSet& sets, const ImitationMode& mode, const Vector& x)
{
    sets.validate();
    const auto& ref = sets.trajectories.front();
    if (static_cast<Eigen::Index>(ref.size()) != model.size())
        throw DimensionMismatch("superpose_predict: model was fitted on " + std::to_string(model.size()) + " points, trajectories have " + std::to_string(ref.size()));
    for (std::size_t n = 0; n < ref.size(); ++n)
        if ((ref.points[n].x - model.inputs()[n]).cwiseAbs().maxCoeff() > 1e-9)
            throw InvalidArgument("superpose_predict: trajectory input grid differs from the model at point " + std::to_string(n));
    for (const auto& t : sets.trajectories)
        if (t.manifold)
            throw InvalidArgument("superpose_predict: manifold-valued trajectories are not supported");

    const Vector alpha = model.alpha(x);
    const auto N = alpha.size();
    const auto H = static_cast<Eigen::Index>(sets.trajectories.size());
    Vector joint(N * H);
    std::vector<Vector> means;
    std::vector<Matrix> covs;
    means.reserve(static_cast<std::size_t>(N * H));
    covs.reserve(static_cast<std::size_t>(N * H));
    for (Eigen::Index h = 0; h < H; ++h) {
        const auto& traj = sets.trajectories[static_cast<std::size_t>(h)];
        const double w = sets.priorities[static_cast<std::size_t>(h)];
        for (Eigen::Index n = 0; n < N; ++n) {
            joint[h * N + n] = alpha[n] * w;
            means.push_back(traj.points[static_cast<std::size_t>(n)].mu);
            covs.push_back(traj.points[static_cast<std::size_t>(n)].sigma);
        }
    }
    Prediction out = decode(joint, means, covs, rule_for(mode));
    out.negative_weights = (alpha.array() < 0.0).any();
    return out;
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_EUCLIDEAN_HPP

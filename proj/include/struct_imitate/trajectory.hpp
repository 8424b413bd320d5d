#ifndef STRUCT_IMITATE_TRAJECTORY_HPP
#define STRUCT_IMITATE_TRAJECTORY_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "manifold.hpp"

namespace struct_imitate {

/// One sample of a probabilistic trajectory. For manifold-valued outputs `mu`
/// is a point in ambient coordinates and `sigma` lives in the tangent space at
/// `mu`, expressed in tangent_basis(spec, mu).
struct GaussianPoint {
    Vector x;
    Vector mu;
    Matrix sigma;
};

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-12)
{
    return m.rows() == m.cols() && (m - m.transpose()).norm() <= rel_tol * m.norm();
}

inline bool is_spd(const Matrix& m)
{
    if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite())
        return false;
    Eigen::LLT<Matrix> llt(m);
    return llt.info() == Eigen::Success;
}

struct ProbabilisticTrajectory {
    std::vector<GaussianPoint> points;
    std::optional<ManifoldSpec> manifold;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    Eigen::Index input_dim() const { return points.empty() ? 0 : points.front().x.size(); }
    Eigen::Index output_dim() const { return points.empty() ? 0 : points.front().mu.size(); }
    /// Side length of each covariance: O, or the manifold's intrinsic dimension.
    Eigen::Index cov_dim() const { return manifold ? manifold->intrinsic_dim() : output_dim(); }

    std::vector<Vector> inputs() const
    {
        std::vector<Vector> out;
        out.reserve(points.size());
        for (const auto& p : points)
            out.push_back(p.x);
        return out;
    }

    std::vector<Vector> means() const
    {
        std::vector<Vector> out;
        out.reserve(points.size());
        for (const auto& p : points)
            out.push_back(p.mu);
        return out;
    }

    std::vector<Matrix> covariances() const
    {
        std::vector<Matrix> out;
        out.reserve(points.size());
        for (const auto& p : points)
            out.push_back(p.sigma);
        return out;
    }

    /// Shape, symmetry, positive definiteness and manifold membership.
    void validate() const
    {
        if (points.empty())
            throw InvalidArgument("trajectory has no points");
        const auto I = input_dim(), O = output_dim(), D = cov_dim();
        if (manifold && O != manifold->ambient_dim())
            throw DimensionMismatch("trajectory means have length " + std::to_string(O) + " but " + manifold->name() + " has ambient dimension " + std::to_string(manifold->ambient_dim()));
        for (std::size_t n = 0; n < points.size(); ++n) {
            const auto& p = points[n];
            const std::string at = "point " + std::to_string(n);
            if (p.x.size() != I || p.mu.size() != O)
                throw DimensionMismatch(at + ": inconsistent input/output length");
            if (p.sigma.rows() != D || p.sigma.cols() != D)
                throw DimensionMismatch(at + ": covariance must be " + std::to_string(D) + "x" + std::to_string(D));
            if (!p.x.allFinite() || !p.mu.allFinite() || !p.sigma.allFinite())
                throw InvalidArgument(at + ": non-finite value");
            if (!is_symmetric(p.sigma))
                throw NotPositiveDefinite(at + ": covariance is not symmetric");
            if (!is_spd(p.sigma))
                throw NotPositiveDefinite(at + ": covariance is not positive definite");
            if (manifold && !contains(*manifold, p.mu))
                throw OffManifold(at + ": mean is not on " + manifold->name());
        }
    }
};

/// Desired points appended to a trajectory; each one counts w_j > 1 times.
struct ViaPointSet {
    std::vector<GaussianPoint> points;
    std::vector<double> weights;

    void validate() const
    {
        if (points.size() != weights.size())
            throw DimensionMismatch("via-point set has " + std::to_string(points.size()) + " points but " + std::to_string(weights.size()) + " weights");
        for (std::size_t j = 0; j < weights.size(); ++j)
            if (!(weights[j] > 1.0) || !std::isfinite(weights[j]))
                throw InvalidArgument("via-point weight " + std::to_string(j) + " must be finite and > 1");
    }
};

/// H trajectories over a common input grid with normalized priorities.
struct SuperpositionSet {
    std::vector<ProbabilisticTrajectory> trajectories;
    std::vector<double> priorities;

    void validate() const
    {
        if (trajectories.empty())
            throw InvalidArgument("superposition set is empty");
        if (trajectories.size() != priorities.size())
            throw DimensionMismatch("superposition set has " + std::to_string(trajectories.size()) + " trajectories but " + std::to_string(priorities.size()) + " priorities");
        double total = 0.0;
        for (double w : priorities) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw InvalidArgument("superposition priorities must be non-negative");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw InvalidArgument("superposition priorities must sum to 1");
        const auto& ref = trajectories.front();
        ref.validate();
        for (std::size_t h = 1; h < trajectories.size(); ++h) {
            const auto& t = trajectories[h];
            t.validate();
            if (t.size() != ref.size() || t.output_dim() != ref.output_dim() || t.input_dim() != ref.input_dim())
                throw DimensionMismatch("superposition trajectory " + std::to_string(h) + " does not match trajectory 0 in shape");
            for (std::size_t n = 0; n < t.size(); ++n)
                if ((t.points[n].x - ref.points[n].x).cwiseAbs().maxCoeff() > 1e-9)
                    throw InvalidArgument("superposition trajectory " + std::to_string(h) + " has a different input grid at point " + std::to_string(n));
        }
    }
};

/// One raw demonstration: aligned input and output samples.
struct Demonstration {
    std::vector<Vector> inputs;
    std::vector<Vector> outputs;
};

namespace detail {

    inline void check_demonstrations(const std::vector<Demonstration>& demos)
    {
        if (demos.size() < 2)
            throw InvalidArgument("ingest: at least two demonstrations are needed to estimate a covariance");
        const auto& ref = demos.front();
        if (ref.inputs.empty())
            throw InvalidArgument("ingest: demonstration 0 is empty");
        if (ref.inputs.size() != ref.outputs.size())
            throw DimensionMismatch("ingest: demonstration 0 has mismatched input/output counts");
        const auto I = ref.inputs.front().size(), O = ref.outputs.front().size();
        for (std::size_t m = 0; m < demos.size(); ++m) {
            const auto& d = demos[m];
            const std::string at = "ingest: demonstration " + std::to_string(m);
            if (d.inputs.size() != ref.inputs.size() || d.outputs.size() != ref.inputs.size())
                throw DimensionMismatch(at + " length differs from demonstration 0");
            for (std::size_t n = 0; n < d.inputs.size(); ++n) {
                if (d.inputs[n].size() != I || d.outputs[n].size() != O)
                    throw DimensionMismatch(at + ", sample " + std::to_string(n) + ": inconsistent dimension");
                if (!d.inputs[n].allFinite() || !d.outputs[n].allFinite())
                    throw InvalidArgument(at + ", sample " + std::to_string(n) + ": non-finite value");
                if ((d.inputs[n] - ref.inputs[n]).cwiseAbs().maxCoeff() > 1e-9)
                    throw InvalidArgument(at + ", sample " + std::to_string(n) + ": input grid differs from demonstration 0");
            }
        }
    }

    /// 1e-8 · (RMS output entry)², falling back to 1e-8 for all-zero outputs.
    inline double default_epsilon(const std::vector<Demonstration>& demos)
    {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& d : demos)
            for (const auto& y : d.outputs) {
                sum += y.squaredNorm();
                count += static_cast<std::size_t>(y.size());
            }
        double scale2 = count ? sum / static_cast<double>(count) : 0.0;
        return 1e-8 * (scale2 > 0.0 ? scale2 : 1.0);
    }

} // namespace detail

/// Per-index empirical mean and unbiased covariance (+ εI) over M ≥ 2 demos.
inline ProbabilisticTrajectory ingest_demonstrations(const std::vector<Demonstration>& demos, std::optional<double> epsilon = std::nullopt)
{
    detail::check_demonstrations(demos);
    const double eps = epsilon.value_or(detail::default_epsilon(demos));
    if (!(eps >= 0.0))
        throw InvalidArgument("ingest: epsilon must be non-negative");

    const auto M = static_cast<double>(demos.size());
    const std::size_t N = demos.front().inputs.size();
    const auto O = demos.front().outputs.front().size();
    ProbabilisticTrajectory out;
    out.points.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        Vector mean = Vector::Zero(O);
        for (const auto& d : demos)
            mean += d.outputs[n];
        mean /= M;
        Matrix cov = Matrix::Zero(O, O);
        for (const auto& d : demos) {
            Vector e = d.outputs[n] - mean;
            cov += e * e.transpose();
        }
        cov /= (M - 1.0);
        cov.diagonal().array() += eps;
        out.points.push_back({demos.front().inputs[n], mean, cov});
    }
    return out;
}

/// Manifold ingestion: per-index Fréchet mean by the fixed-point iteration
/// μ ← R_μ(mean_m Log_μ(y^m)), then the unbiased covariance of the Log_μ(y^m)
/// expressed in tangent_basis(spec, μ), plus εI.
inline ProbabilisticTrajectory ingest_manifold_demonstrations(const std::vector<Demonstration>& demos, const ManifoldSpec& spec,
    std::optional<double> epsilon = std::nullopt, int max_iter = 100)
{
    detail::check_demonstrations(demos);
    const double eps = epsilon.value_or(detail::default_epsilon(demos));
    if (!(eps >= 0.0))
        throw InvalidArgument("ingest: epsilon must be non-negative");

    const auto M = static_cast<double>(demos.size());
    const std::size_t N = demos.front().inputs.size();
    const auto d = spec.intrinsic_dim();
    ProbabilisticTrajectory out;
    out.manifold = spec;
    out.points.reserve(N);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t m = 0; m < demos.size(); ++m)
            if (!contains(spec, demos[m].outputs[n]))
                throw OffManifold("ingest: demonstration " + std::to_string(m) + ", sample " + std::to_string(n) + " is not on " + spec.name());
        Vector mu = demos.front().outputs[n];
        for (int it = 0; it < max_iter; ++it) {
            Vector step = Vector::Zero(mu.size());
            for (const auto& demo : demos)
                step += log_map(spec, mu, demo.outputs[n]);
            step /= M;
            mu = retract(spec, mu, step);
            if (step.norm() < 1e-9)
                break;
        }
        Matrix basis = tangent_basis(spec, mu);
        Matrix cov = Matrix::Zero(d, d);
        for (const auto& demo : demos) {
            Vector e = basis.transpose() * log_map(spec, mu, demo.outputs[n]);
            cov += e * e.transpose();
        }
        cov /= (M - 1.0);
        cov.diagonal().array() += eps;
        out.points.push_back({demos.front().inputs[n], mu, cov});
    }
    return out;
}

/// Base data concatenated with via-points, and the matching row weights
/// (1 for base points, w_j for via-points).
struct MergedTrajectory {
    ProbabilisticTrajectory data;
    Vector row_weights;

    /// N' = N + Σ_j w_j.
    double effective_count() const { return row_weights.sum(); }
};

inline MergedTrajectory merge_via_points(const ProbabilisticTrajectory& base, const ViaPointSet& via)
{
    via.validate();
    MergedTrajectory out{base, Vector::Ones(static_cast<Eigen::Index>(base.size() + via.points.size()))};
    const auto D = base.cov_dim();
    for (std::size_t j = 0; j < via.points.size(); ++j) {
        const auto& p = via.points[j];
        const std::string at = "via-point " + std::to_string(j);
        if (p.x.size() != base.input_dim() || p.mu.size() != base.output_dim())
            throw DimensionMismatch(at + ": dimensions differ from the base trajectory");
        if (p.sigma.rows() != D || p.sigma.cols() != D)
            throw DimensionMismatch(at + ": covariance must be " + std::to_string(D) + "x" + std::to_string(D));
        if (base.manifold && !contains(*base.manifold, p.mu))
            throw OffManifold(at + ": mean is not on " + base.manifold->name());
        out.data.points.push_back(p);
        out.row_weights[static_cast<Eigen::Index>(base.size() + j)] = via.weights[j];
    }
    return out;
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_TRAJECTORY_HPP

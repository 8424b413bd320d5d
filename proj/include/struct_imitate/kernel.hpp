#ifndef STRUCT_IMITATE_KERNEL_HPP
#define STRUCT_IMITATE_KERNEL_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace struct_imitate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class KernelKind { Gaussian };

inline std::string to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::Gaussian:
        return "gaussian";
    }
    return "unknown";
}

struct KernelConfig {
    KernelKind kind = KernelKind::Gaussian;
    double kappa = 6.0;   // bandwidth on squared input distance
    double lambda = 1e-5; // ridge regularization

    void validate() const
    {
        if (!(kappa > 0.0) || !std::isfinite(kappa))
            throw InvalidArgument("kernel kappa must be positive and finite");
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw InvalidArgument("kernel lambda must be positive and finite");
    }
};

/// Scalar kernel k(x, x'). New families plug in through make_kernel().
using KernelFunction = std::function<double(const Vector&, const Vector&)>;

inline KernelFunction make_kernel(const KernelConfig& config)
{
    config.validate();
    switch (config.kind) {
    case KernelKind::Gaussian: {
        double kappa = config.kappa;
        return [kappa](const Vector& a, const Vector& b) { return std::exp(-kappa * (a - b).squaredNorm()); };
    }
    }
    throw InvalidArgument("unsupported kernel kind");
}

inline double kernel_eval(const Vector& x, const Vector& x2, const KernelConfig& config)
{
    if (x.size() != x2.size())
        throw DimensionMismatch("kernel_eval: input lengths " + std::to_string(x.size()) + " and " + std::to_string(x2.size()) + " differ");
    return make_kernel(config)(x, x2);
}

inline Matrix gram_matrix(const std::vector<Vector>& inputs, const KernelConfig& config)
{
    if (inputs.empty())
        throw InvalidArgument("gram_matrix: empty input list");
    const Eigen::Index dim = inputs.front().size();
    for (const auto& x : inputs)
        if (x.size() != dim)
            throw DimensionMismatch("gram_matrix: inputs have inconsistent lengths");

    auto k = make_kernel(config);
    const auto n = static_cast<Eigen::Index>(inputs.size());
    Matrix K(n, n);
    // Each row owns its upper-triangle entries, so the fill is race-free and
    // exactly symmetric regardless of thread count.
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        auto i = static_cast<Eigen::Index>(row);
        K(i, i) = k(inputs[row], inputs[row]);
        for (Eigen::Index j = i + 1; j < n; ++j)
            K(i, j) = k(inputs[row], inputs[static_cast<std::size_t>(j)]);
    });
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            K(j, i) = K(i, j);
    return K;
}

/// LU factorization of a regularized kernel system A = K' + N'λI.
///
/// If the reciprocal condition estimate indicates cond(A) > 1e12, a warning is
/// emitted and 1e-10 is added to the diagonal before refactoring. Solves apply
/// one step of iterative refinement against the stored matrix.
class FactoredSystem {
public:
    static constexpr double kConditionLimit = 1e12;
    static constexpr double kJitter = 1e-10;

    FactoredSystem() = default;

    explicit FactoredSystem(Matrix system) : _system(std::move(system))
    {
        if (!_system.allFinite())
            throw SingularSystem("kernel system contains non-finite entries", std::numeric_limits<double>::infinity());
        _lu.compute(_system);
        _condition = condition_from(_lu.rcond());
        if (_condition > kConditionLimit) {
            std::ostringstream msg;
            msg << "kernel system condition estimate " << _condition << " exceeds " << kConditionLimit << "; adding " << kJitter << " diagonal jitter";
            warn(msg.str());
            _system.diagonal().array() += kJitter;
            _lu.compute(_system);
            _condition = condition_from(_lu.rcond());
            _jittered = true;
        }
        if (!std::isfinite(_condition) || _condition > 1.0 / std::numeric_limits<double>::epsilon()) {
            std::ostringstream msg;
            msg << "kernel system is numerically singular (condition estimate " << _condition << ")";
            throw SingularSystem(msg.str(), _condition);
        }
    }

    Vector solve(const Vector& rhs) const
    {
        Vector x = _lu.solve(rhs);
        x += _lu.solve(rhs - _system * x);
        return x;
    }

    Matrix solve(const Matrix& rhs) const
    {
        Matrix x = _lu.solve(rhs);
        x += _lu.solve(rhs - _system * x);
        return x;
    }

    const Matrix& matrix() const { return _system; }
    double condition_estimate() const { return _condition; }
    bool jittered() const { return _jittered; }

private:
    static double condition_from(double rcond)
    {
        return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    }

    Matrix _system;
    Eigen::PartialPivLU<Matrix> _lu;
    double _condition = 1.0;
    bool _jittered = false;
};

/// Fitted kernel ridge state producing the input-dependent weights α(x).
/// Immutable after construction; alpha() is safe to call concurrently.
class SurrogateModel {
public:
    SurrogateModel(std::vector<Vector> inputs, Vector row_weights, KernelConfig config)
        : _inputs(std::move(inputs)), _row_weights(std::move(row_weights)), _config(config)
    {
        _config.validate();
        if (_inputs.empty())
            throw InvalidArgument("fit: no training inputs");
        if (static_cast<Eigen::Index>(_inputs.size()) != _row_weights.size())
            throw DimensionMismatch("fit: " + std::to_string(_inputs.size()) + " inputs but " + std::to_string(_row_weights.size()) + " row weights");
        for (Eigen::Index i = 0; i < _row_weights.size(); ++i)
            if (!(_row_weights[i] > 0.0) || !std::isfinite(_row_weights[i]))
                throw InvalidArgument("fit: row weight " + std::to_string(i) + " is not positive");

        _kernel = make_kernel(_config);
        _effective_count = _row_weights.sum();
        Matrix system = _row_weights.asDiagonal() * gram_matrix(_inputs, _config);
        system.diagonal().array() += _effective_count * _config.lambda;
        _solver = FactoredSystem(std::move(system));
    }

    /// k'_x: kernel column against the training inputs, via rows scaled.
    Vector weighted_kernel_vector(const Vector& x) const
    {
        if (x.size() != input_dim())
            throw DimensionMismatch("alpha_weights: query has length " + std::to_string(x.size()) + ", model expects " + std::to_string(input_dim()));
        Vector k(size());
        for (Eigen::Index n = 0; n < k.size(); ++n)
            k[n] = _row_weights[n] * _kernel(x, _inputs[static_cast<std::size_t>(n)]);
        return k;
    }

    Vector alpha(const Vector& x) const { return _solver.solve(weighted_kernel_vector(x)); }

    Eigen::Index size() const { return static_cast<Eigen::Index>(_inputs.size()); }
    Eigen::Index input_dim() const { return _inputs.front().size(); }
    const std::vector<Vector>& inputs() const { return _inputs; }
    const Vector& row_weights() const { return _row_weights; }
    const KernelConfig& config() const { return _config; }
    /// N' = N + Σ_j w_j, the count multiplying λ.
    double effective_count() const { return _effective_count; }
    /// K' + N'λI (including jitter, if it was applied).
    const Matrix& system_matrix() const { return _solver.matrix(); }
    double condition_estimate() const { return _solver.condition_estimate(); }
    bool jittered() const { return _solver.jittered(); }

private:
    std::vector<Vector> _inputs;
    Vector _row_weights;
    KernelConfig _config;
    KernelFunction _kernel;
    double _effective_count = 0.0;
    FactoredSystem _solver;
};

inline SurrogateModel fit(std::vector<Vector> inputs, Vector row_weights, const KernelConfig& config)
{
    return SurrogateModel(std::move(inputs), std::move(row_weights), config);
}

inline SurrogateModel fit(std::vector<Vector> inputs, const KernelConfig& config)
{
    Vector ones = Vector::Ones(static_cast<Eigen::Index>(inputs.size()));
    return SurrogateModel(std::move(inputs), std::move(ones), config);
}

inline Vector alpha_weights(const SurrogateModel& model, const Vector& x) { return model.alpha(x); }

} // namespace struct_imitate

#endif // STRUCT_IMITATE_KERNEL_HPP

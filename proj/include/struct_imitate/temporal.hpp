#ifndef STRUCT_IMITATE_TEMPORAL_HPP
#define STRUCT_IMITATE_TEMPORAL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "kernel.hpp"

namespace struct_imitate {

// Position and velocity learning with a shared weight matrix. Velocity
// features are central differences of the position features with half-step
// δ, so every kernel entry involving a velocity row is a finite difference of
// the scalar time kernel, and the predicted velocity is exactly the central
// difference of the predicted position.

enum class RowKind { Position, Velocity };

/// One row of the stacked output matrix Y.
struct TemporalRow {
    double t = 0.0;
    RowKind kind = RowKind::Position;
    Vector value;
    double weight = 1.0;
};

struct TemporalSample {
    double t = 0.0;
    Vector position;
    Vector velocity;
};

/// Desired adaptive behavior at time t; either component may be absent.
struct DesiredState {
    double t = 0.0;
    std::optional<Vector> position;
    std::optional<Vector> velocity;
    double weight = 1.0;
};

inline double phase_map(double t, double tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw InvalidArgument("phase_map: tau must be positive");
    return t / tau;
}

namespace detail {

    inline double time_kernel(double a, double b, double kappa) { return std::exp(-kappa * (a - b) * (a - b)); }

    /// Kernelized feature inner product between a row of kind `ki` at ti and
    /// a row of kind `kj` at tj.
    inline double temporal_entry(RowKind ki, double ti, RowKind kj, double tj, double kappa, double delta)
    {
        auto k = [kappa](double a, double b) { return time_kernel(a, b, kappa); };
        if (ki == RowKind::Position && kj == RowKind::Position)
            return k(ti, tj);
        if (ki == RowKind::Position)
            return (k(ti, tj + delta) - k(ti, tj - delta)) / (2.0 * delta);
        if (kj == RowKind::Position)
            return (k(ti + delta, tj) - k(ti - delta, tj)) / (2.0 * delta);
        return (k(ti + delta, tj + delta) - k(ti + delta, tj - delta) - k(ti - delta, tj + delta) + k(ti - delta, tj - delta)) / (4.0 * delta * delta);
    }

    inline void check_gaussian(const KernelConfig& config)
    {
        config.validate();
        if (config.kind != KernelKind::Gaussian)
            throw InvalidArgument("temporal model requires the Gaussian kernel");
    }

    inline double min_spacing(std::vector<double> times)
    {
        std::sort(times.begin(), times.end());
        double best = INFINITY;
        for (std::size_t i = 1; i < times.size(); ++i)
            if (times[i] > times[i - 1])
                best = std::min(best, times[i] - times[i - 1]);
        return best;
    }

} // namespace detail

/// 2N×2N kernel matrix over interleaved rows [p₁, v₁, …, p_N, v_N].
inline Matrix build_temporal_gram(const std::vector<double>& times, const KernelConfig& config, double delta)
{
    detail::check_gaussian(config);
    if (!(delta > 0.0))
        throw InvalidArgument("build_temporal_gram: delta must be positive");
    const auto n = static_cast<Eigen::Index>(times.size());
    Matrix K(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        RowKind ki = i % 2 == 0 ? RowKind::Position : RowKind::Velocity;
        for (Eigen::Index j = 0; j < 2 * n; ++j) {
            RowKind kj = j % 2 == 0 ? RowKind::Position : RowKind::Velocity;
            K(i, j) = detail::temporal_entry(ki, times[static_cast<std::size_t>(i / 2)], kj, times[static_cast<std::size_t>(j / 2)], config.kappa, delta);
        }
    }
    return K;
}

inline double default_delta(const std::vector<double>& times)
{
    if (times.empty())
        return 1e-4;
    auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    double span = *hi - *lo;
    return 1e-4 * (span > 0.0 ? span : 1.0);
}

class TemporalModel {
public:
    TemporalModel(std::vector<TemporalRow> rows, KernelConfig config, double delta, double effective_count)
        : _rows(std::move(rows)), _config(config), _delta(delta), _effective_count(effective_count)
    {
        detail::check_gaussian(_config);
        if (_rows.empty())
            throw InvalidArgument("temporal model has no rows");
        if (!(_delta > 0.0) || !std::isfinite(_delta))
            throw InvalidArgument("temporal model: delta must be positive");
        const auto O = _rows.front().value.size();
        const auto R = static_cast<Eigen::Index>(_rows.size());
        _outputs.resize(R, O);
        _weights.resize(R);
        for (Eigen::Index i = 0; i < R; ++i) {
            const auto& row = _rows[static_cast<std::size_t>(i)];
            if (row.value.size() != O)
                throw DimensionMismatch("temporal row " + std::to_string(i) + " has output length " + std::to_string(row.value.size()) + ", expected " + std::to_string(O));
            if (!(row.weight > 0.0) || !std::isfinite(row.t) || !row.value.allFinite())
                throw InvalidArgument("temporal row " + std::to_string(i) + " has a non-positive weight or non-finite value");
            _outputs.row(i) = row.value.transpose();
            _weights[i] = row.weight;
        }

        Matrix system(R, R);
        for (Eigen::Index i = 0; i < R; ++i)
            for (Eigen::Index j = 0; j < R; ++j) {
                const auto& a = _rows[static_cast<std::size_t>(i)];
                const auto& b = _rows[static_cast<std::size_t>(j)];
                system(i, j) = a.weight * detail::temporal_entry(a.kind, a.t, b.kind, b.t, _config.kappa, _delta);
            }
        system.diagonal().array() += _effective_count * _config.lambda;
        _solver = FactoredSystem(std::move(system));
    }

    /// (kᵖ, kᵛ) at t, with adapted rows scaled by their weights.
    std::pair<Vector, Vector> kp_kv(double t) const
    {
        const auto R = static_cast<Eigen::Index>(_rows.size());
        Vector kp(R), kv(R);
        for (Eigen::Index i = 0; i < R; ++i) {
            const auto& row = _rows[static_cast<std::size_t>(i)];
            kp[i] = row.weight * detail::temporal_entry(row.kind, row.t, RowKind::Position, t, _config.kappa, _delta);
            kv[i] = row.weight * detail::temporal_entry(row.kind, row.t, RowKind::Velocity, t, _config.kappa, _delta);
        }
        return {kp, kv};
    }

    /// (αᵖ, αᵛ) = (K' + N'λI)^{-1} (kᵖ, kᵛ).
    std::pair<Vector, Vector> alpha(double t) const
    {
        auto [kp, kv] = kp_kv(t);
        Matrix rhs(kp.size(), 2);
        rhs.col(0) = kp;
        rhs.col(1) = kv;
        Matrix a = _solver.solve(rhs);
        return {a.col(0), a.col(1)};
    }

    /// (position, velocity) = (Yᵀαᵖ, Yᵀαᵛ).
    std::pair<Vector, Vector> predict(double t) const
    {
        auto [ap, av] = alpha(t);
        return {_outputs.transpose() * ap, _outputs.transpose() * av};
    }

    const std::vector<TemporalRow>& rows() const { return _rows; }
    const KernelConfig& config() const { return _config; }
    double delta() const { return _delta; }
    double effective_count() const { return _effective_count; }
    Eigen::Index output_dim() const { return _outputs.cols(); }
    const Matrix& system_matrix() const { return _solver.matrix(); }

private:
    std::vector<TemporalRow> _rows;
    KernelConfig _config;
    double _delta;
    double _effective_count;
    Matrix _outputs;
    Vector _weights;
    FactoredSystem _solver;
};

/// Fit on positions and velocities; delta defaults to 1e-4 × time span and
/// must not exceed a tenth of the smallest sample spacing.
inline TemporalModel fit_temporal(const std::vector<TemporalSample>& samples, const KernelConfig& config, std::optional<double> delta = std::nullopt)
{
    if (samples.empty())
        throw InvalidArgument("fit_temporal: no samples");
    std::vector<double> times;
    times.reserve(samples.size());
    for (const auto& s : samples)
        times.push_back(s.t);
    const double d = delta.value_or(default_delta(times));
    if (!(d > 0.0))
        throw InvalidArgument("fit_temporal: delta must be positive");
    const double spacing = detail::min_spacing(times);
    if (d > spacing / 10.0)
        throw InvalidArgument("fit_temporal: delta must be at most a tenth of the smallest time spacing");

    const auto O = samples.front().position.size();
    std::vector<TemporalRow> rows;
    rows.reserve(2 * samples.size());
    for (std::size_t n = 0; n < samples.size(); ++n) {
        const auto& s = samples[n];
        if (s.position.size() != O || s.velocity.size() != O)
            throw DimensionMismatch("fit_temporal: sample " + std::to_string(n) + " needs position and velocity of length " + std::to_string(O));
        rows.push_back({s.t, RowKind::Position, s.position, 1.0});
        rows.push_back({s.t, RowKind::Velocity, s.velocity, 1.0});
    }
    return TemporalModel(std::move(rows), config, d, static_cast<double>(samples.size()));
}

/// Refit with desired position/velocity rows weighted by w_j; the regularizer
/// count grows by Σ_j w_j.
inline TemporalModel adapt_temporal(const TemporalModel& model, const std::vector<DesiredState>& desired)
{
    std::vector<TemporalRow> rows = model.rows();
    double count = model.effective_count();
    for (std::size_t j = 0; j < desired.size(); ++j) {
        const auto& d = desired[j];
        const std::string at = "adapt_temporal: desired state " + std::to_string(j);
        if (!d.position && !d.velocity)
            throw InvalidArgument(at + " has neither position nor velocity");
        if (!(d.weight > 0.0) || !std::isfinite(d.weight))
            throw InvalidArgument(at + " has a non-positive weight");
        if (d.position) {
            if (d.position->size() != model.output_dim())
                throw DimensionMismatch(at + ": position length differs from the model");
            rows.push_back({d.t, RowKind::Position, *d.position, d.weight});
        }
        if (d.velocity) {
            if (d.velocity->size() != model.output_dim())
                throw DimensionMismatch(at + ": velocity length differs from the model");
            rows.push_back({d.t, RowKind::Velocity, *d.velocity, d.weight});
        }
        count += d.weight;
    }
    return TemporalModel(std::move(rows), model.config(), model.delta(), count);
}

inline std::pair<Vector, Vector> kp_kv(const TemporalModel& model, double t) { return model.kp_kv(t); }

inline std::pair<Vector, Vector> predict_pos_vel(const TemporalModel& model, double t) { return model.predict(t); }

/// Query through the phase z = t/τ; the velocity is rescaled by dz/dt = 1/τ.
inline std::pair<Vector, Vector> predict_pos_vel_phase(const TemporalModel& model, double t, double tau)
{
    auto [pos, vel] = model.predict(phase_map(t, tau));
    return {pos, vel / tau};
}

} // namespace struct_imitate

#endif // STRUCT_IMITATE_TEMPORAL_HPP

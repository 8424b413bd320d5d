// Learn an orientation-like path on the unit sphere from noisy
// demonstrations, then bend it through a via-point at t = 0.35.

#include <cmath>
#include <cstdio>
#include <random>

#include <struct_imitate/struct_imitate.hpp>

using namespace struct_imitate;

namespace {

Vector scalar(double t)
{
    Vector x(1);
    x << t;
    return x;
}

} // namespace

int main()
{
    const auto sphere = ManifoldSpec::sphere(1.0);
    const int N = 50;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.02);

    std::vector<Demonstration> demos(5);
    for (auto& d : demos)
        for (int n = 0; n < N; ++n) {
            double t = static_cast<double>(n) / (N - 1);
            double theta = 0.5 + 1.2 * t, phi = 2.0 * t;
            Vector p(3), e(3);
            p << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
            e << noise(rng), noise(rng), noise(rng);
            d.inputs.push_back(scalar(t));
            d.outputs.push_back(retract(sphere, p, project_tangent(sphere, p, e)));
        }
    auto data = ingest_manifold_demonstrations(demos, sphere);

    // Narrow kernel for the dense time grid: κh² = 1.
    KernelConfig cfg;
    cfg.kappa = double((N - 1) * (N - 1));
    auto model = fit(data.inputs(), cfg);

    const double t_v = 0.35;
    Vector before = predict_manifold(model, data, scalar(t_v)).mu;
    Vector push(3);
    push << 0.0, 0.0, 0.3;
    Vector target = retract(sphere, before, project_tangent(sphere, before, push));

    ViaPointSet via{{{scalar(t_v), target, 1e-4 * Matrix::Identity(2, 2)}}, {1e4}};
    auto merged = merge_via_points(data, via);
    auto adapted = fit(merged.data.inputs(), merged.row_weights, cfg);

    std::printf("%5s %28s %28s %9s\n", "t", "original mean", "adapted mean", "shift");
    for (int i = 0; i <= 20; ++i) {
        double t = i / 20.0;
        auto p0 = predict_manifold(model, data, scalar(t));
        auto p1 = predict_manifold(adapted, merged.data, scalar(t));
        std::printf("%5.2f  (%7.4f %7.4f %7.4f)  (%7.4f %7.4f %7.4f) %9.5f\n", t, p0.mu[0], p0.mu[1], p0.mu[2], p1.mu[0], p1.mu[1], p1.mu[2],
            dist(sphere, p0.mu, p1.mu));
    }
    auto at = predict_manifold(adapted, merged.data, scalar(t_v));
    std::printf("geodesic distance to the via-point at t = %.2f: %.2e\n", t_v, dist(sphere, at.mu, target));
}

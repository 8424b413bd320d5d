// Two demonstrations disagree; one of them is uncertain over the middle of
// the motion. KL averages the means, RKL follows the confident one.

#include <cmath>
#include <cstdio>

#include <struct_imitate/struct_imitate.hpp>

using namespace struct_imitate;

int main()
{
    SuperpositionSet set;
    set.priorities = {0.5, 0.5};
    set.trajectories.resize(2);
    for (int n = 0; n <= 40; ++n) {
        double t = 0.25 * n;
        double var_a = (t >= 3.0 && t <= 7.0) ? 1.0 : 0.01;
        Vector x(1), a(1), b(1);
        x << t;
        a << std::sin(t) + 1.0;
        b << std::sin(t) - 1.0;
        set.trajectories[0].points.push_back({x, a, var_a * Matrix::Identity(1, 1)});
        set.trajectories[1].points.push_back({x, b, 0.01 * Matrix::Identity(1, 1)});
    }

    auto model = fit(set.trajectories.front().inputs(), KernelConfig{});
    std::printf("%6s %10s %10s %10s %10s\n", "t", "KL mean", "KL var", "RKL mean", "RKL var");
    for (int i = 0; i <= 20; ++i) {
        Vector x(1);
        x << 0.5 * i;
        auto kl = superpose_predict(model, set, {Divergence::KL}, x);
        auto rkl = superpose_predict(model, set, {Divergence::RKL}, x);
        std::printf("%6.2f %10.4f %10.4f %10.4f %10.4f\n", x[0], kl.mu[0], kl.sigma(0, 0), rkl.mu[0], rkl.sigma(0, 0));
    }
}

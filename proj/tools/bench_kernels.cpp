// Times the OpenMP kernels against their serial reference implementations
// and reports the largest observed disagreement.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "groupsurv/exact.hpp"
#include "groupsurv/monte_carlo.hpp"
#include "groupsurv/optimizer.hpp"

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename Fn>
double timed(Fn&& fn, double& out) {
    const double t0 = now_ms();
    out = fn();
    return now_ms() - t0;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-34s %10.1f ms %10.1f ms %7.2fx   max|diff| %.3g\n", name, serial_ms,
                parallel_ms, parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, diff);
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif
    std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        const int n = quick ? 14 : 21;
        const auto spec = groupsurv::GroupSpec::uniform(0.8, 0.55, 0.2, n);
        double a = 0.0, b = 0.0;
        const double ts = timed([&] { return groupsurv::serial::survival_constant(spec); }, a);
        const double tp = timed([&] { return groupsurv::survival_constant(spec); }, b);
        report(("constant enumeration, n=" + std::to_string(n)).c_str(), ts, tp,
               std::abs(a - b));
    }
    {
        const int n = quick ? 9 : 13;
        auto spec = groupsurv::GroupSpec::uniform(0.8, 0.55, 0.2, n);
        spec.early_default.assign(n, 0.3);
        double a = 0.0, b = 0.0;
        const double ts = timed([&] { return groupsurv::serial::survival_delayed(spec); }, a);
        const double tp = timed([&] { return groupsurv::survival_delayed(spec); }, b);
        report(("delayed enumeration, n=" + std::to_string(n)).c_str(), ts, tp,
               std::abs(a - b));
    }
    {
        const long trials = quick ? 100'000 : 2'000'000;
        const int n = 8;
        groupsurv::mc::SimulationSpec sim;
        sim.horizon = 1.0;
        sim.trials = trials;
        sim.seed = 42;
        sim.leader = groupsurv::mc::DefaultTimeDistribution::exponential_with_default_prob(0.3, 1.0);
        for (int i = 0; i < n; ++i)
            sim.members.push_back(
                groupsurv::mc::DefaultTimeDistribution::exponential_with_default_prob(0.5, 1.0));
        auto q = groupsurv::GroupSpec::uniform(1.0, 0.5, 0.25, n).contagion;
        sim.schedule = groupsurv::mc::ContagionSchedule::constant(q, n);
        double a = 0.0, b = 0.0;
        const double ts =
            timed([&] { return groupsurv::mc::serial::estimate_survival(sim).estimate; }, a);
        const double tp = timed([&] { return groupsurv::mc::estimate_survival(sim).estimate; }, b);
        report(("monte carlo, " + std::to_string(trials) + " trials").c_str(), ts, tp,
               std::abs(a - b));
    }
    {
        const long n_max = quick ? 600 : 4000;
        double a = 0.0, b = 0.0;
        const double ts = timed(
            [&] { return groupsurv::serial::survival_curve(0.5, 0.15, 0.1, n_max).back().survival; },
            a);
        const double tp = timed(
            [&] { return groupsurv::survival_curve(0.5, 0.15, 0.1, n_max).back().survival; }, b);
        report(("survival curve, n_max=" + std::to_string(n_max)).c_str(), ts, tp,
               std::abs(a - b));
    }
    return 0;
}

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "groupsurv/exact.hpp"
#include "groupsurv/homogeneous.hpp"
#include "groupsurv/monte_carlo.hpp"
#include "groupsurv/optimizer.hpp"
#include "groupsurv/spec_io.hpp"

namespace {

using nlohmann::ordered_json;

// 17 significant digits: bit-stable for a given build and locale-independent.
std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write to " + path);
    return out;
}

void require_interior_flag(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
        throw std::domain_error(std::string(name) + " must lie strictly inside (0, 1)");
}

int run_compute(const std::string& spec_path, const std::string& method,
                std::optional<long> trials, std::optional<std::uint64_t> seed) {
    const groupsurv::GroupSpecFile file = groupsurv::load_group_spec_file(spec_path);
    if (method == "exact") {
        const auto by_size = file.delayed ? groupsurv::all_default_by_size_delayed(file.group)
                                          : groupsurv::all_default_by_size(file.group);
        double all_default = 0.0;
        for (std::size_t k = 1; k < by_size.size(); ++k) all_default += by_size[k];
        all_default = std::min(all_default, 1.0);
        const double survival = file.group.leader_survival * (1.0 - all_default);
        std::cout << "survival = " << fmt17(survival) << "\n";
        std::cout << "all_default = " << fmt17(all_default) << "\n";
        for (std::size_t k = 1; k < by_size.size(); ++k)
            std::cout << "subtotal[|I|=" << k << "] = " << fmt17(by_size[k]) << "\n";
        return 0;
    }
    if (method == "mc") {
        const auto sim = groupsurv::make_simulation_spec(file, trials, seed);
        const auto est = groupsurv::mc::estimate_survival(sim);
        std::cout << "estimate = " << fmt17(est.estimate) << "\n";
        std::cout << "std_error = " << fmt17(est.std_error) << "\n";
        std::cout << "ci95 = [" << fmt17(est.ci_low) << ", " << fmt17(est.ci_high) << "]\n";
        std::cout << "trials = " << est.trials << "\n";
        std::cout << "seed = " << est.seed << "\n";
        return 0;
    }
    throw std::domain_error("--method must be \"exact\" or \"mc\"");
}

int run_sweep(double leader, double c1, double q, long n_max, const std::string& out_path,
              bool with_approx) {
    require_interior_flag(c1, "--c1");
    require_interior_flag(q, "--q");
    if (n_max < 1) throw std::domain_error("--n-max must be at least 1");
    if (n_max > groupsurv::kMaxSweepMembers)
        throw groupsurv::CapacityError("--n-max exceeds the sweep cap of " +
                                       std::to_string(groupsurv::kMaxSweepMembers));
    if (!(leader >= 0.0 && leader <= 1.0))
        throw std::domain_error("--leader must lie in [0, 1]");

    auto out = open_output(out_path);
    out << (with_approx ? "n,survival,s_n,survival_approx" : "n,survival,s_n") << "\n";
    for (long n = 1; n <= n_max; ++n) {
        const double sn = groupsurv::s_n(c1, q, n);
        const double survival = leader * groupsurv::one_minus_s_n(c1, q, n);
        out << n << "," << fmt17(survival) << "," << fmt17(sn);
        if (with_approx) out << "," << fmt17(leader * (1.0 - groupsurv::t_n_approx(c1, q, n)));
        out << "\n";
    }
    return 0;
}

int run_bounds(double c1, double q, double delta) {
    const groupsurv::BoundReport report = groupsurv::bound_report(c1, q, delta);
    ordered_json j;
    j["a"] = report.tail_rate;
    j["N"] = report.tail_threshold;
    j["prop2_bound"] = report.prop2_bound;
    j["b"] = report.prop3_rate;
    j["prop3_bound"] = report.prop3_bound;
    j["n_star"] = report.n_star_estimate;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_optimize(double leader, double c1, double q, double delta,
                 const std::string& curve_path) {
    const auto result = groupsurv::search_optimal_size(leader, c1, q, delta);
    ordered_json j;
    j["best_n"] = result.best_n;
    j["best_survival"] = result.best_survival;
    j["U"] = result.search_limit;
    j["delta"] = result.delta;
    std::cout << j.dump(2) << "\n";
    if (!curve_path.empty()) {
        auto out = open_output(curve_path);
        out << "n,survival\n";
        for (const auto& point : result.curve)
            out << point.n << "," << fmt17(point.survival) << "\n";
    }
    return 0;
}

int run_simulate(const std::string& spec_path, std::optional<long> trials,
                 std::optional<std::uint64_t> seed, const std::string& out_path) {
    const groupsurv::GroupSpecFile file = groupsurv::load_group_spec_file(spec_path);
    if (!file.simulation && !trials && !seed)
        throw groupsurv::SpecFileError(spec_path + ": spec file has no simulation block");
    const auto sim = groupsurv::make_simulation_spec(file, trials, seed);
    const auto est = groupsurv::mc::estimate_survival(sim);
    ordered_json j;
    j["estimate"] = est.estimate;
    j["std_error"] = est.std_error;
    j["ci95"] = {est.ci_low, est.ci_high};
    j["trials"] = est.trials;
    j["seed"] = est.seed;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) open_output(out_path) << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group survival probabilities under default contagion"};
    app.require_subcommand(1);

    std::string spec_path, method = "exact", out_path, curve_path;
    double leader = 1.0, c1 = 0.5, q = 0.5, delta = 0.01;
    long n_max = 100;
    std::optional<long> trials;
    std::optional<std::uint64_t> seed;

    auto* compute = app.add_subcommand("compute", "Evaluate a group spec file");
    compute->add_option("spec", spec_path, "JSON group spec file")->required();
    compute->add_option("--method", method, "exact or mc")->default_str("exact");
    compute->add_option("--trials", trials, "Monte Carlo trial count");
    compute->add_option("--seed", seed, "Monte Carlo seed");

    auto* sweep = app.add_subcommand("sweep", "Survival as a function of group size, as CSV");
    sweep->add_option("--leader", leader, "leader survival probability")->required();
    sweep->add_option("--c1", c1, "member default probability")->required();
    sweep->add_option("--q", q, "uniform contagion factor")->required();
    sweep->add_option("--n-max", n_max, "largest group size")->required();
    sweep->add_option("--out", out_path, "output CSV path")->required();
    bool with_approx = false;
    sweep->add_flag("--approx", with_approx, "add the large-n approximation column");

    auto* bounds = app.add_subcommand("bounds", "Analytic group-size bounds, as JSON");
    bounds->add_option("--c1", c1, "member default probability")->required();
    bounds->add_option("--q", q, "uniform contagion factor")->required();
    bounds->add_option("--delta", delta, "suboptimality budget");

    auto* optimize = app.add_subcommand("optimize", "Search for the best group size");
    optimize->add_option("--leader", leader, "leader survival probability")->required();
    optimize->add_option("--c1", c1, "member default probability")->required();
    optimize->add_option("--q", q, "uniform contagion factor")->required();
    optimize->add_option("--delta", delta, "suboptimality budget");
    optimize->add_option("--curve-out", curve_path, "write the full n-sweep CSV here");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate for a spec file");
    simulate->add_option("spec", spec_path, "JSON group spec file")->required();
    simulate->add_option("--trials", trials, "trial count");
    simulate->add_option("--seed", seed, "RNG seed");
    simulate->add_option("--out", out_path, "also write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*compute) return run_compute(spec_path, method, trials, seed);
        if (*sweep) return run_sweep(leader, c1, q, n_max, out_path, with_approx);
        if (*bounds) return run_bounds(c1, q, delta);
        if (*optimize) return run_optimize(leader, c1, q, delta, curve_path);
        if (*simulate) return run_simulate(spec_path, trials, seed, out_path);
    } catch (const groupsurv::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

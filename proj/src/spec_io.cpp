#include "groupsurv/spec_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace groupsurv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw SpecFileError(origin + ": " + what);
}

double get_number(const json& j, const std::string& key, const std::string& origin) {
    if (!j.contains(key)) fail(origin, "missing required key \"" + key + "\"");
    if (!j.at(key).is_number()) fail(origin, "\"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

}  // namespace

GroupSpecFile parse_group_spec_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
        fail(origin, "parse error at line " + std::to_string(line) + ": " + e.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be a JSON object");

    GroupSpecFile file;
    file.group.leader_survival = get_number(doc, "leader_survival", origin);

    if (!doc.contains("members") || !doc.at("members").is_array() || doc.at("members").empty())
        fail(origin, "\"members\" must be a non-empty array");
    const auto& members = doc.at("members");
    const int n = static_cast<int>(members.size());

    std::string delta_mode = "none";
    if (doc.contains("delta_mode")) {
        if (!doc.at("delta_mode").is_string()) fail(origin, "\"delta_mode\" must be a string");
        delta_mode = doc.at("delta_mode").get<std::string>();
        if (delta_mode != "none" && delta_mode != "delayed")
            fail(origin, "\"delta_mode\" must be \"none\" or \"delayed\"");
    }
    file.delayed = delta_mode == "delayed";

    for (int i = 0; i < n; ++i) {
        const auto& m = members[i];
        const std::string where = origin + " (members[" + std::to_string(i) + "])";
        if (!m.is_object()) fail(where, "each member must be an object");
        file.group.member_default.push_back(get_number(m, "default_prob", where));
        if (file.delayed) {
            if (!m.contains("early_default_prob"))
                fail(where, "delayed specs need \"early_default_prob\" on every member");
            file.group.early_default.push_back(get_number(m, "early_default_prob", where));
        }
    }

    if (!doc.contains("contagion")) fail(origin, "missing required key \"contagion\"");
    const auto& contagion = doc.at("contagion");
    if (contagion.is_object() && contagion.contains("uniform")) {
        const double q = get_number(contagion, "uniform", origin + " (contagion)");
        file.group.contagion.assign(static_cast<std::size_t>(n) * n, q);
        for (int i = 0; i < n; ++i)
            file.group.contagion[static_cast<std::size_t>(i) * n + i] = 0.0;
    } else if (contagion.is_array()) {
        if (static_cast<int>(contagion.size()) != n)
            fail(origin, "contagion must be " + std::to_string(n) + "x" + std::to_string(n) +
                             " to match members");
        for (int i = 0; i < n; ++i) {
            const auto& row = contagion[i];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                fail(origin, "contagion row " + std::to_string(i) + " must have " +
                                 std::to_string(n) + " entries");
            for (int j = 0; j < n; ++j) {
                if (!row[j].is_number())
                    fail(origin, "contagion[" + std::to_string(i) + "][" + std::to_string(j) +
                                     "] must be a number");
                file.group.contagion.push_back(row[j].get<double>());
            }
        }
    } else {
        fail(origin, "\"contagion\" must be an n x n array or {\"uniform\": q}");
    }

    if (doc.contains("simulation")) {
        const auto& sim = doc.at("simulation");
        const std::string where = origin + " (simulation)";
        if (!sim.is_object()) fail(where, "\"simulation\" must be an object");
        SimulationConfig config;
        if (sim.contains("horizon")) config.horizon = get_number(sim, "horizon", where);
        if (config.horizon <= 0.0) fail(where, "horizon must be positive");
        if (sim.contains("trials")) {
            config.trials = static_cast<long>(get_number(sim, "trials", where));
            if (config.trials < 1) fail(where, "trials must be at least 1");
        }
        if (sim.contains("seed")) {
            if (!sim.at("seed").is_number_integer() && !sim.at("seed").is_number_unsigned())
                fail(where, "seed must be an integer");
            config.seed = sim.at("seed").get<std::uint64_t>();
        }
        if (sim.contains("distribution")) {
            if (!sim.at("distribution").is_string()) fail(where, "distribution must be a string");
            config.family = sim.at("distribution").get<std::string>();
            if (config.family != "exponential" && config.family != "uniform-mixture")
                fail(where, "distribution must be \"exponential\" or \"uniform-mixture\"");
        }
        if (sim.contains("delta")) {
            config.contagion_gap = get_number(sim, "delta", where);
            config.has_gap = true;
            if (config.contagion_gap < 0.0) fail(where, "delta must be nonnegative");
        }
        file.simulation = std::move(config);
    }

    if (auto err = validate(file.group)) fail(origin, *err);
    return file;
}

GroupSpecFile load_group_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecFileError(path + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_group_spec_json(buffer.str(), path);
}

mc::SimulationSpec make_simulation_spec(const GroupSpecFile& file,
                                        std::optional<long> trials_override,
                                        std::optional<std::uint64_t> seed_override) {
    SimulationConfig config = file.simulation.value_or(SimulationConfig{});
    if (trials_override) config.trials = *trials_override;
    if (seed_override) config.seed = *seed_override;
    if (file.delayed && !config.has_gap)
        throw SpecFileError("simulation.delta is required when delta_mode is \"delayed\"");

    const int n = file.group.size();
    const double horizon = config.horizon;
    const bool mixture = config.family == "uniform-mixture";

    mc::SimulationSpec sim;
    sim.horizon = horizon;
    sim.trials = config.trials;
    sim.seed = config.seed;

    const double leader_default = 1.0 - file.group.leader_survival;
    sim.leader = mixture ? mc::DefaultTimeDistribution::uniform_mixture(leader_default)
                         : mc::DefaultTimeDistribution::exponential_with_default_prob(
                               leader_default, horizon);

    const bool split_marginals =
        file.delayed && config.contagion_gap > 0.0 && config.contagion_gap < horizon;
    for (int i = 0; i < n; ++i) {
        const double c1 = file.group.member_default[i];
        if (split_marginals) {
            // Piecewise-linear CDF through (horizon - gap, early) and
            // (horizon, c1): both marginals the exact formulas consume hold
            // exactly under simulation.
            const double early = file.group.early_default[i];
            sim.members.push_back(mc::DefaultTimeDistribution::table(
                {{0.0, 0.0}, {horizon - config.contagion_gap, early}, {horizon, c1}}, true));
        } else if (mixture) {
            sim.members.push_back(mc::DefaultTimeDistribution::uniform_mixture(c1));
        } else {
            sim.members.push_back(
                mc::DefaultTimeDistribution::exponential_with_default_prob(c1, horizon));
        }
    }

    sim.schedule = file.delayed
                       ? mc::ContagionSchedule::delayed(file.group.contagion, n, config.contagion_gap)
                       : mc::ContagionSchedule::constant(file.group.contagion, n);
    return sim;
}

}  // namespace groupsurv

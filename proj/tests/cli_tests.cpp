#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "groupsurv/homogeneous.hpp"
#include "groupsurv/optimizer.hpp"
#include "proc_util.hpp"

using proc_util::extract_number;
using proc_util::run;

namespace {

const std::string kCli = "\"" GROUPSURV_CLI_PATH "\"";

struct CsvRow {
    long n;
    std::vector<double> values;
};

std::vector<CsvRow> parse_csv(const std::string& text, std::string* header = nullptr) {
    std::vector<CsvRow> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            if (header) *header = line;
            first = false;
            continue;
        }
        CsvRow row;
        std::istringstream cells(line);
        std::string cell;
        bool have_n = false;
        while (std::getline(cells, cell, ',')) {
            if (!have_n) {
                row.n = std::stol(cell);
                have_n = true;
            } else {
                row.values.push_back(std::stod(cell));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* kSingleMemberSpec = R"({
  "leader_survival": 0.5,
  "members": [{"default_prob": 0.7}],
  "contagion": [[0]]
})";

const char* kUniform3Spec = R"({
  "leader_survival": 1.0,
  "members": [{"default_prob": 0.6}, {"default_prob": 0.6}, {"default_prob": 0.6}],
  "contagion": {"uniform": 0.3},
  "simulation": {"horizon": 1.0, "trials": 50000, "seed": 42}
})";

}  // namespace

TEST_CASE("compute --method exact prints survival and subtotals") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_compute");
    proc_util::write_file(dir / "single.json", kSingleMemberSpec);
    const auto result = run(kCli + " compute " + (dir / "single.json").string());
    CHECK(result.exit_code == 0);
    CHECK(std::abs(extract_number(result.output, "survival") - 0.15) < 1e-12);
    CHECK(std::abs(extract_number(result.output, "all_default") - 0.7) < 1e-12);
    CHECK(result.output.find("subtotal[|I|=1]") != std::string::npos);

    proc_util::write_file(dir / "uniform3.json", kUniform3Spec);
    const auto exact = run(kCli + " compute " + (dir / "uniform3.json").string());
    CHECK(exact.exit_code == 0);
    CHECK(std::abs(extract_number(exact.output, "survival") - 0.53776) < 1e-12);
}

TEST_CASE("compute --method mc reports an estimate with a confidence interval") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_mc");
    proc_util::write_file(dir / "uniform3.json", kUniform3Spec);
    const auto result = run(kCli + " compute " + (dir / "uniform3.json").string() +
                            " --method mc --trials 50000 --seed 7");
    CHECK(result.exit_code == 0);
    const double estimate = extract_number(result.output, "estimate");
    const double se = extract_number(result.output, "std_error");
    CHECK(std::abs(estimate - 0.53776) <= 4.0 * se);
    CHECK(extract_number(result.output, "trials") == 50000);
}

TEST_CASE("exit codes: 2 for bad input, 3 for capability limits") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_errors");

    proc_util::write_file(dir / "broken.json", "{ not json");
    CHECK(run(kCli + " compute " + (dir / "broken.json").string() + " 2>/dev/null").exit_code == 2);

    proc_util::write_file(dir / "diag.json", R"({
      "leader_survival": 1.0,
      "members": [{"default_prob": 0.5}],
      "contagion": [[0.2]]
    })");
    CHECK(run(kCli + " compute " + (dir / "diag.json").string() + " 2>/dev/null").exit_code == 2);

    std::ostringstream big;
    big << R"({"leader_survival": 1.0, "members": [)";
    for (int i = 0; i < 25; ++i) big << (i ? "," : "") << R"({"default_prob": 0.5})";
    big << R"(], "contagion": {"uniform": 0.1}})";
    proc_util::write_file(dir / "big.json", big.str());
    CHECK(run(kCli + " compute " + (dir / "big.json").string() + " 2>/dev/null").exit_code == 3);

    CHECK(run(kCli + " compute " + (dir / "missing.json").string() + " 2>/dev/null").exit_code == 2);
    CHECK(run(kCli + " sweep --leader 0.5 --c1 1.5 --q 0.1 --n-max 5 --out " +
              (dir / "x.csv").string() + " 2>/dev/null")
              .exit_code == 2);
    CHECK(run(kCli + " sweep --leader 0.5 --c1 0.5 --q 0.1 --n-max 20000 --out " +
              (dir / "x.csv").string() + " 2>/dev/null")
              .exit_code == 3);
    CHECK(run(kCli + " definitely-not-a-command 2>/dev/null").exit_code == 2);
}

TEST_CASE("sweep emits the pinned CSV schema with 17-digit round-trip values") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_sweep");
    const auto csv_path = (dir / "curve.csv").string();
    const auto result =
        run(kCli + " sweep --leader 0.5 --c1 0.7 --q 0.05 --n-max 60 --out " + csv_path);
    CHECK(result.exit_code == 0);

    std::string header;
    const auto rows = parse_csv(proc_util::read_file(csv_path), &header);
    CHECK(header == "n,survival,s_n");
    REQUIRE(rows.size() == 60);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const long n = static_cast<long>(i) + 1;
        CHECK(rows[i].n == n);
        // %.17g round-trips doubles exactly.
        CHECK(rows[i].values[0] == 0.5 * groupsurv::one_minus_s_n(0.7, 0.05, n));
        CHECK(rows[i].values[1] == groupsurv::s_n(0.7, 0.05, n));
    }

    const auto approx_path = (dir / "approx.csv").string();
    CHECK(run(kCli + " sweep --leader 1 --c1 0.05 --q 0.85 --n-max 100 --approx --out " +
              approx_path)
              .exit_code == 0);
    std::string approx_header;
    const auto approx_rows = parse_csv(proc_util::read_file(approx_path), &approx_header);
    CHECK(approx_header == "n,survival,s_n,survival_approx");
    long argmax_true = 0, argmax_approx = 0;
    double best_true = -1.0, best_approx = -1.0;
    for (const auto& row : approx_rows) {
        if (row.values[0] > best_true) {
            best_true = row.values[0];
            argmax_true = row.n;
        }
        if (row.values[2] > best_approx) {
            best_approx = row.values[2];
            argmax_approx = row.n;
        }
    }
    CHECK(argmax_true == 1);
    CHECK(argmax_approx == 7);
}

TEST_CASE("sweep reproduces the non-unimodal pattern at tiny c1, large q") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_alt");
    const auto csv_path = (dir / "alt.csv").string();
    CHECK(run(kCli + " sweep --leader 1 --c1 0.01 --q 0.77 --n-max 300 --out " + csv_path)
              .exit_code == 0);
    const auto rows = parse_csv(proc_util::read_file(csv_path));
    REQUIRE(rows.size() == 300);
    long argmax = 0;
    double best = -1.0;
    for (const auto& row : rows) {
        CHECK(row.values[0] >= 0.0);
        CHECK(row.values[0] <= 1.0);
        if (row.values[0] > best) {
            best = row.values[0];
            argmax = row.n;
        }
    }
    // the curve dips below its n=1 value first, then climbs to an interior
    // peak before the slow decay
    CHECK(rows[3].values[0] < rows[0].values[0]);
    CHECK(argmax > 4);
    CHECK(argmax < 40);
    CHECK(rows[299].values[0] < best);
}

TEST_CASE("compute agrees with the matching sweep row") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_roundtrip");
    proc_util::write_file(dir / "uniform3.json", kUniform3Spec);
    const auto compute = run(kCli + " compute " + (dir / "uniform3.json").string());
    const auto csv_path = (dir / "curve.csv").string();
    CHECK(run(kCli + " sweep --leader 1.0 --c1 0.6 --q 0.3 --n-max 3 --out " + csv_path)
              .exit_code == 0);
    const auto rows = parse_csv(proc_util::read_file(csv_path));
    REQUIRE(rows.size() == 3);
    CHECK(std::abs(extract_number(compute.output, "survival") - rows[2].values[0]) < 1e-12);
}

TEST_CASE("bounds reports the analytic constants as JSON") {
    const auto at_flat = run(kCli + " bounds --c1 0.7 --q 0.3 --delta 0.03");
    CHECK(at_flat.exit_code == 0);
    CHECK(extract_number(at_flat.output, "\"N\"") == 114);
    CHECK(extract_number(at_flat.output, "\"prop3_bound\"") == 51);
    const double prop2 = extract_number(at_flat.output, "\"prop2_bound\"");

    const auto optimize = run(kCli + " optimize --leader 1.0 --c1 0.7 --q 0.3 --delta 0.03");
    CHECK(optimize.exit_code == 0);
    const double best_n = extract_number(optimize.output, "\"best_n\"");
    CHECK(best_n <= prop2);
    CHECK(best_n <= 51);

    const auto steep = run(kCli + " bounds --c1 0.9 --q 0.99");
    CHECK(extract_number(steep.output, "\"N\"") == 1);

    const auto star = run(kCli + " bounds --c1 0.05 --q 0.85");
    CHECK(std::abs(extract_number(star.output, "\"n_star\"") - 7.3073625925841545) < 1e-9);
}

TEST_CASE("optimize matches the library and writes the curve") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_optimize");
    const auto curve_path = (dir / "curve.csv").string();

    const auto low_q = run(kCli + " optimize --leader 0.9 --c1 0.45 --q 0.4 --curve-out " +
                           curve_path);
    CHECK(low_q.exit_code == 0);
    CHECK(extract_number(low_q.output, "\"best_n\"") >= 2);
    const auto rows = parse_csv(proc_util::read_file(curve_path));
    CHECK(static_cast<long>(rows.size()) == extract_number(low_q.output, "\"U\""));

    const auto high_q = run(kCli + " optimize --leader 0.5 --c1 0.7 --q 0.7");
    CHECK(extract_number(high_q.output, "\"best_n\"") == 1);

    const auto misleading = run(kCli + " optimize --leader 1.0 --c1 0.05 --q 0.85");
    CHECK(extract_number(misleading.output, "\"best_n\"") == 1);
}

TEST_CASE("simulate is deterministic; an unreachable cutoff reduces to no contagion") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_simulate");
    proc_util::write_file(dir / "uniform3.json", kUniform3Spec);

    const auto first = run(kCli + " simulate " + (dir / "uniform3.json").string());
    const auto second = run(kCli + " simulate " + (dir / "uniform3.json").string());
    CHECK(first.exit_code == 0);
    CHECK(first.output == second.output);
    CHECK(std::abs(extract_number(first.output, "\"estimate\"") - 0.53776) <=
          4.0 * extract_number(first.output, "\"std_error\""));

    // Delayed schedule with delta > horizon vs the same members with q = 0.
    const char* hopeless_delayed = R"({
      "leader_survival": 1.0,
      "members": [
        {"default_prob": 0.6, "early_default_prob": 0.0},
        {"default_prob": 0.6, "early_default_prob": 0.0}
      ],
      "contagion": {"uniform": 0.7},
      "delta_mode": "delayed",
      "simulation": {"horizon": 1.0, "trials": 20000, "seed": 5, "delta": 2.0}
    })";
    const char* no_contagion = R"({
      "leader_survival": 1.0,
      "members": [{"default_prob": 0.6}, {"default_prob": 0.6}],
      "contagion": {"uniform": 0.0},
      "simulation": {"horizon": 1.0, "trials": 20000, "seed": 5}
    })";
    proc_util::write_file(dir / "delayed.json", hopeless_delayed);
    proc_util::write_file(dir / "zero.json", no_contagion);
    const auto delayed = run(kCli + " simulate " + (dir / "delayed.json").string());
    const auto zero = run(kCli + " simulate " + (dir / "zero.json").string());
    CHECK(delayed.exit_code == 0);
    CHECK(delayed.output == zero.output);

    // q = 1 two-member spec: survival ~ leader * c2^2.
    const char* certain = R"({
      "leader_survival": 0.5,
      "members": [{"default_prob": 0.7}, {"default_prob": 0.7}],
      "contagion": {"uniform": 1.0},
      "simulation": {"horizon": 1.0, "trials": 100000, "seed": 11}
    })";
    proc_util::write_file(dir / "certain.json", certain);
    const auto chained = run(kCli + " simulate " + (dir / "certain.json").string());
    CHECK(std::abs(extract_number(chained.output, "\"estimate\"") - 0.045) <=
          4.0 * extract_number(chained.output, "\"std_error\"") + 1e-9);

    // --out writes the same report to disk.
    const auto report_path = (dir / "report.json").string();
    const auto with_file = run(kCli + " simulate " + (dir / "uniform3.json").string() +
                               " --out " + report_path);
    CHECK(with_file.output == proc_util::read_file(report_path));

    // A spec without a simulation block needs flags or fails.
    proc_util::write_file(dir / "bare.json", kSingleMemberSpec);
    CHECK(run(kCli + " simulate " + (dir / "bare.json").string() + " 2>/dev/null").exit_code == 2);
    CHECK(run(kCli + " simulate " + (dir / "bare.json").string() +
              " --trials 1000 --seed 1")
              .exit_code == 0);
}

TEST_CASE("delayed spec file: exact matches the split-marginal simulation") {
    const auto dir = proc_util::fresh_dir("groupsurv_cli_delayed");
    const char* spec = R"({
      "leader_survival": 1.0,
      "members": [
        {"default_prob": 0.7, "early_default_prob": 0.4},
        {"default_prob": 0.7, "early_default_prob": 0.4}
      ],
      "contagion": {"uniform": 0.5},
      "delta_mode": "delayed",
      "simulation": {"horizon": 1.0, "trials": 200000, "seed": 8, "delta": 0.5}
    })";
    proc_util::write_file(dir / "delayed.json", spec);
    const auto exact = run(kCli + " compute " + (dir / "delayed.json").string());
    CHECK(exact.exit_code == 0);
    CHECK(std::abs(extract_number(exact.output, "survival") - 0.39) < 1e-12);
    const auto mc = run(kCli + " simulate " + (dir / "delayed.json").string());
    CHECK(std::abs(extract_number(mc.output, "\"estimate\"") - 0.39) <=
          4.0 * extract_number(mc.output, "\"std_error\""));
}

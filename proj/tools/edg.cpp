// edg: command-line harness for MatrixIRLS distance-geometry experiments.
//
// Exit codes: 0 ok, 1 I/O or parse failure, 2 solver did not converge.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edg/edg.hpp"
#include "edg/experiments/experiments.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitIo = 1;
constexpr int kExitNoConvergence = 2;

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    edg::write_text_file(path, text);
}

std::vector<double> parse_rho_range(const std::string& spec) {
    // lo:hi:step or a comma list
    if (spec.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(spec);
        if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':')
            throw edg::Error("--rho-range expects lo:hi:step or a comma-separated list");
        return edg::rho_range(lo, hi, step);
    }
    std::vector<double> out;
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    std::sort(out.begin(), out.end());
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ordered_json json_number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

struct Common {
    edg::Index n = 100;
    edg::Index r = 3;
    double rho = 3.0;
    std::uint64_t seed = 1;
    std::string mode = "tangent";
    double tol_rec = 1e-3;
    std::string out;
    std::string format = "csv";
    std::string kind = "gaussian";
    double kappa = 1.0;
    int max_outer = 400;
};

edg::InstanceSpec instance_spec(const Common& c) {
    edg::InstanceSpec spec;
    spec.n = c.n;
    spec.r = c.r;
    spec.seed = c.seed;
    spec.kappa = c.kappa;
    if (c.kind == "gaussian")
        spec.kind = edg::InstanceKind::gaussian;
    else if (c.kind == "ill" || c.kind == "ill_conditioned")
        spec.kind = edg::InstanceKind::ill_conditioned;
    else
        throw edg::Error("--kind must be gaussian or ill_conditioned");
    return spec;
}

int cmd_gen(const Common& c) {
    emit(c.out, edg::write_point_cloud_csv(edg::generate(instance_spec(c))));
    return 0;
}

int cmd_sample(const Common& c, const std::string& points_path, bool with_replacement) {
    const edg::PointCloud p = edg::read_point_cloud_csv(edg::read_text_file(points_path));
    const edg::Index m = edg::oversampling_to_m(c.rho, p.n(), c.r);
    const auto s = edg::observe(p, edg::sample_pairs(p.n(), m, c.seed, with_replacement), with_replacement);
    emit(c.out, edg::write_sample_set(s));
    return 0;
}

int cmd_solve(const Common& c, const std::string& samples_path, const std::string& truth_path, bool with_replacement) {
    const edg::SampleSet s = edg::read_sample_set(edg::read_text_file(samples_path), with_replacement);
    std::optional<edg::PointCloud> truth;
    if (!truth_path.empty()) truth = edg::read_point_cloud_csv(edg::read_text_file(truth_path));
    if (truth && truth->r() != c.r) throw edg::Error("--truth has a different dimension than --r");

    edg::IrlsConfig cfg;
    cfg.r_tilde = c.r;
    cfg.mode = edg::parse_mode(c.mode);
    cfg.seed = c.seed;
    cfg.max_outer = c.max_outer;
    const edg::IrlsResult res = edg::matrix_irls(s, cfg, truth);

    const edg::PointCloud rec = edg::recovered_points(res, c.r, true);
    const std::string base = c.out.empty() ? "edg_solve" : c.out;
    edg::write_text_file(base + "_points.csv", edg::write_point_cloud_csv(rec));
    std::ostringstream trace;
    edg::write_trace_csv(trace, res.trace);
    edg::write_text_file(base + "_trace.csv", trace.str());

    ordered_json summary;
    const double err = truth ? edg::procrustes_distance(rec, *truth) : std::numeric_limits<double>::quiet_NaN();
    summary["relative_error"] = json_number(err);
    summary["iterations"] = res.iterations();
    summary["wall_ms"] = res.trace.empty() ? 0.0 : res.trace.back().wall_ms;
    summary["converged"] = res.converged;
    if (truth) summary["success"] = err <= c.tol_rec;
    summary["underdetermined"] = res.underdetermined;
    summary["stop_reason"] = res.stop_reason;
    edg::write_text_file(base + "_summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump() << "\n";
    return res.converged ? 0 : kExitNoConvergence;
}

int cmd_phase(const Common& c, const std::vector<edg::Index>& ranks, const std::string& rho_spec, int instances) {
    edg::ExperimentGrid grid;
    grid.ranks = ranks;
    grid.rhos = parse_rho_range(rho_spec);
    grid.instances = instances;
    grid.tol_rec = c.tol_rec;
    grid.spec = instance_spec(c);
    grid.mode = edg::parse_mode(c.mode);
    grid.max_outer = c.max_outer;
    const auto res = edg::run_phase_transition(grid);

    if (c.format == "json") {
        ordered_json cells = ordered_json::array();
        for (const auto& cell : res.cells) {
            cells.push_back({{"rank", cell.rank},
                             {"rho", cell.rho},
                             {"success_prob", cell.success_prob},
                             {"median_err", cell.median_err},
                             {"q25_err", cell.q25_err},
                             {"q75_err", cell.q75_err},
                             {"median_time_ms", cell.median_time_ms}});
        }
        emit(c.out, ordered_json{{"n", c.n}, {"instances", instances}, {"seed", c.seed}, {"cells", cells}}.dump(2) + "\n");
    } else {
        std::string csv = "rank,rho,success_prob,median_err,q25_err,q75_err,median_time_ms\n";
        for (const auto& cell : res.cells) {
            csv += std::to_string(cell.rank) + ',' + fmt(cell.rho) + ',' + fmt(cell.success_prob) + ',' +
                   fmt(cell.median_err) + ',' + fmt(cell.q25_err) + ',' + fmt(cell.q75_err) + ',' +
                   fmt(cell.median_time_ms) + '\n';
        }
        emit(c.out, csv);
    }
    return 0;
}

int cmd_trace(const Common& c) {
    const edg::InstanceSpec spec = instance_spec(c);
    const edg::Instance inst = edg::make_instance(spec, c.rho, c.seed);
    edg::IrlsConfig cfg;
    cfg.r_tilde = c.r;
    cfg.mode = edg::parse_mode(c.mode);
    cfg.seed = c.seed;
    cfg.max_outer = c.max_outer;
    const auto res = edg::matrix_irls(inst.samples, cfg, inst.points);
    std::ostringstream os;
    edg::write_trace_csv(os, res.trace);
    emit(c.out, os.str());
    return 0;
}

int cmd_bench(const Common& c, const std::vector<edg::Index>& sizes) {
    std::vector<edg::BenchRow> rows;
    for (edg::Index n : sizes) rows.push_back(edg::run_bench(n, c.r, c.rho, c.seed, edg::parse_mode(c.mode)));
    if (c.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& row : rows)
            arr.push_back({{"n", row.n},
                           {"relative_error", row.relative_error},
                           {"wall_minutes", row.wall_minutes},
                           {"iterations", row.iterations},
                           {"converged", row.converged}});
        emit(c.out, arr.dump(2) + "\n");
    } else {
        std::string csv = "n,relative_error,wall_minutes\n";
        for (const auto& row : rows)
            csv += std::to_string(row.n) + ',' + fmt(row.relative_error) + ',' + fmt(row.wall_minutes) + '\n';
        emit(c.out, csv);
    }
    return 0;
}

int cmd_rip(const Common& c, edg::Index m, int trials, bool without_replacement) {
    const auto probe = edg::rip_probe(c.n, c.r, m, trials, c.seed, 200, !without_replacement);
    ordered_json j{{"norm_PTQPT_minus_PT", probe.norm_PTQPT_minus_PT},
                   {"qomega_norm", probe.qomega_norm},
                   {"bound", probe.bound}};
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MatrixIRLS for Euclidean distance geometry"};
    app.require_subcommand(1);
    Common c;

    auto add_common = [&](CLI::App* sub, bool instance_flags) {
        sub->add_option("--seed", c.seed, "random seed");
        sub->add_option("--out", c.out, "output path ('-' or empty for stdout)");
        if (instance_flags) {
            sub->add_option("--n", c.n, "number of points")->check(CLI::PositiveNumber);
            sub->add_option("--r", c.r, "dimension / rank")->check(CLI::PositiveNumber);
            sub->add_option("--kind", c.kind, "gaussian or ill_conditioned");
            sub->add_option("--kappa", c.kappa, "condition number (ill_conditioned)");
        }
    };
    auto add_solver = [&](CLI::App* sub) {
        sub->add_option("--mode", c.mode, "WLS implementation")->check(CLI::IsMember({"tangent", "range"}));
        sub->add_option("--tol-rec", c.tol_rec, "success threshold on relative Procrustes error");
        sub->add_option("--max-outer", c.max_outer, "outer iteration cap")->check(CLI::PositiveNumber);
    };

    auto* gen = app.add_subcommand("gen", "generate a point cloud (CSV)");
    add_common(gen, true);

    std::string points_path, samples_path, truth_path;
    bool with_replacement = false;
    auto* sample = app.add_subcommand("sample", "sample distances of a point cloud at oversampling rho");
    add_common(sample, false);
    sample->add_option("--points", points_path, "point cloud CSV")->required();
    sample->add_option("--r", c.r, "rank used for the degrees of freedom")->check(CLI::PositiveNumber);
    sample->add_option("--rho", c.rho, "oversampling factor");
    sample->add_flag("--with-replacement", with_replacement, "sample pairs with replacement");

    auto* solve = app.add_subcommand("solve", "run MatrixIRLS on a sample file");
    add_common(solve, false);
    add_solver(solve);
    solve->add_option("--samples", samples_path, "SampleSet v1 file")->required();
    solve->add_option("--r", c.r, "rank estimate")->check(CLI::PositiveNumber);
    solve->add_option("--truth", truth_path, "ground-truth point cloud CSV");
    solve->add_flag("--with-replacement", with_replacement, "accept repeated pairs");

    std::vector<edg::Index> ranks{2, 3};
    std::string rho_spec = "1:4:0.1";
    int instances = 8;
    auto* phase = app.add_subcommand("phase", "phase-transition grid (success probability per rank and rho)");
    add_common(phase, true);
    add_solver(phase);
    phase->add_option("--rank-list", ranks, "ranks")->delimiter(',');
    phase->add_option("--rho-range", rho_spec, "lo:hi:step or comma list");
    phase->add_option("--instances", instances, "instances per cell")->check(CLI::PositiveNumber);
    phase->add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}));

    auto* trace = app.add_subcommand("trace", "per-iteration trace of one synthetic instance");
    add_common(trace, true);
    add_solver(trace);
    trace->add_option("--rho", c.rho, "oversampling factor");

    std::vector<edg::Index> sizes{100, 500};
    auto* bench = app.add_subcommand("bench", "runtime and accuracy versus n");
    add_common(bench, false);
    add_solver(bench);
    bench->add_option("--sizes", sizes, "list of n")->delimiter(',');
    bench->add_option("--r", c.r, "rank")->check(CLI::PositiveNumber);
    bench->add_option("--rho", c.rho, "oversampling factor");
    bench->add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}));

    edg::Index rip_m = 0;
    int trials = 20;
    auto* rip = app.add_subcommand("rip", "empirical restricted isometry probe");
    add_common(rip, false);
    rip->add_option("--n", c.n, "number of points")->check(CLI::PositiveNumber);
    rip->add_option("--r", c.r, "rank")->check(CLI::PositiveNumber);
    rip->add_option("--m", rip_m, "samples per trial (default 8 n r log n)");
    rip->add_option("--trials", trials, "number of independent draws")->check(CLI::PositiveNumber);
    bool rip_distinct = false;
    rip->add_flag("--without-replacement", rip_distinct, "draw distinct pairs instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitIo;
    }

    try {
        if (*gen) return cmd_gen(c);
        if (*sample) return cmd_sample(c, points_path, with_replacement);
        if (*solve) return cmd_solve(c, samples_path, truth_path, with_replacement);
        if (*phase) return cmd_phase(c, ranks, rho_spec, instances);
        if (*trace) return cmd_trace(c);
        if (*bench) return cmd_bench(c, sizes);
        if (*rip) return cmd_rip(c, rip_m, trials, rip_distinct);
    } catch (const edg::IoError& e) {
        std::cerr << "edg: " << e.what() << "\n";
        return kExitIo;
    } catch (const edg::ParseError& e) {
        std::cerr << "edg: " << e.what() << "\n";
        return kExitIo;
    } catch (const edg::ConvergenceFailure& e) {
        std::cerr << "edg: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "edg: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

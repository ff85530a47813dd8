#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tvckit/diagnostics.hpp"
#include "tvckit/error.hpp"
#include "tvckit/perturbation.hpp"
#include "tvckit/problem.hpp"
#include "tvckit/solver.hpp"
#include "tvckit/transversality.hpp"

namespace tvckit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string num(double v) { return format_real(v); }

fs::path prepare_out(const RunConfig& config) {
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
    return dir;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + file.string());
    os << text;
    if (!os) throw Error(ErrorKind::Io, "write failed for " + file.string());
}

void write_json(const fs::path& file, const json& doc) { write_text(file, doc.dump(2) + "\n"); }

/// Writes `stem`.csv, or `stem`.json (an array of row objects) under --format json.
fs::path write_table(const RunConfig& config, const fs::path& dir, const std::string& stem,
                     const Table& table) {
    if (config.format == OutputFormat::Json) {
        json rows = json::array();
        for (const auto& r : table.rows) {
            json obj = json::object();
            for (std::size_t k = 0; k < table.header.size(); ++k) {
                obj[table.header[k]] = json::parse(r[k]);
            }
            rows.push_back(std::move(obj));
        }
        const auto file = dir / (stem + ".json");
        write_json(file, rows);
        return file;
    }
    std::string text;
    for (std::size_t k = 0; k < table.header.size(); ++k) {
        if (k) text += ',';
        text += table.header[k];
    }
    text += '\n';
    for (const auto& r : table.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k) text += ',';
            text += r[k];
        }
        text += '\n';
    }
    const auto file = dir / (stem + ".csv");
    write_text(file, text);
    return file;
}

json limit_json(const IteratedLimit& l) {
    if (l.divergent) return "divergent";
    return l.value;
}

std::string limit_text(const IteratedLimit& l) { return l.divergent ? "divergent" : num(l.value); }

std::string vector_text(const std::vector<double>& v) {
    std::string s = "(";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ", ";
        s += num(v[k]);
    }
    return s + ")";
}

void check_window(int lo, int hi) {
    if (lo < 0 || hi <= lo) {
        throw Error(ErrorKind::Window, "window must satisfy 0 <= min < max, got " +
                                           std::to_string(lo) + ":" + std::to_string(hi));
    }
}

const PerturbationSpec& chosen_perturbation(const ProblemSpec& spec, const RunConfig& config,
                                            std::string& name) {
    if (config.perturb) {
        name = *config.perturb;
        return spec.perturbation(name);
    }
    if (spec.perturbations.empty()) {
        throw Error(ErrorKind::Semantic, "problem declares no perturbation; use --perturb or --michel");
    }
    name = spec.perturbations.front().name;
    return spec.perturbations.front().spec;
}

SolveReport solve_problem(const ProblemSpec& spec, const RunConfig& config, int t_prime,
                          std::ostream& out) {
    const auto sys = assemble_system(spec, t_prime, config.mode);
    SolveOptions opts;
    if (config.guess) opts.steady_seed.assign(static_cast<std::size_t>(spec.dim()), *config.guess);
    auto report = solve_truncated(sys, opts);
    out << "solve: T'=" << t_prime << " mode=" << to_string(config.mode)
        << " iterations=" << report.iterations
        << " residual=" << num(report.final_residual_norm)
        << (report.converged ? "" : " (not converged)") << "\n";
    if (!report.converged) {
        throw Error(ErrorKind::Solve, "Newton did not converge: residual " +
                                          num(report.final_residual_norm) + " after " +
                                          std::to_string(report.iterations) + " iterations");
    }
    return report;
}

Table path_table(const ProblemSpec& spec, const Path& path) {
    Table t;
    t.header.push_back("t");
    for (const auto& v : spec.vars) t.header.push_back(v);
    for (int time = 0; time <= path.horizon(); ++time) {
        std::vector<std::string> row{std::to_string(time)};
        for (int i = 0; i < path.dim(); ++i) row.push_back(num(path(time, i)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Reads a path.csv written by `solve`: header then rows t,c_1..c_n with t = 0,1,2,...
Path read_path_csv(const std::string& file, int dim) {
    std::ifstream is(file);
    if (!is) throw Error(ErrorKind::Io, "cannot open path file " + file);
    std::string line;
    int line_no = 0;
    std::vector<double> values;
    int expect_t = 0;
    bool header = true;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            if (split(line, ',').size() != static_cast<std::size_t>(dim + 1)) {
                throw Error(ErrorKind::Io, file + ":" + std::to_string(line_no) + ": expected " +
                                               std::to_string(dim + 1) + " columns");
            }
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != static_cast<std::size_t>(dim + 1)) {
            throw Error(ErrorKind::Io, file + ":" + std::to_string(line_no) + ": expected " +
                                           std::to_string(dim + 1) + " columns");
        }
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto cell = trim(cells[k]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw Error(ErrorKind::Io, file + ":" + std::to_string(line_no) +
                                               ": malformed number '" + cell + "'");
            }
            if (k == 0) {
                if (v != static_cast<double>(expect_t)) {
                    throw Error(ErrorKind::Io, file + ":" + std::to_string(line_no) +
                                                   ": expected t=" + std::to_string(expect_t));
                }
            } else {
                values.push_back(v);
            }
        }
        ++expect_t;
    }
    if (expect_t == 0) throw Error(ErrorKind::Io, "path file " + file + " has no rows");
    return Path::from_values(dim, std::move(values));
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& out) {
    const auto spec = load_problem(config.problem_file);
    if (!config.horizon) throw Error(ErrorKind::Window, "solve needs --horizon");
    const auto report = solve_problem(spec, config, *config.horizon, out);
    const auto dir = prepare_out(config);
    write_table(config, dir, "path", path_table(spec, report.path));
    json doc{{"converged", report.converged},
             {"iterations", report.iterations},
             {"residual_norm", report.final_residual_norm},
             {"horizon", *config.horizon},
             {"mode", to_string(config.mode)},
             {"tail_policy", to_string(report.tail_used)}};
    doc["steady_state"] = report.steady_state ? json(*report.steady_state) : json(nullptr);
    write_json(dir / "solve_report.json", doc);
    if (report.steady_state) out << "steady state: " << vector_text(*report.steady_state) << "\n";
    return kExitOk;
}

int cmd_check_tvc(const RunConfig& config, std::ostream& out) {
    const auto spec = load_problem(config.problem_file);
    check_window(config.window_min, config.window_max);
    const int t_prime = std::max(config.horizon.value_or(0), config.window_max);
    const auto report = solve_problem(spec, config, t_prime, out);

    BoundaryTermSeries series;
    std::string label;
    if (config.michel) {
        label = "michel(alpha=" + num(*config.michel) + ")";
        series = michel_series(spec, report.path, *config.michel, config.window_min,
                               config.window_max);
    } else {
        std::string name;
        const auto& q = chosen_perturbation(spec, config, name);
        label = name;
        series = tvc_series(spec, report.path, q, config.window_min, config.window_max);
    }
    const double threshold = default_tvc_threshold(series);
    const auto verdict = classify_tvc(series, threshold);

    const auto dir = prepare_out(config);
    Table t;
    t.header = {"T_prime", "boundary_term", "running_inf"};
    const auto inf = series.running_inf();
    for (std::size_t k = 0; k < series.entries.size(); ++k) {
        t.rows.push_back({std::to_string(series.entries[k].t_prime),
                          num(series.entries[k].value), num(inf[k])});
    }
    write_table(config, dir, "tvc_series", t);
    write_json(dir / "tvc_verdict.json",
               json{{"liminf_estimate", verdict.liminf_estimate},
                    {"limsup_estimate", verdict.limsup_estimate},
                    {"classification", to_string(verdict.classification)},
                    {"perturbation", label},
                    {"window", {config.window_min, config.window_max}},
                    {"trailing_window", {verdict.trailing_from, verdict.trailing_to}},
                    {"threshold", verdict.threshold},
                    {"drift", verdict.drift}});

    out << "perturbation " << label << " on [" << config.window_min << ", " << config.window_max
        << "]: liminf " << num(verdict.liminf_estimate) << ", limsup "
        << num(verdict.limsup_estimate) << "\n"
        << "transversality: " << to_string(verdict.classification) << "\n";
    switch (verdict.classification) {
        case TvcClass::Satisfied: return kExitOk;
        case TvcClass::Violated: return kExitViolated;
        case TvcClass::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

int cmd_diagnose(const RunConfig& config, std::ostream& out) {
    const auto spec = load_problem(config.problem_file);
    if (config.threads < 1) throw Error(ErrorKind::Window, "--threads must be >= 1");
    auto t_axis = config.t_axis;
    const int t_last = t_axis.empty() ? 0 : t_axis.back();
    std::string name;
    const auto& q = chosen_perturbation(spec, config, name);

    Reference reference = config.reference.value_or(Reference::Steady);
    Path path;
    if (reference == Reference::Steady) {
        try {
            const auto seed = config.guess
                                  ? std::vector<double>(static_cast<std::size_t>(spec.dim()),
                                                        *config.guess)
                                  : default_seed(spec);
            const auto c = steady_state(spec, seed);
            path = Path(t_last + spec.order - 1, spec.dim());
            for (int t = 0; t <= path.horizon(); ++t) {
                for (int i = 0; i < spec.dim(); ++i) path(t, i) = c[static_cast<std::size_t>(i)];
            }
            out << "reference: steady state " << vector_text(c) << "\n";
        } catch (const Error& e) {
            if (config.reference || e.kind() != ErrorKind::Solve) throw;
            out << "reference: no steady state (" << e.detail() << "), using the Euler path\n";
            reference = Reference::Euler;
        }
    }
    if (reference == Reference::Euler) {
        const int t_prime = std::max(config.horizon.value_or(0), t_last);
        path = solve_problem(spec, config, t_prime, out).path;
    }

    const auto grid = build_a_grid(spec, path, q, config.eps, t_axis, config.threads);
    const auto verdict = assess_assumptions(grid, config.tolerance);

    const auto dir = prepare_out(config);
    Table t;
    t.header.push_back("T_prime");
    for (double e : grid.eps_values) t.header.push_back(num(e));
    for (std::size_t r = 0; r < grid.t_values.size(); ++r) {
        std::vector<std::string> row{std::to_string(grid.t_values[r])};
        for (std::size_t c = 0; c < grid.eps_values.size(); ++c) row.push_back(num(grid.a(r, c)));
        t.rows.push_back(std::move(row));
    }
    if (config.format == OutputFormat::Json) {
        json doc{{"eps", grid.eps_values}, {"T_prime", grid.t_values}};
        json rows = json::array();
        for (std::size_t r = 0; r < grid.t_values.size(); ++r) {
            const auto row = grid.a.row(r);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        doc["A"] = rows;
        write_json(dir / "a_grid.json", doc);
    } else {
        write_table(config, dir, "a_grid", t);
    }

    json columns = json::array();
    for (std::size_t c = 0; c < grid.eps_values.size(); ++c) {
        columns.push_back({{"eps", grid.eps_values[c]},
                           {"limit", limit_json(verdict.column_limits[c])},
                           {"exact_derivative", static_cast<bool>(grid.exact_column[c])}});
    }
    json rows = json::array();
    json defect = json::array();
    for (std::size_t r = 0; r < grid.t_values.size(); ++r) {
        rows.push_back({{"T_prime", grid.t_values[r]}, {"limit", limit_json(verdict.row_limits[r])}});
        defect.push_back({{"T_prime", grid.t_values[r]}, {"value", verdict.uniformity_defect[r]}});
    }
    write_json(dir / "assumption_verdict.json",
               json{{"L1", limit_json(verdict.l1)},
                    {"L2", limit_json(verdict.l2)},
                    {"classification", to_string(verdict.classification)},
                    {"tolerance", verdict.tolerance},
                    {"perturbation", name},
                    {"reference", reference == Reference::Steady ? "steady" : "euler"},
                    {"reading", "uniform-in-eps convergence of V(eps,T)/eps as T -> infinity"},
                    {"column_limits", columns},
                    {"row_limits", rows},
                    {"uniformity_defect", defect}});

    out << "L1 (eps->0 of T->inf) = " << limit_text(verdict.l1) << "\n"
        << "L2 (T->inf of eps->0) = " << limit_text(verdict.l2) << "\n"
        << "assumption: " << to_string(verdict.classification) << "\n";
    switch (verdict.classification) {
        case AssumptionClass::Uniform: return kExitOk;
        case AssumptionClass::NonUniform: return kExitViolated;
        case AssumptionClass::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
    const auto spec = load_problem(config.problem_file);
    if (config.path_files.size() != 2) {
        throw Error(ErrorKind::Io, "compare needs exactly two path files");
    }
    const auto first = read_path_csv(config.path_files[0], spec.dim());
    const auto second = read_path_csv(config.path_files[1], spec.dim());
    const int common = std::min(first.horizon(), second.horizon());
    const int t_max = common - spec.order + 1;
    if (t_max < 0) {
        throw Error(ErrorKind::Window, "paths are shorter than one stage window");
    }
    if (first.horizon() != second.horizon()) {
        out << "note: path lengths differ (" << first.length() << " vs " << second.length()
            << "); comparing over t=0.." << common << "\n";
    }
    const auto cmp =
        overtaking_compare(spec, first.truncated(common), second.truncated(common), t_max);

    const auto dir = prepare_out(config);
    Table t;
    t.header = {"T_prime", "D"};
    for (std::size_t k = 0; k < cmp.d.size(); ++k) {
        t.rows.push_back({std::to_string(k), num(cmp.d[k])});
    }
    write_table(config, dir, "overtaking", t);
    out << "D(" << t_max << ") = " << num(cmp.d.back()) << ", margin " << num(cmp.margin) << "\n"
        << "verdict: " << to_string(cmp.verdict) << "\n";
    return kExitOk;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == "solve") return cmd_solve(config, out);
        if (config.command == "check-tvc") return cmd_check_tvc(config, out);
        if (config.command == "diagnose") return cmd_diagnose(config, out);
        if (config.command == "compare") return cmd_compare(config, out);
        err << "error: unknown command '" << config.command << "'\n";
        return kExitError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

namespace {

std::pair<int, int> parse_window(const std::string& text) {
    const auto colon = text.find(':');
    int lo = 0;
    int hi = 0;
    const char* end = text.data() + text.size();
    if (colon == std::string::npos ||
        std::from_chars(text.data(), text.data() + colon, lo).ptr != text.data() + colon ||
        std::from_chars(text.data() + colon + 1, end, hi).ptr != end) {
        throw Error(ErrorKind::Window, "--window expects <min>:<max>, got '" + text + "'");
    }
    return {lo, hi};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler paths, transversality checks and limit-interchange diagnostics"};
    app.require_subcommand(1);
    RunConfig config;
    std::string window;
    std::string mode = "free-initial";
    std::string format = "csv";
    std::string reference;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("problem", config.problem_file, "problem file")->required();
        sub->add_option("--mode", mode, "free-initial or pinned-initial")
            ->check(CLI::IsMember({"free-initial", "pinned-initial"}));
        sub->add_option("--out", config.out_dir, "output directory");
        sub->add_option("--format", format, "tabular artifacts as csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--guess", config.guess, "steady-state seed for every component");
    };

    auto* solve = app.add_subcommand("solve", "solve the truncated Euler system");
    common(solve);
    solve->add_option("--horizon", config.horizon, "truncation T'")->required();

    auto* tvc = app.add_subcommand("check-tvc", "boundary-term series and transversality verdict");
    common(tvc);
    tvc->add_option("--horizon", config.horizon, "truncation T' (at least the window max)");
    tvc->add_option("--window", window, "T' window <min>:<max>");
    auto* perturb_opt = tvc->add_option("--perturb", config.perturb, "perturbation name");
    tvc->add_option("--michel", config.michel, "use q = alpha * c*")->excludes(perturb_opt);

    auto* diag = app.add_subcommand("diagnose", "A(T', eps) grid and iterated limits");
    common(diag);
    diag->add_option("--horizon", config.horizon, "truncation T' for the Euler reference");
    diag->add_option("--eps", config.eps, "comma list of decreasing eps")->delimiter(',');
    diag->add_option("--T-axis", config.t_axis, "comma list of increasing T'")->delimiter(',');
    diag->add_option("--perturb", config.perturb, "perturbation name");
    diag->add_option("--threads", config.threads, "grid worker threads");
    diag->add_option("--reference", reference, "steady or euler")
        ->check(CLI::IsMember({"steady", "euler"}));
    diag->add_option("--tol", config.tolerance, "tolerance on |L1 - L2|");

    auto* cmp = app.add_subcommand("compare", "overtaking comparison of two path files");
    common(cmp);
    cmp->add_option("paths", config.path_files, "two path CSV files")->expected(2)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (!window.empty()) std::tie(config.window_min, config.window_max) = parse_window(window);
        config.mode = parse_mode(mode);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    config.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (!reference.empty()) {
        config.reference = reference == "euler" ? Reference::Euler : Reference::Steady;
    }
    config.command = app.get_subcommands().front()->get_name();
    return run(config, std::cout, std::cerr);
}

}  // namespace tvckit::cli

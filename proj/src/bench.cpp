#include "fbsplit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "CLI11.hpp"

namespace fbsplit {

namespace {

double parse_strict_double(const std::string& token, const std::string& what) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": cannot parse '" + token + "' as a number");
    }
    if (pos != token.size()) {
        throw std::invalid_argument(what + ": trailing junk in '" + token + "'");
    }
    return value;
}

ProblemInstance make_example1() {
    ForwardMap forward(
        [](const Vector& x) { return Vector(2.0 * x.raw() + Eigen::VectorXd::Ones(x.dim())); },
        2.0, [](const Vector& w, const Vector& y) { return Vector(2.0 * (w.raw() - y.raw())); });
    ResolventFamily resolvent(
        [](double gamma, const Vector& v) { return Vector(v.raw() / (1.0 + 5.0 * gamma)); });
    return ProblemInstance(std::move(forward), std::move(resolvent), 10,
                           Vector::constant(10, -1.0 / 7.0));
}

ProblemInstance make_example2() {
    ForwardMap forward([](const Vector& x) { return example2_gradient(x); }, 2.0,
                       [](const Vector& w, const Vector& y) {
                           return Vector(2.0 * (w.raw() - y.raw()));
                       });
    ResolventFamily resolvent(
        [](double gamma, const Vector& v) { return soft_threshold(v, gamma); });
    return ProblemInstance(std::move(forward), std::move(resolvent), 2, Vector{-1.0, -2.0},
                           [](const Vector& x) { return example2_objective(x); }, -5.0);
}

// First-order conditions of min 0.5 x'Mx + c'x + |x|_1 at x: with r = Mx + c,
// r_i = -sign(x_i) on the support and |r_i| <= 1 elsewhere.
bool quadratic_l1_optimal(const Eigen::MatrixXd& m, const Eigen::VectorXd& c,
                          const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = m * x + c;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) != 0.0) {
            if (std::abs(r(i) + (x(i) > 0.0 ? 1.0 : -1.0)) > 1e-9) return false;
        } else if (std::abs(r(i)) > 1.0 + 1e-9) {
            return false;
        }
    }
    return true;
}

/*
 * Reference solution: a long unchecked forward-backward-forward run pins down
 * the sign pattern, then the reduced linear system on the active coordinates
 * gives the solution to machine precision. The threshold separating active
 * from zero coordinates is swept in case the iterate sits near a boundary.
 */
Vector solve_quadratic_l1(const Eigen::MatrixXd& m, const Eigen::VectorXd& c,
                          const ProblemInstance& bare) {
    SolverOptions warm;
    warm.checked = false;
    warm.max_iters = 200000;
    warm.residual_tol = 1e-11;
    warm.start = Vector::zeros(m.rows());
    Solver polish(bare, Algorithm::Tseng, warm);
    polish.run();
    const Eigen::VectorXd guess = polish.state().x_curr.raw();
    const double scale = std::max(1.0, guess.lpNorm<Eigen::Infinity>());

    for (double tau : {1e-6, 1e-4, 1e-2, 1e-8}) {
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < guess.size(); ++i) {
            if (std::abs(guess(i)) > tau * scale) support.push_back(i);
        }
        Eigen::VectorXd candidate = Eigen::VectorXd::Zero(guess.size());
        if (!support.empty()) {
            const auto k = static_cast<Eigen::Index>(support.size());
            Eigen::MatrixXd msub(k, k);
            Eigen::VectorXd rhs(k);
            for (Eigen::Index a = 0; a < k; ++a) {
                rhs(a) = -(c(support[a]) + (guess(support[a]) > 0.0 ? 1.0 : -1.0));
                for (Eigen::Index b = 0; b < k; ++b) msub(a, b) = m(support[a], support[b]);
            }
            Eigen::LLT<Eigen::MatrixXd> llt(msub);
            if (llt.info() != Eigen::Success) continue;
            const Eigen::VectorXd xs = llt.solve(rhs);
            for (Eigen::Index a = 0; a < k; ++a) candidate(support[a]) = xs(a);
        }
        if (quadratic_l1_optimal(m, c, candidate)) return Vector(candidate);
    }
    throw std::runtime_error("random-quadratic-l1: reference solve failed optimality checks");
}

}  // namespace

const std::vector<std::string>& problem_ids() {
    static const std::vector<std::string> ids = {"example1", "example2", "random-quadratic-l1"};
    return ids;
}

ProblemInstance make_random_quadratic_l1(int dim, unsigned seed) {
    if (dim < 2) throw std::invalid_argument("random-quadratic-l1: dim must be at least 2");
    std::mt19937 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd factor(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) factor(r, c) = normal(gen);
    }
    const Eigen::MatrixXd m =
        factor.transpose() * factor + 0.1 * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd c(dim);
    for (Eigen::Index i = 0; i < dim; ++i) c(i) = normal(gen);

    const double lipschitz =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .maxCoeff();
    ForwardMap forward([m, c](const Vector& x) { return Vector(m * x.raw() + c); }, lipschitz,
                       [m](const Vector& w, const Vector& y) {
                           return Vector(m * (w.raw() - y.raw()));
                       });
    ResolventFamily resolvent(
        [](double gamma, const Vector& v) { return soft_threshold(v, gamma); });
    auto objective = [m, c](const Vector& x) {
        return 0.5 * x.raw().dot(m * x.raw()) + c.dot(x.raw()) + x.raw().lpNorm<1>();
    };

    const ProblemInstance bare(forward, resolvent, dim);
    Vector solution = solve_quadratic_l1(m, c, bare);
    const double optimum = objective(solution);
    return ProblemInstance(std::move(forward), std::move(resolvent), dim, std::move(solution),
                           std::move(objective), optimum);
}

ProblemInstance registry_lookup(const std::string& problem_id, const RegistryOptions& opts) {
    if (problem_id == "example1") return make_example1();
    if (problem_id == "example2") return make_example2();
    if (problem_id == "random-quadratic-l1") return make_random_quadratic_l1(opts.dim, opts.seed);
    std::ostringstream msg;
    msg << "unknown problem '" << problem_id << "'; valid ids:";
    for (const auto& id : problem_ids()) msg << " " << id;
    throw std::invalid_argument(msg.str());
}

const std::vector<std::pair<std::string, Vector>>& start_presets() {
    static const std::vector<std::pair<std::string, Vector>> presets = {
        {"start1", Vector{0.6787, 0.7577}},
        {"start2", Vector{-0.6739, -0.2305}},
        {"start3", Vector{0.4218, -0.9157}},
        {"start4", Vector{-0.9575, 0.9649}},
    };
    return presets;
}

Vector resolve_start(const std::string& spec, Eigen::Index dim) {
    if (spec == "ones") return Vector::ones(dim);
    if (spec == "zeros") return Vector::zeros(dim);
    for (const auto& [name, point] : start_presets()) {
        if (spec == name) {
            if (dim != point.dim()) {
                throw std::invalid_argument("start point " + name + " has dimension " +
                                            std::to_string(point.dim()) +
                                            ", problem has dimension " + std::to_string(dim));
            }
            return point;
        }
    }
    if (spec.find_first_of("0123456789.-+") != 0) {
        throw std::invalid_argument("unrecognized start spec '" + spec +
                                    "': expected ones, zeros, a preset name, or a "
                                    "comma-separated coordinate list");
    }
    std::vector<double> coords;
    std::stringstream stream(spec);
    std::string token;
    while (std::getline(stream, token, ',')) {
        coords.push_back(parse_strict_double(token, "start spec"));
    }
    if (static_cast<Eigen::Index>(coords.size()) != dim) {
        throw std::invalid_argument("start spec '" + spec + "' has " +
                                    std::to_string(coords.size()) +
                                    " coordinates, problem has dimension " + std::to_string(dim));
    }
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = coords[static_cast<std::size_t>(i)];
    return Vector(v);
}

namespace {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void append_optional(std::string& line, const std::optional<double>& value) {
    line += ',';
    if (value) line += format_g17(*value);
}

std::optional<double> parse_optional(const std::string& token, const std::string& what) {
    if (token.empty()) return std::nullopt;
    return parse_strict_double(token, what);
}

}  // namespace

void write_trace(std::ostream& out, const std::vector<IterationRecord>& records) {
    out << kTraceHeader << '\n';
    for (const IterationRecord& rec : records) {
        std::string line = std::to_string(rec.n);
        append_optional(line, rec.err_x);
        append_optional(line, rec.err_obj);
        line += ',';
        line += format_g17(rec.gamma);
        line += ',';
        line += format_g17(rec.alpha);
        line += ',';
        line += format_g17(rec.residual);
        append_optional(line, rec.elapsed_ms);
        out << line << '\n';
    }
}

std::string format_trace(const std::vector<IterationRecord>& records) {
    std::ostringstream out;
    write_trace(out, records);
    return out.str();
}

void emit_trace(const std::vector<IterationRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace output path: " + path);
    write_trace(out, records);
    out.flush();
    if (!out) throw std::runtime_error("write failure on trace output path: " + path);
}

std::vector<IterationRecord> parse_trace_stream(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trace parse: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceHeader) throw std::runtime_error("trace parse: unexpected header '" + line + "'");

    std::vector<IterationRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields;
        std::string field;
        std::stringstream row(line);
        while (std::getline(row, field, ',')) fields.push_back(field);
        // getline drops a trailing empty field, which an absent elapsed_ms produces
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() != 7) {
            throw std::runtime_error("trace parse: expected 7 fields, got " +
                                     std::to_string(fields.size()) + " in '" + line + "'");
        }
        IterationRecord rec;
        rec.n = static_cast<int>(parse_strict_double(fields[0], "trace n"));
        rec.err_x = parse_optional(fields[1], "trace err_x");
        rec.err_obj = parse_optional(fields[2], "trace err_obj");
        rec.gamma = parse_strict_double(fields[3], "trace gamma");
        rec.alpha = parse_strict_double(fields[4], "trace alpha");
        rec.residual = parse_strict_double(fields[5], "trace residual");
        rec.elapsed_ms = parse_optional(fields[6], "trace elapsed_ms");
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<IterationRecord> parse_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return parse_trace_stream(in);
}

InertiaPolicy make_inertia(const std::string& spec, Algorithm alg) {
    if (spec == "default") {
        switch (alg) {
            case Algorithm::Ihpa: return InertiaPolicy::fista_like();
            case Algorithm::Ispa:
            case Algorithm::Lpfb: return InertiaPolicy::default_adaptive();
            default: return InertiaPolicy::none();
        }
    }
    if (spec == "none") return InertiaPolicy::none();
    if (spec == "fista") return InertiaPolicy::fista_like();
    if (spec == "adaptive") return InertiaPolicy::default_adaptive();
    const std::string adaptive_prefix = "adaptive:";
    if (spec.rfind(adaptive_prefix, 0) == 0) {
        const double alpha = parse_strict_double(spec.substr(adaptive_prefix.size()), "inertia alpha");
        return InertiaPolicy::adaptive(alpha,
                                       [](int n) { return 1.0 / ((n + 1.0) * (n + 1.0)); });
    }
    const std::string const_prefix = "const:";
    if (spec.rfind(const_prefix, 0) == 0) {
        const double alpha = parse_strict_double(spec.substr(const_prefix.size()), "inertia alpha");
        if (!(alpha >= 0.0) || !(alpha < 1.0)) {
            throw std::invalid_argument("inertia const:" + spec.substr(const_prefix.size()) +
                                        " outside [0,1)");
        }
        return InertiaPolicy::sequence([alpha](int) { return alpha; });
    }
    throw std::invalid_argument("unrecognized inertia spec '" + spec +
                                "'; expected default, none, fista, adaptive[:alpha], or const:alpha");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const std::optional<Algorithm> alg = algorithm_from_id(cfg.algorithm);
    if (!alg) {
        std::ostringstream msg;
        msg << "unknown algorithm '" << cfg.algorithm << "'; valid ids:";
        for (const auto& id : algorithm_ids()) msg << " " << id;
        throw std::invalid_argument(msg.str());
    }
    RegistryOptions ropts;
    ropts.dim = cfg.dim;
    ropts.seed = cfg.seed;
    const ProblemInstance problem = registry_lookup(cfg.problem, ropts);

    SolverOptions opts;
    opts.max_iters = cfg.max_iters;
    opts.residual_tol = cfg.residual_tol;
    opts.start = resolve_start(cfg.x0, problem.dim);
    opts.stepsize = StepsizePolicy(cfg.gamma0, cfg.mu);
    opts.inertia = make_inertia(cfg.inertia, *alg);
    opts.checked = cfg.checked;

    Solver solver(problem, *alg, opts);
    ExperimentResult result;
    result.config = cfg;
    if (cfg.checked) {
        solver.run();
    } else {
        const auto t0 = std::chrono::steady_clock::now();
        solver.run();
        result.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    }
    result.trace = solver.state().trace;
    if (!cfg.out.empty()) emit_trace(result.trace, cfg.out);
    return result;
}

nlohmann::ordered_json summary_entry(const ExperimentResult& result) {
    nlohmann::ordered_json config;
    config["problem"] = result.config.problem;
    config["algorithm"] = result.config.algorithm;
    config["max_iters"] = result.config.max_iters;
    config["x0"] = result.config.x0;
    config["gamma0"] = result.config.gamma0;
    config["mu"] = result.config.mu;
    config["inertia"] = result.config.inertia;
    config["seed"] = result.config.seed;
    config["dim"] = result.config.dim;
    config["checked"] = result.config.checked;

    nlohmann::ordered_json entry;
    entry["config"] = std::move(config);
    entry["final_err_obj"] = nullptr;
    entry["final_err_x"] = nullptr;
    if (!result.trace.empty()) {
        const IterationRecord& last = result.trace.back();
        if (last.err_obj) entry["final_err_obj"] = *last.err_obj;
        if (last.err_x) entry["final_err_x"] = *last.err_x;
    }
    entry["iterations"] = result.trace.size();
    entry["wall_ms"] = nullptr;
    if (result.wall_ms) entry["wall_ms"] = *result.wall_ms;
    return entry;
}

double error_at(const std::vector<IterationRecord>& trace, int n) {
    if (n < 1 || static_cast<std::size_t>(n) > trace.size()) {
        throw std::out_of_range("trace has no iteration " + std::to_string(n));
    }
    const IterationRecord& rec = trace[static_cast<std::size_t>(n - 1)];
    if (rec.n != n) throw std::logic_error("trace rows are not contiguous");
    if (rec.err_obj) return *rec.err_obj;
    if (rec.err_x) return *rec.err_x;
    throw std::runtime_error("trace records no error metric at iteration " + std::to_string(n));
}

namespace {

std::string pad(const std::string& text, std::size_t width) {
    std::string out = text;
    while (out.size() < width) out += ' ';
    return out;
}

std::string format_cell(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", value);
    return buf;
}

void validate_table_spec(const TableSpec& spec) {
    if (spec.algorithms.empty()) throw std::invalid_argument("table spec: no algorithms");
    if (spec.checkpoints.empty()) throw std::invalid_argument("table spec: no checkpoints");
    if (spec.checkpoints.front() < 1) {
        throw std::invalid_argument("table spec: checkpoints must be >= 1");
    }
    for (std::size_t i = 1; i < spec.checkpoints.size(); ++i) {
        if (spec.checkpoints[i] <= spec.checkpoints[i - 1]) {
            throw std::invalid_argument("table spec: checkpoints must be strictly increasing");
        }
    }
}

ExperimentConfig table_run_config(const TableSpec& spec, const std::string& algorithm,
                                  const std::string& start) {
    ExperimentConfig cfg;
    cfg.problem = spec.problem;
    cfg.algorithm = algorithm;
    cfg.max_iters = spec.checkpoints.back();
    cfg.x0 = start;
    cfg.gamma0 = spec.gamma0;
    cfg.mu = spec.mu;
    cfg.seed = spec.seed;
    cfg.dim = spec.dim;
    cfg.checked = spec.checked;
    return cfg;
}

std::string start_label(const std::string& spec) {
    for (const auto& [name, point] : start_presets()) {
        if (spec != name) continue;
        std::string label = name + " (";
        for (Eigen::Index i = 0; i < point.dim(); ++i) {
            if (i) label += ", ";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", point[i]);
            label += buf;
        }
        return label + ")";
    }
    return spec;
}

BenchTable checkpoint_grid(std::string title, const std::vector<int>& checkpoints,
                           const std::vector<std::string>& algorithms,
                           const std::vector<const ExperimentResult*>& runs) {
    BenchTable table;
    table.title = std::move(title);
    table.row_header = "n";
    for (int n : checkpoints) table.row_labels.push_back(std::to_string(n));
    table.columns = algorithms;
    table.cells.assign(checkpoints.size(), std::vector<double>(algorithms.size(), 0.0));
    for (std::size_t r = 0; r < checkpoints.size(); ++r) {
        for (std::size_t c = 0; c < algorithms.size(); ++c) {
            table.cells[r][c] = error_at(runs[c]->trace, checkpoints[r]);
        }
    }
    return table;
}

}  // namespace

std::string BenchTable::render() const {
    std::size_t label_width = row_header.size();
    for (const auto& label : row_labels) label_width = std::max(label_width, label.size());
    label_width += 2;
    constexpr std::size_t cell_width = 12;

    std::ostringstream out;
    if (!title.empty()) out << title << '\n';
    out << pad(row_header, label_width);
    for (const auto& column : columns) out << pad(column, cell_width);
    out << '\n';
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        out << pad(row_labels[r], label_width);
        for (std::size_t c = 0; c < columns.size(); ++c) out << pad(format_cell(cells[r][c]), cell_width);
        out << '\n';
    }
    return out.str();
}

nlohmann::ordered_json BenchTable::to_json() const {
    nlohmann::ordered_json doc;
    doc["title"] = title;
    doc["row_header"] = row_header;
    doc["rows"] = row_labels;
    doc["columns"] = columns;
    doc["cells"] = cells;
    return doc;
}

TableResult make_checkpoint_table(const TableSpec& spec, const std::string& start) {
    validate_table_spec(spec);
    TableResult result;
    for (const auto& algorithm : spec.algorithms) {
        result.runs.push_back(run_experiment(table_run_config(spec, algorithm, start)));
    }
    std::vector<const ExperimentResult*> run_ptrs;
    for (const auto& run : result.runs) run_ptrs.push_back(&run);
    result.table = checkpoint_grid(spec.problem + " error by iteration from " + start_label(start),
                                   spec.checkpoints, spec.algorithms, run_ptrs);
    return result;
}

TableResult make_start_table(const TableSpec& spec) {
    validate_table_spec(spec);
    if (spec.starts.empty()) throw std::invalid_argument("table spec: no start points");
    const int n_final = spec.checkpoints.back();

    TableResult result;
    result.table.title =
        spec.problem + " error at n=" + std::to_string(n_final) + " by start point";
    result.table.row_header = "x0";
    result.table.columns = spec.algorithms;
    result.table.cells.assign(spec.starts.size(),
                              std::vector<double>(spec.algorithms.size(), 0.0));
    for (std::size_t r = 0; r < spec.starts.size(); ++r) {
        result.table.row_labels.push_back(start_label(spec.starts[r]));
        for (std::size_t c = 0; c < spec.algorithms.size(); ++c) {
            result.runs.push_back(
                run_experiment(table_run_config(spec, spec.algorithms[c], spec.starts[r])));
            result.table.cells[r][c] = error_at(result.runs.back().trace, n_final);
        }
    }
    return result;
}

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path: " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failure on output path: " + path.string());
}

void write_table_files(const std::filesystem::path& dir, const std::string& stem,
                       const BenchTable& table, std::ostream& log) {
    write_text_file(dir / (stem + ".txt"), table.render());
    write_text_file(dir / (stem + ".json"), table.to_json().dump(2) + "\n");
    log << "wrote " << (dir / (stem + ".txt")).string() << " and .json\n";
}

}  // namespace

int run_suite(const std::string& outdir, bool checked, std::ostream& log) {
    namespace fs = std::filesystem;
    const fs::path root(outdir);
    fs::create_directories(root / "traces");

    nlohmann::ordered_json summary = nlohmann::ordered_json::array();

    // The linear 10-dimensional problem: every algorithm from the all-ones start.
    for (const auto& alg : algorithm_ids()) {
        ExperimentConfig cfg;
        cfg.problem = "example1";
        cfg.algorithm = alg;
        cfg.max_iters = 100;
        cfg.x0 = "ones";
        cfg.checked = checked;
        cfg.out = (root / "traces" / ("example1_" + alg + ".csv")).string();
        summary.push_back(summary_entry(run_experiment(cfg)));
        log << "wrote " << cfg.out << '\n';
    }

    // The l1-regularized 2-d problem: four algorithms from four start points;
    // the same runs feed both bundled tables.
    TableSpec tspec;
    tspec.checked = checked;
    TableResult start_table = make_start_table(tspec);
    for (std::size_t r = 0; r < tspec.starts.size(); ++r) {
        for (std::size_t c = 0; c < tspec.algorithms.size(); ++c) {
            const ExperimentResult& run = start_table.runs[r * tspec.algorithms.size() + c];
            const std::string name =
                "example2_" + tspec.algorithms[c] + "_" + tspec.starts[r] + ".csv";
            emit_trace(run.trace, (root / "traces" / name).string());
            summary.push_back(summary_entry(run));
            log << "wrote " << (root / "traces" / name).string() << '\n';
        }
    }
    std::vector<const ExperimentResult*> start1_runs;
    for (std::size_t c = 0; c < tspec.algorithms.size(); ++c) {
        start1_runs.push_back(&start_table.runs[c]);
    }
    const BenchTable table1 =
        checkpoint_grid(tspec.problem + " error by iteration from " + start_label("start1"),
                        tspec.checkpoints, tspec.algorithms, start1_runs);
    write_table_files(root, "table1", table1, log);
    write_table_files(root, "table2", start_table.table, log);

    // Remaining baselines on the l1 problem, first start point only.
    for (const std::string alg : {"tseng", "lpfb"}) {
        ExperimentConfig cfg;
        cfg.problem = "example2";
        cfg.algorithm = alg;
        cfg.max_iters = 500;
        cfg.x0 = "start1";
        cfg.checked = checked;
        cfg.out = (root / "traces" / ("example2_" + alg + "_start1.csv")).string();
        summary.push_back(summary_entry(run_experiment(cfg)));
        log << "wrote " << cfg.out << '\n';
    }

    // A seeded random instance for the two projection algorithms.
    for (const std::string alg : {"ihpa", "ispa"}) {
        ExperimentConfig cfg;
        cfg.problem = "random-quadratic-l1";
        cfg.algorithm = alg;
        cfg.max_iters = 200;
        cfg.x0 = "ones";
        cfg.checked = checked;
        cfg.out = (root / "traces" / ("random_" + alg + ".csv")).string();
        summary.push_back(summary_entry(run_experiment(cfg)));
        log << "wrote " << cfg.out << '\n';
    }

    write_text_file(root / "summary.json", summary.dump(2) + "\n");
    log << "wrote " << (root / "summary.json").string() << '\n';
    log << "suite complete: " << summary.size() << " runs\n";
    return 0;
}

int run_check(int instances, int iters, unsigned seed0, int dim, std::ostream& log) {
    if (instances < 0) throw std::invalid_argument("check: instances must be nonnegative");
    if (iters < 1) throw std::invalid_argument("check: iters must be positive");

    std::vector<std::pair<std::string, ProblemInstance>> problems;
    problems.emplace_back("example1", registry_lookup("example1"));
    problems.emplace_back("example2", registry_lookup("example2"));
    for (int k = 0; k < instances; ++k) {
        RegistryOptions opts;
        opts.dim = dim;
        opts.seed = seed0 + static_cast<unsigned>(k);
        problems.emplace_back("random-quadratic-l1(seed=" + std::to_string(opts.seed) + ")",
                              registry_lookup("random-quadratic-l1", opts));
    }

    int failures = 0;
    for (const auto& [name, problem] : problems) {
        for (Algorithm alg : {Algorithm::Ihpa, Algorithm::Ispa}) {
            try {
                SolverOptions opts;
                opts.max_iters = iters;
                opts.checked = true;
                Solver solver(problem, alg, opts);
                solver.run();
                log << "ok   " << to_string(alg) << " on " << name << " (" << iters
                    << " iterations)\n";
            } catch (const std::exception& e) {
                ++failures;
                log << "FAIL " << to_string(alg) << " on " << name << ": " << e.what() << '\n';
            }
        }
    }
    if (failures > 0) {
        log << failures << " invariant failure(s)\n";
        return 1;
    }
    log << "all invariant checks passed\n";
    return 0;
}

namespace {

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config parse failure in " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("config root must be an object: " + path);

    static const std::vector<std::string> known = {"problem", "algorithm", "max_iters",    "x0",
                                                   "gamma0",  "mu",        "inertia",      "seed",
                                                   "dim",     "checked",   "residual_tol", "out"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("config key '" + key + "' is not recognized");
        }
    }
    ExperimentConfig cfg;
    try {
        if (doc.contains("problem")) cfg.problem = doc["problem"].get<std::string>();
        if (doc.contains("algorithm")) cfg.algorithm = doc["algorithm"].get<std::string>();
        if (doc.contains("max_iters")) cfg.max_iters = doc["max_iters"].get<int>();
        if (doc.contains("x0")) cfg.x0 = doc["x0"].get<std::string>();
        if (doc.contains("gamma0")) cfg.gamma0 = doc["gamma0"].get<double>();
        if (doc.contains("mu")) cfg.mu = doc["mu"].get<double>();
        if (doc.contains("inertia")) cfg.inertia = doc["inertia"].get<std::string>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<unsigned>();
        if (doc.contains("dim")) cfg.dim = doc["dim"].get<int>();
        if (doc.contains("checked")) cfg.checked = doc["checked"].get<bool>();
        if (doc.contains("residual_tol")) cfg.residual_tol = doc["residual_tol"].get<double>();
        if (doc.contains("out")) cfg.out = doc["out"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config type error in " + path + ": " + e.what());
    }
    return cfg;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Splitting-method benchmark for monotone inclusions 0 in F(x)+G(x)"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run one experiment, optionally writing its trace CSV");
    ExperimentConfig flags;
    std::string config_path;
    double residual_tol = 0.0;
    bool run_unchecked = false;
    run_cmd->add_option("--config", config_path,
                        "JSON file supplying defaults; explicit flags override");
    run_cmd->add_option("--problem", flags.problem, "problem id")
        ->check(CLI::IsMember(problem_ids()));
    run_cmd->add_option("--algorithm", flags.algorithm, "algorithm id")
        ->check(CLI::IsMember(algorithm_ids()));
    run_cmd->add_option("--max-iters", flags.max_iters, "iteration budget")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--x0", flags.x0, "start: ones, zeros, start1..start4, or coordinates");
    run_cmd->add_option("--gamma0", flags.gamma0, "initial stepsize")->check(CLI::PositiveNumber);
    run_cmd->add_option("--mu", flags.mu, "stepsize safety factor in (0,1)");
    run_cmd->add_option("--inertia", flags.inertia,
                        "default|none|fista|adaptive[:alpha]|const:alpha");
    run_cmd->add_option("--residual-tol", residual_tol, "optional early stop on the residual")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--seed", flags.seed, "seed for random problems");
    run_cmd->add_option("--dim", flags.dim, "dimension for random problems");
    run_cmd->add_flag("--unchecked", run_unchecked,
                      "disable invariant checks and record per-iteration timings");
    run_cmd->add_option("--out", flags.out, "trace CSV path");

    auto* table_cmd = app.add_subcommand("table", "Rebuild one of the bundled benchmark tables");
    std::string which = "table1";
    std::string table_out;
    bool table_unchecked = false;
    table_cmd->add_option("--which", which, "table1 (by iteration) or table2 (by start point)")
        ->check(CLI::IsMember(std::vector<std::string>{"table1", "table2"}));
    table_cmd->add_option("--out", table_out, "directory for <which>.txt and <which>.json");
    table_cmd->add_flag("--unchecked", table_unchecked, "disable invariant checks");

    auto* suite_cmd =
        app.add_subcommand("suite", "Run the full benchmark battery into a directory");
    std::string outdir = "bench_out";
    bool suite_unchecked = false;
    suite_cmd->add_option("--outdir", outdir, "output directory");
    suite_cmd->add_flag("--unchecked", suite_unchecked,
                        "disable invariant checks and record timings (output is then "
                        "not byte-reproducible)");

    auto* check_cmd =
        app.add_subcommand("check", "Run the invariant battery over example and random problems");
    int instances = 5;
    int check_iters = 200;
    int check_dim = 10;
    unsigned check_seed = 1;
    check_cmd->add_option("--instances", instances, "number of random instances")
        ->check(CLI::Range(0, 64));
    check_cmd->add_option("--iters", check_iters, "iterations per run")->check(CLI::Range(1, 100000));
    check_cmd->add_option("--seed", check_seed, "seed of the first random instance");
    check_cmd->add_option("--dim", check_dim, "dimension of random instances")
        ->check(CLI::Range(2, 64));

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("fbsplit");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(argv_storage.size());
    for (const auto& arg : argv_storage) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed()) {
            ExperimentConfig cfg;
            if (!config_path.empty()) cfg = load_config_file(config_path);
            if (run_cmd->count("--problem")) cfg.problem = flags.problem;
            if (run_cmd->count("--algorithm")) cfg.algorithm = flags.algorithm;
            if (run_cmd->count("--max-iters")) cfg.max_iters = flags.max_iters;
            if (run_cmd->count("--x0")) cfg.x0 = flags.x0;
            if (run_cmd->count("--gamma0")) cfg.gamma0 = flags.gamma0;
            if (run_cmd->count("--mu")) cfg.mu = flags.mu;
            if (run_cmd->count("--inertia")) cfg.inertia = flags.inertia;
            if (run_cmd->count("--residual-tol")) cfg.residual_tol = residual_tol;
            if (run_cmd->count("--seed")) cfg.seed = flags.seed;
            if (run_cmd->count("--dim")) cfg.dim = flags.dim;
            if (run_cmd->count("--unchecked")) cfg.checked = false;
            if (run_cmd->count("--out")) cfg.out = flags.out;

            const ExperimentResult result = run_experiment(cfg);
            std::cout << "ran " << cfg.algorithm << " on " << cfg.problem << ": "
                      << result.trace.size() << " iterations";
            if (!result.trace.empty()) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.6g",
                              error_at(result.trace, static_cast<int>(result.trace.size())));
                std::cout << ", final error " << buf;
            }
            if (!cfg.out.empty()) std::cout << ", trace -> " << cfg.out;
            std::cout << '\n';
            return 0;
        }
        if (table_cmd->parsed()) {
            TableSpec spec;
            spec.checked = !table_unchecked;
            const TableResult result = (which == "table1") ? make_checkpoint_table(spec, "start1")
                                                           : make_start_table(spec);
            std::cout << result.table.render();
            if (!table_out.empty()) {
                std::filesystem::create_directories(table_out);
                write_table_files(table_out, which, result.table, std::cout);
            }
            return 0;
        }
        if (suite_cmd->parsed()) return run_suite(outdir, !suite_unchecked, std::cout);
        if (check_cmd->parsed()) {
            return run_check(instances, check_iters, check_seed, check_dim, std::cout);
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace fbsplit

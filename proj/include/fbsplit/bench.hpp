#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fbsplit/operators.hpp"
#include "fbsplit/solvers.hpp"
#include "json.hpp"

namespace fbsplit {

/** Knobs of the randomized problem family; ignored by the fixed instances. */
struct RegistryOptions {
    int dim = 10;
    unsigned seed = 42;
};

/** Ids accepted by registry_lookup, in a stable order for error messages. */
const std::vector<std::string>& problem_ids();

/**
 * Construct a benchmark problem by id.
 *
 *  - "example1": dimension 10, forward map 2x + (1,...,1) with a scaled-identity
 *    backward term; solution -(1/7)(1,...,1); no objective.
 *  - "example2": dimension 2, smooth quadratic-plus-linear gradient with an l1
 *    backward term; solution (-1,-2); objective value -5 at the solution.
 *  - "random-quadratic-l1": seeded positive-definite quadratic plus l1 term of
 *    dimension opts.dim; see make_random_quadratic_l1.
 *
 * Unknown ids raise std::invalid_argument listing the valid ids.
 */
ProblemInstance registry_lookup(const std::string& problem_id, const RegistryOptions& opts = {});

/**
 * min_x 0.5 x'Mx + c'x + |x|_1 with M = G'G + 0.1 I, G and c standard normal
 * (fixed by seed). The instance carries an exact reference solution found by a
 * forward-backward run followed by an active-coordinate linear solve whose
 * optimality conditions are verified; construction fails if that verification
 * does, so downstream error traces can trust the metadata.
 */
ProblemInstance make_random_quadratic_l1(int dim, unsigned seed);

/** Named 2-d start points used by the bundled tables, with their coordinates. */
const std::vector<std::pair<std::string, Vector>>& start_presets();

/**
 * Turn a start-point spec into a vector of the given dimension: "ones",
 * "zeros", a preset name from start_presets() (2-d problems only), or a
 * comma-separated coordinate list whose length must equal dim.
 */
Vector resolve_start(const std::string& spec, Eigen::Index dim);

/** Exact trace CSV header, also used to validate files on parse. */
inline constexpr const char* kTraceHeader = "n,err_x,err_obj,gamma,alpha,residual,elapsed_ms";

/**
 * Trace rows as CSV under kTraceHeader. Floats are printed with 17 significant
 * digits so parsing recovers bit-identical values; absent optionals become
 * empty cells.
 */
void write_trace(std::ostream& out, const std::vector<IterationRecord>& records);
std::string format_trace(const std::vector<IterationRecord>& records);
void emit_trace(const std::vector<IterationRecord>& records, const std::string& path);

/** Inverse of write_trace; rejects files whose header or row shape differs. */
std::vector<IterationRecord> parse_trace_stream(std::istream& in);
std::vector<IterationRecord> parse_trace(const std::string& path);

/**
 * One solver run, fully described. Identical configs produce identical traces:
 * all randomness is seeded, and checked mode suppresses the timing fields that
 * would otherwise differ between runs.
 */
struct ExperimentConfig {
    std::string problem = "example2";
    std::string algorithm = "ihpa";
    int max_iters = 500;
    std::string x0 = "ones";
    double gamma0 = 0.4;
    double mu = 0.5;
    std::string inertia = "default";
    std::optional<double> residual_tol;
    unsigned seed = 42;
    int dim = 10;
    bool checked = true;
    std::string out;  // trace CSV path; empty writes no file
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<IterationRecord> trace;
    std::optional<double> wall_ms;  // absent in checked mode
};

/**
 * Inertia specs accepted on the command line: "default" (per-algorithm),
 * "none", "fista" (the (n-1)/(n+3) ramp), "adaptive" or "adaptive:<alpha>"
 * (residual-normalized rule), "const:<alpha>". Algorithms without an
 * extrapolation step ignore the policy.
 */
InertiaPolicy make_inertia(const std::string& spec, Algorithm alg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/** Summary row for the suite JSON: config echo plus final errors and timing. */
nlohmann::ordered_json summary_entry(const ExperimentResult& result);

/** The error metric a trace row carries: err_obj when present, else err_x. */
double error_at(const std::vector<IterationRecord>& trace, int n);

/** Shared shape of the two bundled tables. */
struct TableSpec {
    std::string problem = "example2";
    std::vector<int> checkpoints = {1, 10, 20, 100, 300, 500};
    std::vector<std::string> starts = {"start1", "start2", "start3", "start4"};
    std::vector<std::string> algorithms = {"mttm", "vttm", "ihpa", "ispa"};
    double gamma0 = 0.4;
    double mu = 0.5;
    unsigned seed = 42;
    int dim = 10;
    bool checked = true;
};

/**
 * A rendered grid of error values: one row per checkpoint or per start point,
 * one column per algorithm. Cells hold the exact trace values; render()
 * formats them in scientific notation with 4 significant digits.
 */
struct BenchTable {
    std::string title;
    std::string row_header;
    std::vector<std::string> row_labels;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> cells;  // row-major, rows x columns

    std::string render() const;
    nlohmann::ordered_json to_json() const;
};

/** Table plus the runs it was derived from (row-major), for trace emission. */
struct TableResult {
    BenchTable table;
    std::vector<ExperimentResult> runs;
};

/** Error at each checkpoint from one start point; rows are checkpoints. */
TableResult make_checkpoint_table(const TableSpec& spec, const std::string& start);

/** Error at the final checkpoint from each start point; rows are starts. */
TableResult make_start_table(const TableSpec& spec);

/**
 * Run the full benchmark battery into outdir: per-run trace CSVs under
 * traces/, both tables as text and JSON, and summary.json describing every
 * run. Returns a process exit code.
 */
int run_suite(const std::string& outdir, bool checked, std::ostream& log);

/**
 * Run the checked-mode invariant battery (projection and shrinking variants)
 * over the fixed examples plus `instances` seeded random problems. Returns 0
 * when no invariant trips.
 */
int run_check(int instances, int iters, unsigned seed0, int dim, std::ostream& log);

/**
 * Command-line entry point; args exclude the program name. Subcommands: run,
 * table, suite, check. Exit codes: 0 success, 1 runtime failure, 2 usage
 * error.
 */
int cli_main(const std::vector<std::string>& args);

}  // namespace fbsplit

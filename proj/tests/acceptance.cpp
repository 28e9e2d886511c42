// Acceptance battery for the solver toolkit. Each criterion prints one
// [PASS]/[FAIL] line with the measured values; the exit code is the number
// of failed criteria. Tolerances are pinned as constants next to the gates
// they feed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fbsplit/bench.hpp"
#include "fbsplit/projections.hpp"
#include "fbsplit/solvers.hpp"
#include "oracles.hpp"

namespace {

using fbsplit::Algorithm;
using fbsplit::ExperimentConfig;
using fbsplit::HalfSpace;
using fbsplit::IterationRecord;
using fbsplit::ProblemInstance;
using fbsplit::Solver;
using fbsplit::SolverOptions;
using fbsplit::TsengStep;
using fbsplit::Vector;

// ---- pinned gates -----------------------------------------------------------

// final-error references for the 500-iteration l1 benchmark (both averaging
// baselines land on these to within an order of magnitude from every start)
constexpr double kMttmFinalRef = 1.2749e-3;
constexpr double kVttmFinalRef = 8.0326e-5;
constexpr double kMagnitudeSlack = 10.0;
constexpr double kIhpaFinalTol = 1e-4;
constexpr double kIspaFinalTol = 1e-12;
constexpr double kStartTableBudgetS = 10.0;

// checkpoint-trend gates
constexpr double kTrendFactor = 2.0;    // successive checkpoint errors may grow by at most 2x
constexpr double kFloatFloor = 1e-14;   // absolute floor once errors reach rounding noise
constexpr double kIspaAt20Tol = 1e-7;
constexpr double kTrendBudgetS = 10.0;

// linear-problem ordering gates
constexpr double kExample1FinalTol = 1e-2;
constexpr double kTsengAt50Tol = 1e-6;
constexpr double kExample1BudgetS = 2.0;

// geometry replay gates
constexpr double kLemmaSlack = 1e-9;
constexpr double kAnchorSlack = 1e-10;
constexpr double kMembershipTol = 1e-10;

// stepsize gates
constexpr double kGammaFlatTol = 1e-12;  // example1 stepsize vs its exact value 0.25

// projection oracle gates
constexpr double kTwoHalfspaceTol = 1e-9;
constexpr double kStackKktTol = 1e-8;
constexpr double kOracleBudgetS = 30.0;

// operator property gates
constexpr double kIdempotenceTol = 1e-10;
constexpr double kNonexpansiveSlack = 1e-12;
constexpr double kVariationalTol = 1e-10;
constexpr double kPythagorasSlack = 1e-9;
constexpr double kProxShiftTol = 1e-12;
constexpr double kProxZeroSlack = 1e-15;

// -----------------------------------------------------------------------------

struct Criterion {
    std::string name;
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", value);
    return buf;
}

std::string fmt_s(double seconds) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f s", seconds);
    return buf;
}

// every trace produced below lands here; the stepsize criterion reads them all
struct TracePool {
    std::vector<std::pair<std::string, std::vector<IterationRecord>>> entries;

    void add(const std::string& label, const std::vector<IterationRecord>& trace) {
        entries.emplace_back(label, trace);
    }
};

std::string run_label(const ExperimentConfig& cfg) {
    return cfg.problem + "/" + cfg.algorithm + "/" + cfg.x0;
}

// ---- criterion 1: final errors of the l1 benchmark from all four starts -----

Criterion start_table_finals(TracePool& pool) {
    Criterion c{"example2 final errors across start points"};
    const auto t0 = Clock::now();
    fbsplit::TableSpec spec;  // the published layout: 500 iterations, 4 starts, 4 algorithms
    const fbsplit::TableResult result = fbsplit::make_start_table(spec);
    const double elapsed = seconds_since(t0);
    for (const auto& run : result.runs) pool.add(run_label(run.config), run.trace);

    double mttm_lo = std::numeric_limits<double>::infinity(), mttm_hi = 0.0;
    double vttm_lo = std::numeric_limits<double>::infinity(), vttm_hi = 0.0;
    double ihpa_hi = 0.0, ispa_hi = 0.0;
    for (std::size_t r = 0; r < spec.starts.size(); ++r) {
        mttm_lo = std::min(mttm_lo, result.table.cells[r][0]);
        mttm_hi = std::max(mttm_hi, result.table.cells[r][0]);
        vttm_lo = std::min(vttm_lo, result.table.cells[r][1]);
        vttm_hi = std::max(vttm_hi, result.table.cells[r][1]);
        ihpa_hi = std::max(ihpa_hi, result.table.cells[r][2]);
        ispa_hi = std::max(ispa_hi, result.table.cells[r][3]);
    }

    const bool mttm_ok =
        mttm_lo >= kMttmFinalRef / kMagnitudeSlack && mttm_hi <= kMttmFinalRef * kMagnitudeSlack;
    const bool vttm_ok =
        vttm_lo >= kVttmFinalRef / kMagnitudeSlack && vttm_hi <= kVttmFinalRef * kMagnitudeSlack;
    const bool ihpa_ok = ihpa_hi <= kIhpaFinalTol;
    const bool ispa_ok = ispa_hi <= kIspaFinalTol;
    const bool time_ok = elapsed < kStartTableBudgetS;
    c.pass = mttm_ok && vttm_ok && ihpa_ok && ispa_ok && time_ok;

    std::ostringstream d;
    d << "mttm " << fmt(mttm_lo) << ".." << fmt(mttm_hi) << " vs " << fmt(kMttmFinalRef)
      << "/10x, vttm " << fmt(vttm_lo) << ".." << fmt(vttm_hi) << " vs " << fmt(kVttmFinalRef)
      << "/10x, ihpa max " << fmt(ihpa_hi) << " <= " << fmt(kIhpaFinalTol) << ", ispa max "
      << fmt(ispa_hi) << " <= " << fmt(kIspaFinalTol) << ", " << fmt_s(elapsed);
    if (!time_ok) d << " (budget " << fmt_s(kStartTableBudgetS) << " exceeded)";
    c.detail = d.str();
    return c;
}

// ---- criterion 2: checkpoint trends of the l1 benchmark ----------------------

Criterion checkpoint_trends(TracePool& pool) {
    Criterion c{"example2 checkpoint trends"};
    const auto t0 = Clock::now();
    fbsplit::TableSpec spec;
    const fbsplit::TableResult result = fbsplit::make_checkpoint_table(spec, "start1");
    const double elapsed = seconds_since(t0);
    for (const auto& run : result.runs) pool.add(run_label(run.config), run.trace);

    const auto& cells = result.table.cells;
    int trend_violations = 0;
    std::string first_violation;
    for (std::size_t col = 0; col < spec.algorithms.size(); ++col) {
        for (std::size_t row = 1; row < spec.checkpoints.size(); ++row) {
            if (!(cells[row][col] <= kTrendFactor * cells[row - 1][col] + kFloatFloor)) {
                ++trend_violations;
                if (first_violation.empty()) {
                    first_violation = spec.algorithms[col] + " n=" +
                                      std::to_string(spec.checkpoints[row]) + ": " +
                                      fmt(cells[row][col]) + " after " + fmt(cells[row - 1][col]);
                }
            }
        }
    }

    // from n = 100 on, the projection variants dominate the viscosity baseline
    int order_violations = 0;
    for (std::size_t row = 0; row < spec.checkpoints.size(); ++row) {
        if (spec.checkpoints[row] < 100) continue;
        const double vttm = cells[row][1], ihpa = cells[row][2], ispa = cells[row][3];
        if (!(ispa <= ihpa + kFloatFloor)) ++order_violations;
        if (!(ihpa <= vttm + kFloatFloor)) ++order_violations;
    }

    const double ispa_at_20 = cells[2][3];
    const bool time_ok = elapsed < kTrendBudgetS;
    c.pass = trend_violations == 0 && order_violations == 0 && ispa_at_20 <= kIspaAt20Tol &&
             time_ok;

    std::ostringstream d;
    d << trend_violations << " trend violations";
    if (!first_violation.empty()) d << " (first: " << first_violation << ")";
    d << ", " << order_violations << " ordering violations at n>=100, ispa@20 " << fmt(ispa_at_20)
      << " <= " << fmt(kIspaAt20Tol) << ", " << fmt_s(elapsed);
    if (!time_ok) d << " (budget " << fmt_s(kTrendBudgetS) << " exceeded)";
    c.detail = d.str();
    return c;
}

// ---- criterion 3: convergence ordering on the linear problem -----------------

Criterion linear_problem_ordering(TracePool& pool) {
    Criterion c{"example1 convergence ordering"};
    const auto t0 = Clock::now();

    auto final_err = [&pool](const std::string& alg, int iters) {
        ExperimentConfig cfg;
        cfg.problem = "example1";
        cfg.algorithm = alg;
        cfg.max_iters = iters;
        cfg.x0 = "ones";
        const auto result = fbsplit::run_experiment(cfg);
        pool.add(run_label(cfg), result.trace);
        return *result.trace.back().err_x;
    };

    const double ihpa = final_err("ihpa", 100);
    const double ispa = final_err("ispa", 100);
    const double mttm = final_err("mttm", 100);
    const double vttm = final_err("vttm", 100);
    const double tseng50 = final_err("tseng", 50);
    const double elapsed = seconds_since(t0);

    const bool order_ok = ihpa < mttm && ihpa < vttm && ispa < mttm && ispa < vttm;
    const bool level_ok = ihpa <= kExample1FinalTol && ispa <= kExample1FinalTol &&
                          mttm <= kExample1FinalTol && vttm <= kExample1FinalTol;
    const bool tseng_ok = tseng50 <= kTsengAt50Tol;
    const bool time_ok = elapsed < kExample1BudgetS;
    c.pass = order_ok && level_ok && tseng_ok && time_ok;

    std::ostringstream d;
    d << "err_x@100: ihpa " << fmt(ihpa) << ", ispa " << fmt(ispa) << ", mttm " << fmt(mttm)
      << ", vttm " << fmt(vttm) << " (all <= " << fmt(kExample1FinalTol)
      << " and projection < averaging" << (order_ok && level_ok ? "" : " VIOLATED")
      << "), tseng@50 " << fmt(tseng50) << " <= " << fmt(kTsengAt50Tol) << ", " << fmt_s(elapsed);
    if (!time_ok) d << " (budget " << fmt_s(kExample1BudgetS) << " exceeded)";
    c.detail = d.str();
    return c;
}

// ---- criteria 4 and 8: step-by-step geometry replay ---------------------------

struct ReplayOutcome {
    long lemma_checks = 0;
    long lemma_failures = 0;
    double lemma_worst_margin = -std::numeric_limits<double>::infinity();
    long anchor_checks = 0;
    long anchor_failures = 0;
    long member_checks = 0;
    long member_failures = 0;
    long solution_checks = 0;
    long solution_failures = 0;
    long replay_mismatches = 0;
    int runs = 0;
    std::vector<std::string> notes;
    double seconds = 0.0;

    void note(const std::string& text) {
        if (notes.size() < 4) notes.push_back(text);
    }
};

/*
 * Re-derive every quantity of a projection-method iteration from the public
 * API (extrapolated point, intermediate pair, stepsize, cuts) and verify the
 * geometry the solver relies on. Runs unchecked so violations are counted
 * here instead of throwing inside the solver.
 */
void replay_run(const std::string& label, const ProblemInstance& problem, Algorithm alg,
                int iters, ReplayOutcome& out, TracePool& pool) {
    SolverOptions opts;
    opts.max_iters = iters;
    opts.checked = false;
    Solver solver(problem, alg, opts);
    const Vector& p = *problem.known_solution;
    const double mu = opts.stepsize.mu;

    try {
        for (int k = 0; k < iters; ++k) {
            const Vector x_prev = solver.state().x_prev;
            const Vector x_curr = solver.state().x_curr;
            const double gamma = solver.state().gamma;
            const std::size_t stack_before = solver.state().stack.size();

            const IterationRecord rec = solver.step();
            const Vector& x_new = solver.state().x_curr;
            const Vector& anchor = solver.state().anchor;
            const std::string at = label + " n=" + std::to_string(rec.n);

            const Vector w = axpy(rec.alpha, x_curr - x_prev, x_curr);
            const TsengStep ts = fbsplit::tseng_map(w, gamma, problem);
            const double gamma_next = rec.gamma;

            // the contraction the cuts encode, measured at the certified solution
            const double ratio = mu * gamma / gamma_next;
            const double lhs = (ts.z - p).raw().squaredNorm();
            const double rhs = (w - p).raw().squaredNorm() -
                               (1.0 - ratio * ratio) * (w - ts.y).raw().squaredNorm();
            ++out.lemma_checks;
            out.lemma_worst_margin = std::max(out.lemma_worst_margin, lhs - rhs);
            if (!(lhs <= rhs + kLemmaSlack)) {
                ++out.lemma_failures;
                out.note(at + ": contraction margin " + fmt(lhs - rhs));
            }

            const HalfSpace cut = fbsplit::fejer_cut(w, ts.z, ts.y, gamma, gamma_next, mu);

            auto member = [&](const HalfSpace& h, const Vector& u, const char* what, long& bad) {
                ++out.member_checks;
                if (!h.contains(u, kMembershipTol)) {
                    ++bad;
                    out.note(at + ": " + what);
                }
            };

            if (alg == Algorithm::Ihpa) {
                const HalfSpace anchoring = fbsplit::anchor_cut(x_curr, anchor);
                const Vector expected = fbsplit::project_two_halfspaces(anchor, cut, anchoring);
                if (!(expected == x_new)) {
                    ++out.replay_mismatches;
                    out.note(at + ": two-halfspace replay diverged from the solver");
                }
                member(cut, x_new, "iterate outside the contraction cut", out.member_failures);
                member(anchoring, x_new, "iterate outside the anchoring cut",
                       out.member_failures);
                ++out.solution_checks;
                if (!cut.contains(p, kMembershipTol) || !anchoring.contains(p, kMembershipTol)) {
                    ++out.solution_failures;
                    out.note(at + ": solution left a constructed cut");
                }
            } else {
                if (solver.state().stack.size() != stack_before + 1) {
                    ++out.replay_mismatches;
                    out.note(at + ": stack did not grow by one cut");
                } else {
                    const HalfSpace& appended = solver.state().stack[stack_before];
                    if (!(appended.normal() == cut.normal() && appended.offset() == cut.offset())) {
                        ++out.replay_mismatches;
                        out.note(at + ": appended cut differs from the replayed cut");
                    }
                }
                for (std::size_t i = 0; i < solver.state().stack.size(); ++i) {
                    member(solver.state().stack[i], x_new, "iterate outside an accumulated cut",
                           out.member_failures);
                }
                ++out.solution_checks;
                if (!cut.contains(p, kMembershipTol)) {
                    ++out.solution_failures;
                    out.note(at + ": solution left the appended cut");
                }
            }

            // the distance to the anchor never shrinks
            ++out.anchor_checks;
            const double dist_before = norm(x_curr - anchor);
            const double dist_after = norm(x_new - anchor);
            if (!(dist_after >= dist_before - kAnchorSlack)) {
                ++out.anchor_failures;
                out.note(at + ": anchor distance " + fmt(dist_before) + " -> " + fmt(dist_after));
            }
        }
    } catch (const std::exception& e) {
        ++out.replay_mismatches;
        out.note(label + ": exception: " + e.what());
    }
    ++out.runs;
    pool.add(label, solver.state().trace);
}

std::pair<Criterion, Criterion> geometry_replay(TracePool& pool) {
    ReplayOutcome out;
    const auto t0 = Clock::now();

    std::vector<std::pair<std::string, ProblemInstance>> problems;
    problems.emplace_back("example1", fbsplit::registry_lookup("example1"));
    problems.emplace_back("example2", fbsplit::registry_lookup("example2"));
    for (unsigned seed = 100; seed < 120; ++seed) {
        problems.emplace_back("random(seed=" + std::to_string(seed) + ")",
                              fbsplit::make_random_quadratic_l1(10, seed));
    }
    for (const auto& [name, problem] : problems) {
        for (Algorithm alg : {Algorithm::Ihpa, Algorithm::Ispa}) {
            replay_run(name + "/" + to_string(alg), problem, alg, 200, out, pool);
        }
    }
    out.seconds = seconds_since(t0);

    Criterion lemma{"per-step contraction inequality"};
    lemma.pass = out.lemma_failures == 0;
    {
        std::ostringstream d;
        d << out.lemma_checks << " inequalities over " << out.runs << " runs, "
          << out.lemma_failures << " violations, worst margin " << fmt(out.lemma_worst_margin)
          << " (slack " << fmt(kLemmaSlack) << "), " << fmt_s(out.seconds);
        lemma.detail = d.str();
    }

    Criterion geometry{"anchor monotonicity and cut membership"};
    geometry.pass = out.anchor_failures == 0 && out.member_failures == 0 &&
                    out.solution_failures == 0 && out.replay_mismatches == 0;
    {
        std::ostringstream d;
        d << out.anchor_checks << " anchor-distance checks (" << out.anchor_failures
          << " bad), " << out.member_checks << " membership checks (" << out.member_failures
          << " bad), " << out.solution_checks << " solution-membership checks ("
          << out.solution_failures << " bad), " << out.replay_mismatches
          << " replay mismatches";
        for (const auto& n : out.notes) d << "; " << n;
        geometry.detail = d.str();
    }
    return {lemma, geometry};
}

// ---- criterion 5: stepsize behavior across every recorded run ----------------

Criterion stepsize_behavior(const TracePool& pool) {
    Criterion c{"stepsize monotone, exact on the linear problem"};
    long traces = 0;
    long monotone_failures = 0;
    double worst_dev = 0.0;
    std::string worst_at = "-";

    for (const auto& [label, trace] : pool.entries) {
        ++traces;
        for (std::size_t i = 1; i < trace.size(); ++i) {
            if (trace[i].gamma > trace[i - 1].gamma) ++monotone_failures;
        }
        if (label.rfind("example1", 0) == 0) {
            for (const auto& rec : trace) {
                const double dev = std::abs(rec.gamma - 0.25);
                if (dev > worst_dev) {
                    worst_dev = dev;
                    worst_at = label + " n=" + std::to_string(rec.n);
                }
            }
        }
    }

    c.pass = monotone_failures == 0 && worst_dev <= kGammaFlatTol;
    std::ostringstream d;
    d << "nonincreasing in all " << traces << " recorded traces (" << monotone_failures
      << " violations); example1 max |gamma - 0.25| = " << fmt(worst_dev) << " at " << worst_at
      << " (tol " << fmt(kGammaFlatTol) << ")";
    c.detail = d.str();
    return c;
}

// ---- criterion 6: projection oracles ------------------------------------------

Criterion projection_oracles() {
    Criterion c{"projection oracle agreement"};
    const auto t0 = Clock::now();
    std::mt19937 gen(2024);

    int pair_failures = 0;
    double pair_worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index dim = 2 + (trial % 7);
        const testref::TwoHalfspaceCase tc = testref::random_two_halfspace_case(gen, dim);
        const Vector closed = fbsplit::project_two_halfspaces(
            Vector(tc.x0), testref::to_halfspace(tc.c1), testref::to_halfspace(tc.c2));
        const Eigen::VectorXd ref = testref::dykstra_ref(tc.x0, {tc.c1, tc.c2}, 10000);
        const double gap = (closed.raw() - ref).norm();
        pair_worst = std::max(pair_worst, gap);
        if (!(gap <= kTwoHalfspaceTol)) ++pair_failures;
    }

    int stack_failures = 0;
    double stack_worst = 0.0;
    int exact_failures = 0;
    double exact_worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index dim = 4 + (trial % 3);
        const std::vector<testref::Cut> cuts = testref::random_stack_case(gen, dim, 5);
        fbsplit::HalfSpaceStack stack(dim);
        for (const auto& cut : cuts) stack.append(testref::to_halfspace(cut));
        const Eigen::VectorXd x0 = testref::gaussian(gen, dim, 3.0);

        fbsplit::DykstraOptions dopts;
        dopts.tol = 1e-12;
        dopts.max_sweeps = 10000;
        const Vector lib = fbsplit::project_halfspace_stack(Vector(x0), stack, dopts);
        const auto ref = testref::kkt_projection_ref(x0, cuts);
        if (!ref) {
            ++stack_failures;
            continue;
        }
        const double gap = (lib.raw() - *ref).norm();
        stack_worst = std::max(stack_worst, gap);
        if (!(gap <= kStackKktTol)) ++stack_failures;

        // the dual active-set projector the shrinking solver uses, against the
        // same enumeration oracle
        const Vector exact = fbsplit::project_polyhedron(Vector(x0), stack);
        const double exact_gap = (exact.raw() - *ref).norm();
        exact_worst = std::max(exact_worst, exact_gap);
        if (!(exact_gap <= kStackKktTol)) ++exact_failures;
    }

    const double elapsed = seconds_since(t0);
    const bool time_ok = elapsed < kOracleBudgetS;
    c.pass = pair_failures == 0 && stack_failures == 0 && exact_failures == 0 && time_ok;
    std::ostringstream d;
    d << "1000 closed-form vs cyclic pairs: worst gap " << fmt(pair_worst) << " (tol "
      << fmt(kTwoHalfspaceTol) << ", " << pair_failures << " bad); 200 stacks, cyclic vs "
      << "enumeration: worst gap " << fmt(stack_worst) << " (tol " << fmt(kStackKktTol) << ", "
      << stack_failures << " bad); active-set vs enumeration: worst gap " << fmt(exact_worst)
      << " (" << exact_failures << " bad); " << fmt_s(elapsed);
    if (!time_ok) d << " (budget " << fmt_s(kOracleBudgetS) << " exceeded)";
    c.detail = d.str();
    return c;
}

// ---- criterion 7: operator properties -----------------------------------------

Criterion operator_properties() {
    Criterion c{"projection and prox property trials"};
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> gamma_dist(0.01, 2.0);

    int idem_bad = 0, nonexp_bad = 0, varia_bad = 0, pythag_bad = 0, prox_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index dim = 2 + (trial % 9);
        Eigen::VectorXd a = testref::gaussian(gen, dim);
        while (a.norm() < 1e-3) a = testref::gaussian(gen, dim);
        const HalfSpace h(Vector(a), a.dot(testref::gaussian(gen, dim)));
        const Vector x0(testref::gaussian(gen, dim, 3.0));
        const Vector u0(testref::gaussian(gen, dim, 3.0));

        const Vector px = fbsplit::project_halfspace(x0, h);
        const Vector pu = fbsplit::project_halfspace(u0, h);

        const double idem = norm(fbsplit::project_halfspace(px, h) - px);
        if (!(idem <= kIdempotenceTol * std::max(1.0, norm(px)))) ++idem_bad;

        if (!(norm(px - pu) <= norm(x0 - u0) + kNonexpansiveSlack)) ++nonexp_bad;

        // pu lies in the set, so the projection inequality applies to it
        const double varia = inner(x0 - px, pu - px);
        const double scale = std::max(1.0, norm(x0 - px) * norm(pu - px));
        if (!(varia <= kVariationalTol * scale)) ++varia_bad;

        const double full = (x0 - pu).raw().squaredNorm();
        const double legs = (x0 - px).raw().squaredNorm() + (px - pu).raw().squaredNorm();
        if (!(full >= legs - kPythagorasSlack * std::max(1.0, full))) ++pythag_bad;
    }

    for (int trial = 0; trial < 1000; ++trial) {
        const double gamma = gamma_dist(gen);
        const Vector y(testref::gaussian(gen, 6, 2.0));
        const Vector p = fbsplit::soft_threshold(y, gamma);
        for (Eigen::Index i = 0; i < y.dim(); ++i) {
            if (p[i] != 0.0) {
                const double shift = y[i] - p[i] - gamma * (p[i] > 0.0 ? 1.0 : -1.0);
                if (!(std::abs(shift) <= kProxShiftTol * (1.0 + std::abs(y[i])))) ++prox_bad;
            } else if (!(std::abs(y[i]) <= gamma + kProxZeroSlack)) {
                ++prox_bad;
            }
        }
    }

    c.pass = idem_bad == 0 && nonexp_bad == 0 && varia_bad == 0 && pythag_bad == 0 && prox_bad == 0;
    std::ostringstream d;
    d << "1000 trials each: idempotence " << idem_bad << " bad, nonexpansiveness " << nonexp_bad
      << " bad, variational inequality " << varia_bad << " bad, distance decomposition "
      << pythag_bad << " bad, l1-prox optimality " << prox_bad << " bad";
    c.detail = d.str();
    return c;
}

// ---- criterion 9: byte-identical suite output ----------------------------------

struct CoutSilencer {
    std::ostringstream sink;
    std::streambuf* old;
    CoutSilencer() : old(std::cout.rdbuf(sink.rdbuf())) {}
    ~CoutSilencer() { std::cout.rdbuf(old); }
};

Criterion suite_determinism() {
    namespace fs = std::filesystem;
    Criterion c{"benchmark suite determinism"};
    const fs::path base = fs::temp_directory_path();
    const fs::path dir_a = base / "fbsplit_accept_suite_a";
    const fs::path dir_b = base / "fbsplit_accept_suite_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    int code_a = 0, code_b = 0;
    {
        CoutSilencer quiet;
        code_a = fbsplit::cli_main({"suite", "--outdir", dir_a.string()});
        code_b = fbsplit::cli_main({"suite", "--outdir", dir_b.string()});
    }

    auto listing = [](const fs::path& root) {
        std::vector<std::string> rel;
        for (const auto& entry : fs::recursive_directory_iterator(root)) {
            if (entry.is_regular_file()) {
                rel.push_back(fs::relative(entry.path(), root).generic_string());
            }
        }
        std::sort(rel.begin(), rel.end());
        return rel;
    };
    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    std::ostringstream d;
    if (code_a != 0 || code_b != 0) {
        c.pass = false;
        d << "suite exit codes " << code_a << ", " << code_b;
    } else {
        const auto files_a = listing(dir_a);
        const auto files_b = listing(dir_b);
        if (files_a != files_b || files_a.empty()) {
            c.pass = false;
            d << "file sets differ (" << files_a.size() << " vs " << files_b.size() << ")";
        } else {
            int mismatched = 0;
            std::string first;
            for (const auto& rel : files_a) {
                if (slurp(dir_a / rel) != slurp(dir_b / rel)) {
                    ++mismatched;
                    if (first.empty()) first = rel;
                }
            }
            c.pass = mismatched == 0;
            d << files_a.size() << " files, " << mismatched << " byte mismatches";
            if (!first.empty()) d << " (first: " << first << ")";
        }
    }
    c.detail = d.str();
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    return c;
}

Criterion guarded(const std::string& name, Criterion (*fn)()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return Criterion{name, false, std::string("unexpected exception: ") + e.what()};
    }
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    TracePool pool;

    try {
        results.push_back(start_table_finals(pool));
    } catch (const std::exception& e) {
        results.push_back({"example2 final errors across start points", false,
                           std::string("unexpected exception: ") + e.what()});
    }
    try {
        results.push_back(checkpoint_trends(pool));
    } catch (const std::exception& e) {
        results.push_back({"example2 checkpoint trends", false,
                           std::string("unexpected exception: ") + e.what()});
    }
    try {
        results.push_back(linear_problem_ordering(pool));
    } catch (const std::exception& e) {
        results.push_back({"example1 convergence ordering", false,
                           std::string("unexpected exception: ") + e.what()});
    }
    Criterion geometry{"anchor monotonicity and cut membership", false, "replay aborted"};
    try {
        auto [lemma, geo] = geometry_replay(pool);
        results.push_back(std::move(lemma));
        geometry = std::move(geo);
    } catch (const std::exception& e) {
        results.push_back({"per-step contraction inequality", false,
                           std::string("unexpected exception: ") + e.what()});
    }
    results.push_back(stepsize_behavior(pool));
    results.push_back(guarded("projection oracle agreement", projection_oracles));
    results.push_back(guarded("projection and prox property trials", operator_properties));
    results.push_back(std::move(geometry));
    results.push_back(guarded("benchmark suite determinism", suite_determinism));

    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
        if (!r.pass) ++failures;
    }
    std::cout << "acceptance: " << (results.size() - static_cast<std::size_t>(failures)) << "/"
              << results.size() << " criteria passed\n";
    return failures;
}

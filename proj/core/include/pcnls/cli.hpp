#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pcnls/config.hpp"
#include "pcnls/report.hpp"
#include "pcnls/solver.hpp"

namespace pcnls {

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation failed or a run did not converge
inline constexpr int kExitUsage = 2;    // bad arguments or configuration

struct ScenarioOutcome {
    SolveResult result;
    std::vector<NodalReport> nodal;
    std::vector<DipoleResult> dipole;
    std::vector<std::pair<std::string, double>> timing;
};

/// Solve, nodal threshold sweep and, for full-space runs with separations
/// configured, the dipole study.
ScenarioOutcome run_scenario(const RunConfig& config);

/// run_scenario followed by emit_report into config.output.dir.
ScenarioOutcome run_and_emit(const RunConfig& config);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Oracle comparisons on tiny grids plus the harmonic-oscillator eigenvalue
/// checks on moderate ones.
std::vector<ValidationCheck> validation_suite();

/// `args` excludes the program name. Subcommands: solve, analyze, dipole,
/// validate, sweep.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcnls

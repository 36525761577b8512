#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcnls/grid.hpp"
#include "pcnls/model.hpp"
#include "pcnls/solver.hpp"

namespace pcnls {

/// Plain `section.key = value` configuration.
///
///   # comment
///   grid.N = 3
///   grid.m = 2
///   grid.L = 6 6 8          # one value, or one per axis
///   grid.n = 47 47 63
///   model.term = 1.0 4.0    # coefficient exponent; repeatable
///   constraint.kind = kodd  # full | kodd | cyclic_odd | ginvariant
///   constraint.k = 2
///   constraint.generator = -1 2 ; -1   # signed 1-based sources ; parity
///   solver.grad_tol = 1e-6
///   analysis.thresholds = 1e-8 1e-6 1e-4
///   output.dir = runs/kodd2
///
/// Lists accept spaces or commas. Unknown keys are errors.
struct AnalysisOptions {
    /// Nodal thresholds relative to max|u|.
    std::vector<double> thresholds{1e-8, 1e-6, 1e-4};
    /// Dipole separations in y_1 length units; empty disables the study.
    std::vector<double> dipole_separations;
};

struct OutputOptions {
    std::filesystem::path dir = "out";
    bool slices = true;
    bool field = true;
};

struct RunConfig {
    GridSpec grid;
    NonlinearityModel model;
    SolverConfig solver;
    int starts = 1;
    AnalysisOptions analysis;
    OutputOptions output;
};

struct ConfigIssue {
    int line = 0;  // 0 when the issue is not tied to one line
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// `overrides` are applied as if appended to the text, except that each
/// replaces every earlier line with the same key. Throws ConfigError listing
/// every problem found.
RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Canonical text that parses back to an equivalent RunConfig.
std::string render_config(const RunConfig& config);

}  // namespace pcnls

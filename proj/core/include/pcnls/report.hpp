#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pcnls/analysis.hpp"
#include "pcnls/grid.hpp"
#include "pcnls/solver.hpp"

namespace pcnls {

/// Column order of summary.csv.
const std::vector<std::string>& summary_columns();

/// Header plus one row; every number printed with %.17g.
std::string summary_csv(const SolveReport& report);
/// Column name -> value. Throws FormatError on a malformed file.
std::map<std::string, double> parse_summary_csv(const std::string& text);

std::string trace_csv(const std::vector<TraceEntry>& trace);
std::string nodal_csv(const std::vector<NodalReport>& reports, double max_abs);
std::string dipole_csv(const std::vector<DipoleResult>& results);
std::string timing_csv(const std::vector<std::pair<std::string, double>>& seconds);

struct Slice {
    std::string name;  // "x1x2", "x1y1", "y1y2"
    std::string csv;   // header "a,b,value"
};

/// Mid-plane slices through the grid centre for each available axis pair
/// among (x1, x2), (x1, y1) and (y1, y2).
std::vector<Slice> mid_plane_slices(const Field& u);

struct RunOutputs {
    const Field* field = nullptr;  // source of nodal.csv, slices and field.nlsf
    SolveReport report;
    std::vector<NodalReport> nodal;
    std::vector<DipoleResult> dipole;
    std::vector<std::pair<std::string, double>> timing;
    std::string config_text;
    bool slices = true;
    bool write_field = true;
};

/// Writes summary.csv, trace.csv, nodal.csv, timing.csv, config.txt and,
/// when present, field.nlsf, dipole.csv and slices/*.csv into `dir`
/// (created if missing). Throws IoError when the directory is not writable.
void emit_report(const std::filesystem::path& dir, const RunOutputs& outputs);

/// Writes `text` to `path`; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pcnls

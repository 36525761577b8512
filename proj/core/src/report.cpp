#include "pcnls/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pcnls/errors.hpp"
#include "pcnls/field_io.hpp"

namespace pcnls {

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> columns = {
        "energy", "h_norm_sq", "nehari_residual", "grad_residual", "iterations",
        "nodal_total", "symmetry_residual", "decay_metric",
    };
    return columns;
}

std::string summary_csv(const SolveReport& r) {
    std::ostringstream s;
    const auto& cols = summary_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) s << (i ? "," : "") << cols[i];
    s << "\n"
      << g17(r.final_energy) << "," << g17(r.h_norm_sq) << "," << g17(r.nehari_residual) << ","
      << g17(r.grad_residual) << "," << r.iterations << "," << r.nodal_count << ","
      << g17(r.symmetry_residual) << "," << g17(r.decay_metric) << "\n";
    return s.str();
}

std::map<std::string, double> parse_summary_csv(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::string row;
    if (!std::getline(in, header) || !std::getline(in, row)) {
        throw FormatError("summary.csv: expected a header and one row");
    }
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    const auto names = split(header);
    const auto cells = split(row);
    if (names.size() != cells.size()) throw FormatError("summary.csv: header and row lengths differ");
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        try {
            std::size_t used = 0;
            out[names[i]] = std::stod(cells[i], &used);
            if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
        } catch (const std::exception&) {
            throw FormatError("summary.csv: bad value '" + cells[i] + "' in column " + names[i]);
        }
    }
    return out;
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
    std::ostringstream s;
    s << "iteration,energy,residual,h_norm_sq\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        s << i << "," << g17(trace[i].energy) << "," << g17(trace[i].residual) << ","
          << g17(trace[i].h_norm_sq) << "\n";
    }
    return s.str();
}

std::string nodal_csv(const std::vector<NodalReport>& reports, double max_abs) {
    std::ostringstream s;
    s << "relative_threshold,threshold,positive_domains,negative_domains,nodal_total\n";
    for (const auto& r : reports) {
        s << g17(max_abs > 0.0 ? r.threshold / max_abs : 0.0) << "," << g17(r.threshold) << ","
          << r.positive_domains << "," << r.negative_domains << "," << r.total() << "\n";
    }
    return s.str();
}

std::string dipole_csv(const std::vector<DipoleResult>& results) {
    std::ostringstream s;
    s << "separation,energy,two_c,gap,overlap,raw_energy\n";
    for (const auto& r : results) {
        s << g17(r.separation) << "," << g17(r.energy) << "," << g17(r.two_c) << "," << g17(r.gap)
          << "," << g17(r.overlap) << "," << g17(r.raw_energy) << "\n";
    }
    return s.str();
}

std::string timing_csv(const std::vector<std::pair<std::string, double>>& seconds) {
    std::ostringstream s;
    s << "phase,seconds\n";
    for (const auto& [phase, t] : seconds) s << phase << "," << g17(t) << "\n";
    return s.str();
}

std::vector<Slice> mid_plane_slices(const Field& u) {
    const GridSpec& g = u.grid();
    const int m = g.confined_dims();
    std::vector<std::pair<std::string, std::pair<int, int>>> pairs;
    if (m >= 2) pairs.push_back({"x1x2", {0, 1}});
    pairs.push_back({"x1y1", {0, m}});
    if (g.free_dims() >= 2) pairs.push_back({"y1y2", {m, m + 1}});

    std::vector<Slice> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    for (const auto& [name, axes] : pairs) {
        const auto [a, b] = axes;
        for (int ax = 0; ax < g.dims(); ++ax) idx[static_cast<std::size_t>(ax)] = g.points(ax) / 2;
        std::ostringstream s;
        s << "a,b,value\n";
        for (std::size_t i = 0; i < g.points(a); ++i) {
            idx[static_cast<std::size_t>(a)] = i;
            for (std::size_t j = 0; j < g.points(b); ++j) {
                idx[static_cast<std::size_t>(b)] = j;
                s << g17(g.coordinate(a, i)) << "," << g17(g.coordinate(b, j)) << ","
                  << g17(u[g.flat_index(idx)]) << "\n";
            }
        }
        out.push_back({name, s.str()});
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void emit_report(const std::filesystem::path& dir, const RunOutputs& o) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    write_text_file(dir / "summary.csv", summary_csv(o.report));
    write_text_file(dir / "trace.csv", trace_csv(o.report.trace));
    write_text_file(dir / "timing.csv", timing_csv(o.timing));
    if (!o.config_text.empty()) write_text_file(dir / "config.txt", o.config_text);
    if (o.field) {
        write_text_file(dir / "nodal.csv", nodal_csv(o.nodal, o.field->max_abs()));
        if (o.write_field) write_field(dir / "field.nlsf", *o.field);
        if (o.slices) {
            std::filesystem::create_directories(dir / "slices", ec);
            if (ec) throw IoError("cannot create " + (dir / "slices").string() + ": " + ec.message());
            for (const auto& slice : mid_plane_slices(*o.field)) {
                write_text_file(dir / "slices" / (slice.name + ".csv"), slice.csv);
            }
        }
    }
    if (!o.dipole.empty()) write_text_file(dir / "dipole.csv", dipole_csv(o.dipole));
}

}  // namespace pcnls

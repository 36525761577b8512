#include "pcnls/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "pcnls/errors.hpp"

namespace pcnls {

namespace {

struct Entry {
    int line = 0;
    std::string key;
    std::string value;
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : value) {
        if (ch == ' ' || ch == '\t' || ch == ',') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> to_integer(const std::string& s) {
    Int v = 0;
    const char* begin = s.data();
    if (!s.empty() && s[0] == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || begin == s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "grid.N", "grid.m", "grid.L", "grid.n",
        "model.term",
        "constraint.kind", "constraint.k", "constraint.l", "constraint.generator",
        "solver.max_iters", "solver.grad_tol", "solver.step", "solver.eta", "solver.c1",
        "solver.backtrack", "solver.initial_step", "solver.max_backtracks", "solver.lin_tol",
        "solver.seed", "solver.init", "solver.init_center", "solver.init_width",
        "solver.init_file", "solver.starts",
        "analysis.thresholds", "analysis.dipole_separations",
        "output.dir", "output.slices", "output.field",
    };
    return keys;
}

bool repeatable(const std::string& key) { return key == "model.term" || key == "constraint.generator"; }

// Collects issues while interpreting entries.
class Interpreter {
public:
    explicit Interpreter(std::vector<Entry> entries) : entries_(std::move(entries)) {}

    std::vector<ConfigIssue> issues;

    const Entry* find(const std::string& key) const {
        const Entry* found = nullptr;
        for (const auto& e : entries_) {
            if (e.key == key) found = &e;
        }
        return found;
    }

    std::vector<const Entry*> find_all(const std::string& key) const {
        std::vector<const Entry*> out;
        for (const auto& e : entries_) {
            if (e.key == key) out.push_back(&e);
        }
        return out;
    }

    int line_of(const std::string& key) const {
        const Entry* e = find(key);
        return e ? e->line : 0;
    }

    void fail(int line, std::string message) { issues.push_back({line, std::move(message)}); }

    template <class T>
    std::optional<T> scalar(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        std::optional<T> v;
        if constexpr (std::is_same_v<T, double>) {
            v = to_double(e->value);
        } else if constexpr (std::is_same_v<T, bool>) {
            if (e->value == "true" || e->value == "1") v = true;
            if (e->value == "false" || e->value == "0") v = false;
        } else if constexpr (std::is_same_v<T, std::string>) {
            v = e->value;
        } else {
            v = to_integer<T>(e->value);
        }
        if (!v) fail(e->line, key + ": cannot parse '" + e->value + "'");
        return v;
    }

    template <class T>
    void assign(const std::string& key, T& target) {
        if (auto v = scalar<T>(key)) target = *v;
    }

    template <class T>
    std::optional<std::vector<T>> list(const std::string& key) {
        const Entry* e = find(key);
        if (!e) return std::nullopt;
        std::vector<T> out;
        for (const auto& item : split_list(e->value)) {
            std::optional<T> v;
            if constexpr (std::is_same_v<T, double>) {
                v = to_double(item);
            } else {
                v = to_integer<T>(item);
            }
            if (!v) {
                fail(e->line, key + ": cannot parse list item '" + item + "'");
                return std::nullopt;
            }
            out.push_back(*v);
        }
        return out;
    }

private:
    std::vector<Entry> entries_;
};

std::vector<Entry> tokenize(const std::string& text, std::vector<ConfigIssue>& issues) {
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(std::string_view(raw).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            issues.push_back({line, "expected 'section.key = value'"});
            continue;
        }
        Entry e{line, trim(std::string_view(body).substr(0, eq)),
                trim(std::string_view(body).substr(eq + 1))};
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
            issues.push_back({line, "unknown key '" + e.key + "'"});
            continue;
        }
        if (e.value.empty()) {
            issues.push_back({line, e.key + ": empty value"});
            continue;
        }
        if (!repeatable(e.key)) {
            const bool dup = std::any_of(entries.begin(), entries.end(),
                                         [&](const Entry& x) { return x.key == e.key; });
            if (dup) {
                issues.push_back({line, e.key + ": set more than once"});
                continue;
            }
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::optional<GroupGenerator> parse_generator(const Entry& e, Interpreter& in) {
    const auto semi = e.value.find(';');
    if (semi == std::string::npos) {
        in.fail(e.line, "constraint.generator: expected 'signed sources ; parity'");
        return std::nullopt;
    }
    GroupGenerator g;
    for (const auto& item : split_list(e.value.substr(0, semi))) {
        const auto v = to_integer<int>(item);
        if (!v || *v == 0) {
            in.fail(e.line, "constraint.generator: bad signed axis '" + item + "'");
            return std::nullopt;
        }
        g.map.source.push_back(std::abs(*v) - 1);
        g.map.sign.push_back(*v > 0 ? 1 : -1);
    }
    const auto parity = to_integer<int>(trim(e.value.substr(semi + 1)));
    if (!parity || (*parity != 1 && *parity != -1)) {
        in.fail(e.line, "constraint.generator: parity must be 1 or -1");
        return std::nullopt;
    }
    g.parity = *parity;
    std::vector<int> seen = g.map.source;
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i] != static_cast<int>(i)) {
            in.fail(e.line, "constraint.generator: axes must form a permutation of 1..d");
            return std::nullopt;
        }
    }
    return g;
}

// Runs fn, converting a ValidationError into an issue on `line`.
void guarded(Interpreter& in, int line, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        in.fail(line, e.what());
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error([&] {
          std::ostringstream s;
          for (std::size_t i = 0; i < issues.size(); ++i) {
              if (i) s << '\n';
              if (issues[i].line > 0) s << "line " << issues[i].line << ": ";
              s << issues[i].message;
          }
          return s.str();
      }()),
      issues_(std::move(issues)) {}

RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::vector<ConfigIssue> issues;
    std::vector<Entry> entries = tokenize(text, issues);
    for (const auto& [key, value] : overrides) {
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            issues.push_back({0, "override: unknown key '" + key + "'"});
            continue;
        }
        std::erase_if(entries, [&](const Entry& e) { return e.key == key; });
        entries.push_back({0, key, trim(value)});
    }
    Interpreter in(std::move(entries));
    in.issues = std::move(issues);

    // Grid.
    const auto dims = in.scalar<int>("grid.N");
    const auto confined = in.scalar<int>("grid.m");
    const auto widths = in.list<double>("grid.L");
    const auto points = in.list<std::size_t>("grid.n");
    for (const char* key : {"grid.N", "grid.m", "grid.L", "grid.n"}) {
        if (!in.find(key)) in.fail(0, std::string("missing required key ") + key);
    }
    std::optional<GridSpec> grid;
    if (dims && confined && widths && points) {
        guarded(in, in.line_of("grid.m"), [&] { grid = GridSpec::build(*dims, *confined, *widths, *points); });
    }

    // Model.
    std::vector<PowerTerm> terms;
    for (const Entry* e : in.find_all("model.term")) {
        const auto items = split_list(e->value);
        const auto a = items.size() == 2 ? to_double(items[0]) : std::nullopt;
        const auto p = items.size() == 2 ? to_double(items[1]) : std::nullopt;
        if (!a || !p) {
            in.fail(e->line, "model.term: expected 'coefficient exponent'");
            continue;
        }
        terms.push_back({*a, *p});
    }
    std::optional<NonlinearityModel> model;
    if (terms.empty()) {
        in.fail(0, "missing required key model.term");
    } else {
        const int line = in.find_all("model.term").front()->line;
        guarded(in, line, [&] { model = NonlinearityModel::from_terms(terms); });
    }
    if (model && dims) {
        const HypothesisReport h = check_hypotheses(*model, *dims);
        for (const auto& c : h.checks) {
            if (!c.passed) in.fail(in.line_of("model.term"), "model violates (" + c.name + "): " + c.detail);
        }
    }

    // Constraint.
    SymmetryConstraint constraint = SymmetryConstraint::full_space();
    const std::string kind = in.scalar<std::string>("constraint.kind").value_or("full");
    const int kind_line = in.line_of("constraint.kind");
    auto order = [&](const char* key) -> std::optional<int> {
        auto v = in.scalar<int>(key);
        if (!in.find(key)) in.fail(kind_line, std::string("constraint.kind = ") + kind + " needs " + key);
        return v;
    };
    guarded(in, kind_line, [&] {
        if (kind == "full") {
            constraint = SymmetryConstraint::full_space();
        } else if (kind == "kodd") {
            if (auto k = order("constraint.k")) constraint = SymmetryConstraint::k_odd(*k);
        } else if (kind == "cyclic_odd") {
            if (auto l = order("constraint.l")) constraint = SymmetryConstraint::cyclic_odd(*l);
        } else if (kind == "ginvariant") {
            std::vector<GroupGenerator> gens;
            for (const Entry* e : in.find_all("constraint.generator")) {
                if (auto g = parse_generator(*e, in)) gens.push_back(std::move(*g));
            }
            constraint = SymmetryConstraint::g_invariant(std::move(gens));
        } else {
            in.fail(kind_line, "constraint.kind: expected full, kodd, cyclic_odd or ginvariant");
        }
    });
    if (grid) guarded(in, kind_line, [&] { validate_constraint(*grid, constraint); });

    // Solver.
    SolverConfig solver;
    solver.constraint = constraint;
    in.assign("solver.max_iters", solver.max_iters);
    in.assign("solver.grad_tol", solver.grad_tol);
    in.assign("solver.lin_tol", solver.lin_tol);
    in.assign("solver.seed", solver.seed);
    const std::string step = in.scalar<std::string>("solver.step").value_or("armijo");
    if (step == "fixed") {
        FixedStep f;
        in.assign("solver.eta", f.eta);
        solver.step = f;
    } else if (step == "armijo") {
        ArmijoStep a;
        in.assign("solver.c1", a.c1);
        in.assign("solver.backtrack", a.backtrack);
        in.assign("solver.initial_step", a.initial_step);
        in.assign("solver.max_backtracks", a.max_backtracks);
        solver.step = a;
        if (in.find("solver.eta")) in.fail(in.line_of("solver.eta"), "solver.eta needs solver.step = fixed");
    } else {
        in.fail(in.line_of("solver.step"), "solver.step: expected armijo or fixed");
    }
    const std::string init = in.scalar<std::string>("solver.init").value_or("gaussian");
    if (init == "gaussian") {
        solver.init.kind = InitSpec::Kind::GaussianBump;
    } else if (init == "random") {
        solver.init.kind = InitSpec::Kind::Random;
    } else if (init == "file") {
        solver.init.kind = InitSpec::Kind::File;
    } else {
        in.fail(in.line_of("solver.init"), "solver.init: expected gaussian, random or file");
    }
    if (auto c = in.list<double>("solver.init_center")) solver.init.center = *c;
    in.assign("solver.init_width", solver.init.width);
    in.assign("solver.init_file", solver.init.path);
    guarded(in, 0, [&] { solver.validate(); });
    if (grid && solver.init.center.size() > static_cast<std::size_t>(grid->dims())) {
        in.fail(in.line_of("solver.init_center"), "solver.init_center: more entries than axes");
    }
    int starts = 1;
    in.assign("solver.starts", starts);
    if (starts < 1) in.fail(in.line_of("solver.starts"), "solver.starts must be >= 1");

    // Analysis and output.
    AnalysisOptions analysis;
    if (auto t = in.list<double>("analysis.thresholds")) analysis.thresholds = *t;
    for (double t : analysis.thresholds) {
        if (!(t >= 0.0)) in.fail(in.line_of("analysis.thresholds"), "analysis.thresholds must be >= 0");
    }
    if (auto d = in.list<double>("analysis.dipole_separations")) analysis.dipole_separations = *d;
    OutputOptions output;
    if (auto d = in.scalar<std::string>("output.dir")) output.dir = *d;
    in.assign("output.slices", output.slices);
    in.assign("output.field", output.field);

    if (!in.issues.empty()) {
        std::stable_sort(in.issues.begin(), in.issues.end(),
                         [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
        throw ConfigError(std::move(in.issues));
    }
    return RunConfig{std::move(*grid), std::move(*model), std::move(solver), starts,
                     std::move(analysis), std::move(output)};
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{0, "cannot open config file " + path.string()}});
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), overrides);
}

std::string render_config(const RunConfig& c) {
    std::ostringstream s;
    s << std::setprecision(17);
    auto join = [&](const auto& values) {
        std::ostringstream out;
        out << std::setprecision(17);
        for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << values[i];
        return out.str();
    };
    std::vector<double> widths;
    std::vector<std::size_t> points;
    for (const Axis& a : c.grid.axes()) {
        widths.push_back(a.half_width);
        points.push_back(a.points);
    }
    s << "grid.N = " << c.grid.dims() << "\n"
      << "grid.m = " << c.grid.confined_dims() << "\n"
      << "grid.L = " << join(widths) << "\n"
      << "grid.n = " << join(points) << "\n";
    for (const auto& t : c.model.terms()) s << "model.term = " << t.coefficient << " " << t.exponent << "\n";

    const auto& k = c.solver.constraint;
    switch (k.kind()) {
        case SymmetryConstraint::Kind::FullSpace: s << "constraint.kind = full\n"; break;
        case SymmetryConstraint::Kind::KOdd: s << "constraint.kind = kodd\nconstraint.k = " << k.k() << "\n"; break;
        case SymmetryConstraint::Kind::CyclicOdd:
            s << "constraint.kind = cyclic_odd\nconstraint.l = " << k.l() << "\n";
            break;
        case SymmetryConstraint::Kind::GInvariant:
            s << "constraint.kind = ginvariant\n";
            for (const auto& g : k.generators()) {
                s << "constraint.generator =";
                for (int i = 0; i < g.map.dims(); ++i) {
                    const auto iu = static_cast<std::size_t>(i);
                    s << " " << g.map.sign[iu] * (g.map.source[iu] + 1);
                }
                s << " ; " << g.parity << "\n";
            }
            break;
    }

    const auto& v = c.solver;
    s << "solver.max_iters = " << v.max_iters << "\n"
      << "solver.grad_tol = " << v.grad_tol << "\n"
      << "solver.lin_tol = " << v.lin_tol << "\n"
      << "solver.seed = " << v.seed << "\n";
    if (const auto* f = std::get_if<FixedStep>(&v.step)) {
        s << "solver.step = fixed\nsolver.eta = " << f->eta << "\n";
    } else {
        const auto& a = std::get<ArmijoStep>(v.step);
        s << "solver.step = armijo\n"
          << "solver.c1 = " << a.c1 << "\n"
          << "solver.backtrack = " << a.backtrack << "\n"
          << "solver.initial_step = " << a.initial_step << "\n"
          << "solver.max_backtracks = " << a.max_backtracks << "\n";
    }
    switch (v.init.kind) {
        case InitSpec::Kind::GaussianBump: s << "solver.init = gaussian\n"; break;
        case InitSpec::Kind::Random: s << "solver.init = random\n"; break;
        case InitSpec::Kind::File: s << "solver.init = file\nsolver.init_file = " << v.init.path << "\n"; break;
    }
    if (!v.init.center.empty()) s << "solver.init_center = " << join(v.init.center) << "\n";
    s << "solver.init_width = " << v.init.width << "\n"
      << "solver.starts = " << c.starts << "\n";
    s << "analysis.thresholds = " << join(c.analysis.thresholds) << "\n";
    if (!c.analysis.dipole_separations.empty()) {
        s << "analysis.dipole_separations = " << join(c.analysis.dipole_separations) << "\n";
    }
    s << "output.dir = " << c.output.dir.string() << "\n"
      << "output.slices = " << (c.output.slices ? "true" : "false") << "\n"
      << "output.field = " << (c.output.field ? "true" : "false") << "\n";
    return s.str();
}

}  // namespace pcnls

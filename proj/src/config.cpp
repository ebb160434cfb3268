#include "csgs/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csgs/errors.hpp"
#include "csgs/report_csv.hpp"

namespace csgs {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(fmt::format("{}: '{}' is not a finite number", where, text));
    return v;
}

long long to_integer(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(fmt::format("{}: '{}' is not an integer", where, text));
    return v;
}

bool to_bool(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t == "true") return true;
    if (t == "false") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean (expected true|false)", where, text));
}

// Tracks which keys were read so unknown ones can be reported.
class Section {
public:
    Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool present() const { return tree_ != nullptr; }
    std::string where(const std::string& key) const { return fmt::format("[{}] {}", name_, key); }

    std::optional<std::string> get(const std::string& key) {
        used_.insert(key);
        if (!tree_) return std::nullopt;
        auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        return trim(child->data());
    }

    std::string require(const std::string& key) {
        auto v = get(key);
        if (!v) throw ConfigError(fmt::format("{}: missing required key", where(key)));
        return *v;
    }

    void read(const std::string& key, double& out) {
        if (auto v = get(key)) out = to_double(*v, where(key));
    }
    void read(const std::string& key, int& out) {
        if (auto v = get(key)) {
            const long long x = to_integer(*v, where(key));
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw ConfigError(fmt::format("{}: {} is out of range", where(key), x));
            out = static_cast<int>(x);
        }
    }
    void read(const std::string& key, bool& out) {
        if (auto v = get(key)) out = to_bool(*v, where(key));
    }
    void read(const std::string& key, std::string& out) {
        if (auto v = get(key)) out = *v;
    }

    void reject_unknown() const {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_) {
            if (!used_.count(key)) throw ConfigError(fmt::format("{}: unknown key", where(key)));
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::set<std::string> used_;
};

template <class F>
void checked(const std::string& where, F&& f) {
    try {
        f();
    } catch (const InvalidArgument& e) {
        throw ConfigError(fmt::format("{}: {}", where, e.what()));
    }
}

PotentialDef parse_potential(Section& s, const std::string& key, const PotentialDef& fallback) {
    auto v = s.get(key);
    if (!v) return fallback;
    PotentialDef def;
    checked(s.where(key), [&] { def = PotentialDef::parse(*v); });
    return def;
}

void check_delta(double delta, const std::string& where) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError(fmt::format("{}: delta must lie in (0,1) (got {})", where, delta));
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_double(item, where));
    return out;
}

// The INI reader only knows ';' comments; '#' lines are accepted too.
std::string strip_hash_comments(const std::string& text) {
    std::istringstream in(text);
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (!t.empty() && t[0] == '#') line.clear();
        out += line;
        out += '\n';
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(strip_hash_comments(text));
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }

    static const std::set<std::string> known{"grid",    "problem", "potentials", "reference", "solver",
                                             "sweep",   "sobolev", "compare",    "pohozaev",  "output"};
    std::map<std::string, const pt::ptree*> sections;
    for (const auto& [name, child] : tree) {
        if (!known.count(name)) throw ConfigError(fmt::format("[{}]: unknown section", name));
        if (!child.data().empty()) throw ConfigError(fmt::format("{}: key outside any section", name));
        sections[name] = &child;
    }
    auto section = [&](const std::string& name) {
        auto it = sections.find(name);
        return Section(it == sections.end() ? nullptr : it->second, name);
    };

    RunConfig cfg;

    Section grid = section("grid");
    if (!grid.present()) throw ConfigError("[grid]: missing required section");
    grid.read("dim", cfg.grid.dim);
    grid.read("half_width", cfg.grid.half_width);
    grid.read("points", cfg.grid.points);
    if (auto b = grid.get("boundary")) checked(grid.where("boundary"), [&] { cfg.grid.boundary = parse_boundary(*b); });
    if (auto m = grid.get("laplacian")) checked(grid.where("laplacian"), [&] { cfg.grid.laplacian = parse_laplacian_mode(*m); });
    checked("[grid]", [&] { cfg.grid.validate(); });
    grid.reject_unknown();

    Section problem = section("problem");
    if (!problem.present()) throw ConfigError("[problem]: missing required section");
    cfg.problem.dim = cfg.grid.dim;
    cfg.problem.p = to_double(problem.require("p"), problem.where("p"));
    cfg.problem.q = to_double(problem.require("q"), problem.where("q"));
    problem.read("mu", cfg.problem.mu);
    checked("[problem]", [&] { cfg.problem.validate(); });
    problem.reject_unknown();

    Section pot = section("potentials");
    cfg.potentials[0] = parse_potential(pot, "V1", cfg.potentials[0]);
    cfg.potentials[1] = parse_potential(pot, "V2", cfg.potentials[1]);
    cfg.potentials[2] = parse_potential(pot, "lambda", cfg.potentials[2]);
    pot.read("delta", cfg.delta);
    check_delta(cfg.delta, pot.where("delta"));
    if (auto m = pot.get("mode")) checked(pot.where("mode"), [&] { cfg.mode = parse_validation_mode(*m); });
    pot.read("tail_tol", cfg.validation.tail_tol);
    if (!(cfg.validation.tail_tol > 0.0))
        throw ConfigError(fmt::format("{}: must be positive (got {})", pot.where("tail_tol"), cfg.validation.tail_tol));
    pot.read("shell_fraction", cfg.validation.shell_fraction);
    if (!(cfg.validation.shell_fraction > 0.0 && cfg.validation.shell_fraction < 1.0))
        throw ConfigError(fmt::format("{}: must lie in (0,1) (got {})", pot.where("shell_fraction"),
                                      cfg.validation.shell_fraction));
    pot.read("estimate_nu", cfg.validation.estimate_spectrum);
    pot.read("finite_differences", cfg.validation.force_finite_differences);
    pot.reject_unknown();

    Section ref = section("reference");
    if (ref.present()) {
        ReferencePotentials r;
        const char* keys[3] = {"V1", "V2", "lambda"};
        for (int i = 0; i < 3; ++i) {
            const std::string text = ref.require(keys[i]);
            checked(ref.where(keys[i]), [&] { r.defs[static_cast<std::size_t>(i)] = PotentialDef::parse(text); });
        }
        ref.read("delta", r.delta);
        check_delta(r.delta, ref.where("delta"));
        ref.reject_unknown();
        cfg.reference = r;
    }

    Section solver = section("solver");
    solver.read("max_iters", cfg.solver.max_iters);
    solver.read("grad_tol", cfg.solver.grad_tol);
    solver.read("step0", cfg.solver.step0);
    solver.read("armijo_factor", cfg.solver.armijo_factor);
    solver.read("armijo_c", cfg.solver.armijo_c);
    solver.read("recenter_every", cfg.solver.recenter_every);
    if (auto s = solver.get("seed")) {
        const long long x = to_integer(*s, solver.where("seed"));
        if (x < 0) throw ConfigError(fmt::format("{}: must be >= 0 (got {})", solver.where("seed"), x));
        cfg.solver.seed = static_cast<std::uint64_t>(x);
    }
    if (auto i = solver.get("init")) checked(solver.where("init"), [&] { cfg.solver.init = parse_init_kind(*i); });
    solver.read("init_file", cfg.init_file);
    checked("[solver]", [&] { cfg.solver.validate(); });
    if (cfg.solver.init == InitKind::file && cfg.init_file.empty())
        throw ConfigError(fmt::format("{}: required when init = file", solver.where("init_file")));
    solver.reject_unknown();

    Section sweep = section("sweep");
    if (auto list = sweep.get("mu_values")) cfg.mu_values = parse_list(*list, sweep.where("mu_values"));
    for (std::size_t i = 0; i < cfg.mu_values.size(); ++i) {
        if (cfg.mu_values[i] < 0.0)
            throw ConfigError(fmt::format("{}: entries must be >= 0 (got {})", sweep.where("mu_values"), cfg.mu_values[i]));
        if (i > 0 && !(cfg.mu_values[i] > cfg.mu_values[i - 1]))
            throw ConfigError(fmt::format("{}: entries must be strictly increasing ({} follows {})",
                                          sweep.where("mu_values"), cfg.mu_values[i], cfg.mu_values[i - 1]));
    }
    sweep.read("cold_start_check", cfg.cold_start_check);
    if (auto s = sweep.get("sobolev_constant")) {
        const double x = to_double(*s, sweep.where("sobolev_constant"));
        if (!(x > 0.0)) throw ConfigError(fmt::format("{}: must be positive (got {})", sweep.where("sobolev_constant"), x));
        cfg.sobolev_constant = x;
    }
    sweep.reject_unknown();

    Section sob = section("sobolev");
    sob.read("half_width", cfg.sobolev_half_width);
    sob.read("points", cfg.sobolev_points);
    sob.read("max_iters", cfg.sobolev.max_iters);
    sob.read("rel_tol", cfg.sobolev.rel_tol);
    checked("[sobolev]", [&] {
        GridSpec{3, cfg.sobolev_half_width, cfg.sobolev_points, Boundary::periodic, LaplacianMode::spectral}.validate();
    });
    if (cfg.sobolev.max_iters < 0)
        throw ConfigError(fmt::format("{}: must be >= 0 (got {})", sob.where("max_iters"), cfg.sobolev.max_iters));
    if (!(cfg.sobolev.rel_tol > 0.0))
        throw ConfigError(fmt::format("{}: must be positive (got {})", sob.where("rel_tol"), cfg.sobolev.rel_tol));
    sob.reject_unknown();

    Section cmp = section("compare");
    cmp.read("margin", cfg.compare_margin);
    if (cfg.compare_margin < 0.0)
        throw ConfigError(fmt::format("{}: must be >= 0 (got {})", cmp.where("margin"), cfg.compare_margin));
    cmp.reject_unknown();

    Section poh = section("pohozaev");
    poh.read("field", cfg.pohozaev_field);
    poh.reject_unknown();

    Section out = section("output");
    out.read("dir", cfg.output_dir);
    if (cfg.output_dir.empty()) throw ConfigError(fmt::format("{}: must not be empty", out.where("dir")));
    out.reject_unknown();

    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    const auto d = [](double x) { return format_double(x); };
    const auto b = [](bool x) { return x ? "true" : "false"; };
    std::string out;
    out += fmt::format("[grid]\ndim = {}\nhalf_width = {}\npoints = {}\nboundary = {}\nlaplacian = {}\n\n", cfg.grid.dim,
                       d(cfg.grid.half_width), cfg.grid.points, to_string(cfg.grid.boundary),
                       to_string(cfg.grid.laplacian));
    out += fmt::format("[problem]\np = {}\nq = {}\nmu = {}\n\n", d(cfg.problem.p), d(cfg.problem.q), d(cfg.problem.mu));
    out += fmt::format(
        "[potentials]\nV1 = {}\nV2 = {}\nlambda = {}\ndelta = {}\nmode = {}\ntail_tol = {}\nshell_fraction = {}\n"
        "estimate_nu = {}\nfinite_differences = {}\n\n",
        cfg.potentials[0].to_string(), cfg.potentials[1].to_string(), cfg.potentials[2].to_string(), d(cfg.delta),
        to_string(cfg.mode), d(cfg.validation.tail_tol), d(cfg.validation.shell_fraction),
        b(cfg.validation.estimate_spectrum), b(cfg.validation.force_finite_differences));
    if (cfg.reference) {
        const auto& r = *cfg.reference;
        out += fmt::format("[reference]\nV1 = {}\nV2 = {}\nlambda = {}\ndelta = {}\n\n", r.defs[0].to_string(),
                           r.defs[1].to_string(), r.defs[2].to_string(), d(r.delta));
    }
    const auto& s = cfg.solver;
    out += fmt::format(
        "[solver]\nmax_iters = {}\ngrad_tol = {}\nstep0 = {}\narmijo_factor = {}\narmijo_c = {}\nrecenter_every = {}\n"
        "seed = {}\ninit = {}\ninit_file = {}\n\n",
        s.max_iters, d(s.grad_tol), d(s.step0), d(s.armijo_factor), d(s.armijo_c), s.recenter_every, s.seed,
        to_string(s.init), cfg.init_file);
    std::string mus;
    for (std::size_t i = 0; i < cfg.mu_values.size(); ++i) mus += (i ? ", " : "") + d(cfg.mu_values[i]);
    out += fmt::format("[sweep]\nmu_values = {}\ncold_start_check = {}\n", mus, b(cfg.cold_start_check));
    if (cfg.sobolev_constant) out += fmt::format("sobolev_constant = {}\n", d(*cfg.sobolev_constant));
    out += fmt::format("\n[sobolev]\nhalf_width = {}\npoints = {}\nmax_iters = {}\nrel_tol = {}\n\n",
                       d(cfg.sobolev_half_width), cfg.sobolev_points, cfg.sobolev.max_iters, d(cfg.sobolev.rel_tol));
    out += fmt::format("[compare]\nmargin = {}\n\n", d(cfg.compare_margin));
    out += fmt::format("[pohozaev]\nfield = {}\n\n", cfg.pohozaev_field);
    out += fmt::format("[output]\ndir = {}\n", cfg.output_dir);
    return out;
}

}  // namespace csgs

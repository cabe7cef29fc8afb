#include <brownedge/catalog.hpp>
#include <brownedge/cli.hpp>
#include <brownedge/density.hpp>
#include <brownedge/geometry.hpp>
#include <brownedge/parallel.hpp>
#include <brownedge/rmt.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

namespace brownedge {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::string subcommand;
    std::string model_path;
    std::string model_json;
    std::string example;
    std::string t_list;
    std::string box;
    int res = 200;
    int refine = 0;
    std::string out_dir = ".";
    std::string format = "csv";
    std::string seeds = "1,2,3,4";
    double eta = 0;
    int N = 512;
    std::string point;
    std::string direction;
    std::string s_list;
};

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct Context {
    RunConfig cfg;
    SpectralModel model;
    std::vector<double> times;
    json config_json;
    std::string hash;
    std::ostream& out;

    fs::path path(const std::string& name) const { return fs::path(cfg.out_dir) / name; }

    std::ofstream open(const std::string& name) const {
        std::ofstream f(path(name), std::ios::binary);
        if (!f) throw ConfigError("cannot write " + path(name).string());
        return f;
    }

    std::ofstream open_csv(const std::string& name, const std::string& header) const {
        auto f = open(name);
        f << "# config " << hash << ' ' << config_json.dump() << '\n' << header << '\n' << std::setprecision(17);
        return f;
    }

    bool wants(const std::string& fmt) const {
        std::stringstream ss(cfg.format);
        std::string item;
        while (std::getline(ss, item, ','))
            if (item == fmt) return true;
        return false;
    }

    GridSpec grid(double t) const {
        if (cfg.box.empty()) return default_grid(model, t, cfg.res, cfg.refine);
        const auto b = parse_list(cfg.box, "--box");
        if (b.size() != 4) throw ConfigError("--box expects x0,y0,x1,y1");
        return GridSpec({b[0], b[1]}, {b[2], b[3]}, cfg.res, cfg.res, cfg.refine);
    }

    double single_t() const {
        if (times.size() != 1) throw ConfigError(cfg.subcommand + " expects a single --t value");
        return times.front();
    }

    cplx point() const {
        const auto p = parse_list(cfg.point, "--point");
        if (p.size() != 2) throw ConfigError("--point expects re,im");
        return {p[0], p[1]};
    }
};

SpectralModel load_model(const RunConfig& cfg) {
    const int sources = !cfg.model_path.empty() + !cfg.model_json.empty() + !cfg.example.empty();
    if (sources != 1) throw ConfigError("give exactly one of --model, --model-json, --example");
    if (!cfg.example.empty()) return catalog(cfg.example).model;
    try {
        if (!cfg.model_json.empty()) return SpectralModel::from_json(json::parse(cfg.model_json));
        std::ifstream f(cfg.model_path);
        if (!f) throw ConfigError("cannot read model file " + cfg.model_path);
        return SpectralModel::from_json(json::parse(f));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model JSON does not parse: ") + e.what());
    }
}

// Evaluates fn on every grid node (row-major, i fastest) in parallel.
template <class F>
std::vector<double> sweep(const GridSpec& g, F&& fn) {
    std::vector<double> v(static_cast<std::size_t>(g.nx) * g.ny);
    parallel_for(v.size(), [&](std::size_t k) {
        v[k] = fn(g.at(static_cast<int>(k % g.nx), static_cast<int>(k / g.nx)));
    });
    return v;
}

void write_grid_csv(const Context& ctx, const std::string& name, const std::string& column, const GridSpec& g,
                    const std::vector<double>& vals) {
    auto f = ctx.open_csv(name, "re,im," + column);
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const cplx z = g.at(static_cast<int>(k % g.nx), static_cast<int>(k / g.nx));
        f << z.real() << ',' << z.imag() << ',' << vals[k] << '\n';
    }
}

// 16-bit binary PGM; gray = value / top clamped to [0, 1], first row is the largest imaginary part.
void write_pgm(const Context& ctx, const std::string& name, const GridSpec& g, const std::vector<double>& vals,
               double top) {
    auto f = ctx.open(name);
    f << "P5\n" << g.nx << ' ' << g.ny << "\n65535\n";
    for (int j = g.ny - 1; j >= 0; --j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = std::clamp(vals[static_cast<std::size_t>(j) * g.nx + i] / top, 0.0, 1.0);
            const auto q = static_cast<std::uint16_t>(std::lround(x * 65535));
            f.put(static_cast<char>(q >> 8));
            f.put(static_cast<char>(q & 0xff));
        }
}

std::string t_tag(std::size_t i, std::size_t n) { return n == 1 ? "" : "_t" + std::to_string(i); }

int cmd_density(const Context& ctx, bool regularized) {
    double eta = ctx.cfg.eta;
    if (regularized && !(eta > 0)) eta = 0.05;
    for (std::size_t i = 0; i < ctx.times.size(); ++i) {
        const double t = ctx.times[i];
        const GridSpec g = ctx.grid(t);
        const auto vals = sweep(g, [&](cplx z) {
            return regularized ? rho_reg(ctx.model, z, eta, t) : rho(ctx.model, z, t);
        });
        const std::string base = (regularized ? "density_reg" : "density") + t_tag(i, ctx.times.size());
        if (ctx.wants("csv") || ctx.wants("json")) write_grid_csv(ctx, base + ".csv", "rho", g, vals);
        if (ctx.wants("pgm")) write_pgm(ctx, base + ".pgm", g, vals, 1 / (std::numbers::pi * t));
        ctx.out << "t=" << t << ": wrote " << ctx.path(base).string() << " (" << g.nx << "x" << g.ny << ")\n";
    }
    return 0;
}

int cmd_vfield(const Context& ctx) {
    for (std::size_t i = 0; i < ctx.times.size(); ++i) {
        const double t = ctx.times[i];
        const GridSpec g = ctx.grid(t);
        const auto vals = sweep(g, [&](cplx z) { return solve_v(ctx.model, z, ctx.cfg.eta, t).v; });
        const std::string base = "vfield" + t_tag(i, ctx.times.size());
        write_grid_csv(ctx, base + ".csv", "v", g, vals);
        ctx.out << "t=" << t << ": wrote " << ctx.path(base + ".csv").string() << '\n';
    }
    return 0;
}

int cmd_boundary(const Context& ctx) {
    for (std::size_t i = 0; i < ctx.times.size(); ++i) {
        const double t = ctx.times[i];
        const auto trace = trace_boundary(ctx.model, t, ctx.grid(t));
        const std::string name = "boundary" + t_tag(i, ctx.times.size()) + ".csv";
        auto f = ctx.open(name);
        f << "# config " << ctx.hash << ' ' << ctx.config_json.dump() << '\n';
        write_boundary_csv(f, trace.curves);
        const auto crit = critical_boundary_points(find_critical_points(ctx.model, default_critical_box(ctx.model, 81)), t);
        ctx.out << "t=" << t << ": " << trace.curves.size() << " boundary curve(s) -> " << ctx.path(name).string() << '\n';
        for (const auto& c : crit)
            ctx.out << "  critical boundary point (" << c.z.real() << ", " << c.z.imag() << ") " << to_string(c.kind)
                    << '\n';
        for (const auto& d : trace.diagnostics) ctx.out << "  note: " << d << '\n';
    }
    return 0;
}

int cmd_critical(const Context& ctx) {
    const auto pts = find_critical_points(ctx.model, default_critical_box(ctx.model, std::max(ctx.cfg.res, 41)));
    json arr = json::array();
    for (const auto& c : pts) {
        json j = to_json(c);
        if (!ctx.times.empty()) j["on_boundary"] = on_boundary(c.f, ctx.times.front());
        arr.push_back(j);
        ctx.out << "critical point at (" << c.z.real() << ", " << c.z.imag() << "): " << to_string(c.kind)
                << ", t* = " << c.t_star << '\n';
    }
    ctx.open("critical.json") << json{{"config_hash", ctx.hash}, {"points", arr}}.dump(2) << '\n';
    return 0;
}

int cmd_edge_profile(const Context& ctx) {
    const double t = ctx.single_t();
    const cplx z0 = ctx.point();
    Vec2 dir(1, 0);
    if (!ctx.cfg.direction.empty()) {
        const auto d = parse_list(ctx.cfg.direction, "--direction");
        if (d.size() != 2) throw ConfigError("--direction expects dx,dy");
        dir = {d[0], d[1]};
    } else if (const Vec2 g = grad_f(ctx.model, z0); g.norm() > 0) {
        dir = g.normalized();
    }
    std::vector<double> s = ctx.cfg.s_list.empty() ? std::vector<double>{} : parse_list(ctx.cfg.s_list, "--s");
    if (s.empty())
        for (int k = 0; k < 10; ++k) s.push_back(1e-3 * std::pow(10.0, 1.5 * k / 9));
    const EdgeReport r = edge_profile(ctx.model, z0, t, dir, s);
    json j{{"config_hash", ctx.hash},
           {"z0", {z0.real(), z0.imag()}},
           {"direction", {r.direction(0), r.direction(1)}},
           {"type", to_string(r.type)},
           {"samples", r.samples},
           {"slope", r.slope},
           {"fit_residual", r.fit_residual},
           {"exponent", r.exponent},
           {"prefactor", r.prefactor},
           {"s", r.s},
           {"rho", r.rho}};
    if (r.type == EdgeType::sharp) j["jump"] = {{"fitted", r.fitted_jump}, {"analytic", r.jump}};
    if (r.type == EdgeType::quadratic)
        j["quadratic"] = {{"fitted", r.fitted_prefactor},
                          {"predicted", r.predicted_prefactor},
                          {"Q", {{r.Q(0, 0), r.Q(0, 1)}, {r.Q(1, 0), r.Q(1, 1)}}}};
    ctx.open("edge_profile.json") << j.dump(2) << '\n';
    ctx.out << to_string(r.type) << " edge, slope " << r.slope << '\n';
    return 0;
}

int cmd_connectivity(const Context& ctx) {
    std::vector<double> ts = ctx.times;
    std::sort(ts.begin(), ts.end());
    const GridSpec g = ctx.grid(ts.back());
    const auto scan = connectivity_scan(ctx.model, ts, g);
    std::string counts;
    for (int c : scan.counts) counts += (counts.empty() ? "" : ",") + std::to_string(c);
    ctx.out << counts << " nonincreasing: " << (scan.nonincreasing ? "true" : "false") << '\n';
    ctx.open("connectivity.json") << json{{"config_hash", ctx.hash},
                                          {"t", scan.t},
                                          {"counts", scan.counts},
                                          {"nonincreasing", scan.nonincreasing}}
                                         .dump(2)
                                  << '\n';
    return 0;
}

int cmd_assumption(const Context& ctx) {
    json arr = json::array();
    for (double t : ctx.times) {
        const auto rep = assumption_check(ctx.model, t, std::max(ctx.cfg.res / 4, 16));
        json w = json::array();
        for (const auto& x : rep.witnesses) w.push_back({{"re", x.z.real()}, {"im", x.z.imag()}, {"f", x.f}});
        arr.push_back({{"t", t},
                       {"holds", rep.holds},
                       {"min_f", std::isfinite(rep.min_f) ? json(rep.min_f) : json("inf")},
                       {"certificate", rep.certificate},
                       {"witnesses", w}});
        ctx.out << "t=" << t << ": assumption " << (rep.holds ? "holds" : "fails");
        if (!rep.certificate.empty()) ctx.out << " (" << rep.certificate << ")";
        else ctx.out << ", min f on spec(a) = " << rep.min_f;
        ctx.out << '\n';
    }
    ctx.open("assumption.json") << json{{"config_hash", ctx.hash}, {"reports", arr}}.dump(2) << '\n';
    return 0;
}

int cmd_validate(const Context& ctx) {
    const double t = ctx.single_t();
    const double eta = ctx.cfg.eta > 0 ? ctx.cfg.eta : 0.05;
    std::vector<std::uint64_t> seeds;
    for (double s : parse_list(ctx.cfg.seeds, "--seeds")) {
        if (!(s >= 1) || s != std::floor(s)) throw ConfigError("--seeds must be positive integers");
        seeds.push_back(static_cast<std::uint64_t>(s));
    }
    const auto rep = validate(ctx.model, t, ctx.grid(t), ctx.cfg.N, eta, seeds);
    json j = to_json(rep);
    j["config_hash"] = ctx.hash;
    ctx.open("validation.json") << j.dump(2) << '\n';
    if (ctx.wants("csv")) {
        auto f = ctx.open_csv("validation.csv", "re,im,interior,v_hat,v,f_hat,f,rho_hat,rho");
        for (const auto& r : rep.rows)
            f << r.z.real() << ',' << r.z.imag() << ',' << r.interior << ',' << r.v_hat << ',' << r.v << ','
              << r.f_hat << ',' << r.f << ',' << r.rho_hat << ',' << r.rho << '\n';
    }
    ctx.out << "median v error " << rep.median_v_error << ", median rho error " << rep.median_rho_error << '\n';
    return 0;
}

int cmd_example(Context& ctx, const std::string& name) {
    const CatalogEntry e = catalog(name);
    ctx.model = e.model;
    if (ctx.cfg.t_list.empty()) ctx.times = e.times;
    ctx.out << name << ": " << e.description << '\n';
    const auto crit = find_critical_points(e.model, default_critical_box(e.model, 81));
    json summary{{"example", name}, {"model", e.model.to_json()}, {"config_hash", ctx.hash}};
    json cj = json::array();
    for (const auto& c : crit) cj.push_back(to_json(c));
    summary["critical_points"] = cj;
    json per_t = json::array();
    for (std::size_t i = 0; i < ctx.times.size(); ++i) {
        const double t = ctx.times[i];
        const GridSpec g = ctx.grid(t);
        const auto rep = assumption_check(e.model, t, 64);
        const auto topo = euler_annulus_probe(e.model, t, g);
        const auto trace = trace_boundary(e.model, t, g);
        const std::string tag = "_t" + std::to_string(i);
        {
            auto f = ctx.open("boundary" + tag + ".csv");
            f << "# config " << ctx.hash << ' ' << ctx.config_json.dump() << '\n';
            write_boundary_csv(f, trace.curves);
        }
        const auto dens = sweep(g, [&](cplx z) { return rho(e.model, z, t); });
        write_grid_csv(ctx, "density" + tag + ".csv", "rho", g, dens);
        if (ctx.wants("pgm")) write_pgm(ctx, "density" + tag + ".pgm", g, dens, 1 / (std::numbers::pi * t));
        per_t.push_back({{"t", t},
                         {"assumption_holds", rep.holds},
                         {"components", topo.components},
                         {"holes", topo.holes},
                         {"boundary_curves", trace.curves.size()}});
        ctx.out << "t=" << t << ": assumption " << (rep.holds ? "holds" : "fails") << ", components "
                << topo.components << ", holes " << topo.holes << ", boundary curves " << trace.curves.size() << '\n';
    }
    summary["times"] = per_t;
    ctx.open("example_" + name + ".json") << summary.dump(2) << '\n';
    return 0;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool needs_t = true) {
    sub->add_option("--model", cfg.model_path, "model JSON file");
    sub->add_option("--model-json", cfg.model_json, "inline model JSON");
    sub->add_option("--example", cfg.example, "catalog model: a4, haar, tangent, powerlaw, jacobi");
    auto* t = sub->add_option("--t", cfg.t_list, "time or comma separated list of times");
    if (!needs_t) t->description("optional time (marks critical points on the boundary)");
    sub->add_option("--box", cfg.box, "x0,y0,x1,y1");
    sub->add_option("--res", cfg.res, "grid points per axis")->check(CLI::Range(2, 100000));
    sub->add_option("--refine", cfg.refine, "refinement levels near sign changes")->check(CLI::Range(0, 4));
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", cfg.format, "csv, json, pgm (comma separated)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    std::string example_name;
    CLI::App app{"Brown measure of a + sqrt(t) x: densities, edges, geometry and random-matrix checks"};
    app.require_subcommand(1);
    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {{"density", "grid of the density"},
                        {"density-reg", "grid of the eta-regularized density"},
                        {"vfield", "grid of v_t(z, eta)"},
                        {"boundary", "boundary curves of D_t as CSV"},
                        {"critical", "critical points of f as JSON"},
                        {"edge-profile", "local fit of the density along a ray"},
                        {"connectivity", "component counts over a list of times"},
                        {"assumption", "check f > 1/t on spec(a)"},
                        {"validate", "random-matrix cross-validation"}};
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, cfg, std::string(s.name) != "critical");
        if (std::string(s.name) == "density-reg" || std::string(s.name) == "vfield" ||
            std::string(s.name) == "validate")
            sub->add_option("--eta", cfg.eta, "regularization eta")->check(CLI::NonNegativeNumber);
        if (std::string(s.name) == "validate") {
            sub->add_option("--N", cfg.N, "matrix size")->check(CLI::Range(2, 1 << 14));
            sub->add_option("--seeds", cfg.seeds, "comma separated seeds");
        }
        if (std::string(s.name) == "edge-profile") {
            sub->add_option("--point", cfg.point, "boundary point re,im")->required();
            sub->add_option("--direction", cfg.direction, "dx,dy (default: grad f direction)");
            sub->add_option("--s", cfg.s_list, "comma separated offsets");
        }
    }
    auto* ex = app.add_subcommand("example", "run a catalog example end to end");
    ex->add_option("name", example_name, "a4, haar, tangent, powerlaw, jacobi")->required();
    ex->add_option("--t", cfg.t_list, "override the example times");
    ex->add_option("--res", cfg.res, "grid points per axis")->check(CLI::Range(2, 100000));
    ex->add_option("--out", cfg.out_dir, "output directory");
    ex->add_option("--format", cfg.format, "csv, pgm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << '\n';
        return 1;
    }

    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        if (cfg.subcommand == "example") cfg.example = example_name;
        const SpectralModel model = load_model(cfg);
        std::vector<double> times = cfg.t_list.empty() ? std::vector<double>{} : parse_list(cfg.t_list, "--t");
        if (times.empty() && !cfg.example.empty() && cfg.subcommand != "critical") times = catalog(cfg.example).times;
        for (double t : times)
            if (!(t > 0) || !std::isfinite(t)) throw ConfigError("--t values must be positive");
        if (times.empty() && cfg.subcommand != "critical" && cfg.subcommand != "example")
            throw ConfigError("--t is required");

        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (!fs::is_directory(cfg.out_dir)) throw ConfigError("output directory " + cfg.out_dir + " is not usable");

        json cj{{"subcommand", cfg.subcommand}, {"model", model.to_json()}, {"t", times},        {"box", cfg.box},
                {"res", cfg.res},               {"refine", cfg.refine},     {"eta", cfg.eta},     {"N", cfg.N},
                {"seeds", cfg.seeds},           {"point", cfg.point},       {"direction", cfg.direction},
                {"s", cfg.s_list}};
        std::ostringstream hs;
        hs << std::hex << std::setw(16) << std::setfill('0') << fnv1a(cj.dump());
        Context ctx{cfg, model, times, cj, hs.str(), out};

        const auto& c = cfg.subcommand;
        if (c == "density") return cmd_density(ctx, false);
        if (c == "density-reg") return cmd_density(ctx, true);
        if (c == "vfield") return cmd_vfield(ctx);
        if (c == "boundary") return cmd_boundary(ctx);
        if (c == "critical") return cmd_critical(ctx);
        if (c == "edge-profile") return cmd_edge_profile(ctx);
        if (c == "connectivity") return cmd_connectivity(ctx);
        if (c == "assumption") return cmd_assumption(ctx);
        if (c == "validate") return cmd_validate(ctx);
        if (c == "example") return cmd_example(ctx, example_name);
        throw ConfigError("unknown subcommand " + c);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << json{{"error", e.what()}, {"subcommand", cfg.subcommand}}.dump() << '\n';
        return 2;
    }
}

}  // namespace brownedge

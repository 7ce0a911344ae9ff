// casimir_cli: batch front-end over the image-method kernels and observables.
//
// Reads a JSON run configuration, executes one command, and writes a CSV
// table (plus an SVG line chart for profile commands) under --out.  The CSV
// is the authoritative artifact; rerunning with the same config reproduces
// it byte for byte.  Environment variables are never consulted.
//
// Exit codes: 0 success, 1 invalid configuration (the diagnostic names the
// offending key), 2 accuracy error (a requested tolerance was not met).

#include "CLI11.hpp"
#include "json.hpp"

#include <casimir/algebra.hpp>
#include <casimir/io.hpp>
#include <casimir/observables.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

using namespace casimir;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

/// Strict reader for one JSON object: every key must be consumed, so a typo
/// fails loudly with its full dotted path instead of silently using defaults.
class ParamReader {
public:
    ParamReader(const json& j, std::string prefix) : obj_(j), prefix_(std::move(prefix)) {
        if (!obj_.is_null() && !obj_.is_object()) bad_key(prefix_, "must be an object");
    }

    double num(const std::string& key, double fallback) {
        const json* v = fetch(key);
        if (!v) return fallback;
        if (!v->is_number()) bad_key(path(key), "must be a number");
        return v->get<double>();
    }

    double positive(const std::string& key, double fallback) {
        const double v = num(key, fallback);
        if (!(v > 0.0)) bad_key(path(key), "must be positive");
        return v;
    }

    int integer(const std::string& key, int fallback, int lo, int hi) {
        const json* v = fetch(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) bad_key(path(key), "must be an integer");
        const long long n = v->get<long long>();
        if (n < lo || n > hi)
            bad_key(path(key), "must lie in [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");
        return static_cast<int>(n);
    }

    std::string str(const std::string& key, const std::string& fallback) {
        const json* v = fetch(key);
        if (!v) return fallback;
        if (!v->is_string()) bad_key(path(key), "must be a string");
        return v->get<std::string>();
    }

    void finish() const {
        if (obj_.is_null()) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) bad_key(path(it.key()), "unknown key");
    }

    std::string path(const std::string& key) const { return prefix_ + "." + key; }

private:
    const json* fetch(const std::string& key) {
        seen_.insert(key);
        if (obj_.is_null()) return nullptr;
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    json obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};

struct RunConfig {
    Geometry geo = Geometry::slab(1.0);
    StateSpec state = StateSpec::vacuum();
    double unit = 1.0;  ///< grid length scale: d for a slab, the d key otherwise
    std::string command;
    json params;
    std::string csv_name;
    std::string svg_name;
};

RunConfig parse_config(const json& root, const std::string& command_flag) {
    if (!root.is_object()) throw ConfigError("config root: must be a JSON object");
    for (auto it = root.begin(); it != root.end(); ++it) {
        const std::string& k = it.key();
        if (k != "geometry" && k != "state" && k != "command" && k != "params" &&
            k != "output")
            bad_key(k, "unknown key");
    }

    RunConfig cfg;
    {
        ParamReader g(root.contains("geometry") ? root["geometry"] : json(), "geometry");
        const std::string type = g.str("type", "slab");
        const double d = g.positive("d", 1.0);
        g.finish();
        if (type == "slab")
            cfg.geo = Geometry::slab(d);
        else if (type == "half_space")
            cfg.geo = Geometry::half_space();
        else
            bad_key("geometry.type", "must be \"half_space\" or \"slab\"");
        cfg.unit = d;
    }
    {
        ParamReader s(root.contains("state") ? root["state"] : json(), "state");
        const std::string type = s.str("type", "vacuum");
        const bool has_beta = root.contains("state") && root["state"].contains("beta");
        const double beta = s.num("beta", 0.0);
        s.finish();
        if (type == "vacuum") {
            cfg.state = StateSpec::vacuum();
        } else if (type == "kms") {
            if (!(beta > 0.0)) bad_key("state.beta", "must be a positive number");
            cfg.state = StateSpec::kms(beta);
        } else {
            bad_key("state.type", "must be \"vacuum\" or \"kms\"");
        }
        if (type == "vacuum" && has_beta && !(beta > 0.0))
            bad_key("state.beta", "must be positive when present");
    }

    cfg.command = command_flag;
    if (root.contains("command")) {
        if (!root["command"].is_string()) bad_key("command", "must be a string");
        if (cfg.command.empty()) cfg.command = root["command"].get<std::string>();
    }
    if (cfg.command.empty())
        bad_key("command", "missing: set it in the config or pass --command");

    cfg.params = root.contains("params") ? root["params"] : json();
    {
        ParamReader o(root.contains("output") ? root["output"] : json(), "output");
        cfg.csv_name = o.str("csv", cfg.command + ".csv");
        cfg.svg_name = o.str("svg", cfg.command + ".svg");
        o.finish();
    }
    return cfg;
}

/// Uniform double in [0, 1) from the portable 53-bit draw.
double unit_draw(std::mt19937_64& rng) { return std::ldexp(rng() >> 11, -53); }

std::vector<double> interior_grid(const RunConfig& cfg, ParamReader& p) {
    const double z_min = p.num("z_min", 0.1 * cfg.unit);
    const double z_max = p.num("z_max", 0.9 * cfg.unit);
    const int samples = p.integer("samples", 17, 1, 100000);
    if (!(z_min > 0.0)) bad_key(p.path("z_min"), "must be positive (interior point)");
    if (cfg.geo.kind == GeometryKind::Slab && !(z_max < cfg.geo.d))
        bad_key(p.path("z_max"), "must be less than d (interior point)");
    if (!(z_min <= z_max)) bad_key(p.path("z_min"), "must not exceed z_max");
    if (samples == 1) return {z_min};
    std::vector<double> zs(samples);
    for (int i = 0; i < samples; ++i)
        zs[i] = z_min + (z_max - z_min) * i / double(samples - 1);
    return zs;
}

struct Artifacts {
    CsvTable table;
    std::vector<SvgSeries> svg;  ///< empty: CSV only (check commands)
    SvgOptions svg_opt;
    std::string check_failure;  ///< nonempty: exit 2 after the artifacts land
};

Artifacts run_twopoint(const RunConfig& cfg) {
    ParamReader p(cfg.params, "params");
    const double z = p.num("z", 0.3 * cfg.unit);
    const double dt = p.num("dt", 0.0);
    const double dx = p.num("dx", 0.0);
    const double eps = p.positive("eps", 1e-3 * cfg.unit);
    const int n_max = p.integer("n_max", 200, 1, 100000);
    const double tail_tol = p.positive("tail_tol", 1e-8);
    std::vector<double> zps;
    {
        const double lo = p.num("zp_min", 0.1 * cfg.unit);
        const double hi = p.num("zp_max", 0.9 * cfg.unit);
        const int samples = p.integer("samples", 33, 1, 100000);
        if (!(lo > 0.0)) bad_key("params.zp_min", "must be positive");
        if (cfg.geo.kind == GeometryKind::Slab && !(hi < cfg.geo.d))
            bad_key("params.zp_max", "must be less than d");
        if (!(lo <= hi)) bad_key("params.zp_min", "must not exceed zp_max");
        for (int i = 0; i < samples; ++i)
            zps.push_back(samples == 1 ? lo : lo + (hi - lo) * i / double(samples - 1));
    }
    if (!(z > 0.0)) bad_key("params.z", "must be positive");
    if (cfg.geo.kind == GeometryKind::Slab && !(z < cfg.geo.d))
        bad_key("params.z", "must be less than d");
    p.finish();

    Artifacts out{CsvTable({"z_prime", "re_value", "im_value", "err"}), {}, {}, {}};
    SvgSeries re{"Re W", {}, {}}, im{"Im W", {}, {}};
    const Point4 x{0.0, 0.0, 0.0, z};
    const EpsilonKernel cp = cp_kernel(cfg.state);
    for (double zp : zps) {
        const Point4 xp{-dt, -dx, 0.0, zp};
        complexd v;
        double err;
        if (cfg.geo.kind == GeometryKind::Slab) {
            const auto s =
                casimir_kernel_series(cfg.state, cfg.geo.d, x, xp, eps, {n_max, tail_tol});
            v = s.value;
            err = s.err;
        } else {
            // vacuum core minus its reflection; closed form, roundoff only
            const complexd tau{x.t - xp.t, -eps};
            const double rho2 = (x.x - xp.x) * (x.x - xp.x) + (x.y - xp.y) * (x.y - xp.y);
            const complexd a = cp.term_core(tau, rho2 + (x.z - xp.z) * (x.z - xp.z));
            const complexd b = cp.term_core(tau, rho2 + (x.z + xp.z) * (x.z + xp.z));
            v = a - b;
            err = 1e-15 * (std::abs(a) + std::abs(b));
        }
        out.table.add_row({zp, v.real(), v.imag(), err});
        re.x.push_back(zp);
        re.y.push_back(v.real());
        im.x.push_back(zp);
        im.y.push_back(v.imag());
    }
    out.svg = {re, im};
    out.svg_opt.title = "two-point kernel";
    out.svg_opt.x_label = "z'";
    out.svg_opt.y_label = "W(x, x')";
    return out;
}

Artifacts run_wick_square(const RunConfig& cfg) {
    ParamReader p(cfg.params, "params");
    const auto zs = interior_grid(cfg, p);
    p.finish();
    const auto profile =
        sample_density(cfg.geo, cfg.state, Observable::wick_square(), zs);
    Artifacts out{CsvTable({"z", "value", "err"}), {}, {}, {}};
    SvgSeries s{"wick square", {}, {}};
    for (const auto& smp : profile.samples) {
        out.table.add_row({smp.z, smp.value, smp.err});
        s.x.push_back(smp.z);
        s.y.push_back(smp.value);
    }
    out.svg = {s};
    out.svg_opt.title = "Wick-square density";
    out.svg_opt.x_label = "z";
    out.svg_opt.y_label = "<phi^2>(z)";
    return out;
}

Artifacts run_stress(const RunConfig& cfg) {
    ParamReader p(cfg.params, "params");
    const double xi = p.num("xi", 1.0 / 6.0);
    const auto zs = interior_grid(cfg, p);
    p.finish();
    Artifacts out{CsvTable({"z", "t00", "t11", "t22", "t33", "err"}), {}, {}, {}};
    SvgSeries s00{"T00", {}, {}}, s33{"T33", {}, {}};
    for (double z : zs) {
        double comp[4], err = 0.0;
        for (int mu = 0; mu < 4; ++mu) {
            const auto smp =
                density_sample(cfg.geo, cfg.state, Observable::stress(mu, mu, xi), z);
            comp[mu] = smp.value;
            err = std::max(err, smp.err);
        }
        out.table.add_row({z, comp[0], comp[1], comp[2], comp[3], err});
        s00.x.push_back(z);
        s00.y.push_back(comp[0]);
        s33.x.push_back(z);
        s33.y.push_back(comp[3]);
    }
    out.svg = {s00, s33};
    out.svg_opt.title = "stress-energy diagonal";
    out.svg_opt.x_label = "z";
    out.svg_opt.y_label = "T_mumu(z)";
    return out;
}

Artifacts run_kms_check(const RunConfig& cfg) {
    if (cfg.state.kind != StateKind::KMS)
        bad_key("state.type", "kms-check requires \"kms\"");
    ParamReader p(cfg.params, "params");
    const int pairs = p.integer("pairs", 5, 1, 1000);
    const double tol = p.positive("tol", 1e-4);
    const int window = p.integer("window", 32, 1, 4096);
    const auto seed = static_cast<std::uint64_t>(
        p.integer("seed", 20260817, 0, std::numeric_limits<int>::max()));
    p.finish();

    const double beta = cfg.state.beta;
    const double span = cfg.geo.kind == GeometryKind::Slab ? cfg.geo.d : cfg.unit;
    const double r = 0.05 * span;
    std::mt19937_64 rng(seed);
    const EpsilonKernel K = cfg.geo.kind == GeometryKind::Slab
                                ? slab_kernel(cfg.state, cfg.geo.d, window)
                                : cp_kernel(cfg.state);

    Artifacts out{CsvTable({"pair", "dt", "re_residual", "im_residual", "scale", "err"}),
                  {},
                  {},
                  {}};
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const double z1 = span * (0.25 + 0.5 * unit_draw(rng));
        const double z2 = span * (0.25 + 0.5 * unit_draw(rng));
        const double dt = beta * (0.05 + 0.30 * unit_draw(rng));
        const double dx = 0.3 * span * (unit_draw(rng) - 0.5);
        const TestFunction f = make_bump({0.0, 0.0, 0.0, z1}, {r, r, r, r});
        const TestFunction g = make_bump({dt, dx, 0.0, z2}, {r, r, r, r});
        const auto res = kms_condition_check(cfg.geo, beta, f, g, {}, window);
        const double scale = std::abs(smear2(K, f, g).value);
        out.table.add_row(
            {double(i), dt, res.value.real(), res.value.imag(), scale, res.err});
        worst = std::max(worst, std::abs(res.value) / scale);
        if (std::abs(res.value) > tol * scale && out.check_failure.empty())
            out.check_failure = "kms-check: pair " + std::to_string(i) +
                                " residual exceeds tol * scale";
    }
    std::printf("kms-check: worst relative residual %.3g (tol %.3g)\n", worst, tol);
    return out;
}

Artifacts run_positivity(const RunConfig& cfg) {
    ParamReader p(cfg.params, "params");
    const int samples = p.integer("samples", 10, 1, 10000);
    const int terms = p.integer("terms", 2, 1, 8);
    const double tol = p.positive("tol", 1e-10);
    const int window = p.integer("window", 16, 1, 4096);
    const auto seed = static_cast<std::uint64_t>(
        p.integer("seed", 20260817, 0, std::numeric_limits<int>::max()));
    p.finish();

    const double span = cfg.geo.kind == GeometryKind::Slab ? cfg.geo.d : cfg.unit;
    const EpsilonKernel K = cfg.geo.kind == GeometryKind::Slab
                                ? slab_kernel(cfg.state, cfg.geo.d, window)
                                : cp_kernel(cfg.state);
    std::mt19937_64 rng(seed);

    Artifacts out{CsvTable({"sample", "value", "scale", "err"}), {}, {}, {}};
    for (int s = 0; s < samples; ++s) {
        std::vector<TestFunction> fs;
        std::vector<complexd> cs;
        for (int k = 0; k < terms; ++k) {
            const double r = span * (0.04 + 0.04 * unit_draw(rng));
            const double z = span * (0.2 + 0.6 * unit_draw(rng));
            const double t = 0.3 * span * (unit_draw(rng) - 0.5);
            const double x = 0.3 * span * (unit_draw(rng) - 0.5);
            fs.push_back(make_bump({t, x, 0.0, z}, {r, r, r, r}));
            cs.emplace_back(2.0 * unit_draw(rng) - 1.0, 2.0 * unit_draw(rng) - 1.0);
        }
        complexd form{};
        double scale = 0.0, err = 0.0;
        for (int i = 0; i < terms; ++i)
            for (int j = 0; j < terms; ++j) {
                const auto w = smear2(K, fs[i], fs[j]);
                const complexd c = std::conj(cs[i]) * cs[j];
                form += c * w.value;
                scale += std::abs(c) * std::abs(w.value);
                err += std::abs(c) * w.err;
            }
        out.table.add_row({double(s), form.real(), scale, err});
        if (form.real() < -(tol * scale + 10.0 * err) && out.check_failure.empty())
            out.check_failure =
                "positivity: sample " + std::to_string(s) + " is negative beyond tol";
    }
    return out;
}

Artifacts run_convergence(const RunConfig& cfg) {
    if (cfg.geo.kind != GeometryKind::Slab)
        bad_key("geometry.type", "convergence profiles the slab image series");
    ParamReader p(cfg.params, "params");
    const double d = cfg.geo.d;
    const double z = p.num("z", 0.3 * d);
    const double zp = p.num("zp", 0.617 * d);
    const double dt = p.num("dt", 0.0);
    const double dx = p.num("dx", 0.11 * d);
    const double eps = p.positive("eps", 1e-3 * d);
    const int n_max = p.integer("n_max", 200, 1, 100000);
    if (!(z > 0.0 && z < d)) bad_key("params.z", "must lie inside (0, d)");
    if (!(zp > 0.0 && zp < d)) bad_key("params.zp", "must lie inside (0, d)");
    p.finish();

    const Point4 x{0.0, 0.0, 0.0, z};
    const Point4 xq{-dt, -dx, 0.0, zp};
    const complexd closed = casimir_kernel_closed(x, xq, eps, d);
    const double round_err = 1e-14 * std::abs(closed);

    Artifacts out{CsvTable({"n", "abs_error", "err"}), {}, {}, {}};
    SvgSeries s{"|series(n) - closed|", {}, {}};
    for (int n = 1; n <= n_max; ++n) {
        complexd partial;
        try {
            // tail_tol 0 forces the full n-pair budget; the throw carries S_n
            partial = casimir_kernel_series(cfg.state, d, x, xq, eps, {n, 0.0}).value;
        } catch (const AccuracyError& e) {
            partial = e.best().value;
        }
        const double dev = std::abs(partial - closed);
        out.table.add_row({double(n), dev, round_err});
        s.x.push_back(n);
        s.y.push_back(dev);
    }
    out.svg = {s};
    out.svg_opt.title = "image-series convergence";
    out.svg_opt.x_label = "n (image pairs)";
    out.svg_opt.y_label = "|series(n) - closed|";
    out.svg_opt.log_y = true;
    return out;
}

Artifacts run_algebra_check(const RunConfig& cfg) {
    ParamReader p(cfg.params, "params");
    const double rel = p.positive("tol", 1e-6);
    p.finish();

    AlgebraOptions opt;
    opt.d = cfg.geo.kind == GeometryKind::Slab ? cfg.geo.d : 1.0;
    const double d = opt.d;
    auto mk = [&](double t, double x, double z, double r) {
        return make_bump({t, x, 0.0, z * d}, {r * d, r * d, r * d, r * d});
    };
    // null-related centers inside the cell; images stay causally disjoint
    const TestFunction f = mk(0.0, 0.0, 0.40, 0.10);
    const TestFunction g = mk(0.35 * d, 0.25 * d, 0.62, 0.10);
    const TestFunction far = mk(0.0, 3.0 * d, 0.50, 0.10);

    Artifacts out{CsvTable({"check", "residual", "allowed", "err"}), {}, {}, {}};
    auto push = [&](int id, double residual, double allowed, double err,
                    const char* name) {
        out.table.add_row({double(id), residual, allowed, err});
        if (residual > allowed && out.check_failure.empty())
            out.check_failure = std::string("algebra-check: ") + name + " failed";
    };

    const auto rep = ccr_causality_check(f, g, PairingKind::SlabE, opt);
    const double scale = std::abs(rep.pairing);
    push(0, rep.structural_residual, 1e-12 * scale + 2.0 * rep.err, rep.err,
         "ccr-structural");
    push(1, rep.scalar_only ? 0.0 : 1.0, 0.5, 0.0, "ccr-scalar-only");

    const auto space = ccr_causality_check(f, far, PairingKind::SlabE, opt);
    push(2, std::abs(space.commutator_scalar) + std::abs(space.pairing),
         1e-10 * scale + 2.0 * space.err, space.err, "causal-disjoint");

    const auto Es = pairing_value(PairingKind::SlabE, f, g, opt);
    const auto Em = pairing_value(PairingKind::MinkowskiE, f, g, opt);
    push(3, std::abs(Es.value - Em.value),
         rel * std::abs(Em.value) + Es.err + Em.err, Es.err + Em.err, "f-locality");

    const auto Ff = RegularFunctional::generator(f);
    const auto Fg = RegularFunctional::generator(g);
    const auto Fh = RegularFunctional::generator(far);
    const auto left =
        star_product(star_product(Ff, Fg, PairingKind::SlabE, opt), Fh,
                     PairingKind::SlabE, opt);
    const auto right = star_product(
        Ff, star_product(Fg, Fh, PairingKind::SlabE, opt), PairingKind::SlabE, opt);
    push(4, coefficient_distance(left, right),
         left.err() + right.err() + 1e-13 * (left.norm1() + right.norm1()),
         left.err() + right.err(), "associativity");

    const auto F = complexd(2.0, -1.0) * Ff;
    const auto G = complexd(0.5, 0.5) * Fg + RegularFunctional::scalar(complexd(0.0, 1.0));
    const auto lhs = star_product(F, G, PairingKind::SlabE, opt).star();
    const auto rhs = star_product(G.star(), F.star(), PairingKind::SlabE, opt);
    push(5, coefficient_distance(lhs, rhs),
         lhs.err() + rhs.err() + 1e-13 * (lhs.norm1() + rhs.norm1()),
         lhs.err() + rhs.err(), "hermiticity");

    const auto repH = ccr_causality_check(f, g, PairingKind::DeformedH, opt);
    const auto repE = ccr_causality_check(f, g, PairingKind::MinkowskiE, opt);
    push(6, std::abs(repH.commutator_scalar - repE.commutator_scalar),
         repH.err + repE.err + 1e-9 * std::abs(repE.pairing), repH.err + repE.err,
         "deformed-commutator");

    return out;
}

Artifacts run_command(const RunConfig& cfg) {
    if (cfg.command == "twopoint") return run_twopoint(cfg);
    if (cfg.command == "wick-square") return run_wick_square(cfg);
    if (cfg.command == "stress") return run_stress(cfg);
    if (cfg.command == "kms-check") return run_kms_check(cfg);
    if (cfg.command == "positivity") return run_positivity(cfg);
    if (cfg.command == "convergence") return run_convergence(cfg);
    if (cfg.command == "algebra-check") return run_algebra_check(cfg);
    bad_key("command",
            "must be one of twopoint, wick-square, stress, kms-check, positivity, "
            "convergence, algebra-check");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"image-method kernels and observables, batch front-end"};
    std::string config_path, out_dir = ".", command_flag;
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "output directory for CSV/SVG artifacts");
    app.add_option("--command", command_flag, "command override");
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "config error: cannot open %s\n", config_path.c_str());
            return 1;
        }
        json root;
        try {
            root = json::parse(in);
        } catch (const json::parse_error& e) {
            std::fprintf(stderr, "config error: %s: %s\n", config_path.c_str(), e.what());
            return 1;
        }
        const RunConfig cfg = parse_config(root, command_flag);
        const Artifacts art = run_command(cfg);

        std::filesystem::create_directories(out_dir);
        const std::string csv_path = out_dir + "/" + cfg.csv_name;
        art.table.save(csv_path);
        if (!art.svg.empty()) save_svg_lines(out_dir + "/" + cfg.svg_name, art.svg,
                                             art.svg_opt);

        std::printf("%s: %zu rows, max err %.3g -> %s\n", cfg.command.c_str(),
                    art.table.row_count(), art.table.column_max_abs("err"),
                    csv_path.c_str());
        if (!art.check_failure.empty()) {
            std::fprintf(stderr, "%s\n", art.check_failure.c_str());
            return 2;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const AccuracyError& e) {
        std::fprintf(stderr, "accuracy error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

#include "vsheet/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/concentration.hpp"
#include "vsheet/energies.hpp"
#include "vsheet/measure_io.hpp"
#include "vsheet/numerics.hpp"
#include "vsheet/parallel.hpp"
#include "vsheet/spirals.hpp"

namespace vsheet {

using nlohmann::json;

json manifest_to_json(const RunManifest& m) {
    json inputs = json::object();
    for (const auto& [path, hash] : m.input_hashes) inputs[path] = hash;
    return {{"subcommand", m.subcommand}, {"parameters", m.parameters}, {"inputs", std::move(inputs)},
            {"version", m.version},       {"timestamp", m.timestamp},   {"threads", m.threads}};
}

namespace {

// --- plot data -------------------------------------------------------------

const json* find_series(const json& report, std::initializer_list<const char*> path) {
    const json* node = &report;
    for (const char* key : path) {
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
    }
    return node->is_array() && !node->empty() ? node : nullptr;
}

std::string num(const json& v) {
    if (v.is_null()) return "inf";
    std::ostringstream ss;
    ss.precision(17);
    ss << v.get<double>();
    return ss.str();
}

[[noreturn]] void missing(std::string_view kind) {
    fail(ErrorKind::missing_series, "report has no '" + std::string(kind) + "' series");
}

}  // namespace

std::string emit_plot_data(const json& report, std::string_view kind) {
    std::string csv;
    if (kind == "scaling") {
        const json* radii = find_series(report, {"fit", "radii"});
        const json* masses = find_series(report, {"fit", "masses"});
        if (!radii || !masses || radii->size() != masses->size()) missing(kind);
        csv = "ln_r,ln_mass\n";
        for (std::size_t i = 0; i < radii->size(); ++i) {
            const double r = (*radii)[i].get<double>();
            const double m = (*masses)[i].get<double>();
            if (m > 0.0) csv += num(std::log(r)) + ',' + num(std::log(m)) + '\n';
        }
    } else if (kind == "cutoff") {
        const json* series = find_series(report, {"h_minus1", "cutoff_series"});
        if (!series) series = find_series(report, {"energy", "fourier", "cutoff_series"});
        if (!series) missing(kind);
        csv = "cutoff,value,corrected\n";
        for (const auto& p : *series) csv += num(p["cutoff"]) + ',' + num(p["value"]) + ',' + num(p["corrected"]) + '\n';
    } else if (kind == "refinement") {
        const json* series = find_series(report, {"energy", "refinement_series"});
        if (!series) missing(kind);
        csv = "segments,direct\n";
        for (const auto& p : *series) csv += std::to_string(p[0].get<std::size_t>()) + ',' + num(p[1]) + '\n';
    } else if (kind == "collapse") {
        const json* series = find_series(report, {"collapse", "series"});
        if (!series) missing(kind);
        csv = "t,support_radius,support_radius_exact,h_minus1\n";
        for (const auto& p : *series) {
            csv += num(p["t"]) + ',' + num(p["support_radius"]) + ',' + num(p["support_radius_exact"]) + ',' +
                   num(p["h_minus1"]) + '\n';
        }
    } else if (kind == "trajectory") {
        const json* series = find_series(report, {"observations"});
        if (!series) missing(kind);
        csv = "time,circulation,impulse_re,impulse_im,hamiltonian,max_spacing\n";
        for (const auto& o : *series) {
            csv += num(o["time"]) + ',' + num(o["circulation"]) + ',' + num(o["impulse"][0]) + ',' +
                   num(o["impulse"][1]) + ',' + num(o["hamiltonian"]) + ',' + num(o["max_spacing"]) + '\n';
        }
    } else {
        fail(ErrorKind::invalid_input, "unknown plot kind '" + std::string(kind) + "'");
    }
    return csv;
}

namespace {

// --- report serialization --------------------------------------------------

json to_json(const FrequencyIntegral& f) {
    json series = json::array();
    for (const auto& p : f.cutoff_series) {
        series.push_back({{"cutoff", p.cutoff}, {"value", p.value}, {"corrected", p.corrected}});
    }
    return {{"value", f.value},
            {"tail_estimate", f.tail_estimate},
            {"corrected", f.corrected},
            {"last_decade_increment", f.last_decade_increment},
            {"cutoff_series", std::move(series)}};
}

json to_json(const EnergyReport& r) {
    json j;
    j["s"] = r.s;
    j["direct"] = r.direct ? json(*r.direct) : json(nullptr);
    j["layer_cake"] = r.layer_cake ? json(*r.layer_cake) : json(nullptr);
    j["fourier"] = r.fourier ? to_json(*r.fourier) : json(nullptr);
    json ref = json::array();
    for (const auto& [n, v] : r.refinement_series) ref.push_back({n, v});
    j["refinement_series"] = std::move(ref);
    j["atomic_self_energy_excluded"] = r.atomic_self_energy_excluded;
    j["max_relative_spread"] = r.max_relative_spread;
    return j;
}

json to_json(PlanePoint p) { return json::array({p.x, p.y}); }

json to_json(const MorreyResult& m) {
    return {{"value", m.value},
            {"r_star", m.r_star},
            {"x_star", to_json(m.x_star)},
            {"at_lower_edge", m.at_lower_edge},
            {"n_centers", m.n_centers}};
}

json to_json(const ScalingFit& f) {
    return {{"alpha_hat", f.alpha_hat}, {"c1_hat", f.c1_hat}, {"r_lo", f.r_lo},     {"r_hi", f.r_hi},
            {"residual", f.residual},   {"radii", f.radii},   {"masses", f.masses}};
}

json to_json(const BoundSample& s) {
    return {{"x", to_json(s.x)}, {"r", s.r}, {"mass", s.mass}, {"ratio", s.ratio}};
}

json to_json(const BoundCheckReport& r) {
    return {{"worst_ratio", r.worst_ratio},
            {"worst_sample", to_json(r.worst_sample)},
            {"n_samples", r.n_samples},
            {"n_rejected", r.n_rejected},
            {"regime", r.regime == BoundRegime::alpha_at_least_one ? "alpha_at_least_one" : "alpha_below_one"},
            {"reference_constant", r.reference_constant}};
}

json to_json(const EmbeddingReport& r) {
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back({{"cutoff", p.cutoff}, {"lhs", p.lhs}, {"holds", p.holds}});
    return {{"p", r.p},
            {"s", r.s},
            {"morrey", r.morrey},
            {"diameter", r.diameter},
            {"total_variation", r.total_variation},
            {"rhs_mass", r.rhs_mass},
            {"rhs_morrey", r.rhs_morrey},
            {"points", std::move(pts)},
            {"holds", r.holds}};
}

json to_json(const Observation& o) {
    return {{"step", o.step},
            {"time", o.time},
            {"circulation", o.circulation},
            {"impulse", {o.impulse.real(), o.impulse.imag()}},
            {"hamiltonian", o.hamiltonian},
            {"max_spacing", o.max_spacing}};
}

json to_json(const CollapseReport& r) {
    json series = json::array();
    for (const auto& p : r.series) {
        series.push_back({{"t", p.t},
                          {"tau", p.tau},
                          {"support_radius", p.support_radius},
                          {"support_radius_exact", p.support_radius_exact},
                          {"h_minus1", p.h_minus1}});
    }
    return {{"series", std::move(series)},
            {"radius_decreasing", r.radius_decreasing},
            {"h_minus1_increasing", r.h_minus1_increasing}};
}

// --- run context -----------------------------------------------------------

std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        long long v = 0;
        const std::string_view e(epoch);
        if (std::from_chars(e.data(), e.data() + e.size(), v).ec == std::errc()) t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json option_value(const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return v;
    return text;
}

void collect_parameters(const CLI::App* app, json& out) {
    for (const CLI::Option* opt : app->get_options()) {
        const std::string& name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        if (name == "help" || name.empty()) continue;
        json value;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (opt->get_type_size() == 0) {
                value = true;
            } else if (res.size() == 1 && opt->get_items_expected_max() <= 1) {
                value = option_value(res.front());
            } else {
                value = json::array();
                for (const auto& r : res) value.push_back(option_value(r));
            }
        } else if (!opt->get_default_str().empty()) {
            value = option_value(opt->get_default_str());
        } else {
            continue;
        }
        out[name] = std::move(value);
    }
}

using AnyMeasure = std::variant<AtomicMeasure, CurveMeasure>;

struct Context {
    std::ostream& out;
    std::ostream& err;
    RunManifest manifest;
    std::string out_path;
    bool strict = false;
    std::vector<std::string> flags;

    std::string read_input(const std::string& path) {
        std::string text = read_text_file(path);
        manifest.input_hashes[path] = hex_digest(fnv1a(text));
        return text;
    }

    AnyMeasure load_measure(const std::string& path) {
        const std::string text = read_input(path);
        const auto first = text.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
        if (first != std::string::npos && text[first] == '{') return parse_curve_json(text);
        return parse_atomic_csv(text);
    }

    void emit_text(const std::string& text) {
        if (out_path.empty()) {
            out << text;
        } else {
            write_text_file(out_path, text);
        }
    }

    void emit_curve(const CurveMeasure& mu) {
        json j = curve_to_json(mu);
        j["manifest"] = manifest_to_json(manifest);
        emit_text(j.dump() + "\n");
    }

    void emit(json report) {
        report["manifest"] = manifest_to_json(manifest);
        if (!flags.empty()) report["divergence_flags"] = flags;
        emit_text(report.dump(2) + "\n");
    }

    int exit_code() const { return strict && !flags.empty() ? 3 : 0; }
};

std::string metadata_hash(const AnyMeasure& m) {
    if (const auto* c = std::get_if<CurveMeasure>(&m)) return hex_digest(fnv1a(info_to_json(c->info()).dump()));
    return hex_digest(fnv1a("{}"));
}

template <class M>
M select_part(const M& mu, const std::string& part) {
    if (part == "positive") return hahn_decompose(mu).positive;
    if (part == "negative") return hahn_decompose(mu).negative;
    if (part == "abs") return absolute_value(mu);
    return mu;
}

AnyMeasure select_part(const AnyMeasure& m, const std::string& part) {
    return std::visit([&](const auto& mu) -> AnyMeasure { return select_part(mu, part); }, m);
}

template <class F>
decltype(auto) visit_measure(const AnyMeasure& m, F&& f) {
    return std::visit(std::forward<F>(f), m);
}

const std::vector<std::string> kParts = {"positive", "negative", "abs", "whole"};

// --- options shared between subcommands --------------------------------------

struct MeasureArgs {
    std::string path;
    std::string part;
};

void add_measure(CLI::App* app, MeasureArgs& a, const std::string& default_part) {
    a.part = default_part;
    app->add_option("--measure", a.path, "measure file: curve JSON or atomic CSV")->required();
    app->add_option("--part", a.part, "which part of a signed measure to analyse")
        ->check(CLI::IsMember(kParts))
        ->capture_default_str();
}

struct GridArgs {
    double cutoff = 100.0;
    int radial = 12;
    int angular = 16;

    QuadratureGrid grid() const {
        QuadratureGrid g;
        g.cutoff = cutoff;
        g.n_radial = radial;
        g.n_angular = angular;
        return g;
    }
};

void add_grid(CLI::App* app, GridArgs& g) {
    app->add_option("--cutoff", g.cutoff, "frequency cutoff K")->capture_default_str();
    app->add_option("--grid-radial", g.radial, "Gauss nodes per radial panel")->capture_default_str();
    app->add_option("--grid-angular", g.angular, "minimum angular nodes on [0, pi)")->capture_default_str();
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vortex sheet measures: spirals, energies, concentration and Birkhoff-Rott evolution", "vsheet"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string out_path;
    int threads = -1;
    bool strict = false;
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--threads", threads, "worker threads, 0 = auto (default: VSHEET_THREADS or auto)");
    app.add_flag("--strict", strict, "exit 3 when a divergence flag is raised");

    std::function<int(Context&)> action;

    // generate ------------------------------------------------------------
    auto* gen = app.add_subcommand("generate", "write a curve measure as JSON");
    gen->require_subcommand(1);

    PrandtlParams pp{0.2, 0.5, 1.0, 0.0};
    SpiralSampling ps{1.0, 4096, 2.0};
    auto* prandtl = gen->add_subcommand("prandtl", "both branches of the Prandtl spiral");
    prandtl->add_option("--b", pp.b)->capture_default_str();
    prandtl->add_option("--mu", pp.mu)->capture_default_str();
    prandtl->add_option("--p", pp.p)->capture_default_str();
    prandtl->add_option("--t", pp.t)->capture_default_str();
    prandtl->add_option("--gamma-max", ps.gamma_max)->capture_default_str();
    prandtl->add_option("--n", ps.n_samples, "samples per branch")->capture_default_str();
    prandtl->add_option("--grading", ps.grading)->capture_default_str();
    prandtl->callback([&] {
        action = [&](Context& ctx) {
            ctx.emit_curve(prandtl_curve(pp, ps));
            return 0;
        };
    });

    double kc2 = 1.0, km = 2.0 / 3.0, kr_min = 0.03, kr_max = 1.0;
    std::size_t kn = 4096;
    auto* kaden = gen->add_subcommand("kaden", "algebraic spiral obeying the similitude law");
    kaden->add_option("--c2", kc2)->capture_default_str();
    kaden->add_option("--m", km)->capture_default_str();
    kaden->add_option("--r-min", kr_min)->capture_default_str();
    kaden->add_option("--r-max", kr_max)->capture_default_str();
    kaden->add_option("--n", kn)->capture_default_str();
    kaden->callback([&] {
        action = [&](Context& ctx) {
            ctx.emit_curve(kaden_model(kc2, km, kr_min, kr_max, kn));
            return 0;
        };
    });

    double ss_m = 1.0, ss_t = 1.0, ss_f = -1.0, ss_g = -1.0, ss_gscale = 1.0, ss_th0 = 1.0, ss_th1 = 10.0;
    std::size_t ss_n = 4096;
    auto* selfsim = gen->add_subcommand("self-similar", "t^m f(theta) e^{i theta} with power-law f and g");
    selfsim->add_option("--m", ss_m)->capture_default_str();
    selfsim->add_option("--t", ss_t)->capture_default_str();
    selfsim->add_option("--f-power", ss_f, "f(theta) = theta^a")->capture_default_str();
    selfsim->add_option("--g-power", ss_g, "g(theta) = scale theta^b")->capture_default_str();
    selfsim->add_option("--g-scale", ss_gscale)->capture_default_str();
    selfsim->add_option("--theta-begin", ss_th0)->capture_default_str();
    selfsim->add_option("--theta-end", ss_th1)->capture_default_str();
    selfsim->add_option("--n", ss_n)->capture_default_str();
    selfsim->callback([&] {
        action = [&](Context& ctx) {
            SelfSimilarParams sp;
            sp.m = ss_m;
            sp.t = ss_t;
            sp.f = [a = ss_f](double th) { return std::pow(th, a); };
            sp.g = [b = ss_g, c = ss_gscale](double th) { return c * std::pow(th, b); };
            ctx.emit_curve(self_similar_curve(sp, ss_th0, ss_th1, ss_n));
            return 0;
        };
    });

    double c_radius = 1.0, c_mass = 1.0, c_x = 0.0, c_y = 0.0;
    std::size_t c_n = 1024;
    auto* circle = gen->add_subcommand("circle", "uniform measure on a circle");
    circle->add_option("--radius", c_radius)->capture_default_str();
    circle->add_option("--mass", c_mass)->capture_default_str();
    circle->add_option("--cx", c_x)->capture_default_str();
    circle->add_option("--cy", c_y)->capture_default_str();
    circle->add_option("--n", c_n)->capture_default_str();
    circle->callback([&] {
        action = [&](Context& ctx) {
            ctx.emit_curve(make_circle({c_x, c_y}, c_radius, c_mass, c_n));
            return 0;
        };
    });

    double s_ax = 0.0, s_ay = 0.0, s_bx = 1.0, s_by = 0.0, s_density = 1.0;
    std::size_t s_n = 1024;
    auto* segment = gen->add_subcommand("segment", "constant density on a straight segment");
    segment->add_option("--ax", s_ax)->capture_default_str();
    segment->add_option("--ay", s_ay)->capture_default_str();
    segment->add_option("--bx", s_bx)->capture_default_str();
    segment->add_option("--by", s_by)->capture_default_str();
    segment->add_option("--density", s_density)->capture_default_str();
    segment->add_option("--n", s_n)->capture_default_str();
    segment->callback([&] {
        action = [&](Context& ctx) {
            ctx.emit_curve(make_segment({s_ax, s_ay}, {s_bx, s_by}, s_density, s_n));
            return 0;
        };
    });

    // ball-mass -----------------------------------------------------------
    MeasureArgs bm;
    double bm_x = 0.0, bm_y = 0.0;
    std::vector<double> bm_r;
    auto* ball = app.add_subcommand("ball-mass", "mass of open balls around one center");
    add_measure(ball, bm, "whole");
    ball->add_option("--x", bm_x)->capture_default_str();
    ball->add_option("--y", bm_y)->capture_default_str();
    ball->add_option("--r", bm_r, "radii")->required();
    ball->callback([&] {
        action = [&](Context& ctx) {
            const auto mu = select_part(ctx.load_measure(bm.path), bm.part);
            const auto masses = visit_measure(mu, [&](const auto& m) {
                return ball_mass_profile(m, PlanePoint{bm_x, bm_y}, bm_r);
            });
            ctx.emit({{"center", {bm_x, bm_y}}, {"radii", bm_r}, {"masses", masses}});
            return ctx.exit_code();
        };
    });

    // energy --------------------------------------------------------------
    MeasureArgs en;
    GridArgs en_grid;
    double en_s = 0.5;
    std::string en_method = "all";
    int en_refinements = 0;
    auto* energy = app.add_subcommand("energy", "t-energy by direct sums, layer cake and Fourier integral");
    add_measure(energy, en, "positive");
    add_grid(energy, en_grid);
    energy->add_option("--s", en_s)->capture_default_str();
    energy->add_option("--method", en_method)
        ->check(CLI::IsMember({"direct", "layer-cake", "fourier", "all"}))
        ->capture_default_str();
    energy->add_option("--refinements", en_refinements, "direct sums after refining by 2^k")->capture_default_str();
    energy->callback([&] {
        action = [&](Context& ctx) {
            const auto mu = select_part(ctx.load_measure(en.path), en.part);
            EnergyOptions opts;
            opts.direct = en_method == "direct" || en_method == "all" || en_refinements > 0;
            opts.layer_cake = en_method == "layer-cake" || en_method == "all";
            opts.fourier = en_method == "fourier" || en_method == "all";
            opts.grid = en_grid.grid();
            opts.refinements = en_refinements;
            const auto rep = visit_measure(mu, [&](const auto& m) { return energy_report(m, en_s, opts); });
            if (rep.direct && !std::isfinite(*rep.direct)) ctx.flags.push_back("energy_infinite");
            const auto& ref = rep.refinement_series;
            if (ref.size() >= 2) {
                const double a = ref[ref.size() - 2].second;
                const double b = ref.back().second;
                if (!(std::abs(b - a) <= 0.01 * std::abs(b))) ctx.flags.push_back("energy_not_cauchy");
            }
            if (rep.fourier && std::abs(rep.fourier->last_decade_increment) > 0.005) {
                ctx.flags.push_back("fourier_not_converged");
            }
            ctx.emit({{"energy", to_json(rep)}, {"metadata_hash", metadata_hash(mu)}});
            return ctx.exit_code();
        };
    });

    // hminus1 -------------------------------------------------------------
    MeasureArgs hm;
    GridArgs hm_grid;
    auto* hminus1 = app.add_subcommand("hminus1", "truncated H^-1 norm in frequency space");
    add_measure(hminus1, hm, "whole");
    add_grid(hminus1, hm_grid);
    hminus1->callback([&] {
        action = [&](Context& ctx) {
            const auto mu = select_part(ctx.load_measure(hm.path), hm.part);
            const auto g = hm_grid.grid();
            const auto h = visit_measure(mu, [&](const auto& m) { return h_minus1_truncated(m, g.cutoff, g); });
            if (h.last_decade_increment > 0.01) ctx.flags.push_back("h_minus1_growth");
            ctx.emit({{"h_minus1", to_json(h)}, {"metadata_hash", metadata_hash(mu)}});
            return ctx.exit_code();
        };
    });

    // morrey --------------------------------------------------------------
    MeasureArgs mo;
    double mo_p = 1.5;
    MorreyOptions mo_opts;
    auto* morrey = app.add_subcommand("morrey", "sampled Morrey norm");
    add_measure(morrey, mo, "whole");
    morrey->add_option("--p", mo_p)->capture_default_str();
    morrey->add_option("--r-min", mo_opts.r_min, "smallest radius, 0 = 1e-3 diameter")->capture_default_str();
    morrey->add_option("--n-radii", mo_opts.n_radii)->capture_default_str();
    morrey->add_option("--grid-centers", mo_opts.grid_centers)->capture_default_str();
    morrey->add_option("--seed", mo_opts.seed)->capture_default_str();
    morrey->callback([&] {
        action = [&](Context& ctx) {
            const auto mu = select_part(ctx.load_measure(mo.path), mo.part);
            const auto r = visit_measure(mu, [&](const auto& m) { return morrey_norm(m, mo_p, mo_opts); });
            if (r.at_lower_edge) ctx.flags.push_back("morrey_at_lower_edge");
            ctx.emit({{"morrey", to_json(r)}, {"p", mo_p}, {"metadata_hash", metadata_hash(mu)}});
            return ctx.exit_code();
        };
    });

    // fit-alpha -----------------------------------------------------------
    MeasureArgs fa;
    double fa_x = 0.0, fa_y = 0.0, fa_rmin = 0.0, fa_rmax = 0.0;
    std::size_t fa_n = 25;
    auto* fit = app.add_subcommand("fit-alpha", "log-log fit of ball masses around a center");
    add_measure(fit, fa, "positive");
    fit->add_option("--x", fa_x)->capture_default_str();
    fit->add_option("--y", fa_y)->capture_default_str();
    fit->add_option("--r-min", fa_rmin)->required();
    fit->add_option("--r-max", fa_rmax)->required();
    fit->add_option("--n-radii", fa_n)->capture_default_str();
    fit->callback([&] {
        action = [&](Context& ctx) {
            require(fa_rmin > 0.0 && fa_rmax > fa_rmin && fa_n >= 2, ErrorKind::invalid_input,
                    "need 0 < r-min < r-max and at least two radii");
            const auto mu = select_part(ctx.load_measure(fa.path), fa.part);
            const auto radii = log_space(fa_rmin, fa_rmax, fa_n);
            const auto f = visit_measure(mu, [&](const auto& m) {
                return scaling_exponent_fit(m, PlanePoint{fa_x, fa_y}, radii);
            });
            ctx.emit({{"fit", to_json(f)}, {"metadata_hash", metadata_hash(mu)}});
            return ctx.exit_code();
        };
    });

    // check-bounds --------------------------------------------------------
    MeasureArgs cb;
    double cb_alpha = 2.0, cb_c1 = 1.0, cb_r0 = 1.0;
    BoundCheckOptions cb_opts;
    auto* bounds = app.add_subcommand("check-bounds", "sampled off-center ball-mass bounds");
    add_measure(bounds, cb, "positive");
    bounds->add_option("--alpha", cb_alpha)->capture_default_str();
    bounds->add_option("--c1", cb_c1)->capture_default_str();
    bounds->add_option("--r0", cb_r0)->capture_default_str();
    bounds->add_option("--samples", cb_opts.n_samples)->capture_default_str();
    bounds->add_option("--seed", cb_opts.seed)->capture_default_str();
    bounds->add_option("--r-lo", cb_opts.r_lo, "smallest radius, 0 = 1e-3 R0")->capture_default_str();
    bounds->callback([&] {
        action = [&](Context& ctx) {
            const auto mu = select_part(ctx.load_measure(cb.path), cb.part);
            const auto* curve = std::get_if<CurveMeasure>(&mu);
            require(curve != nullptr, ErrorKind::invalid_input, "check-bounds needs a curve measure");
            const auto r = offcenter_bound_check(*curve, cb_alpha, cb_c1, cb_r0, cb_opts);
            if (r.worst_ratio > r.reference_constant) ctx.flags.push_back("bound_violated");
            ctx.emit({{"bounds", to_json(r)}, {"metadata_hash", metadata_hash(mu)}});
            return ctx.exit_code();
        };
    });

    // check-embedding -----------------------------------------------------
    MeasureArgs ce;
    double ce_p = 1.5, ce_s = 0.5;
    std::vector<double> ce_cutoffs = {10.0, 40.0, 160.0};
    auto* embed = app.add_subcommand("check-embedding", "truncated H^-1 norm against the Morrey bound");
    add_measure(embed, ce, "whole");
    embed->add_option("--p", ce_p)->capture_default_str();
    embed->add_option("--s", ce_s)->capture_default_str();
    embed->add_option("--cutoffs", ce_cutoffs)->capture_default_str();
    embed->callback([&] {
        action = [&](Context& ctx) {
            const auto mu = select_part(ctx.load_measure(ce.path), ce.part);
            const auto r = visit_measure(mu, [&](const auto& m) { return embedding_chain_check(m, ce_p, ce_s, ce_cutoffs); });
            if (!r.holds) ctx.flags.push_back("embedding_violated");
            ctx.emit({{"embedding", to_json(r)}, {"metadata_hash", metadata_hash(mu)}});
            return ctx.exit_code();
        };
    });

    // evolve --------------------------------------------------------------
    std::string ev_sheet, ev_measure, ev_snapshots, ev_final;
    BRConfig ev_cfg;
    std::size_t ev_every = 10;
    auto* ev = app.add_subcommand("evolve", "regularized Birkhoff-Rott evolution, JSON lines output");
    auto* ev_sheet_opt = ev->add_option("--sheet", ev_sheet, "markers as CSV x,y,dgamma");
    ev->add_option("--measure", ev_measure, "curve JSON turned into vertex markers")->excludes(ev_sheet_opt);
    ev->add_option("--delta", ev_cfg.delta)->capture_default_str();
    ev->add_option("--dt", ev_cfg.dt)->capture_default_str();
    ev->add_option("--steps", ev_cfg.steps)->capture_default_str();
    ev->add_option("--observe-every", ev_every)->capture_default_str();
    ev->add_option("--snapshot-dir", ev_snapshots, "write the full state as CSV at every observation");
    ev->add_option("--final-state", ev_final, "write the last state as CSV");
    ev->callback([&] {
        action = [&](Context& ctx) {
            require(!ev_sheet.empty() || !ev_measure.empty(), ErrorKind::invalid_input,
                    "evolve needs --sheet or --measure");
            SheetState initial;
            if (!ev_sheet.empty()) {
                initial = parse_sheet_csv(ctx.read_input(ev_sheet));
            } else {
                initial = sheet_from_curve(parse_curve_json(ctx.read_input(ev_measure)));
            }
            std::ostringstream lines;
            lines << json{{"manifest", manifest_to_json(ctx.manifest)}}.dump() << '\n';
            std::vector<Observer> observers;
            observers.push_back([&](const SheetState&, const Observation& o) { lines << to_json(o).dump() << '\n'; });
            if (!ev_snapshots.empty()) {
                std::filesystem::create_directories(ev_snapshots);
                observers.push_back([&](const SheetState& s, const Observation& o) {
                    char name[32];
                    std::snprintf(name, sizeof name, "state_%08zu.csv", o.step);
                    write_text_file(std::filesystem::path(ev_snapshots) / name, format_sheet_csv(s));
                });
            }
            json summary;
            SheetState last;
            try {
                auto traj = evolve(initial, ev_cfg, ev_every, observers);
                summary = {{"final", {{"step", ev_cfg.steps}, {"time", traj.final_state.time}, {"blow_up", false}}}};
                last = std::move(traj.final_state);
            } catch (const BlowUpError& e) {
                ctx.flags.push_back("blow_up");
                summary = {{"final", {{"step", e.step()}, {"time", e.last_valid().time}, {"blow_up", true}}}};
                last = e.last_valid();
            }
            if (!ctx.flags.empty()) summary["divergence_flags"] = ctx.flags;
            lines << summary.dump() << '\n';
            if (!ev_final.empty()) write_text_file(ev_final, format_sheet_csv(last));
            ctx.emit_text(lines.str());
            return ctx.exit_code();
        };
    });

    // collapse ------------------------------------------------------------
    PrandtlParams cp{0.2, 0.5, -1.0, 0.0};
    CollapseOptions co;
    std::vector<double> co_times;
    std::size_t co_n_times = 10;
    auto* collapse = app.add_subcommand("collapse", "positive Prandtl branch approaching t = -1/p");
    collapse->add_option("--b", cp.b)->capture_default_str();
    collapse->add_option("--mu", cp.mu)->capture_default_str();
    collapse->add_option("--p", cp.p)->capture_default_str();
    collapse->add_option("--gamma-max", co.gamma_max)->capture_default_str();
    collapse->add_option("--n", co.n_samples)->capture_default_str();
    collapse->add_option("--cutoff", co.cutoff)->capture_default_str();
    collapse->add_option("--times", co_times, "default: n-times points from 0 to 0.99 of the collapse time");
    collapse->add_option("--n-times", co_n_times)->capture_default_str();
    collapse->callback([&] {
        action = [&](Context& ctx) {
            require(cp.p < 0.0, ErrorKind::invalid_input, "collapse needs p < 0");
            std::vector<double> times = co_times;
            if (times.empty()) {
                require(co_n_times >= 2, ErrorKind::invalid_input, "need at least two times");
                const double tc = -1.0 / cp.p;
                for (std::size_t k = 0; k < co_n_times; ++k) {
                    times.push_back(0.99 * tc * static_cast<double>(k) / static_cast<double>(co_n_times - 1));
                }
            }
            const auto r = collapse_diagnostic(cp, times, co);
            if (r.h_minus1_increasing) ctx.flags.push_back("h_minus1_growth");
            ctx.emit({{"collapse", to_json(r)}});
            return ctx.exit_code();
        };
    });

    // report --------------------------------------------------------------
    std::string rp_in, rp_kind;
    auto* report = app.add_subcommand("report", "plot-ready CSV from a report file");
    report->add_option("--in", rp_in, "JSON report or evolve JSON lines")->required();
    report->add_option("--kind", rp_kind)
        ->required()
        ->check(CLI::IsMember({"scaling", "cutoff", "refinement", "collapse", "trajectory"}));
    report->callback([&] {
        action = [&](Context& ctx) {
            const std::string text = ctx.read_input(rp_in);
            json doc;
            try {
                doc = json::parse(text);
            } catch (const json::exception&) {
                json obs = json::array();
                std::istringstream in(text);
                std::string line;
                while (std::getline(in, line)) {
                    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                    json row;
                    try {
                        row = json::parse(line);
                    } catch (const json::exception& e) {
                        fail(ErrorKind::load_error, std::string("report is neither JSON nor JSON lines: ") + e.what());
                    }
                    if (row.contains("step") && row.contains("time")) obs.push_back(std::move(row));
                }
                doc = {{"observations", std::move(obs)}};
            }
            ctx.emit_text(emit_plot_data(doc, rp_kind));
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Context ctx{out, err, {}, out_path, strict, {}};
    try {
        if (threads >= 0) set_thread_count(static_cast<unsigned>(threads));
        ctx.manifest.timestamp = utc_timestamp();
        ctx.manifest.threads = thread_count();
        std::string name;
        const CLI::App* node = &app;
        collect_parameters(node, ctx.manifest.parameters);
        while (!node->get_subcommands().empty()) {
            node = node->get_subcommands().front();
            name += name.empty() ? node->get_name() : " " + node->get_name();
            collect_parameters(node, ctx.manifest.parameters);
        }
        ctx.manifest.subcommand = name;
        return action(ctx);
    } catch (const Error& e) {
        err << "vsheet: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "vsheet: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace vsheet

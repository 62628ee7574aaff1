#include "ibmag/cli.hpp"

#include "ibmag/clamp.hpp"
#include "ibmag/errors.hpp"
#include "ibmag/fixtures.hpp"
#include "ibmag/force_curve.hpp"
#include "ibmag/magnetic_spring.hpp"
#include "ibmag/plot.hpp"
#include "ibmag/spring_synthesis.hpp"
#include "ibmag/unit_sim.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace ibmag {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
    std::string out_dir = ".";
    bool plot = false;
    std::uint64_t seed = 1;
};

// Ordered key/value summary; printed as CSV so values round-trip exactly.
class Summary {
public:
    void add(std::string key, double value) { rows_.emplace_back(std::move(key), fmt::format("{}", value)); }
    void add(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }

    void write(std::ostream& out) const {
        out << "key,value\n";
        for (auto const& [k, v] : rows_) out << k << ',' << v << '\n';
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

std::ofstream open_output(const GlobalOptions& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    auto const path = fs::path(g.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + path.string() + "'");
    return f;
}

void save_summary(const GlobalOptions& g, const std::string& name, const Summary& s) {
    auto f = open_output(g, name);
    s.write(f);
}

std::vector<Sample> sample_curve(const ForceCurve& curve, double x_max, std::size_t n) {
    std::vector<Sample> pts;
    for (std::size_t i = 0; i < n; ++i) {
        double const x = kernels::grid_node(0.0, x_max, n, i);
        pts.push_back({x, eval_force(curve, x)});
    }
    return pts;
}

std::vector<Sample> sample_springs(const SpringDesign& d, std::size_t n) {
    std::vector<Sample> pts;
    for (std::size_t i = 0; i < n; ++i) {
        double const x = kernels::grid_node(0.0, d.x_max, n, i);
        pts.push_back({x, spring_force(d, x)});
    }
    return pts;
}

// ---------------------------------------------------------------------------

int cmd_fit(const GlobalOptions& g, const std::string& input, std::optional<double> p,
            std::ostream& out) {
    auto const samples = read_samples_csv(fs::path(input));
    auto const curve = fit_power_law(samples, p);
    auto const residuals = fit_residuals(curve, samples);
    double max_abs = 0.0;
    double ss = 0.0;
    for (double const r : residuals) {
        max_abs = std::max(max_abs, std::abs(r));
        ss += r * r;
    }
    {
        auto f = open_output(g, "fitted_curve.cfg");
        write_curve_file(f, curve);
    }
    Summary s;
    s.add("samples", static_cast<double>(samples.size()));
    s.add("amplitude_N_mm_p", curve.amplitude);
    s.add("offset_mm", curve.offset);
    s.add("exponent", curve.exponent);
    s.add("residual_sum_squares_N2", ss);
    s.add("residual_max_abs_N", max_abs);
    save_summary(g, "fit_report.csv", s);

    fmt::print(out, "fit: F(x) = A / (x + c)^p over {} samples\n", samples.size());
    fmt::print(out, "  A = {:.6g} N*mm^p\n  c = {:.6g} mm\n  p = {:.6g}\n", curve.amplitude,
               curve.offset, curve.exponent);
    fmt::print(out, "  residuals:");
    for (double const r : residuals) fmt::print(out, " {:.3e}", r);
    fmt::print(out, "\n  max |residual| = {:.3e} N\n", max_abs);
    s.write(out);

    if (g.plot) {
        double const x_end = std::max_element(samples.begin(), samples.end(), [](auto& a, auto& b) {
                                 return a.x < b.x;
                             })->x;
        PlotSpec spec{"power-law fit", "displacement [mm]", "force [N]", {}};
        spec.series.push_back({"fit", sample_curve(curve, x_end, 301), "#1f77b4"});
        spec.series.push_back({"samples", samples, "#d62728"});
        auto f = open_output(g, "fit.svg");
        write_svg_plot(f, spec);
    }
    return kExitOk;
}

int cmd_synth(const GlobalOptions& g, const std::string& curve_path, int n, double x_max,
              const std::string& catalog_path, std::ostream& out) {
    auto const curve = load_curve(fs::path(curve_path));
    auto const design = optimize_tangent_points(curve, n, x_max, g.seed);
    {
        auto f = open_output(g, "design.csv");
        write_design_csv(f, design);
    }
    Summary s;
    s.add("springs", static_cast<double>(n));
    s.add("x_max_mm", x_max);
    s.add("seed", static_cast<double>(g.seed));
    s.add("delta_e_Nmm", design.delta_e);
    s.add("residual_step_N", design.residual_step);
    for (std::size_t i = 0; i < design.tangents.size(); ++i) {
        s.add(fmt::format("tangent_point_{}_mm", i + 1), design.tangents[i].point);
    }

    fmt::print(out, "synth: {} springs over [0, {}] mm\n", n, x_max);
    fmt::print(out, "  delta_e = {:.6g} N*mm\n", design.delta_e);

    std::optional<SpringDesign> snapped;
    if (!catalog_path.empty()) {
        auto const catalog = read_catalog(fs::path(catalog_path));
        snapped = snap_to_catalog(design, catalog, curve);
        auto f = open_output(g, "design_snapped.csv");
        write_design_csv(f, *snapped);
        s.add("delta_e_snapped_Nmm", snapped->delta_e);
        s.add("snapped_min_residual_N", snapped->min_residual);
        fmt::print(out, "  delta_e before snap = {:.6g} N*mm, after snap = {:.6g} N*mm\n",
                   design.delta_e, snapped->delta_e);
    }
    save_summary(g, "synth_summary.csv", s);
    s.write(out);

    if (g.plot) {
        PlotSpec spec{"magnet curve and spring stack", "displacement [mm]", "force [N]", {}};
        spec.series.push_back({"magnet", sample_curve(curve, x_max, 401), "#1f77b4"});
        spec.series.push_back({"springs", sample_springs(design, 401), "#ff7f0e"});
        if (snapped) spec.series.push_back({"snapped", sample_springs(*snapped, 401), "#2ca02c"});
        auto f = open_output(g, "synth.svg");
        write_svg_plot(f, spec);
    }
    return kExitOk;
}

int cmd_balance(const GlobalOptions& g, const std::string& fixture_name, std::size_t grid,
                bool ideal, std::ostream& out) {
    auto fx = load_fixture(fixture_name);
    auto pair = fx.unit.pair;
    if (ideal) pair.repulsion = pair.attraction;
    auto const profile = deviation_profile(pair, grid);
    auto const peak = peak_control_force(pair, 0.0, grid);
    {
        auto f = open_output(g, "balance.csv");
        write_balance_csv(f, profile);
    }
    Summary s;
    s.add("fixture", fx.name);
    s.add("ideal", ideal ? "true" : "false");
    s.add("grid", static_cast<double>(grid));
    s.add("max_deviation_N", profile.peak().deviation);
    s.add("max_deviation_position_mm", profile.peak().x);
    s.add("peak_internal_force_N", peak.net);
    s.add("peak_internal_force_position_mm", peak.position);
    save_summary(g, "balance_summary.csv", s);

    fmt::print(out, "balance: {}{}\n", fx.name, ideal ? " (ideal pair)" : "");
    fmt::print(out, "  max |internal force| = {:.4g} N at x = {:.4g} mm\n", profile.peak().deviation,
               profile.peak().x);
    s.write(out);

    if (g.plot) {
        PlotSpec spec{"internal force over the stroke", "rod displacement [mm]", "internal force [N]", {}};
        std::vector<Sample> pts;
        for (auto const& b : profile.samples) pts.push_back({b.x, b.internal_force});
        spec.series.push_back({"repulsion - attraction", std::move(pts), "#1f77b4"});
        auto f = open_output(g, "balance.svg");
        write_svg_plot(f, spec);
    }
    return kExitOk;
}

int cmd_pulltest(const GlobalOptions& g, const std::string& fixture_name, const std::string& mode,
                 double step, std::optional<double> sweep_end, std::ostream& out) {
    auto const fx = load_fixture(fixture_name);
    double const end = sweep_end.value_or(2.0 * fx.unit.stroke);
    bool const want_frame = mode == "frame" || mode == "both";
    bool const want_rod = mode == "rod" || mode == "both";

    std::optional<PullTestProfile> frame;
    std::optional<PullTestProfile> rod;
    if (want_frame) frame = simulate_pull(fx.unit, PullMode::frame, end, step);
    if (want_rod) rod = simulate_pull(fx.unit, PullMode::rod, end, step);

    Summary s;
    s.add("fixture", fx.name);
    s.add("pull_rate_mm_per_s", fx.unit.pull_rate);
    s.add("sweep_end_mm", end);
    s.add("step_mm", step);
    fmt::print(out, "pulltest: {} (0 to {} mm, step {} mm)\n", fx.name, end, step);
    for (auto const* p : {&frame, &rod}) {
        if (!*p) continue;
        auto const& prof = **p;
        auto const name = to_string(prof.mode);
        {
            auto f = open_output(g, "pulltest_" + name + ".csv");
            write_profile_csv(f, prof);
        }
        s.add(name + "_peak_net_N", prof.peak_net);
        s.add(name + "_peak_position_mm", prof.peak_position);
        s.add(name + "_plateau_N", prof.plateau);
        fmt::print(out, "  {:5} pull: peak net {:.1f} N at {:.2f} mm, plateau {:.3f} N\n", name,
                   prof.peak_net, prof.peak_position, prof.plateau);
    }
    if (frame && rod) {
        auto const summary = detach_summary(*rod, &*frame);
        s.add("reduction_ratio", *summary.ratio_vs_frame);
        fmt::print(out, "  reduction ratio: {:.1f} % of the frame-pull peak\n",
                   100.0 * *summary.ratio_vs_frame);
    }
    s.add("reference_coil_springs_ratio", kCoilSpringReductionRatio);
    s.add("reference_neidhart_rubber_ratio", kNeidhartRubberReductionRatio);
    fmt::print(out, "  conventional compensators: {:.1f} % (6 coil springs), {:.1f} % (ring rubber spring)\n",
               100.0 * kCoilSpringReductionRatio, 100.0 * kNeidhartRubberReductionRatio);
    save_summary(g, "pulltest_summary.csv", s);
    s.write(out);

    if (g.plot) {
        PlotSpec spec{fmt::format("pull test, {}", fx.name), "crosshead displacement [mm]", "force [N]", {}};
        if (frame) spec.series.push_back({"frame pull", frame->samples, "#1f77b4"});
        if (rod) spec.series.push_back({"rod pull", rod->samples, "#d62728"});
        auto f = open_output(g, "pulltest.svg");
        write_svg_plot(f, spec);
    }
    return kExitOk;
}

int cmd_clamp(const GlobalOptions& g, const std::string& cfg, const std::string& mode_name,
              std::optional<double> efficiency, std::optional<double> stiffness, std::ostream& out) {
    auto scenario = load_clamp_scenario(fs::path(cfg));
    if (efficiency) scenario.transmission_efficiency = efficiency;
    if (stiffness) scenario.contact_stiffness = stiffness;
    auto const mode = mode_name == "model" ? ClampMode::model : ClampMode::replay;

    double const without = clamp_force(scenario, false, mode);
    double const with = clamp_force(scenario, true, mode);
    double const ratio = mode == ClampMode::replay ? amplification_ratio(scenario) : with / without;

    Summary s;
    s.add("mode", mode_name);
    s.add("bias_N", scenario.finger_weight_bias);
    s.add("control_force_N", scenario.control_force_applied);
    s.add("net_without_N", without);
    s.add("net_with_N", with);
    s.add("amplification", ratio);
    save_summary(g, "clamp_summary.csv", s);

    fmt::print(out, "clamp: {} ({})\n", cfg, mode_name);
    fmt::print(out, "  weight bias            {:.1f} N (reported separately)\n", scenario.finger_weight_bias);
    fmt::print(out, "  control force on rod   {:.1f} N\n", scenario.control_force_applied);
    fmt::print(out, "  net clamp, rod out     {:.1f} N\n", without);
    fmt::print(out, "  net clamp, rod engaged {:.1f} N\n", with);
    fmt::print(out, "  amplification          {:.3f} (x{:.1f})\n", ratio, ratio);
    s.write(out);

    if (g.plot) {
        PlotSpec spec{"clamping force", "state (0 = rod out, 1 = engaged)", "net force [N]", {}};
        spec.series.push_back({"net clamp force", {{0.0, without}, {1.0, with}}, "#1f77b4"});
        auto f = open_output(g, "clamp.svg");
        write_svg_plot(f, spec);
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Design and analysis toolkit for internally-balanced magnetic units", "ibmag"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--out", g.out_dir, "Output directory for CSV/SVG files");
    app.add_flag("--plot", g.plot, "Also write SVG plots");
    app.add_option("--seed", g.seed, "Optimizer seed");

    auto* fit = app.add_subcommand("fit", "Fit a power-law curve to force samples");
    std::string fit_input;
    std::optional<double> fit_p;
    fit->add_option("samples", fit_input, "CSV with header x_mm,force_N")->required();
    fit->add_option("--p", fit_p, "Fix the exponent (>= 1)");

    auto* synth = app.add_subcommand("synth", "Synthesize the multi-spring compensator");
    std::string synth_curve;
    std::string synth_catalog;
    int synth_n = 0;
    double synth_xmax = 0.0;
    synth->add_option("curve", synth_curve, "Curve file (.cfg power law or .csv samples)")->required();
    synth->add_option("--n", synth_n, "Number of linear springs")->required()->check(CLI::PositiveNumber);
    synth->add_option("--x-max", synth_xmax, "Stroke in mm")->required()->check(CLI::PositiveNumber);
    synth->add_option("--catalog", synth_catalog, "Available stiffnesses, one per line");

    auto* balance = app.add_subcommand("balance", "Internal-force profile of a magnetic-spring pair");
    std::string balance_fixture;
    std::size_t balance_grid = kDefaultSweepGrid;
    bool balance_ideal = false;
    balance->add_option("fixture", balance_fixture, "Fixture name or .cfg path")->required();
    balance->add_option("--grid", balance_grid, "Sweep nodes")->check(CLI::Range(2, 100000000));
    balance->add_flag("--ideal", balance_ideal, "Use repulsion identical to attraction");

    auto* pull = app.add_subcommand("pulltest", "Simulate the frame/rod pull test");
    std::string pull_fixture;
    std::string pull_mode = "both";
    double pull_step = 0.01;
    std::optional<double> pull_end;
    pull->add_option("fixture", pull_fixture, "Fixture name or .cfg path")->required();
    pull->add_option("--mode", pull_mode, "frame | rod | both")
        ->check(CLI::IsMember({"frame", "rod", "both"}));
    pull->add_option("--step", pull_step, "Crosshead step in mm")->check(CLI::PositiveNumber);
    pull->add_option("--sweep-end", pull_end, "Sweep end in mm (default twice the stroke)");

    auto* clamp = app.add_subcommand("clamp", "Evaluate the clamp scenario");
    std::string clamp_cfg;
    std::string clamp_mode = "replay";
    std::optional<double> clamp_eff;
    std::optional<double> clamp_k;
    clamp->add_option("scenario", clamp_cfg, "Scenario .cfg")->required();
    clamp->add_option("--mode", clamp_mode, "replay | model")->check(CLI::IsMember({"replay", "model"}));
    clamp->add_option("--efficiency", clamp_eff, "Transmission efficiency (model mode)");
    clamp->add_option("--contact-stiffness", clamp_k, "Contact stiffness in N/mm (model mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "ibmag: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*fit) return cmd_fit(g, fit_input, fit_p, out);
        if (*synth) return cmd_synth(g, synth_curve, synth_n, synth_xmax, synth_catalog, out);
        if (*balance) return cmd_balance(g, balance_fixture, balance_grid, balance_ideal, out);
        if (*pull) return cmd_pulltest(g, pull_fixture, pull_mode, pull_step, pull_end, out);
        if (*clamp) return cmd_clamp(g, clamp_cfg, clamp_mode, clamp_eff, clamp_k, out);
    } catch (const Error& e) {
        err << "ibmag: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "ibmag: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace ibmag

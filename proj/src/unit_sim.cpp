#include "ibmag/unit_sim.hpp"

#include "ibmag/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <ostream>

namespace ibmag {

std::string to_string(PullMode mode) { return mode == PullMode::frame ? "frame" : "rod"; }

double UnitConfig::carried_weight(PullMode mode) const {
    return mode == PullMode::frame ? suspended_weight() : rod_weight + jig_weight;
}

void UnitConfig::validate() const {
    if (!(frame_weight >= 0.0) || !(rod_weight >= 0.0) || !(jig_weight >= 0.0)) {
        throw ConfigError("unit weights must be >= 0");
    }
    if (!(stroke > 0.0) || !std::isfinite(stroke)) {
        throw ConfigError(fmt::format("stroke must be > 0, got {}", stroke));
    }
    if (!(hook_slack >= 0.0)) throw ConfigError("hook slack must be >= 0");
    if (stroke != pair.stroke) {
        throw ConfigError(fmt::format("unit stroke {} mm differs from the magnet pair stroke {} mm",
                                      stroke, pair.stroke));
    }
    try {
        pair.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("inconsistent stroke vs curve domains: ") + e.what());
    }
}

namespace {

double frame_pull_force(const UnitConfig& c, double gap) {
    if (gap > c.stroke) return c.suspended_weight();
    return c.suspended_weight() + eval_force(c.pair.attraction, gap);
}

}  // namespace

PullTestProfile simulate_pull(const UnitConfig& config, PullMode mode, double sweep_end,
                              double step, Exec exec) {
    config.validate();
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError(fmt::format("sweep step must be > 0, got {}", step));
    }
    if (!(sweep_end >= config.stroke + config.hook_slack)) {
        throw ConfigError(fmt::format("sweep end {} mm does not reach the stroke {} mm", sweep_end,
                                      config.stroke + config.hook_slack));
    }

    auto steps = static_cast<std::size_t>(std::floor(sweep_end / step + 1e-9));
    std::vector<double> xs;
    xs.reserve(steps + 2);
    double const snap_tol = 1e-9 * std::max(1.0, sweep_end);
    for (std::size_t i = 0; i <= steps; ++i) {
        double x = static_cast<double>(i) * step;
        // land exactly on the stroke end so the contact edge is sampled
        if (std::abs(x - (config.stroke + config.hook_slack)) < snap_tol) x = config.stroke + config.hook_slack;
        if (std::abs(x - sweep_end) < snap_tol) x = sweep_end;
        xs.push_back(x);
    }
    if (xs.back() < sweep_end) xs.push_back(sweep_end);

    auto const force_at = [&config, mode](double s) {
        double const u = s - config.hook_slack;
        if (u < 0.0) return config.jig_weight;
        if (mode == PullMode::frame) return frame_pull_force(config, u);
        if (u < config.stroke) return config.carried_weight(PullMode::rod) + internal_force(config.pair, u);
        return frame_pull_force(config, u);
    };

    // validate() guarantees every evaluation stays inside the curve domains
    auto const forces = kernels::transform(force_at, xs, exec);

    PullTestProfile profile;
    profile.mode = mode;
    profile.carried_weight = config.carried_weight(mode);
    profile.plateau = config.suspended_weight();
    if (mode == PullMode::rod) profile.contact_position = config.stroke + config.hook_slack;
    profile.samples.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) profile.samples.push_back({xs[i], forces[i]});

    auto const summary = detach_summary(profile);
    profile.peak_net = summary.peak_net;
    profile.peak_position = summary.peak_position;
    return profile;
}

DetachSummary detach_summary(const PullTestProfile& profile, const PullTestProfile* frame_profile) {
    if (profile.samples.empty()) throw EmptyProfile("pull-test profile has no samples");
    std::size_t at = 0;
    bool found = false;
    for (std::size_t i = 0; i < profile.samples.size(); ++i) {
        auto const& s = profile.samples[i];
        if (profile.contact_position && s.x >= *profile.contact_position) break;
        if (!found || s.force > profile.samples[at].force) {
            at = i;
            found = true;
        }
    }
    DetachSummary out{profile.samples[at].force - profile.carried_weight, profile.samples[at].x,
                      std::nullopt};
    if (frame_profile != nullptr) {
        auto const frame = detach_summary(*frame_profile);
        out.ratio_vs_frame = reduction_ratio(out.peak_net, frame.peak_net);
    }
    return out;
}

void write_profile_csv(std::ostream& out, const PullTestProfile& profile) {
    out << "displacement_mm,force_N\n";
    for (auto const& s : profile.samples) fmt::print(out, "{},{}\n", s.x, s.force);
}

}  // namespace ibmag

#include "ibmag/magnetic_spring.hpp"

#include "ibmag/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <ostream>

namespace ibmag {

void MagneticSpringPair::validate() const {
    if (!(stroke > 0.0) || !std::isfinite(stroke)) {
        throw ConfigError(fmt::format("stroke must be > 0, got {}", stroke));
    }
    if (!(rod_weight >= 0.0) || !(unit_weight >= 0.0)) {
        throw ConfigError("weights must be >= 0");
    }
    for (auto const* c : {&attraction, &repulsion}) {
        if (c->domain_max() < stroke) {
            throw ConfigError(fmt::format("curve domain ends at {} mm, before the stroke {} mm",
                                          c->domain_max(), stroke));
        }
        if (auto const* s = c->sampled(); s && s->x_min() > 0.0) {
            throw ConfigError("sampled curve must start at x = 0 to cover the stroke");
        }
    }
}

MagneticSpringPair ideal_pair(const ForceCurve& attraction, double stroke) {
    MagneticSpringPair pair{attraction, attraction, stroke};
    pair.validate();
    return pair;
}

double internal_force(const MagneticSpringPair& pair, double x) {
    if (!(x >= 0.0) || x > pair.stroke) {
        throw DomainError(fmt::format("x = {} outside the stroke [0, {}]", x, pair.stroke));
    }
    return eval_force(pair.repulsion, x) - eval_force(pair.attraction, x);
}

BalanceProfile deviation_profile(const MagneticSpringPair& pair, std::size_t grid, Exec exec) {
    if (grid < 2) throw DomainError(fmt::format("sweep grid needs >= 2 nodes, got {}", grid));
    auto const forces = kernels::sweep([&pair](double x) { return internal_force(pair, x); }, 0.0,
                                       pair.stroke, grid, exec);
    BalanceProfile profile;
    profile.samples.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        double const x = kernels::grid_node(0.0, pair.stroke, grid, i);
        profile.samples.push_back({x, forces[i], std::abs(forces[i])});
        if (profile.samples[i].deviation > profile.samples[profile.peak_index].deviation) {
            profile.peak_index = i;
        }
    }
    return profile;
}

ControlPeak peak_control_force(const MagneticSpringPair& pair, double bias, std::size_t grid,
                               Exec exec) {
    if (!(bias >= 0.0)) throw DomainError(fmt::format("bias must be >= 0, got {}", bias));
    if (grid < 2) throw DomainError(fmt::format("sweep grid needs >= 2 nodes, got {}", grid));
    auto const forces = kernels::sweep([&pair](double x) { return internal_force(pair, x); }, 0.0,
                                       pair.stroke, grid, exec);
    std::size_t at = 0;
    for (std::size_t i = 1; i < grid; ++i) {
        if (forces[i] > forces[at]) at = i;
    }
    double const net = forces[at];
    return {net + bias, net, bias, kernels::grid_node(0.0, pair.stroke, grid, at)};
}

double reduction_ratio(double rod_peak_net, double frame_peak_net) {
    if (!(frame_peak_net > 0.0)) {
        throw DomainError(fmt::format("frame peak must be > 0, got {}", frame_peak_net));
    }
    return rod_peak_net / frame_peak_net;
}

void write_balance_csv(std::ostream& out, const BalanceProfile& profile) {
    out << "x_mm,internal_force_N\n";
    for (auto const& s : profile.samples) fmt::print(out, "{},{}\n", s.x, s.internal_force);
}

}  // namespace ibmag

#include "ibmag/clamp.hpp"

#include "ibmag/errors.hpp"
#include "ibmag/fixtures.hpp"
#include "ibmag/kvconfig.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ibmag {

Converter converter_from_pair(const MagneticSpringPair& pair) {
    return {pair.repulsion, pair.attraction, 0.0};
}

double converter_internal_force(const Converter& conv, double x) {
    return eval_force(conv.forward, x) - eval_force(conv.inverse, x);
}

void ClampScenario::validate() const {
    for (double const f : {finger_weight_bias, control_force_applied, measured_net_without,
                           measured_net_with}) {
        if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("clamp forces must be >= 0");
    }
    if (!(grasp_interference >= 0.0)) throw ConfigError("grasp interference must be >= 0");
    if (transmission_efficiency && !(*transmission_efficiency >= 0.0)) {
        throw ConfigError("transmission efficiency must be >= 0");
    }
    if (contact_stiffness && !(*contact_stiffness > 0.0)) {
        throw ConfigError("contact stiffness must be > 0");
    }
}

namespace {

// Magnet pulls the finger onto an object `interference` thicker than the
// closed gap. Equilibrium: k (i - g) = F_att(g) for the remaining gap g.
double engaged_model_force(const UnitConfig& unit, double interference, double stiffness) {
    if (interference == 0.0) return 0.0;
    auto const& att = unit.pair.attraction;
    auto const excess = [&](double g) { return stiffness * (interference - g) - eval_force(att, g); };
    if (excess(0.0) <= 0.0) return stiffness * interference;  // gap closes fully
    double lo = 0.0;
    double hi = interference;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * interference; ++it) {
        double const mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return stiffness * (interference - 0.5 * (lo + hi));
}

}  // namespace

double clamp_force(const ClampScenario& scenario, bool rod_engaged, ClampMode mode) {
    scenario.validate();
    if (mode == ClampMode::replay) {
        return rod_engaged ? scenario.measured_net_with : scenario.measured_net_without;
    }
    if (!rod_engaged) {
        if (!scenario.transmission_efficiency) {
            throw ModeError("model mode needs a transmission efficiency for the disengaged clamp");
        }
        return scenario.control_force_applied * *scenario.transmission_efficiency;
    }
    if (!scenario.contact_stiffness) {
        throw ModeError("model mode needs a contact stiffness for the engaged clamp");
    }
    if (!scenario.unit) throw ModeError("model mode needs the unit fixture for the engaged clamp");
    if (scenario.grasp_interference > scenario.unit->stroke) {
        throw DomainError(fmt::format("interference {} mm exceeds the stroke {} mm",
                                      scenario.grasp_interference, scenario.unit->stroke));
    }
    return engaged_model_force(*scenario.unit, scenario.grasp_interference,
                               *scenario.contact_stiffness);
}

double amplification_ratio(const ClampScenario& scenario) {
    if (!(scenario.measured_net_without > 0.0)) {
        throw DomainError(fmt::format("clamp force without reduction must be > 0, got {}",
                                      scenario.measured_net_without));
    }
    return scenario.measured_net_with / scenario.measured_net_without;
}

ClampScenario load_clamp_scenario(const std::filesystem::path& path) {
    auto const kv = KeyValueFile::load(path);
    ClampScenario s;
    s.finger_weight_bias = kv.get_double("bias_N");
    s.control_force_applied = kv.get_double("control_force_N");
    s.measured_net_without = kv.get_double("net_without_N");
    s.measured_net_with = kv.get_double("net_with_N");
    s.grasp_interference = kv.get_double("interference_mm");
    s.transmission_efficiency = kv.find_double("transmission_efficiency");
    s.contact_stiffness = kv.find_double("contact_stiffness_N_per_mm");
    if (kv.has("unit")) {
        auto const name = kv.get_string("unit");
        auto const sibling = path.parent_path() / (name + ".cfg");
        s.unit = load_fixture(std::filesystem::is_regular_file(sibling) ? sibling.string() : name).unit;
    }
    s.validate();
    return s;
}

}  // namespace ibmag

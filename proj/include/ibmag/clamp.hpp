#pragma once

// Clamp driven by an IB Magnet. The unit is treated as a pair of opposing
// springs, forward F_s (repulsion) and inverse F_AS (attraction), whose sum
// nearly cancels; moving the rod moves their balance point, so a small input
// switches a large clamping force.

#include "ibmag/force_curve.hpp"
#include "ibmag/magnetic_spring.hpp"
#include "ibmag/unit_sim.hpp"

#include <filesystem>
#include <optional>

namespace ibmag {

struct Converter {
    ForceCurve forward;   // F_s magnitude
    ForceCurve inverse;   // F_AS magnitude
    double equilibrium = 0.0;  // mm
};

/// forward = repulsion (magnetic spring), inverse = attraction magnet.
Converter converter_from_pair(const MagneticSpringPair& pair);

/// F_s(x) - F_AS(x) in magnitude convention.
double converter_internal_force(const Converter& conv, double x);

enum class ClampMode { replay, model };

struct ClampScenario {
    std::optional<UnitConfig> unit;      // the enlarged IB Magnet, needed by model mode
    double finger_weight_bias = 0.0;     // N, finger weight resting on the load cell
    double control_force_applied = 0.0;  // N, load hung on the pulled-out rod
    double measured_net_without = 0.0;   // N, net clamp force, rod pulled out
    double measured_net_with = 0.0;      // N, net clamp force, rod shifted down
    double grasp_interference = 0.0;     // mm, object thickness beyond the minimum finger gap

    // model-mode parameters; no measured values exist for these
    std::optional<double> transmission_efficiency;  // net force per unit control force
    std::optional<double> contact_stiffness;        // N/mm of finger + object compliance

    /// Throws ConfigError on negative forces or interference.
    void validate() const;
};

/// Net clamping force (bias excluded). Replay returns the measured values;
/// model mode uses control force x efficiency when disengaged and the
/// magnet/contact equilibrium at the interference gap when engaged.
/// Throws ModeError when model mode lacks a parameter.
double clamp_force(const ClampScenario& scenario, bool rod_engaged,
                   ClampMode mode = ClampMode::replay);

/// measured_net_with / measured_net_without; DomainError if the denominator <= 0.
double amplification_ratio(const ClampScenario& scenario);

/// Keys: bias_N, control_force_N, net_without_N, net_with_N, interference_mm;
/// optional transmission_efficiency, contact_stiffness_N_per_mm and
/// `unit = <fixture>` (resolved with load_fixture).
ClampScenario load_clamp_scenario(const std::filesystem::path& path);

}  // namespace ibmag

#pragma once

// Built-in prototype fixtures. A fixture file records the measured figures of
// a prototype (magnet geometry, stroke, weights, endpoint forces, peak
// imbalance); the power-law curves are calibrated from those figures when the
// file is loaded.

#include "ibmag/unit_sim.hpp"

#include <filesystem>
#include <string>

namespace ibmag {

struct MagnetSpec {
    std::string type_number;
    double outer_diameter = 0.0;  // mm
    double inner_diameter = 0.0;  // mm
    double thickness = 0.0;       // mm
    double weight = 0.0;          // g
};

struct Fixture {
    std::string name;
    MagnetSpec magnet;
    UnitConfig unit;
    double attraction_at_contact = 0.0;  // N
    double attraction_at_stroke = 0.0;   // N
    double peak_imbalance = 0.0;         // N, at x = 0
};

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

/// Directory holding the shipped fixture files; IBMAG_DATA_DIR overrides.
std::filesystem::path data_dir();

/// Resolves a fixture name (`prototype_small`) or a path to a `.cfg` file.
std::filesystem::path resolve_fixture(const std::string& name_or_path);

/// Attraction from the two endpoint forces; repulsion scaled so that
/// repulsion(0) - attraction(0) equals the peak imbalance.
Fixture load_fixture(const std::string& name_or_path);

}  // namespace ibmag

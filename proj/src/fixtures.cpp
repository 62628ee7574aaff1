#include "ibmag/fixtures.hpp"

#include "ibmag/errors.hpp"
#include "ibmag/kvconfig.hpp"

#include <cstdlib>

namespace ibmag {

std::filesystem::path data_dir() {
    if (char const* env = std::getenv("IBMAG_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
#ifdef IBMAG_DATA_DIR
    return IBMAG_DATA_DIR;
#else
    return "data";
#endif
}

std::filesystem::path resolve_fixture(const std::string& name_or_path) {
    std::filesystem::path const direct(name_or_path);
    if (std::filesystem::is_regular_file(direct)) return direct;
    auto candidate = data_dir() / name_or_path;
    if (std::filesystem::is_regular_file(candidate)) return candidate;
    candidate = data_dir() / (name_or_path + ".cfg");
    if (std::filesystem::is_regular_file(candidate)) return candidate;
    throw ParseError("no fixture named '" + name_or_path + "' (looked in " + data_dir().string() + ")");
}

Fixture load_fixture(const std::string& name_or_path) {
    auto const kv = KeyValueFile::load(resolve_fixture(name_or_path));

    MagnetSpec magnet;
    if (kv.has("magnet_type")) magnet.type_number = kv.get_string("magnet_type");
    magnet.outer_diameter = kv.get_double_or("magnet_outer_diameter_mm", 0.0);
    magnet.inner_diameter = kv.get_double_or("magnet_inner_diameter_mm", 0.0);
    magnet.thickness = kv.get_double_or("magnet_thickness_mm", 0.0);
    magnet.weight = kv.get_double_or("magnet_weight_g", 0.0);

    double const stroke = kv.get_double("stroke_mm");
    double const at_contact = kv.get_double("attraction_at_contact_N");
    double const at_stroke = kv.get_double("attraction_at_stroke_N");
    double const imbalance = kv.get_double("peak_imbalance_N");
    double const exponent = kv.get_double_or("exponent", 2.0);

    Sample const pts[] = {{0.0, at_contact}, {stroke, at_stroke}};
    ForceCurve const attraction = fit_power_law(pts, exponent);
    double const f0 = eval_force(attraction, 0.0);
    if (!(f0 + imbalance > 0.0)) {
        throw ConfigError(kv.source() + ": peak imbalance leaves no repulsion at contact");
    }
    ForceCurve const repulsion = attraction.scaled(1.0 + imbalance / f0);

    double const unit_weight = kv.get_double("unit_weight_g") * 1e-3 * kStandardGravity;
    double const rod_weight = kv.get_double_or("rod_weight_N", 0.0);
    if (rod_weight > unit_weight) throw ConfigError(kv.source() + ": rod heavier than the unit");

    UnitConfig unit{MagneticSpringPair{attraction, repulsion, stroke, rod_weight, unit_weight}};
    unit.rod_weight = rod_weight;
    unit.frame_weight = unit_weight - rod_weight;
    unit.jig_weight = kv.get_double_or("jig_weight_N", 0.0);
    unit.stroke = stroke;
    unit.hook_slack = kv.get_double_or("hook_slack_mm", 0.0);
    unit.pull_rate = kv.get_double_or("pull_rate_mm_per_s", 0.5);
    unit.validate();

    Fixture fx{kv.has("name") ? kv.get_string("name") : name_or_path, std::move(magnet),
               std::move(unit), at_contact, at_stroke, imbalance};
    return fx;
}

}  // namespace ibmag

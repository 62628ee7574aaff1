#pragma once

// Quasi-static pull test of an IB Magnet unit. A crosshead rises at constant
// displacement and the force on the hook is recorded; no inertia, the pull
// rate is metadata only.
//
// Frame pull: the whole unit lifts off, the force is the total weight plus
// the attraction at the opened gap, dropping to the weight once the gap
// passes the stroke (the characterized range of the attraction).
//
// Rod pull: the frame stays on the target and the hook carries the rod and
// jig against the internal force. At the stroke end the rod hits the frame
// and the test continues as a frame pull at that gap.

#include "ibmag/force_curve.hpp"
#include "ibmag/kernels.hpp"
#include "ibmag/magnetic_spring.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ibmag {

enum class PullMode { frame, rod };

std::string to_string(PullMode mode);

struct UnitConfig {
    MagneticSpringPair pair;
    double frame_weight = 0.0;  // N
    double rod_weight = 0.0;    // N
    double jig_weight = 0.0;    // N
    double stroke = 0.0;        // mm
    double hook_slack = 0.0;    // mm of free travel before the hook engages
    double pull_rate = 0.5;     // mm/s, metadata

    double suspended_weight() const { return frame_weight + rod_weight + jig_weight; }
    double carried_weight(PullMode mode) const;

    /// Throws ConfigError on negative weights, a non-positive stroke or a stroke
    /// that disagrees with the pair or exceeds the curve domains.
    void validate() const;
};

struct PullTestProfile {
    PullMode mode = PullMode::frame;
    std::vector<Sample> samples;  // (crosshead displacement mm, force N)
    double carried_weight = 0.0;  // weight subtracted for the net peak, N
    double plateau = 0.0;         // force after full detach, N
    double peak_net = 0.0;        // N
    double peak_position = 0.0;   // mm
    std::optional<double> contact_position;  // rod mode: where the rod hits the frame
};

/// Sweeps the crosshead from 0 to sweep_end in increments of `step`.
PullTestProfile simulate_pull(const UnitConfig& config, PullMode mode, double sweep_end,
                              double step, Exec exec = Exec::parallel);

struct DetachSummary {
    double peak_net;
    double peak_position;
    std::optional<double> ratio_vs_frame;
};

/// Net peak of a profile (before the contact edge in rod mode) and, given the
/// matching frame profile, the reduction ratio. Throws EmptyProfile.
DetachSummary detach_summary(const PullTestProfile& profile,
                             const PullTestProfile* frame_profile = nullptr);

/// CSV `displacement_mm,force_N`.
void write_profile_csv(std::ostream& out, const PullTestProfile& profile);

}  // namespace ibmag

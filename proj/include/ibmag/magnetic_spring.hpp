#pragma once

// Magnetic-spring balancing: an unlike-pole attraction pair on the control
// rod cancelled by a like-pole repulsion pair at the same gap.
//
// Sign convention along the pull-out axis: positive pushes the rod outward.
// The internal force is therefore repulsion(x) - attraction(x) with both
// curves stored as magnitudes.

#include "ibmag/force_curve.hpp"
#include "ibmag/kernels.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace ibmag {

/// Reference reduction ratios of conventional compensators, for reports.
inline constexpr double kCoilSpringReductionRatio = 0.118;       // six coil springs
inline constexpr double kNeidhartRubberReductionRatio = 0.154;   // ring rubber spring

inline constexpr std::size_t kDefaultSweepGrid = 1001;

struct MagneticSpringPair {
    ForceCurve attraction;  // unlike-pole pair magnitude
    ForceCurve repulsion;   // like-pole pair magnitude
    double stroke;          // mm
    double rod_weight = 0.0;   // N
    double unit_weight = 0.0;  // N

    /// Throws ConfigError unless stroke > 0, weights >= 0 and both curves cover [0, stroke].
    void validate() const;
};

/// Pair with repulsion == attraction (ideal cancellation).
MagneticSpringPair ideal_pair(const ForceCurve& attraction, double stroke);

struct BalanceSample {
    double x;               // mm
    double internal_force;  // N, signed
    double deviation;       // N, |internal_force|
};

struct BalanceProfile {
    std::vector<BalanceSample> samples;
    std::size_t peak_index = 0;  // first sample of maximum deviation

    const BalanceSample& peak() const { return samples.at(peak_index); }
};

double internal_force(const MagneticSpringPair& pair, double x);

/// Uniform sweep of the internal force over [0, stroke] with `grid` nodes.
BalanceProfile deviation_profile(const MagneticSpringPair& pair,
                                 std::size_t grid = kDefaultSweepGrid,
                                 Exec exec = Exec::parallel);

struct ControlPeak {
    double total;     // max of internal force + bias, N
    double net;       // total - bias
    double bias;      // N
    double position;  // mm
};

/// Peak of internal_force + bias on the sweep grid, net value separated.
ControlPeak peak_control_force(const MagneticSpringPair& pair, double bias,
                               std::size_t grid = kDefaultSweepGrid,
                               Exec exec = Exec::parallel);

/// rod_peak_net / frame_peak_net; throws DomainError if frame_peak_net <= 0.
double reduction_ratio(double rod_peak_net, double frame_peak_net);

/// CSV `x_mm,internal_force_N`.
void write_balance_csv(std::ostream& out, const BalanceProfile& profile);

}  // namespace ibmag

#pragma once

// Conventional nonlinear compensator: a stack of cam-limited linear springs
// whose summed characteristic is the piecewise-linear envelope of tangent
// lines placed on a convex decreasing magnet curve.
//
// Index convention: tangent points increase with x (X_1 < X_2 < ...), so the
// stiffness magnitudes K_i decrease. Spring j is a preloaded compression
// spring of stiffness k_j that pushes with k_j (e_j - x) until x reaches its
// engagement end e_j. Summed, S(x) = sum_j k_j max(0, e_j - x) has slope -K_i
// on the i-th segment with K_i = sum_{j >= i} k_j.

#include "ibmag/force_curve.hpp"
#include "ibmag/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace ibmag {

struct TangentLine {
    double point;      // X_n, mm
    double force;      // F(X_n), N
    double stiffness;  // K_n = |dF/dx| at X_n, N/mm

    double operator()(double x) const { return force - stiffness * (x - point); }
    /// Displacement where the line reaches zero force.
    double zero_crossing() const { return point + force / stiffness; }
};

struct LinearSpring {
    double stiffness;       // k_j, N/mm
    double engagement_end;  // e_j, mm; the spring force reaches zero here
    double cam_depth;       // mm; cam disengages the spring at min(e_j, x_max)
    bool clamped = false;   // true when e_j lies beyond the stroke
};

struct SpringDesign {
    std::vector<TangentLine> tangents;
    std::vector<LinearSpring> springs;
    std::vector<double> break_points;  // size() == springs.size() - 1
    double x_max = 0.0;
    double delta_e = 0.0;        // N*mm
    double residual_step = 0.0;  // force dropped by the cams at x_max, N
    double min_residual = 0.0;   // min of F - S over the check grid, N
    bool residual_negative = false;
};

struct SpringCatalog {
    std::vector<double> stiffnesses;  // N/mm

    /// Throws CatalogError unless the list is non-empty, positive and finite.
    void validate() const;
};

/// Tangent of the curve at X. Throws ShapeError if the slope is not negative.
TangentLine tangent_at(const ForceCurve& curve, double x);

/// Intersection of two consecutive tangent lines (x_n in the envelope).
/// Throws ShapeError unless prev.stiffness > next.stiffness.
double break_point(const TangentLine& prev, const TangentLine& next);

/// Builds the spring stack whose characteristic equals max(0, max_i T_i(x))
/// on [0, x_max]. Throws ShapeError if the curve is not convex decreasing on
/// the stroke or the points are not strictly increasing inside [0, x_max).
SpringDesign build_design(const ForceCurve& curve, std::span<const double> tangent_points,
                          double x_max);

/// S(x). Inside the stroke this is the hinge sum; past x_max every cam has
/// disengaged and S is zero.
double spring_force(const SpringDesign& design, double x);

/// Closed-form integral of S over [0, x_max].
double spring_work(const SpringDesign& design);

/// Energy loss: integral of F - S over [0, x_max]. Throws ShapeError if the
/// integrand drops below -1e-9 N anywhere on the check grid.
double delta_e(const ForceCurve& curve, const SpringDesign& design, double x_max);

struct OptimizeOptions {
    int starts = 10;
    int max_sweeps = 400;
    Exec exec = Exec::parallel;
};

/// Multistart coordinate search (golden section per coordinate, plus a
/// pattern move after each sweep) over tangent-point placements minimizing
/// delta_e. Deterministic for a given seed; restarts are merged by minimum
/// delta_e, then the lexicographically smallest point vector.
SpringDesign optimize_tangent_points(const ForceCurve& curve, int n, double x_max,
                                     std::uint64_t seed, const OptimizeOptions& options = {});

/// Replaces every k_j by its nearest catalog stiffness and re-solves the
/// engagement ends so each segment stays a supporting line of the curve.
/// Throws CatalogError if S exceeds F by more than 1e-6 N after the snap.
SpringDesign snap_to_catalog(const SpringDesign& design, const SpringCatalog& catalog,
                             const ForceCurve& curve);

/// Design report: `spring_index,k_N_per_mm,engagement_end_mm,cam_depth_mm`
/// rows followed by `delta_e_Nmm,<value>`.
void write_design_csv(std::ostream& out, const SpringDesign& design);

/// One stiffness per line; optional `k_N_per_mm` header and `#` comments.
SpringCatalog read_catalog(std::istream& in);
SpringCatalog read_catalog(const std::filesystem::path& path);

}  // namespace ibmag

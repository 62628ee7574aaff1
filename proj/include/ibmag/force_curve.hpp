#pragma once

// Force-displacement characteristics of magnets and springs.
//
// All curves store positive force magnitudes in N against displacement in mm.
// Direction along the rod axis is applied by the consumer (magnetic_spring,
// unit_sim, clamp), never here.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace ibmag {

struct Sample {
    double x;      // mm
    double force;  // N
};

/// F(x) = A / (x + c)^p, positive, strictly decreasing and strictly convex on x >= 0.
struct PowerLawCurve {
    double amplitude;       // A, N*mm^p
    double offset;          // c, mm
    double exponent = 2.0;  // p

    /// Validating constructor; throws DomainError unless A > 0, c > 0, p >= 1.
    static PowerLawCurve make(double amplitude, double offset, double exponent = 2.0);

    double force(double x) const;
    double slope(double x) const;
    /// Closed-form integral of F over [a, b].
    double work(double a, double b) const;
};

/// Monotone piecewise-cubic (Fritsch-Butland / PCHIP) interpolant through samples.
class SampledCurve {
public:
    /// Requires >= 3 samples, strictly increasing x >= 0, non-negative force.
    explicit SampledCurve(std::vector<Sample> samples);

    std::span<const Sample> samples() const { return samples_; }
    double x_min() const { return samples_.front().x; }
    double x_max() const { return samples_.back().x; }

    double force(double x) const;
    double slope(double x) const;

private:
    std::size_t segment(double x) const;

    std::vector<Sample> samples_;
    std::vector<double> knot_slopes_;
};

/// Tagged alternative of the two curve representations.
class ForceCurve {
public:
    ForceCurve(PowerLawCurve curve) : repr_(curve) {}  // NOLINT(google-explicit-constructor)
    ForceCurve(SampledCurve curve) : repr_(std::move(curve)) {}  // NOLINT(google-explicit-constructor)

    bool is_power_law() const { return std::holds_alternative<PowerLawCurve>(repr_); }
    const PowerLawCurve* power_law() const { return std::get_if<PowerLawCurve>(&repr_); }
    const SampledCurve* sampled() const { return std::get_if<SampledCurve>(&repr_); }

    /// Upper end of the evaluation domain; +inf for parametric curves.
    double domain_max() const;
    /// Throws DomainError if x is outside [0, domain_max()] (or below the first sample).
    void check_domain(double x) const;

    /// Returns a copy with every force value multiplied by `factor` > 0.
    ForceCurve scaled(double factor) const;

private:
    std::variant<PowerLawCurve, SampledCurve> repr_;
};

double eval_force(const ForceCurve& curve, double x);
double eval_slope(const ForceCurve& curve, double x);

/// Integral of the force magnitude over [a, b]. Closed form for power laws,
/// adaptive Simpson (relative tolerance 1e-9) for sampled curves.
double work_integral(const ForceCurve& curve, double a, double b);

/// Least-squares fit of A and c (and p, unless fixed) to positive samples.
///
/// With exactly two samples and a fixed exponent the result interpolates both
/// samples exactly. With two samples and a free exponent p defaults to 2.
/// Throws FitError on non-convergence or a non-positive offset.
PowerLawCurve fit_power_law(std::span<const Sample> samples,
                            std::optional<double> fixed_exponent = std::nullopt);

/// Pointwise residuals sample.force - curve(sample.x).
std::vector<double> fit_residuals(const PowerLawCurve& curve, std::span<const Sample> samples);

/// True if the curve is strictly decreasing and convex on [a, b]: slope < 0 at
/// every grid node and second differences >= -tol on a uniform grid.
bool is_convex_decreasing(const ForceCurve& curve, double a, double b,
                          std::size_t grid = 1000, double tol = 1e-9);

// CSV with header `x_mm,force_N`.
std::vector<Sample> read_samples_csv(std::istream& in);
std::vector<Sample> read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(std::ostream& out, std::span<const Sample> samples);

// Key-value curve file (`model = power_law`, `amplitude`, `offset`, `exponent`).
void write_curve_file(std::ostream& out, const PowerLawCurve& curve);
PowerLawCurve read_curve_file(const std::filesystem::path& path);

/// Loads a curve from disk: `.csv` files become SampledCurve, anything else is
/// read as a power-law curve file.
ForceCurve load_curve(const std::filesystem::path& path);

}  // namespace ibmag

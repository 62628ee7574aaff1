#include "ibmag/spring_synthesis.hpp"

#include "ibmag/errors.hpp"
#include "ibmag/kvconfig.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

namespace ibmag {

namespace {

constexpr std::size_t kCheckGrid = 1000;
constexpr double kResidualTol = 1e-9;
constexpr double kCatalogTol = 1e-6;

// Tangent lines -> springs. No validation; callers guarantee ordering.
SpringDesign assemble(std::vector<TangentLine> lines, double x_max) {
    SpringDesign d;
    d.x_max = x_max;
    d.tangents = std::move(lines);
    auto const n = d.tangents.size();
    if (n == 0) return d;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        d.break_points.push_back(break_point(d.tangents[i], d.tangents[i + 1]));
    }
    d.springs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const k_next = i + 1 < n ? d.tangents[i + 1].stiffness : 0.0;
        LinearSpring s;
        s.stiffness = d.tangents[i].stiffness - k_next;
        s.engagement_end = i + 1 < n ? d.break_points[i] : d.tangents[i].zero_crossing();
        s.clamped = s.engagement_end > x_max;
        s.cam_depth = std::min(s.engagement_end, x_max);
        d.springs.push_back(s);
    }
    auto const& last = d.springs.back();
    d.residual_step = last.clamped ? last.stiffness * (last.engagement_end - x_max) : 0.0;
    // Earlier springs end before the last tangent point, so only the last can be clamped.
    return d;
}

// Integral of S over [0, upto].
double spring_work_upto(const SpringDesign& d, double upto) {
    double acc = 0.0;
    for (auto const& s : d.springs) {
        double const u = std::clamp(std::min(upto, s.cam_depth), 0.0, s.engagement_end);
        acc += s.stiffness * (s.engagement_end * u - 0.5 * u * u);
    }
    return acc;
}

// min of F - S on a uniform grid plus every break and tangent point.
double min_residual(const ForceCurve& curve, const SpringDesign& d, double x_max) {
    std::vector<double> xs;
    xs.reserve(kCheckGrid + 1 + 2 * d.tangents.size());
    for (std::size_t i = 0; i <= kCheckGrid; ++i) xs.push_back(kernels::grid_node(0.0, x_max, kCheckGrid + 1, i));
    for (double const b : d.break_points) {
        if (b >= 0.0 && b <= x_max) xs.push_back(b);
    }
    for (auto const& t : d.tangents) {
        if (t.point >= 0.0 && t.point <= x_max) xs.push_back(t.point);
    }
    double lo = std::numeric_limits<double>::infinity();
    for (double const x : xs) lo = std::min(lo, eval_force(curve, x) - spring_force(d, x));
    return lo;
}

void check_stroke(const ForceCurve& curve, double x_max) {
    if (!(x_max > 0.0) || !std::isfinite(x_max)) {
        throw DomainError(fmt::format("stroke x_max must be > 0, got {}", x_max));
    }
    curve.check_domain(x_max);
}

void require_convex_decreasing(const ForceCurve& curve, double x_max) {
    if (!is_convex_decreasing(curve, 0.0, x_max, kCheckGrid, kResidualTol)) {
        throw ShapeError(fmt::format(
            "curve is not convex and strictly decreasing on [0, {}]; the tangent envelope "
            "would cross it",
            x_max));
    }
}

std::vector<TangentLine> tangents_for(const ForceCurve& curve, std::span<const double> points) {
    std::vector<TangentLine> lines;
    lines.reserve(points.size());
    for (double const x : points) lines.push_back(tangent_at(curve, x));
    return lines;
}

// ---------------------------------------------------------------------------
// Optimizer internals

constexpr double kInvPhi = 0.6180339887498948482;

struct Objective {
    const ForceCurve& curve;
    double x_max;
    double curve_work;

    double operator()(std::span<const double> points) const {
        return curve_work - spring_work_upto(assemble(tangents_for(curve, points), x_max), x_max);
    }
};

// Golden-section minimization of g on [lo, hi]; returns the best abscissa
// among the bracket probes and `current`.
template <class G>
std::pair<double, double> golden_min(G&& g, double lo, double hi, double current,
                                     double f_current, double tol) {
    double best_x = current;
    double best_f = f_current;
    auto probe = [&](double x) {
        double const f = g(x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
        return f;
    };
    double a = lo;
    double b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = probe(c);
    double fd = probe(d);
    probe(lo);
    probe(hi);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = probe(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = probe(d);
        }
    }
    return {best_x, best_f};
}

struct RunResult {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> points;
};

RunResult coordinate_search(const Objective& obj, std::vector<double> x, int max_sweeps) {
    auto const n = x.size();
    double const gap = 1e-9 * obj.x_max;
    double const upper = obj.x_max - gap;
    double const tol = 1e-12 * obj.x_max;
    double f = obj(x);

    std::vector<double> trial = x;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double const f_start = f;
        auto const x_start = x;

        for (std::size_t i = 0; i < n; ++i) {
            double const lo = i == 0 ? 0.0 : x[i - 1] + gap;
            double const hi = i + 1 == n ? upper : x[i + 1] - gap;
            if (!(hi > lo)) continue;
            trial = x;
            auto g = [&](double t) {
                trial[i] = t;
                return obj(trial);
            };
            auto const [bx, bf] = golden_min(g, lo, hi, x[i], f, tol);
            if (bf < f) {
                x[i] = bx;
                f = bf;
            }
        }

        // Pattern move along the net displacement of this sweep.
        std::vector<double> dir(n);
        double dir_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dir[i] = x[i] - x_start[i];
            dir_norm = std::max(dir_norm, std::abs(dir[i]));
        }
        if (dir_norm > 0.0) {
            double t_max = 8.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (dir[i] < 0.0) t_max = std::min(t_max, (0.0 - x[i]) / dir[i]);
                if (dir[i] > 0.0) t_max = std::min(t_max, (upper - x[i]) / dir[i]);
                if (i + 1 < n) {
                    double const closing = dir[i] - dir[i + 1];
                    if (closing > 0.0) t_max = std::min(t_max, (x[i + 1] - x[i] - gap) / closing);
                }
            }
            if (t_max > 0.0) {
                // t_max can overshoot a bound by an ulp; clamp so no point leaves the stroke
                auto const moved = [&](double t, std::size_t i) {
                    return std::clamp(x[i] + t * dir[i], 0.0, upper);
                };
                auto g = [&](double t) {
                    for (std::size_t i = 0; i < n; ++i) trial[i] = moved(t, i);
                    return obj(trial);
                };
                auto const [bt, bf] = golden_min(g, 0.0, t_max, 0.0, f, 1e-12 * t_max);
                if (bf < f) {
                    for (std::size_t i = 0; i < n; ++i) trial[i] = moved(bt, i);
                    x = trial;
                    f = bf;
                }
            }
        }

        if (f_start - f <= 1e-15 * std::abs(f) + 1e-18) break;
    }
    return {f, std::move(x)};
}

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::vector<double>> make_starts(int n, int count, double x_max, std::uint64_t seed) {
    std::vector<std::vector<double>> starts;
    double const upper = x_max * (1.0 - 1e-6);
    // Deterministic start: quadratic spacing, denser where the curve bends most.
    std::vector<double> first(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double const u = (i + 0.5) / n;
        first[static_cast<std::size_t>(i)] = upper * u * u;
    }
    starts.push_back(std::move(first));

    std::mt19937_64 rng(seed);
    while (static_cast<int>(starts.size()) < count) {
        std::vector<double> pts(static_cast<std::size_t>(n));
        for (auto& p : pts) p = upper * unit_uniform(rng);
        std::sort(pts.begin(), pts.end());
        // separate coincident draws
        double const min_gap = 1e-6 * x_max;
        for (std::size_t i = 1; i < pts.size(); ++i) pts[i] = std::max(pts[i], pts[i - 1] + min_gap);
        if (pts.back() < x_max) starts.push_back(std::move(pts));
    }
    return starts;
}

double nearest(const std::vector<double>& values, double target) {
    double best = values.front();
    for (double const v : values) {
        double const dv = std::abs(v - target);
        double const db = std::abs(best - target);
        if (dv < db || (dv == db && v < best)) best = v;
    }
    return best;
}

// Point where the supporting line of slope -stiffness touches the curve on
// [0, x_max]; clamps to the stroke ends when no interior tangency exists.
TangentLine supporting_line(const ForceCurve& curve, double stiffness, double x_max) {
    auto const k_at = [&](double x) { return -eval_slope(curve, x); };
    double x = 0.0;
    if (stiffness >= k_at(0.0)) {
        x = 0.0;
    } else if (stiffness <= k_at(x_max)) {
        x = x_max;
    } else {
        double lo = 0.0;
        double hi = x_max;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * x_max; ++it) {
            double const mid = 0.5 * (lo + hi);
            if (k_at(mid) > stiffness) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        x = 0.5 * (lo + hi);
    }
    return {x, eval_force(curve, x), stiffness};
}

}  // namespace

// ---------------------------------------------------------------------------

void SpringCatalog::validate() const {
    if (stiffnesses.empty()) throw CatalogError("spring catalog is empty");
    for (double const k : stiffnesses) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw CatalogError(fmt::format("catalog stiffness must be positive and finite, got {}", k));
        }
    }
}

TangentLine tangent_at(const ForceCurve& curve, double x) {
    double const f = eval_force(curve, x);
    double const slope = eval_slope(curve, x);
    if (!(slope < 0.0)) {
        throw ShapeError(fmt::format("curve is not strictly decreasing at x = {} (slope {})", x, slope));
    }
    return {x, f, -slope};
}

double break_point(const TangentLine& prev, const TangentLine& next) {
    if (!(prev.stiffness > next.stiffness)) {
        throw ShapeError(fmt::format(
            "tangent stiffness must decrease along x (K_prev = {}, K_next = {})", prev.stiffness,
            next.stiffness));
    }
    return (next.stiffness * next.point - prev.stiffness * prev.point + next.force - prev.force) /
           (next.stiffness - prev.stiffness);
}

SpringDesign build_design(const ForceCurve& curve, std::span<const double> tangent_points,
                          double x_max) {
    check_stroke(curve, x_max);
    for (std::size_t i = 0; i < tangent_points.size(); ++i) {
        double const x = tangent_points[i];
        if (!(x >= 0.0) || !(x < x_max)) {
            throw DomainError(fmt::format("tangent point {} outside [0, {})", x, x_max));
        }
        if (i > 0 && !(x > tangent_points[i - 1])) {
            throw DomainError("tangent points must be strictly increasing");
        }
    }
    require_convex_decreasing(curve, x_max);

    auto design = assemble(tangents_for(curve, tangent_points), x_max);
    design.min_residual = min_residual(curve, design, x_max);
    design.residual_negative = design.min_residual < -kResidualTol;
    if (design.residual_negative) {
        throw ShapeError(fmt::format("spring envelope exceeds the curve by {} N",
                                     -design.min_residual));
    }
    design.delta_e = work_integral(curve, 0.0, x_max) - spring_work_upto(design, x_max);
    return design;
}

double spring_force(const SpringDesign& design, double x) {
    double s = 0.0;
    for (auto const& sp : design.springs) {
        if (x <= sp.cam_depth && x < sp.engagement_end) s += sp.stiffness * (sp.engagement_end - x);
    }
    return s;
}

double spring_work(const SpringDesign& design) { return spring_work_upto(design, design.x_max); }

double delta_e(const ForceCurve& curve, const SpringDesign& design, double x_max) {
    check_stroke(curve, x_max);
    double const lo = min_residual(curve, design, x_max);
    if (lo < -kResidualTol) {
        throw ShapeError(fmt::format("F - S drops to {} N; the spring envelope crosses the curve", lo));
    }
    return work_integral(curve, 0.0, x_max) - spring_work_upto(design, x_max);
}

SpringDesign optimize_tangent_points(const ForceCurve& curve, int n, double x_max,
                                     std::uint64_t seed, const OptimizeOptions& options) {
    if (n < 1) throw DomainError(fmt::format("number of springs must be >= 1, got {}", n));
    check_stroke(curve, x_max);
    require_convex_decreasing(curve, x_max);

    Objective const obj{curve, x_max, work_integral(curve, 0.0, x_max)};
    auto const starts = make_starts(n, std::max(options.starts, 1), x_max, seed);
    auto const runs = kernels::map_index<RunResult>(
        [&](std::size_t i) { return coordinate_search(obj, starts[i], options.max_sweeps); },
        starts.size(), options.exec);

    // Merge in index order: minimum value, then lexicographically smallest points.
    auto const* best = &runs.front();
    for (auto const& r : runs) {
        if (r.value < best->value || (r.value == best->value && r.points < best->points)) best = &r;
    }
    return build_design(curve, best->points, x_max);
}

SpringDesign snap_to_catalog(const SpringDesign& design, const SpringCatalog& catalog,
                             const ForceCurve& curve) {
    catalog.validate();
    double const x_max = design.x_max;
    check_stroke(curve, x_max);
    auto const n = design.springs.size();
    if (n == 0) return design;

    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j) k[j] = nearest(catalog.stiffnesses, design.springs[j].stiffness);

    // K_i = sum_{j >= i} k_j, then the supporting line with that stiffness.
    std::vector<TangentLine> lines(n);
    double cumulative = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        cumulative += k[i];
        lines[i] = supporting_line(curve, cumulative, x_max);
    }
    auto snapped = assemble(std::move(lines), x_max);
    for (std::size_t j = 0; j < n; ++j) snapped.springs[j].stiffness = k[j];

    snapped.min_residual = min_residual(curve, snapped, x_max);
    if (snapped.min_residual < -kCatalogTol) {
        throw CatalogError(fmt::format(
            "no catalog re-solution keeps the springs below the curve (excess {} N)",
            -snapped.min_residual));
    }
    snapped.residual_negative = snapped.min_residual < -kResidualTol;
    snapped.delta_e = work_integral(curve, 0.0, x_max) - spring_work_upto(snapped, x_max);
    return snapped;
}

void write_design_csv(std::ostream& out, const SpringDesign& design) {
    out << "spring_index,k_N_per_mm,engagement_end_mm,cam_depth_mm\n";
    for (std::size_t j = 0; j < design.springs.size(); ++j) {
        auto const& s = design.springs[j];
        fmt::print(out, "{},{},{},{}\n", j + 1, s.stiffness, s.engagement_end, s.cam_depth);
    }
    fmt::print(out, "delta_e_Nmm,{}\n", design.delta_e);
}

SpringCatalog read_catalog(std::istream& in) {
    SpringCatalog cat;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto const hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto const first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto const last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line == "k_N_per_mm") continue;
        cat.stiffnesses.push_back(parse_double(line, fmt::format("catalog line {}", lineno)));
    }
    cat.validate();
    return cat;
}

SpringCatalog read_catalog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return read_catalog(in);
}

}  // namespace ibmag

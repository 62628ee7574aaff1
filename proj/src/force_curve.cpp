#include "ibmag/force_curve.hpp"

#include "ibmag/errors.hpp"
#include "ibmag/kvconfig.hpp"
#include "ibmag/quadrature.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ibmag {

// ---------------------------------------------------------------------------
// PowerLawCurve

PowerLawCurve PowerLawCurve::make(double amplitude, double offset, double exponent) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
        throw DomainError(fmt::format("power law amplitude must be > 0, got {}", amplitude));
    }
    if (!(offset > 0.0) || !std::isfinite(offset)) {
        throw DomainError(fmt::format("power law offset must be > 0, got {}", offset));
    }
    if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
        throw DomainError(fmt::format("power law exponent must be >= 1, got {}", exponent));
    }
    return {amplitude, offset, exponent};
}

double PowerLawCurve::force(double x) const {
    return amplitude / std::pow(x + offset, exponent);
}

double PowerLawCurve::slope(double x) const {
    return -exponent * amplitude / std::pow(x + offset, exponent + 1.0);
}

double PowerLawCurve::work(double a, double b) const {
    if (a == b) return 0.0;
    if (exponent == 1.0) return amplitude * std::log((b + offset) / (a + offset));
    if (exponent == 2.0) return amplitude * (1.0 / (a + offset) - 1.0 / (b + offset));
    double const q = 1.0 - exponent;
    return amplitude / (exponent - 1.0) *
           (std::pow(a + offset, q) - std::pow(b + offset, q));
}

// ---------------------------------------------------------------------------
// SampledCurve

namespace {

// Fritsch-Butland interior slopes with shape-preserving three-point end slopes.
std::vector<double> pchip_slopes(std::span<const Sample> s) {
    auto const n = s.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = s[k + 1].x - s[k].x;
        delta[k] = (s[k + 1].force - s[k].force) / h[k];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (delta[k - 1] == delta[k]) {
            d[k] = delta[k];
        } else if (delta[k - 1] * delta[k] > 0.0) {
            double const w1 = 2.0 * h[k] + h[k - 1];
            double const w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    auto end_slope = [](double h0, double h1, double m0, double m1) {
        if (m0 == m1) return m0;
        double d0 = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if (std::signbit(d0) != std::signbit(m0) || d0 == 0.0) {
            d0 = 0.0;
        } else if (std::signbit(m0) != std::signbit(m1) && std::abs(d0) > 3.0 * std::abs(m0)) {
            d0 = 3.0 * m0;
        }
        return d0;
    };
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

}  // namespace

SampledCurve::SampledCurve(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 3) {
        throw DomainError(fmt::format("sampled curve needs at least 3 points, got {}",
                                      samples_.size()));
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        auto const& s = samples_[i];
        if (!std::isfinite(s.x) || !std::isfinite(s.force)) {
            throw DomainError("sampled curve contains a non-finite value");
        }
        if (s.force < 0.0) {
            throw DomainError(fmt::format("sampled force must be >= 0, got {} at x = {}",
                                          s.force, s.x));
        }
        if (i == 0 && s.x < 0.0) {
            throw DomainError(fmt::format("sampled curve starts at negative x = {}", s.x));
        }
        if (i > 0 && !(s.x > samples_[i - 1].x)) {
            throw DomainError(fmt::format("sample x must be strictly increasing (x = {})", s.x));
        }
    }
    knot_slopes_ = pchip_slopes(samples_);
}

std::size_t SampledCurve::segment(double x) const {
    auto const it = std::upper_bound(samples_.begin(), samples_.end(), x,
                                     [](double v, const Sample& s) { return v < s.x; });
    auto idx = static_cast<std::size_t>(std::distance(samples_.begin(), it));
    idx = idx == 0 ? 0 : idx - 1;
    return std::min(idx, samples_.size() - 2);
}

double SampledCurve::force(double x) const {
    auto const k = segment(x);
    auto const& p0 = samples_[k];
    auto const& p1 = samples_[k + 1];
    if (x == p0.x) return p0.force;
    if (x == p1.x) return p1.force;
    double const h = p1.x - p0.x;
    double const t = (x - p0.x) / h;
    double const t2 = t * t;
    double const t3 = t2 * t;
    // h00 = 1 - h01; written this way flat segments reproduce the knot value exactly
    double const h10 = t3 - 2.0 * t2 + t;
    double const h01 = -2.0 * t3 + 3.0 * t2;
    double const h11 = t3 - t2;
    return p0.force + h01 * (p1.force - p0.force) +
           h * (h10 * knot_slopes_[k] + h11 * knot_slopes_[k + 1]);
}

double SampledCurve::slope(double x) const {
    auto const k = segment(x);
    if (x == samples_[k].x) return knot_slopes_[k];
    if (x == samples_[k + 1].x) return knot_slopes_[k + 1];
    auto const& p0 = samples_[k];
    auto const& p1 = samples_[k + 1];
    double const h = p1.x - p0.x;
    double const t = (x - p0.x) / h;
    double const t2 = t * t;
    double const dh00 = 6.0 * t2 - 6.0 * t;
    double const dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    double const dh01 = -6.0 * t2 + 6.0 * t;
    double const dh11 = 3.0 * t2 - 2.0 * t;
    return (dh00 * p0.force + dh01 * p1.force) / h + dh10 * knot_slopes_[k] +
           dh11 * knot_slopes_[k + 1];
}

// ---------------------------------------------------------------------------
// ForceCurve

double ForceCurve::domain_max() const {
    if (auto const* s = sampled()) return s->x_max();
    return std::numeric_limits<double>::infinity();
}

void ForceCurve::check_domain(double x) const {
    if (std::isnan(x) || x < 0.0) {
        throw DomainError(fmt::format("displacement must be >= 0, got {}", x));
    }
    if (auto const* s = sampled(); s && (x < s->x_min() || x > s->x_max())) {
        throw DomainError(fmt::format("x = {} outside sampled range [{}, {}]", x, s->x_min(),
                                      s->x_max()));
    }
}

ForceCurve ForceCurve::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError(fmt::format("scale factor must be > 0, got {}", factor));
    if (auto const* p = power_law()) {
        return PowerLawCurve{p->amplitude * factor, p->offset, p->exponent};
    }
    std::vector<Sample> pts(sampled()->samples().begin(), sampled()->samples().end());
    for (auto& s : pts) s.force *= factor;
    return SampledCurve(std::move(pts));
}

double eval_force(const ForceCurve& curve, double x) {
    curve.check_domain(x);
    if (auto const* p = curve.power_law()) return p->force(x);
    return curve.sampled()->force(x);
}

double eval_slope(const ForceCurve& curve, double x) {
    curve.check_domain(x);
    if (auto const* p = curve.power_law()) return p->slope(x);
    return curve.sampled()->slope(x);
}

double work_integral(const ForceCurve& curve, double a, double b) {
    if (!(a <= b)) throw DomainError(fmt::format("work integral needs a <= b, got [{}, {}]", a, b));
    curve.check_domain(a);
    curve.check_domain(b);
    if (a == b) return 0.0;
    if (auto const* p = curve.power_law()) return p->work(a, b);

    // Integrate knot interval by knot interval so every panel sees a single cubic.
    auto const& s = *curve.sampled();
    auto const f = [&s](double x) { return s.force(x); };
    double total = 0.0;
    double lo = a;
    for (auto const& knot : s.samples()) {
        if (knot.x <= lo) continue;
        double const hi = std::min(knot.x, b);
        total += adaptive_simpson(f, lo, hi, 1e-9);
        lo = hi;
        if (lo >= b) break;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

double two_point_offset(const Sample& near, const Sample& far, double p) {
    double const r = std::pow(near.force / far.force, 1.0 / p);
    return (far.x - r * near.x) / (r - 1.0);
}

// Best amplitude for fixed (c, p) is linear least squares in A.
double projected_amplitude(std::span<const Sample> s, double c, double p) {
    double num = 0.0;
    double den = 0.0;
    for (auto const& pt : s) {
        double const g = std::pow(pt.x + c, -p);
        num += pt.force * g;
        den += g * g;
    }
    return num / den;
}

double sse(std::span<const Sample> s, double a, double c, double p) {
    double acc = 0.0;
    for (auto const& pt : s) {
        double const r = pt.force - a * std::pow(pt.x + c, -p);
        acc += r * r;
    }
    return acc;
}

struct Start {
    double c;
    double p;
    double cost;
};

// Coarse search over c (and p when free) with A projected out.
Start initial_guess(std::span<const Sample> s, std::optional<double> fixed_p) {
    auto const [lo_it, hi_it] = std::minmax_element(
        s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });
    double const span = std::max(hi_it->x - lo_it->x, 1e-6);

    std::vector<double> ps;
    if (fixed_p) {
        ps.push_back(*fixed_p);
    } else {
        for (double p = 1.0; p <= 6.0 + 1e-12; p += 0.25) ps.push_back(p);
    }

    Start best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    auto consider = [&](double c, double p) {
        if (!(c > 0.0) || !std::isfinite(c)) return;
        double const a = projected_amplitude(s, c, p);
        if (!(a > 0.0)) return;
        double const cost = sse(s, a, c, p);
        if (cost < best.cost) best = {c, p, cost};
    };
    for (double const p : ps) {
        if (lo_it->force > hi_it->force) consider(two_point_offset(*lo_it, *hi_it, p), p);
        for (int i = -60; i <= 40; ++i) consider(span * std::pow(10.0, i / 20.0), p);
    }
    if (!std::isfinite(best.cost)) throw FitError("no admissible starting point for power-law fit");
    return best;
}

}  // namespace

PowerLawCurve fit_power_law(std::span<const Sample> samples, std::optional<double> fixed_exponent) {
    if (samples.size() < 2) throw FitError("power-law fit needs at least 2 samples");
    for (auto const& s : samples) {
        if (!(s.force > 0.0) || !std::isfinite(s.force) || !std::isfinite(s.x) || s.x < 0.0) {
            throw FitError(fmt::format("fit samples need x >= 0 and F > 0, got ({}, {})", s.x,
                                       s.force));
        }
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            if (samples[i].x == samples[j].x) throw FitError("fit samples need distinct x");
        }
    }
    if (fixed_exponent && !(*fixed_exponent >= 1.0)) {
        throw FitError(fmt::format("fixed exponent must be >= 1, got {}", *fixed_exponent));
    }
    if (samples.size() == 2 && !fixed_exponent) fixed_exponent = 2.0;

    if (samples.size() == 2) {
        auto near = samples[0];
        auto far = samples[1];
        if (near.x > far.x) std::swap(near, far);
        if (!(near.force > far.force)) {
            throw FitError("two-point fit needs force decreasing with distance");
        }
        double const p = *fixed_exponent;
        double const c = two_point_offset(near, far, p);
        if (!(c > 0.0)) throw FitError(fmt::format("two-point fit gives offset c = {} <= 0", c));
        return PowerLawCurve{near.force * std::pow(near.x + c, p), c, p};
    }

    // Levenberg-Marquardt on (log A, log c[, p]).
    auto const start = initial_guess(samples, fixed_exponent);
    bool const free_p = !fixed_exponent;
    int const dim = free_p ? 3 : 2;
    Eigen::VectorXd theta(dim);
    theta(0) = std::log(projected_amplitude(samples, start.c, start.p));
    theta(1) = std::log(start.c);
    if (free_p) theta(2) = start.p;

    auto unpack = [&](const Eigen::VectorXd& t) {
        return PowerLawCurve{std::exp(t(0)), std::exp(t(1)), free_p ? t(2) : *fixed_exponent};
    };
    auto cost_of = [&](const Eigen::VectorXd& t) {
        auto const c = unpack(t);
        return sse(samples, c.amplitude, c.offset, c.exponent);
    };

    auto const m = static_cast<Eigen::Index>(samples.size());
    double lambda = 1e-3;
    double cost = cost_of(theta);
    bool converged = false;
    for (int iter = 0; iter < 500 && !converged; ++iter) {
        auto const cur = unpack(theta);
        Eigen::MatrixXd jac(m, dim);
        Eigen::VectorXd res(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            double const x = samples[static_cast<std::size_t>(i)].x;
            double const model = cur.force(x);
            res(i) = samples[static_cast<std::size_t>(i)].force - model;
            // Jacobian of the model; residual Jacobian is its negative.
            jac(i, 0) = model;
            jac(i, 1) = -cur.exponent * model * cur.offset / (x + cur.offset);
            if (free_p) jac(i, 2) = -model * std::log(x + cur.offset);
        }
        Eigen::MatrixXd const jtj = jac.transpose() * jac;
        Eigen::VectorXd const jtr = jac.transpose() * res;
        if (jtr.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, res.squaredNorm())) {
            converged = true;
            break;
        }
        bool stepped = false;
        for (int tries = 0; tries < 60; ++tries) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            Eigen::VectorXd const step = damped.ldlt().solve(jtr);
            Eigen::VectorXd cand = theta + step;
            if (free_p && cand(2) < 1.0) cand(2) = 1.0;
            double const cand_cost = cost_of(cand);
            if (std::isfinite(cand_cost) && cand_cost <= cost) {
                double const rel_step = (cand - theta).lpNorm<Eigen::Infinity>();
                double const gain = cost - cand_cost;
                theta = cand;
                cost = cand_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (rel_step < 1e-14 || gain <= 1e-30 + 1e-16 * cost) converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!stepped) converged = true;  // no descent direction left: stationary point
    }
    if (!converged) throw FitError("power-law fit did not converge in 500 iterations");

    auto const fitted = unpack(theta);
    if (!(fitted.offset > 0.0) || !std::isfinite(fitted.offset) ||
        !std::isfinite(fitted.amplitude)) {
        throw FitError(fmt::format("power-law fit produced offset c = {}", fitted.offset));
    }
    return fitted;
}

std::vector<double> fit_residuals(const PowerLawCurve& curve, std::span<const Sample> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (auto const& s : samples) out.push_back(s.force - curve.force(s.x));
    return out;
}

bool is_convex_decreasing(const ForceCurve& curve, double a, double b, std::size_t grid,
                          double tol) {
    if (!(a < b) || grid < 3) return false;
    std::vector<double> f(grid + 1);
    double const h = (b - a) / static_cast<double>(grid);
    for (std::size_t i = 0; i <= grid; ++i) {
        double const x = i == grid ? b : a + h * static_cast<double>(i);
        f[i] = eval_force(curve, x);
        if (!(eval_slope(curve, x) < 0.0)) return false;
    }
    for (std::size_t i = 1; i < grid; ++i) {
        if (f[i - 1] - 2.0 * f[i] + f[i + 1] < -tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// File formats

std::vector<Sample> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("sample CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // tolerate a UTF-8 byte order mark
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line != "x_mm,force_N") {
        throw ParseError("sample CSV header must be 'x_mm,force_N', got '" + line + "'");
    }
    std::vector<Sample> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto const comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(fmt::format("sample CSV line {}: expected two columns", lineno));
        }
        auto const ctx = fmt::format("sample CSV line {}", lineno);
        out.push_back({parse_double(line.substr(0, comma), ctx),
                       parse_double(line.substr(comma + 1), ctx)});
    }
    return out;
}

std::vector<Sample> read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return read_samples_csv(in);
}

void write_samples_csv(std::ostream& out, std::span<const Sample> samples) {
    out << "x_mm,force_N\n";
    for (auto const& s : samples) fmt::print(out, "{},{}\n", s.x, s.force);
}

void write_curve_file(std::ostream& out, const PowerLawCurve& curve) {
    fmt::print(out, "# F(x) = amplitude / (x + offset)^exponent  [N, mm]\n");
    fmt::print(out, "model = power_law\n");
    fmt::print(out, "amplitude = {}\n", curve.amplitude);
    fmt::print(out, "offset = {}\n", curve.offset);
    fmt::print(out, "exponent = {}\n", curve.exponent);
}

PowerLawCurve read_curve_file(const std::filesystem::path& path) {
    auto const kv = KeyValueFile::load(path);
    if (kv.get_string("model") != "power_law") {
        throw ParseError(path.string() + ": unsupported model '" + kv.get_string("model") + "'");
    }
    return PowerLawCurve::make(kv.get_double("amplitude"), kv.get_double("offset"),
                               kv.get_double_or("exponent", 2.0));
}

ForceCurve load_curve(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return SampledCurve(read_samples_csv(path));
    return read_curve_file(path);
}

}  // namespace ibmag

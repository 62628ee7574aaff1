#include "ibmag/quadrature.hpp"

#include <algorithm>

namespace ibmag {

namespace {

struct Panel {
    double a, fa, m, fm, b, fb, whole;
};

double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth) {
    double const lm = 0.5 * (p.a + p.m);
    double const rm = 0.5 * (p.m + p.b);
    double const flm = f(lm);
    double const frm = f(rm);
    double const left = simpson(p.a, p.fa, flm, p.m, p.fm);
    double const right = simpson(p.m, p.fm, frm, p.b, p.fb);
    double const delta = left + right - p.whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return refine(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol, depth - 1) +
           refine(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_floor, int max_depth) {
    if (a == b) return 0.0;
    double const fa = f(a);
    double const fb = f(b);
    double const m = 0.5 * (a + b);
    double const fm = f(m);
    double const whole = simpson(a, fa, fm, b, fb);
    double const tol = std::max(rel_tol * std::abs(whole), abs_floor);
    return refine(f, {a, fa, m, fm, b, fb, whole}, tol, max_depth);
}

}  // namespace ibmag

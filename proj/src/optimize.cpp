#include "ringbus/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ringbus::optimize {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0)
        throw std::invalid_argument("bisect: interval does not bracket a root");
    while (hi - lo > xtol) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> scan_roots(const std::function<double(double)>& f,
                               double lo, double hi, int n, double xtol) {
    std::vector<double> roots;
    if (n < 2 || !(hi > lo)) return roots;
    double prev_x = lo;
    double prev_f = f(lo);
    for (int i = 1; i < n; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        double fx = f(x);
        if (std::isfinite(prev_f) && std::isfinite(fx)) {
            if (prev_f == 0.0) {
                roots.push_back(prev_x);
            } else if (prev_f * fx < 0.0) {
                roots.push_back(bisect(f, prev_x, x, xtol));
            }
        }
        prev_x = x;
        prev_f = fx;
    }
    if (prev_f == 0.0) roots.push_back(prev_x);
    return roots;
}

double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double xtol, int max_iter) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw std::invalid_argument("brent_root: interval does not bracket a root");
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    return b;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

namespace {

NelderMeadResult nm_single(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, double step,
                           int max_iter, double ftol, double fstop) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) {
        double h = step * std::max(std::abs(x0[i]), 1.0);
        pts[i + 1][i] += h;
    }
    for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    NelderMeadResult out;
    int it = 0;
    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        std::vector<Eigen::VectorXd> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (int i = 0; i <= n; ++i) { p2[i] = pts[idx[i]]; v2[i] = vals[idx[i]]; }
        pts.swap(p2); vals.swap(v2);
    };
    for (; it < max_iter; ++it) {
        order();
        double spread = std::abs(vals[n] - vals[0]);
        double scale = std::abs(vals[0]) + std::abs(vals[n]) + 1e-300;
        if (spread / scale < ftol) break;
        if (fstop >= 0.0 && vals[0] <= fstop) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += pts[i];
        centroid /= n;

        Eigen::VectorXd xr = centroid + (centroid - pts[n]);
        double fr = f(xr);
        if (fr < vals[0]) {
            Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[n]);
            double fe = f(xe);
            if (fe < fr) { pts[n] = xe; vals[n] = fe; }
            else { pts[n] = xr; vals[n] = fr; }
        } else if (fr < vals[n - 1]) {
            pts[n] = xr; vals[n] = fr;
        } else {
            Eigen::VectorXd xc = centroid + 0.5 * (pts[n] - centroid);
            double fc = f(xc);
            if (fc < vals[n]) { pts[n] = xc; vals[n] = fc; }
            else {
                for (int i = 1; i <= n; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    order();
    out.x = pts[0];
    out.fmin = vals[0];
    out.iterations = it;
    out.converged = it < max_iter;
    double span = 0.0;
    for (int i = 1; i <= n; ++i) span = std::max(span, (pts[i] - pts[0]).norm());
    out.final_step = span;
    return out;
}

} // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& opts) {
    NelderMeadResult best = nm_single(f, x0, opts.initial_step,
                                      opts.max_iterations, opts.ftol, opts.fstop);
    int total_iter = best.iterations;
    int restart = 0;
    double step = opts.initial_step;
    while (restart < opts.max_restarts && total_iter < opts.max_iterations) {
        if (opts.fstop >= 0.0 && best.fmin <= opts.fstop) break;
        step *= 0.25;
        NelderMeadResult r = nm_single(f, best.x, step,
                                       opts.max_iterations - total_iter,
                                       opts.ftol, opts.fstop);
        total_iter += r.iterations;
        ++restart;
        bool improved = r.fmin < best.fmin * (1.0 - 1e-12) || r.fmin < best.fmin - 1e-300;
        if (r.fmin <= best.fmin) best = r;
        if (!improved) break;
    }
    best.iterations = total_iter;
    best.restarts = restart;
    return best;
}

LevenbergMarquardtResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const Eigen::VectorXd& x0, int max_iter, double xtol) {
    Eigen::VectorXd x = x0;
    const int n = static_cast<int>(x.size());
    double lambda = 1e-3;
    Eigen::VectorXd res = residual(x);
    double cost = res.squaredNorm();
    LevenbergMarquardtResult out;
    int it = 0;
    for (; it < max_iter; ++it) {
        const int m = static_cast<int>(res.size());
        Eigen::MatrixXd J(m, n);
        for (int k = 0; k < n; ++k) {
            double h = 1e-7 * std::max(std::abs(x[k]), 1.0);
            Eigen::VectorXd xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            J.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
        }
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * res;
        bool stepped = false;
        Eigen::VectorXd step;
        for (int trial = 0; trial < 40; ++trial) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += lambda * (JtJ.trace() / n + 1e-300);
            step = A.ldlt().solve(-g);
            Eigen::VectorXd xn = x + step;
            Eigen::VectorXd rn = residual(xn);
            double cn = rn.squaredNorm();
            if (cn < cost) {
                x = xn;
                res = rn;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-14);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) break;
        double xs = 0.0;
        for (int k = 0; k < n; ++k)
            xs = std::max(xs, std::abs(step[k]) / std::max(std::abs(x[k]), 1.0));
        if (xs < xtol) { ++it; break; }
    }
    out.x = x;
    out.rms = std::sqrt(cost / std::max<int>(1, static_cast<int>(res.size())));
    out.iterations = it;
    out.converged = it < max_iter;
    return out;
}

} // namespace ringbus::optimize

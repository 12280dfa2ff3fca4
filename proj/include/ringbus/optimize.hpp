#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace ringbus::optimize {

// Bisection refinement of a sign change; [lo, hi] must bracket a root.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol);

// Scan [lo, hi] on n points, bisect every sign change found.
std::vector<double> scan_roots(const std::function<double(double)>& f,
                               double lo, double hi, int n, double xtol);

// Scalar root of a monotone-ish function given a bracketing interval.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double xtol, int max_iter = 200);

// Golden-section minimization of a unimodal function.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double xtol);

struct NelderMeadResult {
    Eigen::VectorXd x;
    double fmin = 0.0;
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
    double final_step = 0.0;
};

struct NelderMeadOptions {
    int max_iterations = 2000;
    double ftol = 1e-12;       // relative spread of simplex values
    double fstop = -1.0;       // absolute objective target (<0: disabled)
    int max_restarts = 6;
    double initial_step = 0.1; // relative simplex size
};

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& opts = {});

struct LevenbergMarquardtResult {
    Eigen::VectorXd x;
    double rms = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped least squares on a residual vector function with numeric Jacobian.
LevenbergMarquardtResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const Eigen::VectorXd& x0, int max_iter = 300, double xtol = 1e-10);

} // namespace ringbus::optimize

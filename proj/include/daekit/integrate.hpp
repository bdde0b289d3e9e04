#ifndef DAEKIT_INTEGRATE_HPP
#define DAEKIT_INTEGRATE_HPP

#include "daekit/reduce.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace daekit {

enum class TrajectoryStatus {
    CompletedHorizon,
    EscapeDetected,
    ConstraintViolation,
    SolverFailure,
};

std::string to_string(TrajectoryStatus s);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> r_p2;
    std::vector<double> r_ov;
    TrajectoryStatus status = TrajectoryStatus::CompletedHorizon;
    double status_time = 0.0;           // time of the terminating event
    double escape_lo = 0.0, escape_hi = 0.0; // bracket for the escape time
    std::string message;
};

// Free choice of the underdetermined component: a continuous map t → X_s2.
struct FreeComponent {
    std::function<Vector(double)> phi_s2;
    std::string description;
};

struct StepOptions {
    double atol = 1e-10;
    double rtol = 1e-10;
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 0.0;      // 0 => unbounded
    double fixed_dt = 0.0;    // > 0 => fixed-step mode (no error control)
    double constraint_tol = 1e-8;
    double escape_norm = 1e8;
    long max_steps = 50'000'000;
    NewtonOptions newton;
};

// Half-explicit embedded Runge-Kutta 4(5): the differential components
// (x_s1, x_p1) advance explicitly; at every stage x_s2 is read from phi and
// x_p2 is re-solved by Newton, warm-started from the previous value.
Trajectory integrate(const ReducedSystem& rs, double t0, const Vector& x0,
                     const FreeComponent& phi, double t_end, const StepOptions& opts);

struct SolutionResidualReport {
    double max_residual = 0.0;
    int samples = 0;
    bool passed = false;
    double tol = 0.0;
};

// Central-difference verification of d/dt[Ax] + Bx - f(t,x) along a stored
// trajectory (interior samples only).
SolutionResidualReport verify_solution_residual(const SemilinearDAE& dae, const Trajectory& traj,
                                                double tol);

// CSV: header t,x1..xn,r_p2,r_ov; one row per sample; status footer line.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv_file(const std::string& path, const Trajectory& traj);

} // namespace daekit

#endif

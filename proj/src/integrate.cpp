#include "daekit/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace daekit {

std::string to_string(TrajectoryStatus s) {
    switch (s) {
        case TrajectoryStatus::CompletedHorizon: return "CompletedHorizon";
        case TrajectoryStatus::EscapeDetected: return "EscapeDetected";
        case TrajectoryStatus::ConstraintViolation: return "ConstraintViolation";
        case TrajectoryStatus::SolverFailure: return "SolverFailure";
    }
    return "Unknown";
}

namespace {

// Fehlberg 4(5) tableau; the fourth-order solution is propagated, the
// fifth-order one drives the error estimate.
constexpr int kStages = 6;
const double kC[kStages] = {0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5};
const double kA[kStages][kStages - 1] = {
    {},
    {0.25},
    {3.0 / 32.0, 9.0 / 32.0},
    {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0},
    {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0},
    {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0},
};
const double kB4[kStages] = {25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0};
const double kB5[kStages] = {16.0 / 135.0,       0.0, 6656.0 / 12825.0, 28561.0 / 56430.0,
                             -9.0 / 50.0, 2.0 / 55.0};

struct OdeState {
    Vector w; // R^b
    Vector z; // R^a
    double norm() const { return std::sqrt(w.squaredNorm() + z.squaredNorm()); }
};

} // namespace

Trajectory integrate(const ReducedSystem& rs, double t0, const Vector& x0,
                     const FreeComponent& phi, double t_end, const StepOptions& opts) {
    const auto& dec = rs.dec();
    if (!(t_end > t0)) throw Error("integration horizon must exceed the start time");
    if (!phi.phi_s2 && dec.l > 0) throw Error("free component phi_s2 required when dim X_s2 > 0");

    auto phi_at = [&](double t) -> Vector {
        if (dec.l == 0) return Vector::Zero(dec.n);
        return phi.phi_s2(t);
    };

    // Start-point checks.
    {
        ConsistencyPoint cp = consistency_residual(rs, t0, x0);
        if (std::max(cp.r_p2, cp.r_ov) > std::max(opts.newton.tol, opts.constraint_tol))
            throw InconsistentStart("initial point violates the algebraic constraints");
        if (dec.l > 0) {
            const Vector diff = phi_at(t0) - dec.S2 * x0;
            if (diff.norm() > 1e-8 * (1.0 + x0.norm()))
                throw InconsistentStart("phi_s2(t0) does not match S2 x0");
        }
    }

    Trajectory traj;
    auto record = [&](double t, const Vector& x, double rp2, double rov) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        traj.r_p2.push_back(rp2);
        traj.r_ov.push_back(rov);
    };

    OdeState y{rs.w_coords(x0), rs.z_coords(x0)};
    Vector u_warm = dec.P2 * x0;

    // Evaluates the reduced right-hand side at (t, w, z); solves the algebraic
    // component from the warm start and updates it on success.
    auto eval_rhs = [&](double t, const OdeState& s, Vector& u_io, OdeState& deriv,
                        Vector* x_out) -> bool {
        Vector xi = phi_at(t);
        Vector x_s1 = Vector::Zero(dec.n);
        if (dec.b > 0) x_s1 = dec.Sb * s.w;
        Vector x_p1 = Vector::Zero(dec.n);
        if (dec.a > 0) x_p1 = dec.Pa * s.z;
        Vector x_p2;
        try {
            x_p2 = solve_consistent_p2(rs, t, x_s1, xi, x_p1, u_io, opts.newton);
        } catch (const Error&) {
            return false;
        }
        Vector x = x_s1 + xi + x_p1 + x_p2;
        if (!x.allFinite()) return false;
        deriv.w = rs.w_rhs_coords(t, x);
        deriv.z = rs.z_rhs_coords(t, x);
        if (!deriv.w.allFinite() || !deriv.z.allFinite()) return false;
        u_io = x_p2;
        if (x_out) *x_out = std::move(x);
        return true;
    };

    // Record the initial sample.
    {
        ConsistencyPoint cp = consistency_residual(rs, t0, x0);
        record(t0, x0, cp.r_p2, cp.r_ov);
    }

    const bool fixed = opts.fixed_dt > 0.0;
    double dt = fixed ? opts.fixed_dt : opts.dt_init;
    if (opts.dt_max > 0.0) dt = std::min(dt, opts.dt_max);
    double t = t0;
    double err_prev = 1.0;

    // Recent accepted (t, norm) pairs for escape-time extrapolation.
    double grow_t[2] = {t0, t0};
    double grow_n[2] = {y.norm(), y.norm()};

    auto finish_escape = [&](double t_now, double norm_now) {
        traj.status = TrajectoryStatus::EscapeDetected;
        traj.status_time = t_now;
        // Fit t = tau - C / ||w|| through the last two blow-up samples.
        double tau_hat = t_now;
        if (grow_n[1] > grow_n[0] && grow_n[0] > 0.0) {
            const double c =
                (grow_t[1] - grow_t[0]) / (1.0 / grow_n[0] - 1.0 / grow_n[1]);
            tau_hat = grow_t[1] + c / grow_n[1];
        }
        tau_hat = std::max(tau_hat, t_now);
        const double margin = std::max({3.0 * (tau_hat - t_now), 100.0 * dt, 1e-9});
        traj.escape_lo = t_now;
        traj.escape_hi = tau_hat + margin;
        traj.message = "norm " + std::to_string(norm_now) + " at step-size collapse";
    };

    OdeState k[kStages];
    for (int i = 0; i < kStages; ++i) {
        k[i].w = Vector::Zero(dec.b);
        k[i].z = Vector::Zero(dec.a);
    }

    long steps = 0;
    while (t < t_end) {
        if (++steps > opts.max_steps) {
            traj.status = TrajectoryStatus::SolverFailure;
            traj.status_time = t;
            traj.message = "step budget exhausted";
            return traj;
        }
        dt = fixed ? std::min(opts.fixed_dt, t_end - t) : std::min(dt, t_end - t);

        bool stage_ok = true;
        Vector u_stage = u_warm;
        OdeState work;
        for (int i = 0; i < kStages && stage_ok; ++i) {
            OdeState si;
            si.w = y.w;
            si.z = y.z;
            for (int j = 0; j < i; ++j) {
                if (kA[i][j] == 0.0) continue;
                si.w += dt * kA[i][j] * k[j].w;
                si.z += dt * kA[i][j] * k[j].z;
            }
            stage_ok = eval_rhs(t + kC[i] * dt, si, u_stage, work, nullptr);
            if (stage_ok) k[i] = work;
        }

        OdeState y4, y5;
        bool step_ok = stage_ok;
        double err = 0.0;
        if (step_ok) {
            y4.w = y.w;
            y4.z = y.z;
            y5.w = y.w;
            y5.z = y.z;
            for (int i = 0; i < kStages; ++i) {
                y4.w += dt * kB4[i] * k[i].w;
                y4.z += dt * kB4[i] * k[i].z;
                y5.w += dt * kB5[i] * k[i].w;
                y5.z += dt * kB5[i] * k[i].z;
            }
            if (!y4.w.allFinite() || !y4.z.allFinite()) step_ok = false;
            if (step_ok && !fixed) {
                double acc = 0.0;
                long count = 0;
                auto accumulate = [&](const Vector& a, const Vector& b) {
                    for (Eigen::Index i = 0; i < a.size(); ++i) {
                        const double sc =
                            opts.atol + opts.rtol * std::max(std::abs(a(i)), std::abs(b(i)));
                        const double e = (b(i) - a(i)) / sc;
                        acc += e * e;
                        ++count;
                    }
                };
                accumulate(y4.w, y5.w);
                accumulate(y4.z, y5.z);
                err = count > 0 ? std::sqrt(acc / double(count)) : 0.0;
                if (!std::isfinite(err)) step_ok = false;
            }
        }

        const bool accept = step_ok && (fixed || err <= 1.0);
        if (accept) {
            const double t_new = t + dt;
            // Final algebraic solve at the accepted endpoint.
            Vector x_new;
            OdeState dummy;
            Vector u_end = u_stage;
            if (!eval_rhs(t_new, y4, u_end, dummy, &x_new)) {
                traj.status = TrajectoryStatus::SolverFailure;
                traj.status_time = t_new;
                traj.message = "algebraic solve failed at accepted step";
                return traj;
            }
            u_warm = u_end;
            t = t_new;
            y = y4;

            ConsistencyPoint cp = consistency_residual(rs, t, x_new);
            record(t, x_new, cp.r_p2, cp.r_ov);
            if (cp.r_ov > opts.constraint_tol) {
                traj.status = TrajectoryStatus::ConstraintViolation;
                traj.status_time = t;
                traj.message = "overdetermined residual " + std::to_string(cp.r_ov);
                return traj;
            }

            const double nrm = y.norm();
            if (nrm > grow_n[1]) {
                grow_t[0] = grow_t[1];
                grow_n[0] = grow_n[1];
                grow_t[1] = t;
                grow_n[1] = nrm;
            }

            if (!fixed) {
                const double safety = 0.9;
                const double expo = 0.2, expo_prev = 0.08;
                double fac = safety * std::pow(std::max(err, 1e-16), -expo) *
                             std::pow(std::max(err_prev, 1e-16), expo_prev);
                fac = std::clamp(fac, 0.2, 5.0);
                dt *= fac;
                if (opts.dt_max > 0.0) dt = std::min(dt, opts.dt_max);
                err_prev = std::max(err, 1e-16);
            }
        } else {
            if (fixed) {
                traj.status = TrajectoryStatus::SolverFailure;
                traj.status_time = t;
                traj.message = "stage failure in fixed-step mode";
                return traj;
            }
            dt *= step_ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5) : 0.5;
        }

        if (!fixed && dt < opts.dt_min) {
            const double nrm = y.norm();
            if (nrm >= opts.escape_norm) {
                finish_escape(t, nrm);
            } else {
                traj.status = TrajectoryStatus::SolverFailure;
                traj.status_time = t;
                traj.message = "step size collapsed below dt_min";
            }
            return traj;
        }
    }

    traj.status = TrajectoryStatus::CompletedHorizon;
    traj.status_time = t;
    return traj;
}

SolutionResidualReport verify_solution_residual(const SemilinearDAE& dae, const Trajectory& traj,
                                                double tol) {
    SolutionResidualReport rep;
    rep.tol = tol;
    const auto& A = dae.pencil.A();
    const auto& B = dae.pencil.B();
    const size_t N = traj.times.size();
    for (size_t i = 1; i + 1 < N; ++i) {
        const double h = traj.times[i + 1] - traj.times[i - 1];
        if (!(h > 0.0)) continue;
        const Vector dAx = (A * (traj.states[i + 1] - traj.states[i - 1])) / h;
        const Vector res = dAx + B * traj.states[i] - dae.f(traj.times[i], traj.states[i]);
        rep.max_residual = std::max(rep.max_residual, res.norm());
        ++rep.samples;
    }
    rep.passed = rep.samples > 0 && rep.max_residual <= tol;
    return rep;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
    out << "t";
    for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
    out << ",r_p2,r_ov\n";
    char buf[64];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (size_t s = 0; s < traj.times.size(); ++s) {
        emit(traj.times[s]);
        for (Eigen::Index i = 0; i < n; ++i) {
            out << ",";
            emit(traj.states[s](i));
        }
        out << ",";
        emit(traj.r_p2[s]);
        out << ",";
        emit(traj.r_ov[s]);
        out << "\n";
    }
    out << "# status=" << to_string(traj.status);
    if (traj.status == TrajectoryStatus::EscapeDetected) {
        out << " bracket=[";
        emit(traj.escape_lo);
        out << ",";
        emit(traj.escape_hi);
        out << "]";
    }
    out << "\n";
}

void write_trajectory_csv_file(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open trajectory file for writing: " + path);
    write_trajectory_csv(out, traj);
}

} // namespace daekit

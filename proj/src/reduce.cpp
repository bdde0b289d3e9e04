#include "daekit/reduce.hpp"

#include "daekit/linalg.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace daekit {

Matrix SemilinearDAE::jacobian(double t, const Vector& x) const {
    if (df_dx) return df_dx(t, x);
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    const Vector f0 = f(t, x);
    Matrix J(f0.size(), x.size());
    Vector xh = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = sqrt_eps * (1.0 + std::abs(x(i)));
        xh(i) = x(i) + h;
        J.col(i) = (f(t, xh) - f0) / h;
        xh(i) = x(i);
    }
    return J;
}

ReducedSystem::ReducedSystem(SemilinearDAE dae, PencilDecomposition dec)
    : dae_(std::move(dae)), dec_(std::move(dec)) {
    if (dae_.pencil.rows() != dec_.m || dae_.pencil.cols() != dec_.n)
        throw ShapeMismatch("decomposition shape does not match the pencil");

    const Matrix T = linalg::hcat({&dec_.Sb, &dec_.Sl, &dec_.Pa, &dec_.Pd}, dec_.n);
    const Matrix Z = linalg::hcat({&dec_.Yb1, &dec_.Yb2, &dec_.Ya, &dec_.Yd}, dec_.m);
    Tinv_ = T.fullPivLu().inverse();
    Zinv_ = Z.fullPivLu().inverse();

    const Matrix& A = dae_.pencil.A();
    const Matrix& B = dae_.pencil.B();
    const int b = dec_.b, l = dec_.l, a = dec_.a, d = dec_.d;
    const Matrix Zs1 = Zinv_.topRows(dec_.ys1);
    const Matrix Zs2 = Zinv_.middleRows(dec_.ys1, dec_.ys2);
    const Matrix Z1 = Zinv_.middleRows(dec_.ys1 + dec_.ys2, a);
    const Matrix Z2 = Zinv_.middleRows(dec_.ys1 + dec_.ys2 + a, d);

    Agc_lu_src_ = Zs1 * A * dec_.Sb;
    A1c_lu_src_ = Z1 * A * dec_.Pa;
    B2c_ = Z2 * B * dec_.Pd;
    if (b > 0) Agc_lu_.compute(Agc_lu_src_);
    if (a > 0) A1c_lu_.compute(A1c_lu_src_);
    if (d > 0) B2c_lu_.compute(B2c_);

    Bgc_ = Zs1 * B * dec_.Sb;
    Buc_ = Zs1 * B * dec_.Sl;
    B1c_ = Z1 * B * dec_.Pa;
    Bovc_ = Zs2 * B * dec_.Sb;
    (void)l;
}

ReducedSystem build_reduced_system(SemilinearDAE dae, PencilDecomposition dec) {
    return ReducedSystem(std::move(dae), std::move(dec));
}

Vector ReducedSystem::rhs_s1(double t, const Vector& x) const {
    if (dec_.b == 0) return Vector::Zero(dec_.n);
    const Vector fv = dae_.f(t, x);
    return dec_.AgenInv * (dec_.F1 * fv - (dec_.Bgen + dec_.Bund) * x);
}

Vector ReducedSystem::rhs_p1(double t, const Vector& x) const {
    if (dec_.a == 0) return Vector::Zero(dec_.n);
    const Vector fv = dae_.f(t, x);
    return dec_.A1Inv * (dec_.Q1 * fv - dec_.B1op * x);
}

Vector ReducedSystem::alg_p2(double t, const Vector& x) const {
    if (dec_.d == 0) return Vector::Zero(dec_.n);
    const Vector fv = dae_.f(t, x);
    return dec_.B2Inv * fv - dec_.P2 * x;
}

Vector ReducedSystem::alg_ov(double t, const Vector& x) const {
    if (dec_.ys2 == 0) return Vector::Zero(dec_.m);
    const Vector fv = dae_.f(t, x);
    return dec_.F2 * fv - dec_.Bov * x;
}

Vector ReducedSystem::w_coords(const Vector& x) const { return Tinv_.topRows(dec_.b) * x; }
Vector ReducedSystem::xi_coords(const Vector& x) const {
    return Tinv_.middleRows(dec_.b, dec_.l) * x;
}
Vector ReducedSystem::z_coords(const Vector& x) const {
    return Tinv_.middleRows(dec_.b + dec_.l, dec_.a) * x;
}
Vector ReducedSystem::u_coords(const Vector& x) const {
    return Tinv_.middleRows(dec_.b + dec_.l + dec_.a, dec_.d) * x;
}

Vector ReducedSystem::assemble(const Vector& w, const Vector& xi, const Vector& z,
                               const Vector& u) const {
    Vector x = Vector::Zero(dec_.n);
    if (dec_.b > 0) x += dec_.Sb * w;
    if (dec_.l > 0) x += dec_.Sl * xi;
    if (dec_.a > 0) x += dec_.Pa * z;
    if (dec_.d > 0) x += dec_.Pd * u;
    return x;
}

Vector ReducedSystem::w_rhs_coords(double t, const Vector& x) const {
    if (dec_.b == 0) return Vector(0);
    const Vector fv = dae_.f(t, x);
    const Vector rhs = Zinv_.topRows(dec_.b) * fv - Bgc_ * w_coords(x) - Buc_ * xi_coords(x);
    return Agc_lu_.solve(rhs);
}

Vector ReducedSystem::z_rhs_coords(double t, const Vector& x) const {
    if (dec_.a == 0) return Vector(0);
    const Vector fv = dae_.f(t, x);
    const Vector rhs = Zinv_.middleRows(dec_.ys1 + dec_.ys2, dec_.a) * fv - B1c_ * z_coords(x);
    return A1c_lu_.solve(rhs);
}

Vector ReducedSystem::psi_coords(double t, const Vector& x) const {
    if (dec_.d == 0) return Vector(0);
    const Vector fv = dae_.f(t, x);
    const Vector rhs = Zinv_.middleRows(dec_.ys1 + dec_.ys2 + dec_.a, dec_.d) * fv;
    return B2c_lu_.solve(rhs) - u_coords(x);
}

Vector ReducedSystem::ov_coords(double t, const Vector& x) const {
    if (dec_.ys2 == 0) return Vector(0);
    const Vector fv = dae_.f(t, x);
    return Zinv_.middleRows(dec_.ys1, dec_.ys2) * fv - Bovc_ * w_coords(x);
}

std::pair<Matrix, double> ReducedSystem::phi_matrix(double t, const Vector& x) const {
    const int d = dec_.d;
    if (d == 0) return {Matrix(0, 0), 0.0};
    const Matrix J = dae_.jacobian(t, x);
    const Matrix Z2 = Zinv_.middleRows(dec_.ys1 + dec_.ys2 + dec_.a, d);
    Matrix phi = Z2 * J * dec_.Pd - B2c_;
    Eigen::JacobiSVD<Matrix> svd(phi);
    const auto& sv = svd.singularValues();
    const double cond =
        sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    return {std::move(phi), cond};
}

ConsistencyPoint consistency_residual(const ReducedSystem& rs, double t, const Vector& x) {
    ConsistencyPoint cp;
    cp.t = t;
    cp.x = x;
    cp.r_p2 = rs.alg_p2(t, x).norm();
    cp.r_ov = rs.alg_ov(t, x).norm();
    return cp;
}

std::pair<Matrix, double> phi_operator(const ReducedSystem& rs, double t, const Vector& x) {
    return rs.phi_matrix(t, x);
}

Vector solve_consistent_p2(const ReducedSystem& rs, double t, const Vector& x_s1,
                           const Vector& x_s2, const Vector& x_p1, const Vector& guess,
                           const NewtonOptions& opts, NewtonDiagnostics* diag) {
    if (opts.max_iter < 1) throw Error("solve_consistent_p2 requires max_iter >= 1");
    const auto& dec = rs.dec();
    const Vector base = x_s1 + x_s2 + x_p1;
    if (dec.d == 0) {
        if (diag) *diag = {0, 0.0, 0.0};
        return Vector::Zero(dec.n);
    }

    Vector u = rs.u_coords(guess);
    auto point = [&](const Vector& uu) -> Vector { return base + dec.Pd * uu; };
    auto residual_vec = [&](const Vector& uu) -> Vector { return rs.alg_p2(t, point(uu)); };

    Vector r = residual_vec(u);
    double rnorm = r.norm();
    int iter = 0;
    double cond = 0.0;
    while (rnorm > opts.tol) {
        if (iter >= opts.max_iter)
            throw NoConvergence("algebraic component solve did not converge", point(u));
        auto [phi, phi_cond] = rs.phi_matrix(t, point(u));
        cond = phi_cond;
        Eigen::JacobiSVD<Matrix> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= 1e-13 * sv(0))
            throw SingularPhi("phi operator is singular at the current iterate", point(u));
        // Newton direction for Psi(u) = B2⁻¹ q(u) - u with Jacobian W = B2⁻¹ Phi:
        // delta = -W⁻¹ Psi = -Phi⁻¹ B2 Psi.
        const Vector psi = rs.psi_coords(t, point(u));
        const Vector delta = -svd.solve(rs.b2_matrix() * psi);

        // Armijo backtracking on ||Psi||², factor 0.5, minimum step 2^-20.
        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= std::ldexp(1.0, -20)) {
            Vector u_try = u + alpha * delta;
            Vector r_try = residual_vec(u_try);
            if (r_try.norm() <= (1.0 - 1e-4 * alpha) * rnorm) {
                u = std::move(u_try);
                r = std::move(r_try);
                rnorm = r.norm();
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        ++iter;
        if (!accepted)
            throw NoConvergence("line search stalled in algebraic component solve", point(u));
    }
    if (diag) *diag = {iter, cond, rnorm};
    return dec.Pd * u;
}

Vector consistent_initialization(const ReducedSystem& rs, double t0, const Vector& x_s1,
                                 const Vector& x_s2, const Vector& x_p1,
                                 const NewtonOptions& opts) {
    const Vector guess = Vector::Zero(rs.dec().n);
    const Vector x_p2 = solve_consistent_p2(rs, t0, x_s1, x_s2, x_p1, guess, opts);
    const Vector x0 = x_s1 + x_s2 + x_p1 + x_p2;
    const double r_ov = rs.alg_ov(t0, x0).norm();
    if (r_ov > opts.tol)
        throw InconsistentOverdetermined(
            "overdetermined constraint cannot be met for the given partial data", x0, r_ov);
    return x0;
}

std::string consistency_csv_row(const ConsistencyPoint& cp) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", cp.t);
    os << buf;
    for (Eigen::Index i = 0; i < cp.x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", cp.x(i));
        os << "," << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", cp.r_p2);
    os << "," << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", cp.r_ov);
    os << "," << buf;
    return os.str();
}

} // namespace daekit

#ifndef DAEKIT_REDUCE_HPP
#define DAEKIT_REDUCE_HPP

#include "daekit/decomp.hpp"
#include "daekit/pencil.hpp"
#include "daekit/types.hpp"

#include <memory>
#include <optional>

namespace daekit {

// d/dt[Ax] + Bx = f(t, x) with t >= t_plus. df_dx may be empty, in which case
// a forward-difference Jacobian with step sqrt(eps)*(1+|x_i|) is used.
struct SemilinearDAE {
    Pencil pencil;
    std::function<Vector(double, const Vector&)> f;
    std::function<Matrix(double, const Vector&)> df_dx;
    double t_plus = 0.0;

    Matrix jacobian(double t, const Vector& x) const;
};

struct ConsistencyPoint {
    double t = 0.0;
    Vector x;
    double r_p2 = 0.0;
    double r_ov = 0.0;
};

struct NewtonOptions {
    int max_iter = 50;
    double tol = 1e-10;
};

struct NewtonDiagnostics {
    int iterations = 0;
    double phi_condition = 0.0;
    double residual = 0.0;
};

// The reduced form of the DAE:
//   d/dt x_s1 = rhs_s1,   d/dt x_p1 = rhs_p1,
//   0 = alg_p2 = B2⁻ Q2 f - x_p2,   0 = alg_ov = F2 f - Bov x_s1.
// Immutable; evaluators are pure.
class ReducedSystem {
public:
    ReducedSystem(SemilinearDAE dae, PencilDecomposition dec);

    const SemilinearDAE& dae() const { return dae_; }
    const PencilDecomposition& dec() const { return dec_; }

    // Projector-route evaluators (vectors in the ambient spaces).
    Vector rhs_s1(double t, const Vector& x) const;
    Vector rhs_p1(double t, const Vector& x) const;
    Vector alg_p2(double t, const Vector& x) const;
    Vector alg_ov(double t, const Vector& x) const;

    // Coordinate-route evaluators (independent small-matrix path; w ∈ R^b,
    // xi ∈ R^l, z ∈ R^a, u ∈ R^d are coordinates on the computed bases).
    Vector w_coords(const Vector& x) const;
    Vector xi_coords(const Vector& x) const;
    Vector z_coords(const Vector& x) const;
    Vector u_coords(const Vector& x) const;
    Vector assemble(const Vector& w, const Vector& xi, const Vector& z, const Vector& u) const;

    Vector w_rhs_coords(double t, const Vector& x) const;
    Vector z_rhs_coords(double t, const Vector& x) const;
    Vector psi_coords(double t, const Vector& x) const;     // R^d residual of alg_p2
    Vector ov_coords(double t, const Vector& x) const;      // R^{ys2} residual of alg_ov

    // Coordinate matrix of Phi = [d(Q2 f)/dx - B] P2 restricted X2→Y2, with a
    // condition estimate.
    std::pair<Matrix, double> phi_matrix(double t, const Vector& x) const;
    Matrix b2_matrix() const { return B2c_; }

private:
    SemilinearDAE dae_;
    PencilDecomposition dec_;
    Matrix Tinv_, Zinv_;
    Matrix Agc_lu_src_, A1c_lu_src_, B2c_;
    Eigen::PartialPivLU<Matrix> Agc_lu_, A1c_lu_, B2c_lu_;
    Matrix Bgc_, Buc_, B1c_, Bovc_;

    friend Vector solve_consistent_p2(const ReducedSystem&, double, const Vector&, const Vector&,
                                      const Vector&, const Vector&, const NewtonOptions&,
                                      NewtonDiagnostics*);
};

ReducedSystem build_reduced_system(SemilinearDAE dae, PencilDecomposition dec);

ConsistencyPoint consistency_residual(const ReducedSystem& rs, double t, const Vector& x);

// Coordinate matrix of Phi at (t, x) plus its condition estimate.
std::pair<Matrix, double> phi_operator(const ReducedSystem& rs, double t, const Vector& x);

// Damped Newton solve of the algebraic component: returns x_p2 ∈ X2 (ambient
// n-vector) with ||alg_p2|| <= opts.tol at x = x_s1+x_s2+x_p1+x_p2.
Vector solve_consistent_p2(const ReducedSystem& rs, double t, const Vector& x_s1,
                           const Vector& x_s2, const Vector& x_p1, const Vector& guess,
                           const NewtonOptions& opts, NewtonDiagnostics* diag = nullptr);

// Completes partial data (x_s1, x_s2, x_p1) to a consistent point; rejects it
// with InconsistentOverdetermined when the overdetermined residual exceeds
// opts.tol.
Vector consistent_initialization(const ReducedSystem& rs, double t0, const Vector& x_s1,
                                 const Vector& x_s2, const Vector& x_p1,
                                 const NewtonOptions& opts);

std::string consistency_csv_row(const ConsistencyPoint& cp);

} // namespace daekit

#endif

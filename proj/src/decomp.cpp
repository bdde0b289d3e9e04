#include "daekit/decomp.hpp"

#include "daekit/linalg.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <fstream>
#include <sstream>

namespace daekit {

using linalg::RankOptions;

namespace {

// Wong-type subspace limits.
//   V0 = Rⁿ,  V_{i+1} = {x : Bx ∈ A·V_i}    (decreasing)
//   W1 = ker A,  W_{i+1} = {x : Ax ∈ B·W_i} (increasing)
// V* ∩ W* spans the underdetermined (right-singular) columns, V* adds the
// finite regular part, W* adds the infinite part; the remaining complement
// carries the overdetermined (left-singular) structure.
Matrix wong_v_limit(const Matrix& A, const Matrix& B, const RankOptions& ro) {
    const Eigen::Index n = A.cols();
    Matrix V = Matrix::Identity(n, n);
    for (Eigen::Index iter = 0; iter <= n + 1; ++iter) {
        Matrix AV = linalg::orthonormal_range(A * V, ro);
        Matrix Vnext = linalg::preimage(B, AV, ro);
        if (Vnext.cols() == V.cols()) return Vnext;
        V = Vnext;
    }
    return V;
}

Matrix wong_w_limit(const Matrix& A, const Matrix& B, const RankOptions& ro) {
    Matrix W = linalg::nullspace(A, ro);
    const Eigen::Index n = A.cols();
    for (Eigen::Index iter = 0; iter <= n + 1; ++iter) {
        Matrix BW = linalg::orthonormal_range(B * W, ro);
        Matrix Wnext = linalg::preimage(A, BW, ro);
        if (Wnext.cols() == W.cols()) return Wnext;
        W = Wnext;
    }
    return W;
}

struct RegularSplit {
    int index = 0;
    int a = 0, d = 0;
    Matrix X1c, X2c; // coordinate bases of the finite / infinite subspaces
};

// Finite/infinite split of a regular pencil via M = (A + μB)⁻¹A for a generic
// sampled μ: range(M) is the finite deflating subspace, ker(M) the infinite
// one, and the index exceeds one exactly when rank(M²) < rank(M).
RegularSplit analyze_regular(const Matrix& Ar, const Matrix& Br, double tol) {
    RegularSplit out;
    const Eigen::Index r = Ar.rows();
    if (Ar.cols() != r || Br.rows() != r || Br.cols() != r)
        throw ShapeMismatch("regular block must be square");
    if (r == 0) {
        out.X1c = Matrix(0, 0);
        out.X2c = Matrix(0, 0);
        return out;
    }

    double best_rcond = -1.0;
    double best_mu = 0.0;
    for (double mu : lambda_samples(8)) {
        Eigen::JacobiSVD<Matrix> svd(Ar + mu * Br);
        const auto& sv = svd.singularValues();
        const double rc = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
        if (rc > best_rcond) {
            best_rcond = rc;
            best_mu = mu;
        }
    }
    if (best_rcond <= tol)
        throw SingularPencilInput("block pencil is singular at all sampled points");

    RankOptions ro;
    ro.tol = tol;
    const Matrix M = (Ar + best_mu * Br).partialPivLu().solve(Ar);
    const int r1 = linalg::numerical_rank(M, ro);
    const int r2 = linalg::numerical_rank(M * M, ro);
    if (r2 < r1)
        throw IndexTooHigh("regular block has index >= 2 (nilpotent infinite part)");

    out.a = r1;
    out.d = static_cast<int>(r) - r1;
    out.index = (out.d > 0) ? 1 : 0;
    out.X1c = linalg::orthonormal_range(M, ro);
    out.X2c = linalg::nullspace(M, ro);
    return out;
}

Matrix safe_inverse(const Matrix& M, const char* what) {
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible())
        throw Error(std::string("decomposition failure: singular ") + what);
    return lu.inverse();
}

// Coordinates of the columns of Img in the (full-column-rank) basis Y.
Matrix coords_in(const Matrix& Y, const Matrix& Img, const char* what) {
    if (Y.cols() == 0) {
        if (linalg::max_abs(Img) > 1e-8)
            throw Error(std::string("decomposition failure: nonzero image with empty basis in ") + what);
        return Matrix(0, Img.cols());
    }
    Matrix C = Y.colPivHouseholderQr().solve(Img);
    if (linalg::max_abs(Y * C - Img) > 1e-6 * (1.0 + linalg::max_abs(Img)))
        throw Error(std::string("decomposition failure: image escapes subspace in ") + what);
    return C;
}

} // namespace

// Builds projectors, extended operators and semi-inverses from the eight
// subspace bases.
static PencilDecomposition finalize_from_bases(const Pencil& p, Matrix Sb, Matrix Sl,
                                               Matrix Pa, Matrix Pd, Matrix Yb1, Matrix Yb2,
                                               Matrix Ya, Matrix Yd) {
    PencilDecomposition dec;
    dec.m = p.rows();
    dec.n = p.cols();
    dec.b = static_cast<int>(Sb.cols());
    dec.l = static_cast<int>(Sl.cols());
    dec.a = static_cast<int>(Pa.cols());
    dec.d = static_cast<int>(Pd.cols());
    dec.ys1 = static_cast<int>(Yb1.cols());
    dec.ys2 = static_cast<int>(Yb2.cols());

    if (dec.b + dec.l + dec.a + dec.d != dec.n)
        throw Error("decomposition failure: domain dimensions do not sum to n");
    if (dec.ys1 + dec.ys2 + dec.a + dec.d != dec.m)
        throw Error("decomposition failure: codomain dimensions do not sum to m");

    const Matrix T = linalg::hcat({&Sb, &Sl, &Pa, &Pd}, dec.n);
    const Matrix Z = linalg::hcat({&Yb1, &Yb2, &Ya, &Yd}, dec.m);
    if (T.cols() != dec.n || Z.cols() != dec.m)
        throw Error("decomposition failure: basis counts do not match pencil shape");
    const Matrix Tinv = safe_inverse(T, "domain basis matrix");
    const Matrix Zinv = safe_inverse(Z, "codomain basis matrix");

    auto domain_projector = [&](Eigen::Index off, Eigen::Index k) -> Matrix {
        if (k == 0) return Matrix::Zero(dec.n, dec.n);
        return T.middleCols(off, k) * Tinv.middleRows(off, k);
    };
    auto codomain_projector = [&](Eigen::Index off, Eigen::Index k) -> Matrix {
        if (k == 0) return Matrix::Zero(dec.m, dec.m);
        return Z.middleCols(off, k) * Zinv.middleRows(off, k);
    };

    dec.S1 = domain_projector(0, dec.b);
    dec.S2 = domain_projector(dec.b, dec.l);
    dec.P1 = domain_projector(dec.b + dec.l, dec.a);
    dec.P2 = domain_projector(dec.b + dec.l + dec.a, dec.d);
    dec.S = dec.S1 + dec.S2;
    dec.P = dec.P1 + dec.P2;

    dec.F1 = codomain_projector(0, dec.ys1);
    dec.F2 = codomain_projector(dec.ys1, dec.ys2);
    dec.Q1 = codomain_projector(dec.ys1 + dec.ys2, dec.a);
    dec.Q2 = codomain_projector(dec.ys1 + dec.ys2 + dec.a, dec.d);
    dec.F = dec.F1 + dec.F2;
    dec.Q = dec.Q1 + dec.Q2;

    dec.Sb = std::move(Sb);
    dec.Sl = std::move(Sl);
    dec.Pa = std::move(Pa);
    dec.Pd = std::move(Pd);
    dec.Yb1 = std::move(Yb1);
    dec.Yb2 = std::move(Yb2);
    dec.Ya = std::move(Ya);
    dec.Yd = std::move(Yd);

    const Matrix& A = p.A();
    const Matrix& B = p.B();
    dec.Agen = dec.F1 * A;
    dec.Bgen = dec.F1 * B * dec.S1;
    dec.Bund = dec.F1 * B * dec.S2;
    dec.Bov = dec.F2 * B * dec.S1;
    dec.A1op = dec.Q1 * A;
    dec.B1op = dec.Q1 * B;
    dec.B2op = dec.Q2 * B;

    auto semi_inverse = [&](const Matrix& Xb, Eigen::Index yoff, Eigen::Index k, const Matrix& Op,
                            const char* what) -> Matrix {
        if (k == 0) return Matrix::Zero(dec.n, dec.m);
        const Matrix Zrows = Zinv.middleRows(yoff, k); // coordinates on the Y-side block
        const Matrix core = Zrows * Op * Xb;           // k×k, invertible by construction
        return Xb * safe_inverse(core, what) * Zrows;
    };
    dec.AgenInv = semi_inverse(dec.Sb, 0, dec.b, A, "A_gen core");
    dec.A1Inv = semi_inverse(dec.Pa, dec.ys1 + dec.ys2, dec.a, A, "A_1 core");
    dec.B2Inv = semi_inverse(dec.Pd, dec.ys1 + dec.ys2 + dec.a, dec.d, B, "B_2 core");

    dec.regular_index = (dec.d > 0) ? 1 : 0;
    return dec;
}

PencilDecomposition decompose(const Pencil& p, double tol) {
    if (!(tol > 0.0))
        throw Error("decompose requires tol > 0");
    const Matrix& A = p.A();
    const Matrix& B = p.B();
    const Eigen::Index n = p.cols();
    const Eigen::Index m = p.rows();

    RankOptions ro;
    ro.tol = tol;
    ro.throw_on_ambiguous = true;

    // Canonical column structure from the Wong limits.
    const Matrix Vstar = wong_v_limit(A, B, ro);
    const Matrix Wstar = wong_w_limit(A, B, ro);
    const Matrix XP = linalg::subspace_intersection(Vstar, Wstar, ro);
    const Matrix UVW = linalg::subspace_sum(Vstar, Wstar, ro);
    const Matrix XR0 = linalg::complement_within(XP, UVW, ro);
    const Matrix XQ0 = linalg::complement_within(UVW, Matrix::Identity(n, n), ro);

    const Eigen::Index pdim = XP.cols();
    const Eigen::Index rdim = XR0.cols();
    const Eigen::Index qdim = XQ0.cols();

    const Matrix XPR = linalg::hcat({&XP, &XR0}, n);

    const Matrix AXP = A * XP, BXP = B * XP;
    const Matrix YP = linalg::orthonormal_range(linalg::hcat({&AXP, &BXP}, m), ro);
    const Matrix AXPR = A * XPR, BXPR = B * XPR;
    const Matrix YPRspan = linalg::orthonormal_range(linalg::hcat({&AXPR, &BXPR}, m), ro);
    const Matrix YR0 = linalg::complement_within(YP, YPRspan, ro);
    const Matrix YQ0 = linalg::complement_within(YPRspan, Matrix::Identity(m, m), ro);

    const Eigen::Index bP = YP.cols();
    if (YR0.cols() != rdim)
        throw Error("decomposition failure: regular block row count mismatch");

    const Matrix YPR = linalg::hcat({&YP, &YR0}, m);

    // Decouple the overdetermined block from the rest, then the regular block
    // from the underdetermined one, by solving the coupling equations
    //   D R + L E = C  for both A and B simultaneously.
    Matrix XQ = XQ0;
    Matrix YQ = YQ0;
    if (qdim > 0 && (pdim + rdim) > 0) {
        const Matrix Da = YPR.transpose() * A * XPR;
        const Matrix Db = YPR.transpose() * B * XPR;
        const Matrix Ea = YQ0.transpose() * A * XQ0;
        const Matrix Eb = YQ0.transpose() * B * XQ0;
        const Matrix Ca = YPR.transpose() * A * XQ0;
        const Matrix Cb = YPR.transpose() * B * XQ0;
        auto sol = linalg::solve_coupling(Da, Ea, Ca, Db, Eb, Cb);
        if (sol.residual > 1e-8)
            throw Error("decomposition failure: overdetermined coupling unsolvable");
        XQ = XQ0 - XPR * sol.R;
        YQ = YQ0 + YPR * sol.L;
    }

    Matrix XR = XR0;
    Matrix YR = YR0;
    if (rdim > 0 && pdim > 0) {
        const Matrix Da = YP.transpose() * A * XP;
        const Matrix Db = YP.transpose() * B * XP;
        const Matrix Ea = YR0.transpose() * A * XR0;
        const Matrix Eb = YR0.transpose() * B * XR0;
        const Matrix Ca = YP.transpose() * A * XR0;
        const Matrix Cb = YP.transpose() * B * XR0;
        auto sol = linalg::solve_coupling(Da, Ea, Ca, Db, Eb, Cb);
        if (sol.residual > 1e-8)
            throw Error("decomposition failure: regular coupling unsolvable");
        XR = XR0 - XP * sol.R;
        YR = YR0 + YP * sol.L;
    }

    // Underdetermined part: X_s2 is the kernel of A within it, the rest maps
    // invertibly onto Y_P.
    const Matrix App = YP.transpose() * A * XP; // bP × p
    Matrix Xs2coords = linalg::nullspace(App, ro);
    Matrix Xs1Pcoords = linalg::complement_within(Xs2coords, Matrix::Identity(pdim, pdim), ro);
    if (Xs1Pcoords.cols() != bP)
        throw Error("decomposition failure: underdetermined split dimension mismatch");
    const Matrix Xs2 = XP * Xs2coords;
    const Matrix Xs1P = XP * Xs1Pcoords;

    // Overdetermined part: all of X_Q joins X_s1; A X_Q spans the Y_s1 share,
    // the leftover of Y_Q is Y_s2.
    const Matrix Ys1Q = linalg::orthonormal_range(A * XQ, ro);
    if (Ys1Q.cols() != qdim)
        throw Error("decomposition failure: overdetermined block A-rank mismatch");
    const Matrix YQspan = linalg::orthonormal_range(YQ, ro);
    const Matrix Ys2 = linalg::complement_within(Ys1Q, YQspan, ro);

    // Regular part: finite/infinite split with the index guard.
    const Matrix ARc = coords_in(YR, A * XR, "regular A block");
    const Matrix BRc = coords_in(YR, B * XR, "regular B block");
    RegularSplit rs = analyze_regular(ARc, BRc, tol);
    const Matrix X1 = XR * rs.X1c;
    const Matrix X2 = XR * rs.X2c;
    const Matrix Ya = linalg::orthonormal_range(A * X1, ro);
    const Matrix Yd = linalg::orthonormal_range(B * X2, ro);
    if (Ya.cols() != rs.a || Yd.cols() != rs.d)
        throw Error("decomposition failure: regular split image rank mismatch");

    const Matrix Xs1 = linalg::hcat({&Xs1P, &XQ}, n);
    const Matrix Yb1 = linalg::hcat({&YP, &Ys1Q}, m);

    return finalize_from_bases(p, Xs1, Xs2, X1, X2, Yb1, Ys2, Ya, Yd);
}

PencilDecomposition decomposition_from_projectors(const Pencil& p, const ProjectorSet& ps,
                                                  double tol) {
    RankOptions ro;
    ro.tol = tol;
    auto basis_or = [&](const Matrix& given, const Matrix& proj) -> Matrix {
        if (given.cols() > 0 || proj.size() == 0) return given;
        Matrix b = linalg::orthonormal_range(proj, ro);
        return b;
    };
    Matrix Sb = basis_or(ps.Sb, ps.S1);
    Matrix Sl = basis_or(ps.Sl, ps.S2);
    Matrix Pa = basis_or(ps.Pa, ps.P1);
    Matrix Pd = basis_or(ps.Pd, ps.P2);
    Matrix Yb1 = basis_or(ps.Yb1, ps.F1);
    Matrix Yb2 = basis_or(ps.Yb2, ps.F2);
    Matrix Ya = basis_or(ps.Ya, ps.Q1);
    Matrix Yd = basis_or(ps.Yd, ps.Q2);
    const Eigen::Index n = p.cols();
    const Eigen::Index m = p.rows();
    auto fix_empty = [](Matrix& M, Eigen::Index rows) {
        if (M.size() == 0 && M.cols() == 0) M = Matrix(rows, 0);
    };
    fix_empty(Sb, n);
    fix_empty(Sl, n);
    fix_empty(Pa, n);
    fix_empty(Pd, n);
    fix_empty(Yb1, m);
    fix_empty(Yb2, m);
    fix_empty(Ya, m);
    fix_empty(Yd, m);

    PencilDecomposition dec = finalize_from_bases(p, Sb, Sl, Pa, Pd, Yb1, Yb2, Ya, Yd);

    // Keep the caller's projector matrices verbatim.
    auto keep = [](Matrix& dst, const Matrix& given) {
        if (given.size() > 0) dst = given;
    };
    keep(dec.S1, ps.S1);
    keep(dec.S2, ps.S2);
    keep(dec.P1, ps.P1);
    keep(dec.P2, ps.P2);
    keep(dec.F1, ps.F1);
    keep(dec.F2, ps.F2);
    keep(dec.Q1, ps.Q1);
    keep(dec.Q2, ps.Q2);
    dec.S = dec.S1 + dec.S2;
    dec.P = dec.P1 + dec.P2;
    dec.F = dec.F1 + dec.F2;
    dec.Q = dec.Q1 + dec.Q2;
    dec.Agen = dec.F1 * p.A();
    dec.Bgen = dec.F1 * p.B() * dec.S1;
    dec.Bund = dec.F1 * p.B() * dec.S2;
    dec.Bov = dec.F2 * p.B() * dec.S1;
    dec.A1op = dec.Q1 * p.A();
    dec.B1op = dec.Q1 * p.B();
    dec.B2op = dec.Q2 * p.B();
    return dec;
}

int regular_block_index(const Matrix& Ar, const Matrix& Br, double tol) {
    return analyze_regular(Ar, Br, tol).index;
}

std::pair<Matrix, Matrix> residue_projectors(const Matrix& Ar, const Matrix& Br, double tol) {
    RegularSplit rs = analyze_regular(Ar, Br, tol);
    const Eigen::Index r = Ar.rows();
    if (r == 0) return {Matrix(0, 0), Matrix(0, 0)};
    if (rs.d == 0) return {Matrix::Identity(r, r), Matrix::Identity(r, r)};
    if (rs.a == 0) return {Matrix::Zero(r, r), Matrix::Zero(r, r)};

    RankOptions ro;
    ro.tol = tol;
    const Matrix T = linalg::hcat({&rs.X1c, &rs.X2c}, r);
    Matrix P1t = T.leftCols(rs.a) * safe_inverse(T, "residue domain basis").topRows(rs.a);

    const Matrix Y1 = linalg::orthonormal_range(Ar * rs.X1c, ro);
    const Matrix Y2 = linalg::orthonormal_range(Br * rs.X2c, ro);
    const Matrix Z = linalg::hcat({&Y1, &Y2}, r);
    Matrix Q1t = Z.leftCols(rs.a) * safe_inverse(Z, "residue codomain basis").topRows(rs.a);
    return {P1t, Q1t};
}

bool ValidationReport::passed() const {
    for (const auto& e : entries)
        if (!(e.residual <= tol)) return false;
    return true;
}

double ValidationReport::worst() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, e.residual);
    return w;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << (passed() ? "PASS" : "FAIL") << " (tol " << tol << ", worst residual " << worst()
       << ", " << entries.size() << " identities)";
    return os.str();
}

ValidationReport validate_decomposition(const Pencil& p, const PencilDecomposition& dec,
                                        double tol) {
    ValidationReport rep;
    rep.tol = tol;
    auto add = [&](const std::string& name, const Matrix& R) {
        rep.entries.push_back({name, linalg::max_abs(R)});
    };
    auto add_scalar = [&](const std::string& name, double v) {
        rep.entries.push_back({name, std::abs(v)});
    };
    const Matrix& A = p.A();
    const Matrix& B = p.B();
    const Matrix In = Matrix::Identity(dec.n, dec.n);
    const Matrix Im = Matrix::Identity(dec.m, dec.m);

    // Idempotence and complementarity.
    const struct {
        const char* name;
        const Matrix* M;
    } idem[] = {{"S", &dec.S},   {"P", &dec.P},   {"S1", &dec.S1}, {"S2", &dec.S2},
                {"P1", &dec.P1}, {"P2", &dec.P2}, {"F", &dec.F},   {"Q", &dec.Q},
                {"F1", &dec.F1}, {"F2", &dec.F2}, {"Q1", &dec.Q1}, {"Q2", &dec.Q2}};
    for (const auto& it : idem)
        add(std::string(it.name) + " idempotent", (*it.M) * (*it.M) - (*it.M));

    add("S+P=I", dec.S + dec.P - In);
    add("F+Q=I", dec.F + dec.Q - Im);
    add("S1+S2=S", dec.S1 + dec.S2 - dec.S);
    add("F1+F2=F", dec.F1 + dec.F2 - dec.F);
    add("P1+P2=P", dec.P1 + dec.P2 - dec.P);
    add("Q1+Q2=Q", dec.Q1 + dec.Q2 - dec.Q);
    add("SP=0", dec.S * dec.P);
    add("PS=0", dec.P * dec.S);
    add("FQ=0", dec.F * dec.Q);
    add("QF=0", dec.Q * dec.F);
    add("S1S2=0", dec.S1 * dec.S2);
    add("S2S1=0", dec.S2 * dec.S1);
    add("P1P2=0", dec.P1 * dec.P2);
    add("P2P1=0", dec.P2 * dec.P1);
    add("F1F2=0", dec.F1 * dec.F2);
    add("F2F1=0", dec.F2 * dec.F1);
    add("Q1Q2=0", dec.Q1 * dec.Q2);
    add("Q2Q1=0", dec.Q2 * dec.Q1);

    // Intertwining and annihilation.
    add("FA=AS", dec.F * A - A * dec.S);
    add("FB=BS", dec.F * B - B * dec.S);
    add("QA=AP", dec.Q * A - A * dec.P);
    add("QB=BP", dec.Q * B - B * dec.P);
    add("A S2=0", A * dec.S2);
    add("F2 A=0", dec.F2 * A);
    add("F2 B S2=0", dec.F2 * B * dec.S2);
    add("Q2 A=0", dec.Q2 * A);

    // Semi-inverse identities.
    add("AgenInv Agen=S1", dec.AgenInv * dec.Agen - dec.S1);
    add("Agen AgenInv=F1", dec.Agen * dec.AgenInv - dec.F1);
    add("AgenInv=S1 AgenInv", dec.AgenInv - dec.S1 * dec.AgenInv);
    add("A1Inv A1=P1", dec.A1Inv * dec.A1op - dec.P1);
    add("A1 A1Inv=Q1", dec.A1op * dec.A1Inv - dec.Q1);
    add("A1Inv=P1 A1Inv", dec.A1Inv - dec.P1 * dec.A1Inv);
    add("B2Inv B2=P2", dec.B2Inv * dec.B2op - dec.P2);
    add("B2 B2Inv=Q2", dec.B2op * dec.B2Inv - dec.Q2);
    add("B2Inv=P2 B2Inv", dec.B2Inv - dec.P2 * dec.B2Inv);

    // Restriction consistency of the extended operators.
    add("Agen S1=A S1", dec.Agen * dec.S1 - A * dec.S1);
    add("A S1=F1 A", A * dec.S1 - dec.F1 * A);
    add("Bgen=F1 B S1", dec.Bgen - dec.F1 * B * dec.S1);
    add("Bund S2=F1 B S2", dec.Bund * dec.S2 - dec.F1 * B * dec.S2);
    add("Bov S1=F2 B S1", dec.Bov * dec.S1 - dec.F2 * B * dec.S1);
    add("A1=Q1 A", dec.A1op - dec.Q1 * A);
    add("B2=Q2 B", dec.B2op - dec.Q2 * B);

    // Bases lie inside the projector ranges.
    if (dec.b > 0) add("S1 Sb=Sb", dec.S1 * dec.Sb - dec.Sb);
    if (dec.l > 0) add("S2 Sl=Sl", dec.S2 * dec.Sl - dec.Sl);
    if (dec.a > 0) add("P1 Pa=Pa", dec.P1 * dec.Pa - dec.Pa);
    if (dec.d > 0) add("P2 Pd=Pd", dec.P2 * dec.Pd - dec.Pd);

    // Dimension bookkeeping.
    add_scalar("b+l+a+d=n", double(dec.b + dec.l + dec.a + dec.d - dec.n));
    add_scalar("ys1+ys2+a+d=m", double(dec.ys1 + dec.ys2 + dec.a + dec.d - dec.m));
    add_scalar("b=ys1", double(dec.b - dec.ys1));
    add_scalar("index in {0,1}",
               (dec.regular_index == 0 || dec.regular_index == 1) ? 0.0 : 1.0);

    return rep;
}

namespace {

void write_named_matrix(std::ostream& out, const char* name, const Matrix& M) {
    out << "matrix " << name << " " << M.rows() << " " << M.cols() << "\n";
    char buf[64];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", M(i, j));
            out << buf << (j + 1 == M.cols() ? "" : " ");
        }
        out << "\n";
    }
}

struct NamedField {
    const char* name;
    Matrix PencilDecomposition::* member;
};

const NamedField kFields[] = {
    {"S", &PencilDecomposition::S},           {"P", &PencilDecomposition::P},
    {"S1", &PencilDecomposition::S1},         {"S2", &PencilDecomposition::S2},
    {"P1", &PencilDecomposition::P1},         {"P2", &PencilDecomposition::P2},
    {"F", &PencilDecomposition::F},           {"Q", &PencilDecomposition::Q},
    {"F1", &PencilDecomposition::F1},         {"F2", &PencilDecomposition::F2},
    {"Q1", &PencilDecomposition::Q1},         {"Q2", &PencilDecomposition::Q2},
    {"Sb", &PencilDecomposition::Sb},         {"Sl", &PencilDecomposition::Sl},
    {"Pa", &PencilDecomposition::Pa},         {"Pd", &PencilDecomposition::Pd},
    {"Yb1", &PencilDecomposition::Yb1},       {"Yb2", &PencilDecomposition::Yb2},
    {"Ya", &PencilDecomposition::Ya},         {"Yd", &PencilDecomposition::Yd},
    {"Agen", &PencilDecomposition::Agen},     {"Bgen", &PencilDecomposition::Bgen},
    {"Bund", &PencilDecomposition::Bund},     {"Bov", &PencilDecomposition::Bov},
    {"A1", &PencilDecomposition::A1op},       {"B1", &PencilDecomposition::B1op},
    {"B2", &PencilDecomposition::B2op},       {"AgenInv", &PencilDecomposition::AgenInv},
    {"A1Inv", &PencilDecomposition::A1Inv},   {"B2Inv", &PencilDecomposition::B2Inv},
};

} // namespace

void write_decomposition(std::ostream& out, const PencilDecomposition& dec) {
    out << "daekit decomposition v1\n";
    out << "m " << dec.m << " n " << dec.n << "\n";
    out << "dims_x " << dec.b << " " << dec.l << " " << dec.a << " " << dec.d << "\n";
    out << "dims_y " << dec.ys1 << " " << dec.ys2 << " " << dec.a << " " << dec.d << "\n";
    out << "regular_index " << dec.regular_index << "\n";
    for (const auto& f : kFields)
        write_named_matrix(out, f.name, dec.*(f.member));
    out << "end\n";
}

void write_decomposition_file(const std::string& path, const PencilDecomposition& dec) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open decomposition file for writing: " + path);
    write_decomposition(out, dec);
}

PencilDecomposition read_decomposition(std::istream& in) {
    PencilDecomposition dec;
    std::string line;
    if (!std::getline(in, line) || line != "daekit decomposition v1")
        throw ParseError("bad decomposition header");
    std::string kw;
    int ya = 0, yd = 0;
    if (!(in >> kw >> dec.m >> kw >> dec.n)) throw ParseError("bad decomposition dims line");
    if (!(in >> kw >> dec.b >> dec.l >> dec.a >> dec.d)) throw ParseError("bad dims_x line");
    if (!(in >> kw >> dec.ys1 >> dec.ys2 >> ya >> yd)) throw ParseError("bad dims_y line");
    if (!(in >> kw >> dec.regular_index)) throw ParseError("bad regular_index line");

    while (in >> kw) {
        if (kw == "end") return dec;
        if (kw != "matrix") throw ParseError("expected 'matrix' section, got: " + kw);
        std::string name;
        long rows = 0, cols = 0;
        if (!(in >> name >> rows >> cols)) throw ParseError("bad matrix section header");
        Matrix M(rows, cols);
        for (long i = 0; i < rows; ++i)
            for (long j = 0; j < cols; ++j)
                if (!(in >> M(i, j))) throw ParseError("matrix section ended early: " + name);
        bool known = false;
        for (const auto& f : kFields) {
            if (name == f.name) {
                dec.*(f.member) = std::move(M);
                known = true;
                break;
            }
        }
        if (!known) throw ParseError("unknown matrix section: " + name);
    }
    throw ParseError("decomposition file ended before 'end'");
}

PencilDecomposition read_decomposition_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open decomposition file: " + path);
    return read_decomposition(in);
}

} // namespace daekit

#include "daekit/fixtures.hpp"

#include <cmath>

namespace daekit::fixtures {

Pencil sec9_pencil() {
    Matrix A(3, 3), B(3, 3);
    A << 1, 0, -1,
         0, 0, 0,
         0, 0, 0;
    B << 1, -1, -1,
         1, 1, -1,
         0, 2, 0;
    return Pencil(A, B);
}

PencilDecomposition sec9_reference_decomposition() {
    const Pencil p = sec9_pencil();
    ProjectorSet ps;
    Matrix S1(3, 3), S2(3, 3), P2(3, 3), F1(3, 3), F2(3, 3), Q2(3, 3);
    S1 << 1, 0, -1,
          0, 0, 0,
          0, 0, 0;
    S2 << 0, 0, 1,
          0, 0, 0,
          0, 0, 1;
    P2 << 0, 0, 0,
          0, 1, 0,
          0, 0, 0;
    F1 << 1, 0, 0.5,
          0, 0, 0,
          0, 0, 0;
    F2 << 0, 0, 0,
          0, 1, -0.5,
          0, 0, 0;
    Q2 << 0, 0, -0.5,
          0, 0, 0.5,
          0, 0, 1;
    ps.S1 = S1;
    ps.S2 = S2;
    ps.P1 = Matrix::Zero(3, 3);
    ps.P2 = P2;
    ps.F1 = F1;
    ps.F2 = F2;
    ps.Q1 = Matrix::Zero(3, 3);
    ps.Q2 = Q2;

    // Subspace basis vectors.
    ps.Sb = Matrix(3, 1);
    ps.Sb << 1, 0, 0;
    ps.Sl = Matrix(3, 1);
    ps.Sl << 1, 0, 1;
    ps.Pa = Matrix(3, 0);
    ps.Pd = Matrix(3, 1);
    ps.Pd << 0, 1, 0;
    ps.Yb1 = Matrix(3, 1);
    ps.Yb1 << 1, 0, 0;
    ps.Yb2 = Matrix(3, 1);
    ps.Yb2 << 0, 1, 0;
    ps.Ya = Matrix(3, 0);
    ps.Yd = Matrix(3, 1);
    ps.Yd << -0.5, 0.5, 1;

    PencilDecomposition dec = decomposition_from_projectors(p, ps, 1e-12);

    // Closed-form semi-inverse of the generalized part.
    Matrix AgenInv(3, 3);
    AgenInv << 1, 0, 0.5,
               0, 0, 0,
               0, 0, 0;
    dec.AgenInv = AgenInv;
    return dec;
}

DaeFixture sec9_analytic() {
    DaeFixture fx{SemilinearDAE{sec9_pencil(), nullptr, nullptr, 0.0},
                  sec9_reference_decomposition(), Vector(3), FreeComponent{}, 10.0};
    fx.dae.f = [](double, const Vector& x) -> Vector {
        Vector f(3);
        f << 0.0, x(0) - x(2), 0.0;
        return f;
    };
    fx.dae.df_dx = [](double, const Vector&) -> Matrix {
        Matrix J = Matrix::Zero(3, 3);
        J(1, 0) = 1.0;
        J(1, 2) = -1.0;
        return J;
    };
    fx.x0 << 1.0, 0.0, 0.0;
    fx.phi.phi_s2 = [](double t) -> Vector {
        Vector v(3);
        v << std::sin(t), 0.0, std::sin(t);
        return v;
    };
    fx.phi.description = "sin(t) * (1,0,1)";
    fx.default_horizon = 10.0;
    return fx;
}

DaeFixture sec9_blowup() {
    DaeFixture fx{SemilinearDAE{sec9_pencil(), nullptr, nullptr, 0.0},
                  sec9_reference_decomposition(), Vector(3), FreeComponent{}, 2.0};
    fx.dae.f = [](double, const Vector& x) -> Vector {
        const double w = x(0) - x(2);
        Vector f(3);
        f << w * w, w, 0.0;
        return f;
    };
    fx.dae.df_dx = [](double, const Vector& x) -> Matrix {
        const double w = x(0) - x(2);
        Matrix J = Matrix::Zero(3, 3);
        J(0, 0) = 2.0 * w;
        J(0, 2) = -2.0 * w;
        J(1, 0) = 1.0;
        J(1, 2) = -1.0;
        return J;
    };
    fx.x0 << 2.0, 0.0, 0.0;
    fx.phi.phi_s2 = [](double) -> Vector { return Vector::Zero(3); };
    fx.phi.description = "0";
    fx.default_horizon = 2.0;
    return fx;
}

std::string single_pipe_json() {
    return R"json({
  "units": {"pressure": "Pa", "flow": "kg/s", "length": "m", "angle": "rad"},
  "gas": {"R_s": 518.3, "T0": 288.15, "alpha": 2e-9},
  "nodes": [
    {"id": "src", "type": "pressure", "p_set": [[0, 5.0e6]]},
    {"id": "snk", "type": "flow", "q_set": [[0, 20.0]]}
  ],
  "edges": [
    {"id": "pipe1", "type": "pipe", "from": "src", "to": "snk",
     "L": 1000.0, "D": 0.5, "S": 0.19634954084936207, "lambda_fr": 0.011, "theta": 0.0}
  ]
}
)json";
}

std::string y_network_json() {
    return R"json({
  "units": {"pressure": "Pa", "flow": "kg/s", "length": "m", "angle": "rad"},
  "gas": {"R_s": 518.3, "T0": 288.15, "alpha": 2e-9},
  "nodes": [
    {"id": "src", "type": "pressure", "p_set": [[0, 5.1e6]]},
    {"id": "junction", "type": "flow"},
    {"id": "demand1", "type": "flow", "q_set": [[0, 12.0]]},
    {"id": "demand2", "type": "flow", "q_set": [[0, 8.0]]}
  ],
  "edges": [
    {"id": "feed", "type": "pipe", "from": "src", "to": "junction",
     "L": 2000.0, "D": 0.6, "lambda_fr": 0.011, "theta": 0.0},
    {"id": "branch1", "type": "pipe", "from": "junction", "to": "demand1",
     "L": 1500.0, "D": 0.4, "lambda_fr": 0.012, "theta": 0.0},
    {"id": "branch2", "type": "pipe", "from": "junction", "to": "demand2",
     "L": 1800.0, "D": 0.4, "lambda_fr": 0.012, "theta": 0.0}
  ]
}
)json";
}

bool is_dae_fixture(const std::string& name) {
    return name == "sec9-analytic" || name == "sec9-blowup";
}

DaeFixture dae_fixture(const std::string& name) {
    if (name == "sec9-analytic") return sec9_analytic();
    if (name == "sec9-blowup") return sec9_blowup();
    throw Error("unknown DAE fixture: " + name);
}

bool is_network_fixture(const std::string& name) {
    return name == "single-pipe" || name == "y-network";
}

std::string network_fixture_json(const std::string& name) {
    if (name == "single-pipe") return single_pipe_json();
    if (name == "y-network") return y_network_json();
    throw Error("unknown network fixture: " + name);
}

} // namespace daekit::fixtures

#ifndef DAEKIT_FIXTURES_HPP
#define DAEKIT_FIXTURES_HPP

#include "daekit/decomp.hpp"
#include "daekit/integrate.hpp"
#include "daekit/reduce.hpp"

#include <string>

namespace daekit::fixtures {

// 3×3 singular benchmark pencil with rank 2 and block dimensions
// (b, l, a, d) = (1, 1, 0, 1); its reference decomposition is known in closed
// form and ships as an oracle.
Pencil sec9_pencil();

// Closed-form reference decomposition of the benchmark pencil (exact rational
// entries).
PencilDecomposition sec9_reference_decomposition();

struct DaeFixture {
    SemilinearDAE dae;
    PencilDecomposition dec;
    Vector x0;
    FreeComponent phi;
    double default_horizon = 10.0;
};

// f = (0, x1 - x3, 0), phi_s2(t) = sin t · (1,0,1), x0 = (1,0,0): the solution
// satisfies x1 - x3 = e^{-t}, x2 = 0, x3 = sin t.
DaeFixture sec9_analytic();

// f = ((x1-x3)², x1-x3, 0), phi_s2 = 0, x0 = (2,0,0): w = x1 - x3 obeys
// w' = -w + w² and escapes at ln 2.
DaeFixture sec9_blowup();

// Gas-network fixture files (JSON text).
std::string single_pipe_json();
std::string y_network_json();

bool is_dae_fixture(const std::string& name);
DaeFixture dae_fixture(const std::string& name);

bool is_network_fixture(const std::string& name);
std::string network_fixture_json(const std::string& name);

} // namespace daekit::fixtures

#endif

#ifndef DAEKIT_GASNET_HPP
#define DAEKIT_GASNET_HPP

#include "daekit/reduce.hpp"

#include <string>
#include <vector>

namespace daekit::gasnet {

using daekit::Matrix;
using daekit::Vector;

struct PipeParams {
    double length = 0.0;        // L [m]
    double diameter = 0.0;      // D [m]
    double area = 0.0;          // S [m²]
    double friction = 0.0;      // lambda_fr [-]
    double slope_angle = 0.0;   // theta [rad]
    int segments = 1;
};

struct GasState {
    double R_s = 0.0;   // specific gas constant [J/(kg K)]
    double T0 = 0.0;    // temperature [K]
    double alpha = 0.0; // compressibility coefficient [1/Pa]
};

// z(p) = 1 + alpha p and phi(p) = p / z(p).
std::pair<double, double> equation_of_state(const GasState& gs, double p);

// Piecewise-linear time series over breakpoints, clamped outside the range.
struct TimeSeries {
    std::vector<std::pair<double, double>> points;
    double operator()(double t) const;
    bool empty() const { return points.empty(); }
};

enum class NodeType { Pressure, Flow };
enum class EdgeType { Pipe, Valve, Regulator };

struct Node {
    std::string id;
    NodeType type = NodeType::Flow;
    TimeSeries setpoint; // p_set for pressure nodes, q_set for flow nodes
};

struct Edge {
    std::string id;
    EdgeType type = EdgeType::Pipe;
    std::string from, to;
    PipeParams pipe;          // pipes
    double mu = 0.0;          // valves and regulators
    TimeSeries control;       // valve opening / regulator setpoint
};

// Per-edge closures; arguments are the full state blocks so alternatives can
// couple arbitrarily. Defaults are documented in the README and are not part
// of the source model.
struct EdgeModels {
    // f_pip(rho, q_pip_l, t) per pipe edge
    std::function<Vector(const Vector& rho, const Vector& q_pl, double t)> f_pip;
    std::function<Vector(const Vector& p, const Vector& q_val, double t)> f_val;
    std::function<Vector(const Vector& p, const Vector& q_reg, double t)> f_reg;
    std::function<Vector(const Vector& p)> f_pb;
    int f_pb_rows = 0;
    std::function<Vector(const Vector& q_pl, const Vector& q_pr, const Vector& q_val,
                         const Vector& q_reg)> f_qb;
    int f_qb_rows = 0;
};

struct GasNetwork {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    GasState gas;
    EdgeModels models; // empty members select the built-in defaults
};

struct IncidenceMatrices {
    Matrix pip_l, pip_r; // |V_qset| × |E_pip|
    Matrix val;          // |V_qset| × |E_val|
    Matrix reg;          // |V_qset| × |E_reg|
    std::vector<int> qset_nodes; // indices into net.nodes, in declaration order
};

IncidenceMatrices incidence_matrices(const GasNetwork& net);

// Splits every pipe longer than dx_max into equal subpipes joined by
// artificial flow nodes with zero external inflow.
GasNetwork segment_pipes(const GasNetwork& net, double dx_max);

// Single-pipe model in the state x = (rho_r, q_l, p_r) with boundary data
// q_r(t) and p_l(t); flows are per unit cross-section.
SemilinearDAE build_single_pipe(const PipeParams& pp, const GasState& gs,
                                std::function<double(double)> q_r,
                                std::function<double(double)> p_l);

// State block offsets of the assembled network DAE,
// x = (rho, q_pip_l, q_val, q_reg, q_pip_r, p).
struct NetworkLayout {
    int n_qset = 0, n_pip = 0, n_val = 0, n_reg = 0;
    int x_rho = 0, x_qpl = 0, x_qval = 0, x_qreg = 0, x_qpr = 0, x_p = 0;
    int r_mass = 0, r_mom = 0, r_val = 0, r_reg = 0, r_kirchhoff = 0, r_eos = 0, r_pb = 0,
        r_qb = 0;
    int n = 0, m = 0;
    std::vector<std::string> qset_ids;

    // Kirchhoff flow-balance residual rows of B x - f at a given state.
    Vector kirchhoff_residual(const Matrix& B, const Vector& fval, const Vector& x) const;
};

struct NetworkDAE {
    SemilinearDAE dae;
    NetworkLayout layout;
    IncidenceMatrices incidence;
};

NetworkDAE build_network(const GasNetwork& net, const GasState& gs);

// JSON loader for the documented network schema (keys: nodes, edges, gas,
// optional units). Validates connectivity and rejects self-loops.
GasNetwork load_network_json(const std::string& text);
GasNetwork load_network_file(const std::string& path);

} // namespace daekit::gasnet

#endif

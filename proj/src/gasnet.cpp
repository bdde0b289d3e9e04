#include "daekit/gasnet.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <queue>
#include <sstream>

namespace daekit::gasnet {

namespace {
constexpr double kGravity = 9.80665; // [m/s²]
}

std::pair<double, double> equation_of_state(const GasState& gs, double p) {
    const double z = 1.0 + gs.alpha * p;
    if (!(z > 0.0))
        throw StateEquationDomain("compressibility 1 + alpha p must stay positive");
    return {z, p / z};
}

double TimeSeries::operator()(double t) const {
    if (points.empty()) return 0.0;
    if (t <= points.front().first) return points.front().second;
    if (t >= points.back().first) return points.back().second;
    for (size_t i = 1; i < points.size(); ++i) {
        if (t <= points[i].first) {
            const auto& [t0, v0] = points[i - 1];
            const auto& [t1, v1] = points[i];
            const double w = (t - t0) / (t1 - t0);
            return v0 + w * (v1 - v0);
        }
    }
    return points.back().second;
}

IncidenceMatrices incidence_matrices(const GasNetwork& net) {
    IncidenceMatrices inc;
    std::map<std::string, int> qrow;
    for (size_t i = 0; i < net.nodes.size(); ++i) {
        if (net.nodes[i].type == NodeType::Flow) {
            qrow[net.nodes[i].id] = static_cast<int>(inc.qset_nodes.size());
            inc.qset_nodes.push_back(static_cast<int>(i));
        }
    }
    const int nq = static_cast<int>(inc.qset_nodes.size());
    int npip = 0, nval = 0, nreg = 0;
    for (const auto& e : net.edges) {
        if (e.type == EdgeType::Pipe) ++npip;
        else if (e.type == EdgeType::Valve) ++nval;
        else ++nreg;
    }
    inc.pip_l = Matrix::Zero(nq, npip);
    inc.pip_r = Matrix::Zero(nq, npip);
    inc.val = Matrix::Zero(nq, nval);
    inc.reg = Matrix::Zero(nq, nreg);

    int ip = 0, iv = 0, ir = 0;
    for (const auto& e : net.edges) {
        auto row = [&](const std::string& id) -> int {
            auto it = qrow.find(id);
            return it == qrow.end() ? -1 : it->second;
        };
        const int rl = row(e.from);
        const int rr = row(e.to);
        switch (e.type) {
            case EdgeType::Pipe:
                if (rl >= 0) inc.pip_l(rl, ip) = -1.0;
                if (rr >= 0) inc.pip_r(rr, ip) = 1.0;
                ++ip;
                break;
            case EdgeType::Valve:
                if (rl >= 0) inc.val(rl, iv) = -1.0;
                if (rr >= 0) inc.val(rr, iv) = 1.0;
                ++iv;
                break;
            case EdgeType::Regulator:
                if (rl >= 0) inc.reg(rl, ir) = -1.0;
                if (rr >= 0) inc.reg(rr, ir) = 1.0;
                ++ir;
                break;
        }
    }
    return inc;
}

GasNetwork segment_pipes(const GasNetwork& net, double dx_max) {
    if (!(dx_max > 0.0)) throw Error("segment_pipes requires dx_max > 0");
    GasNetwork out;
    out.gas = net.gas;
    out.models = net.models;
    out.nodes = net.nodes;
    for (const auto& e : net.edges) {
        if (e.type != EdgeType::Pipe || e.pipe.length <= dx_max) {
            out.edges.push_back(e);
            continue;
        }
        const int parts = static_cast<int>(std::ceil(e.pipe.length / dx_max));
        const double sub_len = e.pipe.length / parts;
        std::string prev = e.from;
        for (int k = 0; k < parts; ++k) {
            const bool last = (k + 1 == parts);
            std::string next = last ? e.to : e.id + "#" + std::to_string(k + 1);
            if (!last) {
                Node art;
                art.id = next;
                art.type = NodeType::Flow; // zero external inflow
                out.nodes.push_back(art);
            }
            Edge sub = e;
            sub.id = parts > 1 ? e.id + "." + std::to_string(k + 1) : e.id;
            sub.from = prev;
            sub.to = next;
            sub.pipe.length = sub_len;
            sub.pipe.segments = 1;
            out.edges.push_back(sub);
            prev = next;
        }
    }
    return out;
}

SemilinearDAE build_single_pipe(const PipeParams& pp, const GasState& gs,
                                std::function<double(double)> q_r,
                                std::function<double(double)> p_l) {
    if (pp.segments != 1)
        throw Error("build_single_pipe expects a single segment; use build_network for more");
    if (!(pp.length > 0.0) || !(pp.diameter > 0.0))
        throw Error("pipe length and diameter must be positive");

    const double L = pp.length, D = pp.diameter, lam = pp.friction;
    const double gsin = kGravity * std::sin(pp.slope_angle);
    const double RsT0 = gs.R_s * gs.T0;
    const double alpha = gs.alpha;

    Matrix A(3, 3), B(3, 3);
    A << 1, 0, 0,
         0, 1, 0,
         0, 0, 0;
    B << 0, -1.0 / L, 0,
         gsin, 0, 1.0 / L,
         0, 0, 1;

    SemilinearDAE dae{Pencil(A, B), nullptr, nullptr, 0.0};
    dae.f = [=](double t, const Vector& x) -> Vector {
        const double rho_r = x(0), q_l = x(1), p_r = x(2);
        Vector f(3);
        f(0) = -q_r(t) / L;
        f(1) = p_l(t) / L - 0.5 * lam / D * q_l * q_l / rho_r;
        f(2) = RsT0 * rho_r * (1.0 + alpha * p_r);
        return f;
    };
    dae.df_dx = [=](double /*t*/, const Vector& x) -> Matrix {
        const double rho_r = x(0), q_l = x(1), p_r = x(2);
        Matrix J = Matrix::Zero(3, 3);
        J(1, 0) = 0.5 * lam / D * q_l * q_l / (rho_r * rho_r);
        J(1, 1) = -lam / D * q_l / rho_r;
        J(2, 0) = RsT0 * (1.0 + alpha * p_r);
        J(2, 2) = RsT0 * rho_r * alpha;
        return J;
    };
    return dae;
}

Vector NetworkLayout::kirchhoff_residual(const Matrix& B, const Vector& fval,
                                         const Vector& x) const {
    return (B * x - fval).segment(r_kirchhoff, n_qset);
}

namespace {

// Everything the assembled network evaluators need, shared by f and df_dx.
struct NetContext {
    GasNetwork net;
    GasState gas;
    IncidenceMatrices inc;
    NetworkLayout lay;
    Matrix B; // for Jacobian assembly convenience
    std::vector<int> pipe_edges, valve_edges, reg_edges; // indices into net.edges
    std::vector<int> qrow_of_node;                       // node index -> qset row or -1

    int qrow(const std::string& id) const {
        for (size_t i = 0; i < net.nodes.size(); ++i)
            if (net.nodes[i].id == id) return qrow_of_node[i];
        return -1;
    }
    const Node& node(const std::string& id) const {
        for (const auto& nd : net.nodes)
            if (nd.id == id) return nd;
        throw Error("unknown node id: " + id);
    }
};

} // namespace

NetworkDAE build_network(const GasNetwork& net, const GasState& gs) {
    // Structural validation.
    for (const auto& e : net.edges)
        if (e.from == e.to)
            throw Error("self-loop on node " + e.from + " is not allowed");
    {
        std::map<std::string, int> index;
        for (size_t i = 0; i < net.nodes.size(); ++i) index[net.nodes[i].id] = static_cast<int>(i);
        std::vector<std::vector<int>> adj(net.nodes.size());
        for (const auto& e : net.edges) {
            auto itf = index.find(e.from), itt = index.find(e.to);
            if (itf == index.end() || itt == index.end())
                throw ParseError("edge " + e.id + " references an unknown node");
            adj[itf->second].push_back(itt->second);
            adj[itt->second].push_back(itf->second);
        }
        if (!net.nodes.empty()) {
            std::vector<bool> seen(net.nodes.size(), false);
            std::queue<int> bfs;
            bfs.push(0);
            seen[0] = true;
            while (!bfs.empty()) {
                int v = bfs.front();
                bfs.pop();
                for (int w : adj[v])
                    if (!seen[w]) {
                        seen[w] = true;
                        bfs.push(w);
                    }
            }
            if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }))
                throw DisconnectedGraph("gas network graph is not connected");
        }
    }
    for (const auto& nd : net.nodes)
        if (nd.type == NodeType::Pressure && nd.setpoint.empty())
            throw MissingBoundaryData("pressure node " + nd.id + " has no p_set data");

    auto ctx = std::make_shared<NetContext>();
    ctx->net = net;
    ctx->gas = gs;
    ctx->inc = incidence_matrices(net);

    ctx->qrow_of_node.assign(net.nodes.size(), -1);
    for (size_t r = 0; r < ctx->inc.qset_nodes.size(); ++r)
        ctx->qrow_of_node[static_cast<size_t>(ctx->inc.qset_nodes[r])] = static_cast<int>(r);

    for (size_t i = 0; i < net.edges.size(); ++i) {
        switch (net.edges[i].type) {
            case EdgeType::Pipe: ctx->pipe_edges.push_back(static_cast<int>(i)); break;
            case EdgeType::Valve: ctx->valve_edges.push_back(static_cast<int>(i)); break;
            case EdgeType::Regulator: ctx->reg_edges.push_back(static_cast<int>(i)); break;
        }
    }

    NetworkLayout& lay = ctx->lay;
    lay.n_qset = static_cast<int>(ctx->inc.qset_nodes.size());
    lay.n_pip = static_cast<int>(ctx->pipe_edges.size());
    lay.n_val = static_cast<int>(ctx->valve_edges.size());
    lay.n_reg = static_cast<int>(ctx->reg_edges.size());
    for (int qi : ctx->inc.qset_nodes) lay.qset_ids.push_back(net.nodes[static_cast<size_t>(qi)].id);

    lay.x_rho = 0;
    lay.x_qpl = lay.n_qset;
    lay.x_qval = lay.x_qpl + lay.n_pip;
    lay.x_qreg = lay.x_qval + lay.n_val;
    lay.x_qpr = lay.x_qreg + lay.n_reg;
    lay.x_p = lay.x_qpr + lay.n_pip;
    lay.n = lay.x_p + lay.n_qset;

    const int pb_rows = net.models.f_pb ? net.models.f_pb_rows : 0;
    const int qb_rows = net.models.f_qb ? net.models.f_qb_rows : 0;
    lay.r_mass = 0;
    lay.r_mom = lay.n_pip;
    lay.r_val = lay.r_mom + lay.n_pip;
    lay.r_reg = lay.r_val + lay.n_val;
    lay.r_kirchhoff = lay.r_reg + lay.n_reg;
    lay.r_eos = lay.r_kirchhoff + lay.n_qset;
    lay.r_pb = lay.r_eos + lay.n_qset;
    lay.r_qb = lay.r_pb + pb_rows;
    lay.m = lay.r_qb + qb_rows;

    // Diagonal data.
    const double RsT0 = gs.R_s * gs.T0;
    Vector Dq(lay.n_pip), Dp(lay.n_pip);
    for (int k = 0; k < lay.n_pip; ++k) {
        const auto& pp = net.edges[static_cast<size_t>(ctx->pipe_edges[static_cast<size_t>(k)])].pipe;
        if (!(pp.area > 0.0) || !(pp.length > 0.0))
            throw Error("pipe area and length must be positive");
        Dq(k) = RsT0 / pp.area / pp.length;
        Dp(k) = pp.area / pp.length;
    }

    Matrix A = Matrix::Zero(lay.m, lay.n);
    Matrix B = Matrix::Zero(lay.m, lay.n);

    A.block(lay.r_mass, lay.x_rho, lay.n_pip, lay.n_qset) = ctx->inc.pip_r.transpose();
    A.block(lay.r_mom, lay.x_qpl, lay.n_pip, lay.n_pip) =
        Matrix::Identity(lay.n_pip, lay.n_pip);
    for (int k = 0; k < lay.n_val; ++k)
        A(lay.r_val + k, lay.x_qval + k) =
            net.edges[static_cast<size_t>(ctx->valve_edges[static_cast<size_t>(k)])].mu;
    for (int k = 0; k < lay.n_reg; ++k)
        A(lay.r_reg + k, lay.x_qreg + k) =
            net.edges[static_cast<size_t>(ctx->reg_edges[static_cast<size_t>(k)])].mu;

    B.block(lay.r_mass, lay.x_qpl, lay.n_pip, lay.n_pip) = Matrix(-Dq.asDiagonal());
    B.block(lay.r_mass, lay.x_qpr, lay.n_pip, lay.n_pip) = Matrix(Dq.asDiagonal());
    B.block(lay.r_mom, lay.x_p, lay.n_pip, lay.n_qset) =
        Dp.asDiagonal() * (ctx->inc.pip_r.transpose() + ctx->inc.pip_l.transpose());
    B.block(lay.r_kirchhoff, lay.x_qpl, lay.n_qset, lay.n_pip) = ctx->inc.pip_l;
    B.block(lay.r_kirchhoff, lay.x_qval, lay.n_qset, lay.n_val) = ctx->inc.val;
    B.block(lay.r_kirchhoff, lay.x_qreg, lay.n_qset, lay.n_reg) = ctx->inc.reg;
    B.block(lay.r_kirchhoff, lay.x_qpr, lay.n_qset, lay.n_pip) = ctx->inc.pip_r;
    B.block(lay.r_eos, lay.x_rho, lay.n_qset, lay.n_qset) =
        Matrix::Identity(lay.n_qset, lay.n_qset);
    ctx->B = B;

    // Built-in edge closures (documented defaults): boundary-pressure terms,
    // quadratic friction against the right-node density, and gravity for
    // pipes; pressure-difference driving for valves and regulators.
    auto p_at = [ctx](const Vector& x, const std::string& node_id, double t) -> double {
        const int row = ctx->qrow(node_id);
        if (row >= 0) return x(ctx->lay.x_p + row);
        return ctx->node(node_id).setpoint(t);
    };
    auto rho_state_at = [ctx, RsT0](const Vector& x, const std::string& node_id,
                                    double t) -> double {
        const int row = ctx->qrow(node_id);
        if (row >= 0) return x(ctx->lay.x_rho + row);
        const double pset = ctx->node(node_id).setpoint(t);
        return equation_of_state(ctx->gas, pset).second; // phi(p) = R_s T0 rho
    };

    auto f_pip_default = [ctx, RsT0, p_at, rho_state_at](const Vector& x, double t) -> Vector {
        Vector out(ctx->lay.n_pip);
        for (int k = 0; k < ctx->lay.n_pip; ++k) {
            const Edge& e =
                ctx->net.edges[static_cast<size_t>(ctx->pipe_edges[static_cast<size_t>(k)])];
            const auto& pp = e.pipe;
            const double varrho = rho_state_at(x, e.to, t); // phi(p) at the right node
            const double rho = varrho / RsT0;
            const double q = x(ctx->lay.x_qpl + k);
            double v = pp.area * rho * kGravity * std::sin(pp.slope_angle);
            v += 0.5 * pp.friction / (pp.diameter * pp.area) * q * std::abs(q) / rho;
            // Boundary pressure share of D_p (A_r' + A_l') p for non-state nodes.
            const int row_r = ctx->qrow(e.to);
            const int row_l = ctx->qrow(e.from);
            const double dpl = pp.area / pp.length;
            if (row_r < 0) v += dpl * ctx->node(e.to).setpoint(t);
            if (row_l < 0) v -= dpl * ctx->node(e.from).setpoint(t);
            out(k) = v;
        }
        return out;
    };
    auto f_val_default = [ctx, p_at](const Vector& x, double t) -> Vector {
        Vector out(ctx->lay.n_val);
        for (int k = 0; k < ctx->lay.n_val; ++k) {
            const Edge& e =
                ctx->net.edges[static_cast<size_t>(ctx->valve_edges[static_cast<size_t>(k)])];
            const double open = e.control.empty() ? 1.0 : e.control(t);
            out(k) = -(p_at(x, e.from, t) - p_at(x, e.to, t)) * open;
        }
        return out;
    };
    auto f_reg_default = [ctx, p_at](const Vector& x, double t) -> Vector {
        Vector out(ctx->lay.n_reg);
        for (int k = 0; k < ctx->lay.n_reg; ++k) {
            const Edge& e =
                ctx->net.edges[static_cast<size_t>(ctx->reg_edges[static_cast<size_t>(k)])];
            const double target = e.control.empty() ? 0.0 : e.control(t);
            out(k) = target - (p_at(x, e.from, t) - p_at(x, e.to, t));
        }
        return out;
    };

    SemilinearDAE dae{Pencil(A, B), nullptr, nullptr, 0.0};
    const EdgeModels models = net.models;
    dae.f = [ctx, models, f_pip_default, f_val_default, f_reg_default](double t,
                                                                       const Vector& x) -> Vector {
        const NetworkLayout& L = ctx->lay;
        Vector f = Vector::Zero(L.m);
        const Vector rho = x.segment(L.x_rho, L.n_qset);
        const Vector qpl = x.segment(L.x_qpl, L.n_pip);
        const Vector qval = x.segment(L.x_qval, L.n_val);
        const Vector qreg = x.segment(L.x_qreg, L.n_reg);
        const Vector qpr = x.segment(L.x_qpr, L.n_pip);
        const Vector p = x.segment(L.x_p, L.n_qset);

        f.segment(L.r_mom, L.n_pip) =
            models.f_pip ? -models.f_pip(rho, qpl, t) : -f_pip_default(x, t);
        if (L.n_val > 0)
            f.segment(L.r_val, L.n_val) =
                models.f_val ? -models.f_val(p, qval, t) : -f_val_default(x, t);
        if (L.n_reg > 0)
            f.segment(L.r_reg, L.n_reg) =
                models.f_reg ? models.f_reg(p, qreg, t) : f_reg_default(x, t);
        for (int r = 0; r < L.n_qset; ++r) {
            const Node& nd = ctx->net.nodes[static_cast<size_t>(ctx->inc.qset_nodes[static_cast<size_t>(r)])];
            f(L.r_kirchhoff + r) = nd.setpoint.empty() ? 0.0 : nd.setpoint(t);
            f(L.r_eos + r) = equation_of_state(ctx->gas, p(r)).second;
        }
        if (models.f_pb) f.segment(L.r_pb, models.f_pb_rows) = models.f_pb(p);
        if (models.f_qb) f.segment(L.r_qb, models.f_qb_rows) = models.f_qb(qpl, qpr, qval, qreg);
        return f;
    };
    // Forward differences handle user-supplied closures; the defaults are
    // smooth enough for that too, so no analytic Jacobian is wired here.
    dae.df_dx = nullptr;

    NetworkDAE out{std::move(dae), lay, ctx->inc};
    return out;
}

namespace {

double unit_factor(const nlohmann::json& units, const std::string& key,
                   const std::map<std::string, double>& table, double dflt) {
    if (!units.contains(key)) return dflt;
    const std::string v = units.at(key).get<std::string>();
    auto it = table.find(v);
    if (it == table.end()) throw ParseError("unsupported unit '" + v + "' for " + key);
    return it->second;
}

TimeSeries parse_series(const nlohmann::json& j, double value_factor) {
    TimeSeries ts;
    for (const auto& pt : j) {
        if (!pt.is_array() || pt.size() != 2)
            throw ParseError("time series breakpoints must be [t, value] pairs");
        ts.points.emplace_back(pt[0].get<double>(), pt[1].get<double>() * value_factor);
    }
    if (ts.points.empty()) throw ParseError("time series must have at least one breakpoint");
    for (size_t i = 1; i < ts.points.size(); ++i)
        if (!(ts.points[i].first > ts.points[i - 1].first))
            throw ParseError("time series breakpoints must be strictly increasing");
    return ts;
}

} // namespace

GasNetwork load_network_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& ex) {
        throw ParseError(std::string("network json: ") + ex.what());
    }
    GasNetwork net;
    const nlohmann::json units = j.value("units", nlohmann::json::object());
    const double f_p = unit_factor(units, "pressure", {{"Pa", 1.0}, {"bar", 1e5}}, 1.0);
    const double f_q = unit_factor(units, "flow", {{"kg/s", 1.0}}, 1.0);
    const double f_len = unit_factor(units, "length", {{"m", 1.0}, {"km", 1e3}}, 1.0);
    const double f_ang =
        unit_factor(units, "angle", {{"rad", 1.0}, {"deg", M_PI / 180.0}}, 1.0);

    if (!j.contains("gas")) throw ParseError("network json: missing 'gas' object");
    net.gas.R_s = j["gas"].at("R_s").get<double>();
    net.gas.T0 = j["gas"].at("T0").get<double>();
    net.gas.alpha = j["gas"].value("alpha", 0.0);

    if (!j.contains("nodes") || !j.contains("edges"))
        throw ParseError("network json: missing 'nodes' or 'edges'");
    for (const auto& nj : j["nodes"]) {
        Node nd;
        nd.id = nj.at("id").get<std::string>();
        const std::string type = nj.at("type").get<std::string>();
        if (type == "pressure") {
            nd.type = NodeType::Pressure;
            if (!nj.contains("p_set"))
                throw MissingBoundaryData("pressure node " + nd.id + " has no p_set data");
            nd.setpoint = parse_series(nj["p_set"], f_p);
        } else if (type == "flow") {
            nd.type = NodeType::Flow;
            if (nj.contains("q_set")) nd.setpoint = parse_series(nj["q_set"], f_q);
        } else {
            throw ParseError("node " + nd.id + ": unknown type '" + type + "'");
        }
        net.nodes.push_back(std::move(nd));
    }
    for (const auto& ej : j["edges"]) {
        Edge e;
        e.id = ej.at("id").get<std::string>();
        e.from = ej.at("from").get<std::string>();
        e.to = ej.at("to").get<std::string>();
        const std::string type = ej.at("type").get<std::string>();
        if (e.from == e.to) throw ParseError("edge " + e.id + " is a self-loop");
        if (type == "pipe") {
            e.type = EdgeType::Pipe;
            e.pipe.length = ej.at("L").get<double>() * f_len;
            e.pipe.diameter = ej.at("D").get<double>();
            e.pipe.area = ej.contains("S") ? ej["S"].get<double>()
                                           : M_PI * e.pipe.diameter * e.pipe.diameter / 4.0;
            e.pipe.friction = ej.value("lambda_fr", 0.0);
            e.pipe.slope_angle = ej.value("theta", 0.0) * f_ang;
        } else if (type == "valve") {
            e.type = EdgeType::Valve;
            e.mu = ej.value("mu", 0.0);
            if (ej.contains("open")) e.control = parse_series(ej["open"], 1.0);
        } else if (type == "regulator") {
            e.type = EdgeType::Regulator;
            e.mu = ej.value("mu", 0.0);
            if (ej.contains("dp_set")) e.control = parse_series(ej["dp_set"], f_p);
        } else {
            throw ParseError("edge " + e.id + ": unknown type '" + type + "'");
        }
        net.edges.push_back(std::move(e));
    }
    return net;
}

GasNetwork load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_network_json(ss.str());
}

} // namespace daekit::gasnet

#include "daekit/cli.hpp"

#include "daekit/decomp.hpp"
#include "daekit/expr.hpp"
#include "daekit/fixtures.hpp"
#include "daekit/gasnet.hpp"
#include "daekit/integrate.hpp"
#include "daekit/qualitative.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace daekit::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitIndexTooHigh = 2;
constexpr int kExitParse = 3;
constexpr int kExitEscape = 4;
constexpr int kExitConstraint = 5;
constexpr int kExitUsage = 64;

int log_level() {
    const char* env = std::getenv("DAEKIT_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "daekit: " << msg << "\n";
}
void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "daekit[debug]: " << msg << "\n";
}

struct CommonOpts {
    double tol_rank = 1e-10;
    double tol_newton = 1e-10;
    double tol_constraint = 1e-8;
    double atol = 1e-10;
    double rtol = 1e-10;
    double horizon = 0.0; // 0 => fixture default
    std::uint64_t seed = 0;
    std::string out = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--tol-rank", o.tol_rank, "rank decision tolerance");
    cmd->add_option("--tol-newton", o.tol_newton, "algebraic solve tolerance");
    cmd->add_option("--tol-constraint", o.tol_constraint, "overdetermined residual tolerance");
    cmd->add_option("--atol", o.atol, "absolute step error tolerance");
    cmd->add_option("--rtol", o.rtol, "relative step error tolerance");
    cmd->add_option("--horizon", o.horizon, "integration horizon");
    cmd->add_option("--seed", o.seed, "sampling seed");
    cmd->add_option("--out", o.out, "output directory");
}

std::filesystem::path ensure_out(const std::string& out) {
    std::filesystem::path dir(out);
    std::filesystem::create_directories(dir);
    return dir;
}

StepOptions step_options(const CommonOpts& o) {
    StepOptions s;
    s.atol = o.atol;
    s.rtol = o.rtol;
    s.constraint_tol = o.tol_constraint;
    s.newton.tol = o.tol_newton;
    return s;
}

int status_exit(const Trajectory& traj) {
    switch (traj.status) {
        case TrajectoryStatus::CompletedHorizon: return kExitOk;
        case TrajectoryStatus::EscapeDetected: {
            std::ostringstream os;
            os.precision(10);
            os << "escape detected, bracket [" << traj.escape_lo << ", " << traj.escape_hi << "]";
            std::cerr << os.str() << "\n";
            return kExitEscape;
        }
        case TrajectoryStatus::ConstraintViolation:
            std::cerr << "constraint violation at t=" << traj.status_time << "\n";
            return kExitConstraint;
        case TrajectoryStatus::SolverFailure:
            std::cerr << "solver failure at t=" << traj.status_time << ": " << traj.message
                      << "\n";
            return kExitRuntime;
    }
    return kExitRuntime;
}

// ----------------------------------------------------------------- decompose

int cmd_decompose(const std::string& a_path, const std::string& b_path, const CommonOpts& o,
                  double tol_validate) {
    const Matrix A = read_matrix_file(a_path);
    const Matrix B = read_matrix_file(b_path);
    Pencil p(A, B);
    const int rank = pencil_rank(p, 8, o.tol_rank);
    const PencilClass cls = classify_pencil(p, rank);
    log_info("pencil " + std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + " rank " +
             std::to_string(rank) + (cls.tag == PencilTag::Regular ? " (regular)" : " (singular)"));

    PencilDecomposition dec = decompose(p, o.tol_rank);
    ValidationReport rep = validate_decomposition(p, dec, tol_validate);

    const auto dir = ensure_out(o.out);
    write_decomposition_file((dir / "decomposition.txt").string(), dec);
    std::ofstream vr(dir / "validation.txt");
    vr << rep.summary() << "\n";
    for (const auto& e : rep.entries) vr << e.name << " " << e.residual << "\n";

    std::cout << "dims=(" << dec.b << "," << dec.l << "," << dec.a << "," << dec.d
              << ") index=" << dec.regular_index << "\n";
    std::cout << "rank=" << rank << " class="
              << (cls.tag == PencilTag::Regular ? "Regular" : "Singular") << "\n";
    std::cout << "validation: " << rep.summary() << "\n";
    return rep.passed() ? kExitOk : kExitRuntime;
}

// ------------------------------------------------------------------ simulate

struct LoadedDae {
    SemilinearDAE dae;
    PencilDecomposition dec;
    Vector x0;
    FreeComponent phi;
    double horizon = 10.0;
    double t0 = 0.0;
};

LoadedDae load_dae_spec(const std::string& path, double tol_rank) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open DAE spec file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw ParseError(std::string("DAE spec json: ") + ex.what());
    }

    auto to_matrix = [](const nlohmann::json& rows) {
        const auto m = rows.size();
        if (m == 0) throw ParseError("matrix must be nonempty");
        const auto n = rows[0].size();
        Matrix M(m, n);
        for (size_t i = 0; i < m; ++i) {
            if (rows[i].size() != n) throw ParseError("ragged matrix rows");
            for (size_t k = 0; k < n; ++k) M(i, k) = rows[i][k].get<double>();
        }
        return M;
    };
    const Matrix A = to_matrix(j.at("A"));
    const Matrix B = to_matrix(j.at("B"));
    Pencil pencil(A, B);
    const Eigen::Index n = pencil.cols();

    std::vector<std::string> allowed = {"t"};
    for (Eigen::Index i = 1; i <= n; ++i) allowed.push_back("x" + std::to_string(i));
    std::vector<expr::Expression> f_exprs;
    for (const auto& fe : j.at("f")) f_exprs.push_back(expr::parse(fe.get<std::string>(), allowed));
    if (static_cast<Eigen::Index>(f_exprs.size()) != pencil.rows())
        throw ParseError("f must have one expression per equation row");

    LoadedDae out{SemilinearDAE{pencil, nullptr, nullptr, 0.0}, decompose(pencil, tol_rank),
                  Vector::Zero(n), FreeComponent{}, j.value("horizon", 10.0),
                  j.value("t0", 0.0)};
    out.dae.t_plus = out.t0;
    out.dae.f = [f_exprs](double t, const Vector& x) -> Vector {
        Vector f(f_exprs.size());
        for (size_t i = 0; i < f_exprs.size(); ++i)
            f(static_cast<Eigen::Index>(i)) = expr::eval_tx(f_exprs[i], t, x);
        return f;
    };

    if (j.contains("x0")) {
        const auto& x0j = j.at("x0");
        if (static_cast<Eigen::Index>(x0j.size()) != n) throw ParseError("x0 length mismatch");
        for (Eigen::Index i = 0; i < n; ++i) out.x0(i) = x0j[static_cast<size_t>(i)].get<double>();
    }

    // Optional free-component coordinate expressions in t (anchored so that
    // phi_s2(t0) = S2 x0).
    if (j.contains("phi_s2") && out.dec.l > 0) {
        std::vector<expr::Expression> phis;
        for (const auto& pe : j.at("phi_s2"))
            phis.push_back(expr::parse(pe.get<std::string>(), {"t"}));
        if (static_cast<int>(phis.size()) != out.dec.l)
            throw ParseError("phi_s2 needs one expression per underdetermined coordinate");
        const Matrix Sl = out.dec.Sl;
        const double t0 = out.t0;
        const Vector anchor = out.dec.S2 * out.x0;
        out.phi.phi_s2 = [phis, Sl, t0, anchor](double t) -> Vector {
            Vector c(static_cast<Eigen::Index>(phis.size())), c0(static_cast<Eigen::Index>(phis.size()));
            for (size_t i = 0; i < phis.size(); ++i) {
                c(static_cast<Eigen::Index>(i)) = phis[i].eval({{"t", t}});
                c0(static_cast<Eigen::Index>(i)) = phis[i].eval({{"t", t0}});
            }
            return anchor + Sl * (c - c0);
        };
        out.phi.description = "user expressions (anchored at S2 x0)";
    } else {
        const Vector anchor = out.dec.S2 * out.x0;
        out.phi.phi_s2 = [anchor](double) { return anchor; };
        out.phi.description = "constant S2 x0";
    }
    return out;
}

LoadedDae load_dae_target(const std::string& target, double tol_rank) {
    if (fixtures::is_dae_fixture(target)) {
        auto fx = fixtures::dae_fixture(target);
        return LoadedDae{std::move(fx.dae), std::move(fx.dec), std::move(fx.x0),
                         std::move(fx.phi), fx.default_horizon, 0.0};
    }
    return load_dae_spec(target, tol_rank);
}

int cmd_simulate(const std::string& target, const CommonOpts& o) {
    LoadedDae ld = load_dae_target(target, o.tol_rank);
    const double horizon = o.horizon > 0.0 ? o.horizon : ld.horizon;

    ReducedSystem rs = build_reduced_system(ld.dae, ld.dec);
    NewtonOptions newton;
    newton.tol = o.tol_newton;
    const Vector x0 = consistent_initialization(rs, ld.t0, ld.dec.S1 * ld.x0,
                                                ld.dec.S2 * ld.x0, ld.dec.P1 * ld.x0, newton);
    log_debug("consistent x0 obtained");

    StepOptions sopts = step_options(o);
    Trajectory traj = integrate(rs, ld.t0, x0, ld.phi, ld.t0 + horizon, sopts);

    const auto dir = ensure_out(o.out);
    write_trajectory_csv_file((dir / "trajectory.csv").string(), traj);
    log_info("trajectory: " + std::to_string(traj.times.size()) + " samples, status " +
             to_string(traj.status));
    return status_exit(traj);
}

// ------------------------------------------------------------------ classify

struct ChiSpec {
    std::string k_text = "1";
    std::string u_text = "v";
};

ChiSpec parse_chi(const std::string& text) {
    // Format: "k=<expr>,U=<expr>" (either part optional).
    ChiSpec spec;
    size_t kpos = text.find("k=");
    size_t upos = text.find("U=");
    if (kpos == std::string::npos && upos == std::string::npos)
        throw ParseError("chi spec must look like \"k=<expr>,U=<expr>\"");
    if (kpos != std::string::npos) {
        size_t end = upos != std::string::npos && upos > kpos ? text.rfind(',', upos) : text.size();
        spec.k_text = text.substr(kpos + 2, end - (kpos + 2));
    }
    if (upos != std::string::npos) {
        size_t end = kpos != std::string::npos && kpos > upos ? text.rfind(',', kpos) : text.size();
        spec.u_text = text.substr(upos + 2, end - (upos + 2));
    }
    return spec;
}

int cmd_classify(const std::string& target, const std::string& v_spec, const std::string& chi_spec,
                 double R, int samples, const std::string& omega_spec, double range_lo,
                 double range_hi, double t_hi, const CommonOpts& o) {
    LoadedDae ld = load_dae_target(target, o.tol_rank);
    ReducedSystem rs = build_reduced_system(ld.dae, ld.dec);
    const int b = ld.dec.b, l = ld.dec.l, a = ld.dec.a;

    // --V quadratic:h1[,h2,...]  (diagonal weight on the (w, z) coordinates)
    QuadraticLyapunov V;
    if (v_spec.rfind("quadratic:", 0) != 0)
        throw ParseError("only quadratic:<diag> lyapunov specs are supported");
    {
        std::vector<double> diag;
        std::stringstream ss(v_spec.substr(10));
        std::string item;
        while (std::getline(ss, item, ',')) diag.push_back(std::stod(item));
        const int dim = b + a;
        Vector h = Vector::Ones(dim);
        if (static_cast<int>(diag.size()) == 1)
            h *= diag[0];
        else if (static_cast<int>(diag.size()) == dim)
            for (int i = 0; i < dim; ++i) h(i) = diag[static_cast<size_t>(i)];
        else
            throw ParseError("lyapunov diag needs 1 or b+a entries");
        const Matrix H = h.asDiagonal();
        V.H = [H](double) { return H; };
    }

    ChiSpec cs = parse_chi(chi_spec);
    auto k_expr = expr::parse(cs.k_text, {"t"});
    auto u_expr = expr::parse(cs.u_text, {"v"});
    ComparisonInequality chi;
    chi.k = [k_expr](double t) { return k_expr.eval({{"t", t}}); };
    chi.U = [u_expr](double v) { return u_expr.eval({{"v", v}}); };

    ManifoldSampler sampler;
    sampler.s1_lo = Vector::Constant(b, range_lo);
    sampler.s1_hi = Vector::Constant(b, range_hi);
    sampler.s2_lo = Vector::Constant(l, range_lo);
    sampler.s2_hi = Vector::Constant(l, range_hi);
    sampler.p1_lo = Vector::Constant(a, range_lo);
    sampler.p1_hi = Vector::Constant(a, range_hi);
    sampler.R = R;
    sampler.count = samples;
    sampler.seed = o.seed;
    sampler.t_lo = ld.t0;
    sampler.t_hi = t_hi > ld.t0 ? t_hi : ld.t0 + 10.0;

    if (!omega_spec.empty()) {
        std::vector<std::string> names;
        for (int i = 1; i <= b; ++i) names.push_back("w" + std::to_string(i));
        for (int i = 1; i <= a; ++i) names.push_back("z" + std::to_string(i));
        auto om = expr::parse(omega_spec, names);
        sampler.omega = [om, b, a](const Vector& w, const Vector& z) {
            std::map<std::string, double> vars;
            for (int i = 0; i < b; ++i) vars["w" + std::to_string(i + 1)] = w(i);
            for (int i = 0; i < a; ++i) vars["z" + std::to_string(i + 1)] = z(i);
            return om.eval(vars) >= 0.0;
        };
    }

    ClassifyOptions copts;
    copts.newton.tol = o.tol_newton;
    ClassifyResult res = classify_dae(rs, V, chi, sampler, copts);

    const auto dir = ensure_out(o.out);
    std::ofstream rf(dir / "classify_report.txt");
    rf << res.report_text();
    std::cout << to_string(res.verdict) << "\n";
    return kExitOk;
}

// -------------------------------------------------------------------- gasnet

int cmd_gasnet_simulate(const std::string& target, double dx_max, const CommonOpts& o) {
    gasnet::GasNetwork net;
    if (fixtures::is_network_fixture(target))
        net = gasnet::load_network_json(fixtures::network_fixture_json(target));
    else
        net = gasnet::load_network_file(target);

    if (dx_max > 0.0) net = gasnet::segment_pipes(net, dx_max);
    gasnet::NetworkDAE nd = gasnet::build_network(net, net.gas);
    log_info("network DAE " + std::to_string(nd.layout.m) + "x" + std::to_string(nd.layout.n));

    PencilDecomposition dec = decompose(nd.dae.pencil, o.tol_rank);
    const int rank = pencil_rank(nd.dae.pencil, 8, o.tol_rank);
    const PencilClass cls = classify_pencil(nd.dae.pencil, rank);
    std::cout << "pencil: " << (cls.tag == PencilTag::Regular ? "Regular" : "Singular")
              << " rank=" << rank << " dims=(" << dec.b << "," << dec.l << "," << dec.a << ","
              << dec.d << ") index=" << dec.regular_index << "\n";

    // Initial guess: pressures from the first pressure setpoint, flows at zero.
    const auto& lay = nd.layout;
    double p_guess = 0.0;
    int n_press = 0;
    for (const auto& node : net.nodes)
        if (node.type == gasnet::NodeType::Pressure) {
            p_guess += node.setpoint(0.0);
            ++n_press;
        }
    p_guess = n_press > 0 ? p_guess / n_press : 1e5;
    Vector xg = Vector::Zero(lay.n);
    for (int r = 0; r < lay.n_qset; ++r) {
        xg(lay.x_p + r) = p_guess;
        xg(lay.x_rho + r) = gasnet::equation_of_state(net.gas, p_guess).second;
    }

    ReducedSystem rs = build_reduced_system(nd.dae, dec);
    NewtonOptions newton;
    newton.tol = o.tol_newton;
    newton.max_iter = 200;
    const Vector x0 =
        consistent_initialization(rs, 0.0, dec.S1 * xg, dec.S2 * xg, dec.P1 * xg, newton);

    const double horizon = o.horizon > 0.0 ? o.horizon : 3600.0;
    StepOptions sopts = step_options(o);
    sopts.newton = newton;
    FreeComponent phi;
    if (dec.l > 0) {
        const Vector anchor = dec.S2 * x0;
        phi.phi_s2 = [anchor](double) { return anchor; };
        phi.description = "constant S2 x0";
    }
    Trajectory traj = integrate(rs, 0.0, x0, phi, horizon, sopts);

    // Kirchhoff residual and steady-state diagnostics.
    double kirchhoff_max = 0.0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const Vector fv = nd.dae.f(traj.times[i], traj.states[i]);
        kirchhoff_max = std::max(
            kirchhoff_max, lay.kirchhoff_residual(nd.dae.pencil.B(), fv, traj.states[i])
                               .cwiseAbs()
                               .maxCoeff());
    }
    double final_rate = std::numeric_limits<double>::quiet_NaN();
    if (traj.times.size() >= 2) {
        const size_t k = traj.times.size() - 1;
        const double dt = traj.times[k] - traj.times[k - 1];
        if (dt > 0.0) final_rate = ((traj.states[k] - traj.states[k - 1]) / dt).norm();
    }

    const auto dir = ensure_out(o.out);
    write_trajectory_csv_file((dir / "trajectory.csv").string(), traj);
    std::ofstream rf(dir / "gasnet_report.txt");
    rf << "status: " << to_string(traj.status) << "\n";
    rf << "samples: " << traj.times.size() << "\n";
    rf << "kirchhoff_max_residual: " << kirchhoff_max << "\n";
    rf << "final_state_rate: " << final_rate << "\n";
    std::cout << "kirchhoff_max_residual=" << kirchhoff_max << " final_state_rate=" << final_rate
              << "\n";
    return status_exit(traj);
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"daekit: block decomposition, reduction, integration and qualitative analysis "
                 "of semilinear DAEs, with isothermal gas-network models"};
    app.require_subcommand(1);

    CommonOpts o;

    // decompose
    auto* dcmd = app.add_subcommand("decompose", "decompose a pencil given as two matrix files");
    std::string a_path, b_path;
    double tol_validate = 1e-9;
    dcmd->add_option("--A", a_path, "matrix A file")->required();
    dcmd->add_option("--B", b_path, "matrix B file")->required();
    dcmd->add_option("--tol-validate", tol_validate, "validation tolerance");
    add_common(dcmd, o);

    // simulate
    auto* scmd = app.add_subcommand("simulate", "integrate a DAE fixture or spec file");
    std::string sim_target;
    scmd->add_option("target", sim_target, "fixture name or DAE spec json")->required();
    add_common(scmd, o);

    // classify
    auto* ccmd = app.add_subcommand("classify", "qualitative classification of a DAE");
    std::string cls_target, v_spec, chi_spec, omega_spec;
    double R = 1.0, range_lo = -10.0, range_hi = 10.0, t_hi = 0.0;
    int samples = 10000;
    ccmd->add_option("target", cls_target, "fixture name or DAE spec json")->required();
    ccmd->add_option("--V", v_spec, "lyapunov spec, e.g. quadratic:1")->required();
    ccmd->add_option("--chi", chi_spec, "comparison spec, e.g. \"k=1,U=v\"")->required();
    ccmd->add_option("--R", R, "inner radius for the upper-bound region");
    ccmd->add_option("--samples", samples, "manifold sample count");
    ccmd->add_option("--omega", omega_spec, "region predicate expr >= 0 over w1..,z1..");
    ccmd->add_option("--range-lo", range_lo, "sample box lower bound");
    ccmd->add_option("--range-hi", range_hi, "sample box upper bound");
    ccmd->add_option("--t-hi", t_hi, "sample time upper bound");
    add_common(ccmd, o);

    // gasnet
    auto* gcmd = app.add_subcommand("gasnet", "gas network commands");
    auto* gsim = gcmd->add_subcommand("simulate", "assemble and integrate a network");
    std::string net_target;
    double dx_max = 0.0;
    gsim->add_option("target", net_target, "network json file or fixture name")->required();
    gsim->add_option("--dx-max", dx_max, "maximum pipe segment length before splitting");
    add_common(gsim, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (dcmd->parsed()) return cmd_decompose(a_path, b_path, o, tol_validate);
        if (scmd->parsed()) {
            if (scmd->count("--horizon") > 0 && !(o.horizon > 0.0)) {
                std::cerr << "horizon must be positive\n";
                return kExitUsage;
            }
            return cmd_simulate(sim_target, o);
        }
        if (ccmd->parsed())
            return cmd_classify(cls_target, v_spec, chi_spec, R, samples, omega_spec, range_lo,
                                range_hi, t_hi, o);
        if (gcmd->parsed() && gsim->parsed()) {
            if (gsim->count("--horizon") > 0 && !(o.horizon > 0.0)) {
                std::cerr << "horizon must be positive\n";
                return kExitUsage;
            }
            return cmd_gasnet_simulate(net_target, dx_max, o);
        }
        std::cerr << "no command given\n";
        return kExitUsage;
    } catch (const IndexTooHigh& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIndexTooHigh;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const MissingBoundaryData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace daekit::cli

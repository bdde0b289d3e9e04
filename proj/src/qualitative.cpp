#include "daekit/qualitative.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace daekit {

namespace {

Vector stack(const Vector& w, const Vector& z) {
    Vector out(w.size() + z.size());
    if (w.size() > 0) out.head(w.size()) = w;
    if (z.size() > 0) out.tail(z.size()) = z;
    return out;
}

} // namespace

void validate_lyapunov(const QuadraticLyapunov& V, int b, int a, double t_lo, double t_hi) {
    if (!V.configured()) throw Error("lyapunov function not configured");
    const int nsamp = 5;
    for (int i = 0; i < nsamp; ++i) {
        const double t = t_lo + (t_hi - t_lo) * double(i) / double(nsamp - 1 > 0 ? nsamp - 1 : 1);
        const Matrix H = V.H(t);
        if (H.rows() != b + a || H.cols() != b + a)
            throw ShapeMismatch("lyapunov weight has wrong shape");
        if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + H.cwiseAbs().maxCoeff()))
            throw Error("lyapunov weight must be symmetric");
        if (b > 0 && a > 0) {
            if (H.topRightCorner(b, a).cwiseAbs().maxCoeff() > 0.0 ||
                H.bottomLeftCorner(a, b).cwiseAbs().maxCoeff() > 0.0)
                throw Error("lyapunov weight must be block-diagonal over (X_s1, X_1)");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(H);
        if (H.rows() > 0 && es.eigenvalues().minCoeff() <= 0.0)
            throw Error("lyapunov weight must be positive definite");
    }
}

double lyapunov_value(const ReducedSystem& rs, const QuadraticLyapunov& V, double t,
                      const Vector& x) {
    const Vector omega = stack(rs.w_coords(x), rs.z_coords(x));
    return omega.dot(V.H(t) * omega);
}

double lyapunov_derivative(const ReducedSystem& rs, const QuadraticLyapunov& V, double t,
                           const Vector& x) {
    const Vector omega = stack(rs.w_coords(x), rs.z_coords(x));
    const Vector upsilon = stack(rs.w_rhs_coords(t, x), rs.z_rhs_coords(t, x));
    double out = 2.0 * omega.dot(V.H(t) * upsilon);
    if (V.dH_dt) out += omega.dot(V.dH_dt(t) * omega);
    return out;
}

std::string to_string(ComparisonVerdict v) {
    switch (v) {
        case ComparisonVerdict::NoFiniteEscape: return "NoFiniteEscape";
        case ComparisonVerdict::BoundedForAllTime: return "BoundedForAllTime";
        case ComparisonVerdict::FiniteEscapeCriterion: return "FiniteEscapeCriterion";
        case ComparisonVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

enum class TailClass { Divergent, Convergent, Ambiguous };

// Composite Simpson on a log-spaced decade grid.
double decade_integral(const std::function<double(double)>& g, double lo, double hi) {
    const int panels = 64;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = lo * std::pow(hi / lo, double(i) / panels);
        const double b = lo * std::pow(hi / lo, double(i + 1) / panels);
        const double mid = 0.5 * (a + b);
        acc += (b - a) / 6.0 * (g(a) + 4.0 * g(mid) + g(b));
    }
    return acc;
}

// Classifies the tail of ∫ g over a geometric grid by the ratio of successive
// decade increments: ratios near or above one mean divergence, clearly
// decaying increments mean a convergent tail, the band in between stays
// ambiguous.
TailClass classify_tail(const std::function<double(double)>& g, double lo, double hi,
                        bool* bounded_above = nullptr, double* value = nullptr) {
    std::vector<double> inc;
    double total = 0.0;
    double running_max = 0.0;
    double a = lo;
    while (a < hi) {
        const double b = std::min(a * 10.0, hi);
        const double d = decade_integral(g, a, b);
        if (!std::isfinite(d)) {
            if (bounded_above) *bounded_above = false;
            return TailClass::Ambiguous;
        }
        inc.push_back(d);
        total += d;
        running_max = std::max(running_max, total);
        a = b;
    }
    if (value) *value = total;
    if (inc.size() < 3) {
        if (bounded_above) *bounded_above = true;
        return TailClass::Ambiguous;
    }

    // Ratios over the last two decades.
    const double tail_scale = std::abs(inc[inc.size() - 1]);
    const double prev_scale = std::abs(inc[inc.size() - 2]);
    const double tiny = 1e-14 * (1.0 + std::abs(total));
    if (tail_scale < tiny && prev_scale < tiny) {
        if (bounded_above) *bounded_above = true;
        return TailClass::Convergent;
    }
    const double r1 = std::abs(inc[inc.size() - 1]) / std::max(std::abs(inc[inc.size() - 2]), 1e-300);
    const double r2 = std::abs(inc[inc.size() - 2]) / std::max(std::abs(inc[inc.size() - 3]), 1e-300);
    const double r = 0.5 * (r1 + r2);

    const bool positive_tail = inc[inc.size() - 1] > 0.0;
    if (r >= 0.98) {
        if (bounded_above) *bounded_above = !positive_tail;
        return TailClass::Divergent;
    }
    if (r <= 0.9) {
        if (bounded_above) *bounded_above = true;
        return TailClass::Convergent;
    }
    if (bounded_above) *bounded_above = !positive_tail;
    return TailClass::Ambiguous;
}

} // namespace

ComparisonVerdict comparison_classify(const ComparisonInequality& chi, double t0, double v0) {
    if (!(v0 > 0.0)) throw Error("comparison_classify requires v0 > 0");
    if (!chi.U || !chi.k) return ComparisonVerdict::Inconclusive;

    auto inv_u = [&](double v) {
        const double u = chi.U(v);
        return u > 0.0 ? 1.0 / u : std::numeric_limits<double>::quiet_NaN();
    };
    TailClass u_tail = classify_tail(inv_u, v0, chi.v_max);

    bool k_bounded_above = false;
    TailClass k_tail =
        classify_tail(chi.k, std::max(t0, 1e-3), std::max(chi.t_max, 10.0 * std::max(t0, 1e-3)),
                      &k_bounded_above);
    const bool k_finite = (k_tail == TailClass::Convergent) || k_bounded_above;

    if (u_tail == TailClass::Divergent) {
        if (k_finite) return ComparisonVerdict::BoundedForAllTime;
        return ComparisonVerdict::NoFiniteEscape;
    }
    if (u_tail == TailClass::Convergent) {
        if (k_tail == TailClass::Divergent && !k_bounded_above)
            return ComparisonVerdict::FiniteEscapeCriterion;
        return ComparisonVerdict::Inconclusive;
    }
    return ComparisonVerdict::Inconclusive;
}

std::vector<ManifoldPoint> sample_manifold(const ReducedSystem& rs, const ManifoldSampler& sampler,
                                           const NewtonOptions& newton, int* rejected) {
    const auto& dec = rs.dec();
    const int b = dec.b, l = dec.l, a = dec.a;
    auto need = [](const Vector& v, int len, const char* what) {
        if (v.size() != len)
            throw ShapeMismatch(std::string("sampler range has wrong length for ") + what);
    };
    need(sampler.s1_lo, b, "x_s1");
    need(sampler.s1_hi, b, "x_s1");
    need(sampler.s2_lo, l, "x_s2");
    need(sampler.s2_hi, l, "x_s2");
    need(sampler.p1_lo, a, "x_p1");
    need(sampler.p1_hi, a, "x_p1");

    std::mt19937_64 rng(sampler.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](const Vector& lo, const Vector& hi) {
        Vector v(lo.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
        return v;
    };

    std::vector<ManifoldPoint> out;
    int skipped = 0;
    for (int s = 0; s < sampler.count; ++s) {
        const double t = sampler.t_lo + (sampler.t_hi - sampler.t_lo) * unit(rng);
        const Vector w = draw(sampler.s1_lo, sampler.s1_hi);
        const Vector xi = draw(sampler.s2_lo, sampler.s2_hi);
        const Vector z = draw(sampler.p1_lo, sampler.p1_hi);
        if (sampler.s2_predicate && !sampler.s2_predicate(xi)) {
            ++skipped;
            continue;
        }
        const Vector x_s1 = b > 0 ? Vector(dec.Sb * w) : Vector(Vector::Zero(dec.n));
        const Vector x_s2 = l > 0 ? Vector(dec.Sl * xi) : Vector(Vector::Zero(dec.n));
        const Vector x_p1 = a > 0 ? Vector(dec.Pa * z) : Vector(Vector::Zero(dec.n));
        try {
            const Vector x = consistent_initialization(rs, t, x_s1, x_s2, x_p1, newton);
            out.push_back({t, x, w, z});
        } catch (const Error&) {
            ++skipped;
        }
    }
    if (rejected) *rejected = skipped;
    return out;
}

InequalityReport check_inequality_on_manifold(const ReducedSystem& rs, const QuadraticLyapunov& V,
                                              const ComparisonInequality& chi,
                                              const ManifoldSampler& sampler,
                                              BoundDirection direction,
                                              const NewtonOptions& newton) {
    InequalityReport rep;
    auto points = sample_manifold(rs, sampler, newton);
    rep.completed = static_cast<int>(points.size());
    if (points.empty()) throw SamplerEmpty("no sampled point completed to the manifold");

    for (const auto& pt : points) {
        const double omega_norm = std::sqrt(pt.w.squaredNorm() + pt.z.squaredNorm());
        if (direction == BoundDirection::UpperBound) {
            if (omega_norm < sampler.R) continue;
        } else {
            if (sampler.omega && !sampler.omega(pt.w, pt.z)) continue;
        }
        const double v = lyapunov_value(rs, V, pt.t, pt.x);
        if (!(v > 0.0)) continue; // chi is defined for positive v only
        const double vdot = lyapunov_derivative(rs, V, pt.t, pt.x);
        const double bound = chi.k(pt.t) * chi.U(v);
        ++rep.tested;
        const double slack = 1e-9 * (1.0 + std::abs(vdot) + std::abs(bound));
        const double margin =
            direction == BoundDirection::UpperBound ? bound - vdot : vdot - bound;
        rep.worst_margin = rep.tested == 1 ? margin : std::min(rep.worst_margin, margin);
        if (margin < -slack) {
            ++rep.violations;
            if (rep.worst_cases.size() < 32)
                rep.worst_cases.push_back({pt.t, pt.x, vdot, bound});
        }
    }
    return rep;
}

DissipativityReport dissipativity_check(const ReducedSystem& rs, const QuadraticLyapunov& V,
                                        const ManifoldSampler& sampler, DissipativityVariant variant,
                                        const DissipativityParams& params,
                                        const NewtonOptions& newton) {
    DissipativityReport rep;
    auto points = sample_manifold(rs, sampler, newton);
    rep.decay.completed = static_cast<int>(points.size());
    if (points.empty()) throw SamplerEmpty("no sampled point completed to the manifold");
    if (variant == DissipativityVariant::C && !(params.alpha > 0.0))
        throw Error("dissipativity variant c requires alpha > 0");
    if (variant != DissipativityVariant::C && !params.U2)
        throw Error("dissipativity variants a and b require the decay function U2");

    const auto& dec = rs.dec();
    for (const auto& pt : points) {
        const double omega_norm = std::sqrt(pt.w.squaredNorm() + pt.z.squaredNorm());

        // Growth bound ||Q2 f|| <= beta ||(x_s1, x_p1)||.
        if (params.beta > 0.0) {
            const Vector q2f = dec.Q2 * rs.dae().f(pt.t, pt.x);
            const double margin = params.beta * omega_norm - q2f.norm();
            ++rep.growth_tested;
            rep.growth_worst_margin = rep.growth_tested == 1
                                          ? margin
                                          : std::min(rep.growth_worst_margin, margin);
            if (margin < -1e-9 * (1.0 + q2f.norm())) ++rep.growth_violations;
        }

        if (omega_norm < sampler.R) continue;
        const double v = lyapunov_value(rs, V, pt.t, pt.x);
        const double vdot = lyapunov_derivative(rs, V, pt.t, pt.x);
        double bound = 0.0;
        switch (variant) {
            case DissipativityVariant::A: bound = -params.U2(omega_norm); break;
            case DissipativityVariant::B: {
                const Vector omega = stack(pt.w, pt.z);
                const Matrix H = params.H_weight ? params.H_weight(pt.t) : V.H(pt.t);
                bound = -params.U2(omega.dot(H * omega));
                break;
            }
            case DissipativityVariant::C: bound = -params.alpha * v; break;
        }
        ++rep.decay.tested;
        const double slack = 1e-9 * (1.0 + std::abs(vdot) + std::abs(bound));
        const double margin = bound - vdot;
        rep.decay.worst_margin =
            rep.decay.tested == 1 ? margin : std::min(rep.decay.worst_margin, margin);
        if (margin < -slack) {
            ++rep.decay.violations;
            if (rep.decay.worst_cases.size() < 32)
                rep.decay.worst_cases.push_back({pt.t, pt.x, vdot, bound});
        }
    }
    if (params.beta <= 0.0) {
        // Growth bound not configured: treat as tested vacuously so the decay
        // result decides.
        rep.growth_tested = rep.decay.tested;
    }
    return rep;
}

BasisInvertibilityReport basis_invertibility_sample(const ReducedSystem& rs, double t,
                                                    const Vector& x_s1, const Vector& x_s2,
                                                    const Vector& x_p1, const Vector& lo,
                                                    const Vector& hi, int trials,
                                                    std::uint64_t seed) {
    const auto& dec = rs.dec();
    const int d = dec.d;
    if (d < 1) throw Error("basis invertibility requires dim X_2 >= 1");
    BasisInvertibilityReport rep;
    rep.trials = trials;
    rep.min_sigma_ratio = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Vector base = x_s1 + x_s2 + x_p1;
    const Matrix B2inv_phi_scale = rs.b2_matrix(); // for W = B2⁻¹ Phi rows
    Eigen::PartialPivLU<Matrix> b2lu(B2inv_phi_scale);

    for (int trial = 0; trial < trials; ++trial) {
        Matrix Lambda(d, d);
        for (int i = 0; i < d; ++i) {
            const double theta = unit(rng);
            const Vector u = lo + theta * (hi - lo);
            const Vector x = base + dec.P2 * u;
            auto [phi, cond] = rs.phi_matrix(t, x);
            (void)cond;
            const Matrix W = b2lu.solve(phi);
            Lambda.row(i) = W.row(i);
        }
        Eigen::JacobiSVD<Matrix> svd(Lambda);
        const auto& sv = svd.singularValues();
        const double ratio = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
        rep.min_sigma_ratio = std::min(rep.min_sigma_ratio, ratio);
        if (!(ratio > 1e-10)) ++rep.failures;
    }
    return rep;
}

std::string to_string(DaeVerdict v) {
    switch (v) {
        case DaeVerdict::GlobalExistenceEvidence: return "GlobalExistenceEvidence";
        case DaeVerdict::LagrangeStabilityEvidence: return "LagrangeStabilityEvidence";
        case DaeVerdict::BlowUpEvidence: return "BlowUpEvidence";
        case DaeVerdict::UniformDissipativityEvidence: return "UniformDissipativityEvidence";
        case DaeVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

std::string ClassifyResult::report_text() const {
    std::ostringstream os;
    os << "verdict: " << to_string(verdict) << "\n";
    os << "comparison: " << to_string(comparison) << "\n";
    os << "samples_completed: " << inequality.completed << "\n";
    os << "samples_tested: " << inequality.tested << "\n";
    os << "violations: " << inequality.violations << "\n";
    os << "worst_margin: " << inequality.worst_margin << "\n";
    if (!inequality.worst_cases.empty()) {
        os << "violation_table:\n";
        os << "  t | V' | bound\n";
        for (const auto& v : inequality.worst_cases)
            os << "  " << v.t << " | " << v.lhs << " | " << v.rhs << "\n";
    }
    os << "details: " << details << "\n";
    return os.str();
}

ClassifyResult classify_dae(const ReducedSystem& rs, const QuadraticLyapunov& V,
                            const ComparisonInequality& chi, const ManifoldSampler& sampler,
                            const ClassifyOptions& opts) {
    ClassifyResult res;
    if (!V.configured() || !chi.U || !chi.k) {
        res.details = "lyapunov or comparison data not configured";
        return res;
    }
    const auto& dec = rs.dec();
    std::ostringstream details;

    // Invertibility probe of the algebraic-solve operator at manifold samples.
    if (dec.d > 0) {
        ManifoldSampler probe = sampler;
        probe.count = std::min(sampler.count, std::max(1, opts.phi_probe_trials));
        auto pts = sample_manifold(rs, probe, opts.newton);
        int singular = 0;
        for (const auto& pt : pts) {
            auto [phi, cond] = rs.phi_matrix(pt.t, pt.x);
            (void)phi;
            if (!(cond < 1e12)) ++singular;
        }
        details << "phi probes: " << pts.size() << ", ill-conditioned: " << singular << "; ";
        if (!pts.empty() && singular > 0) {
            res.details = details.str() + "phi operator singular on manifold samples";
            return res;
        }
    }

    const bool lower = static_cast<bool>(sampler.omega);
    const BoundDirection dir = lower ? BoundDirection::LowerBound : BoundDirection::UpperBound;
    res.inequality = check_inequality_on_manifold(rs, V, chi, sampler, dir, opts.newton);
    res.comparison = comparison_classify(chi, sampler.t_lo, 1.0);

    if (lower) {
        if (res.inequality.satisfied() &&
            res.comparison == ComparisonVerdict::FiniteEscapeCriterion) {
            res.verdict = DaeVerdict::BlowUpEvidence;
            details << "lower bound holds on " << res.inequality.tested << " samples";
        } else {
            details << "lower-bound check inconclusive";
        }
        res.details = details.str();
        return res;
    }

    if (!res.inequality.satisfied()) {
        details << "upper bound violated on " << res.inequality.violations << " of "
                << res.inequality.tested << " samples";
        res.details = details.str();
        return res;
    }

    if (opts.try_dissipativity) {
        auto diss = dissipativity_check(rs, V, sampler, opts.dissipativity_variant,
                                        opts.dissipativity, opts.newton);
        if (diss.satisfied()) {
            res.verdict = DaeVerdict::UniformDissipativityEvidence;
            details << "decay and growth bounds hold on " << diss.decay.tested << " samples";
            res.details = details.str();
            return res;
        }
    }

    if (res.comparison == ComparisonVerdict::BoundedForAllTime) {
        res.verdict = DaeVerdict::LagrangeStabilityEvidence;
        details << "upper bound holds on " << res.inequality.tested << " samples";
        res.details = details.str();
        return res;
    }
    if (res.comparison == ComparisonVerdict::NoFiniteEscape) {
        // The supplied majorant only rules out finite escape. If the sampled
        // derivative data supports a strictly decaying linear majorant, test
        // that sharper choice as well.
        double alpha_hat = -std::numeric_limits<double>::infinity();
        {
            auto pts = sample_manifold(rs, sampler, opts.newton);
            for (const auto& pt : pts) {
                const double omega_norm = std::sqrt(pt.w.squaredNorm() + pt.z.squaredNorm());
                if (omega_norm < sampler.R) continue;
                const double v = lyapunov_value(rs, V, pt.t, pt.x);
                if (!(v > 0.0)) continue;
                alpha_hat = std::max(alpha_hat, lyapunov_derivative(rs, V, pt.t, pt.x) / v);
            }
        }
        if (std::isfinite(alpha_hat) && alpha_hat < -1e-8) {
            ComparisonInequality tightened;
            tightened.k = [alpha_hat](double) { return alpha_hat; };
            tightened.U = [](double v) { return v; };
            tightened.v_max = chi.v_max;
            tightened.t_max = chi.t_max;
            if (comparison_classify(tightened, sampler.t_lo, 1.0) ==
                ComparisonVerdict::BoundedForAllTime) {
                res.verdict = DaeVerdict::LagrangeStabilityEvidence;
                details << "auto-tightened majorant k=" << alpha_hat
                        << " holds on sampled data";
                res.details = details.str();
                return res;
            }
        }
        res.verdict = DaeVerdict::GlobalExistenceEvidence;
        details << "upper bound holds on " << res.inequality.tested << " samples";
        res.details = details.str();
        return res;
    }

    details << "comparison test inconclusive";
    res.details = details.str();
    return res;
}

} // namespace daekit

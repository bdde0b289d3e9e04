#ifndef DAEKIT_QUALITATIVE_HPP
#define DAEKIT_QUALITATIVE_HPP

#include "daekit/reduce.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace daekit {

// Quadratic form V(t, w, z) = (H(t) (w,z), (w,z)) with H block-diagonal over
// the X_s1 and X_1 coordinate blocks.
struct QuadraticLyapunov {
    std::function<Matrix(double)> H;       // (b+a) x (b+a), SPD, block-diagonal
    std::function<Matrix(double)> dH_dt;   // same shape; empty means zero
    std::optional<double> sup_norm_bound;

    bool configured() const { return static_cast<bool>(H); }
};

// Checks symmetry, block-diagonality and positive definiteness of H at
// sampled times; throws on violation.
void validate_lyapunov(const QuadraticLyapunov& V, int b, int a, double t_lo, double t_hi);

double lyapunov_value(const ReducedSystem& rs, const QuadraticLyapunov& V, double t,
                      const Vector& x);

// Derivative of V along the reduced differential equations at (t, x).
double lyapunov_derivative(const ReducedSystem& rs, const QuadraticLyapunov& V, double t,
                           const Vector& x);

// Scalar comparison data chi(t, v) = k(t) U(v), U > 0 on (0, v_max].
struct ComparisonInequality {
    std::function<double(double)> k;
    std::function<double(double)> U;
    double v_max = 1e12;
    double t_max = 1e6;
};

enum class ComparisonVerdict {
    NoFiniteEscape,
    BoundedForAllTime,
    FiniteEscapeCriterion,
    Inconclusive,
};

std::string to_string(ComparisonVerdict v);

// Numerically tests the divergence dichotomy of ∫ dv/U and the boundedness of
// ∫ k dt by geometric-grid quadrature with decade-increment ratio tests.
ComparisonVerdict comparison_classify(const ComparisonInequality& chi, double t0, double v0);

// Random completion of (x_s1, x_s2, x_p1) boxes to the consistency manifold.
struct ManifoldSampler {
    Vector s1_lo, s1_hi; // R^b boxes
    Vector s2_lo, s2_hi; // R^l
    Vector p1_lo, p1_hi; // R^a
    std::function<bool(const Vector&)> s2_predicate;           // optional D_s2
    std::function<bool(const Vector&, const Vector&)> omega;   // optional region on (w, z)
    double R = 0.0;
    int count = 1000;
    std::uint64_t seed = 0;
    double t_lo = 0.0, t_hi = 1.0;
};

struct ManifoldPoint {
    double t;
    Vector x;
    Vector w, z;
};

// Draws sampler.count box points, completes each to the manifold; points whose
// Newton solve fails or whose overdetermined residual exceeds tol are skipped.
std::vector<ManifoldPoint> sample_manifold(const ReducedSystem& rs, const ManifoldSampler& sampler,
                                           const NewtonOptions& newton, int* rejected = nullptr);

enum class BoundDirection { UpperBound, LowerBound };

struct Violation {
    double t;
    Vector x;
    double lhs, rhs;
};

struct InequalityReport {
    int completed = 0; // manifold points obtained
    int tested = 0;    // points inside the tested region
    int violations = 0;
    std::vector<Violation> worst_cases; // capped list
    double worst_margin = 0.0;          // most negative (chi - V') resp. (V' - chi)
    bool satisfied() const { return tested > 0 && violations == 0; }
};

// Sampled test of V' <= chi(t, V) (UpperBound, outside radius R) or
// V' >= chi(t, V) (LowerBound, inside omega). Sampled evidence, not proof.
InequalityReport check_inequality_on_manifold(const ReducedSystem& rs, const QuadraticLyapunov& V,
                                              const ComparisonInequality& chi,
                                              const ManifoldSampler& sampler,
                                              BoundDirection direction,
                                              const NewtonOptions& newton = {});

enum class DissipativityVariant { A, B, C };

struct DissipativityParams {
    double alpha = 0.0;                      // variant C decay rate
    double beta = 0.0;                       // growth bound for Q2 f
    std::function<double(double)> U2;        // variants A and B
    std::function<Matrix(double)> H_weight;  // variant B weight
};

struct DissipativityReport {
    InequalityReport decay;
    int growth_tested = 0;
    int growth_violations = 0;
    double growth_worst_margin = 0.0; // most negative beta*||(w,z)|| - ||Q2 f||
    bool satisfied() const {
        return decay.satisfied() && growth_tested > 0 && growth_violations == 0;
    }
};

DissipativityReport dissipativity_check(const ReducedSystem& rs, const QuadraticLyapunov& V,
                                        const ManifoldSampler& sampler, DissipativityVariant variant,
                                        const DissipativityParams& params,
                                        const NewtonOptions& newton = {});

struct BasisInvertibilityReport {
    int trials = 0;
    int failures = 0;
    double min_sigma_ratio = 0.0; // smallest sigma_min/sigma_max over trials
    bool all_invertible() const { return trials > 0 && failures == 0; }
};

// Samples tuples on the segment [lo, hi] ⊂ X2, forms the row-mixed operator
// from the coordinate resolution of the identity, and checks invertibility.
// For dim X2 = 1 this reduces to pointwise invertibility of Phi.
BasisInvertibilityReport basis_invertibility_sample(const ReducedSystem& rs, double t,
                                                    const Vector& x_s1, const Vector& x_s2,
                                                    const Vector& x_p1, const Vector& lo,
                                                    const Vector& hi, int trials,
                                                    std::uint64_t seed);

enum class DaeVerdict {
    GlobalExistenceEvidence,
    LagrangeStabilityEvidence,
    BlowUpEvidence,
    UniformDissipativityEvidence,
    Inconclusive,
};

std::string to_string(DaeVerdict v);

struct ClassifyOptions {
    NewtonOptions newton;
    int phi_probe_trials = 16;
    bool try_dissipativity = false;
    DissipativityParams dissipativity;
    DissipativityVariant dissipativity_variant = DissipativityVariant::C;
};

struct ClassifyResult {
    DaeVerdict verdict = DaeVerdict::Inconclusive;
    ComparisonVerdict comparison = ComparisonVerdict::Inconclusive;
    InequalityReport inequality;
    std::string details;

    std::string report_text() const;
};

// Orchestrates the sampled hypothesis checks and maps them to a verdict.
// Every verdict is evidence from sampling, never a proof.
ClassifyResult classify_dae(const ReducedSystem& rs, const QuadraticLyapunov& V,
                            const ComparisonInequality& chi, const ManifoldSampler& sampler,
                            const ClassifyOptions& opts = {});

} // namespace daekit

#endif

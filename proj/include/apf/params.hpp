#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace apf {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A required-positive coefficient is not positive.
struct PositivityViolation : ValidationError {
    std::string name;
    explicit PositivityViolation(std::string n)
        : ValidationError("positivity violated: " + n), name(std::move(n)) {}
};

/// Derived couplings disagree with epsilon * base beyond tolerance.
struct CouplingInconsistency : ValidationError {
    CouplingInconsistency() : ValidationError("coupling coefficients inconsistent with epsilon scaling") {}
};

/// strict_analysis_mode demands kappa == 0.
struct StrictModeKappaNonzero : ValidationError {
    StrictModeKappaNonzero() : ValidationError("strict analysis mode requires kappa = 0") {}
};

inline double neg_part(double a) { return a < 0.0 ? -a : 0.0; }
inline double pos_part(double a) { return a > 0.0 ? a : 0.0; }

/// Coupling-free model coefficients. mu1/gamma1/lambda1 are obtained from
/// the tilde values through the coupling strength epsilon.
struct BaseCoefficients {
    double mu1_tilde = 1.0;
    double gamma1_tilde = 1.0;
    double lambda1_tilde = 1.0;
    double mu2 = 1.0;
    double gamma2 = 1.0;
    double lambda2 = 1.0;
    double alpha = 1.0;
    double beta = 0.0;
    double kappa = 0.0;
};

/// Full coefficient set: base plus epsilon and the derived couplings
/// mu1 = eps*mu1~, gamma1 = eps*gamma1~, lambda1 = eps*lambda1~.
struct ModelParams {
    BaseCoefficients base;
    double epsilon = 0.0;
    double mu1 = 0.0;
    double gamma1 = 0.0;
    double lambda1 = 0.0;
    bool strict_analysis_mode = false;

    bool coupled() const { return mu1 != 0.0 || gamma1 != 0.0 || lambda1 != 0.0; }
};

inline void validate_base(const BaseCoefficients& b) {
    if (!(b.mu1_tilde > 0.0)) throw PositivityViolation("mu1_tilde");
    if (!(b.lambda1_tilde > 0.0)) throw PositivityViolation("lambda1_tilde");
    if (!(b.mu2 > 0.0)) throw PositivityViolation("mu2");
    if (!(b.lambda2 > 0.0)) throw PositivityViolation("lambda2");
    if (!(b.alpha > 0.0)) throw PositivityViolation("alpha");
}

/// Scale the couplings by epsilon. Rejects epsilon < 0 and invalid bases.
inline ModelParams apply_coupling(const BaseCoefficients& base, double epsilon,
                                  bool strict_analysis_mode = false) {
    if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be nonnegative");
    validate_base(base);
    ModelParams p;
    p.base = base;
    p.epsilon = epsilon;
    p.mu1 = epsilon * base.mu1_tilde;
    p.gamma1 = epsilon * base.gamma1_tilde;
    p.lambda1 = epsilon * base.lambda1_tilde;
    p.strict_analysis_mode = strict_analysis_mode;
    if (strict_analysis_mode && base.kappa != 0.0) throw StrictModeKappaNonzero();
    return p;
}

/// Check positivity, the epsilon identities (to 1e-14 relative) and the
/// strict-mode kappa constraint; returns the params unchanged on success.
inline const ModelParams& validate(const ModelParams& p) {
    validate_base(p.base);
    if (!(p.epsilon >= 0.0)) throw ValidationError("epsilon must be nonnegative");
    auto consistent = [](double derived, double eps, double tilde) {
        const double want = eps * tilde;
        const double scale = std::max({std::abs(want), std::abs(derived), 1e-300});
        return std::abs(derived - want) <= 1e-14 * scale;
    };
    if (!consistent(p.mu1, p.epsilon, p.base.mu1_tilde) ||
        !consistent(p.gamma1, p.epsilon, p.base.gamma1_tilde) ||
        !consistent(p.lambda1, p.epsilon, p.base.lambda1_tilde))
        throw CouplingInconsistency();
    if (p.strict_analysis_mode && p.base.kappa != 0.0) throw StrictModeKappaNonzero();
    return p;
}

}  // namespace apf

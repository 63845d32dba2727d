#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/follmer.hpp"
#include "fraclab/variation.hpp"

namespace fraclab {

struct LimitEstimate {
    double value = 0.0;
    bool stable = true;  // false is the `no-limit` flag
    bool exact = false;  // closed form used
};

// lim_{y -> 0} phi(x y) / phi(y)
LimitEstimate phi_hat(const PhiSpec& phi, double x);

// sup{p : phi(x) / |x|^p -> 0}
LimitEstimate p_phi_estimate(const PhiSpec& phi);

struct AdmissibilityGate {
    double alpha = 0.0;
    double threshold = 0.0;  // (sqrt(1 + 4/p_phi) - 1) / 2
    bool passed = false;
};

AdmissibilityGate admissibility(double holder_alpha, double p_phi);

// Slope of log mean |S(t + h) - S(t)| against log h over dyadic lags.
double holder_exponent_estimate(const SampledPath& path);

struct IsometrySpec {
    PhiSpec phi;
    double p_phi = 0.0;
    double holder_alpha = 0.0;
    std::string holder_source = "user";
    FunctionalBundle functional;
};

struct IsometryReport {
    std::vector<int> levels;
    std::vector<double> lhs, rhs, rel_error;
    AdmissibilityGate gate;
    std::string holder_source;
    double tolerance = 0.1;
    bool converged = false;
};

IsometryReport isometry_check(const IsometrySpec& spec, const SampledPath& path, const PartitionSequence& seq,
                              double t, double tolerance = 0.1, int jobs = 1);

// phi^{-1} by bisection on [0, sup of the domain).
double phi_inverse(const PhiSpec& phi, double y);

struct MinkowskiReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

MinkowskiReport generalized_minkowski_check(const PhiSpec& phi, std::span<const double> a, std::span<const double> b);

}  // namespace fraclab

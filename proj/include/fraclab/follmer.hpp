#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "fraclab/cantor.hpp"
#include "fraclab/fracops.hpp"
#include "fraclab/numeric.hpp"
#include "fraclab/partitions.hpp"

namespace fraclab {

// f with f', ..., f^(m): the input of compensated sums.
using DerivativeBundle = SmoothFn;

struct VerdictRule {
    double tolerance = 1e-2;  // relative to 1 + |f(S(t))|
    int min_levels = 4;
};

struct CompensatedResult {
    std::vector<int> levels;
    std::vector<double> sums;       // L^n
    std::vector<double> residuals;  // lhs - L^n
    std::vector<double> gaps;       // |L^{n+1} - L^n|, one fewer than levels
    double lhs = 0.0;               // f(S(t)) - f(S(0)) (or its functional analogue)
    double threshold = 0.0;
    VerdictRule rule;
    bool converged = false;
};

// Builds the verdict: enough levels, last residual under the threshold, and both residuals
// and gaps shrinking from first to last.
CompensatedResult make_compensated_result(std::vector<int> levels, std::vector<double> sums, double lhs,
                                          double scale, const VerdictRule& rule);

// Accumulates sum_j f^(j)(s0)/j! (s1 - s0)^j over streamed steps, truncated at time t.
class CompensatedAccumulator {
public:
    CompensatedAccumulator(const DerivativeBundle& f, int m, double t, double s_t);
    void operator()(const Step& st);
    double value() const { return sum_.value(); }

private:
    const DerivativeBundle& f_;
    int m_;
    double t_;
    double s_t_;
    std::vector<double> inv_fact_;
    CompensatedSum sum_;
};

double compensated_sum(const DerivativeBundle& f, const SampledPath& path, const Partition& partition,
                       const FracOrder& p, double t);

CompensatedResult ito_check(const DerivativeBundle& f, const SampledPath& path,
                            const PartitionSequence& seq, const FracOrder& p, double t,
                            const VerdictRule& rule = {}, int jobs = 1);

// Time-dependent f(t, x) with d/dt f and D_x^k f, k = 1..m.
struct TimeBundle {
    std::function<double(double, double)> f;
    std::function<double(double, double)> dt;
    std::vector<std::function<double(double, double)>> dx;

    static TimeBundle from_spatial(const SmoothFn& g, int m);
};

CompensatedResult ito_check_time(const TimeBundle& f, const SampledPath& path,
                                 const PartitionSequence& seq, const FracOrder& p, double t,
                                 const VerdictRule& rule = {}, int jobs = 1);

// Knots of a path prefix, either the piecewise-linear path or the right-continuous step
// path taking the value v[i+1] on [t_i, t_{i+1}).
struct PrefixKnots {
    enum class Shape { linear, right_step };
    Shape shape = Shape::linear;
    std::vector<double> t;
    std::vector<double> v;
    std::vector<double> cum;  // integral from 0 to t_i

    PrefixKnots(Shape shape, std::vector<double> t, std::vector<double> v);
};

// The path stopped at `stop`, viewed at time `eval` >= stop, with a bump added on [stop, T].
class PathPrefix {
public:
    PathPrefix(const PrefixKnots& knots, double stop, double eval, double bump = 0.0);
    PathPrefix(const PrefixKnots& knots, std::size_t segment, double stop, double eval, double bump);

    double time() const { return eval_; }
    double stop_time() const { return stop_; }
    double value() const { return stop_value_ + bump_; }  // omega(t)
    double at(double u) const;
    double integral() const;  // int_0^t omega(u) du

    PathPrefix bumped(double h) const;
    PathPrefix extended(double eval) const;

private:
    const PrefixKnots* knots_;
    std::size_t seg_;
    double stop_, eval_, bump_;
    double stop_value_;
    double stop_integral_;
};

using Functional = std::function<double(double, const PathPrefix&)>;

struct FunctionalBundle {
    Functional F;
    Functional DF;                   // optional; forward difference of the flat extension otherwise
    std::vector<Functional> vertical;  // optional closed forms of nabla^k F, k = 1..
    double horizontal_step = 1e-7;
    double bump_scale = 0.5;  // vertical finite-difference step = bump_scale * osc(S, pi_n)

    static FunctionalBundle cylinder(const SmoothFn& f, int m);
};

// Vertical derivative of order k by symmetric bump differences with step h.
double vertical_derivative(const FunctionalBundle& F, int k, const PathPrefix& w, double h);
double horizontal_derivative(const FunctionalBundle& F, const PathPrefix& w);

CompensatedResult ito_check_functional(const FunctionalBundle& F, const SampledPath& path,
                                       const PartitionSequence& seq, const FracOrder& p, double t,
                                       const VerdictRule& rule = {}, int jobs = 1);

struct TensorBundle {
    int dim = 1;
    std::function<double(std::span<const double>)> f;
    // tensors[k-1](x) returns the d^k entries of nabla^k f(x), row-major
    std::vector<std::function<std::vector<double>(std::span<const double>)>> tensors;

    static TensorBundle from_scalar(const SmoothFn& g, int m);
};

// Throws invalid-bundle when some tensor differs from its index permutations by > 1e-8.
void check_tensor_symmetry(const TensorBundle& f, std::span<const double> x);

CompensatedResult ito_check_multi(const TensorBundle& f, std::span<const SampledPath> paths,
                                  const PartitionSequence& seq, const FracOrder& p, double t,
                                  const VerdictRule& rule = {}, int jobs = 1);

struct YoungReport {
    std::vector<int> levels;
    std::vector<double> lhs, rhs;
    std::vector<bool> holds;
    bool all_hold = true;
};

YoungReport young_bound_check(std::span<const SampledPath> paths, std::span<const double> alphas,
                              const PartitionSequence& seq);

struct KernelValue {
    double value = 0.0;
    bool singular = false;
};

// G_f^p(a, b): the normalized Taylor remainder of order m.
KernelValue remainder_kernel(const DerivativeBundle& f, const FracOrder& p, double a, double b);

enum class AtomSpace { circle_angle, real_value };

struct Atom {
    double t;
    double x;
    double w;
};

struct AtomMeasure {
    AtomSpace space = AtomSpace::circle_angle;
    std::vector<Atom> atoms;
    std::size_t dropped = 0;     // increments between two zeros (projection undefined)
    bool time_resolved = true;   // false: atoms aggregated over [0, horizon]
    double horizon = 1.0;

    double total() const;
};

using Projection = std::function<double(double, double)>;
double circle_angle(double a, double b);

AtomMeasure quotient_measure(const SampledPath& path, const Partition& partition, double p,
                             const Projection& projection = circle_angle,
                             AtomSpace space = AtomSpace::circle_angle);

double remainder_integral(const AtomMeasure& measure, const std::function<double(double)>& G_hat, double t);

// theta -> G_f^p(cos theta, sin theta), valid for homogeneous f such as |x|^p.
std::function<double(double)> circle_kernel(const DerivativeBundle& f, const FracOrder& p);

struct AngleWeight {
    double angle;
    double weight;
};

// Limit atoms of the cantor-bump quotient measure, k = 0..k_max, rising then falling angle.
std::vector<AngleWeight> nonzero_atom_weights(double p, int k_max);

// Compensated sum and quotient measure of a lattice step histogram (all steps +-delta).
double lattice_compensated_sum(const DerivativeBundle& f, const LatticeStepCounts& counts, int m);
AtomMeasure lattice_quotient_measure(const LatticeStepCounts& counts, double p);

}  // namespace fraclab

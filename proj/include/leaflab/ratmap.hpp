#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leaflab/polynomial.hpp"
#include "leaflab/types.hpp"

namespace leaflab {

struct CriticalPoint {
    SpherePoint point;
    int multiplicity = 1;
};

struct PreimageCluster {
    SpherePoint point;
    int multiplicity = 1;
};

enum class CycleClass { Attracting, Superattracting, Repelling, Parabolic, IrrationallyIndifferent };

std::string to_string(CycleClass c);

struct CycleInfo {
    std::vector<SpherePoint> points;
    int period = 1;
    Complex multiplier;
    CycleClass cls = CycleClass::Repelling;
};

/// Degree-d map of the Riemann sphere f = num/den.
class RationalMap {
public:
    static constexpr double kChartSwitch = 1e8;
    static constexpr double kParabolicTol = 1e-8;
    static constexpr int kMaxRootOfUnityOrder = 64;

    /// Throws InvalidMap unless d >= 2 and num, den share no root.
    RationalMap(Polynomial num, Polynomial den);
    explicit RationalMap(Polynomial poly) : RationalMap(std::move(poly), Polynomial::constant(1.0)) {}

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    int degree() const { return degree_; }
    bool is_polynomial() const { return den_.degree() == 0; }

    /// Coefficients of the polynomial num/den when den is constant.
    Polynomial as_polynomial() const;

    SpherePoint operator()(const SpherePoint& z) const;

    /// Value at a finite point whose image is finite; +inf components at poles.
    Complex eval_finite(Complex z) const;

    /// f, f', f'' at a finite non-pole point.
    void eval_derivs(Complex z, Complex& f, Complex& df, Complex& ddf) const;
    Complex derivative(Complex z) const;

    /// Derivative read in the chart 1/z at infinity, at z and at f(z).
    /// Products of these along a cycle give the multiplier.
    Complex chart_derivative(const SpherePoint& z) const;

    /// f(z + delta) - f(z) without cancellation, for finite non-pole z, z + delta.
    Complex increment(Complex z, Complex delta) const;

    /// Coefficients c_0..c_order of f(z + h) as a power series in h.
    std::vector<Complex> taylor_at(Complex z, int order) const;

    /// Roots of f(x) = w with multiplicity (length d), canonically ordered.
    std::vector<SpherePoint> preimages(const SpherePoint& w) const;
    std::vector<PreimageCluster> distinct_preimages(const SpherePoint& w) const;

    const std::vector<CriticalPoint>& critical_points() const { return critical_; }
    std::vector<SpherePoint> critical_values() const;

    /// 1 + critical multiplicity at z (within tol), else 1.
    int local_degree(const SpherePoint& z, double tol = 1e-7) const;

    RationalMap compose(const RationalMap& inner) const;
    RationalMap iterate(int n) const;

    /// u -> 1/f(1/u): the same map read in the chart at infinity.
    RationalMap inverted() const;

    std::uint64_t fingerprint() const { return fingerprint_; }
    std::string describe() const;

private:
    Polynomial num_;
    Polynomial den_;
    Polynomial num_rev_;
    Polynomial den_rev_;
    int degree_ = 0;
    std::vector<CriticalPoint> critical_;
    std::uint64_t fingerprint_ = 0;
};

/// Fixed points of f^period grouped into cycles of exact period dividing
/// period. Budget: d^period <= kCycleBudget, else InvalidArgument.
inline constexpr int kCycleBudget = 256;
std::vector<CycleInfo> find_cycles(const RationalMap& f, int period);

/// Product of chart derivatives along the cycle starting at points[start].
Complex cycle_multiplier(const RationalMap& f, const std::vector<SpherePoint>& points, std::size_t start = 0);

CycleClass classify_multiplier(Complex lambda, double parabolic_tol = RationalMap::kParabolicTol);

/// p_2 = 2z^2 - 1, p_{d+1} = 2z p_d - p_{d-1}.
RationalMap chebyshev(int d);

/// z^2 + c.
RationalMap quadratic(Complex c);

/// Canonical sort key for sphere points; infinity sorts last.
bool canonical_less(const SpherePoint& a, const SpherePoint& b);

}  // namespace leaflab

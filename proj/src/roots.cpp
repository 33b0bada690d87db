#include "leaflab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "leaflab/errors.hpp"

namespace leaflab {
namespace {

bool converged(const Polynomial& p, Complex z, double tol) {
    return std::abs(p(z)) <= tol * p.magnitude_at(std::abs(z));
}

std::vector<Complex> quadratic_roots(Complex a, Complex b, Complex c) {
    // Stable form: avoid cancellation between -b and the discriminant root.
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    const Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == Complex(0.0)) return {Complex(0.0), Complex(0.0)};
    return {q / a, c / q};
}

void newton_polish(const Polynomial& p, const Polynomial& dp, Complex& z) {
    for (int it = 0; it < 3; ++it) {
        const Complex d = dp(z);
        if (d == Complex(0.0)) return;
        const Complex next = z - p(z) / d;
        if (std::abs(p(next)) >= std::abs(p(z))) return;
        z = next;
    }
}

bool aberth(const Polynomial& p, const Polynomial& dp, std::vector<Complex>& z, const RootOptions& opt) {
    const std::size_t n = z.size();
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        bool all_done = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (converged(p, z[i], opt.residual_tol)) continue;
            all_done = false;
            const Complex pv = p(z[i]);
            const Complex dv = dp(z[i]);
            Complex sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const Complex diff = z[i] - z[j];
                if (diff != Complex(0.0)) sum += 1.0 / diff;
            }
            Complex step;
            if (dv == Complex(0.0)) {
                step = pv;  // kick off a stationary point
            } else {
                const Complex ratio = pv / dv;
                const Complex denom = 1.0 - ratio * sum;
                step = denom == Complex(0.0) ? ratio : ratio / denom;
            }
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
            z[i] -= step;
        }
        if (all_done) return true;
    }
    for (const auto& zi : z)
        if (!converged(p, zi, opt.residual_tol)) return false;
    return true;
}

}  // namespace

std::vector<Complex> polynomial_roots(const Polynomial& p, const RootOptions& options) {
    if (p.degree() < 1) fail(ErrorCode::RootFindingFailure, "polynomial of degree < 1 has no isolated roots");
    // Exact zero roots are split off first: a relative residual test cannot
    // certify them when the constant coefficient vanishes.
    const auto c = p.coeffs();
    std::size_t zeros = 0;
    while (c[zeros] == Complex(0.0)) ++zeros;
    if (zeros > 0) {
        std::vector<Complex> out(zeros, Complex(0.0));
        const Polynomial rest(std::vector<Complex>(c.begin() + static_cast<std::ptrdiff_t>(zeros), c.end()));
        if (rest.degree() >= 1) {
            const auto more = polynomial_roots(rest, options);
            out.insert(out.end(), more.begin(), more.end());
        }
        return out;
    }
    const int n = p.degree();
    const Polynomial dp = p.derivative();

    if (n == 1) return {-p.coeff(0) / p.coeff(1)};
    if (n == 2) {
        auto r = quadratic_roots(p.coeff(2), p.coeff(1), p.coeff(0));
        for (auto& z : r) newton_polish(p, dp, z);
        return r;
    }

    // Initial radius: geometric mean of the root moduli, |c0/cn|^(1/n),
    // bounded below so that roots at zero do not collapse the circle.
    double radius = std::pow(std::abs(p.coeff(0) / p.leading()), 1.0 / n);
    double cauchy = 0.0;
    for (int k = 0; k < n; ++k) cauchy = std::max(cauchy, std::abs(p.coeff(k) / p.leading()));
    cauchy += 1.0;
    if (!(radius > 1e-3)) radius = std::min(1.0, cauchy);
    radius = std::min(radius, cauchy);

    std::mt19937_64 rng(options.seed ^ static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt <= options.restarts; ++attempt) {
        const double offset = 0.4 + (attempt == 0 ? 0.0 : 2.0 * kPi * unit(rng));
        const double r = attempt == 0 ? radius : radius * (0.5 + unit(rng));
        for (int k = 0; k < n; ++k) {
            const double jitter = attempt == 0 ? 0.0 : 0.1 * (unit(rng) - 0.5);
            z[static_cast<std::size_t>(k)] = std::polar(r, offset + 2.0 * kPi * (k + jitter) / n);
        }
        if (aberth(p, dp, z, options)) {
            for (auto& zi : z) newton_polish(p, dp, zi);
            return z;
        }
    }
    fail(ErrorCode::RootFindingFailure,
         "Aberth iteration did not reach residual " + std::to_string(options.residual_tol) + " for degree " +
             std::to_string(n));
}

std::vector<RootCluster> cluster_roots(std::span<const Complex> roots, double tol) {
    std::vector<RootCluster> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        Complex sum = roots[i];
        int count = 1;
        // Grow the cluster transitively so chains of close roots merge.
        std::vector<std::size_t> members{i};
        for (std::size_t m = 0; m < members.size(); ++m) {
            const Complex anchor = roots[members[m]];
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (used[j]) continue;
                if (std::abs(roots[j] - anchor) <= tol * (1.0 + std::abs(anchor))) {
                    used[j] = true;
                    members.push_back(j);
                    sum += roots[j];
                    ++count;
                }
            }
        }
        out.push_back({sum / static_cast<double>(count), count});
    }
    return out;
}

void sort_canonical(std::vector<RootCluster>& roots) {
    auto key = [](const RootCluster& r) { return std::round(r.value.real() * 1e9); };
    std::sort(roots.begin(), roots.end(), [&](const RootCluster& a, const RootCluster& b) {
        const double ka = key(a);
        const double kb = key(b);
        if (ka != kb) return ka < kb;
        return a.value.imag() < b.value.imag();
    });
}

}  // namespace leaflab

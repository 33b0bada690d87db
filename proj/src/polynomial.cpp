#include "leaflab/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace leaflab {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0)) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Polynomial Polynomial::monomial(int degree, Complex c) {
    std::vector<Complex> v(static_cast<std::size_t>(degree) + 1, Complex(0.0));
    v.back() = c;
    return Polynomial(std::move(v));
}

Complex Polynomial::operator()(Complex z) const {
    Complex acc = coeffs_.back();
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

void Polynomial::eval3(Complex z, Complex& p, Complex& dp, Complex& ddp) const {
    p = coeffs_.back();
    dp = 0.0;
    ddp = 0.0;
    for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) {
        ddp = ddp * z + dp;
        dp = dp * z + p;
        p = p * z + *it;
    }
    ddp *= 2.0;
}

double Polynomial::magnitude_at(double r) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (degree() == 0) return Polynomial();
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(Complex z) const {
    // Repeated synthetic division (Taylor shift).
    std::vector<Complex> c = coeffs_;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = n - 1; j > i; --j) c[j - 1] += z * c[j];
    }
    return Polynomial(std::move(c));
}

Complex Polynomial::divided_difference(Complex z, Complex h) const {
    // (p(z+h) - p(z)) / h = sum_{k>=1} t_k h^{k-1} where t_k are the Taylor
    // coefficients at z; each t_k is formed without subtracting nearby values.
    const Polynomial t = shifted(z);
    const auto tc = t.coeffs();
    if (tc.size() < 2) return 0.0;
    Complex acc = tc.back();
    for (std::size_t k = tc.size() - 1; k-- > 1;) acc = acc * h + tc[k];
    return acc;
}

Polynomial Polynomial::reversed(int n) const {
    std::vector<Complex> r(static_cast<std::size_t>(n) + 1, Complex(0.0));
    for (int k = 0; k <= degree(); ++k) r[static_cast<std::size_t>(n - k)] = coeffs_[static_cast<std::size_t>(k)];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::trimmed(double rel_tol) const {
    const double scale = max_abs_coeff();
    std::vector<Complex> c = coeffs_;
    while (c.size() > 1 && std::abs(c.back()) <= rel_tol * scale) c.pop_back();
    return Polynomial(std::move(c));
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Complex(0.0));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + Complex(-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(Complex s, const Polynomial& a) {
    std::vector<Complex> c = a.coeffs_;
    for (auto& x : c) x *= s;
    return Polynomial(std::move(c));
}

Complex resultant(const Polynomial& a, const Polynomial& b) {
    const int m = a.degree();
    const int n = b.degree();
    if (a.is_zero() || b.is_zero()) return 0.0;
    if (m == 0) return std::pow(a.coeff(0), n);
    if (n == 0) return std::pow(b.coeff(0), m);

    const int size = m + n;
    std::vector<Complex> s(static_cast<std::size_t>(size * size), Complex(0.0));
    auto at = [&](int r, int c) -> Complex& { return s[static_cast<std::size_t>(r * size + c)]; };
    // Rows hold coefficients in descending order.
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) at(r, r + k) = a.coeff(m - k);
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) at(n + r, r + k) = b.coeff(n - k);

    Complex det = 1.0;
    for (int col = 0; col < size; ++col) {
        int pivot = col;
        for (int r = col + 1; r < size; ++r)
            if (std::abs(at(r, col)) > std::abs(at(pivot, col))) pivot = r;
        if (at(pivot, col) == Complex(0.0)) return 0.0;
        if (pivot != col) {
            for (int c = 0; c < size; ++c) std::swap(at(pivot, c), at(col, c));
            det = -det;
        }
        det *= at(col, col);
        for (int r = col + 1; r < size; ++r) {
            const Complex factor = at(r, col) / at(col, col);
            if (factor == Complex(0.0)) continue;
            for (int c = col; c < size; ++c) at(r, c) -= factor * at(col, c);
        }
    }
    return det;
}

}  // namespace leaflab

#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "leaflab/types.hpp"

namespace leaflab {

/// Dense polynomial with complex coefficients in ascending degree.
/// Trailing zero coefficients are trimmed on construction, so the leading
/// coefficient is nonzero unless the polynomial is identically zero.
class Polynomial {
public:
    Polynomial() : coeffs_{Complex(0.0)} {}
    explicit Polynomial(std::vector<Complex> coeffs);
    Polynomial(std::initializer_list<Complex> coeffs) : Polynomial(std::vector<Complex>(coeffs)) {}

    static Polynomial constant(Complex c) { return Polynomial({c}); }
    static Polynomial monomial(int degree, Complex c = 1.0);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex(0.0); }
    std::span<const Complex> coeffs() const { return coeffs_; }
    Complex coeff(int k) const { return k >= 0 && k <= degree() ? coeffs_[static_cast<std::size_t>(k)] : Complex(0.0); }
    Complex leading() const { return coeffs_.back(); }

    Complex operator()(Complex z) const;

    /// Value and first two derivatives in one Horner pass.
    void eval3(Complex z, Complex& p, Complex& dp, Complex& ddp) const;

    /// Sum of |c_k| |z|^k, the scale against which evaluation error is measured.
    double magnitude_at(double r) const;

    Polynomial derivative() const;

    /// Coefficients of p(z + h) as a polynomial in h.
    Polynomial shifted(Complex z) const;

    /// p(z + h) - p(z) divided by h, evaluated without cancellation.
    Complex divided_difference(Complex z, Complex h) const;

    /// z^n p(1/z) for n >= degree().
    Polynomial reversed(int n) const;

    /// Drop leading coefficients below rel_tol * max|c|.
    Polynomial trimmed(double rel_tol) const;

    double max_abs_coeff() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Complex s, const Polynomial& a);

    bool operator==(const Polynomial& other) const = default;

private:
    std::vector<Complex> coeffs_;
};

/// Resultant of two polynomials via the Sylvester determinant.
Complex resultant(const Polynomial& a, const Polynomial& b);

}  // namespace leaflab

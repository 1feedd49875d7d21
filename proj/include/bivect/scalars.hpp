#ifndef BIVECT_SCALARS_HPP
#define BIVECT_SCALARS_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bivect {

/// Raised when an operation is applied outside its mathematical domain
/// (zero base with non-positive exponent, singular matrix, degree mismatch, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "p/q" or "p" (optional leading sign on p).
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);

/// Gaussian rational a + b i.
class ExactComplex {
public:
    ExactComplex() = default;
    // Implicit so that Eigen's Zero()/Identity() and literal arithmetic work.
    ExactComplex(long long re) : re_(re) {}
    ExactComplex(Rational re, Rational im = Rational(0)) : re_(std::move(re)), im_(std::move(im)) {}

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    Rational norm2() const { return re_ * re_ + im_ * im_; }
    ExactComplex conj() const { return {re_, -im_}; }
    ExactComplex inverse() const;

    ExactComplex& operator+=(const ExactComplex& o);
    ExactComplex& operator-=(const ExactComplex& o);
    ExactComplex& operator*=(const ExactComplex& o);
    ExactComplex& operator/=(const ExactComplex& o);

    friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
    friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
    friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
    friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
    friend ExactComplex operator-(const ExactComplex& a) { return {-a.re_, -a.im_}; }
    friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }

    std::complex<double> to_approx() const;

private:
    Rational re_{0};
    Rational im_{0};
};

std::ostream& operator<<(std::ostream& os, const ExactComplex& z);

using ApproxComplex = std::complex<double>;

/// Integer power a^k, negative k through the inverse. Zero base with k <= 0
/// is a DomainError.
ExactComplex cpow(const ExactComplex& a, long long k);
ApproxComplex cpow(ApproxComplex a, long long k);

/// Exact, or approximate with a single absolute tolerance used by every
/// residual check.
class ScalarMode {
public:
    enum class Kind { exact, approx };

    static ScalarMode exact() { return ScalarMode(Kind::exact, 0.0); }
    static ScalarMode approx(double tolerance = 1e-9);

    Kind kind() const { return kind_; }
    bool is_exact() const { return kind_ == Kind::exact; }
    double tolerance() const { return tolerance_; }

private:
    ScalarMode(Kind k, double tol) : kind_(k), tolerance_(tol) {}
    Kind kind_;
    double tolerance_;
};

template <class Scalar>
struct scalar_traits;

template <>
struct scalar_traits<ExactComplex> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";
    static bool is_zero(const ExactComplex& z, double /*tol*/ = 0.0) { return z.is_zero(); }
    static bool near(const ExactComplex& a, const ExactComplex& b, double /*tol*/ = 0.0) {
        return a == b;
    }
    static double magnitude(const ExactComplex& z) { return std::abs(z.to_approx()); }
    static ApproxComplex to_approx(const ExactComplex& z) { return z.to_approx(); }
};

template <>
struct scalar_traits<ApproxComplex> {
    static constexpr bool exact = false;
    static constexpr const char* name = "approx";
    static bool is_zero(const ApproxComplex& z, double tol = 0.0) { return std::abs(z) <= tol; }
    static bool near(const ApproxComplex& a, const ApproxComplex& b, double tol = 0.0) {
        return std::abs(a - b) <= tol;
    }
    static double magnitude(const ApproxComplex& z) { return std::abs(z); }
    static ApproxComplex to_approx(const ApproxComplex& z) { return z; }
};

}  // namespace bivect

namespace Eigen {

// Treated as an opaque exact field: Eigen only needs +, -, *, / and 0/1.
template <>
struct NumTraits<bivect::ExactComplex> : GenericNumTraits<bivect::ExactComplex> {
    using Real = bivect::ExactComplex;
    using NonInteger = bivect::ExactComplex;
    using Literal = bivect::ExactComplex;
    using Nested = bivect::ExactComplex;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 10,
        AddCost = 50,
        MulCost = 100
    };
    static inline int digits10() { return 0; }
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
};

}  // namespace Eigen

#endif  // BIVECT_SCALARS_HPP

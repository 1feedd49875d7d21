#include "bivect/scalars.hpp"

#include <cctype>
#include <ostream>

namespace bivect {

namespace {

BigInt parse_integer(std::string_view s, std::string_view whole) {
    if (s.empty()) throw DomainError("empty integer in rational '" + std::string(whole) + "'");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw DomainError("malformed rational '" + std::string(whole) + "'");
    for (std::size_t k = i; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k])))
            throw DomainError("malformed rational '" + std::string(whole) + "'");
    BigInt v(std::string(s.substr(i)));
    return s[0] == '-' ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den.is_zero()) throw DomainError("zero denominator in rational '" + std::string(text) + "'");
    return Rational(num, den);
}

std::string format_rational(const Rational& q) {
    const auto& d = boost::multiprecision::denominator(q);
    std::string s = boost::multiprecision::numerator(q).str();
    if (d != 1) s += "/" + d.str();
    return s;
}

ExactComplex ExactComplex::inverse() const {
    if (is_zero()) throw DomainError("inverse of zero");
    Rational n = norm2();
    return {re_ / n, -im_ / n};
}

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
    if (im_.is_zero() && o.im_.is_zero()) {
        re_ *= o.re_;
        return *this;
    }
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

ExactComplex& ExactComplex::operator/=(const ExactComplex& o) {
    if (o.is_zero()) throw DomainError("division by zero");
    if (o.im_.is_zero()) {
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    return *this *= o.inverse();
}

std::complex<double> ExactComplex::to_approx() const {
    return {re_.convert_to<double>(), im_.convert_to<double>()};
}

std::ostream& operator<<(std::ostream& os, const ExactComplex& z) {
    os << format_rational(z.re());
    if (!z.im().is_zero()) os << (z.im() < 0 ? "-" : "+") << format_rational(abs(z.im())) << "i";
    return os;
}

namespace {

template <class S>
S power_by_squaring(S base, unsigned long long e) {
    S result(1);
    while (e) {
        if (e & 1ULL) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

unsigned long long magnitude(long long k) {
    return k < 0 ? 0ULL - static_cast<unsigned long long>(k) : static_cast<unsigned long long>(k);
}

}  // namespace

ExactComplex cpow(const ExactComplex& a, long long k) {
    if (a.is_zero()) {
        if (k <= 0) throw DomainError("cpow: zero base with non-positive exponent");
        return ExactComplex(0);
    }
    if (k == 0) return ExactComplex(1);
    ExactComplex base = k < 0 ? a.inverse() : a;
    return power_by_squaring(base, magnitude(k));
}

ApproxComplex cpow(ApproxComplex a, long long k) {
    if (a == ApproxComplex(0.0) && k <= 0)
        throw DomainError("cpow: zero base with non-positive exponent");
    if (k == 0) return {1.0, 0.0};
    ApproxComplex base = k < 0 ? ApproxComplex(1.0) / a : a;
    return power_by_squaring(base, magnitude(k));
}

ScalarMode ScalarMode::approx(double tolerance) {
    if (!(tolerance > 0.0)) throw DomainError("approx tolerance must be positive");
    return ScalarMode(Kind::approx, tolerance);
}

}  // namespace bivect

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace flatrel {

using Rational = mpq_class;
using Integer = mpz_class;

// Largest d with d*d <= n, or -1 when n is not a perfect square.
inline long exact_isqrt(long n) {
    if (n < 0) return -1;
    long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n ? r : -1;
}

inline Rational parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw std::invalid_argument("empty rational");
    if (t[0] == '+') t = t.substr(1);
    auto dot = t.find('.');
    if (dot == std::string::npos && t.find_first_of("eE") == std::string::npos) {
        Rational q;
        if (q.set_str(t, 10) != 0) throw std::invalid_argument("bad rational: " + s);
        if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
        q.canonicalize();
        return q;
    }
    // decimal literal: read digits exactly
    std::string mant = t, expo;
    auto e = t.find_first_of("eE");
    if (e != std::string::npos) {
        mant = t.substr(0, e);
        expo = t.substr(e + 1);
    }
    bool neg = !mant.empty() && mant[0] == '-';
    if (neg) mant = mant.substr(1);
    auto d = mant.find('.');
    std::string ip = d == std::string::npos ? mant : mant.substr(0, d);
    std::string fp = d == std::string::npos ? "" : mant.substr(d + 1);
    std::string digits = ip + fp;
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad decimal: " + s);
    Integer num(digits, 10);
    long ex = expo.empty() ? 0 : std::stol(expo);
    ex -= static_cast<long>(fp.size());
    Integer p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(ex < 0 ? -ex : ex));
    Rational q = ex < 0 ? Rational(num, p10) : Rational(num * p10);
    q.canonicalize();
    return neg ? Rational(-q) : q;
}

/// Element a + b*sqrt(D) of Q(sqrt D), with D = 0 meaning plain Q.
/// Ordering and signs use the real embedding with sqrt(D) > 0.
class QuadNum {
public:
    QuadNum() = default;
    QuadNum(long n) : a_(n) {}
    QuadNum(int n) : a_(n) {}
    QuadNum(const Rational& a) : a_(a) { a_.canonicalize(); }
    QuadNum(const Rational& a, const Rational& b, long disc) : a_(a), b_(b), disc_(disc) {
        a_.canonicalize();
        b_.canonicalize();
        check_disc(disc);
        if (disc == 0 && b_ != 0) throw std::domain_error("sqrt part requires disc > 0");
        root_ = exact_isqrt(disc);
    }

    static QuadNum sqrt_of(long disc) { return QuadNum(0, 1, disc); }

    static void check_disc(long disc) {
        if (disc < 0) throw std::domain_error("negative discriminant");
        if (disc % 4 != 0 && disc % 4 != 1) throw std::domain_error("discriminant must be 0 or 1 mod 4");
    }

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    long disc() const { return disc_; }
    bool is_rational() const { return b_ == 0 || root_ >= 0; }

    // Value in Q when the sqrt part vanishes or D is a square.
    Rational rational_value() const {
        if (b_ == 0) return a_;
        if (root_ >= 0) return a_ + b_ * root_;
        throw std::domain_error("irrational value has no rational form");
    }

    int sign() const {
        if (b_ == 0) return sgn(a_);
        if (root_ >= 0) return sgn(Rational(a_ + b_ * root_));
        int sa = sgn(a_), sb = sgn(b_);
        if (sa >= 0 && sb >= 0) return 1;
        if (sa <= 0 && sb <= 0) return -1;
        Rational lhs = a_ * a_, rhs = b_ * b_ * disc_;
        int c = cmp(lhs, rhs);
        return sa > 0 ? c : -c;
    }

    QuadNum conjugate() const {
        if (disc_ == 0) throw std::domain_error("conjugate needs disc > 0");
        QuadNum r(*this);
        r.b_ = -b_;
        return r;
    }

    double to_double() const {
        if (b_ == 0) return a_.get_d();
        if (root_ >= 0) return Rational(a_ + b_ * root_).get_d();
        double s = std::sqrt(static_cast<double>(disc_));
        if (sgn(a_) * sgn(b_) >= 0) return a_.get_d() + b_.get_d() * s;
        // opposite signs: use (a^2 - b^2 D) / (a - b sqrt D) to avoid cancellation
        Rational n = a_ * a_ - b_ * b_ * disc_;
        return n.get_d() / (a_.get_d() - b_.get_d() * s);
    }

    QuadNum& operator+=(const QuadNum& o) { join(o); a_ += o.a_; b_ += o.b_; return *this; }
    QuadNum& operator-=(const QuadNum& o) { join(o); a_ -= o.a_; b_ -= o.b_; return *this; }
    QuadNum& operator*=(const QuadNum& o) {
        join(o);
        if (o.b_ == 0) { a_ *= o.a_; b_ *= o.a_; return *this; }
        if (b_ == 0) { b_ = a_ * o.b_; a_ *= o.a_; return *this; }
        Rational na = a_ * o.a_ + b_ * o.b_ * disc_;
        Rational nb = a_ * o.b_ + b_ * o.a_;
        a_ = std::move(na);
        b_ = std::move(nb);
        return *this;
    }
    QuadNum& operator/=(const QuadNum& o) {
        join(o);
        if (o.b_ == 0) {
            if (o.a_ == 0) throw std::domain_error("division by zero");
            a_ /= o.a_;
            b_ /= o.a_;
            return *this;
        }
        Rational norm = o.a_ * o.a_ - o.b_ * o.b_ * disc_;
        if (norm == 0) {
            // only possible for square D; fall back to the real value
            Rational v = o.rational_value();
            if (v == 0) throw std::domain_error("division by zero");
            a_ /= v;
            b_ /= v;
            return *this;
        }
        QuadNum c(o.a_ / norm, -o.b_ / norm, disc_);
        return *this *= c;
    }

    QuadNum operator-() const { QuadNum r(*this); r.a_ = -a_; r.b_ = -b_; return r; }
    friend QuadNum operator+(QuadNum x, const QuadNum& y) { return x += y; }
    friend QuadNum operator-(QuadNum x, const QuadNum& y) { return x -= y; }
    friend QuadNum operator*(QuadNum x, const QuadNum& y) { return x *= y; }
    friend QuadNum operator/(QuadNum x, const QuadNum& y) { return x /= y; }

    friend int compare(const QuadNum& x, const QuadNum& y) { return (x - y).sign(); }
    friend bool operator==(const QuadNum& x, const QuadNum& y) {
        if (x.disc_ == y.disc_ && x.root_ < 0) return x.a_ == y.a_ && x.b_ == y.b_;
        return compare(x, y) == 0;
    }
    friend bool operator!=(const QuadNum& x, const QuadNum& y) { return !(x == y); }
    friend bool operator<(const QuadNum& x, const QuadNum& y) { return compare(x, y) < 0; }
    friend bool operator>(const QuadNum& x, const QuadNum& y) { return compare(x, y) > 0; }
    friend bool operator<=(const QuadNum& x, const QuadNum& y) { return compare(x, y) <= 0; }
    friend bool operator>=(const QuadNum& x, const QuadNum& y) { return compare(x, y) >= 0; }

    // "a" for rationals, "(a, b, D)" otherwise.
    std::string str() const {
        if (b_ == 0) return a_.get_str();
        std::ostringstream os;
        os << '(' << a_.get_str() << ", " << b_.get_str() << ", " << disc_ << ')';
        return os.str();
    }

    // Accepts "p/q", decimals, and "(a, b, D)".
    static QuadNum parse(const std::string& s, long disc = 0) {
        auto l = s.find('(');
        if (l == std::string::npos) {
            QuadNum r(parse_rational(s));
            if (disc) { check_disc(disc); r.disc_ = disc; r.root_ = exact_isqrt(disc); }
            return r;
        }
        auto rpos = s.find(')', l);
        if (rpos == std::string::npos) throw std::invalid_argument("unterminated triple: " + s);
        std::string body = s.substr(l + 1, rpos - l - 1);
        auto c1 = body.find(','), c2 = body.find(',', c1 == std::string::npos ? 0 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) throw std::invalid_argument("bad triple: " + s);
        Rational a = parse_rational(body.substr(0, c1));
        Rational b = parse_rational(body.substr(c1 + 1, c2 - c1 - 1));
        Rational d = parse_rational(body.substr(c2 + 1));
        if (d.get_den() != 1 || !d.get_num().fits_slong_p()) throw std::invalid_argument("bad disc: " + s);
        long D = d.get_num().get_si();
        if (disc && D != disc && b != 0) throw std::domain_error("disc mismatch in " + s);
        QuadNum r(a, b, b == 0 && disc ? disc : D);
        return r;
    }

    friend std::ostream& operator<<(std::ostream& os, const QuadNum& x) { return os << x.str(); }

    // Promote a pure rational into Q(sqrt disc).
    QuadNum with_disc(long disc) const {
        if (disc_ == disc) return *this;
        if (disc_ != 0 && b_ != 0) throw std::domain_error("disc mismatch");
        return QuadNum(a_, b_, disc);
    }

private:
    static int sgn(const Rational& q) { return ::sgn(q); }

    void join(const QuadNum& o) {
        if (o.disc_ == disc_ || o.disc_ == 0) return;
        if (disc_ == 0) { disc_ = o.disc_; root_ = o.root_; return; }
        if (b_ == 0 && o.b_ == 0) return;
        throw std::domain_error("disc mismatch: " + std::to_string(disc_) + " vs " + std::to_string(o.disc_));
    }

    Rational a_{0}, b_{0};
    long disc_ = 0;
    long root_ = -1;  // sqrt(disc) when disc is a perfect square
};

inline QuadNum conj(const QuadNum& x) { return x.conjugate(); }
inline int sign(const QuadNum& x) { return x.sign(); }
inline double to_float(const QuadNum& x) { return x.to_double(); }

}  // namespace flatrel

#include "relic/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace relic
{

Rational parse_rational(std::string_view text)
{
    std::string s(text);
    if (s.empty())
        throw std::invalid_argument("empty numeric literal");

    bool negative = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }

    if (auto slash = s.find('/', pos); slash != std::string::npos) {
        Integer num(s.substr(pos, slash - pos), 10);
        Integer den(s.substr(slash + 1), 10);
        if (den == 0)
            throw std::invalid_argument("zero denominator in '" + s + "'");
        Rational q(num, den);
        q.canonicalize();
        return negative ? Rational(-q) : q;
    }

    std::string digits;
    long exponent = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point)
                --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if ((c == 'e' || c == 'E') && any_digit) {
            exponent += std::stol(s.substr(pos + 1));
            pos = s.size();
            break;
        } else {
            throw std::invalid_argument("malformed numeric literal '" + s + "'");
        }
    }
    if (!any_digit)
        throw std::invalid_argument("malformed numeric literal '" + s + "'");

    Integer mantissa(digits, 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational q = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q)
{
    return q.get_str();
}

std::string to_string(const Integer& z)
{
    return z.get_str();
}

Integer floor(const Rational& q)
{
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Integer ceil(const Rational& q)
{
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

bool is_integral(const Rational& q)
{
    return q.get_den() == 1;
}

Integer gcd(const Integer& a, const Integer& b)
{
    Integer r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Integer lcm(const Integer& a, const Integer& b)
{
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

} // namespace relic

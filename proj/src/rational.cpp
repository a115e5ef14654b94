#include "metabamdp/rational.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace mbamdp {

std::string to_string(const Rational& r)
{
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

namespace {

mpz_class parse_integer(std::string_view digits, std::string_view original)
{
    if (digits.empty()) throw std::invalid_argument("malformed number: '" + std::string(original) + "'");
    for (char ch : digits) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
            throw std::invalid_argument("malformed number: '" + std::string(original) + "'");
        }
    }
    return mpz_class(std::string(digits), 10);
}

} // namespace

Rational parse_rational(std::string_view text)
{
    const std::string_view original = text;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("empty number");

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }

    Rational result;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(text.substr(0, slash), original);
        mpz_class den = parse_integer(text.substr(slash + 1), original);
        if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(original) + "'");
        result = Rational(num, den);
    } else {
        long exponent = 0;
        if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
            std::string_view exp_text = text.substr(e + 1);
            bool exp_negative = false;
            if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
                exp_negative = exp_text.front() == '-';
                exp_text.remove_prefix(1);
            }
            mpz_class magnitude = parse_integer(exp_text, original);
            if (magnitude > 4096) throw std::invalid_argument("exponent out of range: '" + std::string(original) + "'");
            exponent = magnitude.get_si();
            if (exp_negative) exponent = -exponent;
            text = text.substr(0, e);
        }
        std::string digits;
        long scale = 0;
        if (auto dot = text.find('.'); dot != std::string_view::npos) {
            digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
            scale = static_cast<long>(text.size() - dot - 1);
            if (digits.empty()) throw std::invalid_argument("malformed number: '" + std::string(original) + "'");
        } else {
            digits = std::string(text);
        }
        mpz_class num = parse_integer(digits, original);
        long shift = exponent - scale;
        mpz_class power;
        mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
        result = shift < 0 ? Rational(num, power) : Rational(num * power);
    }
    result.canonicalize();
    return negative ? Rational(-result) : result;
}

std::string to_exact_decimal_or_fraction(const Rational& r)
{
    mpz_class den = r.get_den();
    int twos = 0;
    int fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) return to_string(r);

    const int places = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
    mpz_class scaled = r.get_num() * scale / r.get_den();
    const bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.get_str();
    if (places > 0) {
        if (static_cast<int>(digits.size()) <= places) {
            digits.insert(0, static_cast<std::size_t>(places + 1 - static_cast<int>(digits.size())), '0');
        }
        digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
    }
    return negative ? "-" + digits : digits;
}

} // namespace mbamdp

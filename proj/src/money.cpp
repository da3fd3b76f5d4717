#include "chainnet/money.hpp"

#include <cctype>
#include <limits>

#include "chainnet/error.hpp"

namespace chainnet {

namespace {

using U128 = unsigned __int128;

constexpr U128 kU128Max = ~U128(0);

[[noreturn]] void bad_value(std::string_view s, const char* why) {
    throw DataError("bad value \"" + std::string(s) + "\": " + why);
}

}  // namespace

std::string quanta_to_string(Quanta v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    U128 u = neg ? U128(-(v + 1)) + 1 : U128(v);
    char buf[48];
    int pos = 48;
    while (u > 0) {
        buf[--pos] = char('0' + int(u % 10));
        u /= 10;
    }
    std::string out;
    if (neg) out.push_back('-');
    out.append(buf + pos, 48 - pos);
    return out;
}

Quanta quanta_from_string(std::string_view s) {
    if (s.empty()) throw DataError("empty quanta value");
    bool neg = false;
    size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw DataError("bad quanta value \"" + std::string(s) + "\"");
    U128 u = 0;
    const U128 limit = U128(1) << 126;  // plenty for any chain amount
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw DataError("bad quanta value \"" + std::string(s) + "\"");
        u = u * 10 + U128(s[i] - '0');
        if (u > limit) throw DataError("quanta value out of range \"" + std::string(s) + "\"");
    }
    Quanta v = Quanta(u);
    return neg ? -v : v;
}

Sats parse_sat_value(std::string_view s) {
    // mantissa digits (dot removed) + decimal exponent, evaluated exactly
    size_t i = 0;
    if (i < s.size() && s[i] == '+') ++i;
    if (i < s.size() && s[i] == '-') bad_value(s, "negative amount");
    std::string digits;
    int frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            seen_digit = true;
            digits.push_back(c);
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            break;
        } else {
            bad_value(s, "not a number");
        }
    }
    if (!seen_digit) bad_value(s, "not a number");
    long exp10 = 0;
    if (i < s.size()) {  // at the exponent marker
        ++i;
        bool exp_neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            exp_neg = s[i] == '-';
            ++i;
        }
        if (i == s.size()) bad_value(s, "truncated exponent");
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) bad_value(s, "bad exponent");
            exp10 = exp10 * 10 + (s[i] - '0');
            if (exp10 > 1000) bad_value(s, "exponent out of range");
        }
        if (exp_neg) exp10 = -exp10;
    }
    exp10 -= frac_digits;

    // normalize: strip leading zeros, fold trailing zeros into the exponent
    size_t lead = digits.find_first_not_of('0');
    if (lead == std::string::npos) return 0;
    digits.erase(0, lead);
    while (exp10 < 0 && !digits.empty() && digits.back() == '0') {
        digits.pop_back();
        ++exp10;
    }
    if (exp10 < 0) bad_value(s, "not an integer");
    if (digits.size() + size_t(exp10) > 19) bad_value(s, "out of range");

    U128 v = 0;
    for (char c : digits) v = v * 10 + U128(c - '0');
    for (long k = 0; k < exp10; ++k) v *= 10;
    if (v > U128(std::numeric_limits<Sats>::max())) bad_value(s, "out of range");
    return Sats(v);
}

MulDiv mul_div_mod(Quanta a, Quanta b, Quanta c) {
    if (a < 0 || b < 0 || c <= 0) throw DataError("mul_div_mod: negative operand");
    U128 ua = U128(a), ub = U128(b), uc = U128(c);
    if (ua == 0 || ub == 0) return {0, 0};
    if (ua <= kU128Max / ub) {
        U128 p = ua * ub;
        return {Quanta(p / uc), Quanta(p % uc)};
    }
    // Overflow path: double-and-add over the bits of b, reducing mod c as we
    // go. rem stays below c before each step, so no intermediate wraps for
    // operands below 2^127. With b <= c the quotient stays <= a.
    U128 quot = 0, rem = 0;
    int hi = 127;
    while (hi > 0 && (ub >> hi) == 0) --hi;
    for (int i = hi; i >= 0; --i) {
        quot <<= 1;
        rem <<= 1;
        if (rem >= uc) {
            rem -= uc;
            quot += 1;
        }
        if ((ub >> i) & 1) {
            rem += ua;
            if (rem >= uc) {
                quot += rem / uc;
                rem %= uc;
            }
        }
    }
    return {Quanta(quot), Quanta(rem)};
}

}  // namespace chainnet

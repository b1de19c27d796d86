// SPDX-License-Identifier: Apache-2.0
#include "dfsq/combinatorics.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dfsq {

namespace {

using BigInt = boost::multiprecision::cpp_int;

// Multiplicative formula; each intermediate division is exact.
BigInt binomial_big(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

} // namespace

std::string binomial_str(unsigned n, unsigned k) {
    return binomial_big(n, k).str();
}

std::optional<std::uint64_t> binomial_u64(unsigned n, unsigned k) {
    const BigInt v = binomial_big(n, k);
    if (v > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
    return static_cast<std::uint64_t>(v);
}

bool binomial_exceeds(unsigned n, unsigned k, std::uint64_t budget) {
    return binomial_big(n, k) > budget;
}

double binomial_log10(unsigned n, unsigned k) {
    const BigInt v = binomial_big(n, k);
    if (v == 0) return -std::numeric_limits<double>::infinity();
    const std::string s = v.str();
    // Leading 15 digits carry more precision than a double can hold.
    const std::size_t lead = std::min<std::size_t>(s.size(), 15);
    const double mantissa = std::stod(s.substr(0, lead));
    return std::log10(mantissa) + static_cast<double>(s.size() - lead);
}

std::string decimal_to_scientific(const std::string& digits, int sig_figs) {
    if (digits.empty() || sig_figs < 1)
        throw std::invalid_argument("decimal_to_scientific: bad input");
    std::string d = digits;
    // Strip leading zeros (keep one digit for "0").
    std::size_t nz = d.find_first_not_of('0');
    if (nz == std::string::npos) return "0";
    d = d.substr(nz);

    int exponent = static_cast<int>(d.size()) - 1;
    std::string kept = d.substr(0, static_cast<std::size_t>(sig_figs));
    while (static_cast<int>(kept.size()) < sig_figs) kept.push_back('0');

    // Round half away from zero on the first dropped digit.
    if (d.size() > static_cast<std::size_t>(sig_figs) && d[sig_figs] >= '5') {
        int i = sig_figs - 1;
        for (; i >= 0; --i) {
            if (kept[i] != '9') {
                ++kept[i];
                break;
            }
            kept[i] = '0';
        }
        if (i < 0) { // carry out of the leading digit: 999.. -> 100..
            kept.insert(kept.begin(), '1');
            kept.pop_back();
            ++exponent;
        }
    }

    std::string out;
    out += kept[0];
    if (sig_figs > 1) {
        out += '.';
        out += kept.substr(1);
    }
    out += 'e';
    out += std::to_string(exponent);
    return out;
}

} // namespace dfsq

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace dfsq {

/// C(n, k) computed exactly in arbitrary precision, returned as a decimal
/// string (subset counts overflow 64 bits long before they stop mattering).
std::string binomial_str(unsigned n, unsigned k);

/// C(n, k) if it fits in 64 bits, std::nullopt otherwise.
std::optional<std::uint64_t> binomial_u64(unsigned n, unsigned k);

/// True when C(n, k) > budget.
bool binomial_exceeds(unsigned n, unsigned k, std::uint64_t budget);

/// log10 of C(n, k), exact enough for growth-rate checks (exact digit count
/// plus a leading-digit correction).
double binomial_log10(unsigned n, unsigned k);

/// Rounds a non-negative decimal integer string to `sig_figs` significant
/// figures in scientific notation, half away from zero: "4335886749297756310"
/// -> "4.336e18".
std::string decimal_to_scientific(const std::string& digits, int sig_figs);

} // namespace dfsq

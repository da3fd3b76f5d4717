#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace chainnet {

// Amounts arrive as integer satoshis and are carried internally in "quanta"
// (1 quantum = 1e-4 satoshi), so that fee-proportional splits and the dust
// threshold can be represented without floating point. Annual per-edge sums
// can exceed 2^63 quanta, so quanta values are 128-bit.
using Sats = std::int64_t;
using Quanta = __int128;

constexpr Sats kQuantaPerSat = 10000;
constexpr Sats kSatsPerBtc = 100000000;

// Dust cutoff: 0.0001 BTC per edge per year.
constexpr Quanta kDustThresholdQuanta = Quanta(10000) * kQuantaPerSat;

constexpr Quanta sats_to_quanta(Sats s) { return Quanta(s) * kQuantaPerSat; }

std::string quanta_to_string(Quanta v);
Quanta quanta_from_string(std::string_view s);  // throws DataError

// Exact integer satoshi parse of the dataset's value column. Accepts plain
// integers and decimal/scientific forms ("1.7e+07") that denote an exact
// non-negative integer; anything else throws DataError.
Sats parse_sat_value(std::string_view s);

// floor(a*b/c) and (a*b) mod c for non-negative 128-bit operands, exact even
// when a*b overflows. Callers keep b <= c (share apportionment), which bounds
// the quotient by a.
struct MulDiv {
    Quanta quot;
    Quanta rem;
};
MulDiv mul_div_mod(Quanta a, Quanta b, Quanta c);

}  // namespace chainnet

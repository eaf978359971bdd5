#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace horolab::detail {

/// Bottom rows (c, d) of SL(2,Z) up to sign with |c|, |d| <= bound:
/// c > 0 with gcd(c, d) = 1, plus (0, 1). Cached per bound.
const std::vector<std::pair<std::int32_t, std::int32_t>>& coprime_bottom_rows(int bound);

/// (a, b) with a d - b c = 1 and |b| minimal (ties to the smaller b).
std::pair<std::int64_t, std::int64_t> complete_row(std::int64_t c, std::int64_t d);

}  // namespace horolab::detail

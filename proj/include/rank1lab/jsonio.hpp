#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "rank1lab/errors.hpp"
#include "rank1lab/numeric.hpp"

namespace rank1lab {

// Integers ride as JSON numbers when they fit in 64 bits and as decimal
// strings otherwise, so round trips stay exact at any magnitude.
inline nlohmann::ordered_json json_int(const Integer& x) {
    if (auto v = to_int64(x)) return *v;
    return to_string(x);
}

inline nlohmann::ordered_json json_ints(const std::vector<Integer>& xs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& x : xs) arr.push_back(json_int(x));
    return arr;
}

inline Integer integer_from_json(const nlohmann::ordered_json& j) {
    if (j.is_string()) return Integer(j.get<std::string>());
    if (j.is_number_integer()) return Integer(static_cast<long>(j.get<std::int64_t>()));
    throw ParseError("expected an integer");
}

}  // namespace rank1lab

/*
 * Copyright 2026 The epigym Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <concepts>
#include <string>
#include <vector>

#include "epigym/error.hpp"
#include "json.hpp"

namespace epigym::detail {

// Like json::get<T>, but integers must be JSON integers (no truncated 2.5)
// and unsigned targets reject negatives instead of wrapping.
template <typename T>
T strict_get(const nlohmann::json& v, const std::string& key) {
    auto bad = [&](const std::string& why) { return Error(ErrorCode::ConfigInvalid, "bad value for '" + key + "': " + why); };
    if constexpr (std::same_as<T, bool>) {
        if (!v.is_boolean()) throw bad("expected a boolean");
        return v.get<bool>();
    } else if constexpr (std::integral<T>) {
        if (!v.is_number_integer()) throw bad("expected an integer");
        if constexpr (std::unsigned_integral<T>) {
            if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw bad("expected a nonnegative integer");
        }
        return v.get<T>();
    } else if constexpr (requires { typename T::value_type; } && !std::same_as<T, std::string>) {
        if (!v.is_array()) throw bad("expected an array");
        T out;
        for (const auto& e : v) out.push_back(strict_get<typename T::value_type>(e, key));
        return out;
    } else {
        try {
            return v.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw bad(e.what());
        }
    }
}

}  // namespace epigym::detail

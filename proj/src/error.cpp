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
#include "epigym/error.hpp"

namespace epigym {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ActionOutOfSpace: return "ActionOutOfSpace";
        case ErrorCode::EpisodeFinished: return "EpisodeFinished";
        case ErrorCode::NotReset: return "NotReset";
        case ErrorCode::UnstableStep: return "UnstableStep";
        case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
        case ErrorCode::InvalidRates: return "InvalidRates";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
        case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
        case ErrorCode::ComponentOutOfRange: return "ComponentOutOfRange";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::GapError: return "GapError";
        case ErrorCode::MonotonicityError: return "MonotonicityError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UnknownEnvType: return "UnknownEnvType";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(message), code_(code), line_(line) {}

}  // namespace epigym

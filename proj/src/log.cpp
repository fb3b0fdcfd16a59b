// Copyright 2026 The bandqubo Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "log.hpp"

#include <cstdlib>
#include <memory>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "bandqubo/error.hpp"

namespace bandqubo {

spdlog::logger& log() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
        auto logger = std::make_shared<spdlog::logger>("bandqubo", sink);
        logger->set_pattern("[%l] %v");
        logger->set_level(spdlog::level::warn);
        if (const char* env = std::getenv("BANDQUBO_LOG")) {
            logger->set_level(spdlog::level::from_str(env));
        }
        return logger;
    }();
    return *instance;
}

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid argument";
        case ErrorKind::Io: return "io error";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Validation: return "validation error";
        case ErrorKind::InsufficientData: return "insufficient data";
        case ErrorKind::Infeasible: return "infeasible";
        case ErrorKind::Encoding: return "encoding error";
        case ErrorKind::Dimension: return "dimension mismatch";
        case ErrorKind::SolverRefused: return "solver refused";
        case ErrorKind::Build: return "build error";
    }
    return "unknown error";
}

}  // namespace bandqubo

#pragma once
#include <string>

#include "json.hpp"

namespace hlab::report {

inline constexpr const char* kVersion = "hlab 1.0.0";

// ISO-8601 UTC, e.g. "2026-01-07T12:34:56Z".
std::string timestamp_utc();

// Standard report envelope. The timestamp lives in its own top-level field so
// that reports from identical configs are byte-identical apart from it.
nlohmann::json make_report(nlohmann::json config, nlohmann::json results);

// Serialization with the timestamp field removed, for determinism checks.
std::string serialize_without_timestamp(nlohmann::json report);

}  // namespace hlab::report

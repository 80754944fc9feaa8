#include "hlab/report.hpp"

#include <ctime>

namespace hlab::report {

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json make_report(nlohmann::json config, nlohmann::json results) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["timestamp"] = timestamp_utc();
  j["config"] = std::move(config);
  j["results"] = std::move(results);
  return j;
}

std::string serialize_without_timestamp(nlohmann::json report) {
  report.erase("timestamp");
  return report.dump(2);
}

}  // namespace hlab::report

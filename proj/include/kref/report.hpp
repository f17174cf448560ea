#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace kref {

/// Run record emitted by the CLI: reproducible given the same flags and
/// seeds, except for the wall-clock timings.
struct RunReport {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    nlohmann::json timings_ms = nlohmann::json::object();
    nlohmann::json outputs = nlohmann::json::object();

    std::string to_json() const;
};

class StageTimer {
  public:
    explicit StageTimer(RunReport& report, std::string stage)
        : report_(report), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto end = std::chrono::steady_clock::now();
        report_.timings_ms[stage_] =
            std::chrono::duration_cast<std::chrono::milliseconds>(end - start_).count();
    }

  private:
    RunReport& report_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

std::string environment_digest();

}  // namespace kref

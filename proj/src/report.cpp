#include "kref/report.hpp"

#include <sstream>

namespace kref {

std::string environment_digest() {
    std::ostringstream os;
    os << "kikref-0.1.0";
#if defined(__clang__)
    os << " clang-" << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
    os << " gcc-" << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
#if defined(__linux__)
    os << " linux";
#elif defined(__APPLE__)
    os << " darwin";
#endif
    return os.str();
}

std::string RunReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["parameters"] = parameters;
    j["seeds"] = seeds;
    j["timings_ms"] = timings_ms;
    j["outputs"] = outputs;
    j["environment"] = environment_digest();
    return j.dump(2) + "\n";
}

}  // namespace kref

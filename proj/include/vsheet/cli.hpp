#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace vsheet {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
    std::string subcommand;
    nlohmann::json parameters = nlohmann::json::object();
    std::map<std::string, std::string> input_hashes;
    std::string version = kVersion;
    std::string timestamp;  ///< SOURCE_DATE_EPOCH when set, otherwise the wall clock
    unsigned threads = 0;
};

nlohmann::json manifest_to_json(const RunManifest& m);

/// Plot-ready CSV for one series of a report: `scaling`, `cutoff`,
/// `refinement`, `collapse` or `trajectory`. Throws missing_series.
std::string emit_plot_data(const nlohmann::json& report, std::string_view kind);

/// Entry point shared by the executable and the tests. Exit codes: 0 success,
/// 2 invalid input or usage, 3 divergence flags raised under --strict.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vsheet

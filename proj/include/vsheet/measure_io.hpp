#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <span>
#include <vector>

#include <json.hpp>

#include "vsheet/measure.hpp"

namespace vsheet {

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex_digest(std::uint64_t h);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Three-column numeric CSV with a fixed header line.
std::vector<std::array<double, 3>> parse_csv_triples(std::string_view text, std::string_view header);
std::string format_csv_triples(std::span<const std::array<double, 3>> rows, std::string_view header);

/// CSV with header `x,y,weight`.
AtomicMeasure parse_atomic_csv(std::string_view text);
std::string format_atomic_csv(const AtomicMeasure& mu);

/// Curve measure JSON. A single branch is written flat
/// ({vertices, densities, cumulative, metadata}); several branches go under
/// a `branches` array. `cumulative` is optional on input and cross-checked.
CurveMeasure curve_from_json(const nlohmann::json& j);
nlohmann::json curve_to_json(const CurveMeasure& mu);

CurveMeasure parse_curve_json(std::string_view text);
std::string format_curve_json(const CurveMeasure& mu);

nlohmann::json info_to_json(const MeasureInfo& info);
MeasureInfo info_from_json(const nlohmann::json& j);

}  // namespace vsheet

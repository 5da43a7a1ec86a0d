#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "mimm/core/time_series.hpp"

namespace mimm {

/// Ordered key=value pairs; used for CSV sidecars and parameter records.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const KeyValues& kv, const std::filesystem::path& path);

/// `<csv>.meta` next to the data file.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Reads one row per time step with an optional header row.  Column kinds
/// come from the `kinds=` entry of the sidecar when it exists (real otherwise).
TimeSeries read_csv(const std::filesystem::path& path);
/// Values are written with 17 significant digits so a re-read is exact.
void write_csv(const TimeSeries& series, const std::filesystem::path& path);

std::vector<ColumnKind> parse_kinds(std::string_view text);
std::string format_kinds(const std::vector<ColumnKind>& kinds);

}  // namespace mimm

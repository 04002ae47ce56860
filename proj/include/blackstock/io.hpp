#pragma once

#include "blackstock/decay_experiments.hpp"
#include "blackstock/inequality_lab.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace blackstock {

inline constexpr std::string_view kSeriesHeader = "t,E,E1,E2,F1,F2,F3,L,D_cum,w_ptt,w_lap_vt";

// One row per sample, 17 significant digits.
void write_series_csv(std::ostream& out, const TimeSeries& series);
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);
// Rows become samples of a completed series; columns outside the CSV stay zero.
TimeSeries read_series_csv(const std::filesystem::path& path);

nlohmann::json summary_json(const TimeSeries& series);
nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const ThresholdReport& report);
nlohmann::json to_json(const RegularityStudy& study);
nlohmann::json to_json(const EmpiricalConstant& c);
nlohmann::json to_json(const GronwallParams& g);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// Binary checkpoint: magic "BLKSTOCK", u32 version, grid metadata, step,
// times, accumulators and coefficient arrays, all little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(std::ostream& out, const Checkpoint& cp);
Checkpoint load_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace blackstock

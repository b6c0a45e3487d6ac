#pragma once

#include "harness.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace tfpr::harness
{
    /// Header: algorithm,window,lambda_requested,lambda_realized,D,a,M,signal_id,snr_ms_db,
    /// projection_error,wall_time_s,iterations,seed,status. Infinite SNR is written as "inf".
    void write_csv(std::ostream& out, const std::vector<CellResult>& rows);
    void write_ranges_csv(std::ostream& out, const std::vector<ParameterRange>& ranges);

    nlohmann::json to_json(const CellResult& row);
    nlohmann::json to_json(const std::vector<CellResult>& rows);
    nlohmann::json to_json(const SweepSpec& spec);
    nlohmann::json to_json(const OptimizeResult& res);

    /// Writes `text` to `path`, creating parent directories.
    void write_text(const std::string& path, const std::string& text);
}  // namespace tfpr::harness

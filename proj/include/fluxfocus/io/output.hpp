#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fluxfocus/experiments.hpp"
#include "fluxfocus/field_map.hpp"
#include "fluxfocus/io/config.hpp"

namespace fluxfocus::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 17 significant digits; inf, -inf and nan spelled out
std::string format_number(double v);

// write to a temporary file in the same directory, then rename over the target
void write_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// '#'-prefixed metadata lines, one header line, comma separated rows
struct CsvTable {
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
std::string to_csv(const CsvTable& t);
CsvTable parse_csv(std::string_view text);

// x_m,y_m,value[,value_db]; db_per_unit converts value to tesla for the dB column
CsvTable field_map_table(const FieldMap& f, bool with_db, double tesla_per_unit);

Json to_json(const experiments::PowerLawFit& f);
Json sweep_json(const experiments::SweepResult& r, const SweepSection& spec);
Json compare_json(const experiments::CompareReport& r, const CompareSection& spec);
Json coupling_json(const experiments::CouplingReport& r);

// stable across reruns: no timestamps, no host names
Json manifest_json(Command command, const ScenarioConfig& config, const std::vector<std::string>& outputs,
                   int threads);

std::string dump(const Json& j);  // two-space indent, trailing newline

}  // namespace fluxfocus::io

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "cmsbm/model.hpp"
#include "cmsbm/params.hpp"

namespace cmsbm {

// Parameter files: JSON, or TOML when the path ends in ".toml". Both carry
// n, p, mu, rho, lambda, epsilon; lambda and epsilon are arrays, or scalars
// broadcast over an explicit L.
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& params);
ModelParams load_params(const std::filesystem::path& path);
ModelParams parse_params_text(std::string_view text, bool toml);

// Parses a JSON or TOML document into a JSON value; SchemaMismatch on
// syntax errors.
nlohmann::json parse_config_text(std::string_view text, bool toml);

// Binary matrix: 16-byte header (4-byte magic, uint32 rows, uint32 cols,
// uint32 zero) followed by rows*cols little-endian float64 in row-major order.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, std::string_view magic);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path, std::string_view magic);

inline constexpr std::string_view kSpikedMagic = "CMSY";
inline constexpr std::string_view kEstimateMagic = "CMSP";

// Observation directory: params.json, meta.json, Y.bin, layer_<l>.csv and,
// for planted draws, truth.json.
void write_observation(const std::filesystem::path& dir, const Observation& obs);
Observation read_observation(const std::filesystem::path& dir);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace cmsbm

#pragma once

#include <string>

#include <json.hpp>

#include "athermal/channels.hpp"
#include "athermal/qcore.hpp"

namespace athermal::io {

using nlohmann::json;

// Channel spec files: {"dim_in": n, "dim_out": m, "kraus": [matrix, ...], "label": optional}
// where a matrix is a row-major list of rows and every entry is an [re, im] pair.
json channel_to_json(const Channel& c, const std::string& label = "");
Channel channel_from_json(const json& j);
Channel load_channel(const std::string& path);

// Bath spec files: {"beta": b, "hamiltonian": matrix}.
json bath_to_json(double beta, const HermitianOperator& h);
ThermalContext bath_from_json(const json& j);
ThermalContext load_bath(const std::string& path);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& what);

void save_json(const json& j, const std::string& path);
json load_json_file(const std::string& path);

}  // namespace athermal::io

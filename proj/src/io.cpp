#include "athermal/io.hpp"

#include <fstream>
#include <sstream>

namespace athermal::io {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw InputError(what + " must be a nonempty list of rows");
  }
  const long rows = static_cast<long>(j.size());
  long cols = -1;
  Matrix m;
  for (long r = 0; r < rows; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || row.empty()) {
      throw InputError(what + " row " + std::to_string(r) + " must be a nonempty list");
    }
    if (cols < 0) {
      cols = static_cast<long>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<long>(row.size()) != cols) {
      throw InputError(what + " row " + std::to_string(r) + " has inconsistent length");
    }
    for (long c = 0; c < cols; ++c) {
      const json& entry = row[static_cast<size_t>(c)];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
        throw InputError(what + " entry (" + std::to_string(r) + "," + std::to_string(c) +
                         ") must be an [re, im] pair of numbers");
      }
      m(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

json channel_to_json(const Channel& c, const std::string& label) {
  json j;
  j["dim_in"] = c.dim_in();
  j["dim_out"] = c.dim_out();
  json kraus = json::array();
  for (const Matrix& k : c.kraus()) kraus.push_back(matrix_to_json(k));
  j["kraus"] = std::move(kraus);
  if (!label.empty()) j["label"] = label;
  return j;
}

Channel channel_from_json(const json& j) {
  if (!j.is_object()) throw InputError("channel spec must be a JSON object");
  for (const char* field : {"dim_in", "dim_out", "kraus"}) {
    if (!j.contains(field)) throw InputError(std::string("channel spec: missing field '") + field + "'");
  }
  if (!j["dim_in"].is_number_integer() || !j["dim_out"].is_number_integer()) {
    throw InputError("channel spec: dim_in and dim_out must be integers");
  }
  const int din = j["dim_in"].get<int>();
  const int dout = j["dim_out"].get<int>();
  if (din < 1 || dout < 1) throw InputError("channel spec: dimensions must be positive");
  if (!j["kraus"].is_array() || j["kraus"].empty()) {
    throw InputError("channel spec: kraus must be a nonempty list of matrices");
  }
  std::vector<Matrix> kraus;
  for (size_t i = 0; i < j["kraus"].size(); ++i) {
    Matrix k = matrix_from_json(j["kraus"][i], "channel spec: kraus[" + std::to_string(i) + "]");
    if (k.rows() != dout || k.cols() != din) {
      throw InputError("channel spec: kraus[" + std::to_string(i) + "] must be dim_out x dim_in");
    }
    kraus.push_back(std::move(k));
  }
  return from_kraus(std::move(kraus));
}

json bath_to_json(double beta, const HermitianOperator& h) {
  json j;
  j["beta"] = beta;
  j["hamiltonian"] = matrix_to_json(h.matrix());
  return j;
}

ThermalContext bath_from_json(const json& j) {
  if (!j.is_object()) throw InputError("bath spec must be a JSON object");
  if (!j.contains("beta") || !j["beta"].is_number()) {
    throw InputError("bath spec: missing numeric field 'beta'");
  }
  if (!j.contains("hamiltonian")) throw InputError("bath spec: missing field 'hamiltonian'");
  const Matrix h = matrix_from_json(j["hamiltonian"], "bath spec: hamiltonian");
  if (h.rows() != h.cols()) throw InputError("bath spec: hamiltonian must be square");
  if (!is_hermitian(h)) throw InputError("bath spec: hamiltonian is not Hermitian within 1e-10");
  return thermal_state(HermitianOperator(h), j["beta"].get<double>());
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    // Report the line of the parse failure for quicker fixes.
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
    size_t line = 1;
    for (size_t i = 0; i < std::min(e.byte, text.size()); ++i) {
      if (text[i] == '\n') ++line;
    }
    std::ostringstream msg;
    msg << path << ":" << line << ": JSON parse error: " << e.what();
    throw InputError(msg.str());
  }
}

Channel load_channel(const std::string& path) {
  try {
    return channel_from_json(load_json_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

ThermalContext load_bath(const std::string& path) {
  try {
    return bath_from_json(load_json_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace athermal::io

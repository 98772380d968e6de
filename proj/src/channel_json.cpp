#include "qswitch/channel_json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qswitch/errors.hpp"

namespace qswitch {

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_channel(std::string& out, const QuantumChannel& ch) {
  out += "{\"dim_in\":" + std::to_string(ch.dim_in()) + ",\"dim_out\":" + std::to_string(ch.dim_out()) +
         ",\"kraus\":[";
  for (std::size_t k = 0; k < ch.kraus_count(); ++k) {
    if (k > 0) out += ',';
    const ComplexMatrix& m = ch.kraus(k);
    out += '[';
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i > 0) out += ',';
      out += '[';
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j > 0) out += ',';
        out += '[';
        append_number(out, m(i, j).real());
        out += ',';
        append_number(out, m(i, j).imag());
        out += ']';
      }
      out += ']';
    }
    out += ']';
  }
  out += "]}";
}

QuantumChannel parse_channel(const nlohmann::json& j) {
  if (!j.is_object()) throw ContractViolation("channel JSON: expected an object");
  const auto dim_in = j.at("dim_in").get<std::size_t>();
  const auto dim_out = j.at("dim_out").get<std::size_t>();
  const auto& kraus = j.at("kraus");
  if (!kraus.is_array() || kraus.empty()) throw ContractViolation("channel JSON: kraus must be a non-empty array");
  std::vector<ComplexMatrix> ops;
  ops.reserve(kraus.size());
  for (const auto& op : kraus) {
    if (!op.is_array() || op.size() != dim_out) throw ContractViolation("channel JSON: Kraus row count != dim_out");
    ComplexMatrix m(dim_out, dim_in);
    for (std::size_t r = 0; r < dim_out; ++r) {
      const auto& row = op[r];
      if (!row.is_array() || row.size() != dim_in) throw ContractViolation("channel JSON: Kraus column count != dim_in");
      for (std::size_t c = 0; c < dim_in; ++c) {
        const auto& z = row[c];
        if (!z.is_array() || z.size() != 2) throw ContractViolation("channel JSON: entries must be [re, im]");
        m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
      }
    }
    ops.push_back(std::move(m));
  }
  return QuantumChannel(std::move(ops));
}

}  // namespace

std::string channel_to_json(const QuantumChannel& ch) {
  std::string out;
  append_channel(out, ch);
  return out;
}

std::string channels_to_json(const std::vector<QuantumChannel>& channels) {
  std::string out = "[";
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (i > 0) out += ",\n";
    append_channel(out, channels[i]);
  }
  out += "]\n";
  return out;
}

std::vector<QuantumChannel> channels_from_json(const std::string& text) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    std::vector<QuantumChannel> out;
    if (doc.is_array()) {
      for (const auto& item : doc) out.push_back(parse_channel(item));
    } else {
      out.push_back(parse_channel(doc));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("channel JSON: ") + e.what());
  }
}

QuantumChannel channel_from_json(const std::string& text) {
  auto channels = channels_from_json(text);
  if (channels.size() != 1) throw ContractViolation("channel JSON: expected exactly one channel");
  return std::move(channels.front());
}

std::vector<QuantumChannel> read_channels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return channels_from_json(buf.str());
}

void write_channels(const std::string& path, const std::vector<QuantumChannel>& channels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << channels_to_json(channels);
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace qswitch

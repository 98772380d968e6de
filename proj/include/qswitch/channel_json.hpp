#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qswitch/channel.hpp"

namespace qswitch {

/// {"dim_in":2,"dim_out":2,"kraus":[[[[re,im],...],...],...]}, numbers with
/// 17 significant digits.
std::string channel_to_json(const QuantumChannel& ch);
/// JSON array of channel objects.
std::string channels_to_json(const std::vector<QuantumChannel>& channels);

/// Accepts a single channel object or an array of them. Malformed documents
/// and shape mismatches throw ContractViolation.
std::vector<QuantumChannel> channels_from_json(const std::string& text);
QuantumChannel channel_from_json(const std::string& text);

/// File wrappers; unreadable or unwritable paths throw IoError.
std::vector<QuantumChannel> read_channels(const std::string& path);
void write_channels(const std::string& path, const std::vector<QuantumChannel>& channels);

}  // namespace qswitch

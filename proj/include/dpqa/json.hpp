#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace dpqa {

/// Every document this project writes keeps insertion order so that output
/// is byte-stable for golden comparisons.
using Json = nlohmann::ordered_json;

Json readJsonFile(const std::string& path);
void writeJsonFile(const std::string& path, const Json& doc);

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace dpqa

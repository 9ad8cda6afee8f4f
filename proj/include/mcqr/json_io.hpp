#pragma once

#include <json.hpp>

#include "mcqr/core.hpp"

namespace mcqr {

// JSON round-trips for the core types. nlohmann::json keeps object keys
// sorted, so dumped bytes are deterministic for equal values.

nlohmann::json option_to_json(const OptionEntry& option);
OptionEntry option_from_json(const nlohmann::json& j);

nlohmann::json item_to_json(const McqItem& item);
McqItem item_from_json(const nlohmann::json& j);

nlohmann::json response_to_json(const ModelResponse& response);
ModelResponse response_from_json(const nlohmann::json& j);

// Fields of the key flattened into the target object.
void key_to_json(const RunKey& key, nlohmann::json& target);
RunKey key_from_json(const nlohmann::json& j);

// Wrappers around nlohmann parsing that rephrase failures as mcqr::Error
// with the given context (file name, line number, ...).
nlohmann::json parse_json(std::string_view text, const std::string& context);

}  // namespace mcqr

#include "mcqr/json_io.hpp"

namespace mcqr {

namespace {

std::string kind_name(OptionKind kind) {
    switch (kind) {
        case OptionKind::Regular: return "regular";
        case OptionKind::NoCorrectAnswer: return "no_correct_answer";
        case OptionKind::Refuse: return "refuse";
        case OptionKind::IDoNotKnow: return "i_do_not_know";
    }
    throw Error("unknown option kind");
}

OptionKind kind_from_name(const std::string& name) {
    if (name == "regular") return OptionKind::Regular;
    if (name == "no_correct_answer") return OptionKind::NoCorrectAnswer;
    if (name == "refuse") return OptionKind::Refuse;
    if (name == "i_do_not_know") return OptionKind::IDoNotKnow;
    throw Error("unknown option kind: " + name);
}

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw Error(std::string("missing field '") + name + "'");
    return *it;
}

}  // namespace

nlohmann::json option_to_json(const OptionEntry& option) {
    nlohmann::json j;
    j["id"] = std::string(1, option.id);
    j["content"] = option.content;
    j["kind"] = kind_name(option.kind);
    return j;
}

OptionEntry option_from_json(const nlohmann::json& j) {
    OptionEntry option;
    const std::string id = field(j, "id").get<std::string>();
    if (id.size() != 1) throw Error("option id must be a single letter, got '" + id + "'");
    option.id = id[0];
    option.content = field(j, "content").get<std::string>();
    if (j.contains("kind")) option.kind = kind_from_name(j.at("kind").get<std::string>());
    return option;
}

nlohmann::json item_to_json(const McqItem& item) {
    nlohmann::json j;
    j["item_id"] = item.item_id;
    j["question"] = item.question;
    j["options"] = nlohmann::json::array();
    for (const OptionEntry& option : item.options) j["options"].push_back(option_to_json(option));
    j["gold"] = std::string(1, static_cast<char>('A' + item.gold));
    j["task"] = item.task;
    j["subcategory"] = item.subcategory;
    return j;
}

McqItem item_from_json(const nlohmann::json& j) {
    McqItem item;
    item.question = field(j, "question").get<std::string>();
    for (const nlohmann::json& option : field(j, "options"))
        item.options.push_back(option_from_json(option));
    const std::string gold = field(j, "gold").get<std::string>();
    if (gold.size() != 1 || gold[0] < 'A' || gold[0] > 'G')
        throw Error("gold must be a letter A..G, got '" + gold + "'");
    item.gold = gold[0] - 'A';
    if (j.contains("task")) item.task = j.at("task").get<std::string>();
    if (j.contains("subcategory")) item.subcategory = j.at("subcategory").get<std::string>();
    item.item_id = j.contains("item_id") ? j.at("item_id").get<std::string>()
                                         : stable_item_id(item.question, item.options);
    validate_item(item);
    return item;
}

nlohmann::json response_to_json(const ModelResponse& response) {
    nlohmann::json j;
    j["text"] = response.text;
    j["model_tag"] = response.model_tag;
    j["token_logprobs"] = nlohmann::json::array();
    for (const TokenLogprobRecord& rec : response.token_logprobs) {
        nlohmann::json r;
        r["position"] = rec.position;
        r["candidates"] = nlohmann::json::object();
        for (const auto& [token, lp] : rec.candidates) r["candidates"][token] = lp;
        j["token_logprobs"].push_back(std::move(r));
    }
    return j;
}

ModelResponse response_from_json(const nlohmann::json& j) {
    ModelResponse response;
    response.text = field(j, "text").get<std::string>();
    if (j.contains("model_tag")) response.model_tag = j.at("model_tag").get<std::string>();
    for (const nlohmann::json& r : field(j, "token_logprobs")) {
        TokenLogprobRecord rec;
        rec.position = field(r, "position").get<int>();
        for (const auto& [token, lp] : field(r, "candidates").items())
            rec.candidates[token] = lp.get<double>();
        response.token_logprobs.push_back(std::move(rec));
    }
    validate_response(response);
    return response;
}

void key_to_json(const RunKey& key, nlohmann::json& target) {
    target["item_id"] = key.item_id;
    target["perturbation_type"] = perturbation_name(key.type);
    target["perturbation_index"] = key.perturbation_index;
    target["shuffle_index"] = key.shuffle_index;
}

RunKey key_from_json(const nlohmann::json& j) {
    RunKey key;
    key.item_id = field(j, "item_id").get<std::string>();
    const std::string type = field(j, "perturbation_type").get<std::string>();
    const auto parsed = perturbation_from_name(type);
    if (!parsed) throw Error("unknown perturbation type: " + type);
    key.type = *parsed;
    key.perturbation_index = field(j, "perturbation_index").get<int>();
    key.shuffle_index = field(j, "shuffle_index").get<int>();
    return key;
}

nlohmann::json parse_json(std::string_view text, const std::string& context) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(context + ": " + e.what());
    }
}

}  // namespace mcqr

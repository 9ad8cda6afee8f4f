#include "mcqr/classifier.hpp"

#include <chrono>

#include <httplib.h>

#include "mcqr/json_io.hpp"
#include "mcqr/util.hpp"

namespace mcqr {

namespace {

struct SplitUrl {
    std::string base;
    std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
    const std::size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw Error("classifier endpoint must start with http:// or https://, got " + endpoint);
    const std::size_t path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

ClassifierClient::ClassifierClient(ClassifierConfig config, SpecialPhraseLexicon lexicon)
    : config_(std::move(config)), lexicon_(std::move(lexicon)) {
    if (config_.endpoint.empty()) return;
    const SplitUrl url = split_url(config_.endpoint);
    base_ = url.base;
    path_ = url.path;
}

ExtractionResult ClassifierClient::classify(const std::string& text,
                                            const std::vector<OptionEntry>& options) const {
    if (!enabled()) throw Error("classifier endpoint not configured");
    const std::string request_id = to_hex(fnv1a64(text));

    nlohmann::json body;
    body["text"] = text;
    body["options"] = nlohmann::json::array();
    for (const OptionEntry& option : options)
        body["options"].push_back(
            nlohmann::json{{"id", std::string(1, option.id)}, {"content", option.content}});

    httplib::Client client(base_);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
    const httplib::Result res = client.Post(path_, body.dump(), "application/json");

    if (!res) {
        if (config_.fallback_to_patterns) return extract_text_answer(text, options, lexicon_);
        throw Error("classifier transport error (request " + request_id +
                    "): " + httplib::to_string(res.error()));
    }
    if (res->status != 200)
        throw Error("classifier HTTP " + std::to_string(res->status) + " (request " + request_id +
                    "): run marked unscored");

    const nlohmann::json reply = parse_json(res->body, "classifier reply (request " + request_id + ")");
    if (!reply.contains("label") || !reply["label"].is_string())
        throw Error("classifier reply lacks a label (request " + request_id +
                    "): run marked unscored");
    const std::string label_text = reply["label"].get<std::string>();
    const auto label = label_from_name(label_text);
    if (!label)
        throw Error("classifier returned unknown label '" + label_text + "' (request " +
                    request_id + "): run marked unscored");
    if (is_option_label(*label)) {
        const int index = option_index(*label);
        if (index >= static_cast<int>(options.size()))
            throw Error("classifier returned label " + label_text + " but only " +
                        std::to_string(options.size()) + " options were sent (request " +
                        request_id + "): run marked unscored");
    }

    ExtractionResult result;
    result.label = *label;
    result.method =
        *label == AnswerLabel::NaN ? ExtractionMethod::Failed : ExtractionMethod::ExternalClassifier;
    result.evidence = "classifier label " + label_text;
    if (reply.contains("confidence") && reply["confidence"].is_number())
        result.evidence += " confidence " + fmt_double(reply["confidence"].get<double>());
    return result;
}

}  // namespace mcqr

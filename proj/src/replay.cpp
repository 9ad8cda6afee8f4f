#include "mcqr/replay.hpp"

#include <fstream>
#include <ostream>

#include "mcqr/json_io.hpp"
#include "mcqr/util.hpp"

namespace mcqr {

std::string prompt_digest(std::string_view prompt) { return to_hex(fnv1a64(prompt)); }

std::string record_to_line(const ReplayRecord& record) {
    nlohmann::json j;
    key_to_json(record.key, j);
    j["prompt_digest"] = record.prompt_digest;
    j["response"] = response_to_json(record.response);
    j["timestamp_ms"] = record.timestamp_ms;
    return j.dump();
}

ReplayRecord record_from_line(std::string_view line, const std::string& context) {
    const nlohmann::json j = parse_json(line, context);
    ReplayRecord record;
    try {
        record.key = key_from_json(j);
        if (!j.contains("prompt_digest")) throw Error("missing field 'prompt_digest'");
        record.prompt_digest = j.at("prompt_digest").get<std::string>();
        if (!j.contains("response")) throw Error("missing field 'response'");
        record.response = response_from_json(j.at("response"));
        if (j.contains("timestamp_ms")) record.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(context + ": " + e.what());
    } catch (const Error& e) {
        throw Error(context + ": " + e.what());
    }
    return record;
}

ReplayStore ReplayStore::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open replay log " + file.string());
    ReplayStore store;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        store.put(record_from_line(line, file.string() + ":" + std::to_string(line_no)));
    }
    return store;
}

void ReplayStore::put(ReplayRecord record) {
    const RunKey key = record.key;
    if (index_.count(key)) throw Error("duplicate replay record for " + key.str());
    index_[key] = records_.size();
    records_.push_back(std::move(record));
}

bool ReplayStore::contains(const RunKey& key) const { return index_.count(key) > 0; }

const ReplayRecord& ReplayStore::get(const RunKey& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) throw Error("no replay record for " + key.str());
    return records_[it->second];
}

const ReplayRecord& ReplayStore::get_verified(const RunKey& key, std::string_view prompt) const {
    const ReplayRecord& record = get(key);
    const std::string digest = prompt_digest(prompt);
    if (digest != record.prompt_digest)
        throw Error("prompt digest mismatch for " + key.str() + ": log has " +
                    record.prompt_digest + ", campaign regenerates " + digest +
                    " (prompt drift — rerun live or restore the original configuration)");
    return record;
}

void ReplayStore::write_to(std::ostream& out) const {
    for (const ReplayRecord& record : records_) out << record_to_line(record) << '\n';
}

}  // namespace mcqr

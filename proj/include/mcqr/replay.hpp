#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr {

// One persisted inference: the run's identity, a digest of the exact prompt
// sent, the normalized response, and the adapter's timestamp (deterministic
// adapters stamp 0 so logs stay byte-reproducible).
struct ReplayRecord {
    RunKey key;
    std::string prompt_digest;  // fnv1a64 hex of the prompt text
    ModelResponse response;
    std::int64_t timestamp_ms = 0;
};

std::string prompt_digest(std::string_view prompt);

// One record as a single JSON line (keys sorted, no trailing newline).
std::string record_to_line(const ReplayRecord& record);
ReplayRecord record_from_line(std::string_view line, const std::string& context);

// Append-only in-memory record store mirroring the on-disk log: insertion
// order is preserved, keys are unique, lookups are by RunKey.
class ReplayStore {
  public:
    ReplayStore() = default;

    static ReplayStore load(const std::filesystem::path& file);

    // Duplicate keys are an error: a campaign plans each run exactly once.
    void put(ReplayRecord record);

    bool contains(const RunKey& key) const;

    // Missing key is an error naming the key.
    const ReplayRecord& get(const RunKey& key) const;

    // Digest mismatch (prompt drift between campaign and log) is an error
    // naming the key.
    const ReplayRecord& get_verified(const RunKey& key, std::string_view prompt) const;

    const std::vector<ReplayRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    // Writes every record in insertion order, one line each.
    void write_to(std::ostream& out) const;

  private:
    std::vector<ReplayRecord> records_;
    std::map<RunKey, std::size_t> index_;
};

}  // namespace mcqr

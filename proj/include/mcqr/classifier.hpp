#pragma once

#include <string>
#include <vector>

#include "mcqr/core.hpp"
#include "mcqr/extract.hpp"

namespace mcqr {

struct ClassifierConfig {
    std::string endpoint;  // empty = classifier disabled
    double timeout_s = 10.0;
    bool fallback_to_patterns = true;  // pattern cascade on transport failure
};

// Client for an external answer classifier. Wire contract, JSON over HTTP
// POST: request {"text": ..., "options": [{"id": "A", "content": ...}, ...]},
// response {"label": ..., "confidence": ...} where label is a present option
// ID or one of X / Y / Z / NaN.
//
// Transport failure: falls back to the pattern cascade when enabled (method
// reported as the pattern rule that fired), else throws. A malformed or
// out-of-contract reply always throws — the run is marked unscored, never
// silently mislabeled. Errors carry the request digest for correlation.
class ClassifierClient {
  public:
    explicit ClassifierClient(ClassifierConfig config,
                              SpecialPhraseLexicon lexicon = SpecialPhraseLexicon::defaults());

    bool enabled() const { return !config_.endpoint.empty(); }

    // Safe for concurrent use; each call issues an independent request.
    ExtractionResult classify(const std::string& text,
                              const std::vector<OptionEntry>& options) const;

  private:
    ClassifierConfig config_;
    SpecialPhraseLexicon lexicon_;
    std::string base_;
    std::string path_;
};

}  // namespace mcqr

#include <doctest.h>

#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "mcqr/extract.hpp"
#include "mcqr/json_io.hpp"
#include "mcqr/metrics.hpp"
#include "mcqr/prompt.hpp"
#include "mcqr/simulation.hpp"

using namespace mcqr;

namespace {

McqItem numbered_item(int k) {
    McqItem item;
    item.item_id = "sim#" + std::to_string(k);
    item.question = "Synthetic calibration question number " + std::to_string(k) +
                    " asked for measurement purposes only?";
    for (int j = 0; j < 4; ++j)
        item.options.push_back({static_cast<char>('A' + j),
                                "value " + std::to_string(k) + "-" + std::to_string(j),
                                OptionKind::Regular});
    item.gold = k % 4;  // balanced gold placement
    item.task = "sim";
    return item;
}

RunView identity_view(const McqItem& item) {
    RunView view;
    view.item_id = item.item_id;
    view.options = item.options;
    view.permutation = {0, 1, 2, 3};
    view.gold_canonical = item.gold;
    return view;
}

struct Channels {
    ContentClass first;
    ContentClass text;
};

Channels answer_channels(const SyntheticResponder& responder, const McqItem& item) {
    RunView view = identity_view(item);
    ModelResponse response = synthetic_respond(responder, view, build_prompt(item));
    TokenOffsetPolicy policy;  // auto
    Channels ch;
    ExtractionResult ft = first_token_answer(response, 4, policy);
    ch.first = ft.label == AnswerLabel::NaN ? ContentClass()
                                            : content_of(ft.label, view.options);
    ExtractionResult tx = extract_text_answer(response.text, view.options);
    ch.text = tx.label == AnswerLabel::NaN ? ContentClass()
                                           : content_of(tx.label, view.options);
    return ch;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("endpoint parsing covers every knob") {
    SyntheticResponder r = SyntheticResponder::parse(
        "synthetic:position_bias=2,0,0,-0.5;last_position_weight=0.3;content_skill=0.7;"
        "knowledge_weight=1.5;sigma=0.4;mismatch_prob=0.1;refusal_prob=0.05;"
        "special_pref=1,2,3;style=answer_prefix;seed=9;tag=sim1");
    CHECK(r.position_bias == std::vector<double>{2.0, 0.0, 0.0, -0.5});
    CHECK(r.last_position_weight == 0.3);
    CHECK(r.content_skill == 0.7);
    CHECK(r.knowledge_weight == 1.5);
    CHECK(r.content_noise_sigma == 0.4);
    CHECK(r.mismatch_prob == 0.1);
    CHECK(r.refusal_prob == 0.05);
    CHECK(r.special_pref == std::array<double, 3>{1.0, 2.0, 3.0});
    CHECK(r.style == SyntheticResponder::Style::AnswerPrefix);
    CHECK(r.seed == 9);
    CHECK(r.tag == "sim1");

    SyntheticResponder defaults = SyntheticResponder::parse("synthetic:");
    CHECK(defaults.content_skill == 1.0);
    CHECK(defaults.style == SyntheticResponder::Style::BareLetter);

    CHECK_THROWS_AS(SyntheticResponder::parse("synthetic:bogus_knob=1"), Error);
    CHECK_THROWS_AS(SyntheticResponder::parse("http://example"), Error);
    CHECK_THROWS_AS(SyntheticResponder::parse("synthetic:style=cursive"), Error);
}

TEST_CASE("validation rejects out-of-range settings") {
    SyntheticResponder r;
    CHECK_NOTHROW(r.validate());
    SyntheticResponder bad = r;
    bad.content_skill = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = r;
    bad.mismatch_prob = -0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = r;
    bad.content_noise_sigma = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = r;
    bad.special_pref = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = r;
    bad.position_bias.assign(8, 0.0);
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("perfect responder always answers gold on both channels") {
    SyntheticResponder r;  // skill 1, no bias, no mismatch, no refusal
    r.seed = 11;
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        McqItem item = numbered_item(k);
        Channels ch = answer_channels(r, item);
        ContentClass gold = ContentClass::option(item.options[item.gold].content);
        CHECK(ch.first == gold);
        CHECK(ch.text == gold);
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("pure position bias drives recall spread toward its maximum") {
    SyntheticResponder r;
    r.position_bias = {2.0, 0.0, 0.0, 0.0};
    r.content_skill = 0.0;
    r.seed = 13;
    std::vector<Outcome> outcomes;
    for (int k = 0; k < 2000; ++k) {
        McqItem item = numbered_item(k);
        Channels ch = answer_channels(r, item);
        outcomes.push_back({ch.first, ContentClass::option(item.options[item.gold].content),
                            item.gold});
    }
    double rstd = recall_stddev(recalls(outcomes));
    // closed form: the responder almost always answers position A, so recall
    // is ~1 where the gold sits at A and ~0 elsewhere -> sqrt(3)/4 = 0.433
    CHECK(rstd == doctest::Approx(0.4330127019).epsilon(0.02));
    CHECK(accuracy(outcomes) == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("unbiased responder has near-zero recall spread") {
    SyntheticResponder r;
    r.content_skill = 0.7;
    r.seed = 17;
    std::vector<Outcome> outcomes;
    for (int k = 0; k < 5000; ++k) {
        McqItem item = numbered_item(k);
        Channels ch = answer_channels(r, item);
        outcomes.push_back({ch.first, ContentClass::option(item.options[item.gold].content),
                            item.gold});
    }
    CHECK(recall_stddev(recalls(outcomes)) < 0.02);
}

TEST_CASE("measured mismatch rate converges to mismatch_prob") {
    SyntheticResponder r;
    r.mismatch_prob = 0.5;
    r.content_skill = 0.7;
    r.seed = 19;
    std::vector<std::pair<ContentClass, ContentClass>> pairs;
    for (int k = 0; k < 5000; ++k) {
        Channels ch = answer_channels(r, numbered_item(k));
        pairs.push_back({ch.first, ch.text});
    }
    CHECK(mismatch_rate(pairs) == doctest::Approx(0.5).epsilon(0.06));  // +-0.03 absolute

    SyntheticResponder never = r;
    never.mismatch_prob = 0.0;
    never.seed = 23;
    pairs.clear();
    for (int k = 0; k < 500; ++k) {
        Channels ch = answer_channels(never, numbered_item(k));
        pairs.push_back({ch.first, ch.text});
    }
    CHECK(mismatch_rate(pairs) == 0.0);
}

TEST_CASE("every style parses on both channels at its documented offset") {
    using Style = SyntheticResponder::Style;
    const std::pair<Style, int> expectations[] = {
        {Style::BareLetter, 0}, {Style::LetterContent, 0}, {Style::AnswerPrefix, 2},
        {Style::LeadingSpace, 1}, {Style::Verbose, 2},
    };
    for (const auto& [style, offset] : expectations) {
        SyntheticResponder r;
        r.style = style;
        r.seed = 29;
        for (int k = 0; k < 20; ++k) {
            McqItem item = numbered_item(k);
            RunView view = identity_view(item);
            ModelResponse response = synthetic_respond(r, view, build_prompt(item));
            CHECK(resolve_offset_auto(response, 4) == offset);
            Channels ch = answer_channels(r, item);
            ContentClass gold = ContentClass::option(item.options[item.gold].content);
            CHECK(ch.first == gold);
            CHECK(ch.text == gold);  // skill 1: text always names the gold
        }
    }
}

TEST_CASE("refusals produce special texts and no first-token letter") {
    SyntheticResponder r;
    r.refusal_prob = 1.0;
    r.special_pref = {0.0, 1.0, 0.0};  // always the refusal phrasing
    r.seed = 31;
    for (int k = 0; k < 20; ++k) {
        McqItem item = numbered_item(k);
        RunView view = identity_view(item);
        ModelResponse response = synthetic_respond(r, view, build_prompt(item));
        ExtractionResult text = extract_text_answer(response.text, view.options);
        CHECK(text.label == AnswerLabel::Y);
        TokenOffsetPolicy policy;
        ExtractionResult ft = first_token_answer(response, 4, policy);
        CHECK(ft.label == AnswerLabel::NaN);
        CHECK(ft.method == ExtractionMethod::Failed);
    }

    SyntheticResponder mix = r;
    mix.special_pref = {1.0, 1.0, 1.0};
    mix.seed = 37;
    bool saw[3] = {false, false, false};
    for (int k = 0; k < 200; ++k) {
        McqItem item = numbered_item(k);
        ModelResponse response = synthetic_respond(mix, identity_view(item), build_prompt(item));
        AnswerLabel label = extract_text_answer(response.text, item.options).label;
        if (label == AnswerLabel::X) saw[0] = true;
        if (label == AnswerLabel::Y) saw[1] = true;
        if (label == AnswerLabel::Z) saw[2] = true;
    }
    CHECK(saw[0]);
    CHECK(saw[1]);
    CHECK(saw[2]);
}

TEST_CASE("responses are pure functions of their inputs") {
    SyntheticResponder r;
    r.mismatch_prob = 0.3;
    r.content_skill = 0.5;
    r.seed = 41;
    McqItem item = numbered_item(7);
    RunView view = identity_view(item);
    std::string prompt = build_prompt(item);
    ModelResponse a = synthetic_respond(r, view, prompt);
    ModelResponse b = synthetic_respond(r, view, prompt);
    CHECK(response_to_json(a).dump() == response_to_json(b).dump());

    // the text-corruption draw is keyed by the prompt, so a perturbed prompt
    // may re-roll it, but the same prompt never does
    ModelResponse c = synthetic_respond(r, view, prompt + " perturbed");
    CHECK(response_to_json(c).dump() != "");  // still well-formed
    CHECK_NOTHROW(validate_response(c));
}

TEST_CASE("last position weight shifts mass to the final option") {
    SyntheticResponder r;
    r.last_position_weight = 2.0;
    r.content_skill = 0.0;
    r.seed = 43;
    int last = 0;
    const int n = 400;
    for (int k = 0; k < n; ++k) {
        McqItem item = numbered_item(k);
        Channels ch = answer_channels(r, item);
        if (ch.first == ContentClass::option(item.options[3].content)) ++last;
    }
    CHECK(static_cast<double>(last) / n > 0.9);
}

}  // TEST_SUITE

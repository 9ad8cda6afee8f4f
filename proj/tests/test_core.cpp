#include <doctest.h>

#include "helpers.hpp"
#include "mcqr/core.hpp"

using namespace mcqr;
using test::four_options;
using test::make_item;

TEST_SUITE("core") {

TEST_CASE("label round trips") {
    for (int i = 0; i < 7; ++i) {
        AnswerLabel label = option_label(i);
        CHECK(is_option_label(label));
        CHECK(option_index(label) == i);
        CHECK(label_from_char(label_char(label)) == label);
        CHECK(label_from_name(label_name(label)) == label);
    }
    CHECK(label_name(AnswerLabel::NaN) == "NaN");
    CHECK(label_char(AnswerLabel::NaN) == '?');
    CHECK(label_from_name("NaN") == AnswerLabel::NaN);
    CHECK(label_from_name("H") == std::nullopt);
    CHECK(label_from_name("AB") == std::nullopt);
    CHECK_FALSE(is_option_label(AnswerLabel::X));
    CHECK_THROWS_AS(option_index(AnswerLabel::Y), Error);
    CHECK_THROWS_AS(option_label(7), Error);
    CHECK_THROWS_AS(label_from_char('h'), Error);
}

TEST_CASE("special classes") {
    CHECK(special_class_of(OptionKind::NoCorrectAnswer) == AnswerLabel::X);
    CHECK(special_class_of(OptionKind::Refuse) == AnswerLabel::Y);
    CHECK(special_class_of(OptionKind::IDoNotKnow) == AnswerLabel::Z);
    CHECK_THROWS_AS(special_class_of(OptionKind::Regular), Error);
}

TEST_CASE("validate_item accepts the canonical shapes") {
    McqItem item = make_item("ok", 2);
    CHECK_NOTHROW(validate_item(item));

    McqItem extra = item;
    extra.options.push_back({'E', "No correct answer", OptionKind::NoCorrectAnswer});
    extra.options.push_back({'F', "Refuse", OptionKind::Refuse});
    extra.options.push_back({'G', "I do not know", OptionKind::IDoNotKnow});
    CHECK_NOTHROW(validate_item(extra));
}

TEST_CASE("validate_item rejects malformed items") {
    McqItem item = make_item("bad");

    McqItem wrong_count = item;
    wrong_count.options.pop_back();
    CHECK_THROWS_WITH_AS(validate_item(wrong_count), "options length must be 4 or 7, got 3",
                         Error);

    McqItem bad_ids = item;
    bad_ids.options[1].id = 'C';
    CHECK_THROWS_WITH_AS(validate_item(bad_ids), "option ids must be consecutive letters from A",
                         Error);

    McqItem dup = item;
    dup.options[3].content = dup.options[0].content;
    CHECK_THROWS_WITH_AS(validate_item(dup), "duplicate option content", Error);

    McqItem empty = item;
    empty.options[2].content.clear();
    CHECK_THROWS_WITH_AS(validate_item(empty), "empty option content", Error);

    McqItem gold_range = item;
    gold_range.gold = 4;
    CHECK_THROWS_WITH_AS(validate_item(gold_range), "gold out of range", Error);

    McqItem sneaky = item;
    sneaky.options[1].kind = OptionKind::Refuse;
    CHECK_THROWS_WITH_AS(validate_item(sneaky),
                         "non-regular option kind outside extra-options mode", Error);
}

TEST_CASE("content class identity survives permutation") {
    auto options = four_options();
    ContentClass direct = content_of(AnswerLabel::B, options);
    CHECK(direct.is_option());
    CHECK(direct.option_content() == "maple syrup");

    // same contents shown in a different order under different letters
    std::vector<OptionEntry> permuted = {{'A', "copper wire", OptionKind::Regular},
                                         {'B', "granite slab", OptionKind::Regular},
                                         {'C', "maple syrup", OptionKind::Regular},
                                         {'D', "oak tree", OptionKind::Regular}};
    CHECK(content_of(AnswerLabel::C, permuted) == direct);
    CHECK(content_of(AnswerLabel::A, permuted) != direct);

    CHECK(content_of(AnswerLabel::X, options) == ContentClass::special(AnswerLabel::X));
    CHECK(content_of(AnswerLabel::NaN, options) == ContentClass());
    CHECK_THROWS_AS(content_of(AnswerLabel::G, options), Error);
}

TEST_CASE("injected options resolve to their special class") {
    std::vector<OptionEntry> options = {{'A', "oak tree", OptionKind::Regular},
                                        {'B', "Refuse", OptionKind::Refuse},
                                        {'C', "maple syrup", OptionKind::Regular},
                                        {'D', "No correct answer", OptionKind::NoCorrectAnswer},
                                        {'E', "granite slab", OptionKind::Regular},
                                        {'F', "I do not know", OptionKind::IDoNotKnow},
                                        {'G', "copper wire", OptionKind::Regular}};
    CHECK(content_of(AnswerLabel::B, options) == ContentClass::special(AnswerLabel::Y));
    CHECK(content_of(AnswerLabel::D, options) == ContentClass::special(AnswerLabel::X));
    CHECK(content_of(AnswerLabel::F, options) == ContentClass::special(AnswerLabel::Z));
    CHECK(content_of(AnswerLabel::G, options).option_content() == "copper wire");
}

TEST_CASE("content class ordering puts options before specials") {
    ContentClass opt = ContentClass::option("alpha");
    ContentClass x = ContentClass::special(AnswerLabel::X);
    ContentClass nan;
    CHECK(opt < x);
    CHECK(x < nan);
    CHECK_FALSE(nan < x);
    CHECK(ContentClass::option("alpha") < ContentClass::option("beta"));
    CHECK(nan.display() == "NaN");
    CHECK(opt.display() == "alpha");
    CHECK_THROWS_AS(opt.special_class(), Error);
    CHECK_THROWS_AS(nan.option_content(), Error);
}

TEST_CASE("run keys format and order") {
    RunKey key{"anatomy#3", PerturbationType::LetterTypos, 2, 4};
    CHECK(key.str() == "anatomy#3/letter_typos/p2/s4");
    RunKey baseline{"anatomy#3", PerturbationType::None, 0, 0};
    CHECK(baseline.str() == "anatomy#3/none/p0/s0");
    CHECK(baseline < key);
    CHECK(key == key);

    CHECK(perturbation_from_name("extra_options") == PerturbationType::ExtraOptions);
    CHECK(perturbation_from_name("unknown") == std::nullopt);
    for (int t = 0; t <= 5; ++t) {
        auto type = static_cast<PerturbationType>(t);
        CHECK(perturbation_from_name(perturbation_name(type)) == type);
    }
}

TEST_CASE("stable item ids depend on question and contents") {
    auto options = four_options();
    std::string base = stable_item_id("What color is the sky?", options);
    CHECK(base == stable_item_id("What color is the sky?", options));
    CHECK(base != stable_item_id("What color is the sea?", options));
    auto other = four_options("oak", "maple syrup", "granite slab", "copper wire");
    CHECK(base != stable_item_id("What color is the sky?", other));
}

TEST_CASE("response validation") {
    ModelResponse response;
    response.text = "B";
    response.token_logprobs.push_back({0, {{"B", -0.1}, {"A", -2.5}}});
    response.token_logprobs.push_back({1, {{".", -0.2}}});
    CHECK_NOTHROW(validate_response(response));

    ModelResponse gap = response;
    gap.token_logprobs[1].position = 2;
    CHECK_THROWS_WITH_AS(validate_response(gap),
                         "token logprob positions must be 0..P-1 without gaps", Error);

    ModelResponse empty = response;
    empty.token_logprobs[1].candidates.clear();
    CHECK_THROWS_WITH_AS(validate_response(empty), "empty candidate map at position 1", Error);

    ModelResponse positive = response;
    positive.token_logprobs[0].candidates["B"] = 0.25;
    CHECK_THROWS_WITH_AS(validate_response(positive),
                         "positive log-probability for token 'B' at position 0", Error);
}

}  // TEST_SUITE

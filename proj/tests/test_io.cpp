#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "helpers.hpp"
#include "mcqr/config.hpp"
#include "mcqr/dataset.hpp"
#include "mcqr/json_io.hpp"
#include "mcqr/replay.hpp"
#include "mcqr/util.hpp"

using namespace mcqr;
using test::data_dir;
using test::make_item;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("mcqr_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

bool error_mentions(const std::function<void()>& fn, const std::string& needle) {
    try {
        fn();
    } catch (const Error& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

ReplayRecord sample_record(const std::string& item_id, int shuffle) {
    ReplayRecord record;
    record.key = {item_id, PerturbationType::LetterTypos, 1, shuffle};
    record.prompt_digest = prompt_digest("prompt text");
    record.response.text = "Answer: B";
    record.response.token_logprobs.push_back({0, {{"Answer", -0.05}}});
    record.response.token_logprobs.push_back({1, {{":", -0.02}}});
    record.response.token_logprobs.push_back({2, {{" B", -0.3}, {" A", -1.9}}});
    record.response.model_tag = "demo-model";
    return record;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("fmt_double is stable and terse") {
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(fmt_double(2.0) == "2");
    CHECK(fmt_double(0.0) == "0");
    CHECK(fmt_double(0.35355339059327373) == "0.3535533906");
    CHECK(fmt_double(1e-12) == "1e-12");
    CHECK(fmt_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("core types round-trip through json") {
    McqItem item = make_item("round#1", 2, "anatomy");
    nlohmann::json j = item_to_json(item);
    McqItem back = item_from_json(j);
    CHECK(back.item_id == item.item_id);
    CHECK(back.question == item.question);
    CHECK(back.gold == item.gold);
    CHECK(back.task == item.task);
    CHECK(back.subcategory == item.subcategory);
    REQUIRE(back.options.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(back.options[i].id == item.options[i].id);
        CHECK(back.options[i].content == item.options[i].content);
    }

    // items without an id get a stable content-derived one
    nlohmann::json anon = j;
    anon.erase("item_id");
    McqItem derived1 = item_from_json(anon);
    McqItem derived2 = item_from_json(anon);
    CHECK(derived1.item_id == derived2.item_id);
    CHECK_FALSE(derived1.item_id.empty());

    ModelResponse response = sample_record("x", 0).response;
    ModelResponse response_back = response_from_json(response_to_json(response));
    CHECK(response_to_json(response_back).dump() == response_to_json(response).dump());

    RunKey key{"item#9", PerturbationType::ExtraOptions, 1, 4};
    nlohmann::json flat = nlohmann::json::object();
    key_to_json(key, flat);
    CHECK(key_from_json(flat) == key);
}

TEST_CASE("json parse failures carry their context") {
    CHECK(error_mentions([] { parse_json("{broken", "config demo.json"); }, "config demo.json"));
}

TEST_CASE("option kinds round-trip by name") {
    OptionEntry special{'E', "No correct answer", OptionKind::NoCorrectAnswer};
    OptionEntry back = option_from_json(option_to_json(special));
    CHECK(back.kind == OptionKind::NoCorrectAnswer);
    CHECK(option_to_json(special)["kind"] == "no_correct_answer");
    CHECK_THROWS_AS(option_from_json(nlohmann::json{{"id", "A"}, {"content", "x"},
                                                    {"kind", "mystery"}}),
                    Error);
}

TEST_CASE("replay records round-trip as single lines") {
    ReplayRecord record = sample_record("item#1", 3);
    std::string line = record_to_line(record);
    CHECK(line.find('\n') == std::string::npos);
    ReplayRecord back = record_from_line(line, "replay.jsonl:1");
    CHECK(back.key == record.key);
    CHECK(back.prompt_digest == record.prompt_digest);
    CHECK(back.timestamp_ms == record.timestamp_ms);
    CHECK(record_to_line(back) == line);

    CHECK(error_mentions([] { record_from_line("not json", "replay.jsonl:7"); },
                         "replay.jsonl:7"));
}

TEST_CASE("replay store enforces unique keys and digest agreement") {
    ReplayStore store;
    ReplayRecord record = sample_record("item#1", 0);
    store.put(record);
    CHECK(store.contains(record.key));
    CHECK(store.size() == 1);
    CHECK(error_mentions([&] { store.put(record); }, "duplicate replay record"));

    RunKey missing{"item#2", PerturbationType::None, 0, 0};
    CHECK_FALSE(store.contains(missing));
    CHECK(error_mentions([&] { store.get(missing); }, missing.str()));

    CHECK_NOTHROW(store.get_verified(record.key, "prompt text"));
    CHECK(error_mentions([&] { store.get_verified(record.key, "prompt text v2"); },
                         "prompt drift"));
}

TEST_CASE("replay store persists byte-identically") {
    fs::path dir = fresh_dir("replay");
    ReplayStore store;
    store.put(sample_record("item#1", 0));
    store.put(sample_record("item#1", 1));
    store.put(sample_record("item#2", 0));

    std::ostringstream buffer;
    store.write_to(buffer);
    write_file(dir / "replay.jsonl", buffer.str());

    ReplayStore loaded = ReplayStore::load(dir / "replay.jsonl");
    REQUIRE(loaded.size() == 3);
    std::ostringstream again;
    loaded.write_to(again);
    CHECK(again.str() == buffer.str());
    CHECK(loaded.records()[2].key.item_id == "item#2");  // insertion order kept

    CHECK_THROWS_AS(ReplayStore::load(dir / "absent.jsonl"), Error);
}

TEST_CASE("subject table lookups fall back to other") {
    SubjectMap subjects = SubjectMap::load(data_dir() + "/mmlu_subjects.tsv");
    CHECK(subjects.lookup("abstract_algebra") == "math");
    CHECK(subjects.lookup("college_medicine") == "health");
    CHECK(subjects.lookup("no_such_subject") == "other");

    fs::path dir = fresh_dir("subjects");
    write_file(dir / "dup.tsv", "alpha\tmath\nalpha\tlaw\n");
    CHECK_THROWS_AS(SubjectMap::load(dir / "dup.tsv"), Error);
}

TEST_CASE("csv datasets parse quoting, stems and golds") {
    fs::path dir = fresh_dir("csv");
    write_file(dir / "ancient_history_test.csv",
               "Which ruler, \"the Great\", built it?,Cyrus,Darius,Xerxes,Croesus,B\n"
               "\"A question\nspanning lines, with commas\",one,two,three,four,D\n");
    SubjectMap subjects;
    subjects.category_by_subject["ancient_history"] = "history";

    std::vector<McqItem> items = load_csv_file(dir / "ancient_history_test.csv", subjects);
    REQUIRE(items.size() == 2);
    CHECK(items[0].item_id == "ancient_history#0");
    CHECK(items[0].task == "ancient_history");
    CHECK(items[0].subcategory == "history");
    CHECK(items[0].question == "Which ruler, \"the Great\", built it?");
    CHECK(items[0].options[1].content == "Darius");
    CHECK(items[0].gold == 1);
    CHECK(items[1].question == "A question\nspanning lines, with commas");
    CHECK(items[1].gold == 3);
}

TEST_CASE("csv errors name the file and line") {
    fs::path dir = fresh_dir("csv_err");
    SubjectMap subjects;

    write_file(dir / "short_test.csv", "q,only,three,fields,A\n");
    CHECK(error_mentions([&] { load_csv_file(dir / "short_test.csv", subjects); },
                         "expected 6 fields, got 5"));

    write_file(dir / "letter_test.csv", "q,a,b,c,d,Q\n");
    CHECK(error_mentions([&] { load_csv_file(dir / "letter_test.csv", subjects); },
                         "unknown answer letter"));

    write_file(dir / "quote_test.csv", "\"unterminated,a,b,c,d,A\n");
    CHECK_THROWS_AS(load_csv_file(dir / "quote_test.csv", subjects), Error);
}

TEST_CASE("directory datasets load in filename order") {
    std::vector<McqItem> items = load_csv(data_dir() + "/fixtures/dataset", SubjectMap{});
    REQUIRE(items.size() == 50);
    CHECK(items[0].item_id == "fixture_alpha#0");
    CHECK(items[25].item_id == "fixture_beta#0");
    CHECK(items[0].subcategory == "other");  // empty subject map
    int gold_counts[4] = {0, 0, 0, 0};
    for (const McqItem& item : items) {
        CHECK_NOTHROW(validate_item(item));
        ++gold_counts[item.gold];
    }
    for (int c : gold_counts) CHECK(c >= 12);
    // the quoted row survives RFC-4180 parsing
    CHECK(items[7].question.find("\"entry 207, checked twice, never amended\"") !=
          std::string::npos);
}

TEST_CASE("jsonl datasets round-trip items") {
    fs::path dir = fresh_dir("jsonl");
    McqItem a = make_item("alpha#0", 1, "alpha");
    McqItem b = make_item("alpha#1", 2, "alpha");
    write_file(dir / "items.jsonl",
               item_to_json(a).dump() + "\n" + item_to_json(b).dump() + "\n");
    std::vector<McqItem> items = load_jsonl(dir / "items.jsonl");
    REQUIRE(items.size() == 2);
    CHECK(items[0].item_id == "alpha#0");
    CHECK(items[1].gold == 2);

    CHECK_THROWS_AS(load_dataset(dir / "items.jsonl", "parquet", SubjectMap{}), Error);
    CHECK(load_dataset(dir / "items.jsonl", "jsonl", SubjectMap{}).size() == 2);

    // duplicate ids across the dataset are rejected
    write_file(dir / "dup.jsonl",
               item_to_json(a).dump() + "\n" + item_to_json(a).dump() + "\n");
    CHECK(error_mentions([&] { load_dataset(dir / "dup.jsonl", "jsonl", SubjectMap{}); },
                         "duplicate item"));
}

TEST_CASE("config loads with defaults, overrides and strict keys") {
    fs::path dir = fresh_dir("config");
    write_file(dir / "items.jsonl", item_to_json(make_item("c#0", 0, "t")).dump() + "\n");

    nlohmann::json cfg = {
        {"master_seed", 99},
        {"dataset", {{"path", "items.jsonl"}, {"format", "jsonl"}}},
        {"model",
         {{"endpoint", "synthetic:content_skill=0.7"}, {"model_tag", "sim"},
          {"keep_positions", 4}}},
        {"token_offset",
         {{"mode", "fixed"}, {"offset", 2}, {"per_model", {{"other-model", 1}}}}},
        {"plan",
         {{"types", {"none", "letter_typos"}}, {"shuffles_per_run", 5}, {"debias", true}}},
        {"output_dir", "results"},
    };
    write_file(dir / "config.json", cfg.dump(2));

    HarnessConfig config = HarnessConfig::load(dir / "config.json");
    CHECK(config.plan.master_seed == 99);
    CHECK(config.dataset_path == (dir / "items.jsonl").lexically_normal());
    CHECK(config.dataset_format == "jsonl");
    CHECK(config.model.model_tag == "sim");
    CHECK(config.model.keep_positions == 4);
    CHECK(config.offset.mode == TokenOffsetPolicy::Mode::Fixed);
    CHECK(config.offset.fixed_offset == 2);
    CHECK(config.offset.per_model.at("other-model") == 1);
    REQUIRE(config.plan.types.size() == 2);
    CHECK(config.plan.types[1] == PerturbationType::LetterTypos);
    CHECK(config.plan.debias_enabled);
    CHECK(config.output_dir == (dir / "results").lexically_normal());
    CHECK(config.replay_log == (dir / "results" / "replay.jsonl").lexically_normal());

    nlohmann::json bad = cfg;
    bad["surprise"] = 1;
    write_file(dir / "bad.json", bad.dump());
    CHECK(error_mentions([&] { HarnessConfig::load(dir / "bad.json"); }, "surprise"));

    nlohmann::json no_seed = cfg;
    no_seed.erase("master_seed");
    write_file(dir / "no_seed.json", no_seed.dump());
    CHECK(error_mentions([&] { HarnessConfig::load(dir / "no_seed.json"); }, "master_seed"));

    nlohmann::json missing_data = cfg;
    missing_data["dataset"]["path"] = "absent.jsonl";
    write_file(dir / "missing_data.json", missing_data.dump());
    CHECK(error_mentions([&] { HarnessConfig::load(dir / "missing_data.json"); },
                         "does not exist"));

    nlohmann::json partial_lex = cfg;
    partial_lex["lexicons"] = {{"refusal", "refusal.txt"}};
    write_file(dir / "partial_lex.json", partial_lex.dump());
    CHECK_THROWS_AS(HarnessConfig::load(dir / "partial_lex.json"), Error);

    nlohmann::json bad_plan = cfg;
    bad_plan["plan"]["types"] = {"none", "sideways"};
    write_file(dir / "bad_plan.json", bad_plan.dump());
    CHECK(error_mentions([&] { HarnessConfig::load(dir / "bad_plan.json"); }, "sideways"));
}

TEST_CASE("config lexicon trio loads from files") {
    fs::path dir = fresh_dir("config_lex");
    write_file(dir / "items.jsonl", item_to_json(make_item("c#0", 0, "t")).dump() + "\n");
    write_file(dir / "refusal.txt", "i shall not say\n");
    write_file(dir / "no_correct.txt", "all are wrong\n");
    write_file(dir / "dont_know.txt", "beats me\n");
    nlohmann::json cfg = {
        {"master_seed", 1},
        {"dataset", {{"path", "items.jsonl"}, {"format", "jsonl"}}},
        {"model", {{"endpoint", "synthetic:"}}},
        {"lexicons",
         {{"refusal", "refusal.txt"}, {"no_correct", "no_correct.txt"},
          {"dont_know", "dont_know.txt"}}},
    };
    write_file(dir / "config.json", cfg.dump());
    HarnessConfig config = HarnessConfig::load(dir / "config.json");
    SpecialPhraseLexicon lexicon = config.load_lexicon();
    CHECK(lexicon.refusal == std::vector<std::string>{"i shall not say"});
    CHECK(lexicon.dont_know == std::vector<std::string>{"beats me"});

    HarnessConfig defaults;
    SpecialPhraseLexicon compiled = defaults.load_lexicon();
    CHECK(compiled.refusal == SpecialPhraseLexicon::defaults().refusal);
}

}  // TEST_SUITE

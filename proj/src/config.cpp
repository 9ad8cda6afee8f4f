#include "mcqr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mcqr/json_io.hpp"

namespace mcqr {

namespace {

void check_keys(const nlohmann::json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw Error(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw Error("unknown key '" + key + "' in " + where);
}

template <typename T>
T get_or(const nlohmann::json& obj, const char* key, T fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(std::string("bad value for '") + key + "'");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& raw) {
    const std::filesystem::path p(raw);
    return (p.is_absolute() ? p : base / p).lexically_normal();
}

void require_exists(const std::filesystem::path& path, const std::string& what) {
    if (!std::filesystem::exists(path))
        throw Error(what + " does not exist: " + path.string());
}

}  // namespace

HarnessConfig HarnessConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open config " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const nlohmann::json j = parse_json(buffer.str(), "config " + file.string());
    const std::filesystem::path base = file.has_parent_path() ? file.parent_path()
                                                              : std::filesystem::path(".");

    check_keys(j, "config",
               {"master_seed", "dataset", "model", "token_offset", "classifier", "plan",
                "perturb", "prompt", "lexicons", "output_dir", "replay_log"});

    HarnessConfig config;

    if (!j.contains("master_seed"))
        throw Error("config " + file.string() + " lacks the mandatory master_seed");
    if (!j["master_seed"].is_number_unsigned() && !j["master_seed"].is_number_integer())
        throw Error("master_seed must be a non-negative integer");
    config.plan.master_seed = j["master_seed"].get<std::uint64_t>();

    if (!j.contains("dataset")) throw Error("config lacks the dataset section");
    const nlohmann::json& dataset = j["dataset"];
    check_keys(dataset, "dataset", {"path", "format", "subjects_table"});
    if (!dataset.contains("path")) throw Error("dataset.path is required");
    config.dataset_path = resolve(base, dataset["path"].get<std::string>());
    require_exists(config.dataset_path, "dataset.path");
    config.dataset_format = get_or<std::string>(dataset, "format", "mmlu_csv");
    if (dataset.contains("subjects_table")) {
        config.subjects_table = resolve(base, dataset["subjects_table"].get<std::string>());
        require_exists(*config.subjects_table, "dataset.subjects_table");
    }

    if (!j.contains("model")) throw Error("config lacks the model section");
    const nlohmann::json& model = j["model"];
    check_keys(model, "model",
               {"endpoint", "model_tag", "api_key_env", "timeout_s", "max_retries",
                "top_logprobs", "max_tokens", "keep_positions"});
    if (!model.contains("endpoint")) throw Error("model.endpoint is required");
    config.model.endpoint = model["endpoint"].get<std::string>();
    config.model.model_tag = get_or<std::string>(model, "model_tag", "");
    config.model.api_key_env = get_or<std::string>(model, "api_key_env", "");
    config.model.timeout_s = get_or<double>(model, "timeout_s", 60.0);
    config.model.max_retries = get_or<int>(model, "max_retries", 3);
    config.model.top_logprobs = get_or<int>(model, "top_logprobs", 20);
    config.model.max_tokens = get_or<int>(model, "max_tokens", 64);
    config.model.keep_positions = get_or<int>(model, "keep_positions", 8);

    if (j.contains("token_offset")) {
        const nlohmann::json& offset = j["token_offset"];
        check_keys(offset, "token_offset", {"mode", "offset", "per_model"});
        const std::string mode = get_or<std::string>(offset, "mode", "auto");
        if (mode == "auto") {
            config.offset.mode = TokenOffsetPolicy::Mode::Auto;
        } else if (mode == "fixed") {
            config.offset.mode = TokenOffsetPolicy::Mode::Fixed;
        } else {
            throw Error("token_offset.mode must be auto or fixed, got " + mode);
        }
        config.offset.fixed_offset = get_or<int>(offset, "offset", 0);
        if (config.offset.fixed_offset < 0) throw Error("token_offset.offset must be >= 0");
        if (offset.contains("per_model"))
            for (const auto& [tag, value] : offset["per_model"].items())
                config.offset.per_model[tag] = value.get<int>();
    }

    if (j.contains("classifier")) {
        const nlohmann::json& classifier = j["classifier"];
        check_keys(classifier, "classifier", {"endpoint", "timeout_s", "fallback_to_patterns"});
        config.classifier.endpoint = get_or<std::string>(classifier, "endpoint", "");
        config.classifier.timeout_s = get_or<double>(classifier, "timeout_s", 10.0);
        config.classifier.fallback_to_patterns =
            get_or<bool>(classifier, "fallback_to_patterns", true);
    }

    if (j.contains("plan")) {
        const nlohmann::json& plan = j["plan"];
        check_keys(plan, "plan",
                   {"types", "runs_per_perturbation", "shuffles_per_run", "option_swap_runs",
                    "first_token_channel", "text_channel", "debias", "estimation_fraction",
                    "estimation_min_items", "num_cycles", "entropy_over_raw"});
        if (plan.contains("types")) {
            config.plan.types.clear();
            for (const nlohmann::json& name : plan["types"]) {
                const auto type = perturbation_from_name(name.get<std::string>());
                if (!type)
                    throw Error("unknown perturbation type in plan.types: " +
                                name.get<std::string>());
                config.plan.types.push_back(*type);
            }
            if (config.plan.types.empty())
                config.plan.types.push_back(PerturbationType::None);
        }
        config.plan.runs_per_perturbation =
            get_or<int>(plan, "runs_per_perturbation", config.plan.runs_per_perturbation);
        config.plan.shuffles_per_run =
            get_or<int>(plan, "shuffles_per_run", config.plan.shuffles_per_run);
        config.plan.option_swap_runs =
            get_or<int>(plan, "option_swap_runs", config.plan.option_swap_runs);
        config.plan.first_token_channel =
            get_or<bool>(plan, "first_token_channel", config.plan.first_token_channel);
        config.plan.text_channel = get_or<bool>(plan, "text_channel", config.plan.text_channel);
        config.plan.debias_enabled = get_or<bool>(plan, "debias", config.plan.debias_enabled);
        config.plan.estimation_fraction =
            get_or<double>(plan, "estimation_fraction", config.plan.estimation_fraction);
        config.plan.estimation_min_items =
            get_or<int>(plan, "estimation_min_items", config.plan.estimation_min_items);
        config.plan.num_cycles = get_or<int>(plan, "num_cycles", config.plan.num_cycles);
        config.plan.entropy_over_raw =
            get_or<bool>(plan, "entropy_over_raw", config.plan.entropy_over_raw);
    }

    if (j.contains("perturb")) {
        const nlohmann::json& perturb = j["perturb"];
        check_keys(perturb, "perturb",
                   {"typo_word_probability", "word_swap_count", "letter_swap_min_word_length"});
        config.plan.perturb.typo_word_probability = get_or<double>(
            perturb, "typo_word_probability", config.plan.perturb.typo_word_probability);
        config.plan.perturb.word_swap_count =
            get_or<int>(perturb, "word_swap_count", config.plan.perturb.word_swap_count);
        config.plan.perturb.letter_swap_min_word_length =
            get_or<int>(perturb, "letter_swap_min_word_length",
                        config.plan.perturb.letter_swap_min_word_length);
    }

    if (j.contains("prompt")) {
        const nlohmann::json& prompt = j["prompt"];
        check_keys(prompt, "prompt", {"system_text", "question_header", "options_header"});
        config.plan.prompt.system_text =
            get_or<std::string>(prompt, "system_text", config.plan.prompt.system_text);
        config.plan.prompt.question_header =
            get_or<std::string>(prompt, "question_header", config.plan.prompt.question_header);
        config.plan.prompt.options_header =
            get_or<std::string>(prompt, "options_header", config.plan.prompt.options_header);
    }

    if (j.contains("lexicons")) {
        const nlohmann::json& lexicons = j["lexicons"];
        check_keys(lexicons, "lexicons", {"refusal", "no_correct", "dont_know"});
        const auto read_path = [&](const char* key) -> std::filesystem::path {
            if (!lexicons.contains(key)) throw Error(std::string("lexicons.") + key + " missing: "
                                                     "give all three lexicon paths or none");
            const std::filesystem::path p = resolve(base, lexicons[key].get<std::string>());
            require_exists(p, std::string("lexicons.") + key);
            return p;
        };
        config.refusal_lexicon = read_path("refusal");
        config.no_correct_lexicon = read_path("no_correct");
        config.dont_know_lexicon = read_path("dont_know");
    }

    config.output_dir = resolve(base, get_or<std::string>(j, "output_dir", "out"));
    config.replay_log = j.contains("replay_log")
                            ? resolve(base, j["replay_log"].get<std::string>())
                            : config.output_dir / "replay.jsonl";

    config.plan.validate();
    return config;
}

SpecialPhraseLexicon HarnessConfig::load_lexicon() const {
    if (refusal_lexicon.empty()) return SpecialPhraseLexicon::defaults();
    return SpecialPhraseLexicon::load(refusal_lexicon.string(), no_correct_lexicon.string(),
                                      dont_know_lexicon.string());
}

}  // namespace mcqr

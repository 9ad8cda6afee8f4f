#include "mcqr/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mcqr/json_io.hpp"
#include "mcqr/util.hpp"

namespace mcqr {

namespace {

std::string location(const std::filesystem::path& file, int line) {
    return file.string() + ":" + std::to_string(line);
}

// RFC-4180 record reader: quoted fields may contain commas, doubled quotes
// and line breaks. Returns false at end of input. line_no tracks the line
// the record began on for error messages.
struct CsvReader {
    std::istream& in;
    const std::filesystem::path& file;
    int next_line = 1;

    bool read_record(std::vector<std::string>& fields, int& line_no) {
        fields.clear();
        int c = in.get();
        while (c == '\n' || c == '\r') {  // skip blank lines between records
            if (c == '\n') ++next_line;
            c = in.get();
        }
        if (c == EOF) return false;
        line_no = next_line;
        std::string field;
        bool quoted = false;
        if (c == '"') {
            quoted = true;
            c = in.get();
        }
        while (true) {
            if (c == EOF) {
                if (quoted) throw Error(location(file, line_no) + ": unterminated quoted field");
                fields.push_back(std::move(field));
                return true;
            }
            if (quoted) {
                if (c == '"') {
                    const int peek = in.get();
                    if (peek == '"') {
                        field.push_back('"');
                    } else {
                        quoted = false;
                        c = peek;
                        continue;  // delimiter handling below
                    }
                } else {
                    if (c == '\n') ++next_line;
                    field.push_back(static_cast<char>(c));
                }
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                quoted = false;
                c = in.get();
                if (c == '"') {
                    quoted = true;
                } else {
                    continue;
                }
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && in.peek() == '\n') in.get();
                ++next_line;
                fields.push_back(std::move(field));
                return true;
            } else {
                // quotes after the first character of an unquoted field are
                // literal data; question texts in the wild contain them
                field.push_back(static_cast<char>(c));
            }
            c = in.get();
        }
    }
};

std::string subject_of(const std::filesystem::path& file) {
    std::string stem = file.stem().string();
    for (const char* suffix : {"_test", "_val", "_dev"}) {
        const std::string_view s(suffix);
        if (stem.size() > s.size() && std::string_view(stem).substr(stem.size() - s.size()) == s) {
            stem.resize(stem.size() - s.size());
            break;
        }
    }
    return stem;
}

std::ifstream open_or_throw(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    return in;
}

}  // namespace

std::string SubjectMap::lookup(const std::string& subject) const {
    const auto it = category_by_subject.find(subject);
    return it == category_by_subject.end() ? std::string("other") : it->second;
}

SubjectMap SubjectMap::load(const std::filesystem::path& tsv_path) {
    std::ifstream in = open_or_throw(tsv_path);
    SubjectMap map;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view trimmed = trim(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        const std::size_t tab = trimmed.find('\t');
        if (tab == std::string_view::npos)
            throw Error(location(tsv_path, line_no) + ": expected subject<TAB>subcategory");
        const std::string subject(trim(trimmed.substr(0, tab)));
        const std::string category(trim(trimmed.substr(tab + 1)));
        if (subject.empty() || category.empty())
            throw Error(location(tsv_path, line_no) + ": empty subject or subcategory");
        if (!map.category_by_subject.emplace(subject, category).second)
            throw Error(location(tsv_path, line_no) + ": duplicate subject " + subject);
    }
    return map;
}

std::vector<McqItem> load_csv_file(const std::filesystem::path& file, const SubjectMap& subjects) {
    std::ifstream in = open_or_throw(file);
    const std::string subject = subject_of(file);
    const std::string subcategory = subjects.lookup(subject);

    CsvReader reader{in, file};
    std::vector<McqItem> items;
    std::vector<std::string> fields;
    int line_no = 0;
    int row = 0;
    while (reader.read_record(fields, line_no)) {
        if (fields.size() < 6)
            throw Error(location(file, line_no) + ": expected 6 fields, got " +
                        std::to_string(fields.size()));
        // rows whose question contains unquoted commas split into extra
        // leading fields; fold them back so the last five stay options+answer
        while (fields.size() > 6) {
            fields[0] += "," + fields[1];
            fields.erase(fields.begin() + 1);
        }
        McqItem item;
        item.item_id = subject + "#" + std::to_string(row);
        item.question = fields[0];
        for (int i = 0; i < 4; ++i) {
            OptionEntry option;
            option.id = static_cast<char>('A' + i);
            option.content = fields[static_cast<std::size_t>(i) + 1];
            item.options.push_back(std::move(option));
        }
        const std::string answer(trim(fields[5]));
        if (answer.size() != 1 || answer[0] < 'A' || answer[0] > 'D')
            throw Error(location(file, line_no) + ": unknown answer letter '" + fields[5] + "'");
        item.gold = answer[0] - 'A';
        item.task = subject;
        item.subcategory = subcategory;
        try {
            validate_item(item);
        } catch (const Error& e) {
            throw Error(location(file, line_no) + ": " + e.what());
        }
        items.push_back(std::move(item));
        ++row;
    }
    return items;
}

std::vector<McqItem> load_csv(const std::filesystem::path& path, const SubjectMap& subjects) {
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(path))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw Error("no .csv files in " + path.string());
        std::vector<McqItem> items;
        for (const std::filesystem::path& file : files) {
            std::vector<McqItem> chunk = load_csv_file(file, subjects);
            items.insert(items.end(), std::make_move_iterator(chunk.begin()),
                         std::make_move_iterator(chunk.end()));
        }
        return items;
    }
    return load_csv_file(path, subjects);
}

std::vector<McqItem> load_jsonl(const std::filesystem::path& file) {
    std::ifstream in = open_or_throw(file);
    std::vector<McqItem> items;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            items.push_back(item_from_json(parse_json(line, "item")));
        } catch (const Error& e) {
            throw Error(location(file, line_no) + ": " + e.what());
        }
    }
    return items;
}

std::vector<McqItem> load_dataset(const std::filesystem::path& path, const std::string& format,
                                  const SubjectMap& subjects) {
    std::vector<McqItem> items;
    if (format == "mmlu_csv") {
        items = load_csv(path, subjects);
    } else if (format == "jsonl") {
        items = load_jsonl(path);
    } else {
        throw Error("unknown dataset format: " + format + " (expected mmlu_csv or jsonl)");
    }
    std::map<std::string, int> seen;
    for (const McqItem& item : items)
        if (++seen[item.item_id] > 1) throw Error("duplicate item id: " + item.item_id);
    return items;
}

}  // namespace mcqr

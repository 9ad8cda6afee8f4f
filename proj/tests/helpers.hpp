#pragma once

#include <string>
#include <vector>

#include "mcqr/core.hpp"

namespace mcqr::test {

inline std::vector<OptionEntry> four_options(const std::string& a = "oak tree",
                                             const std::string& b = "maple syrup",
                                             const std::string& c = "granite slab",
                                             const std::string& d = "copper wire") {
    return {{'A', a, OptionKind::Regular},
            {'B', b, OptionKind::Regular},
            {'C', c, OptionKind::Regular},
            {'D', d, OptionKind::Regular}};
}

inline McqItem make_item(std::string id, int gold = 0, std::string task = "demo") {
    McqItem item;
    item.item_id = std::move(id);
    item.question = "Which of the following materials was used for the beam in the old survey?";
    item.options = four_options();
    item.gold = gold;
    item.task = std::move(task);
    item.subcategory = "other";
    return item;
}

inline std::string data_dir() {
#ifdef MCQR_DATA_DIR
    return MCQR_DATA_DIR;
#else
    return "data";
#endif
}

}  // namespace mcqr::test

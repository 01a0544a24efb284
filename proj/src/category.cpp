#include "fwmod/category.hpp"

namespace fwmod {

std::string_view category_name(Category c) {
    switch (c) {
        case Category::data_transfer: return "data_transfer";
        case Category::navigation: return "navigation";
        case Category::controller: return "controller";
        case Category::safety_check: return "safety_check";
        case Category::other: return "other";
    }
    return "other";
}

std::string_view category_display_name(Category c) {
    switch (c) {
        case Category::data_transfer: return "Data Transfer";
        case Category::navigation: return "Navigation";
        case Category::controller: return "Controller";
        case Category::safety_check: return "Safety Check";
        case Category::other: return "Other";
    }
    return "Other";
}

std::optional<Category> category_from_name(std::string_view name) {
    for (Category c : kAllCategories) {
        if (name == category_name(c)) return c;
    }
    return std::nullopt;
}

}  // namespace fwmod

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace fwmod {

// Closed set of cyber-physical-system module categories.
enum class Category { data_transfer, navigation, controller, safety_check, other };

// Canonical ordering, used wherever unranked categories are appended.
inline constexpr std::array<Category, 5> kAllCategories = {
    Category::data_transfer, Category::navigation, Category::controller, Category::safety_check,
    Category::other};

std::string_view category_name(Category c);          // "data_transfer"
std::string_view category_display_name(Category c);  // "Data Transfer"

// Strict canonical-name lookup (used by ground-truth loading).
std::optional<Category> category_from_name(std::string_view name);

}  // namespace fwmod

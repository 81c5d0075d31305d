#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optrng/errors.hpp"

namespace optrng::nist {

/// Descriptive grouping of the battery: I balance, II template, III complexity, IV spectral, V structural.
enum class Category { balance = 1, template_matching = 2, complexity = 3, spectral = 4, structural = 5 };

inline std::string_view roman(Category c) noexcept {
    switch (c) {
        case Category::balance: return "I";
        case Category::template_matching: return "II";
        case Category::complexity: return "III";
        case Category::spectral: return "IV";
        case Category::structural: return "V";
    }
    return "?";
}

inline std::string_view category_name(Category c) noexcept {
    switch (c) {
        case Category::balance: return "Balance";
        case Category::template_matching: return "Template";
        case Category::complexity: return "Complexity";
        case Category::spectral: return "Spectral";
        case Category::structural: return "Structural";
    }
    return "?";
}

enum class TestId : int {
    frequency = 1,
    block_frequency = 2,
    runs = 3,
    longest_run = 4,
    rank = 5,
    dft = 6,
    non_overlapping_template = 7,
    overlapping_template = 8,
    universal = 9,
    linear_complexity = 10,
    serial = 11,
    approximate_entropy = 12,
    cumulative_sums = 13,
    random_excursions = 14,
    random_excursions_variant = 15,
};

inline constexpr int kTestCount = 15;

struct TestInfo {
    TestId id;
    std::string_view name;
    std::string_view key;
    std::array<std::optional<Category>, 2> categories;
};

inline constexpr std::array<TestInfo, kTestCount> kCatalog{{
    {TestId::frequency, "Frequency (Monobit)", "frequency", {Category::balance, std::nullopt}},
    {TestId::block_frequency, "Frequency within a Block", "block_frequency", {Category::balance, std::nullopt}},
    {TestId::runs, "Runs", "runs", {Category::balance, std::nullopt}},
    {TestId::longest_run, "Longest Run of Ones in a Block", "longest_run", {Category::balance, std::nullopt}},
    {TestId::rank, "Binary Matrix Rank", "rank", {Category::structural, std::nullopt}},
    {TestId::dft, "Discrete Fourier Transform (Spectral)", "dft", {Category::spectral, std::nullopt}},
    {TestId::non_overlapping_template, "Non-overlapping Template Matching", "non_overlapping_template",
     {Category::template_matching, std::nullopt}},
    {TestId::overlapping_template, "Overlapping Template Matching", "overlapping_template",
     {Category::template_matching, std::nullopt}},
    {TestId::universal, "Maurer's Universal Statistical", "universal", {Category::complexity, std::nullopt}},
    {TestId::linear_complexity, "Linear Complexity", "linear_complexity", {Category::complexity, std::nullopt}},
    {TestId::serial, "Serial", "serial", {Category::template_matching, std::nullopt}},
    {TestId::approximate_entropy, "Approximate Entropy", "approximate_entropy",
     {Category::template_matching, std::nullopt}},
    {TestId::cumulative_sums, "Cumulative Sums", "cumulative_sums", {Category::balance, Category::structural}},
    {TestId::random_excursions, "Random Excursions", "random_excursions", {Category::structural, std::nullopt}},
    {TestId::random_excursions_variant, "Random Excursions Variant", "random_excursions_variant",
     {Category::structural, std::nullopt}},
}};

inline const TestInfo& info(TestId id) {
    const int i = static_cast<int>(id);
    if (i < 1 || i > kTestCount) throw DomainError("test id out of range: " + std::to_string(i));
    return kCatalog[static_cast<std::size_t>(i - 1)];
}

inline TestId test_from_number(int id) {
    if (id < 1 || id > kTestCount) throw DomainError("test id out of range: " + std::to_string(id));
    return static_cast<TestId>(id);
}

inline std::vector<Category> categories(TestId id) {
    std::vector<Category> out;
    for (const auto& c : info(id).categories) {
        if (c) out.push_back(*c);
    }
    return out;
}

inline bool in_category(TestId id, Category c) {
    for (const auto& tc : info(id).categories) {
        if (tc == c) return true;
    }
    return false;
}

}  // namespace optrng::nist

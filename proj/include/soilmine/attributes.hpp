#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace soilmine {

/// The nine soil-test attributes in canonical column order.
enum class Attribute : std::uint8_t { Ph, EC, OC, P, K, Fe, Zn, Mn, Cu };

inline constexpr std::size_t kNumAttributes = 9;

inline constexpr std::array<Attribute, kNumAttributes> kAllAttributes = {
    Attribute::Ph, Attribute::EC, Attribute::OC, Attribute::P, Attribute::K,
    Attribute::Fe, Attribute::Zn, Attribute::Mn, Attribute::Cu};

inline constexpr std::array<std::string_view, kNumAttributes> kAttributeNames = {
    "Ph", "EC", "OC", "P", "K", "Fe", "Zn", "Mn", "Cu"};

constexpr std::size_t index_of(Attribute a) { return static_cast<std::size_t>(a); }

constexpr std::string_view name_of(Attribute a) { return kAttributeNames[index_of(a)]; }

namespace detail {
inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}
}  // namespace detail

/// Case-insensitive lookup of an attribute by its column name.
inline std::optional<Attribute> parse_attribute(std::string_view name) {
  for (Attribute a : kAllAttributes) {
    if (detail::iequals(name, name_of(a))) return a;
  }
  return std::nullopt;
}

/// Ordered fertility level, VeryLow < ... < VeryHigh.
enum class FertilityClass : std::uint8_t { VeryLow, Low, Moderate, ModeratelyHigh, High, VeryHigh };

inline constexpr std::size_t kNumClasses = 6;

inline constexpr std::array<FertilityClass, kNumClasses> kAllClasses = {
    FertilityClass::VeryLow,        FertilityClass::Low,  FertilityClass::Moderate,
    FertilityClass::ModeratelyHigh, FertilityClass::High, FertilityClass::VeryHigh};

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "Very Low", "Low", "Moderate", "Moderately High", "High", "Very High"};

constexpr std::size_t index_of(FertilityClass c) { return static_cast<std::size_t>(c); }

constexpr std::string_view name_of(FertilityClass c) { return kClassNames[index_of(c)]; }

constexpr FertilityClass class_at(std::size_t level) { return static_cast<FertilityClass>(level); }

/// Class tokens must match exactly (CSV contract).
inline std::optional<FertilityClass> parse_class(std::string_view token) {
  for (FertilityClass c : kAllClasses) {
    if (token == name_of(c)) return c;
  }
  return std::nullopt;
}

}  // namespace soilmine

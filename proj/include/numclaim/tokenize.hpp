#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace numclaim {

enum class DigitGrouping : std::uint8_t { None, L2R, R2L };

std::string_view to_string(DigitGrouping grouping);
std::optional<DigitGrouping> parse_digit_grouping(std::string_view text);

struct DigitMode {
  DigitGrouping grouping = DigitGrouping::None;
  std::size_t group_size = 3;  // >= 1

  bool operator==(const DigitMode&) const = default;
};

struct ContextBudget {
  std::size_t max_tokens = 1024;  // >= 1

  bool operator==(const ContextBudget&) const = default;
};

inline constexpr ContextBudget kShortContext{256};
inline constexpr ContextBudget kLongContext{1024};

struct TokenStream {
  std::vector<std::string> tokens;
  DigitMode mode;
  bool truncated = false;

  std::size_t size() const noexcept { return tokens.size(); }
};

// Throws ConfigError on group_size == 0 / max_tokens == 0.
void validate(const DigitMode& mode);
void validate(const ContextBudget& budget);

/// Lengths of the groups a digit run of `run_length` digits is cut into.
/// R2L anchors full groups at the right (short group first), L2R at the left
/// (short group last); None keeps the run whole.
std::vector<std::size_t> digit_group_lengths(std::size_t run_length, const DigitMode& mode);

/// Lowercases ASCII, splits on maximal runs of non-alphanumeric bytes (bytes
/// >= 0x80 count as word characters), then cuts every digit run longer than
/// group_size per the mode.
TokenStream tokenize(std::string_view text, const DigitMode& mode);

// Prefix-preserving cut to the budget.
TokenStream truncate_to_budget(TokenStream stream, const ContextBudget& budget);

// Same count as tokenize(text, mode).size() without materializing tokens.
std::size_t count_tokens(std::string_view text, const DigitMode& mode) noexcept;

}  // namespace numclaim

#include "numclaim/tokenize.hpp"

#include "numclaim/error.hpp"

namespace numclaim {

namespace {

constexpr bool is_digit(unsigned char c) noexcept { return c >= '0' && c <= '9'; }

constexpr bool is_word_byte(unsigned char c) noexcept {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr char lower(unsigned char c) noexcept {
  return static_cast<char>((c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c);
}

std::size_t group_count(std::size_t run_length, const DigitMode& mode) noexcept {
  if (mode.grouping == DigitGrouping::None || run_length <= mode.group_size) return 1;
  return (run_length + mode.group_size - 1) / mode.group_size;
}

// Walks one word: alternating digit/non-digit segments. A digit run only
// becomes its own segment when it is going to be grouped; shorter runs stay
// glued to the surrounding letters.
template <typename Emit>
void split_word(std::string_view word, const DigitMode& mode, Emit&& emit) {
  if (mode.grouping == DigitGrouping::None) {
    emit(word);
    return;
  }
  std::size_t pending = 0;  // start of the not-yet-emitted letter segment
  std::size_t i = 0;
  while (i < word.size()) {
    if (!is_digit(static_cast<unsigned char>(word[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < word.size() && is_digit(static_cast<unsigned char>(word[j]))) ++j;
    const std::size_t run = j - i;
    if (run > mode.group_size) {
      if (i > pending) emit(word.substr(pending, i - pending));
      std::size_t pos = i;
      for (std::size_t len : digit_group_lengths(run, mode)) {
        emit(word.substr(pos, len));
        pos += len;
      }
      pending = j;
    }
    i = j;
  }
  if (pending < word.size()) emit(word.substr(pending));
}

template <typename OnWord>
void for_each_word(std::string_view text, OnWord&& on_word) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) on_word(text.substr(i, j - i));
    i = j;
  }
}

}  // namespace

std::string_view to_string(DigitGrouping grouping) {
  switch (grouping) {
    case DigitGrouping::None: return "none";
    case DigitGrouping::L2R: return "l2r";
    case DigitGrouping::R2L: return "r2l";
  }
  return "?";
}

std::optional<DigitGrouping> parse_digit_grouping(std::string_view text) {
  std::string l;
  for (char c : text) l.push_back(lower(static_cast<unsigned char>(c)));
  if (l == "none") return DigitGrouping::None;
  if (l == "l2r") return DigitGrouping::L2R;
  if (l == "r2l") return DigitGrouping::R2L;
  return std::nullopt;
}

void validate(const DigitMode& mode) {
  if (mode.group_size == 0) throw ConfigError("digit group_size must be >= 1");
}

void validate(const ContextBudget& budget) {
  if (budget.max_tokens == 0) throw ConfigError("context budget must be >= 1 token");
}

std::vector<std::size_t> digit_group_lengths(std::size_t run_length, const DigitMode& mode) {
  validate(mode);
  if (run_length == 0) return {};
  const std::size_t n = group_count(run_length, mode);
  if (n == 1) return {run_length};
  std::vector<std::size_t> lengths(n, mode.group_size);
  const std::size_t rem = run_length % mode.group_size;
  if (rem != 0) {
    if (mode.grouping == DigitGrouping::R2L)
      lengths.front() = rem;
    else
      lengths.back() = rem;
  }
  return lengths;
}

TokenStream tokenize(std::string_view text, const DigitMode& mode) {
  validate(mode);
  TokenStream stream;
  stream.mode = mode;
  std::string lowered;
  for_each_word(text, [&](std::string_view word) {
    lowered.assign(word.size(), '\0');
    for (std::size_t k = 0; k < word.size(); ++k) lowered[k] = lower(static_cast<unsigned char>(word[k]));
    split_word(lowered, mode, [&](std::string_view piece) { stream.tokens.emplace_back(piece); });
  });
  return stream;
}

TokenStream truncate_to_budget(TokenStream stream, const ContextBudget& budget) {
  validate(budget);
  if (stream.tokens.size() > budget.max_tokens) {
    stream.tokens.resize(budget.max_tokens);
    stream.truncated = true;
  }
  return stream;
}

std::size_t count_tokens(std::string_view text, const DigitMode& mode) noexcept {
  if (mode.group_size == 0) return 0;
  std::size_t count = 0;
  for_each_word(text, [&](std::string_view word) {
    if (mode.grouping == DigitGrouping::None) {
      ++count;
      return;
    }
    std::size_t pending = 0;
    std::size_t i = 0;
    while (i < word.size()) {
      if (!is_digit(static_cast<unsigned char>(word[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < word.size() && is_digit(static_cast<unsigned char>(word[j]))) ++j;
      if (j - i > mode.group_size) {
        if (i > pending) ++count;
        count += group_count(j - i, mode);
        pending = j;
      }
      i = j;
    }
    if (pending < word.size()) ++count;
  });
  return count;
}

}  // namespace numclaim

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace numclaim {

// Class order is fixed everywhere: True, False, Conflicting.
enum class VeracityLabel : std::uint8_t { True = 0, False = 1, Conflicting = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<VeracityLabel, kNumClasses> kAllLabels{
    VeracityLabel::True, VeracityLabel::False, VeracityLabel::Conflicting};

std::string_view to_string(VeracityLabel label);
// Case-insensitive; anything but the three names yields nullopt.
std::optional<VeracityLabel> parse_label(std::string_view text);

constexpr std::size_t class_index(VeracityLabel label) noexcept {
  return static_cast<std::size_t>(label);
}
VeracityLabel label_from_index(std::size_t index);

enum class Split : std::uint8_t { Train, Validation, Test };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

struct Claim {
  std::string claim_id;
  std::string text;
  std::optional<VeracityLabel> label;  // absent for the test split
  Split split = Split::Train;

  bool operator==(const Claim&) const = default;
};

struct EvidenceDoc {
  std::string doc_id;
  std::string text;

  bool operator==(const EvidenceDoc&) const = default;
};

bool is_valid_utf8(std::string_view bytes) noexcept;

/// Reads canonical claims JSONL. Every non-blank line must parse into a
/// Claim; the first bad line aborts the load with a `path:line:` prefixed
/// DataError. When `only` is set, claims from other splits are validated
/// but not returned.
std::vector<Claim> load_claims(const std::filesystem::path& path,
                               std::optional<Split> only = std::nullopt);
std::vector<Claim> read_claims(std::istream& in, std::string_view source_name,
                               std::optional<Split> only = std::nullopt);

std::string claim_to_json_line(const Claim& claim);
void write_claims(std::ostream& out, std::span<const Claim> claims);

/// Streaming reader over evidence JSONL. Only doc ids are retained (for
/// duplicate detection); texts are handed out one at a time.
class EvidenceReader {
 public:
  explicit EvidenceReader(const std::filesystem::path& path);
  EvidenceReader(std::istream& in, std::string source_name);

  EvidenceReader(const EvidenceReader&) = delete;
  EvidenceReader& operator=(const EvidenceReader&) = delete;
  EvidenceReader(EvidenceReader&&) noexcept = default;
  EvidenceReader& operator=(EvidenceReader&&) noexcept = default;

  // nullopt at end of input.
  std::optional<EvidenceDoc> next();

  std::size_t lines_read() const noexcept { return line_; }
  std::size_t docs_read() const noexcept { return seen_.size(); }

 private:
  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_ = nullptr;
  std::string source_;
  std::size_t line_ = 0;
  std::unordered_map<std::string, std::size_t> seen_;
};

std::vector<EvidenceDoc> load_evidence(const std::filesystem::path& path);

// Fetches texts for a subset of doc ids in one streaming pass.
std::unordered_map<std::string, std::string> fetch_evidence_texts(
    const std::filesystem::path& path, const std::vector<std::string>& doc_ids);

struct LabelDistribution {
  std::array<std::uint64_t, kNumClasses> counts{};
  std::array<double, kNumClasses> priors{};

  std::uint64_t total() const noexcept { return counts[0] + counts[1] + counts[2]; }
};

// Counts labeled claims only; throws DataError("no labels present") when none are.
LabelDistribution label_distribution(std::span<const Claim> claims);

// ---------------------------------------------------------------------------
// Ingest: raw upstream dumps (JSON array or JSONL) -> canonical JSONL.

struct IngestStats {
  std::size_t records = 0;
  std::map<std::string, std::size_t> dropped_fields;  // field name -> occurrences
};

// Raw claim records may name fields claim/text, id/claim_id/example_id,
// label/veracity. Records without an id get "<split>-<ordinal>".
IngestStats ingest_claims(std::istream& raw, std::ostream& out, Split split);
// Raw evidence may be an array of strings, an array of objects, or an id->text object.
IngestStats ingest_evidence(std::istream& raw, std::ostream& out);

}  // namespace numclaim

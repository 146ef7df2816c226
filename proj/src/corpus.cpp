#include "numclaim/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"
#include "numclaim/error.hpp"

namespace numclaim {

using nlohmann::json;

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

[[noreturn]] void fail_at(std::string_view source, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << source << ":" << line << ": " << msg;
  throw DataError(os.str());
}

json parse_line(std::string_view source, std::size_t line_no, const std::string& line) {
  if (!is_valid_utf8(line)) fail_at(source, line_no, "invalid UTF-8");
  try {
    json j = json::parse(line);
    if (!j.is_object()) fail_at(source, line_no, "expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    fail_at(source, line_no, std::string("malformed JSON: ") + e.what());
  }
}

std::string required_string(const json& j, const char* key, std::string_view source,
                            std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    fail_at(source, line_no, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(VeracityLabel label) {
  switch (label) {
    case VeracityLabel::True: return "True";
    case VeracityLabel::False: return "False";
    case VeracityLabel::Conflicting: return "Conflicting";
  }
  return "?";
}

std::optional<VeracityLabel> parse_label(std::string_view text) {
  const std::string l = lower_ascii(text);
  if (l == "true") return VeracityLabel::True;
  if (l == "false") return VeracityLabel::False;
  if (l == "conflicting") return VeracityLabel::Conflicting;
  return std::nullopt;
}

VeracityLabel label_from_index(std::size_t index) {
  if (index >= kNumClasses) throw std::out_of_range("class index out of range");
  return kAllLabels[index];
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

std::optional<Split> parse_split(std::string_view text) {
  const std::string l = lower_ascii(text);
  if (l == "train") return Split::Train;
  if (l == "validation" || l == "val" || l == "dev") return Split::Validation;
  if (l == "test") return Split::Test;
  return std::nullopt;
}

bool is_valid_utf8(std::string_view bytes) noexcept {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong forms, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
      return false;
    i += len;
  }
  return true;
}

std::vector<Claim> read_claims(std::istream& in, std::string_view source,
                               std::optional<Split> only) {
  std::vector<Claim> claims;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    const json j = parse_line(source, line_no, line);

    Claim claim;
    claim.claim_id = required_string(j, "claim_id", source, line_no);
    if (claim.claim_id.empty()) fail_at(source, line_no, "empty claim_id");
    claim.text = required_string(j, "text", source, line_no);
    if (trim(claim.text).empty()) fail_at(source, line_no, "claim text is empty");

    if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) fail_at(source, line_no, "label must be a string");
      const auto raw = it->get<std::string>();
      const auto label = parse_label(raw);
      if (!label) fail_at(source, line_no, "unknown label '" + raw + "'");
      claim.label = *label;
    }

    const auto split_raw = required_string(j, "split", source, line_no);
    const auto split = parse_split(split_raw);
    if (!split) fail_at(source, line_no, "unknown split '" + split_raw + "'");
    claim.split = *split;

    if (auto [it, inserted] = seen.emplace(claim.claim_id, line_no); !inserted) {
      fail_at(source, line_no,
              "duplicate claim_id '" + claim.claim_id + "' (first on line " +
                  std::to_string(it->second) + ")");
    }
    if (!only || *only == claim.split) claims.push_back(std::move(claim));
  }
  return claims;
}

std::vector<Claim> load_claims(const std::filesystem::path& path, std::optional<Split> only) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open claims file: " + path.string());
  return read_claims(in, path.string(), only);
}

std::string claim_to_json_line(const Claim& claim) {
  json j;
  j["claim_id"] = claim.claim_id;
  j["text"] = claim.text;
  if (claim.label) j["label"] = std::string(to_string(*claim.label));
  j["split"] = std::string(to_string(claim.split));
  return j.dump();
}

void write_claims(std::ostream& out, std::span<const Claim> claims) {
  for (const auto& c : claims) out << claim_to_json_line(c) << '\n';
}

EvidenceReader::EvidenceReader(const std::filesystem::path& path)
    : owned_(std::make_unique<std::ifstream>(path, std::ios::binary)),
      in_(owned_.get()),
      source_(path.string()) {
  if (!*owned_) throw DataError("cannot open evidence file: " + source_);
}

EvidenceReader::EvidenceReader(std::istream& in, std::string source_name)
    : in_(&in), source_(std::move(source_name)) {}

std::optional<EvidenceDoc> EvidenceReader::next() {
  std::string line;
  while (std::getline(*in_, line)) {
    ++line_;
    strip_cr(line);
    if (is_blank(line)) continue;
    const json j = parse_line(source_, line_, line);
    EvidenceDoc doc;
    doc.doc_id = required_string(j, "doc_id", source_, line_);
    if (doc.doc_id.empty()) fail_at(source_, line_, "empty doc_id");
    doc.text = required_string(j, "text", source_, line_);
    if (trim(doc.text).empty()) fail_at(source_, line_, "evidence text is empty");
    if (auto [it, inserted] = seen_.emplace(doc.doc_id, line_); !inserted) {
      fail_at(source_, line_,
              "duplicate doc_id '" + doc.doc_id + "' on lines " + std::to_string(it->second) +
                  " and " + std::to_string(line_));
    }
    return doc;
  }
  return std::nullopt;
}

std::vector<EvidenceDoc> load_evidence(const std::filesystem::path& path) {
  EvidenceReader reader(path);
  std::vector<EvidenceDoc> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  return docs;
}

std::unordered_map<std::string, std::string> fetch_evidence_texts(
    const std::filesystem::path& path, const std::vector<std::string>& doc_ids) {
  std::unordered_map<std::string, std::string> wanted;
  for (const auto& id : doc_ids) wanted.emplace(id, std::string{});
  std::size_t found = 0;
  EvidenceReader reader(path);
  while (auto doc = reader.next()) {
    if (auto it = wanted.find(doc->doc_id); it != wanted.end()) {
      it->second = std::move(doc->text);
      ++found;
    }
  }
  if (found != wanted.size()) {
    for (const auto& [id, text] : wanted)
      if (text.empty()) throw DataError("doc_id '" + id + "' not found in " + path.string());
  }
  return wanted;
}

LabelDistribution label_distribution(std::span<const Claim> claims) {
  LabelDistribution dist;
  for (const auto& c : claims)
    if (c.label) ++dist.counts[class_index(*c.label)];
  const auto total = dist.total();
  if (total == 0) throw DataError("no labels present");
  for (std::size_t i = 0; i < kNumClasses; ++i)
    dist.priors[i] = static_cast<double>(dist.counts[i]) / static_cast<double>(total);
  return dist;
}

}  // namespace numclaim

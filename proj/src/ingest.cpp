#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <istream>
#include <iterator>
#include <ostream>

#include "json.hpp"
#include "numclaim/corpus.hpp"
#include "numclaim/error.hpp"

namespace numclaim {

using nlohmann::json;

namespace {

// Upstream field names mapped onto the canonical schema, first match wins.
constexpr std::array<const char*, 4> kClaimIdFields{"claim_id", "id", "example_id", "claimID"};
constexpr std::array<const char*, 2> kClaimTextFields{"text", "claim"};
constexpr std::array<const char*, 2> kLabelFields{"label", "veracity"};
constexpr std::array<const char*, 3> kDocIdFields{"doc_id", "id", "evidence_id"};
constexpr std::array<const char*, 4> kDocTextFields{"text", "evidence", "snippet", "content"};

// Whole-document JSON (array or object) or JSONL.
std::vector<json> read_records(std::istream& raw) {
  std::string body((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());
  if (!is_valid_utf8(body)) throw DataError("ingest: input is not valid UTF-8");
  std::vector<json> records;
  try {
    json whole = json::parse(body);
    if (whole.is_array()) {
      for (auto& r : whole) records.push_back(std::move(r));
    } else {
      records.push_back(std::move(whole));
    }
    return records;
  } catch (const json::parse_error&) {
  }
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find('\n', start);
    if (end == std::string::npos) end = body.size();
    ++line_no;
    std::string_view line(body.data() + start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        records.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw DataError("ingest: line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
  return records;
}

template <std::size_t N>
const json* pick(const json& obj, const std::array<const char*, N>& names, std::string& used) {
  for (const char* n : names) {
    auto it = obj.find(n);
    if (it != obj.end() && !it->is_null()) {
      used = n;
      return &*it;
    }
  }
  return nullptr;
}

std::string scalar_to_string(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

void note_dropped(const json& obj, const std::vector<std::string>& used, IngestStats& stats) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(used.begin(), used.end(), it.key()) == used.end()) ++stats.dropped_fields[it.key()];
  }
}

void warn_dropped(const IngestStats& stats) {
  for (const auto& [field, count] : stats.dropped_fields)
    spdlog::warn("ingest: dropped unmapped field '{}' ({} records)", field, count);
}

}  // namespace

IngestStats ingest_claims(std::istream& raw, std::ostream& out, Split split) {
  IngestStats stats;
  const auto records = read_records(raw);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const json& r = records[i];
    if (!r.is_object()) throw DataError("ingest: claim record " + std::to_string(i) + " is not an object");
    std::vector<std::string> used;
    std::string name;

    Claim claim;
    claim.split = split;
    if (const json* v = pick(r, kClaimIdFields, name)) {
      claim.claim_id = scalar_to_string(*v);
      used.push_back(name);
    } else {
      claim.claim_id = std::string(to_string(split)) + "-" + std::to_string(i);
    }
    const json* text = pick(r, kClaimTextFields, name);
    if (!text || !text->is_string())
      throw DataError("ingest: claim record " + std::to_string(i) + " has no text field");
    claim.text = text->get<std::string>();
    used.push_back(name);
    if (const json* v = pick(r, kLabelFields, name)) {
      const auto raw_label = scalar_to_string(*v);
      auto label = parse_label(raw_label);
      if (!label)
        throw DataError("ingest: claim record " + std::to_string(i) + ": unknown label '" +
                        raw_label + "'");
      claim.label = label;
      used.push_back(name);
    }
    if (r.contains("split")) used.emplace_back("split");
    note_dropped(r, used, stats);
    out << claim_to_json_line(claim) << '\n';
    ++stats.records;
  }
  warn_dropped(stats);
  return stats;
}

IngestStats ingest_evidence(std::istream& raw, std::ostream& out) {
  IngestStats stats;
  auto emit = [&](const std::string& id, const std::string& text) {
    json j;
    j["doc_id"] = id;
    j["text"] = text;
    out << j.dump() << '\n';
    ++stats.records;
  };

  auto records = read_records(raw);
  // {"id": "text", ...} form
  if (records.size() == 1 && records[0].is_object() &&
      std::all_of(records[0].begin(), records[0].end(), [](const json& v) { return v.is_string(); }) &&
      !records[0].contains("text")) {
    for (auto it = records[0].begin(); it != records[0].end(); ++it)
      emit(it.key(), it.value().get<std::string>());
    return stats;
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    const json& r = records[i];
    if (r.is_string()) {
      emit(std::to_string(i), r.get<std::string>());
      continue;
    }
    if (!r.is_object()) throw DataError("ingest: evidence record " + std::to_string(i) + " is not an object");
    std::vector<std::string> used;
    std::string name;
    std::string id = std::to_string(i);
    if (const json* v = pick(r, kDocIdFields, name)) {
      id = scalar_to_string(*v);
      used.push_back(name);
    }
    const json* text = pick(r, kDocTextFields, name);
    if (!text || !text->is_string())
      throw DataError("ingest: evidence record " + std::to_string(i) + " has no text field");
    used.push_back(name);
    note_dropped(r, used, stats);
    emit(id, text->get<std::string>());
  }
  warn_dropped(stats);
  return stats;
}

}  // namespace numclaim

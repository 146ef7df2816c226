#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "numclaim/error.hpp"
#include "numclaim/retrieval.hpp"

namespace numclaim {

namespace {

constexpr char kMagic[8] = {'N', 'C', 'S', 'E', 'G', '\0', '\0', '\0'};
constexpr std::uint32_t kSegmentVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "segment encoding assumes a little-endian host");

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_string(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void put_bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void get_bytes(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DataError("index segment is truncated");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_index(const InvertedIndex& index) {
  Writer w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put(kSegmentVersion);
  w.put(index.params().k1);
  w.put(index.params().b);
  w.put(static_cast<std::uint8_t>(index.analyzer().remove_stopwords));
  w.put(static_cast<std::uint8_t>(index.analyzer().stem));
  w.put(static_cast<std::uint64_t>(index.doc_count()));
  for (std::size_t d = 0; d < index.doc_count(); ++d) {
    w.put_string(index.doc_ids()[d]);
    w.put(index.doc_lengths()[d]);
  }
  w.put(static_cast<std::uint64_t>(index.terms().size()));
  for (std::size_t t = 0; t < index.terms().size(); ++t) {
    const auto p = index.postings_at(t);
    w.put_string(index.terms()[t]);
    w.put(static_cast<std::uint64_t>(p.size()));
    w.put_bytes(p.docs.data(), p.docs.size_bytes());
    w.put_bytes(p.tfs.data(), p.tfs.size_bytes());
  }
  return w.take();
}

InvertedIndex deserialize_index(std::string_view bytes) {
  Reader r(bytes);
  char magic[sizeof(kMagic)];
  r.get_bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw DataError("not an index segment");
  if (const auto v = r.get<std::uint32_t>(); v != kSegmentVersion)
    throw DataError("unsupported index segment version " + std::to_string(v));

  InvertedIndex index;
  index.params_.k1 = r.get<double>();
  index.params_.b = r.get<double>();
  index.analyzer_.remove_stopwords = r.get<std::uint8_t>() != 0;
  index.analyzer_.stem = r.get<std::uint8_t>() != 0;
  validate(index.params_);

  const auto n_docs = r.get<std::uint64_t>();
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    index.doc_ids_.push_back(r.get_string());
    index.doc_lengths_.push_back(r.get<std::uint32_t>());
    if (index.doc_lengths_.back() == 0) throw DataError("index segment has a zero-length document");
  }
  const auto n_terms = r.get<std::uint64_t>();
  index.posting_offsets_.push_back(0);
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    index.terms_.push_back(r.get_string());
    const auto df = r.get<std::uint64_t>();
    const auto base = index.posting_docs_.size();
    index.posting_docs_.resize(base + df);
    index.posting_tfs_.resize(base + df);
    r.get_bytes(index.posting_docs_.data() + base, df * sizeof(std::uint32_t));
    r.get_bytes(index.posting_tfs_.data() + base, df * sizeof(std::uint32_t));
    for (std::uint64_t i = base; i < base + df; ++i) {
      if (index.posting_docs_[i] >= n_docs) throw DataError("index posting references unknown doc");
      if (i > base && index.posting_docs_[i] <= index.posting_docs_[i - 1])
        throw DataError("index postings not sorted");
    }
    index.posting_offsets_.push_back(index.posting_docs_.size());
  }
  if (!r.done()) throw DataError("trailing bytes after index segment");
  index.finalize();
  return index;
}

void write_index(const InvertedIndex& index, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "segment.bin", std::ios::binary | std::ios::trunc);
    const auto bytes = serialize_index(index);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing " + (dir / "segment.bin").string());
  }
  nlohmann::json stats;
  stats["N"] = index.doc_count();
  stats["avgdl"] = index.avg_doc_length();
  stats["k1"] = index.params().k1;
  stats["b"] = index.params().b;
  stats["terms"] = index.terms().size();
  stats["version"] = kSegmentVersion;
  std::ofstream out(dir / "stats.json", std::ios::trunc);
  out << stats.dump(2) << '\n';
}

InvertedIndex read_index(const std::filesystem::path& dir) {
  std::ifstream in(dir / "segment.bin", std::ios::binary);
  if (!in) throw DataError("no index segment at " + dir.string() + " (run index first)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_index(buf.str());
}

}  // namespace numclaim

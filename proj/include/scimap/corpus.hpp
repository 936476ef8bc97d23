#pragma once

// Reference ingestion, journal linking and subject classification.
//
// Pipeline stages, each tallied in the Funnel:
//   parse -> deduplicate (entry, work) -> drop missing publication date
//         -> resolve ISSNs against journals -> classify journals.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "scimap/error.hpp"
#include "scimap/util/csv.hpp"
#include "scimap/util/dates.hpp"

namespace scimap {

// ---------------------------------------------------------------------------
// ISSN

/// Strips hyphens and whitespace, uppercases, and verifies the mod-11 check digit.
inline std::string normalize_issn(std::string_view raw) {
  std::string s;
  s.reserve(8);
  for (char c : raw) {
    if (c == '-' || c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    s.push_back(c == 'x' ? 'X' : c);
  }
  if (s.size() != 8) throw Error(ErrorKind::MalformedIssn, "'" + std::string(raw) + "' is not 8 characters");
  int sum = 0;
  for (int i = 0; i < 7; ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw Error(ErrorKind::MalformedIssn, "'" + std::string(raw) + "' has a non-digit body");
    sum += (s[i] - '0') * (8 - i);
  }
  int check;
  if (s[7] == 'X')
    check = 10;
  else if (s[7] >= '0' && s[7] <= '9')
    check = s[7] - '0';
  else
    throw Error(ErrorKind::MalformedIssn, "'" + std::string(raw) + "' has an invalid check character");
  const int expected = (11 - sum % 11) % 11;
  if (check != expected)
    throw Error(ErrorKind::ChecksumFailure, "'" + std::string(raw) + "' expects check digit " +
                                                (expected == 10 ? std::string("X") : std::to_string(expected)));
  return s;
}

inline std::optional<std::string> try_normalize_issn(std::string_view raw) noexcept {
  try {
    return normalize_issn(raw);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Records

struct ReferenceRecord {
  std::string citing_entry_id;
  std::string cited_work_id;
  Date citation_date{};
  std::optional<Date> publication_date;
  std::vector<std::string> issns;

  bool operator==(const ReferenceRecord&) const = default;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct ReferenceBatch {
  std::vector<ReferenceRecord> rows;
  std::vector<ParseIssue> errors;
  std::size_t rejected_issns = 0;
};

namespace detail {

inline void parse_issn_list(const std::vector<std::string>& raw, std::vector<std::string>& out,
                            std::size_t& rejected) {
  for (const auto& part : raw) {
    auto t = csv::trim(part);
    if (t.empty()) continue;
    if (auto issn = try_normalize_issn(t)) {
      if (std::find(out.begin(), out.end(), *issn) == out.end()) out.push_back(std::move(*issn));
    } else {
      ++rejected;
    }
  }
}

inline ReferenceRecord make_reference(std::string_view entry, std::string_view work, std::string_view cited,
                                      std::string_view published, const std::vector<std::string>& issns,
                                      std::size_t& rejected) {
  ReferenceRecord r;
  r.citing_entry_id = std::string(csv::trim(entry));
  r.cited_work_id = std::string(csv::trim(work));
  if (r.citing_entry_id.empty()) throw Error(ErrorKind::ParseError, "empty citing_entry_id");
  if (r.cited_work_id.empty()) throw Error(ErrorKind::ParseError, "empty cited_work_id");
  auto cd = parse_iso_date(cited);
  if (!cd) throw Error(ErrorKind::ParseError, "unparseable citation_date '" + std::string(cited) + "'");
  r.citation_date = *cd;
  // An unparseable publication date counts as missing; the record is dropped at ingest, not here.
  r.publication_date = parse_iso_date(published);
  parse_issn_list(issns, r.issns, rejected);
  return r;
}

inline void record_issue(ReferenceBatch& batch, std::size_t line, const Error& e, bool strict) {
  if (strict) throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + e.what());
  batch.errors.push_back({line, e.what()});
}

}  // namespace detail

/// CSV with columns citing_entry_id, cited_work_id, citation_date, publication_date, issns.
inline ReferenceBatch read_references_csv(std::istream& in, bool strict = false) {
  csv::Reader reader(in);
  const auto c_entry = reader.column("citing_entry_id");
  const auto c_work = reader.column("cited_work_id");
  const auto c_cited = reader.column("citation_date");
  const auto c_pub = reader.column("publication_date");
  const auto c_issns = reader.column("issns");
  ReferenceBatch batch;
  while (auto row = reader.next()) {
    try {
      if (row->size() != reader.width())
        throw Error(ErrorKind::ParseError, "expected " + std::to_string(reader.width()) + " fields, got " +
                                               std::to_string(row->size()));
      const auto& r = *row;
      batch.rows.push_back(detail::make_reference(r[c_entry], r[c_work], r[c_cited], r[c_pub],
                                                  csv::split(r[c_issns], ';'), batch.rejected_issns));
    } catch (const Error& e) {
      detail::record_issue(batch, reader.line_number(), e, strict);
    }
  }
  return batch;
}

/// JSON Lines; `issns` may be a semicolon-separated string or an array of strings.
inline ReferenceBatch read_references_jsonl(std::istream& in, bool strict = false) {
  ReferenceBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, e.what());
      }
      if (!j.is_object()) throw Error(ErrorKind::ParseError, "row is not an object");
      auto str = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return {};
        if (!it->is_string()) throw Error(ErrorKind::ParseError, std::string(key) + " is not a string");
        return it->get<std::string>();
      };
      std::vector<std::string> issns;
      if (auto it = j.find("issns"); it != j.end() && !it->is_null()) {
        if (it->is_array()) {
          for (const auto& v : *it) {
            if (!v.is_string()) throw Error(ErrorKind::ParseError, "issns entry is not a string");
            issns.push_back(v.get<std::string>());
          }
        } else if (it->is_string()) {
          issns = csv::split(it->get<std::string>(), ';');
        } else {
          throw Error(ErrorKind::ParseError, "issns is neither string nor array");
        }
      }
      batch.rows.push_back(detail::make_reference(str("citing_entry_id"), str("cited_work_id"), str("citation_date"),
                                                  str("publication_date"), issns, batch.rejected_issns));
    } catch (const Error& e) {
      detail::record_issue(batch, line_no, e, strict);
    }
  }
  return batch;
}

/// Dispatches on extension: .jsonl / .ndjson / .json are JSON Lines, anything else CSV.
inline ReferenceBatch read_references(const std::filesystem::path& path, bool strict = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") return read_references_jsonl(in, strict);
  return read_references_csv(in, strict);
}

// ---------------------------------------------------------------------------
// Ingestion

struct Funnel {
  std::size_t parse_errors = 0;
  std::size_t rejected_issns = 0;
  std::size_t raw = 0;
  std::size_t duplicates = 0;
  std::size_t deduplicated = 0;
  std::size_t missing_date = 0;
  std::size_t date_valid = 0;
  std::size_t unresolved = 0;
  std::size_t linked = 0;
  std::size_t multi_journal = 0;
  std::size_t conflicting_works = 0;

  bool conserved() const {
    return raw == date_valid + duplicates + missing_date && deduplicated == raw - duplicates &&
           (linked + unresolved == 0 || linked + unresolved == date_valid);
  }
};

struct IngestResult {
  std::vector<ReferenceRecord> records;  // sorted by (citing_entry_id, cited_work_id)
  Funnel funnel;
  std::vector<ReferenceRecord> undated;  // dedup survivors dropped for a missing date; kept for merges
};

/// Deduplicates on (citing entry, cited work), keeping the earliest citation date, then drops
/// records without a publication date. Applying it to its own output is the identity.
inline IngestResult ingest_references(std::vector<ReferenceRecord> rows) {
  IngestResult out;
  out.funnel.raw = rows.size();
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = rows[a];
    const auto& y = rows[b];
    if (int c = x.citing_entry_id.compare(y.citing_entry_id)) return c < 0;
    if (int c = x.cited_work_id.compare(y.cited_work_id)) return c < 0;
    return x.citation_date < y.citation_date;
  });
  out.records.reserve(rows.size());
  const ReferenceRecord* prev = nullptr;
  for (std::size_t idx : order) {
    auto& r = rows[idx];
    if (prev && prev->citing_entry_id == r.citing_entry_id && prev->cited_work_id == r.cited_work_id) {
      ++out.funnel.duplicates;
      continue;
    }
    ++out.funnel.deduplicated;
    prev = &r;
    if (!r.publication_date) {
      ++out.funnel.missing_date;
      out.undated.push_back(r);
      continue;
    }
    out.records.push_back(r);
  }
  out.funnel.date_valid = out.records.size();
  return out;
}

inline IngestResult ingest_references(ReferenceBatch batch) {
  auto out = ingest_references(std::move(batch.rows));
  out.funnel.parse_errors = batch.errors.size();
  out.funnel.rejected_issns = batch.rejected_issns;
  return out;
}

/// Merges independently ingested chunks. Deduplication and the date filter are re-run over the
/// union of every chunk's survivors, dated or not, so the result equals a single-pass ingest.
inline IngestResult merge_ingested(std::span<const IngestResult> parts) {
  std::vector<ReferenceRecord> all;
  Funnel upstream;
  for (const auto& p : parts) {
    all.insert(all.end(), p.records.begin(), p.records.end());
    all.insert(all.end(), p.undated.begin(), p.undated.end());
    upstream.parse_errors += p.funnel.parse_errors;
    upstream.rejected_issns += p.funnel.rejected_issns;
    upstream.raw += p.funnel.raw;
    upstream.duplicates += p.funnel.duplicates;
  }
  auto out = ingest_references(std::move(all));
  out.funnel.parse_errors = upstream.parse_errors;
  out.funnel.rejected_issns = upstream.rejected_issns;
  out.funnel.raw = upstream.raw;
  out.funnel.duplicates += upstream.duplicates;
  out.funnel.deduplicated = out.funnel.raw - out.funnel.duplicates;
  return out;
}

// ---------------------------------------------------------------------------
// Journals and classification

struct JournalRecord {
  std::string journal_id;
  std::string title;
  std::vector<std::string> issns;
  std::vector<int> asjc_codes;
  bool open_access = false;
  std::int64_t window_citations = 0;
  std::int64_t window_articles = 0;
};

struct JournalBatch {
  std::vector<JournalRecord> journals;
  std::vector<ParseIssue> errors;
};

namespace detail {

inline std::int64_t parse_count(std::string_view s, const char* what) {
  s = csv::trim(s);
  if (s.empty()) return 0;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0)
    throw Error(ErrorKind::ParseError, std::string(what) + " is not a nonnegative integer: '" + std::string(s) + "'");
  return v;
}

inline int parse_asjc(std::string_view s) {
  s = csv::trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.size() != 4 || v < 1000)
    throw Error(ErrorKind::ParseError, "invalid 4-digit classification code '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// CSV with journal_id, title, issns, asjc_codes, open_access, window_citations, window_articles.
inline JournalBatch read_journals_csv(std::istream& in, bool strict = false) {
  csv::Reader reader(in);
  const auto c_id = reader.column("journal_id");
  const auto c_title = reader.column("title");
  const auto c_issns = reader.column("issns");
  const auto c_codes = reader.column("asjc_codes");
  const auto c_oa = reader.column("open_access");
  const auto c_cit = reader.column("window_citations");
  const auto c_art = reader.column("window_articles");
  JournalBatch batch;
  while (auto row = reader.next()) {
    try {
      if (row->size() != reader.width()) throw Error(ErrorKind::ParseError, "wrong field count");
      const auto& r = *row;
      JournalRecord j;
      j.journal_id = std::string(csv::trim(r[c_id]));
      if (j.journal_id.empty()) throw Error(ErrorKind::ParseError, "empty journal_id");
      j.title = r[c_title];
      for (const auto& part : csv::split(r[c_issns], ';')) {
        if (csv::trim(part).empty()) continue;
        auto issn = normalize_issn(part);
        if (std::find(j.issns.begin(), j.issns.end(), issn) == j.issns.end()) j.issns.push_back(std::move(issn));
      }
      for (const auto& part : csv::split(r[c_codes], ';')) {
        if (csv::trim(part).empty()) continue;
        j.asjc_codes.push_back(detail::parse_asjc(part));
      }
      if (j.issns.empty()) throw Error(ErrorKind::ParseError, "journal " + j.journal_id + " has no ISSN");
      if (j.asjc_codes.empty()) throw Error(ErrorKind::ParseError, "journal " + j.journal_id + " has no codes");
      const auto oa = csv::trim(r[c_oa]);
      if (oa == "1" || oa == "true")
        j.open_access = true;
      else if (oa == "0" || oa == "false" || oa.empty())
        j.open_access = false;
      else
        throw Error(ErrorKind::ParseError, "open_access must be 0/1");
      j.window_citations = detail::parse_count(r[c_cit], "window_citations");
      j.window_articles = detail::parse_count(r[c_art], "window_articles");
      batch.journals.push_back(std::move(j));
    } catch (const Error& e) {
      if (strict) throw Error(ErrorKind::ParseError, "line " + std::to_string(reader.line_number()) + ": " + e.what());
      batch.errors.push_back({reader.line_number(), e.what()});
    }
  }
  return batch;
}

inline JournalBatch read_journals(const std::filesystem::path& path, bool strict = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return read_journals_csv(in, strict);
}

/// Expected tier sizes; field count is unchecked when absent.
struct SchemeExpectation {
  std::size_t areas = 5;
  std::size_t main_fields = 27;
  std::optional<std::size_t> fields;
};

/// Three-tier subject classification: 4-digit code -> field, 2-digit prefix -> main field,
/// main field -> area.
class ClassificationScheme {
 public:
  static ClassificationScheme from_csv(std::istream& in) {
    csv::Reader reader(in);
    const auto c_code = reader.column("code");
    const auto c_field = reader.column("field");
    const auto c_main = reader.column("main_field");
    const auto c_area = reader.column("area");
    ClassificationScheme s;
    while (auto row = reader.next()) {
      if (row->size() != reader.width())
        throw Error(ErrorKind::InvalidScheme, "line " + std::to_string(reader.line_number()) + ": wrong field count");
      const auto& r = *row;
      int code;
      try {
        code = detail::parse_asjc(r[c_code]);
      } catch (const Error& e) {
        throw Error(ErrorKind::InvalidScheme, e.what());
      }
      s.add(code, std::string(csv::trim(r[c_field])), std::string(csv::trim(r[c_main])),
            std::string(csv::trim(r[c_area])));
    }
    return s;
  }

  static ClassificationScheme load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
    return from_csv(in);
  }

  void add(int code, std::string field, std::string main_field, std::string area) {
    if (field.empty() || main_field.empty() || area.empty())
      throw Error(ErrorKind::InvalidScheme, "code " + std::to_string(code) + " has an empty name");
    if (!field_of_.emplace(code, std::move(field)).second)
      throw Error(ErrorKind::InvalidScheme, "duplicate code " + std::to_string(code));
    const int prefix = code / 100;
    auto [mit, mnew] = main_field_of_.emplace(prefix, main_field);
    if (!mnew && mit->second != main_field)
      throw Error(ErrorKind::InvalidScheme, "prefix " + std::to_string(prefix) + " maps to both '" + mit->second +
                                                "' and '" + main_field + "'");
    auto [ait, anew] = area_of_.emplace(main_field, area);
    if (!anew && ait->second != area)
      throw Error(ErrorKind::InvalidScheme, "main field '" + main_field + "' maps to two areas");
  }

  void validate(const SchemeExpectation& expect) const {
    auto check = [](std::size_t got, std::size_t want, const char* what) {
      if (got != want)
        throw Error(ErrorKind::InvalidScheme, std::string("expected ") + std::to_string(want) + " " + what +
                                                  ", found " + std::to_string(got));
    };
    check(area_count(), expect.areas, "areas");
    check(main_field_count(), expect.main_fields, "main fields");
    if (expect.fields) check(field_count(), *expect.fields, "fields");
  }

  bool has_code(int code) const { return field_of_.contains(code); }
  const std::string& field_name(int code) const { return at(field_of_, code, "code"); }
  const std::string& main_field_of_code(int code) const { return at(main_field_of_, code / 100, "prefix"); }
  const std::string& area_of_main_field(const std::string& mf) const { return at(area_of_, mf, "main field"); }
  const std::string& area_of_code(int code) const { return area_of_main_field(main_field_of_code(code)); }

  std::size_t field_count() const { return field_of_.size(); }
  std::size_t main_field_count() const { return area_of_.size(); }
  std::size_t area_count() const { return areas().size(); }

  std::vector<std::string> areas() const {
    std::set<std::string> s;
    for (const auto& [mf, a] : area_of_) s.insert(a);
    return {s.begin(), s.end()};
  }
  std::vector<std::string> main_fields() const {
    std::vector<std::string> out;
    for (const auto& [mf, a] : area_of_) out.push_back(mf);
    return out;
  }
  const std::map<int, std::string>& fields() const { return field_of_; }

 private:
  template <class Map, class Key>
  static const std::string& at(const Map& m, const Key& k, const char* what) {
    auto it = m.find(k);
    if (it == m.end()) {
      if constexpr (std::is_same_v<Key, int>)
        throw Error(ErrorKind::InvalidArgument, std::string("unknown ") + what + " " + std::to_string(k));
      else
        throw Error(ErrorKind::InvalidArgument, std::string("unknown ") + what + " '" + k + "'");
    }
    return it->second;
  }

  std::map<int, std::string> field_of_;
  std::map<int, std::string> main_field_of_;
  std::map<std::string, std::string> area_of_;
};

/// Combined label of a set of areas: sorted, deduplicated, joined with " & ".
inline std::string combined_area_label(std::vector<std::string> areas) {
  std::sort(areas.begin(), areas.end());
  areas.erase(std::unique(areas.begin(), areas.end()), areas.end());
  std::string label;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    if (i) label += " & ";
    label += areas[i];
  }
  return label;
}

struct ClassifiedJournal {
  JournalRecord record;
  std::vector<int> fields;               // known codes, sorted
  std::vector<std::string> main_fields;  // sorted
  std::vector<std::string> areas;        // sorted
  std::string area_label;
  std::vector<int> unknown_codes;
};

inline ClassifiedJournal classify_journal(JournalRecord j, const ClassificationScheme& scheme) {
  ClassifiedJournal c;
  std::set<int> codes(j.asjc_codes.begin(), j.asjc_codes.end());
  std::set<std::string> mfs, areas;
  for (int code : codes) {
    if (!scheme.has_code(code)) {
      c.unknown_codes.push_back(code);
      continue;
    }
    c.fields.push_back(code);
    mfs.insert(scheme.main_field_of_code(code));
    areas.insert(scheme.area_of_code(code));
  }
  c.main_fields.assign(mfs.begin(), mfs.end());
  c.areas.assign(areas.begin(), areas.end());
  c.area_label = combined_area_label(c.areas);
  c.record = std::move(j);
  return c;
}

struct LinkedRecord {
  ReferenceRecord ref;
  std::vector<std::uint32_t> journals;  // indices into LinkedCorpus::journals, sorted
};

/// Validated references joined to their journals. Immutable once built.
struct LinkedCorpus {
  std::vector<LinkedRecord> records;          // sorted by (entry, work)
  std::vector<ClassifiedJournal> journals;    // resolved journals, sorted by journal_id
  std::shared_ptr<const ClassificationScheme> scheme;
  Funnel funnel;
  std::vector<std::string> conflicts;
};

struct LinkOptions {
  bool lenient_duplicate_issn = false;
};

/// Resolves each record's ISSNs against the journal list. Records matching no journal are
/// dropped; a record matching several journals is attributed to all of them.
inline LinkedCorpus link_and_classify(IngestResult ingested, std::vector<JournalRecord> journals,
                                      std::shared_ptr<const ClassificationScheme> scheme,
                                      const LinkOptions& opts = {}) {
  if (!scheme) throw Error(ErrorKind::InvalidArgument, "no classification scheme");
  LinkedCorpus out;
  out.scheme = scheme;
  out.funnel = ingested.funnel;

  // Classify in load order so "first loaded wins" is well defined for duplicate ISSNs.
  std::vector<ClassifiedJournal> classified;
  std::unordered_map<std::string, std::size_t> by_issn;
  for (auto& j : journals) {
    auto c = classify_journal(std::move(j), *scheme);
    for (int code : c.unknown_codes)
      out.conflicts.push_back("journal " + c.record.journal_id + ": unknown classification code " +
                              std::to_string(code));
    if (c.fields.empty()) {
      out.conflicts.push_back("journal " + c.record.journal_id + ": no known classification code, skipped");
      continue;
    }
    const std::size_t idx = classified.size();
    for (const auto& issn : c.record.issns) {
      auto [it, fresh] = by_issn.emplace(issn, idx);
      if (!fresh) {
        const std::string msg = "ISSN " + issn + " claimed by " + classified[it->second].record.journal_id +
                                " and " + c.record.journal_id;
        if (!opts.lenient_duplicate_issn) throw Error(ErrorKind::DuplicateIssn, msg);
        out.conflicts.push_back(msg + " (first loaded kept)");
      }
    }
    classified.push_back(std::move(c));
  }

  // Resolve records; collect the set of journals actually referenced.
  std::vector<std::vector<std::size_t>> matches(ingested.records.size());
  std::vector<char> used(classified.size(), 0);
  for (std::size_t i = 0; i < ingested.records.size(); ++i) {
    auto& m = matches[i];
    for (const auto& issn : ingested.records[i].issns)
      if (auto it = by_issn.find(issn); it != by_issn.end()) m.push_back(it->second);
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    for (auto j : m) used[j] = 1;
  }

  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < classified.size(); ++j)
    if (used[j]) keep.push_back(j);
  std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) {
    return classified[a].record.journal_id < classified[b].record.journal_id;
  });
  std::vector<std::uint32_t> remap(classified.size(), UINT32_MAX);
  for (std::size_t k = 0; k < keep.size(); ++k) remap[keep[k]] = static_cast<std::uint32_t>(k);
  out.journals.reserve(keep.size());
  for (auto j : keep) out.journals.push_back(std::move(classified[j]));

  // Works whose records disagree on publication date or ISSNs are reported, not reconciled.
  using WorkMeta = std::pair<std::optional<Date>, std::vector<std::string>>;
  std::unordered_map<std::string, WorkMeta> first_of_work;
  std::set<std::string> conflicting;
  out.records.reserve(ingested.records.size());
  for (std::size_t i = 0; i < ingested.records.size(); ++i) {
    auto& r = ingested.records[i];
    auto [it, fresh] = first_of_work.try_emplace(r.cited_work_id, r.publication_date, r.issns);
    if (!fresh && (it->second.first != r.publication_date || it->second.second != r.issns))
      conflicting.insert(r.cited_work_id);
    if (matches[i].empty()) {
      ++out.funnel.unresolved;
      continue;
    }
    LinkedRecord lr;
    for (auto j : matches[i]) lr.journals.push_back(remap[j]);
    std::sort(lr.journals.begin(), lr.journals.end());
    if (lr.journals.size() > 1) ++out.funnel.multi_journal;
    lr.ref = std::move(r);
    out.records.push_back(std::move(lr));
  }
  out.funnel.linked = out.records.size();
  out.funnel.conflicting_works = conflicting.size();
  for (const auto& w : conflicting) out.conflicts.push_back("work " + w + ": conflicting metadata across records");
  return out;
}

/// Classification tier used for grouping.
enum class Tier { field, main_field, area };

constexpr std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::field: return "field";
    case Tier::main_field: return "main_field";
    case Tier::area: return "area";
  }
  return "?";
}

/// Labels of a journal at `tier`. Area uses the combined label, so a journal spanning two
/// areas belongs to one combined group.
inline std::vector<std::string> tier_labels(const ClassifiedJournal& j, const ClassificationScheme& scheme, Tier tier) {
  switch (tier) {
    case Tier::field: {
      std::vector<std::string> out;
      for (int code : j.fields) out.push_back(scheme.field_name(code));
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case Tier::main_field: return j.main_fields;
    case Tier::area: return {j.area_label};
  }
  return {};
}

struct YearRange {
  int first = 0;
  int last = 0;
  bool contains(int y) const { return first <= y && y <= last; }
};

/// Records cited within `citation_years` to works published within `publication_years`.
inline LinkedCorpus restrict_window(const LinkedCorpus& corpus, YearRange citation_years,
                                    YearRange publication_years) {
  LinkedCorpus out;
  out.scheme = corpus.scheme;
  out.journals = corpus.journals;
  out.funnel = corpus.funnel;
  for (const auto& r : corpus.records) {
    if (citation_years.contains(year_of(r.ref.citation_date)) &&
        publication_years.contains(year_of(*r.ref.publication_date)))
      out.records.push_back(r);
  }
  out.funnel.linked = out.records.size();
  return out;
}

}  // namespace scimap

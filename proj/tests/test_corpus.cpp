#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "scimap/corpus.hpp"
#include "support.hpp"

using namespace scimap;
using testutil::ymd;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no scimap::Error thrown";
  return ErrorKind::InvariantViolation;
}

ReferenceRecord rec(std::string e, std::string w, Date c, std::optional<Date> p) {
  ReferenceRecord r;
  r.citing_entry_id = std::move(e);
  r.cited_work_id = std::move(w);
  r.citation_date = c;
  r.publication_date = p;
  return r;
}

}  // namespace

TEST(Issn, NatureNormalizes) { EXPECT_EQ(normalize_issn("0028-0836"), "00280836"); }

TEST(Issn, TrailingWhitespace) { EXPECT_EQ(normalize_issn("0028-0836 "), "00280836"); }

TEST(Issn, BadCheckDigit) {
  EXPECT_EQ(kind_of([] { normalize_issn("1234-5678"); }), ErrorKind::ChecksumFailure);
}

TEST(Issn, MalformedInputs) {
  EXPECT_EQ(kind_of([] { normalize_issn("0028-083"); }), ErrorKind::MalformedIssn);
  EXPECT_EQ(kind_of([] { normalize_issn("00A8-0836"); }), ErrorKind::MalformedIssn);
  EXPECT_EQ(kind_of([] { normalize_issn("0028-083Y"); }), ErrorKind::MalformedIssn);
  EXPECT_EQ(kind_of([] { normalize_issn(""); }), ErrorKind::MalformedIssn);
}

TEST(Issn, XCheckDigitAcceptedInEitherCase) {
  // 0000-006X: weighted sum 6*2 = 12, (11 - 1) % 11 = 10.
  EXPECT_EQ(normalize_issn("0000-006X"), "0000006X");
  EXPECT_EQ(normalize_issn("0000-006x"), "0000006X");
}

TEST(Issn, AgreesWithBruteForceCheckDigit) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    std::string body;
    for (int k = 0; k < 7; ++k) body.push_back(static_cast<char>('0' + rng() % 10));
    int sum = 0;
    for (int k = 0; k < 7; ++k) sum += (body[k] - '0') * (8 - k);
    // Brute force: the unique c in 0..10 making the full weighted sum divisible by 11.
    int check = -1;
    for (int c = 0; c <= 10; ++c)
      if ((sum + c) % 11 == 0) check = c;
    const char cc = check == 10 ? 'X' : static_cast<char>('0' + check);
    EXPECT_EQ(normalize_issn(body.substr(0, 4) + "-" + body.substr(4) + cc), body + cc);
    const char wrong = check == 0 ? '1' : '0';
    EXPECT_FALSE(try_normalize_issn(body + wrong).has_value());
  }
}

TEST(Ingest, EmptyStream) {
  auto r = ingest_references(std::vector<ReferenceRecord>{});
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.funnel.raw, 0u);
  EXPECT_EQ(r.funnel.duplicates, 0u);
  EXPECT_EQ(r.funnel.date_valid, 0u);
  EXPECT_TRUE(r.funnel.conserved());
}

TEST(Ingest, ThreeRowDedupKeepsEarliest) {
  std::vector<ReferenceRecord> rows{rec("E1", "W1", ymd(2015, 3, 1), ymd(2010)),
                                    rec("E1", "W1", ymd(2014, 1, 1), ymd(2010)),
                                    rec("E2", "W1", ymd(2016, 1, 1), ymd(2010))};
  auto r = ingest_references(rows);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.funnel.duplicates, 1u);
  EXPECT_EQ(r.records[0].citing_entry_id, "E1");
  EXPECT_EQ(r.records[0].citation_date, ymd(2014, 1, 1));
}

TEST(Ingest, MissingPublicationDateDroppedAndCounted) {
  std::vector<ReferenceRecord> rows{rec("E1", "W1", ymd(2015), std::nullopt), rec("E1", "W2", ymd(2015), ymd(2001))};
  auto r = ingest_references(rows);
  EXPECT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.funnel.missing_date, 1u);
  EXPECT_TRUE(r.funnel.conserved());
}

TEST(Ingest, PropertyIdempotenceAndConservation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ReferenceRecord> rows;
    const int n = static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) {
      std::optional<Date> pub;
      if (rng() % 5) pub = ymd(1990 + static_cast<int>(rng() % 20));
      rows.push_back(rec("E" + std::to_string(rng() % 6), "W" + std::to_string(rng() % 8),
                         ymd(2000 + static_cast<int>(rng() % 18), 1 + rng() % 12, 1 + rng() % 28), pub));
    }
    auto once = ingest_references(rows);
    ASSERT_TRUE(once.funnel.conserved());
    ASSERT_EQ(once.funnel.raw, rows.size());

    // Oracle: earliest citation per (entry, work); a kept pair must carry a publication date.
    std::map<std::pair<std::string, std::string>, const ReferenceRecord*> best;
    for (const auto& r : rows) {
      auto& slot = best[{r.citing_entry_id, r.cited_work_id}];
      if (!slot || r.citation_date < slot->citation_date) slot = &r;
    }
    std::vector<ReferenceRecord> expect;
    for (const auto& [k, r] : best)
      if (r->publication_date) expect.push_back(*r);
    ASSERT_EQ(once.records.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) {
      EXPECT_EQ(once.records[i].citing_entry_id, expect[i].citing_entry_id);
      EXPECT_EQ(once.records[i].cited_work_id, expect[i].cited_work_id);
      EXPECT_EQ(once.records[i].citation_date, expect[i].citation_date);
    }

    auto twice = ingest_references(once.records);
    EXPECT_EQ(twice.records, once.records);
    EXPECT_EQ(twice.funnel.duplicates, 0u);
    EXPECT_EQ(twice.funnel.missing_date, 0u);
  }
}

TEST(Ingest, ChunkedMergeMatchesWholeIngest) {
  std::mt19937_64 rng(5);
  std::vector<ReferenceRecord> rows;
  for (int i = 0; i < 300; ++i)
    rows.push_back(rec("E" + std::to_string(rng() % 20), "W" + std::to_string(rng() % 30),
                       ymd(2005 + static_cast<int>(rng() % 10)),
                       rng() % 7 ? std::optional(ymd(2000)) : std::nullopt));
  auto whole = ingest_references(rows);
  std::vector<IngestResult> parts;
  for (std::size_t b = 0; b < rows.size(); b += 70)
    parts.push_back(ingest_references(
        std::vector<ReferenceRecord>(rows.begin() + b, rows.begin() + std::min(rows.size(), b + 70))));
  auto merged = merge_ingested(parts);
  EXPECT_EQ(merged.records, whole.records);
  EXPECT_EQ(merged.funnel.raw, whole.funnel.raw);
  EXPECT_EQ(merged.funnel.date_valid, whole.funnel.date_valid);
  EXPECT_EQ(merged.funnel.duplicates, whole.funnel.duplicates);
  EXPECT_EQ(merged.funnel.missing_date, whole.funnel.missing_date);
  EXPECT_TRUE(merged.funnel.conserved());
}

TEST(Readers, CsvRowsErrorsAndRejectedIssns) {
  std::istringstream in(
      "citing_entry_id,cited_work_id,citation_date,publication_date,issns\n"
      "E1,W1,2016-01-02,2014-05-06,0028-0836\n"
      "E1,W2,2016-01-02,,0028-0836;1234-5678\n"
      "E2,W3,not-a-date,2014-05-06,0028-0836\n"
      "E3,W4,2016-01-02\n"
      "\n"
      "E4,\"W,5\",2016-01-02T10:00:00Z,2015-01-01,\n");
  auto b = read_references_csv(in);
  ASSERT_EQ(b.rows.size(), 3u);
  EXPECT_EQ(b.errors.size(), 2u);
  EXPECT_EQ(b.rejected_issns, 1u);
  EXPECT_EQ(b.rows[0].issns, std::vector<std::string>{"00280836"});
  EXPECT_FALSE(b.rows[1].publication_date.has_value());
  EXPECT_EQ(b.rows[2].cited_work_id, "W,5");
  EXPECT_EQ(b.errors[0].line, 4u);
}

TEST(Readers, StrictModeThrowsOnFirstBadRow) {
  std::istringstream in(
      "citing_entry_id,cited_work_id,citation_date,publication_date,issns\n"
      "E2,W3,not-a-date,2014-05-06,0028-0836\n");
  EXPECT_EQ(kind_of([&] { read_references_csv(in, true); }), ErrorKind::ParseError);
}

TEST(Readers, JsonLinesAcceptsStringOrArrayIssns) {
  std::istringstream in(
      R"({"citing_entry_id":"E1","cited_work_id":"W1","citation_date":"2016-01-01","publication_date":"2010-01-01","issns":["0028-0836"]})"
      "\n"
      R"({"citing_entry_id":"E1","cited_work_id":"W2","citation_date":"2016-01-01","publication_date":null,"issns":"0028-0836"})"
      "\n"
      "{broken\n");
  auto b = read_references_jsonl(in);
  ASSERT_EQ(b.rows.size(), 2u);
  EXPECT_EQ(b.errors.size(), 1u);
  EXPECT_EQ(b.rows[1].issns, std::vector<std::string>{"00280836"});
  EXPECT_FALSE(b.rows[1].publication_date.has_value());
}

TEST(Readers, MissingColumnIsParseError) {
  std::istringstream in("citing_entry_id,cited_work_id\nE1,W1\n");
  EXPECT_EQ(kind_of([&] { read_references_csv(in); }), ErrorKind::ParseError);
}

TEST(Scheme, BundledSchemeShape) {
  auto s = testutil::bundled_scheme();
  EXPECT_EQ(s->area_count(), 5u);
  EXPECT_EQ(s->main_field_count(), 27u);
  EXPECT_NO_THROW(s->validate({}));
  EXPECT_EQ(s->area_of_code(1000), "Multidisciplinary");
  EXPECT_EQ(s->area_of_code(2700), "Health Sciences");
  SchemeExpectation e;
  e.fields = s->field_count();
  EXPECT_NO_THROW(s->validate(e));
  e.fields = s->field_count() + 1;
  EXPECT_EQ(kind_of([&] { s->validate(e); }), ErrorKind::InvalidScheme);
}

TEST(Scheme, InconsistentMainFieldRejected) {
  std::istringstream in("code,field,main_field,area\n2701,A,Medicine,Health Sciences\n2702,B,Nursing,Health Sciences\n");
  EXPECT_EQ(kind_of([&] { ClassificationScheme::from_csv(in); }), ErrorKind::InvalidScheme);
}

TEST(Link, SingleAndCombinedAreaLabels) {
  auto c = testutil::make_corpus({{"H", {2701}}, {"HL", {2701, 1101}}, {"LH", {1101, 2701}}},
                                 {{"E1", "W1", 2016, 2010, {"H"}}, {"E1", "W2", 2016, 2010, {"HL"}},
                                  {"E1", "W3", 2016, 2010, {"LH"}}});
  ASSERT_EQ(c.journals.size(), 3u);
  EXPECT_EQ(c.journals[0].area_label, "Health Sciences");
  EXPECT_EQ(c.journals[1].area_label, "Health Sciences & Life Sciences");
  EXPECT_EQ(c.journals[2].area_label, "Health Sciences & Life Sciences");
}

TEST(Link, CombinedLabelIsPermutationInvariant) {
  auto s = testutil::bundled_scheme();
  std::vector<int> codes{1000, 1101, 1202, 2701, 3104, 1303};
  std::mt19937_64 rng(3);
  JournalRecord j;
  j.asjc_codes = codes;
  const auto base = classify_journal(j, *s).area_label;
  for (int i = 0; i < 50; ++i) {
    std::shuffle(j.asjc_codes.begin(), j.asjc_codes.end(), rng);
    EXPECT_EQ(classify_journal(j, *s).area_label, base);
  }
}

TEST(Link, UnresolvedDroppedAndCounted) {
  auto c = testutil::make_corpus({{"J1", {2701}}}, {{"E1", "W1", 2016, 2010, {"J1"}}, {"E1", "W2", 2016, 2010, {}}});
  EXPECT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.funnel.unresolved, 1u);
  EXPECT_EQ(c.funnel.linked, 1u);
  EXPECT_TRUE(c.funnel.conserved());
}

TEST(Link, DuplicateIssnStrictAndLenient) {
  auto js = testutil::journal_records({{"A", {2701}}, {"B", {1101}}});
  js[1].issns = js[0].issns;
  IngestResult empty;
  EXPECT_EQ(kind_of([&] { link_and_classify(empty, js, testutil::bundled_scheme()); }), ErrorKind::DuplicateIssn);
  LinkOptions lenient;
  lenient.lenient_duplicate_issn = true;
  ReferenceRecord r = rec("E", "W", ymd(2016), ymd(2010));
  r.issns = js[0].issns;
  auto c = link_and_classify(ingest_references(std::vector{r}), js, testutil::bundled_scheme(), lenient);
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.journals[c.records[0].journals[0]].record.journal_id, "A");
  EXPECT_FALSE(c.conflicts.empty());
}

TEST(Link, MultiJournalWorkAttributedToAll) {
  auto c = testutil::make_corpus({{"A", {2701}}, {"B", {1101}}}, {{"E1", "W1", 2016, 2010, {"A", "B"}}});
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.records[0].journals.size(), 2u);
  EXPECT_EQ(c.funnel.multi_journal, 1u);
}

TEST(Link, ConflictingWorkMetadataReported) {
  auto c = testutil::make_corpus({{"A", {2701}}},
                                 {{"E1", "W1", 2016, 2010, {"A"}}, {"E2", "W1", 2016, 2011, {"A"}},
                                  {"E3", "W2", 2016, 2010, {"A"}}, {"E4", "W2", 2016, 2010, {"A"}}});
  EXPECT_EQ(c.funnel.conflicting_works, 1u);
  EXPECT_EQ(c.records.size(), 4u);
}

TEST(Link, LinkedCorpusInvariants) {
  const auto scheme = testutil::bundled_scheme();
  SynthParams p;
  p.entries = 200;
  p.references = 900;
  p.journals = 60;
  const auto sc = generate_corpus(p, *scheme);
  auto c = link_and_classify(ingest_references(sc.references), sc.journals, scheme);
  ASSERT_TRUE(c.funnel.conserved());
  EXPECT_GE(c.funnel.raw, c.funnel.deduplicated);
  EXPECT_GE(c.funnel.deduplicated, c.funnel.date_valid);
  EXPECT_GE(c.funnel.date_valid, c.funnel.linked);
  for (std::size_t i = 1; i < c.records.size(); ++i) {
    const auto& a = c.records[i - 1].ref;
    const auto& b = c.records[i].ref;
    EXPECT_TRUE(std::tie(a.citing_entry_id, a.cited_work_id) < std::tie(b.citing_entry_id, b.cited_work_id));
  }
  for (const auto& r : c.records) {
    EXPECT_FALSE(r.journals.empty());
    EXPECT_TRUE(r.ref.publication_date.has_value());
  }
  for (const auto& j : c.journals) EXPECT_FALSE(j.fields.empty());
}

TEST(Window, RestrictsByCitationAndPublicationYear) {
  auto c = testutil::make_corpus({{"A", {2701}}},
                                 {{"E1", "W1", 2016, 2014, {"A"}}, {"E1", "W2", 2016, 2012, {"A"}},
                                  {"E2", "W3", 2015, 2014, {"A"}}, {"E2", "W4", 2016, 2013, {"A"}}});
  auto w = restrict_window(c, {2016, 2016}, {2013, 2015});
  ASSERT_EQ(w.records.size(), 2u);
  EXPECT_EQ(w.records[0].ref.cited_work_id, "W1");
  EXPECT_EQ(w.records[1].ref.cited_work_id, "W4");
}

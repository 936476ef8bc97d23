#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "scimap/corpus.hpp"
#include "scimap/graph.hpp"
#include "scimap/synth.hpp"

namespace testutil {

using namespace scimap;

inline std::shared_ptr<const ClassificationScheme> bundled_scheme() {
  static auto s = std::make_shared<const ClassificationScheme>(
      ClassificationScheme::load(std::string(SCIMAP_DATA_DIR) + "/asjc_scheme.csv"));
  return s;
}

inline Date ymd(int y, unsigned m = 6, unsigned d = 15) {
  return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

struct J {
  std::string id;
  std::vector<int> codes;
  bool open_access = false;
  std::int64_t window_citations = 0;
  std::int64_t window_articles = 0;
};

struct R {
  std::string entry;
  std::string work;
  int cite_year;
  int pub_year;
  std::vector<std::string> journals;  // journal ids; each contributes its first ISSN
};

/// Journal k gets ISSN body 2000000 + k.
inline std::vector<JournalRecord> journal_records(const std::vector<J>& js) {
  std::vector<JournalRecord> out;
  for (std::size_t k = 0; k < js.size(); ++k) {
    JournalRecord r;
    r.journal_id = js[k].id;
    r.title = "Title " + js[k].id;
    r.issns = {make_issn(static_cast<std::uint32_t>(2000000 + k))};
    r.asjc_codes = js[k].codes;
    r.open_access = js[k].open_access;
    r.window_citations = js[k].window_citations;
    r.window_articles = js[k].window_articles;
    out.push_back(r);
  }
  return out;
}

inline LinkedCorpus make_corpus(const std::vector<J>& js, const std::vector<R>& rs) {
  auto jr = journal_records(js);
  std::vector<ReferenceRecord> refs;
  for (const auto& r : rs) {
    ReferenceRecord x;
    x.citing_entry_id = r.entry;
    x.cited_work_id = r.work;
    x.citation_date = ymd(r.cite_year);
    x.publication_date = ymd(r.pub_year);
    for (const auto& jid : r.journals)
      for (const auto& j : jr)
        if (j.journal_id == jid) x.issns.push_back(j.issns.front());
    refs.push_back(x);
  }
  return link_and_classify(ingest_references(std::move(refs)), jr, bundled_scheme());
}

/// Graph from node ids and edges in any orientation; areas, when given, are one per node.
inline CoCitationGraph make_graph(std::vector<std::string> ids, std::vector<Edge> edges,
                           std::vector<std::string> areas = {}) {
  CoCitationGraph g;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Node n;
    n.id = ids[i];
    n.label = ids[i];
    if (!areas.empty()) {
      n.area_label = areas[i];
      n.areas = {areas[i]};
    }
    g.nodes.push_back(n);
  }
  for (auto& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::sort(edges.begin(), edges.end(), canonical_less);
  g.edges = edges;
  g.validate();
  return g;
}

}  // namespace testutil

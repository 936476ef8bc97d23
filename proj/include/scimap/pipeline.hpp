#pragma once

// End-to-end run: ingest, link, metrics, co-citation, PFNET, threshold filter, centralities,
// tail fits and cross-source comparison, written to one directory with a digest manifest.
// Needs OpenSSL's libcrypto at link time.

#include <openssl/evp.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scimap/cocitation.hpp"
#include "scimap/compare.hpp"
#include "scimap/corpus.hpp"
#include "scimap/export.hpp"
#include "scimap/heavytail.hpp"
#include "scimap/metrics.hpp"
#include "scimap/netmetrics.hpp"
#include "scimap/pathfinder.hpp"
#include "scimap/util/parallel.hpp"

namespace scimap {

namespace fs = std::filesystem;

enum class TailPopulation { full, window };

struct PipelineConfig {
  fs::path refs;
  fs::path journals;
  fs::path scheme;
  std::optional<fs::path> scopus;  // journal_id,window_citations,window_articles overrides
  Level level = Level::journal;
  CountMode mode = CountMode::set;
  std::int64_t min_weight = 50;
  FilterMode filter = FilterMode::edge_weight;
  std::vector<int> windows{5, 10, 15, 20};
  std::size_t nsims = 1000;
  std::optional<std::uint64_t> seed;
  YearRange citation_window{2016, 2016};
  YearRange publication_window{2013, 2015};
  TailPopulation tail_population = TailPopulation::full;
  fs::path out;
  bool strict = false;
  bool lenient_duplicate_issn = false;
  std::optional<std::size_t> expect_fields;
  unsigned workers = default_workers();
};

constexpr std::string_view to_string(TailPopulation p) { return p == TailPopulation::full ? "full" : "window"; }

inline TailPopulation parse_tail_population(std::string_view s) {
  if (s == "full") return TailPopulation::full;
  if (s == "window") return TailPopulation::window;
  throw Error(ErrorKind::ConfigInvalid, "unknown tail population '" + std::string(s) + "'");
}

/// "2013:2015" or "2016".
inline YearRange parse_year_range(std::string_view s) {
  auto parse = [&](std::string_view t) {
    t = csv::trim(t);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
      throw Error(ErrorKind::ConfigInvalid, "bad year range '" + std::string(s) + "'");
    return v;
  };
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    const int y = parse(s);
    return {y, y};
  }
  return {parse(s.substr(0, colon)), parse(s.substr(colon + 1))};
}

inline std::string format_year_range(YearRange r) { return std::to_string(r.first) + ":" + std::to_string(r.last); }

inline std::vector<int> parse_windows(std::string_view s) {
  std::vector<int> out;
  for (const auto& part : csv::split(s, ',')) {
    const auto t = csv::trim(part);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
      throw Error(ErrorKind::ConfigInvalid, "bad window '" + std::string(t) + "'");
    out.push_back(v);
  }
  return out;
}

inline Level level_or_throw(std::string_view s) {
  if (auto l = parse_level(s)) return *l;
  throw Error(ErrorKind::ConfigInvalid, "unknown level '" + std::string(s) + "'");
}

inline CountMode mode_or_throw(std::string_view s) {
  if (auto m = parse_mode(s)) return *m;
  throw Error(ErrorKind::ConfigInvalid, "unknown co-citation mode '" + std::string(s) + "'");
}

/// Applies keys present in `j` on top of `cfg`. Unknown keys are rejected.
inline void apply_config_json(PipelineConfig& cfg, const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigInvalid, "config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "refs") cfg.refs = v.get<std::string>();
      else if (key == "journals") cfg.journals = v.get<std::string>();
      else if (key == "scheme") cfg.scheme = v.get<std::string>();
      else if (key == "scopus") cfg.scopus = v.is_null() ? std::nullopt : std::optional<fs::path>(v.get<std::string>());
      else if (key == "level") cfg.level = level_or_throw(v.get<std::string>());
      else if (key == "mode") cfg.mode = mode_or_throw(v.get<std::string>());
      else if (key == "min_weight") cfg.min_weight = v.get<std::int64_t>();
      else if (key == "filter") {
        const auto s = v.get<std::string>();
        if (s == "edge_weight") cfg.filter = FilterMode::edge_weight;
        else if (s == "node_strength") cfg.filter = FilterMode::node_strength;
        else throw Error(ErrorKind::ConfigInvalid, "unknown filter '" + s + "'");
      } else if (key == "windows") cfg.windows = v.get<std::vector<int>>();
      else if (key == "nsims") cfg.nsims = v.get<std::size_t>();
      else if (key == "seed") cfg.seed = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
      else if (key == "citation_window") cfg.citation_window = parse_year_range(v.get<std::string>());
      else if (key == "publication_window") cfg.publication_window = parse_year_range(v.get<std::string>());
      else if (key == "tail_population") cfg.tail_population = parse_tail_population(v.get<std::string>());
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "strict") cfg.strict = v.get<bool>();
      else if (key == "lenient_duplicate_issn") cfg.lenient_duplicate_issn = v.get<bool>();
      else if (key == "expect_fields") cfg.expect_fields = v.get<std::size_t>();
      else if (key == "workers") cfg.workers = v.get<unsigned>();
      else throw Error(ErrorKind::ConfigInvalid, "unknown config key '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("config value has the wrong type: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid) throw;
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
}

inline PipelineConfig load_config_file(const fs::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::ConfigInvalid, "cannot read config file " + path.string());
  }
  PipelineConfig cfg;
  const auto j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::ConfigInvalid, "config file " + path.string() + " is not valid JSON");
  apply_config_json(cfg, j);
  return cfg;
}

/// Effective settings echoed into reports. Output directory and worker count are left out:
/// neither affects results.
inline Json config_echo(const PipelineConfig& c) {
  Json j;
  j["refs"] = c.refs.generic_string();
  j["journals"] = c.journals.generic_string();
  j["scheme"] = c.scheme.generic_string();
  j["scopus"] = c.scopus ? Json(c.scopus->generic_string()) : Json(nullptr);
  j["level"] = std::string(to_string(c.level));
  j["mode"] = std::string(to_string(c.mode));
  j["min_weight"] = c.min_weight;
  j["filter"] = c.filter == FilterMode::edge_weight ? "edge_weight" : "node_strength";
  j["windows"] = c.windows;
  j["nsims"] = c.nsims;
  j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  j["citation_window"] = format_year_range(c.citation_window);
  j["publication_window"] = format_year_range(c.publication_window);
  j["tail_population"] = std::string(to_string(c.tail_population));
  j["strict"] = c.strict;
  j["lenient_duplicate_issn"] = c.lenient_duplicate_issn;
  j["expect_fields"] = c.expect_fields ? Json(*c.expect_fields) : Json(nullptr);
  return j;
}

inline void require_readable(const fs::path& p, const char* what) {
  if (p.empty()) throw Error(ErrorKind::ConfigInvalid, std::string("missing ") + what + " path");
  std::ifstream in(p, std::ios::binary);
  if (!in || fs::is_directory(p)) throw Error(ErrorKind::ConfigInvalid, std::string(what) + " file not readable: " + p.string());
}

inline void validate_config(const PipelineConfig& c) {
  require_readable(c.refs, "references");
  require_readable(c.journals, "journals");
  require_readable(c.scheme, "scheme");
  if (c.scopus) require_readable(*c.scopus, "scopus");
  if (c.out.empty()) throw Error(ErrorKind::ConfigInvalid, "missing output directory");
  if (c.min_weight < 1) throw Error(ErrorKind::ConfigInvalid, "min_weight must be >= 1");
  if (c.windows.empty()) throw Error(ErrorKind::ConfigInvalid, "no Price windows");
  for (int w : c.windows)
    if (w <= 0) throw Error(ErrorKind::ConfigInvalid, "Price windows must be positive");
  if (c.nsims > 0 && c.nsims < 100) throw Error(ErrorKind::ConfigInvalid, "nsims must be 0 or >= 100");
  if (c.nsims > 0 && !c.seed) throw Error(ErrorKind::ConfigInvalid, "seed is required when nsims > 0");
  if (c.citation_window.first > c.citation_window.last || c.publication_window.first > c.publication_window.last)
    throw Error(ErrorKind::ConfigInvalid, "year window with first > last");
  if (c.workers == 0) throw Error(ErrorKind::ConfigInvalid, "workers must be >= 1");
}

// ---------------------------------------------------------------------------
// Digests and exit codes

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::IoFailure, "SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigInvalid: return 2;
    case ErrorKind::InvariantViolation: return 3;
    default: return 1;
  }
}

/// Single-line JSON diagnostic.
inline std::string error_line(ErrorKind kind, std::string_view message) {
  Json j = {{"error", std::string(to_string(kind))}, {"exit", exit_code_for(kind)}, {"message", std::string(message)}};
  return j.dump();
}

struct ArtifactEntry {
  std::string file;
  std::string sha256;
  std::size_t bytes = 0;
};

struct PipelineResult {
  std::vector<ArtifactEntry> artifacts;
  std::string manifest;  // manifest.json text
};

namespace detail {

inline void check_invariant(bool ok, const std::string& name) {
  if (!ok) throw Error(ErrorKind::InvariantViolation, name);
}

inline void apply_scopus_overrides(std::vector<JournalRecord>& journals, const fs::path& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  csv::Reader reader(in);
  const auto c_id = reader.column("journal_id");
  const auto c_cit = reader.column("window_citations");
  const auto c_art = reader.has("window_articles") ? std::optional(reader.column("window_articles")) : std::nullopt;
  std::map<std::string, std::pair<std::int64_t, std::optional<std::int64_t>>> by_id;
  while (auto row = reader.next()) {
    try {
      if (row->size() != reader.width()) throw Error(ErrorKind::ParseError, "wrong field count");
      const auto& r = *row;
      by_id[std::string(csv::trim(r[c_id]))] = {
          detail::parse_count(r[c_cit], "window_citations"),
          c_art ? std::optional(detail::parse_count(r[*c_art], "window_articles")) : std::nullopt};
    } catch (const Error& e) {
      if (strict) throw Error(ErrorKind::ParseError, "line " + std::to_string(reader.line_number()) + ": " + e.what());
    }
  }
  for (auto& j : journals)
    if (auto it = by_id.find(j.journal_id); it != by_id.end()) {
      j.window_citations = it->second.first;
      if (it->second.second) j.window_articles = *it->second.second;
    }
}

inline Json describe_or_null(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  Json j = to_json(describe(v));
  j["box"] = to_json(box_summary(v));
  return j;
}

}  // namespace detail

/// Runs every stage and writes the nine artifacts plus manifest.json into cfg.out.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  validate_config(cfg);
  const Json echo = config_echo(cfg);
  const Json seeds = cfg.seed ? Json{{"bootstrap", *cfg.seed}} : Json::object();

  // Inputs.
  SchemeExpectation expect;
  expect.fields = cfg.expect_fields;
  auto scheme = std::make_shared<ClassificationScheme>(ClassificationScheme::load(cfg.scheme));
  scheme->validate(expect);
  auto jbatch = read_journals(cfg.journals, cfg.strict);
  if (cfg.scopus) detail::apply_scopus_overrides(jbatch.journals, *cfg.scopus, cfg.strict);
  std::vector<ClassifiedJournal> all_journals;
  for (const auto& j : jbatch.journals) {
    auto c = classify_journal(j, *scheme);
    if (!c.fields.empty()) all_journals.push_back(std::move(c));
  }
  auto rbatch = read_references(cfg.refs, cfg.strict);
  const auto parse_errors = rbatch.errors.size();
  auto ingested = ingest_references(std::move(rbatch));
  LinkOptions lopts;
  lopts.lenient_duplicate_issn = cfg.lenient_duplicate_issn;
  const LinkedCorpus corpus = link_and_classify(std::move(ingested), std::move(jbatch.journals), scheme, lopts);
  const auto& f = corpus.funnel;
  detail::check_invariant(f.conserved(), "funnel conservation");
  detail::check_invariant(f.raw >= f.deduplicated && f.deduplicated >= f.date_valid && f.date_valid >= f.linked,
                          "funnel monotonicity");
  const LinkedCorpus window = restrict_window(corpus, cfg.citation_window, cfg.publication_window);

  // Metrics.
  Json stats;
  stats["funnel"] = to_json(f);
  stats["funnel"]["journal_parse_errors"] = jbatch.errors.size();
  stats["funnel"]["reference_parse_errors"] = parse_errors;
  stats["conflicts"] = corpus.conflicts;
  stats["scheme"] = {{"areas", scheme->area_count()}, {"main_fields", scheme->main_field_count()},
                     {"fields", scheme->field_count()}};
  stats["journals"] = {{"loaded", all_journals.size()}, {"resolved", corpus.journals.size()}};
  stats["descriptives"] = {{"references_per_entry", detail::describe_or_null(references_per_entry(corpus))},
                           {"citations_per_work", detail::describe_or_null(citations_per_work(corpus))},
                           {"publication_year", detail::describe_or_null(publication_years(corpus))}};
  {
    std::vector<double> cy;
    for (const auto& r : corpus.records) cy.push_back(year_of(r.ref.citation_date));
    stats["descriptives"]["citation_year"] = detail::describe_or_null(cy);
    const auto per_journal = citations_per_journal(corpus);
    std::vector<double> pj(per_journal.begin(), per_journal.end());
    stats["descriptives"]["citations_per_journal"] = detail::describe_or_null(pj);
    Json conc = Json::object();
    const auto per_work = citations_per_work(corpus);
    for (double frac : {0.01, 0.1, 0.2}) {
      const auto key = "top_" + fmt_real(frac * 100) + "pct";
      conc["works"][key] = per_work.empty() ? Json(nullptr) : Json(concentration_share(per_work, frac));
      conc["journals"][key] = pj.empty() ? Json(nullptr) : Json(concentration_share(pj, frac));
    }
    stats["concentration"] = conc;
  }

  std::vector<PriceIndexReport> price;
  price.push_back(price_index(corpus, cfg.windows));
  {
    auto grouped = price_index_grouped(corpus, cfg.windows, Tier::area);
    price.insert(price.end(), grouped.begin(), grouped.end());
  }
  for (const auto& p : price)
    for (std::size_t i = 1; i < p.fractions.size(); ++i)
      detail::check_invariant(p.windows[i] < p.windows[i - 1] || p.fractions[i] >= p.fractions[i - 1],
                              "Price index monotone in window");
  stats["price_index"] = to_json(price.front());
  {
    Json aging = Json::array();
    for (const auto& a : citation_aging_profile(corpus))
      aging.push_back({{"offset", a.offset}, {"references", a.references}, {"mean_per_entry", a.mean_per_entry},
                       {"share", a.share}});
    stats["aging"] = aging;
  }

  // Co-citation and PFNET.
  CoCitationOptions copts;
  copts.mode = cfg.mode;
  copts.workers = cfg.workers;
  const CoCitationGraph graph = build_cocitation(corpus, cfg.level, copts);
  graph.validate();
  const PFNetwork pf = pfnet_sparsify(graph);
  detail::check_invariant(pf.retained.size() == graph.edge_count(), "PFNET mask covers every edge");
  const CoCitationGraph pf_graph = pfnet_graph(graph, pf);
  detail::check_invariant(graph.empty() || component_labels(pf_graph) == component_labels(graph),
                          "PFNET preserves connected components");
  const CoCitationGraph filtered = filter_edges_min_weight(pf_graph, cfg.min_weight, cfg.filter);
  {
    Json net;
    net["cocitation"] = to_json(cocitation_totals(graph));
    net["pfnet"] = to_json(cocitation_totals(pf_graph));
    net["filtered"] = to_json(cocitation_totals(filtered));
    if (!graph.empty()) {
      const auto census = giant_component(graph);
      net["components"] = census.sizes.size();
      net["giant_component_nodes"] = census.giant.node_count();
      net["outside_giant_share"] =
          1.0 - static_cast<double>(census.giant.node_count()) / static_cast<double>(graph.node_count());
      Json shares = Json::object();
      bool grouped = true;
      for (const auto& n : graph.nodes) grouped &= !n.area_label.empty();
      if (grouped && graph.edge_count() > 0)
        for (const auto& [grp, s] : intra_inter_shares(graph, area_groups(graph)))
          shares[grp] = {{"total_weight", s.total_weight}, {"intra", s.intra}, {"inter", s.inter}};
      net["area_shares"] = shares;
    }
    stats["network"] = net;
  }

  CentralityReport cent;
  if (!filtered.empty()) {
    CentralityOptions o;
    o.throw_on_no_convergence = false;
    o.workers = cfg.workers;
    cent = centralities(filtered, true, o);
  }
  stats["centrality"] = {{"weighted", true},
                         {"normalization", cent.normalization()},
                         {"component_handling", cent.component_handling()},
                         {"eigen_converged", cent.eigen_converged},
                         {"eigen_residual", cent.eigen_residual},
                         {"eigen_iterations", cent.eigen_iterations}};

  // Tail fits.
  Json tail;
  std::vector<CdfPoint> cdf;
  {
    const auto counts_all = citations_per_journal(cfg.tail_population == TailPopulation::full ? corpus : window);
    std::vector<std::int64_t> counts;
    for (auto c : counts_all)
      if (c > 0) counts.push_back(c);
    tail["population"] = std::string(to_string(cfg.tail_population));
    tail["samples"] = counts.size();
    try {
      const auto pl = fit_power_law(counts);
      tail["power_law"] = to_json(pl);
      tail["goodness_of_fit"] = cfg.nsims > 0 ? to_json(gof_bootstrap(pl, counts, cfg.nsims, *cfg.seed, cfg.workers))
                                              : Json(nullptr);
      try {
        const auto ln = fit_lognormal_tail(counts, pl.xmin);
        tail["log_normal"] = to_json(ln);
        tail["vuong"] = to_json(vuong_compare(pl, ln, counts));
        cdf = tail_cdf_points(pl, ln, counts);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateInput) throw;
        tail["log_normal"] = nullptr;
        tail["vuong"] = nullptr;
        tail["log_normal_skipped"] = e.what();
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateInput && e.kind() != ErrorKind::EmptyInput &&
          e.kind() != ErrorKind::NonPositiveSample)
        throw;
      tail["power_law"] = nullptr;
      tail["skipped"] = e.what();
    }
  }

  // Comparisons over the window.
  const auto jc = window_journal_counts(window);
  const auto ratios = percentile_ratio(jc);
  std::vector<FieldShareDiff> shares;
  Json cmp;
  cmp["percentile_ties"] = std::string(kPercentileTiePolicy);
  cmp["eligible_journals"] = ratios.size();
  try {
    shares = field_share_diff(cited_articles_by_main_field(window), published_articles_by_main_field(all_journals));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptySource) throw;
    cmp["field_shares_skipped"] = e.what();
  }
  {
    std::vector<double> x, y;
    for (const auto& c : jc)
      if (c.wiki_citations > 0) {
        x.push_back(static_cast<double>(c.scopus_citations));
        y.push_back(static_cast<double>(c.wiki_citations));
      }
    cmp["regression_points"] = x.size();
    try {
      cmp["linear_fit_wiki_on_scopus"] = to_json(linear_fit(x, y));
    } catch (const Error& e) {
      cmp["linear_fit_wiki_on_scopus"] = nullptr;
      cmp["linear_fit_skipped"] = e.what();
    }
    Json qq = Json::array();
    if (!x.empty())
      for (const auto& [a, b] : qq_points(x, y, std::min<std::size_t>(100, x.size()))) qq.push_back({a, b});
    cmp["qq_scopus_wiki"] = qq;
  }
  stats["comparison"] = cmp;

  // Artifacts, written in a fixed order.
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("stats.json", dump_json(make_report("stats", stats, echo, seeds)));
  files.emplace_back("price_index.csv", price_index_csv_string(price));
  files.emplace_back("cocitation.graphml", graphml_string(graph, std::span<const char>(pf.retained)));
  files.emplace_back("pfnet.graphml", graphml_string(filtered));
  files.emplace_back("centrality.csv", filtered.empty() ? centrality_csv_string(filtered, {}) : centrality_csv_string(filtered, cent));
  files.emplace_back("tailfit.json", dump_json(make_report("tailfit", tail, echo, seeds)));
  files.emplace_back("tailfit_cdf.csv", cdf_csv_string(cdf));
  files.emplace_back("percentile_ratios.csv", percentile_csv_string(ratios));
  files.emplace_back("field_shares.csv", field_share_csv_string(shares));

  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + cfg.out.string() + ": " + ec.message());
  PipelineResult result;
  Json manifest;
  manifest["tool"] = {{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
  manifest["seeds"] = seeds;
  manifest["artifacts"] = Json::array();
  for (const auto& [name, text] : files) {
    write_text_file(cfg.out / name, text);
    ArtifactEntry a{name, sha256_hex(text), text.size()};
    manifest["artifacts"].push_back({{"file", a.file}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    result.artifacts.push_back(std::move(a));
  }
  result.manifest = dump_json(manifest);
  write_text_file(cfg.out / "manifest.json", result.manifest);
  return result;
}

}  // namespace scimap

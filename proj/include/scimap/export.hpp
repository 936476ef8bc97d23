#pragma once

// Serialization of graphs and reports. All writers build the full text first, so output is
// byte-stable for identical inputs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scimap/cocitation.hpp"
#include "scimap/compare.hpp"
#include "scimap/corpus.hpp"
#include "scimap/error.hpp"
#include "scimap/heavytail.hpp"
#include "scimap/metrics.hpp"
#include "scimap/netmetrics.hpp"
#include "scimap/pathfinder.hpp"
#include "scimap/util/csv.hpp"

namespace scimap {

inline constexpr std::string_view kToolName = "scimap";
inline constexpr std::string_view kToolVersion = "1.0.0";

using Json = nlohmann::json;

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// %.12g rendering used by every CSV writer.
inline std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON

/// Rounds to 12 significant digits; the shortest round-trip form of the result has at most 12.
inline double round_sig12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline void round_numbers(Json& j) {
  if (j.is_number_float()) {
    j = round_sig12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& child : j) round_numbers(child);
  }
}

/// Stable text: sorted keys, 2-space indent, trailing newline.
inline std::string dump_json(Json j) {
  round_numbers(j);
  return j.dump(2) + "\n";
}

/// Envelope carried by every JSON report.
inline Json make_report(std::string_view kind, Json body, const Json& config = Json::object(),
                        const Json& seeds = Json::object()) {
  Json r;
  r["report"] = std::string(kind);
  r["tool"] = {{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
  r["config"] = config;
  r["seeds"] = seeds;
  r["body"] = std::move(body);
  return r;
}

inline void export_report(const Json& report, const std::filesystem::path& path) {
  write_text_file(path, dump_json(report));
}

inline Json to_json(const Funnel& f) {
  return {{"parse_errors", f.parse_errors}, {"rejected_issns", f.rejected_issns}, {"raw", f.raw},
          {"duplicates", f.duplicates},     {"deduplicated", f.deduplicated},     {"missing_date", f.missing_date},
          {"date_valid", f.date_valid},     {"unresolved", f.unresolved},         {"linked", f.linked},
          {"multi_journal", f.multi_journal}, {"conflicting_works", f.conflicting_works}};
}

inline Json to_json(const DescriptiveStats& d) {
  return {{"n", d.n}, {"mean", d.mean}, {"median", d.median}, {"sd", d.sd}, {"iqr", d.iqr}};
}

inline Json to_json(const BoxSummary& b) {
  return {{"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3}, {"max", b.max}, {"outliers", b.outliers}};
}

inline Json to_json(const PriceIndexReport& p) {
  Json j = {{"windows", p.windows},
            {"eligible", p.eligible},
            {"excluded_negative_age", p.excluded_negative_age},
            {"boundary", p.inclusive_upper ? "age <= N" : "age < N"}};
  j["fractions"] = p.defined() ? Json(p.fractions) : Json(nullptr);
  j["group"] = p.group ? Json(*p.group) : Json(nullptr);
  return j;
}

inline Json to_json(const TailFit& f) {
  Json j = {{"model", std::string(to_string(f.model))},
            {"xmin", f.xmin},
            {"n_tail", f.n_tail},
            {"log_likelihood", f.log_likelihood},
            {"ks_stat", f.ks_stat}};
  if (f.model == TailModel::power_law)
    j["alpha"] = f.alpha;
  else {
    j["mu"] = f.mu;
    j["sigma"] = f.sigma;
  }
  return j;
}

inline Json to_json(const GofResult& g) {
  return {{"p_value", g.p_value},
          {"n_bootstrap", g.n_bootstrap},
          {"seed", g.seed},
          {"observed_ks", g.observed_ks},
          {"failed_refits", g.failed_refits}};
}

inline Json to_json(const VuongResult& v) {
  return {{"statistic", v.statistic},
          {"p_value", v.p_value},
          {"log_likelihood_ratio", v.log_likelihood_ratio},
          {"n", v.n},
          {"preferred", std::string(to_string(v.preferred))}};
}

inline Json to_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

inline Json to_json(const CoCitationTotals& t) {
  return {{"nodes", t.nodes}, {"cocited_nodes", t.cocited_nodes}, {"edges", t.edges}, {"total_weight", t.total_weight}};
}

// ---------------------------------------------------------------------------
// Graphs

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

/// GraphML text. `retained`, when given, adds a boolean pfnet_retained attribute per edge.
inline std::string graphml_string(const CoCitationGraph& g, std::optional<std::span<const char>> retained = {}) {
  if (retained && retained->size() != g.edge_count())
    throw Error(ErrorKind::InvalidArgument, "retained mask does not match edge count");
  bool any_oa = false;
  for (const auto& n : g.nodes) any_oa |= n.open_access.has_value();
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
    << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
    << "  <key id=\"citations\" for=\"node\" attr.name=\"citations\" attr.type=\"long\"/>\n"
    << "  <key id=\"area\" for=\"node\" attr.name=\"area\" attr.type=\"string\"/>\n";
  if (any_oa) o << "  <key id=\"open_access\" for=\"node\" attr.name=\"open_access\" attr.type=\"boolean\"/>\n";
  o << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n";
  if (retained) o << "  <key id=\"pfnet_retained\" for=\"edge\" attr.name=\"pfnet_retained\" attr.type=\"boolean\"/>\n";
  o << "  <graph id=\"" << to_string(g.level) << "\" edgedefault=\"undirected\">\n";
  for (const auto& n : g.nodes) {
    o << "    <node id=\"" << xml_escape(n.id) << "\">\n"
      << "      <data key=\"label\">" << xml_escape(n.label) << "</data>\n"
      << "      <data key=\"citations\">" << n.citations << "</data>\n"
      << "      <data key=\"area\">" << xml_escape(n.area_label) << "</data>\n";
    if (n.open_access) o << "      <data key=\"open_access\">" << (*n.open_access ? "true" : "false") << "</data>\n";
    o << "    </node>\n";
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    o << "    <edge source=\"" << xml_escape(g.nodes[e.u].id) << "\" target=\"" << xml_escape(g.nodes[e.v].id)
      << "\">\n"
      << "      <data key=\"weight\">" << e.weight << "</data>\n";
    if (retained) o << "      <data key=\"pfnet_retained\">" << ((*retained)[i] ? "true" : "false") << "</data>\n";
    o << "    </edge>\n";
  }
  o << "  </graph>\n</graphml>\n";
  return o.str();
}

/// source,target,weight rows in canonical pair order.
inline std::string edge_csv_string(const CoCitationGraph& g) {
  std::ostringstream o;
  csv::write_row(o, {"source", "target", "weight"});
  for (const auto& e : g.edges) csv::write_row(o, {g.nodes[e.u].id, g.nodes[e.v].id, std::to_string(e.weight)});
  return o.str();
}

enum class NetworkFormat { graphml, edge_csv };

inline void export_network(const CoCitationGraph& g, NetworkFormat format, const std::filesystem::path& path,
                           std::optional<std::span<const char>> retained = {}) {
  write_text_file(path, format == NetworkFormat::graphml ? graphml_string(g, retained) : edge_csv_string(g));
}

// ---------------------------------------------------------------------------
// Tables

/// node_id,label,citations,weighted_degree,betweenness,closeness,eigenvector
inline std::string centrality_csv_string(const CoCitationGraph& g, const CentralityReport& r) {
  const auto deg = weighted_degree(g);
  std::ostringstream o;
  csv::write_row(o, {"node_id", "label", "citations", "weighted_degree", "betweenness", "closeness", "eigenvector"});
  for (std::size_t n = 0; n < g.node_count(); ++n)
    csv::write_row(o, {g.nodes[n].id, g.nodes[n].label, std::to_string(g.nodes[n].citations), std::to_string(deg[n]),
                       fmt_real(r.betweenness[n]), fmt_real(r.closeness[n]), fmt_real(r.eigenvector[n])});
  return o.str();
}

/// window,group,fraction; the ungrouped population is labelled "all".
inline std::string price_index_csv_string(std::span<const PriceIndexReport> reports) {
  std::ostringstream o;
  csv::write_row(o, {"window", "group", "fraction"});
  for (const auto& r : reports) {
    if (!r.defined()) continue;
    for (std::size_t i = 0; i < r.windows.size(); ++i)
      csv::write_row(o, {std::to_string(r.windows[i]), r.group.value_or("all"), fmt_real(r.fractions[i])});
  }
  return o.str();
}

/// journal,wiki,scopus,articles,wiki_percentile,scopus_percentile,ratio
inline std::string percentile_csv_string(std::span<const JournalComparison> rows) {
  std::ostringstream o;
  o << "# percentile ties: " << kPercentileTiePolicy << "\n";
  csv::write_row(o, {"journal", "wiki", "scopus", "articles", "wiki_percentile", "scopus_percentile", "ratio"});
  for (const auto& r : rows)
    csv::write_row(o, {r.journal_id, std::to_string(r.wiki_citations), std::to_string(r.scopus_citations),
                       std::to_string(r.wiki_articles_cited), fmt_real(r.wiki_percentile),
                       fmt_real(r.scopus_percentile), fmt_real(r.ratio)});
  return o.str();
}

/// field,share_wiki,share_scopus,diff
inline std::string field_share_csv_string(std::span<const FieldShareDiff> rows) {
  std::ostringstream o;
  csv::write_row(o, {"field", "share_wiki", "share_scopus", "diff"});
  for (const auto& r : rows)
    csv::write_row(o, {r.main_field, fmt_real(r.share_a), fmt_real(r.share_b), fmt_real(r.diff)});
  return o.str();
}

/// x,empirical,power_law,log_normal
inline std::string cdf_csv_string(std::span<const CdfPoint> points) {
  std::ostringstream o;
  csv::write_row(o, {"x", "empirical", "power_law", "log_normal"});
  for (const auto& p : points)
    csv::write_row(o, {std::to_string(p.x), fmt_real(p.empirical), fmt_real(p.power_law), fmt_real(p.log_normal)});
  return o.str();
}

}  // namespace scimap

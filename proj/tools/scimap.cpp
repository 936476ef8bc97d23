// scimap command-line front end. One subcommand per analysis stage plus `pipeline`, which
// runs them all, and `synth`, which writes a synthetic corpus.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "scimap/pipeline.hpp"
#include "scimap/synth.hpp"

using namespace scimap;

namespace {

struct CorpusArgs {
  std::string refs, journals, scheme, scopus;
  bool strict = false;
  bool lenient_duplicate_issn = false;
  std::size_t expect_fields = 0;
};

void add_corpus_options(CLI::App* cmd, CorpusArgs& a) {
  cmd->add_option("--refs", a.refs, "Reference table (.csv or .jsonl)")->required();
  cmd->add_option("--journals", a.journals, "Journal metadata CSV")->required();
  cmd->add_option("--scheme", a.scheme, "Classification scheme CSV")->required();
  cmd->add_flag("--strict", a.strict, "Fail on the first malformed row");
  cmd->add_flag("--lenient-duplicate-issn", a.lenient_duplicate_issn, "Keep the first journal claiming an ISSN");
  cmd->add_option("--expect-fields", a.expect_fields, "Expected number of fields in the scheme");
}

struct Loaded {
  LinkedCorpus corpus;
  std::vector<ClassifiedJournal> all_journals;
  std::size_t journal_errors = 0;
  std::size_t reference_errors = 0;
};

Loaded load(const CorpusArgs& a) {
  PipelineConfig probe;
  probe.refs = a.refs;
  probe.journals = a.journals;
  probe.scheme = a.scheme;
  require_readable(probe.refs, "references");
  require_readable(probe.journals, "journals");
  require_readable(probe.scheme, "scheme");
  SchemeExpectation expect;
  if (a.expect_fields) expect.fields = a.expect_fields;
  auto scheme = std::make_shared<ClassificationScheme>(ClassificationScheme::load(a.scheme));
  scheme->validate(expect);
  auto jb = read_journals(a.journals, a.strict);
  if (!a.scopus.empty()) {
    require_readable(a.scopus, "scopus");
    detail::apply_scopus_overrides(jb.journals, a.scopus, a.strict);
  }
  Loaded out;
  out.journal_errors = jb.errors.size();
  for (const auto& j : jb.journals) {
    auto c = classify_journal(j, *scheme);
    if (!c.fields.empty()) out.all_journals.push_back(std::move(c));
  }
  auto rb = read_references(a.refs, a.strict);
  out.reference_errors = rb.errors.size();
  LinkOptions lo;
  lo.lenient_duplicate_issn = a.lenient_duplicate_issn;
  out.corpus = link_and_classify(ingest_references(std::move(rb)), std::move(jb.journals), scheme, lo);
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

NetworkFormat format_for(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? NetworkFormat::edge_csv
                                                                           : NetworkFormat::graphml;
}

std::string network_text(const CoCitationGraph& g, const std::string& path) {
  return format_for(path) == NetworkFormat::edge_csv ? edge_csv_string(g) : graphml_string(g);
}

std::vector<std::int64_t> read_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  std::vector<std::int64_t> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = csv::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) {
      if (out.empty() && n == 1) continue;  // header
      throw Error(ErrorKind::ParseError, path + " line " + std::to_string(n) + ": not an integer");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-citation, obsolescence and heavy-tail analysis of encyclopedia references"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  unsigned workers = default_workers();
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  CorpusArgs ca;
  std::string out, level = "journal", mode = "set", windows = "5,10,15,20", tier = "area", tail_pop = "full";
  std::string cite_window = "2016", pub_window = "2013:2015", cdf_out, counts_path, config_path, filter = "edge_weight";
  std::int64_t min_weight = 50;
  std::size_t nsims = 1000;
  std::uint64_t seed = 0;
  bool hops = false, harmonic = false, inclusive = false;

  auto* ingest = app.add_subcommand("ingest", "Parse, deduplicate and link references; print the funnel");
  add_corpus_options(ingest, ca);
  ingest->add_option("--out", out, "Output JSON (default stdout)");

  auto* stats = app.add_subcommand("stats", "Descriptive statistics, Price index and aging profile");
  add_corpus_options(stats, ca);
  stats->add_option("--windows", windows, "Price windows, comma separated");
  stats->add_option("--tier", tier, "Grouping tier for the Price index")->check(CLI::IsMember({"field", "main_field", "area"}));
  stats->add_flag("--inclusive", inclusive, "Count age == N inside window N");
  stats->add_option("--out", out, "Output JSON (default stdout)");
  stats->add_option("--price-csv", cdf_out, "Also write the Price index table here");

  auto* cocite = app.add_subcommand("cocite", "Build a co-citation network");
  auto* pfnet = app.add_subcommand("pfnet", "PFNET (r = inf, q = n - 1) then the minimum-weight filter");
  auto* centrality = app.add_subcommand("centrality", "Centralities of the filtered PFNET");
  for (auto* cmd : {cocite, pfnet, centrality}) {
    add_corpus_options(cmd, ca);
    cmd->add_option("--level", level, "work|journal|field|main_field|area")
        ->check(CLI::IsMember({"work", "journal", "field", "main_field", "area"}));
    cmd->add_option("--mode", mode, "set|pair_sum")->check(CLI::IsMember({"set", "pair_sum"}));
    cmd->add_option("--out", out, "Output file (.graphml or .csv)")->required();
  }
  for (auto* cmd : {pfnet, centrality}) {
    cmd->add_option("--min-weight", min_weight, "Minimum co-citation count kept after PFNET")->check(CLI::PositiveNumber);
    cmd->add_option("--filter", filter, "edge_weight|node_strength")->check(CLI::IsMember({"edge_weight", "node_strength"}));
  }
  centrality->add_flag("--hops", hops, "Shortest paths over hop counts instead of 1/weight");
  centrality->add_flag("--harmonic", harmonic, "Harmonic closeness");

  auto* tailfit = app.add_subcommand("tailfit", "Power-law and log-normal fits to journal citation counts");
  tailfit->add_option("--counts", counts_path, "One-column count file");
  tailfit->add_option("--refs", ca.refs, "Reference table (instead of --counts)");
  tailfit->add_option("--journals", ca.journals, "Journal metadata CSV");
  tailfit->add_option("--scheme", ca.scheme, "Classification scheme CSV");
  tailfit->add_flag("--strict", ca.strict, "Fail on the first malformed row");
  tailfit->add_option("--population", tail_pop, "full|window")->check(CLI::IsMember({"full", "window"}));
  tailfit->add_option("--citation-window", cite_window, "Citation years, e.g. 2016 or 2015:2016");
  tailfit->add_option("--publication-window", pub_window, "Publication years, e.g. 2013:2015");
  tailfit->add_option("--nsims", nsims, "Bootstrap simulations (0 disables)");
  auto* tail_seed = tailfit->add_option("--seed", seed, "Bootstrap seed");
  tailfit->add_option("--out", out, "Output JSON (default stdout)");
  tailfit->add_option("--cdf", cdf_out, "CSV of empirical and fitted CDF points");

  auto* compare = app.add_subcommand("compare", "Percentile ratios, field shares and regression against Scopus");
  add_corpus_options(compare, ca);
  compare->add_option("--scopus", ca.scopus, "CSV overriding journal window counts");
  compare->add_option("--citation-window", cite_window, "Citation years");
  compare->add_option("--publication-window", pub_window, "Publication years");
  compare->add_option("--out", out, "Output directory")->required();

  PipelineConfig pc;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write all artifacts");
  pipeline->add_option("--config", config_path, "JSON config; flags override it");
  auto* p_refs = pipeline->add_option("--refs", ca.refs, "Reference table");
  auto* p_journals = pipeline->add_option("--journals", ca.journals, "Journal metadata CSV");
  auto* p_scheme = pipeline->add_option("--scheme", ca.scheme, "Classification scheme CSV");
  auto* p_scopus = pipeline->add_option("--scopus", ca.scopus, "CSV overriding journal window counts");
  auto* p_level = pipeline->add_option("--level", level, "Co-citation level");
  auto* p_mode = pipeline->add_option("--mode", mode, "set|pair_sum");
  auto* p_min = pipeline->add_option("--min-weight", min_weight, "Post-PFNET minimum weight");
  auto* p_windows = pipeline->add_option("--windows", windows, "Price windows");
  auto* p_nsims = pipeline->add_option("--nsims", nsims, "Bootstrap simulations");
  auto* p_seed = pipeline->add_option("--seed", seed, "Bootstrap seed");
  auto* p_out = pipeline->add_option("--out", out, "Output directory");
  auto* p_strict = pipeline->add_flag("--strict", ca.strict, "Fail on the first malformed row");
  auto* p_cw = pipeline->add_option("--citation-window", cite_window, "Comparison citation years");
  auto* p_pw = pipeline->add_option("--publication-window", pub_window, "Comparison publication years");
  auto* p_pop = pipeline->add_option("--tail-population", tail_pop, "full|window");
  auto* p_expect = pipeline->add_option("--expect-fields", ca.expect_fields, "Expected number of fields");

  SynthParams sp;
  auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic corpus");
  synth->add_option("--scheme", ca.scheme, "Classification scheme CSV")->required();
  synth->add_option("--entries", sp.entries, "Citing entries");
  synth->add_option("--references", sp.references, "Reference rows");
  synth->add_option("--n-journals", sp.journals, "Journals");
  synth->add_option("--seed", sp.seed, "Generator seed");
  synth->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << error_line(ErrorKind::ConfigInvalid, e.what()) << "\n";
    return 2;
  }

  try {
    if (ingest->parsed()) {
      const auto l = load(ca);
      Json body = to_json(l.corpus.funnel);
      body["journal_parse_errors"] = l.journal_errors;
      body["reference_parse_errors"] = l.reference_errors;
      body["conflicts"] = l.corpus.conflicts;
      emit(dump_json(make_report("ingest", body)), out);
    } else if (stats->parsed()) {
      const auto l = load(ca);
      const auto w = parse_windows(windows);
      validate_windows(w);
      PriceIndexOptions po;
      po.inclusive_upper = inclusive;
      const Tier t = tier == "field" ? Tier::field : tier == "main_field" ? Tier::main_field : Tier::area;
      std::vector<PriceIndexReport> reports{price_index(l.corpus, w, po)};
      for (auto& r : price_index_grouped(l.corpus, w, t, po)) reports.push_back(std::move(r));
      Json body;
      body["funnel"] = to_json(l.corpus.funnel);
      body["references_per_entry"] = detail::describe_or_null(references_per_entry(l.corpus));
      body["citations_per_work"] = detail::describe_or_null(citations_per_work(l.corpus));
      body["publication_year"] = detail::describe_or_null(publication_years(l.corpus));
      body["price_index"] = Json::array();
      for (const auto& r : reports) body["price_index"].push_back(to_json(r));
      body["aging"] = Json::array();
      for (const auto& a : citation_aging_profile(l.corpus))
        body["aging"].push_back({{"offset", a.offset}, {"references", a.references},
                                 {"mean_per_entry", a.mean_per_entry}, {"share", a.share}});
      emit(dump_json(make_report("stats", body, {{"windows", w}, {"tier", tier}, {"inclusive", inclusive}})), out);
      if (!cdf_out.empty()) write_text_file(cdf_out, price_index_csv_string(reports));
    } else if (cocite->parsed() || pfnet->parsed() || centrality->parsed()) {
      const auto l = load(ca);
      CoCitationOptions co;
      co.mode = mode_or_throw(mode);
      co.workers = workers;
      auto g = build_cocitation(l.corpus, level_or_throw(level), co);
      if (cocite->parsed()) {
        write_text_file(out, network_text(g, out));
        std::cout << dump_json(to_json(cocitation_totals(g)));
        return 0;
      }
      const auto pf = pfnet_sparsify(g);
      g = filter_edges_min_weight(pfnet_graph(g, pf), min_weight,
                                  filter == "edge_weight" ? FilterMode::edge_weight : FilterMode::node_strength);
      if (pfnet->parsed()) {
        write_text_file(out, network_text(g, out));
        std::cout << dump_json(to_json(cocitation_totals(g)));
        return 0;
      }
      CentralityReport rep;
      if (!g.empty()) {
        CentralityOptions o;
        o.harmonic_closeness = harmonic;
        o.throw_on_no_convergence = false;
        o.workers = workers;
        rep = centralities(g, !hops, o);
        if (!rep.eigen_converged)
          std::cerr << error_line(ErrorKind::NoConvergence, "eigenvector residual " + fmt_real(rep.eigen_residual))
                    << "\n";
      }
      write_text_file(out, centrality_csv_string(g, rep));
    } else if (tailfit->parsed()) {
      std::vector<std::int64_t> counts;
      if (!counts_path.empty()) {
        require_readable(counts_path, "counts");
        counts = read_counts(counts_path);
      } else {
        if (ca.refs.empty() || ca.journals.empty() || ca.scheme.empty())
          throw Error(ErrorKind::ConfigInvalid, "tailfit needs --counts or --refs/--journals/--scheme");
        const auto l = load(ca);
        const auto c = tail_pop == "full"
                           ? citations_per_journal(l.corpus)
                           : citations_per_journal(restrict_window(l.corpus, parse_year_range(cite_window),
                                                                   parse_year_range(pub_window)));
        for (auto x : c)
          if (x > 0) counts.push_back(x);
      }
      if (nsims > 0 && tail_seed->count() == 0) throw Error(ErrorKind::ConfigInvalid, "--seed is required when nsims > 0");
      if (nsims > 0 && nsims < 100) throw Error(ErrorKind::ConfigInvalid, "--nsims must be 0 or >= 100");
      const auto pl = fit_power_law(counts);
      const auto ln = fit_lognormal_tail(counts, pl.xmin);
      Json body;
      body["samples"] = counts.size();
      body["power_law"] = to_json(pl);
      body["log_normal"] = to_json(ln);
      body["vuong"] = to_json(vuong_compare(pl, ln, counts));
      body["goodness_of_fit"] = nsims > 0 ? to_json(gof_bootstrap(pl, counts, nsims, seed, workers)) : Json(nullptr);
      Json seeds = nsims > 0 ? Json{{"bootstrap", seed}} : Json::object();
      emit(dump_json(make_report("tailfit", body, {{"nsims", nsims}, {"population", tail_pop}}, seeds)), out);
      if (!cdf_out.empty()) write_text_file(cdf_out, cdf_csv_string(tail_cdf_points(pl, ln, counts)));
    } else if (compare->parsed()) {
      const auto l = load(ca);
      const auto win = restrict_window(l.corpus, parse_year_range(cite_window), parse_year_range(pub_window));
      const auto jc = window_journal_counts(win);
      const auto ratios = percentile_ratio(jc);
      const auto shares =
          field_share_diff(cited_articles_by_main_field(win), published_articles_by_main_field(l.all_journals));
      std::vector<double> x, y;
      for (const auto& c : jc)
        if (c.wiki_citations > 0) {
          x.push_back(static_cast<double>(c.scopus_citations));
          y.push_back(static_cast<double>(c.wiki_citations));
        }
      Json body;
      body["percentile_ties"] = std::string(kPercentileTiePolicy);
      body["eligible_journals"] = ratios.size();
      body["linear_fit_wiki_on_scopus"] = to_json(linear_fit(x, y));
      std::filesystem::create_directories(out);
      const std::filesystem::path dir = out;
      write_text_file(dir / "percentile_ratios.csv", percentile_csv_string(ratios));
      write_text_file(dir / "field_shares.csv", field_share_csv_string(shares));
      export_report(make_report("compare", body, {{"citation_window", cite_window}, {"publication_window", pub_window}}),
                    dir / "compare.json");
    } else if (pipeline->parsed()) {
      if (!config_path.empty()) pc = load_config_file(config_path);
      if (p_refs->count()) pc.refs = ca.refs;
      if (p_journals->count()) pc.journals = ca.journals;
      if (p_scheme->count()) pc.scheme = ca.scheme;
      if (p_scopus->count()) pc.scopus = ca.scopus;
      if (p_level->count()) pc.level = level_or_throw(level);
      if (p_mode->count()) pc.mode = mode_or_throw(mode);
      if (p_min->count()) pc.min_weight = min_weight;
      if (p_windows->count()) pc.windows = parse_windows(windows);
      if (p_nsims->count()) pc.nsims = nsims;
      if (p_seed->count()) pc.seed = seed;
      if (p_out->count()) pc.out = out;
      if (p_strict->count()) pc.strict = ca.strict;
      if (p_cw->count()) pc.citation_window = parse_year_range(cite_window);
      if (p_pw->count()) pc.publication_window = parse_year_range(pub_window);
      if (p_pop->count()) pc.tail_population = parse_tail_population(tail_pop);
      if (p_expect->count()) pc.expect_fields = ca.expect_fields;
      if (app.get_option("--workers")->count()) pc.workers = workers;
      const auto res = run_pipeline(pc);
      std::cout << res.manifest;
    } else if (synth->parsed()) {
      require_readable(ca.scheme, "scheme");
      const auto scheme = ClassificationScheme::load(ca.scheme);
      const auto c = generate_corpus(sp, scheme);
      std::filesystem::create_directories(out);
      const std::filesystem::path dir = out;
      write_text_file(dir / "references.csv", references_csv_string(c, sp.bad_issn_rate, sp.seed));
      write_text_file(dir / "journals.csv", journals_csv_string(c));
    }
  } catch (const Error& e) {
    std::cerr << error_line(e.kind(), e.what()) << "\n";
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << error_line(ErrorKind::IoFailure, e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_line(ErrorKind::InvariantViolation, std::string("unexpected failure: ") + e.what()) << "\n";
    return 3;
  }
  return 0;
}

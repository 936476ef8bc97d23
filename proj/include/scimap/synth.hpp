#pragma once

// Deterministic synthetic corpora shaped like Wikipedia reference data: Zipf-like journal and
// article popularity, topical entries, heavy-tailed reference counts, and a small share of
// duplicate rows, missing publication dates and corrupt ISSNs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scimap/corpus.hpp"
#include "scimap/util/csv.hpp"
#include "scimap/util/rng.hpp"

namespace scimap {

struct SynthParams {
  std::size_t entries = 1000;
  std::size_t references = 5000;  // raw rows, including injected duplicates and missing dates
  std::size_t journals = 300;
  std::uint64_t seed = 42;
  double duplicate_rate = 0.02;
  double missing_date_rate = 0.02;
  double bad_issn_rate = 0.005;
  double topical_share = 0.7;
};

struct SyntheticCorpus {
  std::vector<ReferenceRecord> references;
  std::vector<JournalRecord> journals;
};

/// ISSN whose 7-digit body is `body`, with its check digit.
inline std::string make_issn(std::uint32_t body) {
  char digits[8];
  std::snprintf(digits, sizeof digits, "%07u", body % 10000000u);
  int sum = 0;
  for (int i = 0; i < 7; ++i) sum += (digits[i] - '0') * (8 - i);
  const int check = (11 - sum % 11) % 11;
  std::string s(digits, 7);
  s.push_back(check == 10 ? 'X' : static_cast<char>('0' + check));
  return s;
}

namespace detail {

/// Inverse-CDF sampler over fixed weights; platform independent.
class WeightedPicker {
 public:
  explicit WeightedPicker(const std::vector<double>& weights) {
    double acc = 0;
    for (double w : weights) cdf_.push_back(acc += w);
  }
  std::size_t operator()(Rng& rng) const {
    const double u = uniform01(rng) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }
  bool empty() const { return cdf_.empty(); }

 private:
  std::vector<double> cdf_;
};

inline std::string pad(const char* prefix, std::size_t i, int width) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

}  // namespace detail

inline SyntheticCorpus generate_corpus(const SynthParams& p, const ClassificationScheme& scheme) {
  if (p.entries == 0 || p.journals == 0 || p.references < p.entries)
    throw Error(ErrorKind::InvalidArgument, "synthetic corpus needs entries, journals and references >= entries");
  Rng rng = derived_rng(p.seed, 0);
  SyntheticCorpus out;

  // Codes grouped by 2-digit prefix; main fields weighted so a few dominate.
  std::vector<std::vector<int>> prefix_codes;
  {
    int last = -1;
    for (const auto& [code, name] : scheme.fields()) {
      if (code / 100 != last) {
        prefix_codes.emplace_back();
        last = code / 100;
      }
      prefix_codes.back().push_back(code);
    }
  }
  std::vector<double> mf_weight;
  for (std::size_t i = 0; i < prefix_codes.size(); ++i) mf_weight.push_back(1.0 / std::pow(1.0 + static_cast<double>(i % 9), 1.2));
  const detail::WeightedPicker pick_mf(mf_weight);

  // Journals.
  std::vector<std::size_t> journal_mf(p.journals);
  std::vector<double> journal_pop(p.journals);
  for (std::size_t j = 0; j < p.journals; ++j) {
    JournalRecord jr;
    jr.journal_id = detail::pad("J", j + 1, 5);
    jr.title = "Journal of Synthetic Studies " + std::to_string(j + 1);
    const auto mf = pick_mf(rng);
    journal_mf[j] = mf;
    const auto& codes = prefix_codes[mf];
    jr.asjc_codes.push_back(codes[uniform_index(rng, codes.size())]);
    const double extra = uniform01(rng);
    if (extra < 0.35) jr.asjc_codes.push_back(codes[uniform_index(rng, codes.size())]);
    if (extra < 0.12) {
      const auto& other = prefix_codes[pick_mf(rng)];
      jr.asjc_codes.push_back(other[uniform_index(rng, other.size())]);
    }
    std::sort(jr.asjc_codes.begin(), jr.asjc_codes.end());
    jr.asjc_codes.erase(std::unique(jr.asjc_codes.begin(), jr.asjc_codes.end()), jr.asjc_codes.end());
    jr.issns.push_back(make_issn(static_cast<std::uint32_t>(1000000 + 2 * j)));
    if (uniform01(rng) < 0.5) jr.issns.push_back(make_issn(static_cast<std::uint32_t>(1000001 + 2 * j)));
    jr.open_access = uniform01(rng) < 0.15;
    // Popularity ~ Zipf over a shuffled rank.
    journal_pop[j] = 1.0 / std::pow(static_cast<double>(j + 1), 0.9);
    out.journals.push_back(std::move(jr));
  }
  for (std::size_t j = p.journals; j-- > 1;) std::swap(journal_pop[j], journal_pop[uniform_index(rng, j + 1)]);
  for (std::size_t j = 0; j < p.journals; ++j) {
    const double noise = std::exp(0.6 * (uniform01(rng) + uniform01(rng) + uniform01(rng) - 1.5));
    out.journals[j].window_articles = static_cast<std::int64_t>(std::round(20 + 4000 * journal_pop[j] * noise));
    out.journals[j].window_citations =
        static_cast<std::int64_t>(std::round(journal_pop[j] * 30000.0 * noise * noise));
  }

  // Works: each belongs to one journal; popularity Zipf-like within the pool.
  const std::size_t n_works = std::max<std::size_t>(p.journals, p.references * 7 / 10);
  const detail::WeightedPicker pick_journal(journal_pop);
  std::vector<std::size_t> work_journal(n_works);
  std::vector<int> work_year(n_works);
  std::vector<double> work_pop(n_works);
  std::vector<std::vector<std::size_t>> works_by_mf(prefix_codes.size());
  for (std::size_t w = 0; w < n_works; ++w) {
    const auto j = w < p.journals ? w : pick_journal(rng);
    work_journal[w] = j;
    work_pop[w] = 1.0 / std::pow(1.0 + static_cast<double>(uniform_index(rng, n_works)), 0.8);
    works_by_mf[journal_mf[j]].push_back(w);
  }
  const detail::WeightedPicker pick_work(work_pop);
  std::vector<detail::WeightedPicker> pick_mf_work;
  for (const auto& ws : works_by_mf) {
    std::vector<double> wts;
    for (auto w : ws) wts.push_back(work_pop[w]);
    pick_mf_work.emplace_back(wts);
  }

  // References per entry: one each, the rest spread with heavy-tailed entry weights.
  std::vector<std::size_t> per_entry(p.entries, 1);
  {
    std::vector<double> ew(p.entries);
    for (auto& w : ew) w = std::pow(1.0 - uniform01(rng), -0.8);
    const detail::WeightedPicker pick_entry(ew);
    for (std::size_t k = p.entries; k < p.references; ++k) ++per_entry[pick_entry(rng)];
  }

  for (std::size_t w = 0; w < n_works; ++w) {
    const double age = -std::log(1.0 - uniform01(rng)) * 9.0;
    work_year[w] = 2018 - static_cast<int>(age) - static_cast<int>(uniform_index(rng, 8));
  }

  std::size_t emitted = 0;
  for (std::size_t e = 0; e < p.entries; ++e) {
    const auto entry_id = detail::pad("Entry_", e + 1, 6);
    const auto topic = pick_mf(rng);
    const int first_year = 2006 + static_cast<int>(uniform_index(rng, 12));
    std::vector<std::size_t> cited;
    for (std::size_t k = 0; k < per_entry[e] && emitted < p.references; ++k) {
      std::size_t w;
      // Rows after the first may repeat an earlier work of the same entry (a duplicate).
      if (!cited.empty() && uniform01(rng) < p.duplicate_rate) {
        w = cited[uniform_index(rng, cited.size())];
      } else {
        int tries = 0;
        do {
          if (uniform01(rng) < p.topical_share && !pick_mf_work[topic].empty())
            w = works_by_mf[topic][pick_mf_work[topic](rng)];
          else
            w = pick_work(rng);
        } while (std::find(cited.begin(), cited.end(), w) != cited.end() && ++tries < 20);
        cited.push_back(w);
      }
      ReferenceRecord r;
      r.citing_entry_id = entry_id;
      r.cited_work_id = detail::pad("10.5555/w", w + 1, 7);
      int cy = first_year + static_cast<int>(uniform_index(rng, 3) == 0 ? uniform_index(rng, 2019 - first_year) : 0);
      cy = std::max(cy, std::min(2018, work_year[w]));
      const unsigned cm = 1 + static_cast<unsigned>(uniform_index(rng, 12));
      r.citation_date = Date{std::chrono::year{cy}, std::chrono::month{cm}, std::chrono::day{1u + static_cast<unsigned>(uniform_index(rng, 28))}};
      if (uniform01(rng) >= p.missing_date_rate) {
        // Occasional early citation of a work dated the following year.
        const int py = uniform01(rng) < 0.01 ? cy + 1 : work_year[w];
        r.publication_date = Date{std::chrono::year{py}, std::chrono::month{1u + static_cast<unsigned>(w % 12)},
                                  std::chrono::day{1u + static_cast<unsigned>(w % 28)}};
      }
      const auto& jr = out.journals[work_journal[w]];
      r.issns.push_back(jr.issns[w % jr.issns.size()]);
      out.references.push_back(std::move(r));
      ++emitted;
    }
  }
  // Corrupt a few ISSNs in the written form only; they are stored as raw strings.
  (void)p.bad_issn_rate;
  return out;
}

inline std::string references_csv_string(const SyntheticCorpus& c, double bad_issn_rate = 0.0, std::uint64_t seed = 0) {
  Rng rng = derived_rng(seed, 1);
  std::ostringstream o;
  csv::write_row(o, {"citing_entry_id", "cited_work_id", "citation_date", "publication_date", "issns"});
  for (const auto& r : c.references) {
    std::string issns;
    for (std::size_t i = 0; i < r.issns.size(); ++i) {
      if (i) issns += ';';
      std::string s = r.issns[i].substr(0, 4) + "-" + r.issns[i].substr(4);
      if (bad_issn_rate > 0 && uniform01(rng) < bad_issn_rate) s[8] = s[8] == '0' ? '1' : '0';
      issns += s;
    }
    csv::write_row(o, {r.citing_entry_id, r.cited_work_id, format_date(r.citation_date),
                       r.publication_date ? format_date(*r.publication_date) : "", issns});
  }
  return o.str();
}

inline std::string journals_csv_string(const SyntheticCorpus& c) {
  std::ostringstream o;
  csv::write_row(o, {"journal_id", "title", "issns", "asjc_codes", "open_access", "window_citations", "window_articles"});
  for (const auto& j : c.journals) {
    std::string issns, codes;
    for (std::size_t i = 0; i < j.issns.size(); ++i) issns += (i ? ";" : "") + j.issns[i].substr(0, 4) + "-" + j.issns[i].substr(4);
    for (std::size_t i = 0; i < j.asjc_codes.size(); ++i) codes += (i ? ";" : "") + std::to_string(j.asjc_codes[i]);
    csv::write_row(o, {j.journal_id, j.title, issns, codes, j.open_access ? "1" : "0", std::to_string(j.window_citations),
                       std::to_string(j.window_articles)});
  }
  return o.str();
}

}  // namespace scimap

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "scimap/error.hpp"
#include "scimap/metrics.hpp"

namespace scimap {

// ---------------------------------------------------------------------------
// Percentile ratios

struct JournalCounts {
  std::string journal_id;
  std::int64_t wiki_citations = 0;
  std::int64_t scopus_citations = 0;
  std::int64_t wiki_articles_cited = 0;
};

struct EligibilityThresholds {
  std::int64_t min_wiki_citations = 3;
  std::int64_t min_scopus_citations = 3;
  std::int64_t min_wiki_articles = 2;
};

struct JournalComparison {
  std::string journal_id;
  std::int64_t wiki_citations = 0;
  std::int64_t scopus_citations = 0;
  std::int64_t wiki_articles_cited = 0;
  double wiki_percentile = 0;
  double scopus_percentile = 0;
  double ratio = 0;
};

inline constexpr std::string_view kPercentileTiePolicy = "mean rank / eligible count";

/// Fractional ranks in (0, 1]: ascending rank with ties sharing their mean rank, divided by n.
inline std::vector<double> fractional_ranks(std::span<const std::int64_t> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = mean_rank / static_cast<double>(n);
    i = j;
  }
  return rank;
}

/// Percentile of each eligible journal in both sources and their ratio, sorted by descending
/// ratio (then journal id).
inline std::vector<JournalComparison> percentile_ratio(std::span<const JournalCounts> counts,
                                                       const EligibilityThresholds& t = {}) {
  std::vector<JournalComparison> out;
  for (const auto& c : counts)
    if (c.wiki_citations >= t.min_wiki_citations && c.scopus_citations >= t.min_scopus_citations &&
        c.wiki_articles_cited >= t.min_wiki_articles)
      out.push_back({c.journal_id, c.wiki_citations, c.scopus_citations, c.wiki_articles_cited, 0, 0, 0});
  std::vector<std::int64_t> w, s;
  for (const auto& c : out) {
    w.push_back(c.wiki_citations);
    s.push_back(c.scopus_citations);
  }
  const auto wr = fractional_ranks(w);
  const auto sr = fractional_ranks(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].wiki_percentile = wr[i];
    out[i].scopus_percentile = sr[i];
    out[i].ratio = wr[i] / sr[i];
  }
  std::sort(out.begin(), out.end(), [](const JournalComparison& a, const JournalComparison& b) {
    return a.ratio != b.ratio ? a.ratio > b.ratio : a.journal_id < b.journal_id;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Main-field shares

struct FieldShareDiff {
  std::string main_field;
  double share_a = 0;
  double share_b = 0;
  double diff = 0;  // percentage points, share_a - share_b
};

/// Normalizes each source's counts to shares and reports the difference per field. Fields
/// missing from one source count as zero there.
inline std::vector<FieldShareDiff> field_share_diff(const std::map<std::string, double>& counts_a,
                                                    const std::map<std::string, double>& counts_b) {
  auto total = [](const std::map<std::string, double>& m) {
    double t = 0;
    for (const auto& [k, v] : m) {
      if (v < 0) throw Error(ErrorKind::InvalidArgument, "negative count for " + k);
      t += v;
    }
    return t;
  };
  const double ta = total(counts_a), tb = total(counts_b);
  if (ta <= 0) throw Error(ErrorKind::EmptySource, "first source has no articles");
  if (tb <= 0) throw Error(ErrorKind::EmptySource, "second source has no articles");
  std::map<std::string, std::pair<double, double>> merged;
  for (const auto& [k, v] : counts_a) merged[k].first = v;
  for (const auto& [k, v] : counts_b) merged[k].second = v;
  std::vector<FieldShareDiff> out;
  for (const auto& [k, v] : merged) {
    FieldShareDiff f;
    f.main_field = k;
    f.share_a = v.first / ta;
    f.share_b = v.second / tb;
    f.diff = 100.0 * (f.share_a - f.share_b);
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regression and Q-Q

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "x and y differ in length");
  if (x.size() < 3) throw Error(ErrorKind::InvalidArgument, "linear_fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw Error(ErrorKind::ConstantPredictor, "x is constant");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (syy == 0) {
    f.r_squared = 1.0;  // y constant and fitted exactly
  } else {
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (f.slope * x[i] + f.intercept);
      ss_res += e * e;
    }
    f.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return f;
}

/// Matched quantiles at probabilities (i - 0.5) / n_quantiles, i = 1..n_quantiles.
inline std::vector<std::pair<double, double>> qq_points(std::span<const double> x, std::span<const double> y,
                                                        std::size_t n_quantiles) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::EmptyInput, "qq_points needs non-empty samples");
  if (n_quantiles == 0) throw Error(ErrorKind::InvalidArgument, "n_quantiles must be positive");
  std::vector<double> sx(x.begin(), x.end()), sy(y.begin(), y.end());
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i <= n_quantiles; ++i) {
    const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(n_quantiles);
    out.emplace_back(quantile_sorted(sx, p), quantile_sorted(sy, p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus adapters

/// Wikipedia counts per journal inside the comparison window, joined with the journal's
/// Scopus window citations. Journals follow corpus.journals order.
inline std::vector<JournalCounts> window_journal_counts(const LinkedCorpus& window) {
  std::vector<JournalCounts> out(window.journals.size());
  std::vector<std::vector<std::string_view>> works(window.journals.size());
  for (std::size_t j = 0; j < window.journals.size(); ++j) {
    out[j].journal_id = window.journals[j].record.journal_id;
    out[j].scopus_citations = window.journals[j].record.window_citations;
  }
  for (const auto& r : window.records)
    for (auto j : r.journals) {
      ++out[j].wiki_citations;
      works[j].push_back(r.ref.cited_work_id);
    }
  for (std::size_t j = 0; j < works.size(); ++j) {
    auto& w = works[j];
    std::sort(w.begin(), w.end());
    out[j].wiki_articles_cited = std::unique(w.begin(), w.end()) - w.begin();
  }
  return out;
}

/// Distinct cited articles per main field, full counting.
inline std::map<std::string, double> cited_articles_by_main_field(const LinkedCorpus& corpus) {
  std::map<std::string, std::set<std::string_view>> works;
  for (const auto& r : corpus.records)
    for (auto j : r.journals)
      for (const auto& mf : corpus.journals[j].main_fields) works[mf].insert(r.ref.cited_work_id);
  std::map<std::string, double> out;
  for (const auto& [mf, w] : works) out[mf] = static_cast<double>(w.size());
  return out;
}

/// Scopus window articles per main field over a journal list, full counting.
inline std::map<std::string, double> published_articles_by_main_field(std::span<const ClassifiedJournal> journals) {
  std::map<std::string, double> out;
  for (const auto& j : journals)
    for (const auto& mf : j.main_fields) out[mf] += static_cast<double>(j.record.window_articles);
  return out;
}

}  // namespace scimap

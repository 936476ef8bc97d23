#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scimap/corpus.hpp"
#include "scimap/error.hpp"

namespace scimap {

/// Quantile of sorted data with linear interpolation; p sits at 1-based position 1 + (n-1)p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::EmptyInput, "quantile of empty data");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct DescriptiveStats {
  std::size_t n = 0;
  double mean = 0;
  double median = 0;
  double sd = 0;  // n-1 denominator; 0 when n == 1
  double iqr = 0;
};

inline DescriptiveStats describe(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "describe() needs at least one value");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  DescriptiveStats d;
  d.n = v.size();
  // Two-pass mean/variance keeps constant inputs at exactly zero spread.
  d.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(d.n);
  if (d.n > 1) {
    double ss = 0;
    for (double x : v) ss += (x - d.mean) * (x - d.mean);
    d.sd = std::sqrt(ss / static_cast<double>(d.n - 1));
  }
  d.median = quantile_sorted(v, 0.5);
  d.iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
  return d;
}

/// Box-plot data: five-number summary plus values beyond 1.5 IQR from the quartiles.
struct BoxSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  std::vector<double> outliers;
};

inline BoxSummary box_summary(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "box_summary() of empty data");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxSummary b;
  b.min = v.front();
  b.max = v.back();
  b.q1 = quantile_sorted(v, 0.25);
  b.median = quantile_sorted(v, 0.5);
  b.q3 = quantile_sorted(v, 0.75);
  const double lo = b.q1 - 1.5 * (b.q3 - b.q1);
  const double hi = b.q3 + 1.5 * (b.q3 - b.q1);
  for (double x : v)
    if (x < lo || x > hi) b.outliers.push_back(x);
  return b;
}

// ---------------------------------------------------------------------------
// Price index

struct PriceIndexOptions {
  bool inclusive_upper = false;  // count age <= N instead of age < N
};

struct PriceIndexReport {
  std::vector<int> windows;
  std::vector<double> fractions;  // empty when no reference is eligible
  std::optional<std::string> group;
  std::size_t eligible = 0;
  std::size_t excluded_negative_age = 0;
  bool inclusive_upper = false;

  bool defined() const { return eligible > 0; }
};

inline void validate_windows(std::span<const int> windows) {
  if (windows.empty()) throw Error(ErrorKind::InvalidArgument, "no Price index windows");
  for (int w : windows)
    if (w <= 0) throw Error(ErrorKind::InvalidArgument, "Price index windows must be positive");
}

/// Price index over citation ages in whole years.
inline PriceIndexReport price_index_from_ages(std::span<const int> ages, std::span<const int> windows,
                                              const PriceIndexOptions& opts = {}) {
  validate_windows(windows);
  PriceIndexReport rep;
  rep.windows.assign(windows.begin(), windows.end());
  rep.inclusive_upper = opts.inclusive_upper;
  std::vector<std::size_t> hits(windows.size(), 0);
  for (int age : ages) {
    if (age < 0) {
      ++rep.excluded_negative_age;
      continue;
    }
    ++rep.eligible;
    for (std::size_t w = 0; w < windows.size(); ++w)
      if (opts.inclusive_upper ? age <= windows[w] : age < windows[w]) ++hits[w];
  }
  if (rep.eligible > 0)
    for (auto h : hits) rep.fractions.push_back(static_cast<double>(h) / static_cast<double>(rep.eligible));
  return rep;
}

/// Calendar-year age of a reference at citation time.
inline int citation_age(const ReferenceRecord& r) {
  return year_of(r.citation_date) - year_of(*r.publication_date);
}

inline PriceIndexReport price_index(const LinkedCorpus& corpus, std::span<const int> windows,
                                    const PriceIndexOptions& opts = {}) {
  std::vector<int> ages;
  ages.reserve(corpus.records.size());
  for (const auto& r : corpus.records) ages.push_back(citation_age(r.ref));
  return price_index_from_ages(ages, windows, opts);
}

/// One report per group at `tier`, sorted by label. A reference counts once toward each distinct
/// group of its journals (full counting). Groups without eligible references are left undefined.
inline std::vector<PriceIndexReport> price_index_grouped(const LinkedCorpus& corpus, std::span<const int> windows,
                                                         Tier tier, const PriceIndexOptions& opts = {}) {
  validate_windows(windows);
  std::vector<std::vector<std::string>> labels_of_journal;
  labels_of_journal.reserve(corpus.journals.size());
  for (const auto& j : corpus.journals) labels_of_journal.push_back(tier_labels(j, *corpus.scheme, tier));

  std::map<std::string, std::vector<int>> ages;
  std::vector<const std::string*> seen;
  for (const auto& r : corpus.records) {
    const int age = citation_age(r.ref);
    seen.clear();
    for (auto j : r.journals)
      for (const auto& label : labels_of_journal[j]) {
        if (std::find_if(seen.begin(), seen.end(), [&](const std::string* s) { return *s == label; }) != seen.end())
          continue;
        seen.push_back(&label);
        ages[label].push_back(age);
      }
  }
  std::vector<PriceIndexReport> out;
  for (auto& [label, a] : ages) {
    auto rep = price_index_from_ages(a, windows, opts);
    rep.group = label;
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aging profile

struct AgingPoint {
  int offset = 0;             // years since the entry's first citation
  std::size_t references = 0;
  double mean_per_entry = 0;  // over all entries
  double share = 0;           // of all references
};

inline std::vector<AgingPoint> citation_aging_profile(const LinkedCorpus& corpus) {
  if (corpus.records.empty()) throw Error(ErrorKind::EmptyInput, "aging profile of an empty corpus");
  std::unordered_map<std::string_view, int> first_year;
  for (const auto& r : corpus.records) {
    const int y = year_of(r.ref.citation_date);
    auto [it, fresh] = first_year.emplace(r.ref.citing_entry_id, y);
    if (!fresh) it->second = std::min(it->second, y);
  }
  std::map<int, std::size_t> counts;
  for (const auto& r : corpus.records)
    ++counts[year_of(r.ref.citation_date) - first_year.at(r.ref.citing_entry_id)];
  const double entries = static_cast<double>(first_year.size());
  const double total = static_cast<double>(corpus.records.size());
  std::vector<AgingPoint> out;
  for (const auto& [offset, c] : counts)
    out.push_back({offset, c, static_cast<double>(c) / entries, static_cast<double>(c) / total});
  return out;
}

// ---------------------------------------------------------------------------
// Concentration

/// Share of the total held by the top ceil(top_fraction * n) values.
inline double concentration_share(std::span<const double> values, double top_fraction) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "concentration of empty data");
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "top_fraction must lie in (0, 1]");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v)
    if (x < 0 || !std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "values must be finite and nonnegative");
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total <= 0) throw Error(ErrorKind::ZeroTotal, "values sum to zero");
  // The epsilon absorbs representation error in products such as 0.01 * 100.
  const double raw = top_fraction * static_cast<double>(v.size());
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  k = std::clamp<std::size_t>(k, 1, v.size());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), std::greater<>());
  return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / total;
}

// ---------------------------------------------------------------------------
// Per-unit counts used by the descriptive tables

/// References made by each citing entry.
inline std::vector<double> references_per_entry(const LinkedCorpus& corpus) {
  std::map<std::string_view, double> m;
  for (const auto& r : corpus.records) m[r.ref.citing_entry_id] += 1;
  std::vector<double> out;
  for (auto& [k, v] : m) out.push_back(v);
  return out;
}

/// Citations received by each cited work.
inline std::vector<double> citations_per_work(const LinkedCorpus& corpus) {
  std::map<std::string_view, double> m;
  for (const auto& r : corpus.records) m[r.ref.cited_work_id] += 1;
  std::vector<double> out;
  for (auto& [k, v] : m) out.push_back(v);
  return out;
}

/// Citations received by each journal, indexed like corpus.journals (full counting).
inline std::vector<std::int64_t> citations_per_journal(const LinkedCorpus& corpus) {
  std::vector<std::int64_t> out(corpus.journals.size(), 0);
  for (const auto& r : corpus.records)
    for (auto j : r.journals) ++out[j];
  return out;
}

/// Publication year of each distinct cited work.
inline std::vector<double> publication_years(const LinkedCorpus& corpus) {
  std::map<std::string_view, int> m;
  for (const auto& r : corpus.records) m.emplace(r.ref.cited_work_id, year_of(*r.ref.publication_date));
  std::vector<double> out;
  for (auto& [k, y] : m) out.push_back(y);
  return out;
}

}  // namespace scimap

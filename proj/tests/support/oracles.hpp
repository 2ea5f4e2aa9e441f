#pragma once

// Reference computations for the tests. Everything here works from plain
// word lists with nested loops and long double arithmetic, and shares no
// code with the library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// A document as its sequence of normalized words.
struct WordDoc {
  std::string id;
  std::vector<std::string> words;
};

struct Counts {
  std::uint64_t tf = 0;
  std::uint64_t df = 0;
  std::map<std::string, std::uint64_t> dtf;
};

inline std::set<std::string> distinct_words(const std::vector<WordDoc>& docs) {
  std::set<std::string> all;
  for (const auto& d : docs) all.insert(d.words.begin(), d.words.end());
  return all;
}

inline std::map<std::string, Counts> recount(const std::vector<WordDoc>& docs) {
  std::map<std::string, Counts> out;
  for (const auto& word : distinct_words(docs)) {
    Counts c;
    for (const auto& d : docs) {
      std::uint64_t in_doc = 0;
      for (const auto& w : d.words) {
        if (w == word) ++in_doc;
      }
      if (in_doc > 0) {
        c.dtf[d.id] = in_doc;
        ++c.df;
        c.tf += in_doc;
      }
    }
    out[word] = c;
  }
  return out;
}

// Genre score via the one-pass variance E[x^2] - E[x]^2.
inline std::map<std::string, double> metadis(const std::vector<WordDoc>& docs) {
  std::map<std::string, double> out;
  const long double n = static_cast<long double>(docs.size());
  for (const auto& [word, c] : recount(docs)) {
    long double sum = 0, sum_sq = 0, mx = 0;
    for (const auto& [doc, k] : c.dtf) {
      sum += k;
      sum_sq += static_cast<long double>(k) * k;
      mx = std::max<long double>(mx, k);
    }
    const long double df = c.df;
    const long double mean = sum / df;
    const long double var = std::max<long double>(0, sum_sq / df - mean * mean);
    const long double sd = std::sqrt(var);
    out[word] = static_cast<double>((df / c.tf) * (1 - sd / mx) * (df / n));
  }
  return out;
}

// Dense document x vocabulary TF x IDF, smoothed idf, L2 rows.
inline std::map<std::pair<std::string, std::string>, double> tfidf(
    const std::vector<WordDoc>& docs) {
  const auto vocab = distinct_words(docs);
  const std::vector<std::string> terms(vocab.begin(), vocab.end());
  const std::size_t n_docs = docs.size();
  std::vector<std::vector<long double>> m(n_docs,
                                          std::vector<long double>(terms.size(), 0));
  for (std::size_t d = 0; d < n_docs; ++d) {
    for (std::size_t t = 0; t < terms.size(); ++t) {
      for (const auto& w : docs[d].words) {
        if (w == terms[t]) m[d][t] += 1;
      }
    }
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    long double df = 0;
    for (std::size_t d = 0; d < n_docs; ++d) df += m[d][t] > 0 ? 1 : 0;
    const long double idf = std::log((1.0L + n_docs) / (1.0L + df)) + 1.0L;
    for (std::size_t d = 0; d < n_docs; ++d) m[d][t] *= idf;
  }
  std::map<std::pair<std::string, std::string>, double> out;
  for (std::size_t d = 0; d < n_docs; ++d) {
    long double norm = 0;
    for (long double v : m[d]) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (m[d][t] > 0) {
        out[{docs[d].id, terms[t]}] = static_cast<double>(m[d][t] / norm);
      }
    }
  }
  return out;
}

// Pop-max explicit masking: linear scan for the maximum each round (ties to
// the smaller start), budget checks as percentages on integers:
// masked < 15% of n  <=>  100 * masked < 15 * n.
struct Candidate {
  std::size_t start;
  std::size_t length;
  double score;
};

inline std::vector<std::size_t> topn_starts(std::vector<Candidate> pool,
                                            std::size_t n) {
  std::vector<std::size_t> chosen;
  std::size_t masked = 0;
  while (100 * masked < 15 * n && !pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (pool[i].score > pool[best].score ||
          (pool[i].score == pool[best].score && pool[i].start < pool[best].start)) {
        best = i;
      }
    }
    const Candidate c = pool[best];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    if (100 * (masked + c.length) <= 15 * n) {
      masked += c.length;
      chosen.push_back(c.start);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

// Pearson correlation of average ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double chi_square(const std::vector<std::uint64_t>& observed,
                         const std::vector<double>& probabilities) {
  double total = 0;
  for (auto o : observed) total += static_cast<double>(o);
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = total * probabilities[i];
    const double d = static_cast<double>(observed[i]) - expected;
    stat += d * d / expected;
  }
  return stat;
}

// Upper 1% points of the chi-square distribution (scipy.stats.chi2.ppf).
inline constexpr double kChiSquare99Df2 = 9.21034037197618;
inline constexpr double kChiSquare99Df4 = 13.276704135987622;

}  // namespace oracle

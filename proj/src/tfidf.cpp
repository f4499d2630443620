#include <cmath>
#include <set>
#include <unordered_map>

#include "sarcasm/embed.hpp"

namespace sarcasm {

TfidfModel fit_tfidf(const std::vector<TokenList>& corpus) {
  if (corpus.empty()) throw Error(ErrorKind::InvalidArgument, "fit_tfidf: empty corpus");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    const std::set<std::string> unique(doc.begin(), doc.end());
    for (const auto& t : unique) ++df[t];
  }

  TfidfModel m;
  m.n_docs = corpus.size();
  m.idf.reserve(df.size());
  std::uint32_t next = 0;
  const double n = static_cast<double>(m.n_docs);
  for (const auto& [term, count] : df) {
    m.vocabulary.emplace(term, next++);
    m.idf.push_back(std::log(n / static_cast<double>(count)));
  }
  return m;
}

Vector tfidf_vector(const TfidfModel& model, const TokenList& doc) {
  if (doc.empty()) return Vector::sparse(model.dim(), {});
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& t : doc)
    if (const auto it = model.vocabulary.find(t); it != model.vocabulary.end()) ++counts[it->second];

  const double len = static_cast<double>(doc.size());
  std::vector<SparseEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    const double w = (static_cast<double>(count) / len) * model.idf[index];
    if (w != 0.0) entries.push_back({index, w});
  }
  return Vector::sparse(model.dim(), std::move(entries));
}

}  // namespace sarcasm

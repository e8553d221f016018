#include <algorithm>
#include <cmath>

#include "roiml/classify.hpp"
#include "roiml/corpus.hpp"
#include "roiml/error.hpp"

namespace roiml::classify {

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto start = text.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = text.size();
    auto token = text.substr(start, end - start);
    if (token != corpus::kPairSeparator) tokens.push_back(token);
    pos = end;
  }
  return tokens;
}

FeatureVectorizer FeatureVectorizer::fit(std::span<const std::string> texts, const VectorizerConfig& config) {
  if (texts.empty()) throw Error(ErrorCode::Fit, "classify", "cannot fit a vectorizer on zero documents");

  std::unordered_map<std::string, std::size_t> df;
  for (const auto& text : texts) {
    auto tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto t : tokens) ++df[std::string(t)];
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, count] : df) {
    if (count >= config.min_df) kept.emplace_back(term, count);
  }
  if (config.max_vocabulary > 0 && kept.size() > config.max_vocabulary) {
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    kept.resize(config.max_vocabulary);
  }
  std::sort(kept.begin(), kept.end());

  FeatureVectorizer v;
  v.config_ = config;
  v.n_documents_ = texts.size();
  const double d = static_cast<double>(texts.size());
  for (auto& [term, count] : kept) {
    v.index_.emplace(term, static_cast<std::uint32_t>(v.terms_.size()));
    v.terms_.push_back(term);
    v.df_.push_back(count);
    const double c = static_cast<double>(count);
    v.idf_.push_back(config.smooth_idf ? std::log((1.0 + d) / (1.0 + c)) + 1.0 : std::log(d / c) + 1.0);
  }
  return v;
}

std::optional<std::uint32_t> FeatureVectorizer::column(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureVectorizer::document_frequency(std::string_view term) const {
  auto col = column(term);
  return col ? df_[*col] : 0;
}

SparseVector FeatureVectorizer::counts(std::string_view text) const {
  std::vector<std::uint32_t> cols;
  for (auto token : tokenize(text)) {
    if (auto col = column(token)) cols.push_back(*col);
  }
  std::sort(cols.begin(), cols.end());
  SparseVector out;
  for (auto c : cols) {
    if (!out.empty() && out.back().first == c) {
      out.back().second += 1.0;
    } else {
      out.emplace_back(c, 1.0);
    }
  }
  return out;
}

SparseVector FeatureVectorizer::transform(std::string_view text) const {
  auto out = counts(text);
  double norm = 0.0;
  for (auto& [col, value] : out) {
    value *= idf_[col];
    norm += value * value;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& entry : out) entry.second /= norm;
  }
  return out;
}

}  // namespace roiml::classify

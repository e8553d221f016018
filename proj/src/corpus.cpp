#include "roiml/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "roiml/csv.hpp"
#include "roiml/error.hpp"
#include "roiml/random.hpp"

namespace roiml::corpus {
namespace {

constexpr std::string_view kModule = "corpus";

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(kModule), message);
}

std::vector<std::string> split_ids(std::string_view field) {
  std::vector<std::string> ids;
  std::string current;
  for (char c : field) {
    if (c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!current.empty()) ids.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) ids.push_back(std::move(current));
  return ids;
}

std::string combine(const std::string& left, const std::string& right) {
  std::string out;
  out.reserve(left.size() + right.size() + kPairSeparator.size() + 2);
  out += left;
  out.push_back(' ');
  out += kPairSeparator;
  out.push_back(' ');
  out += right;
  return out;
}

using TextIndex = std::unordered_map<std::string_view, const std::string*>;

TextIndex index_texts(const RequirementSet& set) {
  TextIndex index;
  index.reserve(set.records.size());
  for (const auto& r : set.records) index.emplace(r.id, &r.text);
  return index;
}

RequirementPair make_pair(const TextIndex& texts, std::string left, std::string right,
                          DependencyKind kind) {
  RequirementPair pair;
  pair.combined_text = combine(*texts.at(left), *texts.at(right));
  pair.left = std::move(left);
  pair.right = std::move(right);
  pair.label.kind = kind;
  return pair;
}

std::string unordered_key(const std::string& a, const std::string& b) {
  const auto& lo = a < b ? a : b;
  const auto& hi = a < b ? b : a;
  std::string key;
  key.reserve(lo.size() + hi.size() + 1);
  key += lo;
  key.push_back('\x1f');
  key += hi;
  return key;
}

// Sorted ids plus the set of linked or positive index pairs encoded as i * n + j
// (i < j). Shared by pool counting and sampling.
struct NegativeUniverse {
  std::vector<std::string> ids;
  std::unordered_set<std::uint64_t> excluded;

  std::uint64_t n() const { return ids.size(); }
  std::uint64_t total() const { return n() < 2 ? 0 : n() * (n() - 1) / 2; }
  std::uint64_t pool() const { return total() - excluded.size(); }
};

NegativeUniverse build_universe(const RequirementSet& set,
                                const std::vector<RequirementPair>& positives) {
  NegativeUniverse u;
  u.ids.reserve(set.records.size());
  for (const auto& r : set.records) u.ids.push_back(r.id);
  std::sort(u.ids.begin(), u.ids.end());

  std::unordered_map<std::string_view, std::uint64_t> index;
  index.reserve(u.ids.size());
  for (std::uint64_t i = 0; i < u.ids.size(); ++i) index.emplace(u.ids[i], i);

  auto exclude = [&](const std::string& a, const std::string& b) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end() || ib == index.end() || ia->second == ib->second) return;
    auto lo = std::min(ia->second, ib->second);
    auto hi = std::max(ia->second, ib->second);
    u.excluded.insert(lo * u.n() + hi);
  };
  for (const auto& r : set.records) {
    for (const auto& link : r.links) exclude(r.id, link.target);
  }
  for (const auto& p : positives) exclude(p.left, p.right);
  return u;
}

}  // namespace

const RequirementRecord* RequirementSet::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::string_view to_string(DependencyKind kind) {
  switch (kind) {
    case DependencyKind::Requires: return "REQUIRES";
    case DependencyKind::RelatesTo: return "RELATES_TO";
    case DependencyKind::None: break;
  }
  return "NONE";
}

DependencyKind dependency_kind_from_string(std::string_view name) {
  if (name == "REQUIRES") return DependencyKind::Requires;
  if (name == "RELATES_TO") return DependencyKind::RelatesTo;
  if (name == "NONE") return DependencyKind::None;
  fail(ErrorCode::Schema, "unknown dependency kind '" + std::string(name) + "'");
}

ParseResult parse_issue_export(std::string_view raw_csv, const ExportSchema& schema,
                               std::string source_label) {
  auto rows = csv::parse(raw_csv, kModule);
  if (rows.empty()) fail(ErrorCode::Schema, "export has no header row");
  const auto& header = rows.front();

  auto required = [&](const std::string& name) {
    auto idx = csv::column_index(header, name);
    if (idx == csv::npos) fail(ErrorCode::Schema, "missing mapped column '" + name + "'");
    return idx;
  };
  auto optional = [&](const std::string& name) {
    return name.empty() ? csv::npos : csv::column_index(header, name);
  };

  if (schema.description.empty()) fail(ErrorCode::Schema, "schema maps no description column");
  const std::size_t id_col = required(schema.id);
  std::vector<std::size_t> desc_cols;
  for (const auto& name : schema.description) desc_cols.push_back(required(name));
  const std::pair<std::size_t, LinkKind> link_cols[] = {
      {optional(schema.depends_on), LinkKind::DependsOn},
      {optional(schema.blocks), LinkKind::Blocks},
      {optional(schema.relates), LinkKind::RelatesTo},
      {optional(schema.other), LinkKind::Other},
  };

  ParseResult result;
  result.set.source_label = std::move(source_label);
  std::unordered_set<std::string> seen;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r].fields;
    auto cell = [&](std::size_t idx) -> std::string_view {
      return idx < fields.size() ? std::string_view(fields[idx]) : std::string_view{};
    };

    std::string id(cell(id_col));
    auto first = id.find_first_not_of(" \t");
    id = first == std::string::npos ? std::string{} : id.substr(first, id.find_last_not_of(" \t") - first + 1);
    if (id.empty()) {
      ++result.skipped_empty_id;
      continue;
    }

    std::string description;
    for (auto col : desc_cols) {
      if (!description.empty()) description.push_back(' ');
      description += cell(col);
    }
    std::string text = clean_text(description);
    if (text.empty()) {
      ++result.skipped_empty_description;
      continue;
    }

    if (!seen.insert(id).second) fail(ErrorCode::Corpus, "duplicate id '" + id + "'");

    RequirementRecord record;
    record.id = std::move(id);
    record.text = std::move(text);
    for (const auto& [col, kind] : link_cols) {
      if (col == csv::npos) continue;
      for (auto& target : split_ids(cell(col))) record.links.push_back({kind, std::move(target)});
    }
    result.set.records.push_back(std::move(record));
  }
  return result;
}

std::string clean_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::size_t word_count(std::string_view cleaned) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : cleaned) {
    if (c == ' ') {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

FilterResult filter_short(const RequirementSet& set, std::size_t min_words) {
  FilterResult result;
  result.set.source_label = set.source_label;
  for (const auto& r : set.records) {
    if (word_count(clean_text(r.text)) < min_words) {
      ++result.removed;
    } else {
      result.set.records.push_back(r);
    }
  }
  return result;
}

ExtractResult extract_positive_pairs(const RequirementSet& set, DependencyKind kind) {
  if (kind == DependencyKind::None) {
    fail(ErrorCode::Parameter, "positive pairs need kind REQUIRES or RELATES_TO");
  }
  const auto texts = index_texts(set);

  ExtractResult result;
  std::set<std::pair<std::string, std::string>> unique;
  for (const auto& r : set.records) {
    for (const auto& link : r.links) {
      std::string left;
      std::string right;
      if (kind == DependencyKind::Requires && link.kind == LinkKind::DependsOn) {
        left = r.id;
        right = link.target;
      } else if (kind == DependencyKind::Requires && link.kind == LinkKind::Blocks) {
        left = link.target;
        right = r.id;
      } else if (kind == DependencyKind::RelatesTo && link.kind == LinkKind::RelatesTo) {
        left = std::min(r.id, link.target);
        right = std::max(r.id, link.target);
      } else {
        continue;
      }
      if (!texts.contains(link.target)) {
        ++result.dangling;
        continue;
      }
      if (left == right) continue;
      unique.emplace(std::move(left), std::move(right));
    }
  }
  for (const auto& [left, right] : unique) result.pairs.push_back(make_pair(texts, left, right, kind));
  return result;
}

std::uint64_t negative_pool_size(const RequirementSet& set,
                                 const std::vector<RequirementPair>& positives) {
  return build_universe(set, positives).pool();
}

std::vector<RequirementPair> generate_negative_pairs(const RequirementSet& set,
                                                     const std::vector<RequirementPair>& positives,
                                                     std::size_t count, std::uint64_t seed) {
  const auto u = build_universe(set, positives);
  const std::uint64_t pool = u.pool();
  if (count > pool) {
    fail(ErrorCode::Capacity, "requested " + std::to_string(count) +
                                  " negative pairs but the eligible pool=" + std::to_string(pool));
  }
  std::vector<std::uint64_t> chosen;
  chosen.reserve(count);
  Rng rng(seed);
  const std::uint64_t n = u.n();

  if (count == 0) {
    // nothing to draw
  } else if (2 * static_cast<std::uint64_t>(count) > pool || u.total() <= (1u << 20)) {
    // Dense regime: enumerate the pool and take a partial Fisher-Yates prefix.
    std::vector<std::uint64_t> eligible;
    eligible.reserve(pool);
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::uint64_t j = i + 1; j < n; ++j) {
        if (!u.excluded.contains(i * n + j)) eligible.push_back(i * n + j);
      }
    }
    for (std::size_t k = 0; k < count; ++k) {
      auto pick = k + static_cast<std::size_t>(rng.below(eligible.size() - k));
      std::swap(eligible[k], eligible[pick]);
      chosen.push_back(eligible[k]);
    }
  } else {
    // Sparse regime: rejection sampling over ordered draws.
    std::unordered_set<std::uint64_t> taken;
    taken.reserve(count * 2);
    while (chosen.size() < count) {
      auto i = rng.below(n);
      auto j = rng.below(n);
      if (i == j) continue;
      auto key = std::min(i, j) * n + std::max(i, j);
      if (u.excluded.contains(key) || !taken.insert(key).second) continue;
      chosen.push_back(key);
    }
  }

  const auto texts = index_texts(set);
  std::vector<RequirementPair> out;
  out.reserve(count);
  for (auto key : chosen) {
    out.push_back(make_pair(texts, u.ids[key / n], u.ids[key % n], DependencyKind::None));
  }
  return out;
}

PairCorpus build_corpus(std::vector<RequirementPair> positives,
                        std::vector<RequirementPair> negatives, std::uint64_t seed) {
  if (positives.empty() || negatives.empty()) {
    fail(ErrorCode::Corpus, "both positive and negative pair lists must be nonempty");
  }
  if (negatives.size() < positives.size()) {
    fail(ErrorCode::Imbalance, "only " + std::to_string(negatives.size()) +
                                   " negatives for " + std::to_string(positives.size()) +
                                   " positives");
  }
  std::unordered_set<std::string> positive_keys;
  for (const auto& p : positives) {
    if (!p.label.dependent()) fail(ErrorCode::Corpus, "positive list holds an INDEPENDENT pair");
    if (p.left == p.right) fail(ErrorCode::Corpus, "pair of '" + p.left + "' with itself");
    positive_keys.insert(unordered_key(p.left, p.right));
  }
  for (const auto& p : negatives) {
    if (p.label.dependent()) fail(ErrorCode::Corpus, "negative list holds a DEPENDENT pair");
    if (positive_keys.contains(unordered_key(p.left, p.right))) {
      fail(ErrorCode::Corpus, "pair (" + p.left + ", " + p.right + ") is both positive and negative");
    }
  }

  Rng rng(seed);
  rng.shuffle(std::span(negatives));
  negatives.resize(positives.size());

  PairCorpus corpus;
  corpus.positives_count = positives.size();
  corpus.negatives_count = negatives.size();
  corpus.pairs = std::move(positives);
  corpus.pairs.insert(corpus.pairs.end(), std::make_move_iterator(negatives.begin()),
                      std::make_move_iterator(negatives.end()));
  return corpus;
}

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

SplitPlan split(const PairCorpus& corpus, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::Range, "test_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    (corpus.pairs[i].label.dependent() ? pos : neg).push_back(i);
  }
  if (pos.size() < 2 || neg.size() < 2) {
    fail(ErrorCode::Size, "split needs at least 2 pairs per class (have " +
                              std::to_string(pos.size()) + " positive, " +
                              std::to_string(neg.size()) + " negative)");
  }
  const std::size_t total = round_half_up(static_cast<double>(corpus.size()) * test_fraction);
  const std::size_t test_pos = (total + 1) / 2;
  const std::size_t test_neg = total / 2;
  if (total == 0 || test_pos >= pos.size() || test_neg >= neg.size()) {
    fail(ErrorCode::Size, "test_fraction " + std::to_string(test_fraction) +
                              " leaves an empty test set or train pool for N=" +
                              std::to_string(corpus.size()));
  }

  Rng rng(seed);
  rng.shuffle(std::span(pos));
  rng.shuffle(std::span(neg));

  SplitPlan plan;
  plan.seed = seed;
  plan.test_fraction = test_fraction;
  plan.test_set.assign(pos.begin(), pos.begin() + test_pos);
  plan.test_set.insert(plan.test_set.end(), neg.begin(), neg.begin() + test_neg);
  std::sort(plan.test_set.begin(), plan.test_set.end());
  plan.train_pool.assign(pos.begin() + test_pos, pos.end());
  plan.train_pool.insert(plan.train_pool.end(), neg.begin() + test_neg, neg.end());
  return plan;
}

std::vector<std::vector<std::size_t>> fraction_schedule(const PairCorpus& corpus,
                                                        const SplitPlan& plan,
                                                        const std::vector<double>& fractions) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (auto idx : plan.train_pool) {
    if (idx >= corpus.size()) fail(ErrorCode::Range, "split plan does not match the corpus");
    (corpus.pairs[idx].label.dependent() ? pos : neg).push_back(idx);
  }
  const bool extra_to_pos = pos.size() >= neg.size();
  const double limit = 1.0 - plan.test_fraction;

  std::vector<std::vector<std::size_t>> schedule;
  double previous = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0) || f > limit + 1e-9) {
      fail(ErrorCode::Range, "fraction " + csv::format_decimal(f) + " outside (0, " +
                                 csv::format_decimal(limit) + "]");
    }
    if (!schedule.empty() && !(f > previous)) {
      fail(ErrorCode::Range, "fractions must be strictly increasing");
    }
    previous = f;
    const std::size_t k = round_half_up(static_cast<double>(corpus.size()) * f);
    const std::size_t k_pos = extra_to_pos ? (k + 1) / 2 : k / 2;
    const std::size_t k_neg = k - k_pos;
    if (k_pos > pos.size() || k_neg > neg.size()) {
      fail(ErrorCode::Range, "fraction " + csv::format_decimal(f) + " needs " +
                                 std::to_string(k) + " pairs but the train pool holds " +
                                 std::to_string(plan.train_pool.size()));
    }
    std::vector<std::size_t> subset(pos.begin(), pos.begin() + k_pos);
    subset.insert(subset.end(), neg.begin(), neg.begin() + k_neg);
    std::sort(subset.begin(), subset.end());
    schedule.push_back(std::move(subset));
  }
  return schedule;
}

std::vector<double> default_fractions() {
  std::vector<double> f;
  for (int i = 1; i <= 16; ++i) f.push_back(i * 0.05);
  // 0.05 * 3 and friends are not exact; pin the grid to two decimals.
  for (auto& x : f) x = std::round(x * 100.0) / 100.0;
  return f;
}

std::string write_corpus_csv(const PairCorpus& corpus) {
  std::string out = "pair_id,left_id,right_id,label,kind,combined_text\n";
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    const auto& p = corpus.pairs[i];
    out += csv::format_row({std::to_string(i), p.left, p.right, std::to_string(p.label.value()),
                            std::string(to_string(p.label.kind)), p.combined_text});
  }
  return out;
}

PairCorpus read_corpus_csv(std::string_view text) {
  auto rows = csv::parse(text, kModule);
  const std::vector<std::string> expected = {"pair_id", "left_id", "right_id",
                                             "label",   "kind",    "combined_text"};
  if (rows.empty() || rows.front().fields != expected) {
    fail(ErrorCode::Schema, "corpus header must be pair_id,left_id,right_id,label,kind,combined_text");
  }
  PairCorpus corpus;
  std::unordered_set<std::string> keys;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = " at line " + std::to_string(rows[r].line);
    if (f.size() != expected.size()) fail(ErrorCode::Schema, "wrong field count" + where);
    if (f[0] != std::to_string(r - 1)) fail(ErrorCode::Schema, "pair_id must equal the row index" + where);
    if (f[3] != "0" && f[3] != "1") fail(ErrorCode::Schema, "label must be 0 or 1" + where);
    RequirementPair pair;
    pair.left = f[1];
    pair.right = f[2];
    pair.label.kind = dependency_kind_from_string(f[4]);
    pair.combined_text = f[5];
    if ((f[3] == "1") != pair.label.dependent()) {
      fail(ErrorCode::Schema, "label and kind disagree" + where);
    }
    if (pair.left.empty() || pair.left == pair.right) fail(ErrorCode::Schema, "invalid pair ids" + where);
    if (!keys.insert(unordered_key(pair.left, pair.right)).second) {
      fail(ErrorCode::Corpus, "duplicate pair (" + pair.left + ", " + pair.right + ")" + where);
    }
    (pair.label.dependent() ? corpus.positives_count : corpus.negatives_count)++;
    corpus.pairs.push_back(std::move(pair));
  }
  if (corpus.positives_count != corpus.negatives_count) {
    fail(ErrorCode::Imbalance, "corpus holds " + std::to_string(corpus.positives_count) +
                                   " positives and " + std::to_string(corpus.negatives_count) +
                                   " negatives");
  }
  return corpus;
}

std::string write_requirements_csv(const RequirementSet& set) {
  std::string out = "id,text,depends_on,blocks,relates,other\n";
  for (const auto& r : set.records) {
    std::string cols[4];
    for (const auto& link : r.links) {
      auto& dst = cols[static_cast<int>(link.kind)];
      if (!dst.empty()) dst.push_back(';');
      dst += link.target;
    }
    out += csv::format_row({r.id, r.text, cols[0], cols[1], cols[2], cols[3]});
  }
  return out;
}

std::string write_split_csv(const SplitPlan& plan) {
  std::string out = "pair_index,role\n";
  for (auto idx : plan.train_pool) out += std::to_string(idx) + ",train\n";
  for (auto idx : plan.test_set) out += std::to_string(idx) + ",test\n";
  return out;
}

std::string write_schedule_csv(const std::vector<double>& fractions,
                               const std::vector<std::vector<std::size_t>>& schedule) {
  std::string out = "fraction,pair_index\n";
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto f = csv::format_decimal(fractions[i]);
    for (auto idx : schedule[i]) out += f + "," + std::to_string(idx) + "\n";
  }
  return out;
}

std::string write_split_json(const PairCorpus& corpus, const SplitPlan& plan,
                             const std::vector<double>& fractions,
                             const std::vector<std::vector<std::size_t>>& schedule) {
  nlohmann::ordered_json j;
  j["seed"] = plan.seed;
  j["test_fraction"] = plan.test_fraction;
  j["n"] = corpus.size();
  j["positives"] = corpus.positives_count;
  j["negatives"] = corpus.negatives_count;
  j["n_train_pool"] = plan.train_pool.size();
  j["n_test"] = plan.test_set.size();
  j["fractions"] = fractions;
  auto sizes = nlohmann::ordered_json::array();
  for (const auto& s : schedule) sizes.push_back(s.size());
  j["schedule_sizes"] = sizes;
  return j.dump(2) + "\n";
}

}  // namespace roiml::corpus

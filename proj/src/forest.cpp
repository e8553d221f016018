#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "roiml/classify.hpp"
#include "roiml/error.hpp"
#include "roiml/random.hpp"

namespace roiml::classify {
namespace {

double value_at(const SparseVector& row, std::uint32_t feature) {
  auto it = std::lower_bound(row.begin(), row.end(), feature,
                             [](const auto& entry, std::uint32_t f) { return entry.first < f; });
  return (it != row.end() && it->first == feature) ? it->second : 0.0;
}

// Sum of squared class counts over size; larger means purer children.
double purity(double n0, double n1) {
  const double n = n0 + n1;
  return n > 0.0 ? (n0 * n0 + n1 * n1) / n : 0.0;
}

struct Candidate {
  bool valid = false;
  double score = 0.0;
  std::uint32_t feature = 0;
  double threshold = 0.0;
};

struct Entry {
  double value;
  std::uint32_t sample;
  int label;
  std::uint32_t weight;
};

// Column-major copy of the training rows, shared by all trees.
struct Columns {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> entries;
  double mean_length = 0.0;

  Columns(std::span<const SparseVector> rows, std::size_t n_features) : entries(n_features) {
    std::size_t nnz = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [col, value] : rows[r]) entries[col].emplace_back(static_cast<std::uint32_t>(r), value);
      nnz += rows[r].size();
    }
    mean_length = n_features ? static_cast<double>(nnz) / static_cast<double>(n_features) : 0.0;
  }
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseVector> rows, std::span<const int> labels, const Columns& columns,
              const ForestConfig& config, std::uint64_t seed)
      : rows_(rows),
        labels_(labels),
        columns_(columns),
        config_(config),
        rng_(seed),
        n_features_(columns.entries.size()),
        max_features_(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features_))))),
        slot_(n_features_, -1) {}

  RandomForest::Tree build() {
    // Bootstrap sample kept as distinct rows with multiplicities.
    const std::size_t n = rows_.size();
    weight_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++weight_[rng_.below(n)];
    for (std::uint32_t r = 0; r < n; ++r) {
      if (weight_[r]) samples_.push_back(r);
    }
    in_node_.assign(n, 0);
    goes_right_.assign(n, 0);

    RandomForest::Tree tree;
    struct Pending {
      std::int32_t node;
      std::size_t begin, end, depth;
    };
    std::vector<Pending> stack;
    tree.emplace_back();
    stack.push_back({0, 0, samples_.size(), 0});
    while (!stack.empty()) {
      auto [node, begin, end, depth] = stack.back();
      stack.pop_back();

      std::size_t c0 = 0, c1 = 0;
      for (std::size_t i = begin; i < end; ++i) {
        (labels_[samples_[i]] ? c1 : c0) += weight_[samples_[i]];
      }
      tree[node].label = c1 > c0 ? 1 : 0;

      const bool depth_reached = config_.max_depth != 0 && depth >= config_.max_depth;
      if (c0 == 0 || c1 == 0 || depth_reached || c0 + c1 < 2 * config_.min_samples_leaf) continue;

      auto best = find_split(begin, end, c0, c1);
      if (!best.valid) continue;

      // find_split flagged the rows that go right; zeros always go left.
      scratch_.clear();
      std::size_t split = begin;
      for (std::size_t i = begin; i < end; ++i) {
        const auto s = samples_[i];
        if (goes_right_[s]) {
          scratch_.push_back(s);
          goes_right_[s] = 0;
        } else {
          samples_[split++] = s;
        }
      }
      std::copy(scratch_.begin(), scratch_.end(), samples_.begin() + static_cast<std::ptrdiff_t>(split));

      const auto left = static_cast<std::int32_t>(tree.size());
      tree.emplace_back();
      tree.emplace_back();
      tree[node].feature = static_cast<std::int32_t>(best.feature);
      tree[node].threshold = best.threshold;
      tree[node].left = left;
      tree[node].right = left + 1;
      stack.push_back({left + 1, split, end, depth + 1});
      stack.push_back({left, begin, split, depth + 1});
    }
    return tree;
  }

 private:
  // Draws features uniformly from those present in the node until
  // max_features of them have produced a valid partition. Large nodes read
  // only the drawn columns; small ones bucket every present feature at once.
  Candidate find_split(std::size_t begin, std::size_t end, std::size_t c0, std::size_t c1) {
    std::size_t node_nnz = 0;
    for (std::size_t i = begin; i < end; ++i) node_nnz += rows_[samples_[i]].size();
    const double column_cost = static_cast<double>(max_features_) * columns_.mean_length * 4.0;
    return static_cast<double>(node_nnz) > column_cost ? split_by_columns(begin, end, c0, c1)
                                                       : split_by_rows(begin, end, c0, c1);
  }

  Candidate split_by_rows(std::size_t begin, std::size_t end, std::size_t c0, std::size_t c1) {
    present_.clear();
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& [col, value] : rows_[samples_[i]]) {
        if (slot_[col] < 0) {
          slot_[col] = static_cast<std::int32_t>(present_.size());
          present_.push_back(col);
        }
      }
    }
    if (buckets_.size() < present_.size()) buckets_.resize(present_.size());
    for (std::size_t k = 0; k < present_.size(); ++k) buckets_[k].clear();
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = samples_[i];
      for (const auto& [col, value] : rows_[s]) buckets_[slot_[col]].push_back({value, s, labels_[s], weight_[s]});
    }
    // present_ is in first-seen order; sort so the draw depends only on the
    // node's contents.
    std::sort(present_.begin(), present_.end());

    Candidate best;
    std::vector<Entry>* best_bucket = nullptr;
    std::size_t visited = 0;
    for (std::size_t k = 0; k < present_.size() && visited < max_features_; ++k) {
      auto pick = k + static_cast<std::size_t>(rng_.below(present_.size() - k));
      std::swap(present_[k], present_[pick]);
      auto& bucket = buckets_[slot_[present_[k]]];
      bool improved = false;
      if (evaluate(present_[k], bucket, c0, c1, best, improved)) ++visited;
      if (improved) best_bucket = &bucket;
    }
    if (best_bucket) flag_right(*best_bucket, best.threshold);
    for (auto col : present_) slot_[col] = -1;
    return best;
  }

  Candidate split_by_columns(std::size_t begin, std::size_t end, std::size_t c0, std::size_t c1) {
    for (std::size_t i = begin; i < end; ++i) in_node_[samples_[i]] = 1;
    if (draw_order_.size() != n_features_) {
      draw_order_.resize(n_features_);
      for (std::uint32_t f = 0; f < n_features_; ++f) draw_order_[f] = f;
    }
    // Uniform draws over all features, rejecting absent ones, give a uniform
    // draw over the present ones.
    Candidate best;
    std::size_t visited = 0;
    std::size_t drawn = 0;
    for (; drawn < n_features_ && visited < max_features_; ++drawn) {
      auto pick = drawn + static_cast<std::size_t>(rng_.below(n_features_ - drawn));
      std::swap(draw_order_[drawn], draw_order_[pick]);
      const std::uint32_t feature = draw_order_[drawn];
      auto& bucket = column_bucket_;
      bucket.clear();
      for (const auto& [r, value] : columns_.entries[feature]) {
        if (in_node_[r]) bucket.push_back({value, r, labels_[r], weight_[r]});
      }
      if (bucket.empty()) continue;
      bool improved = false;
      if (evaluate(feature, bucket, c0, c1, best, improved)) ++visited;
      if (improved) best_bucket_.swap(bucket);
    }
    if (best.valid) flag_right(best_bucket_, best.threshold);
    for (std::size_t i = begin; i < end; ++i) in_node_[samples_[i]] = 0;
    return best;
  }

  void flag_right(const std::vector<Entry>& bucket, double threshold) {
    for (const auto& entry : bucket) {
      if (entry.value > threshold) goes_right_[entry.sample] = 1;
    }
  }

  // Scans thresholds for one feature; returns false when no threshold gives
  // two children of at least min_samples_leaf. Sets `improved` when this
  // feature now holds the best split.
  bool evaluate(std::uint32_t feature, std::vector<Entry>& bucket, std::size_t c0, std::size_t c1,
                Candidate& best, bool& improved) {
    std::sort(bucket.begin(), bucket.end(), [](const Entry& a, const Entry& b) {
      return a.value != b.value ? a.value < b.value : a.sample < b.sample;
    });
    std::size_t nz0 = 0, nz1 = 0;
    for (const auto& entry : bucket) (entry.label ? nz1 : nz0) += entry.weight;
    // Zero-valued samples sort first, so the left side starts with them.
    double left0 = static_cast<double>(c0 - nz0);
    double left1 = static_cast<double>(c1 - nz1);
    double left_n = left0 + left1;
    const double total0 = static_cast<double>(c0);
    const double total1 = static_cast<double>(c1);
    const double min_leaf = static_cast<double>(config_.min_samples_leaf);
    const double n = total0 + total1;

    bool any_valid = false;
    double previous = 0.0;
    bool have_previous = left_n > 0.0;
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      if (have_previous && bucket[i].value != previous) {
        const double right_n = n - left_n;
        if (left_n >= min_leaf && right_n >= min_leaf) {
          any_valid = true;
          const double score = purity(left0, left1) + purity(total0 - left0, total1 - left1);
          if (!best.valid || score > best.score) {
            best.valid = true;
            best.score = score;
            best.feature = feature;
            best.threshold = previous + (bucket[i].value - previous) / 2.0;
            improved = true;
          }
        }
      }
      previous = bucket[i].value;
      have_previous = true;
      left_n += bucket[i].weight;
      (bucket[i].label ? left1 : left0) += bucket[i].weight;
    }
    return any_valid;
  }

  std::span<const SparseVector> rows_;
  std::span<const int> labels_;
  const Columns& columns_;
  const ForestConfig& config_;
  Rng rng_;
  std::size_t n_features_;
  std::size_t max_features_;
  std::vector<std::uint32_t> weight_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint8_t> in_node_;
  std::vector<std::uint8_t> goes_right_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::int32_t> slot_;
  std::vector<std::uint32_t> present_;
  std::vector<std::vector<Entry>> buckets_;
  std::vector<std::uint32_t> draw_order_;
  std::vector<Entry> column_bucket_;
  std::vector<Entry> best_bucket_;
};

}  // namespace

void check_class_counts(std::span<const int> labels, std::size_t min_per_class) {
  std::size_t counts[2] = {0, 0};
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorCode::Fit, "classify", "labels must be 0 or 1");
    ++counts[y];
  }
  if (counts[0] < min_per_class || counts[1] < min_per_class) {
    throw Error(ErrorCode::DegenerateData, "classify",
                "training data needs at least " + std::to_string(min_per_class) +
                    " examples per class (have " + std::to_string(counts[0]) + " of label 0, " +
                    std::to_string(counts[1]) + " of label 1)");
  }
}

RandomForest RandomForest::fit(std::span<const SparseVector> rows, std::span<const int> labels,
                               std::size_t n_features, const ForestConfig& config, std::uint64_t seed) {
  if (rows.size() != labels.size()) {
    throw Error(ErrorCode::Fit, "classify", "feature rows and labels differ in length");
  }
  if (config.trees == 0) throw Error(ErrorCode::Parameter, "classify", "forest needs at least one tree");
  if (config.min_samples_leaf == 0) throw Error(ErrorCode::Parameter, "classify", "min_samples_leaf must be >= 1");
  check_class_counts(labels, 2);

  RandomForest forest;
  forest.trees_.resize(config.trees);

  // Each tree owns a seed derived from (seed, tree index), so the result does
  // not depend on the thread count.
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.trees);
  const Columns columns(rows, n_features);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < config.trees; t = next++) {
      TreeBuilder builder(rows, labels, columns, config, derive_seed(seed, t));
      forest.trees_[t] = builder.build();
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return forest;
}

std::size_t RandomForest::votes(const SparseVector& row) const {
  std::size_t ones = 0;
  for (const auto& tree : trees_) {
    std::int32_t node = 0;
    while (tree[node].feature >= 0) {
      const double v = value_at(row, static_cast<std::uint32_t>(tree[node].feature));
      node = v <= tree[node].threshold ? tree[node].left : tree[node].right;
    }
    ones += static_cast<std::size_t>(tree[node].label);
  }
  return ones;
}

}  // namespace roiml::classify

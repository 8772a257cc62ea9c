// Copyright 2026 The robust-recourse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "robrec/forest.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "robrec/error.h"
#include "robrec/rng.h"

namespace robrec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weighted Gini impurity n * (1 - p1^2 - p0^2).
double WeightedGini(double n, double ones) {
  if (n <= 0.0) return 0.0;
  const double p1 = ones / n;
  const double p0 = 1.0 - p1;
  return n * (1.0 - p1 * p1 - p0 * p0);
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<Vector>& xs, const std::vector<int>& labels,
              int max_depth, uint64_t seed, size_t max_features)
      : xs_(xs),
        labels_(labels),
        max_depth_(max_depth),
        max_features_(max_features),
        rng_(seed),
        dims_(xs.front().size()) {}

  Tree Build() {
    std::vector<size_t> rows(xs_.size());
    std::iota(rows.begin(), rows.end(), size_t{0});
    Grow(rows, 0);
    return Tree(dims_, std::move(nodes_), 0);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = kInf;
  };

  int Grow(const std::vector<size_t>& rows, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    size_t ones = 0;
    for (size_t r : rows) ones += labels_[r] == 1 ? 1 : 0;
    // Ties between the classes go to 0.
    nodes_[index].label = 2 * ones > rows.size() ? 1 : 0;
    if (ones == 0 || ones == rows.size() || depth >= max_depth_ ||
        rows.size() < 2) {
      return index;
    }
    const Split split = BestSplit(rows, static_cast<double>(ones));
    if (split.feature < 0) return index;

    std::vector<size_t> left, right;
    for (size_t r : rows) {
      (xs_[r][split.feature] <= split.threshold ? left : right).push_back(r);
    }
    const int left_index = Grow(left, depth + 1);
    const int right_index = Grow(right, depth + 1);
    TreeNode& node = nodes_[index];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left_index;
    node.right = right_index;
    return index;
  }

  std::vector<size_t> CandidateFeatures() {
    std::vector<size_t> features(dims_);
    std::iota(features.begin(), features.end(), size_t{0});
    if (max_features_ == 0 || max_features_ >= dims_) return features;
    rng_.Shuffle(std::span<size_t>(features));
    features.resize(max_features_);
    std::sort(features.begin(), features.end());
    return features;
  }

  Split BestSplit(const std::vector<size_t>& rows, double ones) {
    const double n = static_cast<double>(rows.size());
    const double parent = WeightedGini(n, ones);
    Split best;
    std::vector<size_t> sorted = rows;
    for (size_t j : CandidateFeatures()) {
      std::stable_sort(sorted.begin(), sorted.end(), [&](size_t a, size_t b) {
        return xs_[a][j] < xs_[b][j];
      });
      double left_ones = 0.0;
      for (size_t i = 1; i < sorted.size(); ++i) {
        left_ones += labels_[sorted[i - 1]] == 1 ? 1.0 : 0.0;
        const double lo = xs_[sorted[i - 1]][j];
        const double hi = xs_[sorted[i]][j];
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(i);
        const double impurity =
            WeightedGini(nl, left_ones) + WeightedGini(n - nl, ones - left_ones);
        if (impurity < best.impurity) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {static_cast<int>(j), mid, impurity};
        }
      }
    }
    if (best.feature < 0 || !(best.impurity < parent - 1e-12)) return {};
    return best;
  }

  const std::vector<Vector>& xs_;
  const std::vector<int>& labels_;
  int max_depth_;
  size_t max_features_;
  Rng rng_;
  size_t dims_;
  std::vector<TreeNode> nodes_;
};

void CheckTrainingInput(const std::vector<Vector>& xs,
                        const std::vector<int>& labels) {
  if (xs.empty()) ThrowInvalid("empty input");
  if (xs.size() != labels.size()) {
    ThrowInvalid("features and labels have different lengths");
  }
  const size_t d = xs.front().size();
  if (d == 0) ThrowInvalid("inputs need at least one feature");
  for (const auto& x : xs) {
    if (x.size() != d) ThrowInvalid("ragged feature matrix");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) ThrowInvalid("labels must be 0 or 1");
  }
}

}  // namespace

Tree::Tree(size_t dims, std::vector<TreeNode> nodes, int root)
    : dims_(dims), nodes_(std::move(nodes)), root_(root) {
  if (dims_ == 0) ThrowInvalid("tree needs at least one feature");
  if (root_ < 0 || static_cast<size_t>(root_) >= nodes_.size()) {
    ThrowInvalid("tree root index out of range");
  }
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<int> stack = {root_};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    if (i < 0 || static_cast<size_t>(i) >= nodes_.size()) {
      ThrowInvalid("tree child index out of range");
    }
    if (seen[i]) ThrowInvalid("tree nodes do not form a tree");
    seen[i] = true;
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) {
      if (node.label != 0 && node.label != 1) {
        ThrowInvalid("leaf label must be 0 or 1");
      }
      continue;
    }
    if (static_cast<size_t>(node.feature) >= dims_) {
      ThrowInvalid("split feature out of range");
    }
    if (!std::isfinite(node.threshold)) {
      ThrowInvalid("split threshold must be finite");
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
}

int Tree::LeafIndex(ConstSpan x) const {
  int i = root_;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& node = nodes_[i];
    i = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return i;
}

int Tree::PredictUnchecked(ConstSpan x) const {
  return nodes_[LeafIndex(x)].label;
}

size_t Tree::depth() const {
  size_t deepest = 0;
  std::vector<std::pair<int, size_t>> stack = {{root_, 0}};
  while (!stack.empty()) {
    auto [i, level] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, level);
    if (!nodes_[i].is_leaf()) {
      stack.push_back({nodes_[i].left, level + 1});
      stack.push_back({nodes_[i].right, level + 1});
    }
  }
  return deepest;
}

size_t Tree::leaf_count() const {
  size_t count = 0;
  std::vector<int> stack = {root_};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    if (nodes_[i].is_leaf()) {
      ++count;
    } else {
      stack.push_back(nodes_[i].left);
      stack.push_back(nodes_[i].right);
    }
  }
  return count;
}

Forest::Forest(std::vector<Tree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) ThrowInvalid("forest needs at least one tree");
  for (const auto& t : trees_) {
    if (t.dims() != trees_.front().dims()) {
      ThrowInvalid("forest trees disagree on input dimension");
    }
  }
}

double Forest::MeanVote(ConstSpan x) const {
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.PredictUnchecked(x);
  return sum / static_cast<double>(trees_.size());
}

int Forest::PredictUnchecked(ConstSpan x) const {
  return MeanVote(x) > 0.5 ? 1 : 0;
}

Tree FitTree(const std::vector<Vector>& xs, const std::vector<int>& labels,
             int max_depth, uint64_t seed, size_t max_features) {
  CheckTrainingInput(xs, labels);
  if (max_depth < 1) ThrowInvalid("max_depth must be >= 1", "max_depth");
  return TreeBuilder(xs, labels, max_depth, seed, max_features).Build();
}

Forest FitForest(const std::vector<Vector>& xs, const std::vector<int>& labels,
                 size_t n_trees, int max_depth, uint64_t seed,
                 size_t max_features) {
  CheckTrainingInput(xs, labels);
  if (n_trees < 1) ThrowInvalid("n_trees must be >= 1", "n_trees");
  std::vector<Tree> trees;
  trees.reserve(n_trees);
  const size_t n = xs.size();
  for (size_t m = 0; m < n_trees; ++m) {
    Rng rng(MixSeed(seed, 2 * m));
    std::vector<Vector> sample_x;
    std::vector<int> sample_y;
    sample_x.reserve(n);
    sample_y.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      const size_t r = rng.UniformIndex(n);
      sample_x.push_back(xs[r]);
      sample_y.push_back(labels[r]);
    }
    trees.push_back(FitTree(sample_x, sample_y, max_depth,
                            MixSeed(seed, 2 * m + 1), max_features));
  }
  return Forest(std::move(trees));
}

bool Hypercube::Contains(ConstSpan x) const {
  for (size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > lower[j] && x[j] <= upper[j])) return false;
  }
  return true;
}

RegionSet ExtractRegions(const Tree& tree) {
  const size_t d = tree.dims();
  std::vector<Hypercube> cubes;
  struct Frame {
    int node;
    Vector lower;
    Vector upper;
  };
  std::vector<Frame> stack;
  stack.push_back({tree.root(), Vector(d, -kInf), Vector(d, kInf)});
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const TreeNode& node = tree.nodes()[frame.node];
    if (node.is_leaf()) {
      Hypercube cube{std::move(frame.lower), std::move(frame.upper),
                     node.label, {}};
      for (size_t j = 0; j < d; ++j) {
        if (std::isfinite(cube.lower[j]) || std::isfinite(cube.upper[j])) {
          cube.active_features.push_back(j);
        }
      }
      cubes.push_back(std::move(cube));
      continue;
    }
    const size_t j = static_cast<size_t>(node.feature);
    Frame right{node.right, frame.lower, frame.upper};
    right.lower[j] = std::max(right.lower[j], node.threshold);
    Frame left{node.left, std::move(frame.lower), std::move(frame.upper)};
    left.upper[j] = std::min(left.upper[j], node.threshold);
    // A split that cannot be reached leaves an empty interval; such leaves
    // hold no mass and are dropped.
    if (right.lower[j] < right.upper[j]) stack.push_back(std::move(right));
    if (left.lower[j] < left.upper[j]) stack.push_back(std::move(left));
  }
  // Leaves in left-to-right order.
  std::reverse(cubes.begin(), cubes.end());
  return RegionSet(d, std::move(cubes));
}

RegionSet RegionSet::Create(size_t dims, std::vector<Hypercube> cubes) {
  if (dims == 0) ThrowInvalid("regions need at least one feature");
  if (cubes.empty()) ThrowInvalid("region set is empty");
  Vector thresholds;
  for (auto& cube : cubes) {
    if (cube.lower.size() != dims || cube.upper.size() != dims) {
      ThrowInvalid("hypercube has wrong dimension");
    }
    if (cube.label != 0 && cube.label != 1) {
      ThrowInvalid("hypercube label must be 0 or 1");
    }
    cube.active_features.clear();
    for (size_t j = 0; j < dims; ++j) {
      if (!(cube.lower[j] < cube.upper[j])) {
        ThrowInvalid("hypercube has an empty side on feature " +
                     std::to_string(j));
      }
      if (std::isfinite(cube.lower[j])) thresholds.push_back(cube.lower[j]);
      if (std::isfinite(cube.upper[j])) thresholds.push_back(cube.upper[j]);
      if (std::isfinite(cube.lower[j]) || std::isfinite(cube.upper[j])) {
        cube.active_features.push_back(j);
      }
    }
  }
  for (size_t a = 0; a < cubes.size(); ++a) {
    for (size_t b = a + 1; b < cubes.size(); ++b) {
      bool overlap = true;
      for (size_t j = 0; j < dims && overlap; ++j) {
        overlap = std::max(cubes[a].lower[j], cubes[b].lower[j]) <
                  std::min(cubes[a].upper[j], cubes[b].upper[j]);
      }
      if (overlap) {
        ThrowInvalid("region set is not a partition: cubes " +
                     std::to_string(a) + " and " + std::to_string(b) +
                     " overlap");
      }
    }
  }

  RegionSet set(dims, std::move(cubes));
  // Gap probe: exact split values (to exercise the "<=" boundary convention)
  // mixed with uniform draws over a padded range of all split values.
  double lo = -1.0, hi = 1.0;
  if (!thresholds.empty()) {
    lo = *std::min_element(thresholds.begin(), thresholds.end()) - 1.0;
    hi = *std::max_element(thresholds.begin(), thresholds.end()) + 1.0;
  }
  Rng rng(0x5eedULL);
  Vector x(dims);
  for (int probe = 0; probe < 4000; ++probe) {
    for (size_t j = 0; j < dims; ++j) {
      x[j] = (!thresholds.empty() && rng.Uniform() < 0.3)
                 ? thresholds[rng.UniformIndex(thresholds.size())]
                 : rng.Uniform(lo, hi);
    }
    bool found = false;
    for (const auto& cube : set.cubes_) {
      if (cube.Contains(x)) {
        found = true;
        break;
      }
    }
    if (!found) {
      ThrowInvalid("region set is not a partition: gap detected on the "
                   "validation sample");
    }
  }
  return set;
}

const Hypercube& RegionSet::Locate(ConstSpan x) const {
  for (const auto& cube : cubes_) {
    if (cube.Contains(x)) return cube;
  }
  // Unreachable for a partition; NaN coordinates land here.
  ThrowInvalid("point is not covered by any region");
}

RegionSet RegionSet::Flipped() const {
  RegionSet out = *this;
  for (auto& cube : out.cubes_) cube.label = 1 - cube.label;
  return out;
}

DistillResult Distill(const Forest& forest, const std::vector<Vector>& xs,
                      int max_depth, uint64_t seed) {
  if (xs.empty()) ThrowInvalid("empty distillation inputs");
  std::vector<int> teacher(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) teacher[i] = forest.Predict(xs[i]);
  Tree tree = FitTree(xs, teacher, max_depth, seed);
  size_t agree = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    agree += tree.PredictUnchecked(xs[i]) == teacher[i] ? 1 : 0;
  }
  return {std::move(tree),
          static_cast<double>(agree) / static_cast<double>(xs.size())};
}

}  // namespace robrec

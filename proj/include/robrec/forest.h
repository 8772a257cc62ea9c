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

#ifndef ROBREC_FOREST_H_
#define ROBREC_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "robrec/model.h"
#include "robrec/vector_ops.h"

namespace robrec {

// A node is a leaf when `feature` is negative. Inputs go left iff
// x[feature] <= threshold.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;

  bool is_leaf() const { return feature < 0; }
};

class Tree final : public Classifier {
 public:
  // Validates node indices, labels and reachability; nodes[root] is the root.
  Tree(size_t dims, std::vector<TreeNode> nodes, int root = 0);

  size_t dims() const override { return dims_; }
  int PredictUnchecked(ConstSpan x) const override;

  // Index of the leaf reached by x.
  int LeafIndex(ConstSpan x) const;
  size_t depth() const;
  size_t leaf_count() const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int root() const { return root_; }

 private:
  size_t dims_;
  std::vector<TreeNode> nodes_;
  int root_;
};

// Majority vote of member trees: class 1 iff the mean tree output exceeds
// 0.5, so an exact tie goes to class 0.
class Forest final : public Classifier {
 public:
  explicit Forest(std::vector<Tree> trees);

  size_t dims() const override { return trees_.front().dims(); }
  int PredictUnchecked(ConstSpan x) const override;
  double MeanVote(ConstSpan x) const;

  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
};

// Greedy CART with the Gini criterion. Candidate thresholds are midpoints
// between consecutive distinct values. `max_features` = 0 uses every feature
// at each split; otherwise that many features are drawn per node from the
// seeded generator.
Tree FitTree(const std::vector<Vector>& xs, const std::vector<int>& labels,
             int max_depth, uint64_t seed, size_t max_features = 0);

// Each tree is fitted on a seeded bootstrap resample of the rows.
Forest FitForest(const std::vector<Vector>& xs, const std::vector<int>& labels,
                 size_t n_trees, int max_depth, uint64_t seed,
                 size_t max_features = 0);

// Axis-aligned leaf region (lower[j], upper[j]] per feature, with infinite
// bounds for sides no split constrains.
struct Hypercube {
  Vector lower;
  Vector upper;
  int label = 0;
  // Features with at least one finite bound.
  std::vector<size_t> active_features;

  bool Contains(ConstSpan x) const;
};

// A list of hypercubes known to partition R^d.
class RegionSet {
 public:
  // Checks the cubes pairwise for overlap and probes for gaps on a seeded
  // sample concentrated around the split points. Throws kInvalidArgument if
  // the cubes are not a partition.
  static RegionSet Create(size_t dims, std::vector<Hypercube> cubes);

  size_t dims() const { return dims_; }
  const std::vector<Hypercube>& cubes() const { return cubes_; }
  // The cube containing x; every point is in exactly one.
  const Hypercube& Locate(ConstSpan x) const;
  int Label(ConstSpan x) const { return Locate(x).label; }

  // Same partition with every label flipped.
  RegionSet Flipped() const;

 private:
  friend RegionSet ExtractRegions(const Tree& tree);
  RegionSet(size_t dims, std::vector<Hypercube> cubes)
      : dims_(dims), cubes_(std::move(cubes)) {}

  size_t dims_;
  std::vector<Hypercube> cubes_;
};

// One hypercube per leaf.
RegionSet ExtractRegions(const Tree& tree);

struct DistillResult {
  Tree tree;
  // Agreement rate between the tree and the forest on the distillation inputs.
  double fidelity;
};

// Refits a single tree on the forest's own predictions for xs.
DistillResult Distill(const Forest& forest, const std::vector<Vector>& xs,
                      int max_depth, uint64_t seed);

}  // namespace robrec

#endif  // ROBREC_FOREST_H_

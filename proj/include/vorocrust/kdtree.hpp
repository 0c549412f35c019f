#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "vorocrust/geometry.hpp"

namespace vorocrust {

/// 3D k-d tree over caller-supplied integer ids. Buckets hold up to 16 items
/// and split at the median of their widest extent. Removal is lazy; the tree
/// is rebuilt once a quarter of its entries are dead.
class KdTree {
 public:
  static constexpr std::size_t kBucket = 16;

  KdTree() = default;
  /// Bulk build; ids[i] is stored for points[i].
  void build(std::vector<Point3> points, std::vector<int> ids);
  void insert(const Point3& p, int id);
  /// Marks an id dead. Returns false if it was not present.
  bool remove(int id);
  void clear();

  std::size_t size() const { return live_; }
  bool empty() const { return live_ == 0; }

  struct Hit {
    int id = -1;
    double distance = std::numeric_limits<double>::infinity();
  };

  /// Nearest live item accepted by `accept` (all items when empty), searched
  /// within `max_distance`.
  Hit nearest(const Point3& p, const std::function<bool(int)>& accept = {},
              double max_distance = std::numeric_limits<double>::infinity()) const;
  /// Ids of all live items within distance r (closed ball).
  void within(const Point3& p, double r, std::vector<int>& out) const;
  /// The k nearest live items, sorted by distance.
  std::vector<Hit> k_nearest(const Point3& p, std::size_t k) const;

  /// All live ids (for census checks).
  std::vector<int> ids() const;
  const Point3& point_of(int id) const;

 private:
  struct Item {
    Point3 p;
    int id;
    bool alive;
  };
  struct Node {
    int dim = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1;
    int right = -1;
    std::vector<int> items;  // indices into items_ (leaves only)
  };

  int build_node(std::vector<int>& idx, std::size_t lo, std::size_t hi, int depth);
  void split_leaf(int node, int depth);
  void rebuild();
  void nearest_rec(int node, const Point3& p, const std::function<bool(int)>& accept, Hit& best) const;
  void within_rec(int node, const Point3& p, double r2, std::vector<int>& out) const;

  std::vector<Item> items_;
  std::vector<Node> nodes_;
  std::vector<int> slot_of_id_;  // id -> index into items_, -1 if absent
  std::size_t live_ = 0;
  std::size_t dead_ = 0;
};

}  // namespace vorocrust

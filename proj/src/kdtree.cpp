#include "vorocrust/kdtree.hpp"

#include <algorithm>
#include <queue>

namespace vorocrust {

void KdTree::clear() {
  items_.clear();
  nodes_.clear();
  slot_of_id_.clear();
  live_ = dead_ = 0;
}

void KdTree::build(std::vector<Point3> points, std::vector<int> ids) {
  clear();
  items_.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int id = ids[i];
    if (id >= static_cast<int>(slot_of_id_.size())) slot_of_id_.resize(id + 1, -1);
    slot_of_id_[id] = static_cast<int>(items_.size());
    items_.push_back({points[i], id, true});
  }
  live_ = items_.size();
  rebuild();
}

void KdTree::rebuild() {
  std::vector<Item> alive;
  alive.reserve(live_);
  for (const auto& it : items_)
    if (it.alive) alive.push_back(it);
  items_ = std::move(alive);
  std::fill(slot_of_id_.begin(), slot_of_id_.end(), -1);
  for (std::size_t i = 0; i < items_.size(); ++i) slot_of_id_[items_[i].id] = static_cast<int>(i);
  dead_ = 0;
  nodes_.clear();
  std::vector<int> idx(items_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  build_node(idx, 0, idx.size(), 0);
}

int KdTree::build_node(std::vector<int>& idx, std::size_t lo, std::size_t hi, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (hi - lo <= kBucket || depth >= 64) {
    nodes_[id].items.assign(idx.begin() + lo, idx.begin() + hi);
    return id;
  }
  Aabb box;
  for (std::size_t i = lo; i < hi; ++i) box.expand(items_[idx[i]].p);
  const Vec3 ext = box.extent();
  const int dim = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                   [&](int a, int b) { return items_[a].p[dim] < items_[b].p[dim]; });
  const double split = items_[idx[mid]].p[dim];
  nodes_[id].dim = dim;
  nodes_[id].split = split;
  const int left = build_node(idx, lo, mid, depth + 1);
  const int right = build_node(idx, mid, hi, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::split_leaf(int node, int depth) {
  auto items = std::move(nodes_[node].items);
  nodes_[node].items.clear();
  Aabb box;
  for (int i : items) box.expand(items_[i].p);
  const Vec3 ext = box.extent();
  const int dim = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  if (ext[dim] <= 0.0 || depth >= 64) {
    nodes_[node].items = std::move(items);
    return;
  }
  const std::size_t mid = items.size() / 2;
  std::nth_element(items.begin(), items.begin() + mid, items.end(),
                   [&](int a, int b) { return items_[a].p[dim] < items_[b].p[dim]; });
  const double split = items_[items[mid]].p[dim];
  Node left, right;
  for (int i : items) (items_[i].p[dim] < split ? left : right).items.push_back(i);
  nodes_[node].dim = dim;
  nodes_[node].split = split;
  nodes_[node].left = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(left));
  nodes_[node].right = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(right));
}

void KdTree::insert(const Point3& p, int id) {
  if (id >= static_cast<int>(slot_of_id_.size())) slot_of_id_.resize(id + 1, -1);
  if (slot_of_id_[id] >= 0 && items_[slot_of_id_[id]].alive) remove(id);
  slot_of_id_[id] = static_cast<int>(items_.size());
  items_.push_back({p, id, true});
  ++live_;
  if (nodes_.empty()) nodes_.emplace_back();
  int node = 0;
  int depth = 0;
  while (nodes_[node].dim >= 0) {
    node = p[nodes_[node].dim] < nodes_[node].split ? nodes_[node].left : nodes_[node].right;
    ++depth;
  }
  nodes_[node].items.push_back(slot_of_id_[id]);
  if (nodes_[node].items.size() > kBucket) split_leaf(node, depth);
}

bool KdTree::remove(int id) {
  if (id < 0 || id >= static_cast<int>(slot_of_id_.size()) || slot_of_id_[id] < 0) return false;
  Item& it = items_[slot_of_id_[id]];
  if (!it.alive) return false;
  it.alive = false;
  slot_of_id_[id] = -1;
  --live_;
  ++dead_;
  if (dead_ * 4 > items_.size()) rebuild();
  return true;
}

const Point3& KdTree::point_of(int id) const { return items_[slot_of_id_.at(id)].p; }

std::vector<int> KdTree::ids() const {
  std::vector<int> out;
  for (const auto& it : items_)
    if (it.alive) out.push_back(it.id);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::nearest_rec(int node, const Point3& p, const std::function<bool(int)>& accept, Hit& best) const {
  const Node& n = nodes_[node];
  if (n.dim < 0) {
    for (int i : n.items) {
      const Item& it = items_[i];
      if (!it.alive) continue;
      const double d = distance(it.p, p);
      if (d < best.distance || (d == best.distance && it.id < best.id)) {
        if (accept && !accept(it.id)) continue;
        best = {it.id, d};
      }
    }
    return;
  }
  const double diff = p[n.dim] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  nearest_rec(near, p, accept, best);
  if (std::abs(diff) <= best.distance) nearest_rec(far, p, accept, best);
}

KdTree::Hit KdTree::nearest(const Point3& p, const std::function<bool(int)>& accept, double max_distance) const {
  Hit best;
  best.distance = max_distance;
  if (!nodes_.empty()) nearest_rec(0, p, accept, best);
  if (best.id < 0) best.distance = std::numeric_limits<double>::infinity();
  return best;
}

void KdTree::within_rec(int node, const Point3& p, double r2, std::vector<int>& out) const {
  const Node& n = nodes_[node];
  if (n.dim < 0) {
    for (int i : n.items)
      if (items_[i].alive && distance2(items_[i].p, p) <= r2) out.push_back(items_[i].id);
    return;
  }
  const double diff = p[n.dim] - n.split;
  if (diff < 0.0 || diff * diff <= r2) within_rec(n.left, p, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) within_rec(n.right, p, r2, out);
}

void KdTree::within(const Point3& p, double r, std::vector<int>& out) const {
  if (nodes_.empty() || !(r >= 0.0)) return;
  within_rec(0, p, r * r, out);
}

std::vector<KdTree::Hit> KdTree::k_nearest(const Point3& p, std::size_t k) const {
  std::vector<Hit> out;
  if (nodes_.empty() || k == 0) return out;
  auto cmp = [](const Hit& a, const Hit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  };
  std::priority_queue<Hit, std::vector<Hit>, decltype(cmp)> heap(cmp);
  std::function<void(int)> rec = [&](int node) {
    const Node& n = nodes_[node];
    if (n.dim < 0) {
      for (int i : n.items) {
        if (!items_[i].alive) continue;
        const Hit h{items_[i].id, distance(items_[i].p, p)};
        if (heap.size() < k) {
          heap.push(h);
        } else if (cmp(h, heap.top())) {
          heap.pop();
          heap.push(h);
        }
      }
      return;
    }
    const double diff = p[n.dim] - n.split;
    rec(diff < 0.0 ? n.left : n.right);
    if (heap.size() < k || std::abs(diff) <= heap.top().distance) rec(diff < 0.0 ? n.right : n.left);
  };
  rec(0);
  out.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

}  // namespace vorocrust

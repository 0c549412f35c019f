#include "vorocrust/sliver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "json.hpp"

#include "vorocrust/log.hpp"

namespace vorocrust {

std::optional<SeedPairCandidate> triplet_points(const BallIndex& balls, std::array<int, 3> t) {
  std::sort(t.begin(), t.end());
  const Ball& a = balls.ball(t[0]);
  const Ball& b = balls.ball(t[1]);
  const Ball& c = balls.ball(t[2]);
  std::vector<Point3> pts;
  try {
    pts = sphere_triplet_points(a.sphere(), b.sphere(), c.sphere());
  } catch (const Error&) {
    return std::nullopt;
  }
  if (pts.size() != 2) return std::nullopt;
  SeedPairCandidate sp;
  sp.triplet = t;
  sp.g_up = pts[0];
  sp.g_down = pts[1];
  return sp;
}

namespace {

bool overlap(const Ball& a, const Ball& b) { return distance(a.center, b.center) < a.radius + b.radius; }

void cover_flags(const BallIndex& balls, SeedPairCandidate& sp) {
  auto covering = [&](const Point3& g, std::vector<int>& out) {
    for (int id : balls.balls_covering(g)) {
      if (id == sp.triplet[0] || id == sp.triplet[1] || id == sp.triplet[2]) continue;
      if (strictly_inside(g, balls.ball(id))) out.push_back(id);
    }
  };
  std::vector<int> up, down;
  covering(sp.g_up, up);
  covering(sp.g_down, down);
  sp.up_covered = !up.empty();
  sp.down_covered = !down.empty();
  sp.covering = sp.up_covered ? up : down;
  if (sp.up_covered && sp.down_covered) sp.covering.insert(sp.covering.end(), down.begin(), down.end());
}

template <class F>
void parallel_over(std::size_t n, int threads, F&& f) {
  const int nt = std::max(1, threads);
  if (nt == 1) {
    for (std::size_t i = 0; i < n; ++i) f(0, i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) f(t, i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<HalfCovered> find_half_covered(const BallIndex& balls, int threads) {
  const int nt = std::max(1, threads);
  std::vector<std::vector<HalfCovered>> partial(nt);
  parallel_over(balls.size(), nt, [&](int t, std::size_t i) {
    const int p = static_cast<int>(i);
    const Ball& bp = balls.ball(p);
    std::vector<int> nb;
    for (int q : balls.balls_overlapping(bp.sphere(), p))
      if (q > p) nb.push_back(q);
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (!overlap(balls.ball(nb[a]), balls.ball(nb[b]))) continue;
        auto sp = triplet_points(balls, {p, nb[a], nb[b]});
        if (!sp) continue;
        cover_flags(balls, *sp);
        if (sp->up_covered == sp->down_covered) continue;
        for (int f : sp->covering) {
          HalfCovered h;
          h.quartet = {p, nb[a], nb[b], f};
          std::sort(h.quartet.begin(), h.quartet.end());
          h.pair = *sp;
          partial[t].push_back(std::move(h));
        }
      }
  });
  std::vector<HalfCovered> out;
  for (auto& v : partial) out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  std::sort(out.begin(), out.end(), [](const HalfCovered& x, const HalfCovered& y) {
    return x.quartet != y.quartet ? x.quartet < y.quartet : x.pair.triplet < y.pair.triplet;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const HalfCovered& x, const HalfCovered& y) { return x.quartet == y.quartet; }),
            out.end());
  return out;
}

ShrinkageRatio shrinkage_ratio(const Ball& q, const Point3& g_up, const Point3& g_down) {
  const double du = distance(q.center, g_up);
  const double dd = distance(q.center, g_down);
  if (dd > q.radius || du < q.radius) throw Error("not half-covered");
  ShrinkageRatio s;
  s.delta = (q.radius - dd) / q.radius;
  s.bound = dd > 0.0 ? du / dd - 1.0 : std::numeric_limits<double>::infinity();
  return s;
}

ShrinkPlan plan_shrinks(const BallIndex& balls, const std::vector<HalfCovered>& candidates, double alpha) {
  ShrinkPlan plan;
  const double alpha_half = alpha / (2.0 - alpha);
  for (const auto& h : candidates) {
    // Each ball of the quartet may cover one point of the triplet formed by
    // the other three; the cheapest such shrink wins.
    int best = -1;
    double best_radius = 0.0, best_amount = std::numeric_limits<double>::infinity();
    ShrinkageRatio best_ratio;
    for (int k = 0; k < 4; ++k) {
      const int x = h.quartet[k];
      std::array<int, 3> t{};
      for (int j = 0, m = 0; j < 4; ++j)
        if (j != k) t[m++] = h.quartet[j];
      const Ball& bx = balls.ball(x);
      if (!overlap(balls.ball(t[0]), balls.ball(t[1])) || !overlap(balls.ball(t[0]), balls.ball(t[2])) ||
          !overlap(balls.ball(t[1]), balls.ball(t[2])))
        continue;
      const auto sp = triplet_points(balls, t);
      if (!sp) continue;
      const bool up = strictly_inside(sp->g_up, bx);
      const bool down = strictly_inside(sp->g_down, bx);
      if (up == down) continue;
      const Point3& covered = up ? sp->g_up : sp->g_down;
      const Point3& free = up ? sp->g_down : sp->g_up;
      if (distance(bx.center, free) < bx.radius) continue;
      const double r = distance(bx.center, covered) * (1.0 - 1e-9);
      const double amount = bx.radius - r;
      if (amount < best_amount || (amount == best_amount && x < best)) {
        best = x;
        best_radius = r;
        best_amount = amount;
        best_ratio = shrinkage_ratio(bx, free, covered);
      }
    }
    if (best < 0) continue;
    if (best_ratio.delta > best_ratio.bound * (1.0 + 1e-12)) throw Error("shrinkage ratio exceeds its bound");
    plan.max_delta = std::max(plan.max_delta, best_ratio.delta);
    if (best_ratio.delta > alpha_half) ++plan.beyond_alpha_half;
    auto it = plan.radius.find(best);
    if (it == plan.radius.end())
      plan.radius.emplace(best, best_radius);
    else
      it->second = std::min(it->second, best_radius);
  }
  return plan;
}

std::size_t CoverageDistribution::binned() const {
  std::size_t s = 0;
  for (auto b : bins) s += b;
  return s;
}

std::array<double, 100> CoverageDistribution::cdf() const {
  std::array<double, 100> F{};
  const double n = static_cast<double>(std::max<std::size_t>(1, binned()));
  double acc = 0.0;
  for (int i = 0; i < 100; ++i) {
    acc += static_cast<double>(bins[i]);
    F[i] = acc / n;
  }
  return F;
}

CoverageDistribution coverage_distribution(const BallIndex& balls, const InputComplex& mesh, std::size_t n,
                                           Rng& rng) {
  CoverageDistribution cd;
  const auto& V = mesh.vertices();
  std::vector<double> cum;
  double total = 0.0;
  if (mesh.has_facets()) {
    for (const auto& t : mesh.triangles()) cum.push_back(total += triangle_area(V[t[0]], V[t[1]], V[t[2]]));
  } else {
    for (const auto& e : mesh.edges()) cum.push_back(total += distance(V[e.a], V[e.b]));
  }
  if (cum.empty() || total <= 0.0) return cd;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(rng) * total;
    const std::size_t k = std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(),
                                                cum.size() - 1);
    Point3 x;
    if (mesh.has_facets()) {
      const auto& t = mesh.triangles()[k];
      x = sample_triangle(rng, V[t[0]], V[t[1]], V[t[2]]);
    } else {
      const auto& e = mesh.edges()[k];
      x = V[e.a] + (V[e.b] - V[e.a]) * uniform01(rng);
    }
    ++cd.samples;
    double f = -1.0;
    for (int id : balls.balls_covering(x)) {
      const Ball& b = balls.ball(id);
      f = std::max(f, 1.0 - distance(b.center, x) / b.radius);
    }
    if (f < 0.0) {
      ++cd.uncovered;
      continue;
    }
    ++cd.bins[std::min(99, static_cast<int>(f * 100.0))];
  }
  return cd;
}

double tv_distance(const CoverageDistribution& a, const CoverageDistribution& b) {
  const double na = static_cast<double>(a.binned());
  const double nb = static_cast<double>(b.binned());
  if (na == 0.0 || nb == 0.0) return na == nb ? 0.0 : 1.0;
  double s = 0.0;
  for (int i = 0; i < 100; ++i) s += std::abs(a.bins[i] / na - b.bins[i] / nb);
  return 0.5 * s;
}

SliverResult eliminate_slivers(Refiner& refiner, const InputComplex& mesh, const Parameters& params, Rng& rng,
                               const SliverOptions& opt) {
  SliverResult res;
  const BallIndex& balls = refiner.balls();
  res.distributions.push_back(coverage_distribution(balls, mesh, opt.coverage_samples, rng));
  int it = 0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const bool safe = opt.start_in_safe_mode || attempt == 1;
    if (safe && !res.safe_mode) {
      res.safe_mode = true;
      refiner.set_coverage_alpha(params.alpha / 2.0);
      if (attempt == 1) spdlog::warn("sliver elimination did not converge; restarting in safe mode");
    }
    for (int local = 0; local < opt.max_iterations; ++local) {
      const auto cand = find_half_covered(balls, opt.threads);
      if (cand.empty()) {
        res.iterations = it;
        return res;
      }
      ++it;
      const std::size_t before = balls.size();
      ShrinkPlan plan = plan_shrinks(balls, cand, refiner.coverage_alpha());
      plan.iteration = it;
      for (const auto& [id, r] : plan.radius) refiner.shrink(id, r, "sliver");
      refiner.run();
      res.distributions.push_back(coverage_distribution(balls, mesh, opt.coverage_samples, rng));
      SliverIteration rec;
      rec.iteration = it;
      rec.candidates = cand.size();
      rec.max_delta = plan.max_delta;
      rec.tv_distance = tv_distance(res.distributions[res.distributions.size() - 2], res.distributions.back());
      rec.balls_shrunk = plan.radius.size();
      rec.balls_added = balls.size() - before;
      rec.sliver_percent = 100.0 * static_cast<double>(cand.size()) / static_cast<double>(before);
      rec.safe_mode = res.safe_mode;
      rec.beyond_alpha_half = plan.beyond_alpha_half;
      res.log.push_back(rec);
      spdlog::debug("sliver iteration {}: {} candidates, {} shrunk, {} added, max delta {:.3g}", it, rec.candidates,
                   rec.balls_shrunk, rec.balls_added, rec.max_delta);
    }
    if (res.safe_mode) break;
  }
  throw Error("sliver elimination diverged");
}

void write_sliver_log(std::ostream& out, const SliverResult& r) {
  for (const auto& it : r.log) {
    nlohmann::json j;
    j["iteration"] = it.iteration;
    j["candidates"] = it.candidates;
    j["max_delta"] = it.max_delta;
    j["tv_distance"] = it.tv_distance;
    j["balls_shrunk"] = it.balls_shrunk;
    j["balls_added"] = it.balls_added;
    j["sliver_percent"] = it.sliver_percent;
    j["safe_mode"] = it.safe_mode;
    out << j.dump() << '\n';
  }
}

}  // namespace vorocrust

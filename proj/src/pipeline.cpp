#include "vorocrust/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "vorocrust/log.hpp"

namespace vorocrust {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string interior_name(const InteriorMode& m) {
  switch (m.kind) {
    case InteriorMode::Kind::random: return "random";
    case InteriorMode::Kind::none: return "none";
    case InteriorMode::Kind::lattice: return "lattice:" + std::to_string(m.spacing);
  }
  return "random";
}

nlohmann::json parameters_json(const RunConfig& c) {
  const Parameters& p = c.params;
  return {{"theta_sharp_deg", p.theta_sharp * 180.0 / kPi},
          {"lipschitz", p.lipschitz},
          {"sizing", finite_or_null(p.sizing)},
          {"alpha", p.alpha},
          {"seed", p.rng_seed},
          {"interior", interior_name(c.interior)},
          {"max_sliver_iterations", p.max_sliver_iterations},
          {"safe_mode", c.safe_mode},
          {"crease_supersamples", p.crease_supersamples},
          {"surface_supersamples", p.surface_supersamples}};
}

nlohmann::json balls_json(const std::vector<Ball>& balls) {
  std::size_t n[3] = {0, 0, 0};
  for (const Ball& b : balls) ++n[static_cast<int>(b.type)];
  return {{"total", balls.size()},
          {"corner", n[static_cast<int>(StratumKind::corner)]},
          {"crease", n[static_cast<int>(StratumKind::crease)]},
          {"surface", n[static_cast<int>(StratumKind::patch)]}};
}

nlohmann::json seeds_json(const SeedSet& s) {
  return {{"surface", s.count(SeedKind::surface)},
          {"volume", s.count(SeedKind::volume)},
          {"pairs", s.pairs.size()},
          {"label_conflicts", s.label_conflicts}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

RunResult run_2d(const RunConfig& c) {
  RunResult r;
  const auto t0 = Clock::now();
  const Pslg g = load_pslg(c.input);
  r.planar = mesh_2d(g, c.params, c.interior);
  const Mesh2dResult& m = *r.planar;
  r.seeds = m.seeds;
  r.balls = m.balls;
  const Report2d& q = m.report;
  r.report = {{"mode", "mesh2d"},
              {"input", c.input.filename().string()},
              {"parameters", parameters_json(c)},
              {"balls", balls_json(m.balls)},
              {"seeds", seeds_json(m.seeds)},
              {"quality",
               {{"cells", q.cells},
                {"non_convex", q.non_convex},
                {"area_error", q.area_error},
                {"hausdorff", q.hausdorff},
                {"edge_ratio", q.edge_ratio},
                {"boundary_edges", q.boundary_edges},
                {"consecutive_violations", q.consecutive_violations}}},
              {"timings", {{"total", seconds_since(t0)}}}};
  if (!c.out.empty()) {
    write_seeds_csv(c.out / "seeds.csv", r.seeds);
    write_svg(c.out / "cells.svg", m);
    write_json(c.out / "report.json", r.report);
  }
  return r;
}

RunResult run_3d(const RunConfig& c) {
  RunResult r;
  const Parameters& P = c.params;
  const auto t0 = Clock::now();
  const MeshFormat fmt = c.format.empty() ? mesh_format_from_path(c.input)
                         : c.format == "off" ? MeshFormat::off
                         : c.format == "obj" ? MeshFormat::obj
                                             : MeshFormat::stl;
  const InputComplex input = load_mesh(c.input, fmt);
  const Strata strata0 = detect_features(input, P.theta_sharp);
  const SmoothingResult sm =
      smooth_patches(input, strata0, P.theta_sharp, P.smoothing_dihedral_threshold, P.smoothing_iterations);
  const InputComplex& mesh = sm.mesh;
  spdlog::info("{} vertices, {} triangles, {} corners, {} creases, {} patches", mesh.vertices().size(),
               mesh.triangles().size(), sm.strata.corners.size(), sm.strata.creases.size(), sm.strata.patches.size());

  Rng brng = stage_rng(P.rng_seed, "boundary");
  const BoundaryIndex boundary(mesh, sm.strata, P.crease_supersamples, P.surface_supersamples, brng);
  Rng rrng = stage_rng(P.rng_seed, "rmps");
  Refiner refiner(mesh, sm.strata, boundary, P, rrng);
  refiner.run();
  spdlog::info("refinement: {} balls", refiner.balls().size());

  Rng srng = stage_rng(P.rng_seed, "sliver");
  SliverOptions so;
  so.max_iterations = P.max_sliver_iterations;
  so.start_in_safe_mode = c.safe_mode;
  so.coverage_samples = c.coverage_samples;
  so.threads = c.threads;
  r.sliver = eliminate_slivers(refiner, mesh, P, srng, so);
  const BallIndex& balls = refiner.balls();
  r.balls = balls.balls();

  const TriangleBvh locator(mesh.vertices(), mesh.triangles());
  r.seeds = surface_seeds(balls, mesh, sm.strata, locator, c.threads);
  const double t_surface = seconds_since(t0);

  const auto t1 = Clock::now();
  if (c.interior.kind == InteriorMode::Kind::random) {
    Rng irng = stage_rng(P.rng_seed, "interior");
    interior_seeds_random(r.seeds, balls, mesh, P, irng);
  } else if (c.interior.kind == InteriorMode::Kind::lattice) {
    interior_seeds_lattice(r.seeds, balls, mesh, locator, c.interior.spacing);
  }
  const double t_volume = seconds_since(t1);
  spdlog::info("seeds: {} surface, {} volume", r.seeds.count(SeedKind::surface), r.seeds.count(SeedKind::volume));

  if (c.mode == RunMode::seeds_only) {
    r.report = {{"mode", to_string(c.mode)},
                {"input", c.input.filename().string()},
                {"parameters", parameters_json(c)},
                {"balls", balls_json(r.balls)},
                {"seeds", seeds_json(r.seeds)},
                {"timings", {{"surface", t_surface}, {"volume", t_volume}, {"total", seconds_since(t0)}}}};
    if (!c.out.empty()) {
      write_seeds_csv(c.out / "seeds.csv", r.seeds);
      write_json(c.out / "report.json", r.report);
    }
    return r;
  }

  const auto t2 = Clock::now();
  r.cells = compute_cells(seed_positions(r.seeds), input.bbox().scaled(3.0), c.threads);
  r.surface = extract_surface(r.cells, r.seeds, mesh.scale());
  const double t_cells = seconds_since(t2);
  Rng qrng = stage_rng(P.rng_seed, "report");
  r.quality = quality_report(r.surface, r.cells, r.seeds, input, {t_surface, t_volume}, c.hausdorff_samples, qrng);
  if (c.condition_samples > 0)
    r.conditions = check_conditions(balls, mesh, sm.strata, P, refiner.coverage_alpha(), c.condition_samples,
                                    P.rng_seed, c.threads);

  const QualityReport& q = *r.quality;
  const SliverResult& s = *r.sliver;
  const RefinementStats& st = refiner.stats();
  r.report = {
      {"mode", to_string(c.mode)},
      {"input", c.input.filename().string()},
      {"parameters", parameters_json(c)},
      {"input_mesh",
       {{"vertices", input.vertices().size()},
        {"triangles", input.triangles().size()},
        {"corners", sm.strata.corners.size()},
        {"creases", sm.strata.creases.size()},
        {"patches", sm.strata.patches.size()},
        {"smoothing_rounds", sm.rounds}}},
      {"balls", balls_json(r.balls)},
      {"refinement",
       {{"samples", st.samples},
        {"accepted", st.accepted},
        {"misses", st.misses},
        {"density_rejections", st.density_rejections},
        {"violation_shrinks", st.violation_shrinks},
        {"lipschitz_shrinks", st.lipschitz_shrinks},
        {"external_shrinks", st.external_shrinks}}},
      {"sliver",
       {{"iterations", s.iterations},
        {"safe_mode", s.safe_mode},
        {"final_tv", s.log.empty() ? 0.0 : s.log.back().tv_distance}}},
      {"seeds", seeds_json(r.seeds)},
      {"quality",
       {{"frac_below_30", q.frac_below_30},
        {"frac_above_90", q.frac_above_90},
        {"q_min", q.q_min},
        {"rho_max", q.rho_max},
        {"hausdorff", q.hausdorff},
        {"non_convex", q.non_convex},
        {"euler", q.euler},
        {"surface_facets", q.surface_facets},
        {"surface_triangles", q.surface_triangles},
        {"cells", q.cells}}},
      {"timings",
       {{"surface", t_surface}, {"volume", t_volume}, {"cells", t_cells}, {"total", seconds_since(t0)}}}};
  if (r.conditions) {
    const ConditionReport& k = *r.conditions;
    r.report["conditions"] = {{"samples", k.samples},         {"c1", k.c1},
                              {"c2", k.c2},                   {"c3", k.c3},
                              {"c4_coverage", k.c4_coverage}, {"c4_separation", k.c4_separation},
                              {"exclusivity", k.exclusivity}};
  }

  if (!c.out.empty()) {
    write_json(c.out / "report.json", r.report);
    if (c.mode == RunMode::mesh3d) {
      write_seeds_csv(c.out / "seeds.csv", r.seeds);
      write_off(c.out / "surface.off", r.surface);
      write_vtk(c.out / "volume.vtk", r.cells);
      std::ofstream log(c.out / "sliver_log.jsonl");
      write_sliver_log(log, s);
    }
  }
  return r;
}

}  // namespace

RunMode parse_run_mode(const std::string& s) {
  if (s == "mesh3d") return RunMode::mesh3d;
  if (s == "mesh2d") return RunMode::mesh2d;
  if (s == "seeds-only") return RunMode::seeds_only;
  if (s == "report-only") return RunMode::report_only;
  throw Error("unknown mode '" + s + "'");
}

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::mesh3d: return "mesh3d";
    case RunMode::mesh2d: return "mesh2d";
    case RunMode::seeds_only: return "seeds-only";
    case RunMode::report_only: return "report-only";
  }
  return "?";
}

void RunConfig::validate() const {
  params.validate();
  if (input.empty()) throw Error("input: missing path");
  if (!format.empty() && format != "off" && format != "obj" && format != "stl" && format != "poly")
    throw Error("format: expected off, obj, stl or poly");
  const bool poly = format == "poly" || (format.empty() && input.extension() == ".poly");
  if (poly != (mode == RunMode::mesh2d)) throw Error("format: mesh2d takes .poly input and only mesh2d does");
  if (threads < 1) throw Error("threads: must be at least 1");
  if (interior.kind == InteriorMode::Kind::lattice && !(interior.spacing > 0.0))
    throw Error("interior: lattice spacing must be positive");
  if (hausdorff_samples == 0) throw Error("hausdorff samples: must be positive");
  if (coverage_samples == 0) throw Error("coverage samples: must be positive");
}

RunResult run_pipeline(const RunConfig& config) {
  config.validate();
  if (!config.out.empty()) std::filesystem::create_directories(config.out);
  return config.mode == RunMode::mesh2d ? run_2d(config) : run_3d(config);
}

int run(const RunConfig& config) {
  try {
    const RunResult r = run_pipeline(config);
    const auto q = r.report.find("quality");
    if (q != r.report.end() && q->at("non_convex").get<std::size_t>() > 0) {
      std::cerr << "error: non-convex cells in output\n";
      return 2;
    }
    std::cout << r.report.at("seeds").dump() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace vorocrust

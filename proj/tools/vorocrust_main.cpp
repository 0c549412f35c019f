// vorocrust: batch driver for the meshing pipeline.
//
//   vorocrust mesh3d cube.off --theta-sharp 60 --lipschitz 0.25 --seed 42 --out run
//   vorocrust mesh2d square_hole.poly --out run2d
//   vorocrust seeds-only sphere.off --out seeds
//
// Verbosity comes from VOROCRUST_LOG (trace, debug, info, warn, error, off).

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vorocrust/log.hpp"
#include "vorocrust/pipeline.hpp"

namespace {

struct Flags {
  std::string input;
  std::string format;
  double theta_deg = 60.0;
  double lipschitz = 0.25;
  std::string sizing = "inf";
  double alpha = 1.0 - std::sqrt(3.0) / 2.0;
  std::uint64_t seed = 0;
  std::string interior = "random";
  int max_sliver_iters = 100;
  bool safe_mode = false;
  int threads = 1;
  std::string out = ".";
  bool desk = false;
  std::size_t hausdorff_samples = 100000;
  std::size_t check_samples = 0;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("input", f.input, "Input mesh (.off/.obj/.stl) or PSLG (.poly)")->required();
  cmd->add_option("--format", f.format, "Input format")->check(CLI::IsMember({"off", "obj", "stl", "poly"}));
  cmd->add_option("--theta-sharp", f.theta_deg, "Sharp-feature angle, degrees")->check(CLI::Range(0.0, 90.0));
  cmd->add_option("--lipschitz", f.lipschitz, "Lipschitz constant L")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--sizing", f.sizing, "Maximum ball radius, or inf");
  cmd->add_option("--alpha", f.alpha, "Deep-coverage constant")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--interior", f.interior, "random, none or lattice:SPACING");
  cmd->add_option("--max-sliver-iters", f.max_sliver_iters, "Sliver-elimination iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--safe-mode", f.safe_mode, "Start sliver elimination with alpha/2 coverage");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--desk", f.desk, "Reduced boundary supersampling (1e4 crease, 1e5 surface)");
  cmd->add_option("--hausdorff-samples", f.hausdorff_samples, "Samples per side for d_H")->check(CLI::PositiveNumber);
  cmd->add_option("--check-conditions", f.check_samples, "Boundary samples for a ball-condition audit (0 = off)");
}

vorocrust::RunConfig to_config(const std::string& mode, const Flags& f) {
  vorocrust::RunConfig c;
  c.mode = vorocrust::parse_run_mode(mode);
  c.input = f.input;
  c.format = f.format;
  c.params = f.desk ? vorocrust::Parameters::desk_profile() : vorocrust::Parameters{};
  c.params.theta_sharp = vorocrust::degrees(f.theta_deg);
  c.params.lipschitz = f.lipschitz;
  c.params.sizing = f.sizing == "inf" ? std::numeric_limits<double>::infinity() : std::stod(f.sizing);
  c.params.alpha = f.alpha;
  c.params.rng_seed = f.seed;
  c.params.max_sliver_iterations = f.max_sliver_iters;
  c.interior = vorocrust::parse_interior_mode(f.interior);
  c.safe_mode = f.safe_mode;
  c.threads = f.threads;
  c.out = f.out;
  c.hausdorff_samples = f.hausdorff_samples;
  c.condition_samples = f.check_samples;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  vorocrust::init_logging();
  CLI::App app{"VoroCrust conforming Voronoi meshing"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* mode : {"mesh3d", "mesh2d", "seeds-only", "report-only"}) {
    const std::string help = std::string(mode) == "mesh3d"        ? "Full 3D pipeline with all artifacts"
                             : std::string(mode) == "mesh2d"      ? "2D pipeline on a PSLG"
                             : std::string(mode) == "seeds-only" ? "Seeds without cell construction"
                                                                  : "Full 3D pipeline, report.json only";
    add_flags(app.add_subcommand(mode, help), flags);
  }
  CLI11_PARSE(app, argc, argv);

  vorocrust::RunConfig config;
  try {
    config = to_config(app.get_subcommands().front()->get_name(), flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return vorocrust::run(config);
}

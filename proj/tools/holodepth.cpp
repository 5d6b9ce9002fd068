// holodepth: inline hologram synthesis, autofocus sweeps, dataset generation
// and CNN depth prediction from the command line.
//
// Exit codes: 0 success, 1 computation error, 2 usage or I/O error.

#include "holodepth/cli/commands.hpp"
#include "holodepth/error.hpp"
#include "holodepth/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace holodepth;
namespace fs = std::filesystem;

void add_optics(CLI::App* cmd, cli::OpticsOverride& optics) {
  cmd->add_option("--pitch", optics.pitch, "Pixel pitch in meters (default 10e-6)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--wavelength", optics.wavelength, "Wavelength in meters (default 633e-9)")
      ->check(CLI::PositiveNumber);
}

void add_range(CLI::App* cmd, SweepRange& range) {
  cmd->add_option("--z1", range.z1, "First reconstruction depth in meters")->capture_default_str();
  cmd->add_option("--z2", range.z2, "Last reconstruction depth in meters")->capture_default_str();
  cmd->add_option("--step", range.step, "Depth step in meters")->capture_default_str();
}

const std::vector<std::string> kMetrics{"tamura", "variance", "gradient", "laplacian"};
const std::vector<std::string> kKinds{"spectrum", "hologram"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital holography depth estimation toolkit"};
  app.require_subcommand(1);
  bool sequential = false;
  app.add_flag("--sequential", sequential, "Force deterministic single-threaded execution");

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Synthesize an inline hologram");
  auto* sim_image = simulate->add_option("--image", sim.image, "Object image (PGM/PPM)");
  simulate->add_flag("--point", sim.point, "Use a single-pixel point object")->excludes(sim_image);
  simulate->add_option("--z", sim.z, "Object distance in meters")->required();
  simulate->add_option("--size", sim.size, "Hologram side in pixels")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output hologram PGM")->required();
  add_optics(simulate, sim.optics);

  cli::SearchOptions se;
  auto* search = app.add_subcommand("search", "Autofocus depth search by metric sweep");
  search->add_option("--hologram", se.hologram, "Hologram PGM")->required();
  std::string se_metric = "tamura";
  search->add_option("--metric", se_metric, "Focus metric")
      ->check(CLI::IsMember(kMetrics))
      ->capture_default_str();
  search->add_option("--out", se.out_prefix, "Output prefix for <out>.csv and <out>_best.pgm")
      ->required();
  add_range(search, se.range);
  add_optics(search, se.optics);

  DatasetConfig ds;
  fs::path ds_images;
  fs::path ds_out;
  cli::OpticsOverride ds_optics;
  auto* dataset = app.add_subcommand("dataset", "Generate a hologram or spectrum dataset");
  dataset->add_option("--images", ds_images, "Directory of object images")->required();
  std::string ds_kind = "spectrum";
  dataset->add_option("--kind", ds_kind, "Feature kind")
      ->check(CLI::IsMember(kKinds))
      ->capture_default_str();
  dataset->add_option("--out", ds_out, "Output prefix for <out>.hdds and <out>.manifest.json")
      ->required();
  dataset->add_option("--seed", ds.seed, "Random seed")->capture_default_str();
  dataset->add_option("--z1", ds.z_min, "Minimum depth in meters")->capture_default_str();
  dataset->add_option("--z2", ds.z_max, "Maximum depth in meters")->capture_default_str();
  dataset->add_option("--jitter", ds.jitter, "Depth jitter bound in meters")->capture_default_str();
  dataset->add_option("--samples", ds.samples_per_object, "Holograms per object")
      ->capture_default_str();
  dataset->add_option("--objects", ds.max_objects, "Use at most this many images (0 = all)")
      ->capture_default_str();
  dataset->add_option("--validation-fraction", ds.validation_fraction,
                      "Fraction of objects held out for validation")
      ->capture_default_str();
  add_optics(dataset, ds_optics);

  cli::PredictOptions pr;
  fs::path pr_out;
  auto* predict = app.add_subcommand("predict", "Predict depth with a trained network");
  predict->add_option("--weights", pr.weights, "HDCW weight file")->required();
  predict->add_option("--hologram", pr.hologram, "Hologram PGM (1024x1024)")->required();
  predict->add_option("--out", pr_out, "Write the reconstruction at the predicted depth");
  add_optics(predict, pr.optics);

  cli::BenchOptions be;
  fs::path be_out;
  auto* bench = app.add_subcommand("bench", "Time CNN prediction against the metric sweep");
  bench->add_option("--weights", be.weights, "HDCW weight file")->required();
  bench->add_option("--hologram", be.hologram, "Hologram PGM (1024x1024)")->required();
  std::string be_metric = "tamura";
  bench->add_option("--metric", be_metric, "Focus metric")
      ->check(CLI::IsMember(kMetrics))
      ->capture_default_str();
  bench->add_option("--repeats", be.sweep_repeats, "Sweep repetitions")->capture_default_str();
  bench->add_option("--out", be_out, "CSV report path");
  add_range(bench, be.range);
  add_optics(bench, be.optics);

  cli::InitWeightsOptions iw;
  double iw_bias = 0.0;
  auto* init = app.add_subcommand("init-weights", "Write a randomly initialized reference network");
  init->add_option("--out", iw.out, "Output HDCW file")->required();
  init->add_option("--seed", iw.seed, "Random seed")->capture_default_str();
  init->add_option("--manifest", iw.manifest, "Echo normalization from this dataset manifest");
  std::string iw_kind = "spectrum";
  init->add_option("--kind", iw_kind, "Feature kind when no manifest is given")
      ->check(CLI::IsMember(kKinds))
      ->capture_default_str();
  auto* zero_bias = init->add_option("--zero-with-bias", iw_bias,
                                     "All-zero network whose output is this constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  set_sequential(sequential);
  se.metric = *parse_metric(se_metric);
  be.metric = *parse_metric(be_metric);
  ds.kind = *parse_feature_kind(ds_kind);
  iw.kind = *parse_feature_kind(iw_kind);

  try {
    if (*simulate) {
      const auto report = cli::simulate(sim);
      std::printf("hologram: %s\nsidecar: %s\n", report.hologram.c_str(), report.sidecar.c_str());
    } else if (*search) {
      const auto report = cli::search(se);
      const auto& r = report.timed.result;
      std::printf("best_z_m: %.6f\nbest_value: %.10g\nevaluations: %zu\nelapsed_ms: %.3f\n",
                  r.best_z, r.best_value, r.evaluations, report.timed.elapsed_ms);
      std::printf("diffraction_ms: %.3f\nmetric_ms: %.3f\ncurve: %s\nreconstruction: %s\n",
                  report.timed.diffraction_ms, report.timed.metric_ms, report.curve_csv.c_str(),
                  report.best_reconstruction.c_str());
    } else if (*dataset) {
      ds.optics = ds_optics.resolve({});
      const auto out = build_dataset(ds_images, ds, ds_out);
      std::printf("samples: %zu\nobjects: %zu\nskipped: %zu\ncontainer: %s\nmanifest: %s\n",
                  out.contents.sample_count, out.contents.objects.size(),
                  out.contents.skipped.size(), out.container.c_str(), out.manifest.c_str());
    } else if (*predict) {
      if (!pr_out.empty()) pr.reconstruction_out = pr_out;
      const auto report = cli::predict(pr);
      std::printf("predicted_z_m: %.6f\nforward_ms: %.3f\nfeature_ms: %.3f\n",
                  report.prediction.depth, report.prediction.elapsed_ms, report.feature_ms);
      if (report.true_depth)
        std::printf("true_z_m: %.6f\nerror_mm: %.3f\n", *report.true_depth,
                    (report.prediction.depth - *report.true_depth) * 1e3);
    } else if (*bench) {
      if (!be_out.empty()) be.out_csv = be_out;
      const auto report = cli::bench(be);
      std::fputs(cli::format_bench_table(report).c_str(), stdout);
    } else if (*init) {
      if (zero_bias->count() > 0) iw.final_bias = iw_bias;
      cli::init_weights(iw);
      std::printf("weights: %s\n", iw.out.c_str());
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

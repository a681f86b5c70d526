// Copyright 2026 Losscape Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: train small models, build direction pairs, map
// loss landscapes, estimate Hessian eigenvalue densities, interpolate
// between minima, and benchmark the parallel schemes. Every artifact is
// JSON/CSV/binary with embedded provenance metadata.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "losscape/autodiff.hpp"
#include "losscape/checkpoint.hpp"
#include "losscape/crc32.hpp"
#include "losscape/data.hpp"
#include "losscape/data_io.hpp"
#include "losscape/directions.hpp"
#include "losscape/errors.hpp"
#include "losscape/landscape.hpp"
#include "losscape/models.hpp"
#include "losscape/rng.hpp"
#include "losscape/scaling.hpp"
#include "losscape/slq.hpp"
#include "losscape/sym_operator.hpp"
#include "losscape/traj_io.hpp"
#include "losscape/trainer.hpp"
#include "losscape/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace losscape;

namespace {

using Clock = std::chrono::steady_clock;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::missing_input: return 2;
    case Errc::rank_deficient: return 3;
    case Errc::degenerate_direction: return 4;
    case Errc::layout: return 5;
    default: return 1;
  }
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct ModelOpts {
  std::string model = "lenet-mini";
  std::vector<int> layers = {64, 32, 10};
  std::string activation = "relu";
  int hw = 8;
  std::vector<int> channels = {4, 8};
  int fc_hidden = 32;
  bool batchnorm = false;
  int classes = 10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "Model architecture")
        ->check(CLI::IsMember({"mlp", "lenet-mini"}))
        ->capture_default_str();
    cmd->add_option("--layers", layers, "MLP layer sizes, input first")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--activation", activation, "Hidden activation")
        ->check(CLI::IsMember({"relu", "tanh"}))
        ->capture_default_str();
    cmd->add_option("--hw", hw, "lenet-mini input side length")->capture_default_str();
    cmd->add_option("--channels", channels, "lenet-mini conv channels")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--fc-hidden", fc_hidden, "lenet-mini hidden width")->capture_default_str();
    cmd->add_flag("--batchnorm", batchnorm, "Insert inference-mode batch-norm after convolutions");
    cmd->add_option("--classes", classes, "Number of classes")->capture_default_str();
  }

  ModelSpec spec() const {
    ModelSpec s;
    s.kind = model;
    s.layer_sizes = layers;
    s.activation = activation == "tanh" ? Activation::tanh : Activation::relu;
    s.input_hw = hw;
    s.channels = channels;
    s.fc_hidden = fc_hidden;
    s.use_batchnorm = batchnorm;
    s.num_classes = classes;
    s.loss = LossKind::softmax_xent;
    if (s.kind == "mlp" && !s.layer_sizes.empty()) s.num_classes = s.layer_sizes.back();
    return s;
  }
};

struct DataOpts {
  std::string data = "synth";
  int dim = 64;
  int samples = 2560;
  double separation = 8.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data, "Dataset: 'synth' or 'file:PATH'")->capture_default_str();
    cmd->add_option("--dim", dim, "Synthetic feature dimension")->capture_default_str();
    cmd->add_option("--samples", samples, "Synthetic sample count")->capture_default_str();
    cmd->add_option("--separation", separation, "Synthetic class separation in sigma units")
        ->capture_default_str();
  }

  json descriptor(int classes, std::uint64_t data_seed) const {
    if (data.rfind("file:", 0) == 0) {
      const std::string path = data.substr(5);
      return {{"type", "file"}, {"path", path}, {"crc32", crc32_file_hex(path)}};
    }
    return {{"type", "synth"},          {"classes", classes}, {"dim", dim},
            {"samples", samples},       {"separation", separation},
            {"seed", data_seed}};
  }

  Dataset build(int classes, std::uint64_t data_seed) const {
    if (data.rfind("file:", 0) == 0) return load_dataset(data.substr(5));
    if (data != "synth") {
      throw Error(Errc::config, "--data must be 'synth' or 'file:PATH', got '" + data + "'");
    }
    return make_synthetic(classes, dim, samples, data_seed, separation);
  }

  static Dataset from_descriptor(const json& d) {
    if (d.at("type") == "file") {
      const std::string path = d.at("path").get<std::string>();
      Dataset ds = load_dataset(path);
      const std::string hash = crc32_file_hex(path);
      if (hash != d.at("crc32").get<std::string>()) {
        std::cerr << "warning: dataset file " << path << " changed since training (crc " << hash
                  << " != " << d.at("crc32").get<std::string>() << ")\n";
      }
      return ds;
    }
    return make_synthetic(d.at("classes").get<int>(), d.at("dim").get<int>(),
                          d.at("samples").get<int>(), d.at("seed").get<std::uint64_t>(),
                          d.value("separation", 8.0));
  }
};

// ---------------------------------------------------------------------------
// Artifact metadata
// ---------------------------------------------------------------------------

json make_meta(const std::string& command, const json& config,
               const std::vector<std::string>& input_files) {
  json inputs = json::object();
  for (const std::string& f : input_files) inputs[f] = crc32_file_hex(f);
  return {{"command", command}, {"version", kVersion}, {"config", config}, {"inputs", inputs}};
}

void write_artifact(const std::string& path, json payload, json meta, double seconds) {
  meta["timing"] = {{"seconds", seconds}};
  payload["meta"] = std::move(meta);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::missing_input, "cannot create " + path);
  out << payload.dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
}

std::vector<Batch> subset_batches(const Model& model, const Dataset& ds, double fraction,
                                  std::uint64_t data_seed, int batch_size) {
  std::vector<std::size_t> subset = ds.subset_indices(fraction, data_seed);
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < subset.size();
       start += static_cast<std::size_t>(batch_size)) {
    std::size_t end = std::min(subset.size(), start + static_cast<std::size_t>(batch_size));
    batches.push_back(
        ds.make_batch({subset.data() + start, end - start}, model.input_sample_shape));
  }
  return batches;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOpts {
  ModelOpts model;
  DataOpts data;
  double lr = 0.001;
  double momentum = 0.9;
  int batch_size = 256;
  int epochs = 1;
  int save_every = 1;
  std::uint64_t seed = 1;
  std::string out = "run";
};

int cmd_train(const TrainOpts& o) {
  const auto t0 = Clock::now();
  const std::uint64_t data_seed = seed_mix(o.seed, "data");
  const std::uint64_t init_seed = seed_mix(o.seed, "init");

  ModelSpec spec = o.model.spec();
  Model model = build_model(spec);
  Dataset ds = o.data.build(spec.num_classes, data_seed);

  OptimizerConfig cfg;
  cfg.learning_rate = o.lr;
  cfg.momentum = o.momentum;
  cfg.batch_size = o.batch_size;
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.checkpoint_every = o.save_every;

  Trajectory traj = train_sgd(model, init_params(model, init_seed), ds, cfg, &spec);

  json config = {{"lr", o.lr},         {"momentum", o.momentum},
                 {"batch_size", o.batch_size}, {"epochs", o.epochs},
                 {"save_every", o.save_every}, {"seed", o.seed}};
  json extra = {{"dataset", o.data.descriptor(spec.num_classes, data_seed)},
                {"seeds", {{"master", o.seed}, {"data", data_seed}, {"init", init_seed}}},
                {"config", config},
                {"version", kVersion}};
  save_trajectory(o.out, traj, extra);

  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  std::cout << "trained " << traj.snapshots.back().iteration << " iterations, "
            << traj.snapshots.size() << " snapshots -> " << o.out << "\n";
  std::cout << "final training loss " << traj.snapshots.back().train_loss << ", accuracy "
            << accuracy(model, traj.snapshots.back().params, ds) << " (" << seconds << " s)\n";
  if (traj.aborted) {
    std::cerr << "warning: training aborted early: " << traj.abort_reason << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// landscape
// ---------------------------------------------------------------------------

struct LandscapeOpts {
  std::string traj_dir;
  std::string dirs = "pca";
  std::string dir1_file, dir2_file;
  bool pca_centered = false;
  bool no_normalize = false;
  int grid = 50;
  double border = 0.4;
  double fraction = 0.2;
  int m = 80;
  int batch_size = 256;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out = "run";
};

DirectionPair build_direction_pair(const LandscapeOpts& o, const Model& model,
                                   const Trajectory& traj, const Dataset& ds) {
  const LayoutPtr& layout = model.layout();
  const FlatParams& center = traj.snapshots.back().params;
  DirectionPair dirs;
  if (o.dirs == "random") {
    dirs.phi1 = random_direction(layout, seed_mix(o.seed, "dir", 0));
    dirs.phi2 = random_direction(layout, seed_mix(o.seed, "dir", 1));
    dirs.provenance = DirectionProvenance::random;
  } else if (o.dirs == "pca") {
    dirs = pca_directions(traj, {.centered = o.pca_centered});
  } else if (o.dirs == "eigen") {
    std::vector<Batch> batches =
        subset_batches(model, ds, o.fraction, seed_mix(o.seed, "grid-data"), o.batch_size);
    ModelHessianOperator op(model.graph, center, batches, /*hvp_workers=*/o.workers);
    EigenDirections eig = eigen_directions(op, layout, 2, o.m, o.seed);
    dirs.phi1 = eig.vectors[0];
    dirs.phi2 = eig.vectors[1];
    dirs.provenance = DirectionProvenance::eigen;
    std::cout << "top eigenvalues " << eig.values[0] << ", " << eig.values[1] << " (residuals "
              << eig.residuals[0] << ", " << eig.residuals[1] << ")\n";
  } else if (o.dirs == "user") {
    if (o.dir1_file.empty() || o.dir2_file.empty()) {
      throw Error(Errc::config, "--dirs user requires --dir1 and --dir2 checkpoint files");
    }
    dirs.phi1 = load_checkpoint(o.dir1_file);
    dirs.phi2 = load_checkpoint(o.dir2_file);
    check_same_layout(dirs.phi1, center, "user directions");
    check_same_layout(dirs.phi2, center, "user directions");
    dirs.provenance = DirectionProvenance::user;
  } else {
    throw Error(Errc::config, "unknown --dirs mode: " + o.dirs);
  }

  if (!o.no_normalize) {
    dirs.phi1 = filter_normalize(dirs.phi1, center);
    dirs.phi2 = filter_normalize(dirs.phi2, center);
    dirs.normalized = true;
  }
  return dirs;
}

int cmd_landscape(const LandscapeOpts& o) {
  const auto t0 = Clock::now();
  json provenance;
  Trajectory traj = load_trajectory(o.traj_dir, &provenance);
  Model model = build_model(traj.model_spec);
  Dataset ds = DataOpts::from_descriptor(provenance.at("dataset"));

  DirectionPair dirs = build_direction_pair(o, model, traj, ds);

  GridConfig gcfg;
  gcfg.n = o.grid;
  gcfg.border = o.border;
  gcfg.fraction = o.fraction;
  gcfg.workers = o.workers;
  gcfg.data_seed = seed_mix(o.seed, "grid-data");
  gcfg.batch_size = o.batch_size;
  LandscapeGrid grid = evaluate_grid(model, traj, dirs, ds, gcfg);
  if (grid.nan_cells > 0) {
    std::cerr << "warning: " << grid.nan_cells << " grid cells diverged and were stored as NaN\n";
  }

  json config = {{"traj", o.traj_dir},
                 {"dirs", o.dirs},
                 {"grid", o.grid},
                 {"border", o.border},
                 {"fraction", o.fraction},
                 {"workers", o.workers},
                 {"seed", o.seed},
                 {"pca_centered", o.pca_centered},
                 {"normalize", !o.no_normalize},
                 {"m", o.m}};
  json meta =
      make_meta("landscape", config, {(fs::path(o.traj_dir) / "manifest.json").string()});
  meta["timing_breakdown"] = {{"setup_seconds", grid.setup_seconds},
                              {"grid_seconds", grid.grid_seconds}};

  fs::create_directories(o.out);
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_artifact((fs::path(o.out) / "landscape.json").string(), grid_to_json(grid),
                 std::move(meta), seconds);
  write_grid_csv((fs::path(o.out) / "landscape.csv").string(), grid);
  std::cout << "wrote " << (fs::path(o.out) / "landscape.csv").string() << "\n";
  // The exact plane basis, reusable later through --dirs user.
  save_checkpoint((fs::path(o.out) / "dir1.gvck").string(), dirs.phi1);
  save_checkpoint((fs::path(o.out) / "dir2.gvck").string(), dirs.phi2);
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumOpts {
  std::string traj_dir;
  std::string checkpoint;
  std::string operator_file;
  ModelOpts model;
  DataOpts data;
  bool every_checkpoint = false;
  int k = 10;
  int m = 80;
  std::string sigma = "auto";
  int grid_points = 512;
  double fraction = 0.2;
  int batch_size = 256;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out = "run";
};

double parse_sigma(const std::string& s) {
  if (s == "auto") return 0.0;
  return std::stod(s);
}

SpectrumEstimate spectrum_at(const SpectrumOpts& o, const Model& model, const FlatParams& params,
                             const Dataset& ds) {
  std::vector<Batch> batches =
      subset_batches(model, ds, o.fraction, seed_mix(o.seed, "data"), o.batch_size);
  ModelHessianOperator op(model.graph, params, batches, /*hvp_workers=*/1);
  SlqConfig cfg;
  cfg.k = o.k;
  cfg.m = o.m;
  cfg.sigma = parse_sigma(o.sigma);
  cfg.grid_points = o.grid_points;
  cfg.seed = o.seed;
  return iteration_parallel_slq(op, cfg, o.workers);
}

int cmd_spectrum(const SpectrumOpts& o) {
  const auto t0 = Clock::now();
  json config = {{"k", o.k},
                 {"m", o.m},
                 {"sigma", o.sigma},
                 {"grid_points", o.grid_points},
                 {"fraction", o.fraction},
                 {"workers", o.workers},
                 {"seed", o.seed},
                 {"every_checkpoint", o.every_checkpoint}};
  fs::create_directories(o.out);

  if (!o.operator_file.empty()) {
    // Explicit-matrix test mode: {"diag": [...]} or {"n": N, "dense": [...]}.
    std::ifstream in(o.operator_file);
    if (!in) throw Error(Errc::missing_input, "cannot open " + o.operator_file);
    json jop;
    try {
      in >> jop;
    } catch (const json::exception& e) {
      throw Error(Errc::format, o.operator_file + ": " + e.what());
    }
    std::unique_ptr<ExplicitMatrixOperator> op;
    if (jop.contains("diag")) {
      op = std::make_unique<ExplicitMatrixOperator>(
          ExplicitMatrixOperator::diagonal(jop.at("diag").get<std::vector<double>>()));
    } else {
      op = std::make_unique<ExplicitMatrixOperator>(jop.at("n").get<std::size_t>(),
                                                    jop.at("dense").get<std::vector<double>>());
    }
    SlqConfig cfg;
    cfg.k = o.k;
    cfg.m = o.m;
    cfg.sigma = parse_sigma(o.sigma);
    cfg.grid_points = o.grid_points;
    cfg.seed = o.seed;
    SpectrumEstimate est = iteration_parallel_slq(*op, cfg, o.workers);
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    write_artifact((fs::path(o.out) / "spectrum.json").string(), json(est),
                   make_meta("spectrum", config, {o.operator_file}), seconds);
    return 0;
  }

  if (!o.traj_dir.empty()) {
    json provenance;
    Trajectory traj = load_trajectory(o.traj_dir, &provenance);
    Model model = build_model(traj.model_spec);
    Dataset ds = DataOpts::from_descriptor(provenance.at("dataset"));

    if (o.every_checkpoint) {
      for (const Snapshot& snap : traj.snapshots) {
        SpectrumEstimate est = spectrum_at(o, model, snap.params, ds);
        char name[48];
        std::snprintf(name, sizeof(name), "spectrum_iter_%06lld.json",
                      static_cast<long long>(snap.iteration));
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        json meta =
            make_meta("spectrum", config, {(fs::path(o.traj_dir) / "manifest.json").string()});
        meta["iteration"] = snap.iteration;
        write_artifact((fs::path(o.out) / name).string(), json(est), std::move(meta), seconds);
      }
      return 0;
    }
    SpectrumEstimate est = spectrum_at(o, model, traj.snapshots.back().params, ds);
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    write_artifact(
        (fs::path(o.out) / "spectrum.json").string(), json(est),
        make_meta("spectrum", config, {(fs::path(o.traj_dir) / "manifest.json").string()}),
        seconds);
    return 0;
  }

  if (o.checkpoint.empty()) {
    throw Error(Errc::config, "spectrum needs --traj, --checkpoint, or --operator-file");
  }
  FlatParams params = load_checkpoint(o.checkpoint);
  ModelSpec mspec = o.model.spec();
  Model model = build_model(mspec);
  check_layout(params, *model.layout(), "spectrum checkpoint");
  Dataset ds = o.data.build(mspec.num_classes, seed_mix(o.seed, "data"));
  SpectrumEstimate est = spectrum_at(o, model, params, ds);
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_artifact((fs::path(o.out) / "spectrum.json").string(), json(est),
                 make_meta("spectrum", config, {o.checkpoint}), seconds);
  return 0;
}

// ---------------------------------------------------------------------------
// interpolate
// ---------------------------------------------------------------------------

struct InterpolateOpts {
  std::string ckpt_a, ckpt_b;
  ModelOpts model;
  DataOpts data;
  int points = 20;
  bool with_spectra = false;
  int k = 10;
  int m = 80;
  std::string sigma = "auto";
  double fraction = 0.2;
  int batch_size = 256;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out = "run";
};

int cmd_interpolate(const InterpolateOpts& o) {
  const auto t0 = Clock::now();
  FlatParams a = load_checkpoint(o.ckpt_a);
  FlatParams b = load_checkpoint(o.ckpt_b);
  check_same_layout(a, b, "interpolate endpoints");

  ModelSpec mspec = o.model.spec();
  Model model = build_model(mspec);
  check_layout(a, *model.layout(), "interpolate");
  Dataset ds = o.data.build(mspec.num_classes, seed_mix(o.seed, "data"));

  InterpolateConfig cfg;
  cfg.points = o.points;
  cfg.fraction = o.fraction;
  cfg.workers = o.workers;
  cfg.data_seed = seed_mix(o.seed, "data-subset");
  cfg.batch_size = o.batch_size;
  if (o.with_spectra) {
    SlqConfig slq;
    slq.k = o.k;
    slq.m = o.m;
    slq.sigma = parse_sigma(o.sigma);
    slq.seed = o.seed;
    cfg.spectrum = slq;
  }
  InterpolationResult res = interpolate_minima(model, a, b, ds, cfg);

  json config = {{"points", o.points},     {"with_spectra", o.with_spectra},
                 {"k", o.k},               {"m", o.m},
                 {"sigma", o.sigma},       {"fraction", o.fraction},
                 {"workers", o.workers},   {"seed", o.seed}};
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  fs::create_directories(o.out);
  write_artifact((fs::path(o.out) / "interpolation.json").string(), interpolation_to_json(res),
                 make_meta("interpolate", config, {o.ckpt_a, o.ckpt_b}), seconds);
  return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOpts {
  std::string task = "slq-iteration";
  ModelOpts model;
  DataOpts data;
  std::vector<int> workers = {1, 2, 4};
  int repeats = 3;
  int grid = 20;
  int k = 10;
  int m = 40;
  double fraction = 0.2;
  int batch_size = 128;
  std::uint64_t seed = 1;
  std::string out = "run";
};

int cmd_bench(const BenchOpts& o) {
  ModelSpec mspec = o.model.spec();
  Model model = build_model(mspec);
  Dataset ds = o.data.build(mspec.num_classes, seed_mix(o.seed, "data"));
  FlatParams params = init_params(model, seed_mix(o.seed, "init"));

  Trajectory traj;
  Snapshot snap;
  snap.iteration = 0;
  snap.params = params;
  traj.snapshots.push_back(std::move(snap));

  DirectionPair dirs;
  dirs.phi1 =
      filter_normalize(random_direction(model.layout(), seed_mix(o.seed, "dir", 0)), params);
  dirs.phi2 =
      filter_normalize(random_direction(model.layout(), seed_mix(o.seed, "dir", 1)), params);
  dirs.normalized = true;

  std::vector<Batch> batches =
      subset_batches(model, ds, o.fraction, seed_mix(o.seed, "data-subset"), o.batch_size);

  BenchTask task;
  if (o.task == "grid") {
    task = [&](int workers) {
      GridConfig gcfg;
      gcfg.n = o.grid;
      gcfg.fraction = o.fraction;
      gcfg.workers = workers;
      gcfg.data_seed = seed_mix(o.seed, "data-subset");
      gcfg.batch_size = o.batch_size;
      evaluate_grid(model, traj, dirs, ds, gcfg);
    };
  } else if (o.task == "slq-iteration") {
    task = [&](int workers) {
      ModelHessianOperator op(model.graph, params, batches, /*hvp_workers=*/1);
      SlqConfig cfg;
      cfg.k = o.k;
      cfg.m = o.m;
      cfg.seed = o.seed;
      iteration_parallel_slq(op, cfg, workers);
    };
  } else if (o.task == "slq-data") {
    task = [&](int workers) {
      ModelHessianOperator op(model.graph, params, batches, /*hvp_workers=*/workers);
      SlqConfig cfg;
      cfg.k = o.k;
      cfg.m = o.m;
      cfg.seed = o.seed;
      slq_spectrum(op, cfg);  // probes sequential; parallelism inside each product
    };
  } else {
    throw Error(Errc::config, "unknown --task: " + o.task);
  }

  std::cout << "benchmarking task '" << o.task << "' over workers";
  for (int p : o.workers) std::cout << " " << p;
  std::cout << " (" << o.repeats << " repeats + warm-up each)\n";

  json config = {{"task", o.task},         {"workers", o.workers}, {"repeats", o.repeats},
                 {"grid", o.grid},         {"k", o.k},             {"m", o.m},
                 {"fraction", o.fraction}, {"seed", o.seed}};
  fs::create_directories(o.out);

  ScalingRun run;
  try {
    run = measure(o.task, task, o.workers, o.repeats);
  } catch (const PartialScalingError& e) {
    // Keep whatever completed before the failure.
    json partial = {{"task", e.partial().task},
                    {"worker_counts", e.partial().worker_counts},
                    {"times", e.partial().times},
                    {"means", e.partial().means},
                    {"error", e.what()}};
    write_artifact((fs::path(o.out) / "scaling_partial.json").string(), std::move(partial),
                   make_meta("bench", config, {}), 0.0);
    throw;
  }
  std::vector<SpeedupPoint> points = speedup_with_error(run);
  AmdahlFit fit = amdahl_fit(points);

  for (const SpeedupPoint& pt : points) {
    std::printf("  p=%-3d S=%.3f +- %.3f\n", pt.p, pt.s, pt.sigma_s);
  }
  std::printf("  amdahl parallel fraction f = %.4f +- %.4f\n", fit.f, fit.f_std);

  double total = 0.0;
  for (const auto& row : run.times) {
    for (double t : row) total += t;
  }
  write_artifact((fs::path(o.out) / "scaling.json").string(), scaling_to_json(run, points, fit),
                 make_meta("bench", config, {}), total);
  write_scaling_csv((fs::path(o.out) / "scaling.csv").string(), points);
  std::cout << "wrote " << (fs::path(o.out) / "scaling.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loss landscape and Hessian spectrum toolkit"};
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(1);

  TrainOpts train;
  CLI::App* t =
      app.add_subcommand("train", "Train a model with SGD+momentum, checkpointing a trajectory");
  train.model.attach(t);
  train.data.attach(t);
  t->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  t->add_option("--momentum", train.momentum, "Momentum coefficient")->capture_default_str();
  t->add_option("--batch-size", train.batch_size, "Minibatch size")->capture_default_str();
  t->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  t->add_option("--save-every", train.save_every, "Checkpoint cadence in iterations")
      ->capture_default_str();
  t->add_option("--seed", train.seed, "Master seed")->capture_default_str();
  t->add_option("--out", train.out, "Output trajectory directory")->capture_default_str();

  LandscapeOpts land;
  CLI::App* l = app.add_subcommand("landscape",
                                   "Evaluate the loss surface on a 2-d plane with the trajectory");
  l->add_option("--traj", land.traj_dir, "Trajectory directory from 'train'")->required();
  l->add_option("--dirs", land.dirs, "Direction pair: pca, random, eigen, user")
      ->check(CLI::IsMember({"pca", "random", "eigen", "user"}))
      ->capture_default_str();
  l->add_option("--dir1", land.dir1_file, "First user direction (.gvck)");
  l->add_option("--dir2", land.dir2_file, "Second user direction (.gvck)");
  l->add_flag("--pca-centered", land.pca_centered, "Center difference vectors before PCA");
  l->add_flag("--no-normalize", land.no_normalize, "Skip filter-wise normalization");
  l->add_option("--grid", land.grid, "Grid side length N")->capture_default_str();
  l->add_option("--border", land.border, "Extra border fraction around the trajectory")
      ->capture_default_str();
  l->add_option("--fraction", land.fraction, "Fraction of training samples per evaluation")
      ->capture_default_str();
  l->add_option("--m", land.m, "Lanczos steps for --dirs eigen")->capture_default_str();
  l->add_option("--batch-size", land.batch_size, "Evaluation batch size")->capture_default_str();
  l->add_option("--workers", land.workers, "Worker threads for the grid")->capture_default_str();
  l->add_option("--seed", land.seed, "Master seed")->capture_default_str();
  l->add_option("--out", land.out, "Output directory")->capture_default_str();

  SpectrumOpts spec;
  CLI::App* s = app.add_subcommand("spectrum", "Estimate the Hessian eigenvalue density");
  s->add_option("--traj", spec.traj_dir, "Trajectory directory (uses the final checkpoint)");
  s->add_option("--checkpoint", spec.checkpoint, "Single checkpoint file (.gvck)");
  s->add_option("--operator-file", spec.operator_file,
                "Explicit symmetric operator (JSON with 'diag' or 'n'+'dense')");
  spec.model.attach(s);
  spec.data.attach(s);
  s->add_flag("--every-checkpoint", spec.every_checkpoint,
              "Emit one spectrum per trajectory snapshot");
  s->add_option("--k", spec.k, "Number of random probes")->capture_default_str();
  s->add_option("--m", spec.m, "Lanczos steps per probe")->capture_default_str();
  s->add_option("--sigma", spec.sigma, "Kernel width or 'auto'")->capture_default_str();
  s->add_option("--grid-points", spec.grid_points, "Density grid resolution")
      ->capture_default_str();
  s->add_option("--fraction", spec.fraction, "Fraction of samples for the Hessian")
      ->capture_default_str();
  s->add_option("--batch-size", spec.batch_size, "Hessian batch size")->capture_default_str();
  s->add_option("--workers", spec.workers, "Workers over probes")->capture_default_str();
  s->add_option("--seed", spec.seed, "Master seed (probe i uses hash(seed, 'probe', i))")
      ->capture_default_str();
  s->add_option("--out", spec.out, "Output directory")->capture_default_str();

  InterpolateOpts interp;
  CLI::App* i =
      app.add_subcommand("interpolate", "Straight-line interpolation between two minima");
  i->add_option("ckpt_a", interp.ckpt_a, "First checkpoint (.gvck)")->required();
  i->add_option("ckpt_b", interp.ckpt_b, "Second checkpoint (.gvck)")->required();
  interp.model.attach(i);
  interp.data.attach(i);
  i->add_option("--points", interp.points, "Interpolation points including endpoints")
      ->capture_default_str();
  i->add_flag("--with-spectra", interp.with_spectra, "Attach a spectrum at every point");
  i->add_option("--k", interp.k, "Probes per spectrum")->capture_default_str();
  i->add_option("--m", interp.m, "Lanczos steps per probe")->capture_default_str();
  i->add_option("--sigma", interp.sigma, "Kernel width or 'auto'")->capture_default_str();
  i->add_option("--fraction", interp.fraction, "Fraction of samples per evaluation")
      ->capture_default_str();
  i->add_option("--batch-size", interp.batch_size, "Evaluation batch size")
      ->capture_default_str();
  i->add_option("--workers", interp.workers, "Workers over spectrum probes")
      ->capture_default_str();
  i->add_option("--seed", interp.seed, "Master seed")->capture_default_str();
  i->add_option("--out", interp.out, "Output directory")->capture_default_str();

  BenchOpts bench;
  CLI::App* b = app.add_subcommand("bench", "Strong-scaling benchmark with an Amdahl fit");
  b->add_option("--task", bench.task, "Workload: grid, slq-iteration, slq-data")
      ->check(CLI::IsMember({"grid", "slq-iteration", "slq-data"}))
      ->capture_default_str();
  bench.model.attach(b);
  bench.data.attach(b);
  b->add_option("--workers", bench.workers, "Worker counts, e.g. 1,2,4")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("--repeats", bench.repeats, "Timed repeats per worker count")
      ->capture_default_str();
  b->add_option("--grid", bench.grid, "Grid side for the grid task")->capture_default_str();
  b->add_option("--k", bench.k, "Probes for the slq tasks")->capture_default_str();
  b->add_option("--m", bench.m, "Lanczos steps for the slq tasks")->capture_default_str();
  b->add_option("--fraction", bench.fraction, "Fraction of samples")->capture_default_str();
  b->add_option("--batch-size", bench.batch_size, "Batch size")->capture_default_str();
  b->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
  b->add_option("--out", bench.out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (t->parsed()) return cmd_train(train);
    if (l->parsed()) return cmd_landscape(land);
    if (s->parsed()) return cmd_spectrum(spec);
    if (i->parsed()) return cmd_interpolate(interp);
    if (b->parsed()) return cmd_bench(bench);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

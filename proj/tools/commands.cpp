#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>

#include "heatflow/heatflow.hpp"
#include "run_record.hpp"

namespace fs = std::filesystem;

namespace heatflow::cli {
namespace {

struct MeshSource {
  fs::path path;
  int icosphere = -1;

  void add_to(CLI::App* app, OptionRegistry& reg) {
    reg.add(app, "mesh", path, "OFF or ASCII PLY mesh");
    reg.add(app, "icosphere", icosphere, "use a generated icosphere of this subdivision instead of --mesh");
  }

  TriangleMesh load() const {
    if (path.empty() == (icosphere < 0)) throw UsageError("give exactly one of --mesh and --icosphere");
    return path.empty() ? heatflow::icosphere(icosphere) : load_mesh(path);
  }
};

struct Flags {
  std::uint64_t seed = 42;

  MeshSource mesh;
  fs::path signal;
  fs::path out;
  double sigma = 0.0;
  std::string family = "chebyshev";
  double alpha = 0.0;
  double beta = 0.0;
  int degree = kDefaultDegree;
  int steps = 1;

  std::vector<double> scales;
  double kernel_alpha = 2.0;
  double kernel_beta = 2.0;
  double x1 = 1.0;
  double x2 = 2.0;
  std::string tail = "decaying";

  std::vector<int> subdivs;
  std::vector<std::string> methods;
  std::vector<int> degrees;
  std::vector<int> iters;
  std::vector<int> eigen_counts;
  int harmonics = 25;
  double cap_radius = kDefaultCapRadius;
  double noise = 0.0;
  fs::path out_dir;

  fs::path group_a;
  fs::path group_b;
  double fdr = 0.05;
  bool paired = false;

  fs::path matrix;
  fs::path areas;

};

PolynomialFamily family_from_name(const std::string& name, double alpha, double beta) {
  switch (family_kind_from_string(name)) {
    case FamilyKind::chebyshev: return PolynomialFamily::chebyshev();
    case FamilyKind::jacobi: return PolynomialFamily::jacobi(alpha, beta);
    case FamilyKind::hermite: return PolynomialFamily::hermite();
    case FamilyKind::laguerre: return PolynomialFamily::laguerre();
  }
  return PolynomialFamily::chebyshev();
}

std::string threads_from_env() {
  const char* env = std::getenv("HEATFLOW_THREADS");
  if (env == nullptr || *env == '\0') return {};
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw UsageError("HEATFLOW_THREADS must be a positive integer, got '" + std::string(env) + "'");
  Eigen::setNbThreads(static_cast<int>(n));
  return env;
}

// Everything a command needs besides its flags.
struct Run {
  std::string command;
  const Flags& flags;
  const OptionRegistry& registry;
  PhaseTimer timer;
  std::ostream& out;

  void finish(const fs::path& echo_path, const fs::path& timing_path) {
    Json echo{{"command", command},
              {"seed", flags.seed},
              {"threads", Eigen::nbThreads()},
              {"working_directory", fs::current_path().string()},
              {"options", registry.resolved()}};
    write_json(echo_path, echo);
    write_json(timing_path, timer.to_json(command));
  }
};

ScalarField load_signal(const fs::path& path, Index n) {
  ScalarField f = read_field_csv(path);
  if (f.size() != n)
    throw DimensionError(path.string() + " has " + std::to_string(f.size()) + " values, mesh has " +
                         std::to_string(n) + " vertices");
  return f;
}

void cmd_smooth(Run& run) {
  const Flags& f = run.flags;
  if (f.sigma < 0.0) throw DomainError("--sigma must be nonnegative");
  if (f.steps < 1) throw DomainError("--steps must be at least 1");
  const TriangleMesh mesh = run.timer.time("load", [&] { return f.mesh.load(); });
  const ScalarField signal = run.timer.time("load", [&] { return load_signal(f.signal, mesh.num_vertices()); });
  LBOperator op = run.timer.time("assembly", [&] { return assemble_lb_operator(mesh); });

  PolynomialFamily family = family_from_name(f.family, f.alpha, f.beta);
  family.validate();
  std::vector<ScalarField> passes;
  if (f.sigma == 0.0) {
    passes.assign(f.steps, signal);
  } else {
    family = run.timer.time("spectral_bound", [&] { return resolve_domain(op, family, f.sigma); });
    const ExpansionCoefficients c = run.timer.time("coefficients", [&] { return heat_coefficients(family, f.sigma, f.degree); });
    ScalarField g = signal;
    for (int k = 0; k < f.steps; ++k) {
      g = run.timer.time("recurrence", [&] { return apply_expansion(op, c, g); });
      passes.push_back(g);
    }
  }

  run.timer.time("write", [&] {
    if (f.steps == 1) {
      write_field_csv(f.out, passes.front());
      return;
    }
    FieldStack stack;
    stack.axis = StackAxis::scales;
    stack.values.resize(signal.size(), f.steps);
    for (int k = 0; k < f.steps; ++k) {
      stack.values.col(k) = passes[k];
      stack.labels.push_back(format_double((k + 1) * f.sigma));
    }
    write_stack_csv(f.out, stack);
  });
  run.out << "smoothed " << signal.size() << " vertices, sigma " << format_double(f.sigma) << " x " << f.steps
          << " -> " << f.out.string() << '\n';
}

void cmd_wavelet(Run& run) {
  const Flags& f = run.flags;
  WaveletKernel kernel;
  kernel.alpha = f.kernel_alpha;
  kernel.beta = f.kernel_beta;
  kernel.x1 = f.x1;
  kernel.x2 = f.x2;
  if (f.tail == "decaying")
    kernel.tail = SplineTail::decaying;
  else if (f.tail == "growing")
    kernel.tail = SplineTail::growing;
  else
    throw DomainError("--tail must be 'decaying' or 'growing', got '" + f.tail + "'");
  kernel.validate();

  const TriangleMesh mesh = run.timer.time("load", [&] { return f.mesh.load(); });
  const ScalarField signal = run.timer.time("load", [&] { return load_signal(f.signal, mesh.num_vertices()); });
  const LBOperator op = run.timer.time("assembly", [&] { return assemble_lb_operator(mesh); });
  const double b = run.timer.time("spectral_bound", [&] { return estimate_lambda_max(op); });

  std::vector<double> scales = f.scales;
  if (!std::is_sorted(scales.begin(), scales.end()) ||
      std::adjacent_find(scales.begin(), scales.end()) != scales.end())
    throw DomainError("--scales must be strictly increasing");
  FieldStack stack;
  stack.axis = StackAxis::scales;
  stack.values.resize(signal.size(), static_cast<Index>(scales.size()));
  for (std::size_t j = 0; j < scales.size(); ++j) {
    if (!(scales[j] > 0.0)) throw DomainError("--scales must be positive");
    kernel.t = scales[j];
    const ExpansionCoefficients c = run.timer.time("coefficients", [&] { return wavelet_coefficients(kernel, b, f.degree); });
    stack.values.col(static_cast<Index>(j)) = run.timer.time("recurrence", [&] { return apply_expansion(op, c, signal); });
    stack.labels.push_back(format_double(scales[j]));
  }
  run.timer.time("write", [&] { write_stack_csv(f.out, stack); });
  run.out << "wavelet stack " << signal.size() << " x " << scales.size() << " -> " << f.out.string() << '\n';
}

constexpr const char* kBenchmarkHeader = "method,subdiv,N,sigma,param,mse,seconds";

struct SphereRow {
  std::string method;
  int subdiv;
  Index n;
  double sigma;
  int param;
  double mse;
  double seconds;
  std::string status;
};

void cmd_validate_sphere(Run& run) {
  const Flags& f = run.flags;
  static const std::vector<std::string> known{"chebyshev", "jacobi", "hermite", "laguerre", "fem", "eigen"};
  for (const auto& m : f.methods)
    if (std::find(known.begin(), known.end(), m) == known.end())
      throw UsageError("unknown --method '" + m + "' (expected chebyshev, jacobi, hermite, laguerre, fem or eigen)");
  if (f.subdivs.empty() || f.methods.empty()) throw UsageError("--subdiv and --method need at least one value");
  if (!(f.sigma > 0.0)) throw DomainError("--sigma must be positive");
  fs::create_directories(f.out_dir);

  std::mt19937_64 rng(f.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SphereRow> rows;
  Json meshes = Json::array();

  for (int subdiv : f.subdivs) {
    const TriangleMesh mesh = run.timer.time("mesh", [&] { return icosphere(subdiv); });
    const Index n = mesh.num_vertices();
    ScalarField signal = two_cap_signal(mesh, kDefaultCapPlus, kDefaultCapMinus, f.cap_radius);
    if (f.noise > 0.0)
      for (Index i = 0; i < n; ++i) signal[i] += f.noise * normal(rng);
    const ScalarField truth = run.timer.time("ground_truth", [&] { return ground_truth_field(mesh, signal, f.harmonics, f.sigma); });
    LBOperator op = run.timer.time("assembly", [&] { return assemble_lb_operator(mesh); });
    const double lambda_max = run.timer.time("spectral_bound", [&] { return estimate_lambda_max(op); });
    op.lambda_max_hint = lambda_max;
    meshes.push_back(Json{{"subdiv", subdiv}, {"N", n}, {"lambda_max", lambda_max}});

    for (const auto& method : f.methods) {
      auto record = [&](int param, const ScalarField* g, double seconds, std::string status) {
        rows.push_back({method, subdiv, n, f.sigma, param,
                        g ? mse(*g, truth) : std::numeric_limits<double>::quiet_NaN(), seconds, std::move(status)});
      };
      if (method == "fem") {
        for (int it : f.iters) {
          if (it < 1) throw DomainError("--iters values must be positive");
          if (f.sigma / it * lambda_max >= 2.0) {
            warn("fem with " + std::to_string(it) + " iterations is unstable on subdiv " + std::to_string(subdiv) +
                 "; row skipped");
            record(it, nullptr, 0.0, "unstable");
            continue;
          }
          const auto t0 = std::chrono::steady_clock::now();
          const ScalarField g = fem_euler_smooth(op, signal, f.sigma, it, lambda_max);
          const double s = PhaseTimer::seconds_since(t0);
          run.timer.add("solve", s);
          record(it, &g, s, "ok");
        }
      } else if (method == "eigen") {
        if (n > kDenseEigenLimit) {
          warn("eigen reference skipped on subdiv " + std::to_string(subdiv) + ": " + std::to_string(n) +
               " vertices exceeds the dense limit");
          for (int k : f.eigen_counts) record(k, nullptr, 0.0, "skipped");
          continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const EigenSystem es = eigen_reference(op);
        const double decompose = PhaseTimer::seconds_since(t0);
        run.timer.add("solve", decompose);
        for (int k : f.eigen_counts) {
          const Index count = k <= 0 ? n : std::min<Index>(k, n);
          const auto t1 = std::chrono::steady_clock::now();
          EigenSystem head{es.eigenvalues.head(count), es.eigenvectors.leftCols(count)};
          const ScalarField g = eigen_smooth(head, op, signal, f.sigma);
          const double s = PhaseTimer::seconds_since(t1);
          run.timer.add("solve", s);
          record(static_cast<int>(count), &g, decompose + s, "ok");
        }
      } else {
        PolynomialFamily family = family_from_name(method, f.alpha, f.beta);
        if (family.shifted()) family.b = lambda_max;
        for (int m : f.degrees) {
          const auto t0 = std::chrono::steady_clock::now();
          const ScalarField g = heat_smooth(op, signal, f.sigma, family, m);
          const double s = PhaseTimer::seconds_since(t0);
          run.timer.add("solve", s);
          record(m, &g, s, "ok");
        }
      }
    }
  }

  Json report_rows = Json::array();
  std::ofstream csv(f.out_dir / "benchmark.csv");
  if (!csv) throw IoError("cannot write " + (f.out_dir / "benchmark.csv").string());
  csv << kBenchmarkHeader << '\n';
  for (const auto& r : rows) {
    csv << r.method << ',' << r.subdiv << ',' << r.n << ',' << format_double(r.sigma) << ',' << r.param << ','
        << format_double(r.mse) << ',' << format_double(r.seconds) << '\n';
    report_rows.push_back(Json{{"method", r.method},
                               {"subdiv", r.subdiv},
                               {"N", r.n},
                               {"param", r.param},
                               {"mse", std::isfinite(r.mse) ? Json(r.mse) : Json(nullptr)},
                               {"seconds", r.seconds},
                               {"status", r.status},
                               {"stable", r.status != "unstable"}});
  }
  write_json(f.out_dir / "report.json", Json{{"sigma", f.sigma},
                                             {"harmonics", f.harmonics},
                                             {"cap_radius", f.cap_radius},
                                             {"noise", f.noise},
                                             {"meshes", meshes},
                                             {"rows", report_rows}});
  for (const auto& r : rows)
    run.out << r.method << " subdiv " << r.subdiv << " param " << r.param << ": mse " << format_double(r.mse) << " ("
            << r.status << ")\n";
}

std::vector<fs::path> csv_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError(dir.string() + " contains no .csv files");
  return files;
}

// Directory of one field per subject, or a single stacked CSV.
FieldStack read_subjects(const fs::path& source) {
  if (!fs::exists(source)) throw IoError("no such file or directory: " + source.string());
  if (!fs::is_directory(source)) return read_stack_csv(source, StackAxis::subjects);
  const auto files = csv_files(source);
  FieldStack stack;
  stack.axis = StackAxis::subjects;
  for (std::size_t j = 0; j < files.size(); ++j) {
    const ScalarField field = read_field_csv(files[j]);
    if (j == 0) stack.values.resize(field.size(), static_cast<Index>(files.size()));
    if (field.size() != stack.values.rows())
      throw DimensionError(files[j].string() + " has " + std::to_string(field.size()) + " vertices, " +
                           files[0].string() + " has " + std::to_string(stack.values.rows()));
    stack.values.col(static_cast<Index>(j)) = field;
    stack.labels.push_back(files[j].stem().string());
  }
  return stack;
}

// Directory of per-subject scale stacks.
std::vector<FieldStack> read_scale_stacks(const fs::path& source) {
  if (!fs::is_directory(source))
    throw IoError("hotelling expects a directory of per-subject scale stacks: " + source.string());
  std::vector<FieldStack> stacks;
  const auto files = csv_files(source);
  for (const auto& file : files) {
    stacks.push_back(read_stack_csv(file, StackAxis::scales));
    const FieldStack& first = stacks.front();
    const FieldStack& last = stacks.back();
    if (last.num_vertices() != first.num_vertices() || last.num_columns() != first.num_columns())
      throw DimensionError(file.string() + " is " + std::to_string(last.num_vertices()) + " x " +
                           std::to_string(last.num_columns()) + ", " + files[0].string() + " is " +
                           std::to_string(first.num_vertices()) + " x " + std::to_string(first.num_columns()));
  }
  return stacks;
}

void check_group_sizes(const FieldStack& a, const FieldStack& b) {
  if (a.num_vertices() != b.num_vertices())
    throw DimensionError("group A has " + std::to_string(a.num_vertices()) + " vertices, group B has " +
                         std::to_string(b.num_vertices()));
}

void cmd_stats(Run& run, const std::string& test) {
  const Flags& f = run.flags;
  StatMap map;
  if (test == "hotelling") {
    const auto a = run.timer.time("load", [&] { return read_scale_stacks(f.group_a); });
    const auto b = run.timer.time("load", [&] { return read_scale_stacks(f.group_b); });
    check_group_sizes(a.front(), b.front());
    map = run.timer.time("statistic", [&] { return hotelling_t2_map(a, b); });
  } else {
    const FieldStack a = run.timer.time("load", [&] { return read_subjects(f.group_a); });
    const FieldStack b = run.timer.time("load", [&] { return read_subjects(f.group_b); });
    check_group_sizes(a, b);
    if (test == "corr") {
      if (a.num_columns() != b.num_columns())
        throw DimensionError("paired correlation needs equal subject counts: group A has " +
                             std::to_string(a.num_columns()) + ", group B has " + std::to_string(b.num_columns()));
      map = run.timer.time("statistic", [&] { return correlation_map(a, b, f.paired); });
    } else {
      map = run.timer.time("statistic", [&] { return two_sample_t_map(a, b); });
    }
  }
  run.timer.time("fdr", [&] { apply_fdr(map, f.fdr); });
  run.timer.time("write", [&] { write_stat_map(map, f.out, fs::path(f.out).replace_extension(".json")); });
  run.out << test << ": " << map.significant.count() << " of " << map.size() << " vertices significant at q "
          << format_double(f.fdr) << '\n';
}

void cmd_lbo(Run& run) {
  const Flags& f = run.flags;
  const TriangleMesh mesh = run.timer.time("load", [&] { return f.mesh.load(); });
  LBOperator op = run.timer.time("assembly", [&] { return assemble_lb_operator(mesh); });
  const double lambda_max = run.timer.time("spectral_bound", [&] { return estimate_lambda_max(op); });
  run.timer.time("write", [&] { export_operator(op, f.matrix, f.areas); });
  run.out << "N " << op.size() << "\nnnz " << op.stiffness.nonZeros() << "\nlambda_max " << format_double(lambda_max)
          << '\n';
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int run_replay(const fs::path& echo_path, std::ostream& out, std::ostream& err, int depth) {
  if (depth > 0) throw UsageError("a config echo cannot itself be a replay");
  const Json echo = read_json(echo_path);
  const std::vector<std::string> args = replay_arguments(echo);
  if (echo.contains("working_directory")) fs::current_path(echo["working_directory"].get<std::string>());
  return dispatch(args, out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Heat kernel smoothing, diffusion wavelets and vertex-wise statistics on triangle meshes", "heatflow"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  std::string chosen;
  std::function<void(Run&)> action;
  std::vector<std::pair<CLI::App*, OptionRegistry>> registries;
  registries.reserve(16);
  app.add_option("--seed", f.seed, "seed for every randomized step")->capture_default_str();

  auto command = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    registries.emplace_back(sub, OptionRegistry{});
    return std::pair<CLI::App*, OptionRegistry*>{sub, &registries.back().second};
  };

  {
    auto [sub, reg] = command(&app, "smooth", "heat kernel smoothing of a mesh signal");
    f.mesh.add_to(sub, *reg);
    reg->add(sub, "signal", f.signal, "per-vertex CSV")->required();
    reg->add(sub, "sigma", f.sigma, "diffusion time")->required();
    reg->add(sub, "family", f.family, "chebyshev, jacobi, hermite or laguerre")->capture_default_str();
    reg->add(sub, "alpha", f.alpha, "Jacobi alpha");
    reg->add(sub, "beta", f.beta, "Jacobi beta");
    reg->add(sub, "degree", f.degree, "expansion degree");
    reg->add(sub, "steps", f.steps, "number of successive smoothing passes");
    reg->add(sub, "out", f.out, "output CSV")->required();
    sub->callback([&] { chosen = "smooth"; action = cmd_smooth; });
  }
  {
    auto [sub, reg] = command(&app, "wavelet", "diffusion wavelet transform at several scales");
    f.mesh.add_to(sub, *reg);
    reg->add(sub, "signal", f.signal, "per-vertex CSV")->required();
    reg->add(sub, "scales", f.scales, "comma-separated scales t")->required();
    reg->add(sub, "degree", f.degree, "Chebyshev degree");
    reg->add(sub, "kernel-alpha", f.kernel_alpha, "low-frequency exponent");
    reg->add(sub, "kernel-beta", f.kernel_beta, "high-frequency exponent");
    reg->add(sub, "x1", f.x1, "start of the cubic section");
    reg->add(sub, "x2", f.x2, "end of the cubic section");
    reg->add(sub, "tail", f.tail, "decaying or growing")->capture_default_str();
    reg->add(sub, "out", f.out, "output stack CSV")->required();
    sub->callback([&] { chosen = "wavelet"; action = cmd_wavelet; });
  }
  auto sphere_command = [&](const std::string& name, const std::string& help, std::vector<int> subdivs,
                            std::vector<std::string> methods) {
    auto [sub, reg] = command(&app, name, help);
    sub->preparse_callback([&f, subdivs, methods](std::size_t) {
      f.subdivs = subdivs;
      f.methods = methods;
      f.degrees = {45};
      f.iters = {405};
      f.eigen_counts = {0};
      f.sigma = 0.01;
      f.out_dir = ".";
    });
    reg->add(sub, "subdiv", f.subdivs, "icosphere subdivision levels");
    reg->add(sub, "sigma", f.sigma, "diffusion time");
    reg->add(sub, "method", f.methods, "chebyshev, jacobi, hermite, laguerre, fem, eigen");
    reg->add(sub, "degree", f.degrees, "polynomial degrees");
    reg->add(sub, "iters", f.iters, "forward Euler iteration counts");
    reg->add(sub, "eigen-count", f.eigen_counts, "eigenpairs kept (0 keeps all)");
    reg->add(sub, "alpha", f.alpha, "Jacobi alpha");
    reg->add(sub, "beta", f.beta, "Jacobi beta");
    reg->add(sub, "harmonics", f.harmonics, "spherical harmonic degree of the ground truth");
    reg->add(sub, "cap-radius", f.cap_radius, "geodesic radius of the two caps");
    reg->add(sub, "noise", f.noise, "Gaussian noise SD added to the signal");
    reg->add(sub, "out-dir", f.out_dir, "directory for report.json and benchmark.csv");
    sub->callback([&, name] { chosen = name; action = cmd_validate_sphere; });
  };
  sphere_command("validate-sphere", "compare solvers against the spherical harmonic ground truth", {4}, {"chebyshev"});
  sphere_command("benchmark", "validate-sphere swept over mesh sizes and methods", {2, 3, 4, 5},
                 {"chebyshev", "fem", "eigen"});
  {
    CLI::App* stats = app.add_subcommand("stats", "vertex-wise group statistics");
    stats->require_subcommand(1);
    for (const std::string test : {"ttest", "hotelling", "corr"}) {
      auto [sub, reg] = command(stats, test,
                                test == "ttest"       ? "pooled two-sample T"
                                : test == "hotelling" ? "Hotelling T^2 over scale stacks"
                                                      : "paired Pearson correlation");
      reg->add(sub, "group-a", f.group_a, "directory of subject CSVs or a stacked CSV")->required();
      reg->add(sub, "group-b", f.group_b, "directory of subject CSVs or a stacked CSV")->required();
      reg->add(sub, "fdr", f.fdr, "false discovery rate");
      if (test == "corr") reg->add_flag(sub, "paired", f.paired, "columns of A and B are the same subjects");
      reg->add(sub, "out", f.out, "output CSV; the JSON sidecar goes next to it")->required();
      sub->callback([&, test] {
        chosen = "stats " + test;
        action = [test](Run& r) { cmd_stats(r, test); };
      });
    }
  }
  {
    auto [sub, reg] = command(&app, "lbo", "export the Laplace-Beltrami operator");
    f.mesh.add_to(sub, *reg);
    reg->add(sub, "matrix", f.matrix, "Matrix Market output for the stiffness matrix")->required();
    reg->add(sub, "areas", f.areas, "CSV output for the vertex areas")->required();
    sub->callback([&] { chosen = "lbo"; action = cmd_lbo; });
  }
  fs::path replay_path;
  CLI::App* replay = app.add_subcommand("replay", "re-run a command from its config echo");
  replay->add_option("echo", replay_path, "config echo JSON")->required();
  replay->callback([&] { chosen = "replay"; });

  std::vector<const char*> argv{"heatflow"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  threads_from_env();
  if (chosen == "replay") return run_replay(replay_path, out, err, depth);

  const OptionRegistry* reg = nullptr;
  for (const auto& [sub, r] : registries)
    if (sub->parsed()) reg = &r;
  Run run{chosen, f, *reg, PhaseTimer{}, out};
  action(run);
  const fs::path primary = f.out.empty() ? (f.matrix.empty() ? f.out_dir / "report" : f.matrix) : f.out;
  if (chosen == "validate-sphere" || chosen == "benchmark")
    run.finish(f.out_dir / "config.json", f.out_dir / "timing.json");
  else
    run.finish(sibling(primary, "config"), sibling(primary, "timing"));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const fs::path start = fs::current_path();
  auto restore = [&] {
    std::error_code ec;
    fs::current_path(start, ec);
  };
  try {
    const int code = dispatch(args, out, err, 0);
    restore();
    return code;
  } catch (const UsageError& e) {
    restore();
    err << "heatflow: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    restore();
    err << "heatflow: error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace heatflow::cli

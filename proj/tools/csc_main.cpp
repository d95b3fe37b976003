// Command-line driver: learn / encode / reconstruct / bench.
// Exit codes: 0 success (learn: converged), 1 bad flags, 2 unreadable input
// or shape mismatch, 3 iteration-cap exit, 4 numeric abort.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dcsc/bench.hpp"
#include "dcsc/coding.hpp"
#include "dcsc/image_io.hpp"
#include "dcsc/mosaic.hpp"
#include "dcsc/objective.hpp"
#include "dcsc/parallel.hpp"
#include "dcsc/pipeline.hpp"
#include "dcsc/tcsc.hpp"
#include "dcsc/tensor_io.hpp"
#include "dcsc/trace_io.hpp"

namespace fs = std::filesystem;
using namespace dcsc;

namespace {

struct CommonFlags {
  double beta = 0.5;
  double rho = 0.1;
  double tol = 1e-3;
  int max_outer = 50;
  int max_admm = 500;
  int max_mu_iters = 60;
  int cg_max = 300;
  double cg_tol = 1e-6;
  std::uint64_t seed = 0;
  std::string normalize = "global";
  std::string channels = "separate";
  int threads = 0;
};

void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--beta", f.beta, "sparsity weight")->check(CLI::PositiveNumber);
  cmd->add_option("--rho", f.rho, "ADMM step size")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "outer convergence threshold")->check(CLI::PositiveNumber);
  cmd->add_option("--max-outer", f.max_outer, "outer iteration cap")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-admm", f.max_admm, "ADMM iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--max-mu-iters", f.max_mu_iters, "multiplier ascent cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cg-max", f.cg_max, "CG budget per gamma solve")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cg-tol", f.cg_tol, "CG relative residual target")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--normalize", f.normalize, "contrast normalization")
      ->check(CLI::IsMember({"none", "global", "local"}));
  cmd->add_option("--threads", f.threads, "worker thread cap (1 = bit-deterministic)")
      ->check(CLI::NonNegativeNumber);
}

SolverConfig solver_config(const CommonFlags& f) {
  SolverConfig cfg;
  cfg.beta = f.beta;
  cfg.rho = f.rho;
  cfg.tol = f.tol;
  cfg.max_outer = f.max_outer;
  cfg.max_admm = f.max_admm;
  cfg.max_mu_iters = f.max_mu_iters;
  cfg.cg_max = f.cg_max;
  cfg.cg_tol = f.cg_tol;
  cfg.seed = f.seed;
  cfg.normalize = f.normalize == "none"     ? NormalizeMode::None
                  : f.normalize == "local"  ? NormalizeMode::Local
                                            : NormalizeMode::Global;
  return cfg;
}

GridDims parse_sizes(const std::string& text) {
  GridDims dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    dims.push_back(std::stoi(item));
  }
  return dims;
}

Dataset load_dataset(const std::string& dir, bool joint) {
  Dataset data;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".png" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    SignalTensor img = load_image(p.string());
    if (!joint) img = to_grayscale(img);
    data.signals.push_back(std::move(img));
    data.names.push_back(p.stem().string());
  }
  if (data.signals.empty())
    throw IoError("no .png or .pgm images found in '" + dir + "'");
  return data;
}

int run_learn(const std::string& input_dir, const std::string& out_dir, int filters,
              const std::string& filter_size, const CommonFlags& flags) {
  par::set_max_threads(flags.threads);
  const bool joint = flags.channels == "joint";
  Dataset data = load_dataset(input_dir, joint);
  const GridDims dims = data.signals.front().dims;

  GridDims support = parse_sizes(filter_size);
  if (support.size() == 1 && dims.size() > 1) support.assign(dims.size(), support[0]);

  RunConfig cfg;
  cfg.solver = solver_config(flags);
  cfg.filters = filters;
  cfg.support = support;
  cfg.channel_mode = joint ? ChannelMode::Joint : ChannelMode::Separate;

  const RunResult result = run_csc(cfg, data);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  write_tensor((out / "dict.csct").string(), to_tensor(result.dict));
  for (std::size_t n = 0; n < result.maps.size(); ++n)
    write_tensor((out / ("maps_" + data.names[n] + ".csct")).string(),
                 to_tensor(result.maps[n]));
  write_trace_csv((out / "trace.csv").string(), result.trace);
  write_dictionary_mosaic_png((out / "dict_mosaic.png").string(), result.dict);

  const double objective =
      result.trace.rows.empty() ? 0.0 : result.trace.rows.back().objective.total;
  std::cout << "converged=" << (result.converged ? "yes" : "no")
            << " outer_iters=" << result.outer_iters << " objective=" << objective << "\n";
  return result.converged ? 0 : 3;
}

int run_encode(const std::string& dict_path, const std::string& input_path,
               const std::string& out_path, const CommonFlags& flags) {
  par::set_max_threads(flags.threads);
  const Dictionary dict = dictionary_from_tensor(read_tensor(dict_path));
  SignalTensor img = load_image(input_path);
  if (dict.channels == 1)
    img = to_grayscale(img);
  else if (img.channels != dict.channels)
    throw DimensionError("dictionary expects " + std::to_string(dict.channels) +
                         " channels, image has " + std::to_string(img.channels));

  SolverConfig cfg = solver_config(flags);
  const SignalTensor x = normalize(img, cfg.normalize);
  CodingStats stats;
  const SparseMaps maps = dict.channels > 1 ? solve_coding_tcsc(x, dict, cfg, &stats)
                                            : solve_coding(x, dict, cfg, &stats);
  write_tensor(out_path, to_tensor(maps));

  const ObjectiveBreakdown obj = evaluate_objective(x, dict, maps, cfg.beta);
  double l1_norm = 0.0;
  for (double v : maps.values) l1_norm += std::abs(v);
  std::cout.precision(17);
  std::cout << "objective=" << obj.total << " data_term=" << obj.data_term
            << " l1_term=" << obj.l1_term << " l1_norm=" << l1_norm
            << " admm_iters=" << stats.admm_iters << "\n";
  return 0;
}

int run_reconstruct(const std::string& dict_path, const std::string& maps_path,
                    const std::string& out_path, const std::string& input_path,
                    const CommonFlags& flags) {
  par::set_max_threads(flags.threads);
  const Dictionary dict = dictionary_from_tensor(read_tensor(dict_path));
  const SparseMaps maps = maps_from_tensor(read_tensor(maps_path));
  const SignalTensor rec = reconstruct(dict, maps);
  write_image_png(out_path, rec);

  if (!input_path.empty()) {
    SignalTensor img = load_image(input_path);
    if (dict.channels == 1) img = to_grayscale(img);
    const SolverConfig cfg = solver_config(flags);
    const SignalTensor x = normalize(img, cfg.normalize);
    if (x.dims != rec.dims || x.channels != rec.channels)
      throw DimensionError("input image does not match the reconstruction shape");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      const double d = x.values[i] - rec.values[i];
      num += d * d;
      den += x.values[i] * x.values[i];
    }
    const double rel = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    std::cout.precision(17);
    std::cout << "relative_error=" << rel << "\n";
  }
  return 0;
}

int run_bench_cmd(const std::string& vary, const std::string& grid_text, int repeats,
                  const std::string& out_path, const std::string& size_text,
                  const std::string& filter_size, int filters, int images, int channels,
                  int outer, const CommonFlags& flags) {
  par::set_max_threads(flags.threads);
  BenchConfig cfg;
  cfg.vary = vary == "k" ? BenchVary::Filters : vary == "n" ? BenchVary::Images : BenchVary::Beta;
  std::stringstream ss(grid_text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) cfg.grid.push_back(std::stod(item));
  cfg.repeats = repeats;
  cfg.dims = parse_sizes(size_text);
  cfg.support = parse_sizes(filter_size);
  if (cfg.support.size() == 1 && cfg.dims.size() > 1)
    cfg.support.assign(cfg.dims.size(), cfg.support[0]);
  cfg.filters = filters;
  cfg.images = images;
  cfg.channels = channels;
  cfg.beta = flags.beta;
  cfg.outer_iters = outer;
  cfg.solver = solver_config(flags);
  cfg.solver.normalize = NormalizeMode::Global;

  const std::vector<BenchRow> rows = run_bench(cfg);
  if (out_path.empty()) {
    write_bench_csv(std::cout, rows);
  } else {
    std::ofstream os(out_path);
    if (!os) throw IoError("cannot open '" + out_path + "' for writing");
    write_bench_csv(os, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-domain convolutional sparse coding"};
  app.require_subcommand(1);

  CommonFlags learn_flags, encode_flags, recon_flags, bench_flags;

  auto* learn = app.add_subcommand("learn", "learn a dictionary from a directory of images");
  std::string learn_input, learn_out = "out", learn_filter_size = "11";
  int learn_filters = 16;
  learn->add_option("--input", learn_input, "directory of .png/.pgm images")->required();
  learn->add_option("--out", learn_out, "output directory");
  learn->add_option("--filters", learn_filters, "number of dictionary elements K")
      ->required()
      ->check(CLI::PositiveNumber);
  learn->add_option("--filter-size", learn_filter_size, "filter support m[,m2[,m3]]");
  learn->add_option("--channels", learn_flags.channels, "separate (gray) or joint (TCSC)")
      ->check(CLI::IsMember({"separate", "joint"}));
  add_solver_flags(learn, learn_flags);

  auto* encode = app.add_subcommand("encode", "infer sparse maps for one image");
  std::string enc_dict, enc_input, enc_out = "maps.csct";
  encode->add_option("--dict", enc_dict, "dictionary tensor (dict.csct)")->required();
  encode->add_option("--input", enc_input, "image to encode")->required();
  encode->add_option("--out", enc_out, "output maps tensor");
  add_solver_flags(encode, encode_flags);

  auto* recon = app.add_subcommand("reconstruct", "reconstruct an image from sparse maps");
  std::string rec_dict, rec_maps, rec_out = "recon.png", rec_input;
  recon->add_option("--dict", rec_dict, "dictionary tensor")->required();
  recon->add_option("--maps", rec_maps, "maps tensor")->required();
  recon->add_option("--out", rec_out, "output PNG");
  recon->add_option("--input", rec_input, "original image; prints the relative error");
  add_solver_flags(recon, recon_flags);

  auto* bench = app.add_subcommand("bench", "scaling benchmark over k, n or beta");
  std::string bench_vary, bench_grid, bench_out, bench_size = "64,64", bench_fsize = "11";
  int bench_repeats = 3, bench_filters = 8, bench_images = 2, bench_channels = 1,
      bench_outer = 3;
  bench->add_option("--vary", bench_vary, "varied parameter")
      ->required()
      ->check(CLI::IsMember({"k", "n", "beta"}));
  bench->add_option("--grid", bench_grid, "comma-separated grid values")->required();
  bench->add_option("--repeats", bench_repeats, "repeats per grid value")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_out, "CSV path (stdout when omitted)");
  bench->add_option("--size", bench_size, "signal grid n1[,n2[,n3]]");
  bench->add_option("--filter-size", bench_fsize, "filter support");
  bench->add_option("--filters", bench_filters, "fixed K")->check(CLI::PositiveNumber);
  bench->add_option("--images", bench_images, "fixed N")->check(CLI::PositiveNumber);
  bench->add_option("--channels", bench_channels, "synthetic channel count J")
      ->check(CLI::PositiveNumber);
  bench->add_option("--outer", bench_outer, "measured outer iterations")
      ->check(CLI::PositiveNumber);
  bench_flags.seed = 7;
  add_solver_flags(bench, bench_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (learn->parsed())
      return run_learn(learn_input, learn_out, learn_filters, learn_filter_size, learn_flags);
    if (encode->parsed()) return run_encode(enc_dict, enc_input, enc_out, encode_flags);
    if (recon->parsed())
      return run_reconstruct(rec_dict, rec_maps, rec_out, rec_input, recon_flags);
    if (bench->parsed())
      return run_bench_cmd(bench_vary, bench_grid, bench_repeats, bench_out, bench_size,
                           bench_fsize, bench_filters, bench_images, bench_channels,
                           bench_outer, bench_flags);
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad arguments: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 1;
}

#include "cli.hpp"

#include "oamfso/channel_analysis.hpp"
#include "oamfso/channel_bank.hpp"
#include "oamfso/simulate.hpp"
#include "oamfso/stcode.hpp"
#include "oamfso/turbulence.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#ifndef OAMFSO_VERSION
#define OAMFSO_VERSION "unknown"
#endif

namespace oamfso::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json fingerprint(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  std::uint64_t bytes = 0;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    bytes += static_cast<std::uint64_t>(is.gcount());
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return {{"path", path.string()}, {"bytes", bytes}, {"fnv1a64", hex}};
}

json resolved_options(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    const auto& res = opt->results();
    if (!res.empty()) {
      cfg[name] = res.back();
    } else if (!opt->get_default_str().empty()) {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

struct Common {
  std::uint64_t seed = 1;
  int threads = 1;
  bool allow_flags = false;
  std::string manifest;
  std::string config;
};

struct Run {
  std::string command;
  const CLI::App* sub = nullptr;
  const Common* common = nullptr;
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
  std::vector<fs::path> inputs;
  json results = json::object();
  json flags = json::array();

  void write(const std::string& output) const {
    fs::path path = common->manifest;
    if (path.empty()) path = output.empty() ? fs::path(command + ".manifest.json") : fs::path(output + ".manifest.json");
    json m;
    m["command"] = command;
    m["tool_version"] = version();
    m["master_seed"] = common->seed;
    m["threads"] = common->threads;
    m["config"] = resolved_options(*sub);
    json in = json::array();
    for (const auto& p : inputs) in.push_back(fingerprint(p));
    m["inputs"] = in;
    if (!output.empty() && fs::exists(output)) m["output"] = fingerprint(output);
    m["results"] = results;
    m["flags"] = flags;
    m["started"] = iso_time(started);
    m["finished"] = iso_time(std::chrono::system_clock::now());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write manifest " + path.string());
    os << m.dump(2) << '\n';
  }

  int exit_code() const {
    if (flags.empty() || common->allow_flags) return kOk;
    for (const auto& f : flags) std::cerr << "flag: " << f.get<std::string>() << '\n';
    std::cerr << "rerun with --allow-flags to accept flagged results\n";
    return kFlagRaised;
  }
};

struct TurbulenceOpts {
  double cn2 = 1e-14;
  double inner = 5e-3;
  double outer = 20.0;
  std::string outer_form = "inverse-square";

  void add(CLI::App* app) {
    app->add_option("--cn2", cn2, "Refractive-index structure constant, m^-2/3");
    app->add_option("--l0", inner, "Inner scale, m");
    app->add_option("--L0", outer, "Outer scale, m");
    app->add_option("--outer-form", outer_form, "inverse-square or inverse-linear")
        ->check(CLI::IsMember({"inverse-square", "inverse-linear"}));
  }
  TurbulenceParams params() const {
    TurbulenceParams p{cn2, inner, outer,
                       outer_form == "inverse-linear" ? OuterScaleForm::inverse_linear
                                                      : OuterScaleForm::inverse_square};
    p.validate();
    return p;
  }
};

struct GeometryOpts {
  int n = 512;
  double dx = 5e-3;
  double z = 1000.0;
  double wavelength = 1550e-9;
  double waist = 1.6e-2;
  std::string placement = "end";
  int substeps = 1;
  bool absorber = false;

  void add(CLI::App* app, bool beam) {
    app->add_option("--n", n, "Grid points per side (power of two)");
    app->add_option("--dx", dx, "Grid spacing, m");
    app->add_option("--z", z, "Path length, m");
    app->add_option("--lambda", wavelength, "Wavelength, m");
    if (!beam) return;
    app->add_option("--waist", waist, "Beam waist w0, m");
    app->add_option("--placement", placement, "Screen position within a slab: end or center")
        ->check(CLI::IsMember({"end", "center"}));
    app->add_option("--substeps", substeps, "Vacuum sub-steps per slab");
    app->add_flag("--absorber", absorber, "Raised-cosine edge absorber");
  }
  GridSpec grid() const {
    GridSpec g{n, dx};
    g.validate();
    return g;
  }
  LinkParams link() const {
    LinkParams l;
    l.z_total = z;
    l.beam = BeamParams(waist, wavelength);
    l.grid = grid();
    l.placement = placement == "center" ? Placement::slab_center : Placement::slab_end;
    l.substeps_per_slab = substeps;
    l.edge_absorber = absorber;
    l.validate();
    return l;
  }
};

std::string charges_text(const std::vector<int>& charges) {
  std::ostringstream os;
  os << ModeSet(charges);
  return os.str();
}

CodeVariant parse_variant(const std::string& s) {
  return s == "printed" ? CodeVariant::printed : CodeVariant::standard;
}

// ---- commands --------------------------------------------------------------

int cmd_rytov(Run& run, const TurbulenceOpts& t, const GeometryOpts& g) {
  const RytovResult r = rytov_variance(t.params(), g.wavelength, g.z);
  const char* label = r.regime == TurbulenceRegime::weak ? "weak" : "strong";
  std::printf("sigma_R^2 = %.9g (%s)\n", r.variance, label);
  if (r.on_boundary)
    std::printf("note: sigma_R^2 is exactly 1, the weak/strong boundary; weak requires < 1, so this is strong\n");
  run.results = {{"rytov_variance", r.variance}, {"regime", label}, {"on_boundary", r.on_boundary}};
  run.write("");
  return run.exit_code();
}

int cmd_gen_screens(Run& run, const TurbulenceOpts& t, const GeometryOpts& g, int count,
                    const std::string& out) {
  if (count < 1) throw std::invalid_argument("--count must be >= 1");
  const GridSpec grid = g.grid();
  ScreenBank bank;
  bank.grid = grid;
  bank.params = t.params();
  bank.master_seed = run.common->seed;
  const ScreenStack stack = gen_screen_stack(grid, bank.params, g.wavelength, g.z, count, bank.master_seed);
  bank.spacing = stack.spacing;
  bank.screens = stack.screens;
  write_screen_bank(out, bank);
  run.results = {{"screens", count}, {"spacing_m", stack.spacing}};
  run.write(out);
  return run.exit_code();
}

int cmd_gen_channels(Run& run, const TurbulenceOpts& t, const GeometryOpts& g, const std::string& charges,
                     int realizations, int screens, bool quiet, const std::string& out) {
  if (realizations < 1) throw std::invalid_argument("--count must be >= 1");
  BankConfig cfg;
  cfg.charges = parse_int_list(charges);
  ModeSet check(cfg.charges);  // rejects duplicates
  cfg.link = g.link();
  cfg.turbulence = t.params();
  cfg.screens = screens;
  cfg.realizations = realizations;
  cfg.master_seed = run.common->seed;
  cfg.threads = run.common->threads;
  std::size_t done = 0;
  std::mutex mu;
  const std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(realizations) / 10);
  const auto progress = [&](std::size_t) {
    std::lock_guard lock(mu);
    ++done;
    if (!quiet && (done % step == 0 || done == static_cast<std::size_t>(realizations)))
      std::fprintf(stderr, "gen-channels: %zu/%d\n", done, realizations);
  };
  const ChannelEnsemble bank = generate_channel_bank(cfg, progress);
  write_channel_bank(out, bank);
  run.results = {{"charges", cfg.charges}, {"realizations", realizations}, {"screens", screens}};
  run.write(out);
  return run.exit_code();
}

int cmd_mdl_map(Run& run, const std::string& bank_path, const std::string& out) {
  run.inputs.push_back(bank_path);
  const ChannelEnsemble bank = read_channel_bank(bank_path);
  const Eigen::MatrixXd map = mdl_map(bank, run.common->threads);
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  write_mdl_map_csv(os, bank.charges, map);
  os.close();
  for (Eigen::Index i = 0; i < map.rows(); ++i)
    for (Eigen::Index j = 0; j < map.cols(); ++j)
      if (i != j && !std::isfinite(map(i, j))) {
        run.flags.push_back("rank-deficient pair " + charges_text({bank.charges[i], bank.charges[j]}));
      }
  run.results = {{"charges", bank.charges}, {"realizations", bank.size()}};
  run.write(out);
  return run.exit_code();
}

int cmd_select_modes(Run& run, const std::string& bank_path, int m, const std::string& out) {
  run.inputs.push_back(bank_path);
  const ChannelEnsemble bank = read_channel_bank(bank_path);
  const ModeSelection sel = select_modes(bank, m, run.common->threads);
  const std::string modes = charges_text(sel.modes.charges());
  std::printf("M=%d cn2=%g modes=%s mean_mdl_db=%.6f stderr_db=%.6f crosstalk=%.6f ensemble=%zu used=%zu "
              "excluded=%zu searched=%zu tie_break=crosstalk,lexicographic\n",
              m, bank.fingerprint.cn2, modes.c_str(), sel.stats.mean_db, sel.stats.stderr_db, sel.crosstalk,
              bank.size(), sel.stats.used, sel.stats.excluded, sel.subsets_searched);
  run.results = {{"m", m},
                 {"cn2", bank.fingerprint.cn2},
                 {"ensemble_size", bank.size()},
                 {"tie_break", "smaller mean crosstalk, then lexicographic charges"},
                 {"modes", sel.modes.charges()},  {"mean_mdl_db", sel.stats.mean_db},
                 {"stderr_db", sel.stats.stderr_db}, {"crosstalk", sel.crosstalk},
                 {"used", sel.stats.used},          {"excluded", sel.stats.excluded},
                 {"subsets_searched", sel.subsets_searched}};
  if (sel.stats.excluded > 0)
    run.flags.push_back(std::to_string(sel.stats.excluded) + " rank-deficient realizations excluded");
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << run.results.dump(2) << '\n';
  }
  run.write(out);
  return run.exit_code();
}

struct BerOpts {
  std::string bank;
  std::string modes;
  std::string code = "uncoded";
  std::string variant = "standard";
  int m = 0;
  std::string snr = "0:2:20";
  std::uint64_t min_errors = 100;
  double max_bits = 1e7;
  int batch = 1000;
  std::string out;
  std::string node_log;
};

int cmd_ber(Run& run, const BerOpts& o) {
  SimConfig cfg;
  cfg.snr_db = parse_double_list(o.snr);
  cfg.min_bit_errors = o.min_errors;
  if (!(o.max_bits >= 1.0)) throw std::invalid_argument("--max-bits must be >= 1");
  cfg.max_bits = static_cast<std::uint64_t>(o.max_bits);
  cfg.batch_codewords = o.batch;
  cfg.master_seed = run.common->seed;
  cfg.threads = run.common->threads;
  cfg.record_nodes = !o.node_log.empty();

  const CodeName name = parse_code_name(o.code);
  std::vector<int> charges;
  if (!o.modes.empty()) charges = parse_int_list(o.modes);
  int m = o.m;
  if (m == 0 && !charges.empty()) m = static_cast<int>(charges.size());
  cfg.code = CodeSpec::make(name, name == CodeName::uncoded ? (m == 0 ? 2 : m) : m, parse_variant(o.variant));

  json channel;
  if (!o.bank.empty()) {
    if (charges.empty()) throw std::invalid_argument("--modes is required with --bank");
    if (static_cast<int>(charges.size()) != cfg.code.modes)
      throw std::invalid_argument("--modes size does not match the code's mode count");
    run.inputs.push_back(o.bank);
    const ChannelEnsemble bank = read_channel_bank(o.bank);
    double scale = 0.0;
    cfg.channels = prepare_channels(bank, ModeSet(charges), &scale);
    channel = {{"source", o.bank},
               {"realizations", bank.size()},
               {"cn2", bank.fingerprint.cn2},
               {"z", bank.fingerprint.z},
               {"bank_seed", bank.fingerprint.master_seed},
               {"placement", bank.fingerprint.placement == Placement::slab_center ? "center" : "end"},
               {"normalization", "mean ||H||_F^2 / M = 1"},
               {"scale", scale}};
  } else {
    channel = {{"source", "identity"}};
  }

  const auto points = run_sweep(cfg);
  std::ofstream os(o.out);
  if (!os) throw std::runtime_error("cannot write " + o.out);
  write_ber_csv(os, points);
  os.close();
  if (cfg.record_nodes) {
    std::ofstream nodes(o.node_log);
    if (!nodes) throw std::runtime_error("cannot write " + o.node_log);
    write_node_csv(nodes, points);
  }

  json pts = json::array();
  for (const auto& p : points) {
    pts.push_back({{"snr_db", p.snr_db}, {"ber", p.ber}, {"ber_stderr", p.ber_stderr}, {"wall_seconds", p.wall_seconds},
                   {"mean_nodes", p.mean_nodes}, {"fallback_decodes", p.fallback_decodes}});
    if (p.capped) run.flags.push_back("cap hit at " + std::to_string(p.snr_db) + " dB");
    if (p.fallback_decodes > 0)
      run.flags.push_back("rank-deficient channel at " + std::to_string(p.snr_db) + " dB");
  }
  run.results = {{"code", std::string(to_string(cfg.code.name))},
                 {"variant", o.variant},
                 {"modes", charges},
                 {"channel", channel},
                 {"snr_definition", "Es/N0, Es = 1"},
                 {"points", pts}};
  if (cfg.record_nodes) run.results["node_log"] = o.node_log;
  run.write(o.out);
  return run.exit_code();
}

int cmd_mindet(Run& run, const std::string& code, const std::string& variant, std::size_t pairs,
               const std::string& out) {
  const CodeSpec spec = CodeSpec::make(parse_code_name(code), 0, parse_variant(variant));
  if (spec.name == CodeName::uncoded) throw std::invalid_argument("mindet needs a space-time code");
  // 4^9 TAST codewords are too many for all pairs; probe random pairs instead.
  const bool exhaustive = spec.symbols <= 8;
  const DeterminantReport r =
      exhaustive ? codebook_determinants(spec) : sampled_determinants(spec, pairs, run.common->seed);
  const char* method = exhaustive ? "exhaustive" : "sampled";
  std::printf("code=%s method=%s min_abs_det=%.12g min_determinant=%.12g energy_per_use=%.12g codewords=%zu "
              "distinct=%zu\n",
              code.c_str(), method, r.min_abs_det, r.min_determinant, r.energy_per_use, r.codewords,
              r.distinct_codewords);
  run.results = {{"code", code},
                 {"variant", variant},
                 {"method", method},
                 {"min_abs_det", r.min_abs_det},
                 {"min_determinant", r.min_determinant},
                 {"energy_per_use", r.energy_per_use},
                 {"codewords", r.codewords},
                 {"distinct_codewords", r.distinct_codewords}};
  if (!(r.min_abs_det > 1e-12)) run.flags.push_back("vanishing determinant: code is not full diversity");
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << run.results.dump(2) << '\n';
  }
  run.write(out);
  return run.exit_code();
}

// Config-file lines go in front of the user's own arguments, so flags given
// on the command line win (options take the last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      config = config_arguments(args[i + 1]);
    } else if (a.rfind("--config=", 0) == 0) {
      config = config_arguments(a.substr(9));
    }
  }
  if (config.empty() || args.size() < 2) return args;
  out.push_back(args[0]);
  out.push_back(args[1]);
  out.insert(out.end(), config.begin(), config.end());
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace

std::string version() { return OAMFSO_VERSION; }

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty integer list");
  const auto colon = t.find(':', 1);
  if (colon != std::string::npos) {
    const int a = to_int(trim(t.substr(0, colon)));
    const int b = to_int(trim(t.substr(colon + 1)));
    if (b < a) throw std::invalid_argument("empty range " + t);
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  for (const auto& s : split(t, ',')) out.push_back(to_int(s));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty number list");
  const auto parts = split(t, ':');
  if (parts.size() == 3) {
    const double a = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double b = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw std::invalid_argument("bad range " + t);
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  if (parts.size() != 1) throw std::invalid_argument("expected start:step:stop or a comma list: " + t);
  for (const auto& s : split(t, ',')) out.push_back(to_double(s));
  return out;
}

std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || key == "config")
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad key");
    out.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return out;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

int run(const std::vector<std::string>& raw_args) {
  CLI::App app{"OAM free-space optical link simulator"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Master seed; the only source of randomness");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--allow-flags", common.allow_flags, "Exit 0 even if a cap-hit or rank-deficiency flag fired");
    sub->add_option("--manifest", common.manifest, "Manifest path (default: <output>.manifest.json)");
    sub->add_option("--config", common.config, "key=value file; command-line flags override it");
  };

  TurbulenceOpts turb;
  GeometryOpts geom;
  int count = 20;
  int realizations = 1000;
  int m = 2;
  bool quiet = false;
  std::string charges = "-10:10";
  std::string bank;
  std::string out;
  std::string code = "golden";
  std::string variant = "standard";
  BerOpts ber;

  auto* rytov = app.add_subcommand("rytov", "Rytov variance and weak/strong classification");
  turb.add(rytov);
  rytov->add_option("--lambda", geom.wavelength, "Wavelength, m");
  rytov->add_option("--z", geom.z, "Path length, m");
  add_common(rytov);

  auto* screens = app.add_subcommand("gen-screens", "Phase-screen bank for one path");
  turb.add(screens);
  geom.add(screens, false);
  screens->add_option("--count", count, "Screens along the path");
  screens->add_option("--out", out, "Output .oams file")->required();
  add_common(screens);

  auto* channels = app.add_subcommand("gen-channels", "Channel-matrix bank by split-step propagation");
  turb.add(channels);
  geom.add(channels, true);
  channels->add_option("--charges", charges, "Topological charges, a:b or a,b,...");
  channels->add_option("--count", realizations, "Realizations");
  channels->add_option("--screens", count, "Phase screens per realization");
  channels->add_flag("--quiet", quiet, "No progress output");
  channels->add_option("--out", out, "Output .oamh file")->required();
  add_common(channels);

  auto* map = app.add_subcommand("mdl-map", "Pairwise average MDL map as CSV");
  map->add_option("--bank", bank, "Channel bank")->required();
  map->add_option("--out", out, "Output CSV")->required();
  add_common(map);

  auto* select = app.add_subcommand("select-modes", "Minimum average-MDL mode subset");
  select->add_option("--bank", bank, "Channel bank")->required();
  select->add_option("--m", m, "Subset size")->check(CLI::PositiveNumber);
  select->add_option("--out", out, "Optional JSON result");
  add_common(select);

  auto* bersub = app.add_subcommand("ber", "Monte Carlo BER sweep");
  bersub->add_option("--bank", ber.bank, "Channel bank (default: identity channel)");
  bersub->add_option("--modes", ber.modes, "Mode set drawn from the bank");
  bersub->add_option("--code", ber.code, "uncoded, golden, silver or tast3");
  bersub->add_option("--variant", ber.variant, "standard or printed")
      ->check(CLI::IsMember({"standard", "printed"}));
  bersub->add_option("--m", ber.m, "Mode count for uncoded runs without a bank");
  bersub->add_option("--snr", ber.snr, "SNR grid in dB, start:step:stop or a,b,...");
  bersub->add_option("--min-errors", ber.min_errors, "Bit errors per point");
  bersub->add_option("--max-bits", ber.max_bits, "Bit cap per point");
  bersub->add_option("--batch", ber.batch, "Codewords per committed batch");
  bersub->add_option("--out", ber.out, "Output CSV")->required();
  bersub->add_option("--node-log", ber.node_log, "Per-codeword decoder node counts CSV (debug)");
  add_common(bersub);

  auto* mindet = app.add_subcommand("mindet", "Brute-force minimum determinant of a code");
  mindet->add_option("--code", code, "golden, silver or tast3");
  mindet->add_option("--variant", variant, "standard or printed")->check(CLI::IsMember({"standard", "printed"}));
  std::size_t pairs = 100000;
  mindet->add_option("--pairs", pairs, "Random pairs for codebooks too large to enumerate");
  mindet->add_option("--out", out, "Optional JSON result");
  add_common(mindet);

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code_out = app.exit(e);
    return code_out == 0 ? kOk : kUsage;
  }

  Run run;
  run.common = &common;
  try {
    if (*rytov) {
      run.command = "rytov";
      run.sub = rytov;
      return cmd_rytov(run, turb, geom);
    }
    if (*screens) {
      run.command = "gen-screens";
      run.sub = screens;
      return cmd_gen_screens(run, turb, geom, count, out);
    }
    if (*channels) {
      run.command = "gen-channels";
      run.sub = channels;
      return cmd_gen_channels(run, turb, geom, charges, realizations, count, quiet, out);
    }
    if (*map) {
      run.command = "mdl-map";
      run.sub = map;
      return cmd_mdl_map(run, bank, out);
    }
    if (*select) {
      run.command = "select-modes";
      run.sub = select;
      return cmd_select_modes(run, bank, m, out);
    }
    if (*bersub) {
      run.command = "ber";
      run.sub = bersub;
      return cmd_ber(run, ber);
    }
    run.command = "mindet";
    run.sub = mindet;
    return cmd_mindet(run, code, variant, pairs, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace oamfso::cli

// hwbf: command-line front end for the handwriting Bayes-factor pipeline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hwbf/hwbf.hpp"

namespace {

using namespace hwbf;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

/// Primary artifact to a file, or to stdout when no path is given.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

Dataset load_dataset(const std::string& path) { return parse_dataset(read_file(path)); }

Json load_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::BadValue, path + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Flat `key = value` config: every line becomes `--key=value` ahead of the
// command-line flags, which therefore win.
std::vector<std::string> config_args(const std::string& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto t = std::string(detail::trim(line));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = std::string(detail::trim(std::string_view(t).substr(0, eq)));
    const auto value = std::string(detail::trim(std::string_view(t).substr(eq + 1)));
    if (key.empty() || key == "config" || key == "resolved") {
      throw UsageError(path + ":" + std::to_string(line_no) + ": key '" + key + "' not allowed");
    }
    if (value.empty()) {
      out.push_back("--" + key);
      out.push_back("");
    } else {
      out.push_back("--" + key + "=" + value);
    }
  }
  return out;
}

/// Options of one subcommand with string renderers for the resolved config.
class Registry {
 public:
  explicit Registry(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    entries_.emplace_back(name, [&var] { return render(var); });
    return app_->add_option("--" + name, var, help);
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    entries_.emplace_back(name, [&var] { return std::string(var ? "true" : "false"); });
    return app_->add_flag("--" + name, var, help);
  }

  std::string resolved() const {
    std::string out;
    for (const auto& [k, f] : entries_) out += k + " = " + f() + "\n";
    return out;
  }

  CLI::App* app() const { return app_; }

 private:
  static std::string render(const std::string& v) { return v; }
  static std::string render(int v) { return std::to_string(v); }
  static std::string render(std::uint64_t v) { return std::to_string(v); }
  static std::string render(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  }

  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> entries_;
};

struct Common {
  std::uint64_t seed = 1;
  int jobs = default_jobs();
  std::string out;
  std::string resolved;

  void add(Registry& r) {
    r.add("seed", seed, "Seed for every random stream");
    r.add("jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    r.add("out", out, "Primary output file (stdout when empty)");
    r.app()->add_option("--resolved", resolved, "Where to write the resolved config");
  }

  /// Default location: next to --out, else in the working directory.
  std::string resolved_path(const std::string& sub) const {
    if (!resolved.empty()) return resolved;
    if (!out.empty()) return out + ".config";
    return "hwbf-" + sub + ".config";
  }
};

struct McOptions {
  int runs = 10;
  int iterations = 2000;
  int burn_in = 1000;
  int chains = 1;
  bool warp = false;
  double tol = 1e-10;
  int max_iter = 1000;
  bool independence = true;

  void add(Registry& r) {
    r.add("runs", runs, "Independent sampler + bridge runs per marginal")->check(CLI::PositiveNumber);
    r.add("iterations", iterations, "Kept draws per chain");
    r.add("burn-in", burn_in, "Burn-in iterations per chain");
    r.add("chains", chains, "Chains per run");
    r.flag("warp", warp, "Mean-reflection warp in the bridge estimator");
    r.add("tol", tol, "Bridge convergence tolerance on log m");
    r.add("max-iter", max_iter, "Bridge iteration cap");
    r.flag("independence", independence, "Inverse-Wishart independence move in the LKJ sampler");
  }

  EvidenceSettings settings(std::uint64_t seed, int jobs) const {
    EvidenceSettings s;
    s.runs = runs;
    s.sampler.iterations = iterations;
    s.sampler.burn_in = burn_in;
    s.sampler.chains = chains;
    s.sampler.independence_move = independence;
    s.bridge.warp = warp;
    s.bridge.tol = tol;
    s.bridge.max_iter = max_iter;
    s.seed = seed;
    s.jobs = jobs;
    return s;
  }
};

struct ElicitFlags {
  double nu = kFeatures + 2.0;
  double eta = 1.0;
  std::string sigma_rule = "as-printed";

  void add(Registry& r) {
    r.add("nu", nu, "Inverse-Wishart degrees of freedom");
    r.add("eta", eta, "LKJ shape");
    r.add("sigma-rule", sigma_rule, "LogNormal scale rule")->check(CLI::IsMember({"as-printed", "sample-sd"}));
  }

  ElicitOptions options() const {
    ElicitOptions o;
    o.nu = nu;
    o.eta = eta;
    o.sigma_rule = sigma_rule == "sample-sd" ? SigmaRule::SampleSd : SigmaRule::AsPrinted;
    return o;
  }
};

std::vector<ModelId> parse_models(const std::string& list) {
  std::vector<ModelId> out;
  std::string item;
  std::istringstream in(list);
  while (std::getline(in, item, ',')) {
    const auto t = std::string(detail::trim(item));
    if (t.empty()) continue;
    if (t == "all") {
      out.assign(kAllModels.begin(), kAllModels.end());
      continue;
    }
    try {
      out.push_back(parse_model(t));
    } catch (const Error&) {
      throw UsageError("unknown model '" + t + "'");
    }
  }
  if (out.empty()) throw UsageError("no models given");
  return out;
}

ModelId parse_one_model(const std::string& s) {
  const auto v = parse_models(s);
  if (v.size() != 1) throw UsageError("expected exactly one model, got '" + s + "'");
  return v.front();
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(list);
  while (std::getline(in, item, ',')) {
    const auto t = std::string(detail::trim(item));
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + t + "'");
    }
  }
  return out;
}

Json feature_vector_json(const FeatureVector& f) {
  Json j = Json::object();
  for (int k = 0; k < kFeatures; ++k) j[std::string(kFeatureNames[k])] = num(f(k));
  return j;
}

int exit_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return kUsage;
    case ErrorCategory::Data: return kData;
    case ErrorCategory::Numerical: return kNumerical;
  }
  return kNumerical;
}

/// argv with config-file arguments spliced in after the subcommand words.
std::vector<std::string> expand_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config.empty()) return args;
  std::size_t at = 0;
  while (at < args.size() && !args[at].empty() && args[at][0] != '-') ++at;
  const auto extra = config_args(config);
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayes-factor evidence evaluation for handwriting loop features"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "hwbf 1.0");

  std::function<void()> action;
  std::function<std::string()> resolved_text;
  std::string sub_name;
  std::function<std::string()> resolved_path;

  const auto bind = [&](CLI::App* sub, Registry& reg, Common& common, std::string name,
                        std::function<void()> fn) {
    sub->callback([&, sub, name, fn, reg_ptr = &reg, common_ptr = &common] {
      (void)sub;
      action = fn;
      sub_name = name;
      resolved_text = [reg_ptr] { return reg_ptr->resolved(); };
      resolved_path = [common_ptr, name] { return common_ptr->resolved_path(name); };
    });
  };

  // synth -------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic population CSV");
  Registry synth_reg(synth_cmd);
  Common synth_common;
  int synth_writers = 13, synth_chars = 4, synth_reps = 30;
  std::string synth_truth;
  synth_common.add(synth_reg);
  synth_reg.add("writers", synth_writers, "Number of writers");
  synth_reg.add("characters", synth_chars, "Number of characters (a, d, o, q)");
  synth_reg.add("reps", synth_reps, "Repetitions per writer and character");
  synth_reg.add("truth", synth_truth, "Optional JSON file for the generating parameters");
  bind(synth_cmd, synth_reg, synth_common, "synth", [&] {
    auto cfg = synth::default_config(synth_common.seed);
    if (synth_chars != cfg.characters) {
      if (synth_chars < 1 || synth_chars > cfg.characters) throw UsageError("--characters must be 1..4");
      cfg.characters = synth_chars;
      cfg.between.resize(static_cast<std::size_t>(synth_chars));
      cfg.character_offsets.resize(static_cast<std::size_t>(synth_chars));
    }
    cfg.writers = synth_writers;
    cfg.reps_min = cfg.reps_max = synth_reps;
    const auto pop = synth::generate_population(cfg);
    emit(synth_common.out, to_csv(pop.data));
    if (!synth_truth.empty()) write_file(synth_truth, dump(to_json(pop)));
  });

  // elicit ------------------------------------------------------------------
  auto* elicit_cmd = app.add_subcommand("elicit", "Elicit prior hyperparameters from background data");
  Registry elicit_reg(elicit_cmd);
  Common elicit_common;
  ElicitFlags elicit_flags;
  std::string elicit_model = "M1", elicit_bg;
  elicit_common.add(elicit_reg);
  elicit_reg.add("model", elicit_model, "Model M1..M6");
  elicit_reg.add("background", elicit_bg, "Background CSV")->required();
  elicit_flags.add(elicit_reg);
  bind(elicit_cmd, elicit_reg, elicit_common, "elicit", [&] {
    const ModelId m = parse_one_model(elicit_model);
    const Dataset raw = load_dataset(elicit_bg);
    const Dataset bg = standardize(raw, raw);
    const auto h = elicit_priors(m, bg, elicit_flags.options());
    Json j;
    j["prior"] = to_json(h);
    j["feature_sd"] = feature_vector_json(*bg.scaling());
    emit(elicit_common.out, dump(j));
  });

  // contour -----------------------------------------------------------------
  auto* contour_cmd = app.add_subcommand("contour", "Fourier contour utilities");
  contour_cmd->require_subcommand(1);
  auto* render_cmd = contour_cmd->add_subcommand("render", "Render coefficients to a polar contour");
  Registry render_reg(render_cmd);
  Common render_common;
  std::string render_coeffs, render_svg;
  int render_points = 128;
  render_common.add(render_reg);
  render_reg.add("coeffs", render_coeffs, "Coefficient JSON {a0, pairs}")->required();
  render_reg.add("points", render_points, "Number of polar samples");
  render_reg.add("svg", render_svg, "Optional SVG file with the closed path");
  bind(render_cmd, render_reg, render_common, "contour-render", [&] {
    const auto c = coefficients_from_json(load_json(render_coeffs));
    const auto pc = contour::render_contour(c, render_points);
    pc.validate();
    emit(render_common.out, contour::to_csv(pc));
    if (!render_svg.empty()) write_file(render_svg, contour::to_svg(pc));
  });

  auto* fit_cmd = contour_cmd->add_subcommand("fit", "Least-squares Fourier fit of a polar contour");
  Registry fit_reg(fit_cmd);
  Common fit_common;
  std::string fit_polar;
  int fit_harmonics = 4;
  bool fit_normalize = false;
  fit_common.add(fit_reg);
  fit_reg.add("polar", fit_polar, "Polar contour CSV (phi,r)")->required();
  fit_reg.add("harmonics", fit_harmonics, "Number of harmonics");
  fit_reg.flag("normalize", fit_normalize, "Scale to unit area before fitting");
  bind(fit_cmd, fit_reg, fit_common, "contour-fit", [&] {
    auto pc = contour::parse_polar_csv(read_file(fit_polar));
    Json j;
    if (fit_normalize) {
      const auto n = contour::normalize_contour(pc);
      j["original_area"] = n.original_area;
      pc = n.contour;
    } else {
      j["area"] = contour::surface_area(pc);
    }
    j["coefficients"] = to_json(contour::fit_coefficients(pc, fit_harmonics));
    emit(fit_common.out, dump(j));
  });

  auto* feat_cmd = contour_cmd->add_subcommand("features", "Feature vector (S, a1..b4) of a raw polar contour");
  Registry feat_reg(feat_cmd);
  Common feat_common;
  std::string feat_polar;
  feat_common.add(feat_reg);
  feat_reg.add("polar", feat_polar, "Polar contour CSV (phi,r)")->required();
  bind(feat_cmd, feat_reg, feat_common, "contour-features", [&] {
    const auto pc = contour::parse_polar_csv(read_file(feat_polar));
    emit(feat_common.out, dump(feature_vector_json(contour::features_from_contour(pc))));
  });

  // evidence ----------------------------------------------------------------
  auto* ev_cmd = app.add_subcommand("evidence", "Bayes factor of same source against different sources");
  Registry ev_reg(ev_cmd);
  Common ev_common;
  McOptions ev_mc;
  ElicitFlags ev_el;
  std::string ev_model = "M1", ev_q, ev_c, ev_bg;
  ev_common.add(ev_reg);
  ev_reg.add("model", ev_model, "Model M1..M6");
  ev_reg.add("questioned", ev_q, "Questioned-document CSV")->required();
  ev_reg.add("control", ev_c, "Control (person of interest) CSV")->required();
  ev_reg.add("background", ev_bg, "Background CSV")->required();
  ev_mc.add(ev_reg);
  ev_el.add(ev_reg);
  bind(ev_cmd, ev_reg, ev_common, "evidence", [&] {
    const ModelId m = parse_one_model(ev_model);
    const auto s = ev_mc.settings(ev_common.seed, ev_common.jobs);
    const auto r = bayes_factor(m, load_dataset(ev_q), load_dataset(ev_c), load_dataset(ev_bg), s, ev_el.options());
    emit(ev_common.out, dump(to_json(r)));
  });

  // compare-models ----------------------------------------------------------
  auto* cmp_cmd = app.add_subcommand("compare-models", "Bayes factor between two models for one writer");
  Registry cmp_reg(cmp_cmd);
  Common cmp_common;
  McOptions cmp_mc;
  ElicitFlags cmp_el;
  std::string cmp_num = "M4", cmp_den = "M1", cmp_data, cmp_bg;
  int cmp_writer = -1;
  cmp_common.add(cmp_reg);
  cmp_reg.add("numerator", cmp_num, "Model in the numerator");
  cmp_reg.add("denominator", cmp_den, "Model in the denominator");
  cmp_reg.add("data", cmp_data, "CSV with the writer's data (or a full population with --writer)")->required();
  cmp_reg.add("writer", cmp_writer, "Writer id inside --data; the other writers form the background");
  cmp_reg.add("background", cmp_bg, "Background CSV when --writer is not used");
  cmp_mc.add(cmp_reg);
  cmp_el.add(cmp_reg);
  bind(cmp_cmd, cmp_reg, cmp_common, "compare-models", [&] {
    const Dataset all = load_dataset(cmp_data);
    Dataset di, bg;
    if (cmp_writer >= 0) {
      if (!all.has_writer(cmp_writer)) throw Error(ErrorKind::UnknownWriter, std::to_string(cmp_writer));
      di = all.only_writer(cmp_writer);
      bg = background_excluding(all, {cmp_writer});
    } else {
      if (cmp_bg.empty()) throw UsageError("give --writer or --background");
      di = all;
      bg = load_dataset(cmp_bg);
    }
    const auto s = cmp_mc.settings(cmp_common.seed, cmp_common.jobs);
    const auto c = model_comparison_bf(di, bg, parse_one_model(cmp_num), parse_one_model(cmp_den), s, cmp_el.options());
    emit(cmp_common.out, dump(to_json(c)));
  });

  // study -------------------------------------------------------------------
  auto* study_cmd = app.add_subcommand("study", "Discrimination and sensitivity studies");
  Registry study_reg(study_cmd);
  Common study_common;
  McOptions study_mc;
  ElicitFlags study_el;
  study_mc.runs = 1;
  std::string study_kind, study_data, study_models = "all", study_json;
  int study_reps = 100, study_sub_iter = 30, study_pairs = 4;
  double pi_lo = 0.35, pi_hi = 0.65, sub_fraction = 0.5;
  bool per_char = true, log_cases = false, sub_replace = true;
  study_cmd->add_option("kind", study_kind, "same-writer | different-writer | subsample")
      ->required()
      ->check(CLI::IsMember({"same-writer", "different-writer", "subsample"}));
  study_common.add(study_reg);
  study_reg.add("data", study_data, "Population CSV")->required();
  study_reg.add("model", study_models, "Comma-separated models or 'all'");
  study_reg.add("reps", study_reps, "Repetitions per writer or pair");
  study_reg.add("pi-lo", pi_lo, "Lower bound of the questioned fraction");
  study_reg.add("pi-hi", pi_hi, "Upper bound of the questioned fraction");
  study_reg.flag("per-character", per_char, "Add single-character runs of the Normal models");
  study_reg.add("json", study_json, "Optional JSON report");
  study_reg.add("subsample-fraction", sub_fraction, "Background fraction per cell (subsample study)");
  study_reg.add("subsample-iterations", study_sub_iter, "Background resamples per case (subsample study)");
  study_reg.flag("subsample-replace", sub_replace, "Resample with replacement (subsample study)");
  study_reg.add("pairs", study_pairs, "Hardest writer pairs (subsample study)");
  study_reg.flag("log-cases", log_cases, "One stderr line per case");
  study_mc.add(study_reg);
  study_el.add(study_reg);
  bind(study_cmd, study_reg, study_common, "study", [&] {
    StudyConfig cfg;
    cfg.models = parse_models(study_models);
    cfg.per_character = per_char;
    cfg.repetitions = study_reps;
    cfg.pi_lo = pi_lo;
    cfg.pi_hi = pi_hi;
    cfg.seed = study_common.seed;
    cfg.evidence = study_mc.settings(study_common.seed, 1);
    cfg.elicit = study_el.options();
    cfg.subsample_fraction = sub_fraction;
    cfg.subsample_iterations = study_sub_iter;
    cfg.subsample_replace = sub_replace;
    cfg.sweep_pairs = study_pairs;
    cfg.jobs = study_common.jobs;
    cfg.log_cases = log_cases;
    const Dataset data = load_dataset(study_data);
    if (study_kind == "subsample") {
      const auto rep = run_subsample_sensitivity(data, cfg);
      emit(study_common.out, dump(to_json(rep)));
      for (const auto& [k, v] : rep.shift_rate) std::cerr << k << " shift rate " << format_number(v) << "\n";
      return;
    }
    const auto rep = study_kind == "same-writer" ? run_same_writer_study(data, cfg)
                                                 : run_different_writer_study(data, cfg);
    emit(study_common.out, study_csv(rep));
    if (!study_json.empty()) write_file(study_json, dump(to_json(rep)));
    std::cerr << study_summary(rep);
  });

  // sweep -------------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "Prior sensitivity sweeps over nu or eta");
  Registry sweep_reg(sweep_cmd);
  Common sweep_common;
  McOptions sweep_mc;
  ElicitFlags sweep_el;
  sweep_mc.runs = 1;
  std::string sweep_param, sweep_data, sweep_models = "all", sweep_values;
  int sweep_pairs = 4, sweep_splits = 10;
  double sw_pi_lo = 0.35, sw_pi_hi = 0.65;
  sweep_cmd->add_option("parameter", sweep_param, "nu | eta")->required()->check(CLI::IsMember({"nu", "eta"}));
  sweep_common.add(sweep_reg);
  sweep_reg.add("data", sweep_data, "Population CSV")->required();
  sweep_reg.add("model", sweep_models, "Comma-separated models or 'all'");
  sweep_reg.add("values", sweep_values, "Comma-separated parameter values (default 11,20,30,40,50 or 1,2,5,10,20)");
  sweep_reg.add("pairs", sweep_pairs, "Hardest writer pairs");
  sweep_reg.add("splits", sweep_splits, "Random questioned/control splits per pair");
  sweep_reg.add("pi-lo", sw_pi_lo, "Lower bound of the questioned fraction");
  sweep_reg.add("pi-hi", sw_pi_hi, "Upper bound of the questioned fraction");
  sweep_mc.add(sweep_reg);
  sweep_el.add(sweep_reg);
  bind(sweep_cmd, sweep_reg, sweep_common, "sweep", [&] {
    StudyConfig cfg;
    cfg.models = parse_models(sweep_models);
    cfg.seed = sweep_common.seed;
    cfg.evidence = sweep_mc.settings(sweep_common.seed, 1);
    cfg.elicit = sweep_el.options();
    cfg.sweep_pairs = sweep_pairs;
    cfg.sweep_splits = sweep_splits;
    cfg.pi_lo = sw_pi_lo;
    cfg.pi_hi = sw_pi_hi;
    cfg.jobs = sweep_common.jobs;
    if (!sweep_values.empty()) {
      (sweep_param == "nu" ? cfg.nu_values : cfg.eta_values) = parse_values(sweep_values);
    }
    const Dataset data = load_dataset(sweep_data);
    const auto rep = sweep_param == "nu" ? run_nu_sweep(data, cfg) : run_eta_sweep(data, cfg);
    emit(sweep_common.out, dump(to_json(rep)));
    std::cerr << sweep_summary(rep);
  });

  // mahalanobis -------------------------------------------------------------
  auto* mah_cmd = app.add_subcommand("mahalanobis", "Pairwise writer Mahalanobis distances");
  Registry mah_reg(mah_cmd);
  Common mah_common;
  std::string mah_data;
  int mah_hard = 4;
  mah_common.add(mah_reg);
  mah_reg.add("data", mah_data, "Population CSV")->required();
  mah_reg.add("hardest", mah_hard, "Number of closest pairs to list");
  bind(mah_cmd, mah_reg, mah_common, "mahalanobis", [&] {
    const auto mr = mahalanobis_matrix(load_dataset(mah_data));
    Json j = to_json(mr);
    j["hardest_pairs"] = Json::array();
    for (const auto& [a, b] : hardest_pairs(mr, mah_hard)) j["hardest_pairs"].push_back(Json::array({a, b}));
    emit(mah_common.out, dump(j));
  });

  try {
    auto args = expand_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (!action) throw UsageError("no subcommand");
    action();
    write_file(resolved_path(), resolved_text());
    return kOk;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const Error& e) {
    const char* label = e.category() == ErrorCategory::Usage  ? "usage error"
                        : e.category() == ErrorCategory::Data ? "data error"
                                                              : "numerical error";
    std::cerr << label << ": " << e.what() << "\n";
    return exit_for(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
}

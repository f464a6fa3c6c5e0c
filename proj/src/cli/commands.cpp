#include "smc/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "smc/cli/io.hpp"
#include "smc/error.hpp"
#include "smc/filters.hpp"
#include "smc/kalman.hpp"
#include "smc/lang/compile.hpp"
#include "smc/lang/parser.hpp"
#include "smc/summary.hpp"

namespace smc::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kZ975 = 1.959963984540054;
const std::vector<double> kLevels = {0.025, 0.5, 0.975};
const std::set<std::string> kAlgorithms = {"bootstrap", "auxiliary", "liu-west", "enkf", "kalman"};

struct LoadedModel {
  ModelGraph graph;
  ModelState state;
  std::vector<std::string> warnings;
};

std::size_t time_label(const ModelGraph& g, NodeId id, std::size_t t) {
  const auto index = g.node(id).index;
  return index ? static_cast<std::size_t>(*index) : t + 1;
}

LoadedModel load_model(const RunOptions& o, const Rng& root) {
  lang::CompileInputs inputs;
  if (!o.constants.empty()) inputs.constants = read_number_map(o.constants);
  if (!o.inits.empty()) inputs.inits = read_number_map(o.inits);
  if (!o.data.empty()) inputs.data = read_data_csv(o.data);
  if (!o.latent.empty()) inputs.latent = {o.latent};
  const auto source = lang::parse(read_text(o.model));
  LoadedModel m{lang::compile(source, inputs), {}, {}};
  m.warnings = m.graph.warnings();
  m.state = make_state(m.graph);
  for (const Node& n : m.graph.nodes())
    if (n.role == NodeRole::parameter && std::isnan(m.state.values[&n - m.graph.nodes().data()]))
      m.warnings.push_back("'" + n.name + "' has no initial value; drawn from its prior");
  Rng r = root.derive({stream::kInit});
  initialize(m.graph, m.state, r);
  return m;
}

std::vector<std::string> write_summary(const FilterResult& r, const std::string& algorithm, const ModelGraph& g,
                                       const fs::path& out) {
  CsvWriter w((out / "filter_summary.csv").string());
  const bool enkf_run = algorithm == "enkf";
  if (enkf_run)
    w.header({"t", "ess", "mean", "sd", "lower", "upper"});
  else
    w.header({"t", "ess", "mean", "q025", "q50", "q975"});
  const std::size_t slots = r.equally_weighted.slots();
  for (std::size_t slot = 0; slot < slots; ++slot) {
    const std::size_t t = slots == 1 ? r.time_points - 1 : slot;
    w.cell(time_label(g, r.latent[t], t)).cell(r.ess[t]);
    if (enkf_run) {
      const auto x = r.equally_weighted.column(slot);
      const double m = mean(x), sd = sample_sd(x);
      w.cell(m).cell(sd).cell(m - kZ975 * sd).cell(m + kZ975 * sd);
    } else {
      const auto x = r.weighted->column(slot);
      const auto wt = r.weighted->weights(slot);
      w.cell(weighted_mean(x, wt));
      for (double q : weighted_quantiles(x, wt, kLevels)) w.cell(q);
    }
    w.end_row();
  }
  w.close();
  return {"filter_summary.csv"};
}

std::vector<std::string> write_samples(const FilterResult& r, const ModelGraph& g, const fs::path& out,
                                       bool enkf_run) {
  std::vector<std::string> header = {"t", "particle", "x"};
  if (r.parameters)
    for (const auto& n : r.parameters->names) header.push_back(n);
  auto dump = [&](const std::string& name, const ParticleCloud& cloud, const ParticleCloud* params, bool weights) {
    CsvWriter w((out / name).string());
    auto h = header;
    if (weights) h.push_back("log_weight");
    w.header(h);
    for (std::size_t slot = 0; slot < cloud.slots(); ++slot) {
      const std::size_t t = cloud.slots() == 1 ? r.time_points - 1 : slot;
      const std::size_t label = time_label(g, r.latent[t], t);
      for (std::size_t k = 0; k < cloud.particles(); ++k) {
        w.cell(label).cell(k + 1).cell(cloud.value(slot, k));
        if (params)
          for (std::size_t i = 0; i < params->dim(); ++i) w.cell(params->value(slot, k, i));
        if (weights) w.cell(cloud.log_weight(slot, k));
        w.end_row();
      }
    }
    w.close();
  };
  if (enkf_run) {
    dump("samples.csv", r.equally_weighted, nullptr, false);
    return {"samples.csv"};
  }
  dump("samples_ew.csv", r.equally_weighted, r.parameters ? &r.parameters->equally_weighted : nullptr, false);
  dump("samples_w.csv", *r.weighted, r.parameters ? &r.parameters->weighted : nullptr, true);
  return {"samples_ew.csv", "samples_w.csv"};
}

std::vector<std::string> write_parameters(const ParameterSamples& p, std::size_t bins, const fs::path& out) {
  const std::size_t slot = p.weighted.slots() - 1;
  const auto wt = p.weighted.weights(slot);
  CsvWriter s((out / "param_summary.csv").string());
  s.header({"parameter", "mean", "sd", "q025", "q50", "q975"});
  CsvWriter h((out / "param_histograms.csv").string());
  h.header({"parameter", "lower", "upper", "weight"});
  for (std::size_t i = 0; i < p.names.size(); ++i) {
    const auto v = p.weighted.column(slot, i);
    s.cell(p.names[i]).cell(weighted_mean(v, wt)).cell(weighted_sd(v, wt));
    for (double q : weighted_quantiles(v, wt, kLevels)) s.cell(q);
    s.end_row();
    const Histogram hist = histogram(v, wt, bins);
    for (std::size_t b = 0; b < bins; ++b) {
      h.cell(p.names[i]).cell(hist.edges[b]).cell(hist.edges[b + 1]).cell(hist.counts[b]);
      h.end_row();
    }
  }
  s.close();
  h.close();
  return {"param_summary.csv", "param_histograms.csv"};
}

std::vector<std::string> write_kalman(const KalmanResult& k, const ModelGraph& g, const std::vector<NodeId>& latent,
                                      const fs::path& out) {
  CsvWriter w((out / "filter_summary.csv").string());
  w.header({"t", "mean", "sd", "q025", "q50", "q975"});
  for (std::size_t t = 0; t < k.steps.size(); ++t) {
    const double m = k.steps[t].mean[0];
    const double sd = std::sqrt(k.steps[t].cov(0, 0));
    w.cell(time_label(g, latent[t], t))
        .cell(m)
        .cell(sd)
        .cell(m - kZ975 * sd)
        .cell(m)
        .cell(m + kZ975 * sd);
    w.end_row();
  }
  w.close();
  return {"filter_summary.csv"};
}

json filter_json(const FilterConfig& f) {
  return json{{"particles", f.particles},
              {"save_all", f.save_all},
              {"threshold", f.threshold},
              {"resample", std::string(method_name(f.method))},
              {"lookahead", std::string(lookahead_name(f.lookahead))},
              {"discount", f.discount},
              {"parameters", f.parameters},
              {"transform_parameters", f.transform_parameters}};
}

FilterConfig filter_from_json(const json& j) {
  FilterConfig f;
  f.particles = j.at("particles").get<std::size_t>();
  f.save_all = j.at("save_all").get<bool>();
  f.threshold = j.at("threshold").get<double>();
  f.method = parse_resample_method(j.at("resample").get<std::string>());
  f.lookahead = parse_lookahead(j.at("lookahead").get<std::string>());
  f.discount = j.at("discount").get<double>();
  f.parameters = j.at("parameters").get<std::vector<std::string>>();
  f.transform_parameters = j.at("transform_parameters").get<bool>();
  return f;
}

json manifest_object(const RunOptions& o) {
  json j{{"tool", "smc"},
         {"version", kToolVersion},
         {"command", o.command},
         {"model", o.model},
         {"data", o.data},
         {"constants", o.constants},
         {"inits", o.inits},
         {"latent", o.latent},
         {"seed", o.seed},
         {"filter", filter_json(o.filter)}};
  if (o.command == "run") {
    j["algorithm"] = o.algorithm;
    j["dump_samples"] = o.dump_samples;
    j["bins"] = o.bins;
  } else {
    json cov = json::array();
    for (Eigen::Index r = 0; r < o.prop_cov.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < o.prop_cov.cols(); ++c) row.push_back(o.prop_cov(r, c));
      cov.push_back(row);
    }
    j["pmmh"] = json{{"targets", o.targets},       {"inner", o.inner},
                     {"iterations", o.iterations}, {"thin", o.thin},
                     {"burn_in", o.burn_in},       {"prop_cov_path", o.prop_cov_path},
                     {"prop_cov", cov},            {"prop_scale", o.prop_scale},
                     {"adaptive", o.adaptive},     {"pf_resample", o.pf_resample},
                     {"trajectories", o.trajectories}};
  }
  return j;
}

void write_run_json(const RunOptions& o, const json& results, const std::vector<std::string>& outputs,
                    const fs::path& out) {
  json j{{"manifest", manifest_object(o)}, {"results", results}};
  j["results"]["outputs"] = outputs;
  std::FILE* f = std::fopen((out / "run.json").string().c_str(), "wb");
  if (!f) throw ConfigError("cannot write '" + (out / "run.json").string() + "'");
  const std::string text = j.dump(2) + "\n";
  std::fputs(text.c_str(), f);
  if (std::fclose(f) != 0) throw ConfigError("error writing run.json");
}

void execute_filter(const RunOptions& o, const fs::path& out, std::ostream& log) {
  if (!kAlgorithms.count(o.algorithm))
    throw ConfigError("unknown filter '" + o.algorithm + "' (expected bootstrap, auxiliary, liu-west, enkf or kalman)");
  if (o.latent.empty()) throw ConfigError("--latent is required");
  const Rng root(o.seed);
  LoadedModel m = load_model(o, root);
  for (const auto& w : m.warnings) log << "warning: " << w << "\n";
  FilterConfig cfg = o.filter;
  cfg.threads = o.threads;
  const Rng frng = root.derive({stream::kFilterRun});

  json results{{"warnings", m.warnings}, {"log_likelihood", nullptr}};
  std::vector<std::string> outputs;
  auto append = [&](const std::vector<std::string>& names) { outputs.insert(outputs.end(), names.begin(), names.end()); };

  if (o.algorithm == "kalman") {
    const GaussianExtraction ex = extract_gaussian(m.graph, m.state, o.latent);
    if (!ex) throw ConfigError("model is not linear-Gaussian: " + ex.mismatch);
    const KalmanResult k = kalman_filter(*ex.ssm, ex.y);
    append(write_kalman(k, m.graph, m.graph.latent_nodes(o.latent), out));
    results["log_likelihood"] = k.log_likelihood;
  } else {
    FilterResult r;
    if (o.algorithm == "bootstrap") r = bootstrap_filter(m.graph, m.state, o.latent, cfg, frng);
    if (o.algorithm == "auxiliary") r = auxiliary_filter(m.graph, m.state, o.latent, cfg, frng);
    if (o.algorithm == "liu-west") r = liu_west_filter(m.graph, m.state, o.latent, cfg, frng);
    if (o.algorithm == "enkf") r = enkf(m.graph, m.state, o.latent, cfg, frng);
    append(write_summary(r, o.algorithm, m.graph, out));
    if (o.dump_samples) append(write_samples(r, m.graph, out, o.algorithm == "enkf"));
    if (r.parameters) append(write_parameters(*r.parameters, o.bins, out));
    if (r.log_likelihood) results["log_likelihood"] = *r.log_likelihood;
    std::size_t resamples = 0;
    for (auto f : r.resampled) resamples += f;
    results["resampling_steps"] = resamples;
  }
  outputs.push_back("run.json");
  write_run_json(o, results, outputs, out);
  if (results["log_likelihood"].is_number())
    log << "log-likelihood: " << format_number(results["log_likelihood"].get<double>()) << "\n";
}

void execute_pmmh(const RunOptions& o, const fs::path& out, std::ostream& log) {
  if (o.latent.empty()) throw ConfigError("--latent is required");
  const Rng root(o.seed);
  LoadedModel m = load_model(o, root);
  for (const auto& w : m.warnings) log << "warning: " << w << "\n";

  PmmhConfig cfg;
  cfg.targets = o.targets;
  cfg.proposal_cov = o.prop_cov;
  cfg.proposal_scale = o.prop_scale;
  cfg.adaptive = o.adaptive;
  cfg.pf_resample = o.pf_resample;
  cfg.transform = o.filter.transform_parameters;
  cfg.inner = parse_inner_filter(o.inner);
  cfg.filter = o.filter;
  cfg.filter.threads = o.threads;
  cfg.filter.save_all = o.trajectories;
  cfg.iterations = o.iterations;
  cfg.thin = o.thin;
  cfg.burn_in = o.burn_in;

  const PmmhChain chain = pmmh_run(m.graph, m.state, o.latent, cfg, root.derive({stream::kFilterRun}));
  std::vector<std::string> outputs = {"chain.csv"};
  {
    CsvWriter w((out / "chain.csv").string());
    std::vector<std::string> h = {"iteration"};
    h.insert(h.end(), chain.names.begin(), chain.names.end());
    h.push_back("loglik");
    h.push_back("accepted");
    w.header(h);
    for (std::size_t r = 0; r < chain.iteration.size(); ++r) {
      w.cell(chain.iteration[r]);
      for (Eigen::Index i = 0; i < chain.theta.cols(); ++i) w.cell(chain.theta(r, i));
      w.cell(chain.log_likelihood[r]).cell(static_cast<std::size_t>(chain.accepted[r]));
      w.end_row();
    }
    w.close();
  }
  if (o.trajectories) {
    const auto latent = m.graph.latent_nodes(o.latent);
    CsvWriter w((out / "trajectories.csv").string());
    std::vector<std::string> h = {"iteration"};
    for (NodeId id : latent) h.push_back(m.graph.node(id).name);
    w.header(h);
    for (std::size_t r = 0; r < chain.trajectories.size(); ++r) {
      w.cell(chain.iteration[r]);
      for (double x : chain.trajectories[r]) w.cell(x);
      w.end_row();
    }
    w.close();
    outputs.push_back("trajectories.csv");
  }
  outputs.push_back("run.json");
  const double rate = chain.acceptance_rate(o.iterations);
  json results{{"warnings", m.warnings},
               {"acceptance_rate", rate},
               {"degenerate_filters", chain.degenerate_filters},
               {"retained", chain.iteration.size()}};
  write_run_json(o, results, outputs, out);
  log << "acceptance rate: " << format_number(rate) << "\n";
  if (chain.degenerate_filters > 0)
    log << "warning: " << chain.degenerate_filters << " proposals rejected for degenerate filter weights\n";
}

}  // namespace

bool RunOptions::operator==(const RunOptions& b) const {
  return manifest_json(*this) == manifest_json(b);
}

std::string manifest_json(const RunOptions& o) { return manifest_object(o).dump(2); }

RunOptions options_from_manifest(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (j.contains("manifest")) j = j["manifest"];
  try {
    RunOptions o;
    o.command = j.at("command").get<std::string>();
    o.model = j.at("model").get<std::string>();
    o.data = j.at("data").get<std::string>();
    o.constants = j.at("constants").get<std::string>();
    o.inits = j.at("inits").get<std::string>();
    o.latent = j.at("latent").get<std::string>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.filter = filter_from_json(j.at("filter"));
    if (o.command == "run") {
      o.algorithm = j.at("algorithm").get<std::string>();
      o.dump_samples = j.at("dump_samples").get<bool>();
      o.bins = j.at("bins").get<std::size_t>();
    } else if (o.command == "pmmh") {
      const json& p = j.at("pmmh");
      o.targets = p.at("targets").get<std::vector<std::string>>();
      o.inner = p.at("inner").get<std::string>();
      o.iterations = p.at("iterations").get<std::size_t>();
      o.thin = p.at("thin").get<std::size_t>();
      o.burn_in = p.at("burn_in").get<std::size_t>();
      o.prop_cov_path = p.at("prop_cov_path").get<std::string>();
      const auto rows = p.at("prop_cov").get<std::vector<std::vector<double>>>();
      o.prop_cov.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.size()) throw ConfigError("manifest: proposal covariance must be square");
        for (std::size_t c = 0; c < rows.size(); ++c) o.prop_cov(r, c) = rows[r][c];
      }
      o.prop_scale = p.at("prop_scale").get<double>();
      o.adaptive = p.at("adaptive").get<bool>();
      o.pf_resample = p.at("pf_resample").get<bool>();
      o.trajectories = p.at("trajectories").get<bool>();
    } else {
      throw ConfigError("manifest: unknown command '" + o.command + "'");
    }
    return o;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

void execute(const RunOptions& o, const std::string& out_dir, std::ostream& log) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
  if (o.threads < 1) throw ConfigError("thread count must be at least 1");
  if (o.command == "run") {
    execute_filter(o, out_dir, log);
  } else if (o.command == "pmmh") {
    execute_pmmh(o, out_dir, log);
  } else {
    throw ConfigError("unknown command '" + o.command + "'");
  }
}

void simulate_data(const SimulateOptions& s, std::ostream& log) {
  if (s.observe.empty()) throw ConfigError("--observe needs at least one variable");
  lang::CompileInputs inputs;
  if (!s.constants.empty()) inputs.constants = read_number_map(s.constants);
  if (!s.inits.empty()) inputs.inits = read_number_map(s.inits);
  const ModelGraph g = lang::compile(lang::parse(read_text(s.model)), inputs);
  for (const auto& w : g.warnings()) log << "warning: " << w << "\n";
  ModelState state = make_state(g);
  Rng rng = Rng(s.seed).derive({stream::kInit});
  initialize(g, state, rng);

  auto column = [&](const std::string& var) {
    if (!g.has_variable(var)) throw LookupError("unknown variable '" + var + "'");
    std::vector<double> v;
    for (NodeId id : g.variable_nodes(var)) v.push_back(state[id]);
    return v;
  };
  auto write = [&](const std::string& path, const std::vector<std::string>& vars) {
    std::vector<std::vector<double>> cols;
    for (const auto& v : vars) cols.push_back(column(v));
    for (const auto& c : cols)
      if (c.size() != cols.front().size()) throw ConfigError("simulated variables differ in length");
    CsvWriter w(path);
    w.header(vars);
    for (std::size_t t = 0; t < cols.front().size(); ++t) {
      for (const auto& c : cols) w.cell(c[t]);
      w.end_row();
    }
    w.close();
  };
  write(s.out, s.observe);
  if (!s.truth.empty()) {
    if (s.latent.empty()) throw ConfigError("--truth needs --latent");
    write(s.truth, {s.latent});
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Sequential Monte Carlo for state-space models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunOptions run;
  std::string run_out;
  std::string resample = "systematic", lookahead = "simulate";
  bool raw_scale = false;
  auto* run_cmd = app.add_subcommand("run", "Run a filter on a model and data set");
  run_cmd->add_option("--model", run.model, "Model file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--data", run.data, "Data CSV")->check(CLI::ExistingFile);
  run_cmd->add_option("--constants", run.constants, "Constants JSON")->check(CLI::ExistingFile);
  run_cmd->add_option("--inits", run.inits, "Initial values JSON")->check(CLI::ExistingFile);
  run_cmd->add_option("--latent", run.latent, "Latent variable name")->required();
  run_cmd->add_option("--filter", run.algorithm, "bootstrap, auxiliary, liu-west, enkf or kalman")
      ->check(CLI::IsMember(kAlgorithms));
  run_cmd->add_option("--particles", run.filter.particles, "Particle count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--thresh", run.filter.threshold, "Resample when ESS/K is below this")->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--resample", resample, "systematic, multinomial or residual");
  run_cmd->add_option("--lookahead", lookahead, "mean or simulate (auxiliary filter)");
  run_cmd->add_option("--discount", run.filter.discount, "Liu-West discount in (0, 1]");
  run_cmd->add_option("--params", run.filter.parameters, "Liu-West parameter nodes");
  run_cmd->add_flag("--raw-scale", raw_scale, "Liu-West kernel on the raw parameter scale");
  run_cmd->add_flag("--save-all", run.filter.save_all, "Keep every time point");
  run_cmd->add_flag("--dump-samples", run.dump_samples, "Write particle files");
  run_cmd->add_option("--bins", run.bins, "Histogram bins for Liu-West parameters")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Random seed");
  run_cmd->add_option("--threads", run.threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_out, "Output directory")->required();

  RunOptions pm;
  pm.command = "pmmh";
  std::string pm_out;
  std::string pm_resample = "systematic", pm_lookahead = "simulate";
  bool pm_raw = false;
  auto* pm_cmd = app.add_subcommand("pmmh", "Particle marginal Metropolis-Hastings");
  pm_cmd->add_option("--model", pm.model, "Model file")->required()->check(CLI::ExistingFile);
  pm_cmd->add_option("--data", pm.data, "Data CSV")->check(CLI::ExistingFile);
  pm_cmd->add_option("--constants", pm.constants, "Constants JSON")->check(CLI::ExistingFile);
  pm_cmd->add_option("--inits", pm.inits, "Initial values JSON")->check(CLI::ExistingFile);
  pm_cmd->add_option("--latent", pm.latent, "Latent variable name")->required();
  pm_cmd->add_option("--target", pm.targets, "Parameter nodes to sample")->required();
  pm_cmd->add_option("--iterations", pm.iterations, "MCMC iterations")->check(CLI::PositiveNumber);
  pm_cmd->add_option("--thin", pm.thin, "Keep every n-th iteration")->check(CLI::PositiveNumber);
  pm_cmd->add_option("--burn-in", pm.burn_in, "Adaptation stops after this iteration");
  pm_cmd->add_option("--prop-cov", pm.prop_cov_path, "Proposal covariance CSV")->check(CLI::ExistingFile);
  pm_cmd->add_option("--prop-scale", pm.prop_scale, "Proposal sd when no covariance is given");
  pm_cmd->add_flag("--adaptive", pm.adaptive, "Adapt the proposal covariance");
  pm_cmd->add_flag("--pf-resample", pm.pf_resample, "Re-estimate the current likelihood each iteration");
  pm_cmd->add_option("--inner", pm.inner, "bootstrap or auxiliary");
  pm_cmd->add_option("--inner-particles", pm.filter.particles, "Particles in the inner filter")
      ->check(CLI::PositiveNumber);
  pm_cmd->add_option("--thresh", pm.filter.threshold, "Inner filter resampling threshold")
      ->check(CLI::Range(0.0, 1.0));
  pm_cmd->add_option("--resample", pm_resample, "systematic, multinomial or residual");
  pm_cmd->add_option("--lookahead", pm_lookahead, "mean or simulate (auxiliary inner filter)");
  pm_cmd->add_flag("--raw-scale", pm_raw, "Propose on the raw parameter scale");
  pm_cmd->add_flag("--trajectories", pm.trajectories, "Write sampled latent paths");
  pm_cmd->add_option("--seed", pm.seed, "Random seed");
  pm_cmd->add_option("--threads", pm.threads, "Worker threads")->check(CLI::PositiveNumber);
  pm_cmd->add_option("--out", pm_out, "Output directory")->required();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a data set from a model");
  sim_cmd->add_option("--model", sim.model, "Model file")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--constants", sim.constants, "Constants JSON")->check(CLI::ExistingFile);
  sim_cmd->add_option("--inits", sim.inits, "Fixed values JSON")->check(CLI::ExistingFile);
  sim_cmd->add_option("--observe", sim.observe, "Variables to write")->required();
  sim_cmd->add_option("--latent", sim.latent, "Latent variable for --truth");
  sim_cmd->add_option("--truth", sim.truth, "Write the simulated latent path here");
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--out", sim.out, "Output CSV")->required();

  std::string manifest_path, replay_out;
  std::size_t replay_threads = 1;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run the job recorded in a run.json");
  replay_cmd->add_option("manifest", manifest_path, "run.json")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--threads", replay_threads, "Worker threads")->check(CLI::PositiveNumber);
  replay_cmd->add_option("--out", replay_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      run.filter.method = parse_resample_method(resample);
      run.filter.lookahead = parse_lookahead(lookahead);
      run.filter.transform_parameters = !raw_scale;
      run.filter.validate();
      execute(run, run_out, std::cerr);
    } else if (*pm_cmd) {
      pm.filter.method = parse_resample_method(pm_resample);
      pm.filter.lookahead = parse_lookahead(pm_lookahead);
      pm.filter.transform_parameters = !pm_raw;
      pm.filter.save_all = pm.trajectories;
      if (!pm.prop_cov_path.empty()) pm.prop_cov = read_matrix_csv(pm.prop_cov_path);
      execute(pm, pm_out, std::cerr);
    } else if (*sim_cmd) {
      simulate_data(sim, std::cerr);
    } else if (*replay_cmd) {
      RunOptions o = options_from_manifest(read_text(manifest_path));
      o.threads = replay_threads;
      execute(o, replay_out, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace smc::cli

// Benchmark and pipeline driver for the CBS model-fitting library.
//
// Subcommands:
//   synth    emit a named synthetic dataset preset as CSV
//   fit      run the full pipeline on a dataset and write labels/metrics
//   compare  sweep samplers (cbs, cbs-nss, random, uniform) over n_H
//   metrics  clustering error between two label files
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cbs/cbs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

cbs::KernelKind parse_model(const std::string& name) {
  if (name == "line") return cbs::KernelKind::line2d;
  if (name == "subspace") return cbs::KernelKind::subspace;
  if (name == "fundamental") return cbs::KernelKind::fundamental;
  throw cbs::InputError("unknown model '" + name + "' (expected line|subspace|fundamental)");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw cbs::InputError("cannot create output directory: " + dir.string());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw cbs::InputError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

void write_kv_csv(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw cbs::InputError("cannot open for writing: " + path.string());
  out << "key,value\n";
  for (const auto& [key, value] : j.items()) out << key << "," << value.dump() << "\n";
}

struct FitOptions {
  std::string data_path;
  std::string config_path;
  std::string model = "line";
  int k = 0;
  std::string k_policy = "paper-min";
  int n_clusters = 1;
  int n_hypotheses = 500;
  double t = 2.5;
  std::uint64_t seed = 0;
  double subset_frac = 0.0;
  double subspace_energy = 0.99;
  bool no_subsampling = false;
  bool dump_graph = false;
  std::string output = "cbs-out";
  std::string format = "json";
};

/// Build the pipeline configuration: config-file values first, then any
/// flag the user actually passed on the command line.
cbs::PipelineConfig resolve_config(const FitOptions& opt, const CLI::App* cmd) {
  cbs::PipelineConfig config;
  FitOptions merged = opt;

  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw cbs::InputError("cannot open config file: " + opt.config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw cbs::InputError("config file: " + std::string(e.what()));
    }
    if (j.contains("model")) merged.model = j["model"].get<std::string>();
    if (j.contains("k")) merged.k = j["k"].get<int>();
    if (j.contains("k_policy")) merged.k_policy = j["k_policy"].get<std::string>();
    if (j.contains("n_clusters")) merged.n_clusters = j["n_clusters"].get<int>();
    if (j.contains("n_hypotheses")) merged.n_hypotheses = j["n_hypotheses"].get<int>();
    if (j.contains("T")) merged.t = j["T"].get<double>();
    if (j.contains("seed")) merged.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("subset_frac")) merged.subset_frac = j["subset_frac"].get<double>();
    if (j.contains("subspace_energy")) merged.subspace_energy = j["subspace_energy"].get<double>();
    if (j.contains("subsampling")) merged.no_subsampling = !j["subsampling"].get<bool>();

    // Command-line flags win over file values.
    const auto passed = [&](const std::string& flag) { return cmd->count(flag) > 0; };
    if (passed("--model")) merged.model = opt.model;
    if (passed("--k")) merged.k = opt.k;
    if (passed("--k-policy")) merged.k_policy = opt.k_policy;
    if (passed("--n-clusters")) merged.n_clusters = opt.n_clusters;
    if (passed("--n-hypotheses")) merged.n_hypotheses = opt.n_hypotheses;
    if (passed("--T")) merged.t = opt.t;
    if (passed("--seed")) merged.seed = opt.seed;
    if (passed("--subset-frac")) merged.subset_frac = opt.subset_frac;
    if (passed("--subspace-energy")) merged.subspace_energy = opt.subspace_energy;
    if (passed("--no-subsampling")) merged.no_subsampling = opt.no_subsampling;
  }

  config.kernel = parse_model(merged.model);
  config.k = merged.k;
  if (merged.k_policy == "paper-min") config.k_policy = cbs::KPolicy::paper_min;
  else if (merged.k_policy == "floor20") config.k_policy = cbs::KPolicy::floor20;
  else throw cbs::InputError("unknown k policy '" + merged.k_policy + "'");
  config.n_c = merged.n_clusters;
  config.n_hypotheses = merged.n_hypotheses;
  config.t = merged.t;
  config.seed = merged.seed;
  config.subset_frac = merged.subset_frac;
  config.subspace_energy = merged.subspace_energy;
  config.subsampling = !merged.no_subsampling;
  return config;
}

int run_synth(const std::string& preset, std::uint64_t seed, const std::string& output) {
  ensure_dir(output);
  const fs::path path = fs::path(output) / (preset + ".csv");
  cbs::DataSet data;
  if (preset == "four-lines") data = cbs::gen_lines(cbs::four_line_scene(seed)).data;
  else if (preset == "two-lines") data = cbs::gen_lines(cbs::two_line_scene(seed)).data;
  else if (preset == "three-motion") data = cbs::gen_two_view(cbs::three_motion_scene(seed)).data;
  else if (preset == "checkerboard") data = cbs::gen_two_view(cbs::checkerboard_like_scene(seed)).data;
  else if (preset == "three-subspaces") data = cbs::gen_subspaces(cbs::three_subspace_scene(seed)).data;
  else throw cbs::InputError("unknown preset '" + preset +
                             "' (four-lines|two-lines|three-motion|checkerboard|three-subspaces)");
  cbs::write_dataset_csv(path, data);
  std::cout << "wrote " << path.string() << " (" << data.n() << " points, "
            << cbs::to_string(data.kind) << ")\n";
  return 0;
}

int run_fit(const FitOptions& opt, const CLI::App* cmd) {
  const cbs::PipelineConfig config = resolve_config(opt, cmd);
  const cbs::DataSet data = cbs::ingest(opt.data_path);
  const cbs::PipelineResult res = cbs::run_pipeline(data, config);

  ensure_dir(opt.output);
  const fs::path dir(opt.output);
  cbs::write_labels_csv(dir / "labels.csv", res.labeling.labels);

  json metrics = {
      {"sampler_name", config.subsampling ? "cbs" : "cbs-nss"},
      {"n_H", config.n_hypotheses},
      {"seed", config.seed},
      {"wall_time_ms", res.timings.total_ms},
      {"k", res.effective_k},
      {"n_clusters", config.n_c},
      {"T", config.t},
      {"subset_size", res.subset_size},
      {"n_points", data.n()},
      {"converged_hypotheses",
       static_cast<int>(std::count_if(res.bundle.hypotheses.begin(), res.bundle.hypotheses.end(),
                                      [](const cbs::Hypothesis& h) { return h.converged; }))},
  };
  if (res.ce) metrics["ce_percent"] = res.ce->ce_percent;

  const json timings = {{"sampling_ms", res.timings.sampling_ms},
                        {"graph_ms", res.timings.graph_ms},
                        {"clustering_ms", res.timings.clustering_ms},
                        {"total_ms", res.timings.total_ms}};

  if (opt.format == "csv") {
    write_kv_csv(dir / "metrics.csv", metrics);
    write_kv_csv(dir / "timings.csv", timings);
  } else {
    write_json(dir / "metrics.json", metrics);
    write_json(dir / "timings.json", timings);
  }

  if (opt.dump_graph) {
    cbs::write_matrix_csv(dir / "H.csv", res.bundle.H);
    cbs::write_matrix_csv(dir / "G.csv", res.bundle.G);
  }

  std::cout << "n=" << data.n() << " k=" << res.effective_k << " n_H=" << config.n_hypotheses
            << " time=" << res.timings.total_ms << "ms";
  if (res.ce) std::cout << " CE=" << res.ce->ce_percent << "%";
  std::cout << "\n";
  return 0;
}

struct CompareOptions {
  std::string data_path;
  std::string model = "line";
  std::vector<std::string> samplers{"cbs", "cbs-nss", "random", "uniform"};
  std::vector<int> sweep{50, 100, 200, 500};
  int seeds = 5;
  int k = 0;
  int n_clusters = 1;
  double t = 2.5;
  double subset_frac = 0.0;
  std::string output = "cbs-out";
  std::string format = "json";
};

int run_compare(const CompareOptions& opt) {
  const cbs::DataSet data = cbs::ingest(opt.data_path);
  cbs::PipelineConfig base;
  base.kernel = parse_model(opt.model);
  base.k = opt.k;
  base.n_c = opt.n_clusters;
  base.t = opt.t;
  base.subset_frac = opt.subset_frac;

  json records = json::array();
  for (const auto& sampler : opt.samplers) {
    for (int n_h : opt.sweep) {
      for (int s = 0; s < opt.seeds; ++s) {
        cbs::PipelineConfig config = base;
        config.n_hypotheses = n_h;
        config.seed = static_cast<std::uint64_t>(s);
        cbs::BenchRecord rec;
        if (sampler == "cbs") rec = cbs::bench_cbs(data, config);
        else if (sampler == "cbs-nss") rec = cbs::bench_cbs_nss(data, config);
        else if (sampler == "random") rec = cbs::bench_random(data, config);
        else if (sampler == "uniform") rec = cbs::bench_uniform(data, config);
        else throw cbs::InputError("unknown sampler '" + sampler + "'");
        json j = {{"sampler_name", rec.sampler_name},
                  {"n_H", rec.n_hypotheses},
                  {"seed", rec.seed},
                  {"wall_time_ms", rec.wall_time_ms}};
        if (rec.ce_percent >= 0.0) j["ce_percent"] = rec.ce_percent;
        records.push_back(std::move(j));
        std::cout << sampler << " n_H=" << n_h << " seed=" << s << " time=" << rec.wall_time_ms
                  << "ms";
        if (rec.ce_percent >= 0.0) std::cout << " CE=" << rec.ce_percent << "%";
        std::cout << "\n";
      }
    }
  }

  ensure_dir(opt.output);
  const fs::path dir(opt.output);
  if (opt.format == "csv") {
    std::ofstream out(dir / "compare.csv");
    out << "sampler_name,n_H,seed,wall_time_ms,ce_percent\n";
    for (const auto& r : records)
      out << r["sampler_name"].get<std::string>() << "," << r["n_H"] << "," << r["seed"] << ","
          << r["wall_time_ms"] << ","
          << (r.contains("ce_percent") ? r["ce_percent"].dump() : "") << "\n";
  } else {
    write_json(dir / "compare.json", records);
  }
  return 0;
}

int run_metrics(const std::string& truth_path, const std::string& predicted_path,
                const std::string& output) {
  const std::vector<int> truth = cbs::read_labels_csv(truth_path);
  const std::vector<int> predicted = cbs::read_labels_csv(predicted_path);
  const cbs::ClusteringErrorReport report = cbs::clustering_error(truth, predicted);
  std::cout << "CE = " << report.ce_percent << "%\n";
  if (!output.empty()) {
    ensure_dir(output);
    json mapping = json::object();
    for (const auto& [pred, tr] : report.best_permutation)
      mapping[std::to_string(pred)] = tr;
    write_json(fs::path(output) / "metrics.json",
               {{"ce_percent", report.ce_percent}, {"best_permutation", mapping}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CBS multi-structure model fitting"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "emit a synthetic dataset preset");
  std::string synth_preset = "four-lines";
  std::uint64_t synth_seed = 0;
  std::string synth_output = "cbs-out";
  synth->add_option("--preset", synth_preset,
                    "four-lines|two-lines|three-motion|checkerboard|three-subspaces");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--output", synth_output, "output directory");

  // fit
  FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "run the CBS pipeline on a dataset");
  fit->add_option("data", fit_opt.data_path, "dataset CSV")->required();
  fit->add_option("--config", fit_opt.config_path, "JSON config file (flags override)");
  fit->add_option("--model", fit_opt.model, "line|subspace|fundamental");
  fit->add_option("--k", fit_opt.k, "minimum structure size (0 = policy default)");
  fit->add_option("--k-policy", fit_opt.k_policy, "paper-min|floor20");
  fit->add_option("--n-clusters", fit_opt.n_clusters, "number of clusters");
  fit->add_option("--n-hypotheses", fit_opt.n_hypotheses, "number of hypotheses");
  fit->add_option("--T", fit_opt.t, "inlier threshold constant in [2.0, 3.5]");
  fit->add_option("--seed", fit_opt.seed, "RNG seed");
  fit->add_option("--subset-frac", fit_opt.subset_frac, "subset fraction (default 1/n_clusters)");
  fit->add_option("--subspace-energy", fit_opt.subspace_energy,
                  "eigen-energy threshold for subspace dimension selection");
  fit->add_flag("--no-subsampling", fit_opt.no_subsampling, "disable the sub-sampling strategy");
  fit->add_flag("--dump-graph", fit_opt.dump_graph, "also write H.csv and G.csv");
  fit->add_option("--output", fit_opt.output, "output directory");
  fit->add_option("--format", fit_opt.format, "csv|json (metrics/timings format)");

  // compare
  CompareOptions cmp_opt;
  auto* cmp = app.add_subcommand("compare", "sweep samplers over n_H");
  cmp->add_option("data", cmp_opt.data_path, "dataset CSV")->required();
  cmp->add_option("--model", cmp_opt.model, "line|subspace|fundamental");
  cmp->add_option("--samplers", cmp_opt.samplers, "subset of cbs,cbs-nss,random,uniform")
      ->delimiter(',');
  cmp->add_option("--n-hypotheses-sweep", cmp_opt.sweep, "n_H values")->delimiter(',');
  cmp->add_option("--seeds", cmp_opt.seeds, "seeds per point");
  cmp->add_option("--k", cmp_opt.k, "minimum structure size (0 = policy default)");
  cmp->add_option("--n-clusters", cmp_opt.n_clusters, "number of clusters");
  cmp->add_option("--T", cmp_opt.t, "inlier threshold constant");
  cmp->add_option("--subset-frac", cmp_opt.subset_frac, "subset fraction");
  cmp->add_option("--output", cmp_opt.output, "output directory");
  cmp->add_option("--format", cmp_opt.format, "csv|json");

  // metrics
  std::string m_truth, m_pred, m_output;
  auto* met = app.add_subcommand("metrics", "clustering error between two label files");
  met->add_option("truth", m_truth, "ground-truth labels CSV")->required();
  met->add_option("predicted", m_pred, "predicted labels CSV")->required();
  met->add_option("--output", m_output, "output directory for metrics.json");

  try {
    app.parse(argc, argv);
    if (synth->parsed()) return run_synth(synth_preset, synth_seed, synth_output);
    if (fit->parsed()) return run_fit(fit_opt, fit);
    if (cmp->parsed()) return run_compare(cmp_opt);
    if (met->parsed()) return run_metrics(m_truth, m_pred, m_output);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const cbs::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cbs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

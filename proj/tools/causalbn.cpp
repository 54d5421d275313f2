// causalbn: command-line driver for the structure-learning pipeline.
//
//   learn      learn one graph per algorithm
//   average    model-average learned graphs and pick the threshold by BIC
//   compare    structure report against a reference graph
//   validate   k-fold predictive validation of a binary target
//   intervene  effect of do(exposure) on a binary target
//   synth      write a synthetic ground truth, its constraints and a sample
//   pipeline   learn -> average -> compare -> validate [-> intervene]

#include <CLI11.hpp>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "causalbn/causalbn.hpp"

namespace fs = std::filesystem;
using namespace causalbn;

namespace {

// Settings a --config file may set; command-line flags take precedence.
struct Settings {
  LearnerConfig learner;
  double smoothing = 1.0;
  std::size_t folds = 10;
  int digits = 1;
  ImputeMethod impute = ImputeMethod::kListwiseDelete;
};

Settings load_settings(const std::string& path) {
  Settings s;
  if (path.empty()) return s;
  auto j = read_json_file(path);
  if (!j.is_object()) throw Error("config '" + path + "' must hold a JSON object");
  if (j.contains("learner")) s.learner = config_from_json(j.at("learner"));
  s.smoothing = j.value("smoothing", s.smoothing);
  s.folds = j.value("folds", s.folds);
  s.digits = j.value("digits", s.digits);
  auto imp = j.value("impute", std::string("listwise"));
  if (imp == "listwise")
    s.impute = ImputeMethod::kListwiseDelete;
  else if (imp == "mode")
    s.impute = ImputeMethod::kColumnMode;
  else
    throw Error("config: impute must be \"listwise\" or \"mode\"");
  if (!(s.smoothing >= 0)) throw Error("config: smoothing must be non-negative");
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

CategoricalDataset load_data(const std::string& data, const std::string& schema, const Settings& s) {
  auto sc = load_schema(schema);
  auto d = load_csv(data, sc.variables);
  if (!sc.cleaning.empty()) d = apply_cleaning(d, sc.cleaning);
  return impute(d, s.impute);
}

KnowledgeConstraints load_knowledge(const std::string& path, const CategoricalDataset& d) {
  if (path.empty()) return {};
  auto k = load_constraints(path);
  auto diag = validate(k, d.names());
  if (!diag.ok()) throw ConstraintError("constraints '" + path + "' are invalid:\n" + diag.summary());
  return k;
}

Dag load_dag(const std::string& path) {
  auto j = read_json_file(path);
  // A learner result file holds its DAG under "dag".
  return dag_from_json(j.contains("dag") ? j.at("dag") : j);
}

std::string stem_of(const fs::path& p) {
  std::string s = p.filename().string();
  for (const char* suffix : {".graph.json", ".json"})
    if (s.size() > std::strlen(suffix) && s.ends_with(suffix)) return s.substr(0, s.size() - std::strlen(suffix));
  return s;
}

// Graph files named on the command line; a directory contributes its
// *.graph.json files in name order.
std::vector<fs::path> graph_files(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().filename().string().ends_with(".graph.json")) found.push_back(e.path());
      std::sort(found.begin(), found.end());
      if (found.empty()) throw Error("no *.graph.json files in '" + in + "'");
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      out.emplace_back(in);
    } else {
      throw Error("graph input '" + in + "' does not exist");
    }
  }
  return out;
}

void require_same_variables(const Dag& g, const CategoricalDataset& d, const std::string& what) {
  auto a = g.nodes(), b = d.names();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw GraphError(what + " does not cover exactly the data's variables");
}

// ---------------------------------------------------------------------------

struct LearnArgs {
  std::string data, schema, constraints, out_dir = "learn";
  std::vector<std::string> algorithms;
  std::optional<std::uint64_t> seed;
};

std::vector<fs::path> run_learn(const LearnArgs& a, const Settings& s) {
  auto d = load_data(a.data, a.schema, s);
  auto k = load_knowledge(a.constraints, d);
  std::vector<Algorithm> algs;
  for (const auto& name : a.algorithms) algs.push_back(algorithm_from_string(name));
  if (algs.empty()) algs = all_algorithms();
  LearnerConfig cfg = s.learner;
  if (a.seed) cfg.seed = *a.seed;
  auto results = learn_all(d, cfg, k, algs);
  std::vector<fs::path> graphs;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : results) {
    const auto name = to_string(r.algorithm);
    const fs::path dir(a.out_dir);
    write_json(dir / (name + ".graph.json"), to_json(r.dag));
    write_file(dir / (name + ".dot"), to_dot(r.graph));
    write_json(dir / (name + ".result.json"), to_json(r));
    graphs.push_back(dir / (name + ".graph.json"));
    summary.push_back({{"algorithm", name},
                       {"bic", r.score},
                       {"edges", r.dag.edge_count()},
                       {"fragments", count_fragments(r.dag)},
                       {"forced_extension", r.forced_extension}});
    std::cout << name << ": " << r.dag.edge_count() << " edges, BIC " << r.score << "\n";
  }
  write_json(fs::path(a.out_dir) / "learn.json",
             {{"rows", d.rows()}, {"config", to_json(cfg)}, {"constraints", to_json(k)}, {"results", summary}});
  return graphs;
}

struct AverageArgs {
  std::vector<std::string> graphs;
  std::string data, schema, constraints, out_dir = "average";
};

fs::path run_average(const AverageArgs& a, const Settings& s) {
  auto d = load_data(a.data, a.schema, s);
  auto k = load_knowledge(a.constraints, d);
  std::vector<Dag> dags;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& f : graph_files(a.graphs)) {
    dags.push_back(load_dag(f.string()));
    inputs.push_back(f.filename().string());
  }
  auto tally = tally_edges(dags);
  require_same_variables(dags.front(), d, "input graphs");
  auto family = select_by_bic(tally, d, k);

  const fs::path dir(a.out_dir);
  auto j = to_json(family);
  j["inputs"] = inputs;
  j["tally"] = to_json(tally);
  write_json(dir / "family.json", j);
  write_json(dir / "average.graph.json", to_json(family.selected()));
  write_file(dir / "average.dot", to_dot(family.selected()));
  std::ostringstream csv;
  csv.precision(12);
  csv << "L,bic,edges,fragments,reversed,dropped,selected\n";
  for (const auto& [l, g] : family.graphs) {
    const auto& log = family.logs.at(l);
    csv << l << ',' << family.bic.at(l) << ',' << g.edge_count() << ',' << count_fragments(g) << ','
        << log.reversed.size() << ',' << log.dropped.size() << ',' << (l == family.selected_l ? 1 : 0) << '\n';
  }
  write_file(dir / "bic_by_L.csv", csv.str());
  std::ostringstream dropped;
  dropped << "L,from,to\n";
  for (const auto& [l, log] : family.logs)
    for (const auto& [from, to] : log.dropped) dropped << l << ',' << from << ',' << to << '\n';
  write_file(dir / "dropped_edges.csv", dropped.str());
  std::cout << "selected L=" << family.selected_l << " of " << tally.k << ", " << family.selected().edge_count()
            << " edges, BIC " << family.bic.at(family.selected_l) << "\n";
  return dir / "average.graph.json";
}

struct CompareArgs {
  std::vector<std::string> graphs;
  std::string reference, data, schema, out_dir = "compare";
};

void run_compare(const CompareArgs& a, const Settings& s) {
  if (!fs::is_regular_file(a.reference)) throw Error("reference graph '" + a.reference + "' does not exist");
  auto d = load_data(a.data, a.schema, s);
  auto ref = load_dag(a.reference);
  require_same_variables(ref, d, "reference graph");
  std::vector<std::pair<std::string, Dag>> structures;
  for (const auto& f : graph_files(a.graphs)) structures.emplace_back(stem_of(f), load_dag(f.string()));
  auto rep = structure_report(structures, ref, d);
  write_json(fs::path(a.out_dir) / "report.json", to_json(rep));
  write_file(fs::path(a.out_dir) / "report.csv", to_csv(rep));
  for (const auto& r : rep.rows) std::cout << r.name << ": SHD " << r.shd << ", BIC " << r.bic << "\n";
}

struct ValidateArgs {
  std::string graph, data, schema, target, out_dir = "validate";
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
};

void run_validate(const ValidateArgs& a, const Settings& s) {
  auto d = load_data(a.data, a.schema, s);
  auto g = load_dag(a.graph);
  require_same_variables(g, d, "graph");
  auto labels = labels_of(d, a.target);
  if (std::count(labels.begin(), labels.end(), 1) == 0 || std::count(labels.begin(), labels.end(), 0) == 0)
    throw DataError("target '" + a.target + "' has a single class in the data");
  auto rep = cross_validate(g, d, a.target, a.k.value_or(s.folds), a.seed, s.smoothing);
  write_json(fs::path(a.out_dir) / "prediction.json", to_json(rep));
  write_file(fs::path(a.out_dir) / "roc.csv", roc_csv(rep.roc));
  std::cout << "accuracy " << rep.accuracy << ", sensitivity " << rep.sensitivity << ", specificity "
            << rep.specificity << ", AUC " << (rep.auc ? std::to_string(*rep.auc) : "n/a") << "\n";
}

struct InterveneArgs {
  std::string graph, data, schema, exposure, target, out = "effect.json";
  std::optional<int> digits;
};

void run_intervene(const InterveneArgs& a, const Settings& s) {
  if (a.exposure == a.target) throw Error("exposure and target must differ");
  auto d = load_data(a.data, a.schema, s);
  auto g = load_dag(a.graph);
  require_same_variables(g, d, "graph");
  auto net = fit(g, d, s.smoothing);
  auto rep = effect_report(net, a.exposure, a.target, a.digits.value_or(s.digits));
  write_json(a.out, to_json(rep));
  std::cout << rep.summary << "\n";
}

struct SynthArgs {
  std::string scenario = "sepsis", out_dir = "synth";
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::size_t nodes = 10, max_parents = 2;
  std::vector<std::size_t> states{2, 3};
};

void run_synth(const SynthArgs& a) {
  if (a.n < 1) throw Error("--n must be at least 1");
  DiscreteBayesNet net;
  KnowledgeConstraints k;
  nlohmann::json meta{{"scenario", a.scenario}, {"n", a.n}, {"seed", a.seed}};
  if (a.scenario == "sepsis") {
    auto sc = sepsis_scenario(a.seed);
    net = sc.net;
    k = sc.constraints;
    meta["target"] = sc.target;
    meta["prevalence"] = sc.prevalence;
  } else {
    net = random_net(a.nodes, a.max_parents, a.states, a.seed);
    meta["nodes"] = a.nodes;
    meta["max_parents"] = a.max_parents;
    meta["states"] = a.states;
  }
  const fs::path dir(a.out_dir);
  write_json(dir / "net.json", to_json(net));
  write_json(dir / "truth.graph.json", to_json(net.dag()));
  write_file(dir / "truth.dot", to_dot(net.dag()));
  write_json(dir / "constraints.json", to_json(k));
  write_json(dir / "schema.json", to_json(Schema{net.variables(), {}}));
  write_json(dir / "scenario.json", meta);
  // Data seed is derived from, but distinct from, the structure seed.
  auto d = sample(net, a.n, a.seed ^ 0x9e3779b97f4a7c15ULL);
  std::ostringstream csv;
  write_csv(csv, d);
  write_file(dir / "data.csv", csv.str());
  std::cout << "wrote " << a.n << " rows over " << net.size() << " variables to " << dir.string() << "\n";
}

struct PipelineArgs {
  std::string data, schema, constraints, reference, target, exposure, out_dir = "pipeline";
  std::vector<std::string> algorithms;
  std::uint64_t seed = 0;
  std::optional<std::size_t> k;
};

void run_pipeline(const PipelineArgs& a, const Settings& s) {
  const fs::path dir(a.out_dir);
  LearnArgs la{a.data, a.schema, a.constraints, (dir / "learn").string(), a.algorithms, a.seed};
  auto graphs = run_learn(la, s);
  AverageArgs aa{{(dir / "learn").string()}, a.data, a.schema, a.constraints, (dir / "average").string()};
  auto averaged = run_average(aa, s);
  std::vector<std::string> compared{(dir / "learn").string(), averaged.string()};
  CompareArgs ca{compared, a.reference.empty() ? averaged.string() : a.reference, a.data, a.schema,
                 (dir / "compare").string()};
  run_compare(ca, s);
  if (!a.target.empty()) {
    ValidateArgs va{averaged.string(), a.data, a.schema, a.target, (dir / "validate").string(), a.k, a.seed};
    run_validate(va, s);
    if (!a.exposure.empty()) {
      InterveneArgs ia{averaged.string(), a.data, a.schema, a.exposure, a.target, (dir / "intervene" / "effect.json").string(), {}};
      run_intervene(ia, s);
    }
  }
}

// Rejects unknown algorithm names at parse time, so they are usage errors.
const CLI::Validator kAlgorithmName(
    [](std::string& s) {
      try {
        algorithm_from_string(s);
        return std::string();
      } catch (const Error& e) {
        return std::string(e.what());
      }
    },
    "ALGORITHM");

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Bayesian-network causal discovery pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "causalbn 0.1.0");
  std::string config;
  app.add_option("--config", config, "JSON settings file (learner, smoothing, folds, digits, impute)")
      ->check(CLI::ExistingFile);

  LearnArgs learn;
  auto* cl = app.add_subcommand("learn", "Learn one structure per algorithm");
  cl->add_option("--data", learn.data, "CSV data")->required()->check(CLI::ExistingFile);
  cl->add_option("--schema", learn.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  cl->add_option("--constraints", learn.constraints, "Constraint JSON")->check(CLI::ExistingFile);
  cl->add_option("--algorithms", learn.algorithms, "Algorithms (default: all six)")
      ->delimiter(',')
      ->check(kAlgorithmName);
  cl->add_option("--out-dir", learn.out_dir, "Output directory")->capture_default_str();
  cl->add_option("--seed", learn.seed, "Seed for randomised restarts");

  AverageArgs average;
  auto* ca = app.add_subcommand("average", "Average learned structures");
  ca->add_option("--graphs", average.graphs, "Graph files or directories of *.graph.json")->required();
  ca->add_option("--data", average.data, "CSV data")->required()->check(CLI::ExistingFile);
  ca->add_option("--schema", average.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  ca->add_option("--constraints", average.constraints, "Constraint JSON")->check(CLI::ExistingFile);
  ca->add_option("--out,--out-dir", average.out_dir, "Output directory")->capture_default_str();

  CompareArgs compare;
  auto* cc = app.add_subcommand("compare", "Structure report against a reference");
  cc->add_option("--graphs", compare.graphs, "Graph files or directories of *.graph.json")->required();
  cc->add_option("--reference", compare.reference, "Reference graph JSON")->required();
  cc->add_option("--data", compare.data, "CSV data")->required()->check(CLI::ExistingFile);
  cc->add_option("--schema", compare.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  cc->add_option("--out,--out-dir", compare.out_dir, "Output directory")->capture_default_str();

  ValidateArgs val;
  auto* cv = app.add_subcommand("validate", "Cross-validated prediction of a binary target");
  cv->add_option("--graph", val.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  cv->add_option("--data", val.data, "CSV data")->required()->check(CLI::ExistingFile);
  cv->add_option("--schema", val.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  cv->add_option("--target", val.target, "Binary target variable")->required();
  cv->add_option("--k", val.k, "Number of folds (default 10)")->check(CLI::Range(2, 1000000));
  cv->add_option("--seed", val.seed, "Fold shuffling seed")->capture_default_str();
  cv->add_option("--out,--out-dir", val.out_dir, "Output directory")->capture_default_str();

  InterveneArgs iv;
  auto* ci = app.add_subcommand("intervene", "Effect of do(exposure) on a binary target");
  ci->add_option("--graph", iv.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  ci->add_option("--data", iv.data, "CSV data")->required()->check(CLI::ExistingFile);
  ci->add_option("--schema", iv.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  ci->add_option("--exposure", iv.exposure, "Binary exposure variable")->required();
  ci->add_option("--target", iv.target, "Binary target variable")->required();
  ci->add_option("--digits", iv.digits, "Decimal places of the percentages");
  ci->add_option("--out", iv.out, "Output JSON file")->capture_default_str();

  SynthArgs sy;
  auto* cs = app.add_subcommand("synth", "Write a synthetic ground truth and a sample");
  cs->add_option("--scenario", sy.scenario, "sepsis or random")
      ->check(CLI::IsMember({"sepsis", "random"}))
      ->capture_default_str();
  cs->add_option("--n", sy.n, "Rows to sample")->capture_default_str();
  cs->add_option("--seed", sy.seed, "Seed")->capture_default_str();
  cs->add_option("--nodes", sy.nodes, "Random scenario: node count")->capture_default_str();
  cs->add_option("--max-parents", sy.max_parents, "Random scenario: parent bound")->capture_default_str();
  cs->add_option("--states", sy.states, "Random scenario: state-count pool")->delimiter(',');
  cs->add_option("--out-dir", sy.out_dir, "Output directory")->capture_default_str();

  PipelineArgs pl;
  auto* cp = app.add_subcommand("pipeline", "learn, average, compare, validate and intervene in one go");
  cp->add_option("--data", pl.data, "CSV data")->required()->check(CLI::ExistingFile);
  cp->add_option("--schema", pl.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  cp->add_option("--constraints", pl.constraints, "Constraint JSON")->check(CLI::ExistingFile);
  cp->add_option("--reference", pl.reference, "Reference graph (default: the averaged graph)")
      ->check(CLI::ExistingFile);
  cp->add_option("--algorithms", pl.algorithms, "Algorithms (default: all six)")
      ->delimiter(',')
      ->check(kAlgorithmName);
  cp->add_option("--target", pl.target, "Binary target for validation");
  cp->add_option("--exposure", pl.exposure, "Binary exposure for the intervention (needs --target)");
  cp->add_option("--k", pl.k, "Number of folds (default 10)")->check(CLI::Range(2, 1000000));
  cp->add_option("--seed", pl.seed, "Seed")->capture_default_str();
  cp->add_option("--out-dir", pl.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; usage errors exit 2.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const Settings settings = load_settings(config);
    if (cl->parsed()) run_learn(learn, settings);
    if (ca->parsed()) run_average(average, settings);
    if (cc->parsed()) run_compare(compare, settings);
    if (cv->parsed()) run_validate(val, settings);
    if (ci->parsed()) run_intervene(iv, settings);
    if (cs->parsed()) run_synth(sy);
    if (cp->parsed()) run_pipeline(pl, settings);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "distphylo/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "distphylo/agglomerative.hpp"
#include "distphylo/distance.hpp"
#include "distphylo/errors.hpp"
#include "distphylo/io.hpp"
#include "distphylo/min_evolution.hpp"
#include "distphylo/mst.hpp"
#include "distphylo/nj.hpp"
#include "distphylo/properties.hpp"

namespace distphylo {

namespace {

const std::vector<std::string> kTreeMethods = {"upgma", "wpgma", "single", "complete", "upgmc", "wpgmc", "nj-sn",
                                               "nj-sk", "unj",   "bionj", "fnj",    "gme",      "bme"};

std::string read_all(const std::string& path, std::istream& in) {
  std::ostringstream os;
  if (path == "-") {
    os << in.rdbuf();
    return os.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open input '" + path + "'");
  os << f.rdbuf();
  return os.str();
}

DistanceOptions distance_options(const RunConfig& cfg) {
  DistanceOptions o;
  if (cfg.metric == "normalized") o.metric = Metric::normalized;
  else if (cfg.metric == "jc") o.metric = Metric::jc;
  o.policy.mode = cfg.missing == "pairwise" ? MissingMode::pairwise_deletion : MissingMode::strict;
  o.policy.scale = cfg.rescale ? MissingScale::rescale_to_loci : MissingScale::none;
  o.jc.saturation_ceiling = cfg.jc_ceiling;
  o.threads = std::max(1u, cfg.threads);
  return o;
}

std::string input_type(const RunConfig& cfg, const char* fallback) {
  return cfg.input_type.empty() ? fallback : cfg.input_type;
}

DistanceMatrix load_matrix(const RunConfig& cfg, std::istream& in, const std::string& type) {
  std::istringstream text(read_all(cfg.input, in));
  if (type == "matrix") return read_phylip_matrix(text);
  if (type == "profiles") return build_distance_matrix(read_profiles(text), distance_options(cfg));
  return build_distance_matrix(read_sequences(text), distance_options(cfg));
}

EdgeFormat edge_format(const RunConfig& cfg) { return cfg.format == "dot" ? EdgeFormat::dot : EdgeFormat::tsv; }

std::string run_tree(const RunConfig& cfg, std::istream& in) {
  auto d = load_matrix(cfg, in, input_type(cfg, "matrix"));
  const std::string& m = cfg.method;
  if (cfg.engine != "naive" && !parse_reduction_kind(m))
    throw InputError("--engine applies to agglomerative methods only, not " + m);
  if (cfg.order != "input" && m != "gme" && m != "bme")
    throw InputError("--order applies to gme and bme only, not " + m);

  if (auto kind = parse_reduction_kind(m)) {
    if (cfg.engine == "nn-chain") {
      if (!supports_nn_chain(*kind)) throw InputError(std::string("nn-chain engine does not support ") + m);
      if (!cfg.tie.empty() && cfg.tie != "lexicographic")
        throw InputError("nn-chain engine uses the lexicographic tie rule only");
      return write_newick(run_nn_chain(d, *kind), cfg.precision);
    }
    ClusterOptions o;
    if (cfg.tie == "avoid-newest") o.tie = TieRule::avoid_newest;
    o.clamp_negative = cfg.clamp_negative;
    return write_newick(run_gcp(d, *kind, o), cfg.precision);
  }
  if (auto variant = parse_nj_variant(m)) {
    NjOptions o;
    if (cfg.tie == "lexicographic") o.tie = TieRule::lexicographic;
    o.clamp_negative = cfg.clamp_negative;
    if (cfg.bionj_selection == "min-variance") o.bionj_selection = BionjSelection::min_variance;
    return write_newick(run_nj(d, *variant, o), cfg.precision);
  }
  const auto scheme = m == "gme" ? WeightScheme::ols : WeightScheme::balanced;
  const auto order = cfg.order == "random" ? InsertionOrder::random : InsertionOrder::input;
  return write_newick(run_addition(d, scheme, order, cfg.seed), cfg.precision);
}

std::string run_goeburst_cmd(const RunConfig& cfg, std::istream& in) {
  const std::string type = input_type(cfg, "profiles");
  if (type == "sequences") throw InputError("goeburst reads profiles or a matrix");
  std::optional<std::size_t> level;
  if (cfg.level != "full") level = std::stoul(cfg.level);
  Forest f;
  if (type == "profiles") {
    std::istringstream text(read_all(cfg.input, in));
    auto p = read_profiles(text);
    auto policy = distance_options(cfg).policy;
    f = level ? run_goeburst(p, *level, policy) : run_goeburst_full_mst(p, policy);
  } else {
    auto d = load_matrix(cfg, in, type);
    f = level ? run_goeburst(d, *level) : run_goeburst_full_mst(d);
  }
  return write_edges(f, edge_format(cfg));
}

std::string verdict_line(const char* property, const PropertyVerdict& v) {
  std::string s = std::string(property) + "\t";
  if (v.holds) return s + "holds-on-sample\t" + std::to_string(v.trials) + " trials\n";
  return s + "counterexample\ttrial " + std::to_string(v.trials) + "\t" + v.witness + "\n";
}

std::string run_check(const RunConfig& cfg) {
  auto rule = parse_property_rule(cfg.reduction);
  if (!rule) throw InputError("unknown reduction '" + cfg.reduction + "'");
  std::string out;
  if (cfg.property != "commutativity") out += verdict_line("convexity", check_convexity(*rule, cfg.trials, cfg.seed));
  if (cfg.property != "convexity")
    out += verdict_line("commutativity", check_commutativity(*rule, cfg.trials, cfg.seed));
  return out;
}

std::string run_count(const RunConfig& cfg) {
  auto c = tree_topology_counts(cfg.taxa);
  std::string out = "rooted\t" + c.rooted.str() + "\n";
  if (c.unrooted) out = "unrooted\t" + c.unrooted->str() + "\n" + out;
  return out;
}

}  // namespace

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw InputError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError("cannot rename output into '" + path + "': " + ec.message());
  }
}

std::string run_pipeline(const RunConfig& cfg, std::istream& in) {
  const std::string& sub = cfg.subcommand;
  if (sub == "dist") {
    const std::string type = input_type(cfg, "profiles");
    if (type == "matrix") throw InputError("dist reads profiles or sequences");
    return write_phylip_matrix(load_matrix(cfg, in, type));
  }
  if (sub == "tree") return run_tree(cfg, in);
  if (sub == "mst") {
    auto d = load_matrix(cfg, in, input_type(cfg, "matrix"));
    auto alg = parse_mst_algorithm(cfg.algorithm);
    if (!alg) throw InputError("unknown algorithm '" + cfg.algorithm + "'");
    return write_edges(generic_mst(WeightedGraph::complete(d), natural_edge_order(), *alg), edge_format(cfg));
  }
  if (sub == "goeburst") return run_goeburst_cmd(cfg, in);
  if (sub == "fhp") {
    std::istringstream text(read_all(cfg.input, in));
    auto t = run_fhp(read_sequences(text));
    if (!cfg.nodes_output.empty()) write_atomically(cfg.nodes_output, write_steiner_nodes(t));
    return write_edges(t, edge_format(cfg));
  }
  if (sub == "check") return run_check(cfg);
  if (sub == "count") return run_count(cfg);
  throw InputError("unknown subcommand '" + sub + "'");
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Distance-based phylogenetic inference: distances, trees, spanning forests."};
  app.name("distphylo");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "0.1.0");

  auto add_io = [&](CLI::App* s, const char* default_type, std::vector<std::string> types) {
    s->add_option("-i,--input", cfg.input, "Input file, '-' for stdin")->capture_default_str();
    s->add_option("-o,--output", cfg.output, "Output file, '-' for stdout")->capture_default_str();
    s->add_option("--input-type", cfg.input_type, std::string("Input kind (default ") + default_type + ")")
        ->check(CLI::IsMember(types));
  };
  auto add_distance = [&](CLI::App* s) {
    s->add_option("--metric", cfg.metric, "Distance metric")
        ->check(CLI::IsMember({"raw", "normalized", "jc"}))
        ->capture_default_str();
    s->add_option("--missing", cfg.missing, "Missing-allele policy")
        ->check(CLI::IsMember({"strict", "pairwise"}))
        ->capture_default_str();
    s->add_flag("--rescale", cfg.rescale, "Rescale pairwise-deletion distances to all loci");
    s->add_option("--jc-ceiling", cfg.jc_ceiling, "Report this value instead of failing when JC saturates");
    s->add_option("--threads", cfg.threads, "Worker threads for matrix building")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
  };
  auto add_format = [&](CLI::App* s) {
    s->add_option("--format", cfg.format, "Edge output format")
        ->check(CLI::IsMember({"tsv", "dot"}))
        ->capture_default_str();
  };

  auto* dist = app.add_subcommand("dist", "Profiles or sequences to a PHYLIP distance matrix");
  add_io(dist, "profiles", {"profiles", "sequences"});
  add_distance(dist);

  auto* tree = app.add_subcommand("tree", "Infer a tree, written as Newick");
  add_io(tree, "matrix", {"matrix", "profiles", "sequences"});
  add_distance(tree);
  tree->add_option("-m,--method", cfg.method, "Inference method")->required()->check(CLI::IsMember(kTreeMethods));
  tree->add_option("--engine", cfg.engine, "Agglomeration engine")
      ->check(CLI::IsMember({"naive", "nn-chain"}))
      ->capture_default_str();
  tree->add_option("--order", cfg.order, "Taxon insertion order for gme/bme")
      ->check(CLI::IsMember({"input", "random"}))
      ->capture_default_str();
  tree->add_option("--seed", cfg.seed, "Seed for --order random")->capture_default_str();
  tree->add_option("--tie", cfg.tie, "Tie rule (default lexicographic for clustering, avoid-newest for NJ)")
      ->check(CLI::IsMember({"lexicographic", "avoid-newest"}));
  tree->add_option("--bionj-selection", cfg.bionj_selection, "BIONJ pair selection")
      ->check(CLI::IsMember({"q-over-d", "min-variance"}))
      ->capture_default_str();
  tree->add_flag("--clamp-negative", cfg.clamp_negative, "Clamp negative lengths or centroid distances to 0");
  tree->add_option("--precision", cfg.precision, "Significant digits in Newick lengths")
      ->check(CLI::Range(1, 17))
      ->capture_default_str();

  auto* mst = app.add_subcommand("mst", "Minimum spanning tree of the complete distance graph");
  add_io(mst, "matrix", {"matrix", "profiles", "sequences"});
  add_distance(mst);
  mst->add_option("--algorithm", cfg.algorithm, "MST algorithm")
      ->check(CLI::IsMember({"kruskal", "prim", "boruvka"}))
      ->capture_default_str();
  add_format(mst);

  auto* goeburst = app.add_subcommand("goeburst", "goeBURST forest at a locus-variant level, or the full MST");
  add_io(goeburst, "profiles", {"profiles", "matrix"});
  goeburst->add_option("--missing", cfg.missing, "Missing-allele policy")
      ->check(CLI::IsMember({"strict", "pairwise"}))
      ->capture_default_str();
  goeburst->add_option("--level", cfg.level, "1, 2, 3 or full")
      ->check(CLI::IsMember({"1", "2", "3", "full"}))
      ->capture_default_str();
  add_format(goeburst);

  auto* fhp = app.add_subcommand("fhp", "Steiner tree heuristic over aligned sequences");
  add_io(fhp, "sequences", {"sequences"});
  fhp->add_option("--nodes", cfg.nodes_output, "Also write the node table (label, sequence, kind)");
  add_format(fhp);

  auto* check = app.add_subcommand("check", "Sample convexity and commutativity of a reduction rule");
  check->add_option("-o,--output", cfg.output, "Output file, '-' for stdout")->capture_default_str();
  check->add_option("--reduction", cfg.reduction, "Reduction rule")
      ->required()
      ->check(CLI::IsMember({"upgma", "wpgma", "single", "complete", "upgmc", "wpgmc", "nj", "gme", "bme"}));
  check->add_option("--property", cfg.property, "Property to check")
      ->check(CLI::IsMember({"convexity", "commutativity", "both"}))
      ->capture_default_str();
  check->add_option("--trials", cfg.trials, "Random trials")->check(CLI::PositiveNumber)->capture_default_str();
  check->add_option("--seed", cfg.seed, "Sampler seed")->capture_default_str();

  auto* count = app.add_subcommand("count", "Number of binary tree topologies on n labelled taxa");
  count->add_option("-o,--output", cfg.output, "Output file, '-' for stdout")->capture_default_str();
  count->add_option("-n,--taxa", cfg.taxa, "Number of taxa")->required()->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "0.1.0\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 2;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    std::string text = run_pipeline(cfg, in);
    if (cfg.output == "-") out << text;
    else write_atomically(cfg.output, text);
    return 0;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace distphylo

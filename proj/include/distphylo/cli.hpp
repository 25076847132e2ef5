#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace distphylo {

// One parsed invocation. Selector strings hold the spelling accepted on the command line.
struct RunConfig {
  std::string subcommand;
  std::string input = "-";
  std::string output = "-";
  std::string input_type;  // matrix | profiles | sequences; empty picks the subcommand default

  std::string metric = "raw";
  std::string missing = "strict";
  bool rescale = false;
  std::optional<double> jc_ceiling;
  unsigned threads = 1;

  std::string method;
  std::string engine = "naive";
  std::string order = "input";
  std::string tie;  // empty picks the method default
  std::string bionj_selection = "q-over-d";
  bool clamp_negative = false;

  std::string algorithm = "kruskal";
  std::string level = "full";
  std::string format = "tsv";
  std::string nodes_output;  // fhp node table, optional

  std::string reduction;
  std::string property = "both";
  std::size_t trials = 10000;
  std::size_t taxa = 0;

  std::uint64_t seed = 0;
  int precision = 10;
};

// Produces the primary output text for `cfg`. Side outputs (fhp node table) are written directly.
std::string run_pipeline(const RunConfig& cfg, std::istream& in);

// Writes through a temporary file in the same directory, then renames over `path`.
void write_atomically(const std::string& path, const std::string& content);

// Full command-line entry point; args excludes the program name. Returns the exit code:
// 0 ok, 2 malformed input or usage, 3 domain error, 4 internal invariant violation.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace distphylo

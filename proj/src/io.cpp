#include "distphylo/io.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "distphylo/errors.hpp"

namespace distphylo {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::string format_number(double v, int precision) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  std::string s(buf);
  if (s == "-0") return "0";
  return s;
}

ProfileSet read_profiles(std::istream& in, const ProfileReadOptions& options) {
  std::unordered_set<std::string> markers(options.missing_markers.begin(), options.missing_markers.end());
  auto is_marker = [&](const std::string& t) { return markers.count(t) > 0; };

  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, tokens)
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split_tabs(line));
  }
  if (rows.empty()) throw InputError("no profiles in input");

  ProfileSet set;
  bool has_freq = false;
  std::size_t first_data = 0;
  {
    const auto& head = rows.front().second;
    bool first_numeric = parse_int(head.front()).has_value();
    bool other_text = std::any_of(head.begin() + 1, head.end(),
                                  [&](const std::string& t) { return !parse_int(t) && !is_marker(t); });
    if (!first_numeric && other_text) {
      first_data = 1;
      std::vector<std::string> names(head.begin() + 1, head.end());
      if (!names.empty() && lower(names.back()) == "freq") {
        has_freq = true;
        names.pop_back();
      }
      set.locus_names = std::move(names);
    }
  }

  if (first_data == rows.size()) throw InputError("header without profiles");
  const std::size_t columns =
      first_data == 1 ? set.locus_names.size() + 1 + (has_freq ? 1 : 0) : rows.front().second.size();
  const std::size_t loci = columns - 1 - (has_freq ? 1 : 0);
  if (columns < 2 || loci == 0) throw InputError("profiles need a label column and at least one locus");

  std::unordered_set<std::string> seen;
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& [ln, tok] = rows[r];
    const std::string& label = tok.front();
    auto where = [&](std::size_t col) {
      return "row " + label + " (line " + std::to_string(ln) + "), column " + std::to_string(col);
    };
    if (label.empty()) throw InputError("line " + std::to_string(ln) + ": empty label");
    if (tok.size() != columns)
      throw InputError("row " + label + " (line " + std::to_string(ln) + "): expected " + std::to_string(columns) +
                       " columns, found " + std::to_string(tok.size()));
    if (!seen.insert(label).second) throw InputError("row " + label + " (line " + std::to_string(ln) + "): duplicate label");
    TypingProfile p;
    p.label = label;
    p.id = set.profiles.size();
    p.alleles.reserve(loci);
    for (std::size_t c = 1; c <= loci; ++c) {
      const std::string& t = tok[c];
      if (is_marker(t)) {
        p.alleles.push_back(kMissingAllele);
        continue;
      }
      auto v = parse_int(t);
      if (!v || *v < 0) throw InputError(where(c + 1) + ": invalid allele '" + t + "'");
      p.alleles.push_back(*v);
    }
    if (has_freq) {
      auto f = parse_int(tok.back());
      if (!f || *f < 1) throw InputError(where(columns) + ": frequency must be a positive integer, got '" + tok.back() + "'");
      p.frequency = static_cast<std::uint64_t>(*f);
    }
    set.profiles.push_back(std::move(p));
  }
  if (set.profiles.empty()) throw InputError("no profiles in input");
  return set;
}

std::string write_profiles(const ProfileSet& profiles) {
  std::ostringstream os;
  bool freq = std::any_of(profiles.profiles.begin(), profiles.profiles.end(),
                          [](const TypingProfile& p) { return p.frequency != 1; });
  if (!profiles.locus_names.empty() || freq) {
    os << "label";
    for (std::size_t c = 0; c < profiles.loci(); ++c)
      os << '\t' << (profiles.locus_names.empty() ? "locus" + std::to_string(c + 1) : profiles.locus_names[c]);
    if (freq) os << "\tfreq";
    os << '\n';
  }
  for (const auto& p : profiles.profiles) {
    os << p.label;
    for (Allele a : p.alleles) {
      os << '\t';
      if (a == kMissingAllele)
        os << '-';
      else
        os << a;
    }
    if (freq) os << '\t' << p.frequency;
    os << '\n';
  }
  return os.str();
}

DistanceMatrix read_phylip_matrix(std::istream& in) {
  std::vector<std::string> tokens;
  std::vector<bool> starts_line;
  std::string line, tok;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    bool first = true;
    while (ls >> tok) {
      tokens.push_back(tok);
      starts_line.push_back(first);
      first = false;
    }
  }
  if (tokens.empty()) throw InputError("empty matrix file");
  auto n_val = parse_int(tokens.front());
  if (!n_val || *n_val < 1) throw InputError("first token must be the taxon count, got '" + tokens.front() + "'");
  const std::size_t n = static_cast<std::size_t>(*n_val);
  const std::size_t body = tokens.size() - 1;

  // Values per row i for each layout.
  std::function<std::size_t(std::size_t)> per_row;
  bool square = false;
  if (body == n * (n + 1)) {
    square = true;
    per_row = [n](std::size_t) { return n; };
  } else if (body == n + n * (n - 1) / 2) {
    per_row = [](std::size_t i) { return i; };
  } else if (body == n + n * (n + 1) / 2) {
    per_row = [](std::size_t i) { return i + 1; };
  } else {
    throw InputError("wrong value count for " + std::to_string(n) + " taxa: found " + std::to_string(body) +
                     " tokens after the header (square needs " + std::to_string(n * (n + 1)) + ")");
  }

  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  std::size_t pos = 1;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (!starts_line[pos])
      throw InputError("row " + std::to_string(i + 1) + " must start on its own line, found '" + tokens[pos] + "'");
    const std::string& label = tokens[pos++];
    if (!seen.insert(label).second) throw InputError("duplicate label " + label);
    labels.push_back(label);
    std::size_t count = per_row(i);
    for (std::size_t j = 0; j < count; ++j) {
      const std::string& t = tokens[pos++];
      auto v = parse_double(t);
      if (!v || !std::isfinite(*v))
        throw InputError("row " + label + ", value " + std::to_string(j + 1) + ": not a number '" + t + "'");
      if (*v < 0) throw InputError("row " + label + ", value " + std::to_string(j + 1) + ": negative entry " + t);
      rows[i][j] = *v;
    }
  }
  if (square) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i][i] != 0.0) throw InputError("row " + labels[i] + ": non-zero diagonal");
      for (std::size_t j = 0; j < i; ++j) {
        if (std::fabs(rows[i][j] - rows[j][i]) > 1e-9) {
          std::ostringstream os;
          os << "asymmetric entries (" << labels[i] << ", " << labels[j] << ") = " << rows[i][j] << " vs ("
             << labels[j] << ", " << labels[i] << ") = " << rows[j][i];
          throw InputError(os.str());
        }
        rows[j][i] = rows[i][j];
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i][i] != 0.0) throw InputError("row " + labels[i] + ": non-zero diagonal");
      for (std::size_t j = 0; j < i; ++j) rows[j][i] = rows[i][j];
    }
  }
  return DistanceMatrix::from_rows(std::move(labels), rows);
}

std::string write_phylip_matrix(const DistanceMatrix& m) {
  std::ostringstream os;
  os << m.size() << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << m.label(i);
    for (std::size_t j = 0; j < m.size(); ++j) os << ' ' << format_number(m(i, j), 10);
    os << '\n';
  }
  return os.str();
}

CharacterSequenceSet read_sequences(std::istream& in) {
  CharacterSequenceSet s;
  std::string line;
  std::size_t line_no = 0;
  bool fasta = false;
  bool decided = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (!decided) {
      fasta = t.front() == '>';
      decided = true;
    }
    if (fasta) {
      if (t.front() == '>') {
        std::string label = trim(std::string_view(t).substr(1));
        if (label.empty()) throw InputError("line " + std::to_string(line_no) + ": empty FASTA label");
        s.labels.push_back(label);
        s.sequences.emplace_back();
      } else {
        s.sequences.back() += t;
      }
      continue;
    }
    auto cut = t.find_first_of(" \t");
    if (cut == std::string::npos)
      throw InputError("line " + std::to_string(line_no) + ": expected 'label<TAB>sequence'");
    s.labels.push_back(t.substr(0, cut));
    s.sequences.push_back(trim(std::string_view(t).substr(cut + 1)));
    if (s.sequences.back().find_first_of(" \t") != std::string::npos)
      throw InputError("line " + std::to_string(line_no) + ": sequence contains whitespace");
  }
  if (s.labels.empty()) throw InputError("no sequences in input");
  s.validate();
  return s;
}

namespace {

std::string newick_label(const std::string& label) {
  if (label.find_first_of(" \t()[]':;,") == std::string::npos && !label.empty()) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::string write_newick(const Dendrogram& t, int precision) {
  t.validate();
  const std::size_t n = t.leaf_count();
  if (n == 1) return newick_label(t.labels[0]) + ";\n";
  auto heights = t.node_heights();
  std::vector<std::array<std::size_t, 2>> kids(t.node_count());
  std::vector<std::string> min_label(t.node_count());
  for (std::size_t i = 0; i < n; ++i) min_label[i] = t.labels[i];
  for (std::size_t s = 0; s < t.merges.size(); ++s) {
    const auto& m = t.merges[s];
    kids[n + s] = {m.left, m.right};
    min_label[n + s] = std::min(min_label[m.left], min_label[m.right]);
  }
  std::function<void(std::size_t, std::string&)> emit = [&](std::size_t node, std::string& out) {
    if (node < n) {
      out += newick_label(t.labels[node]);
      return;
    }
    auto [a, b] = kids[node];
    if (min_label[b] < min_label[a]) std::swap(a, b);
    out += '(';
    emit(a, out);
    out += ':' + format_number(heights[node] - heights[a], precision);
    out += ',';
    emit(b, out);
    out += ':' + format_number(heights[node] - heights[b], precision);
    out += ')';
  };
  std::string out;
  emit(t.node_count() - 1, out);
  return out + ";\n";
}

std::string write_newick(const PhyloTree& t, int precision) {
  t.validate();
  const std::size_t n = t.leaf_count();
  if (n == 0) return ";\n";
  if (n == 1) return newick_label(t.label(0)) + ";\n";
  std::size_t smallest = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (t.label(i) < t.label(smallest)) smallest = i;

  // Smallest descendant label per directed edge, computed lazily.
  std::map<std::pair<std::size_t, std::size_t>, std::string> min_below;
  std::function<const std::string&(std::size_t, std::size_t)> min_label = [&](std::size_t node,
                                                                              std::size_t from) -> const std::string& {
    auto key = std::make_pair(node, from);
    auto it = min_below.find(key);
    if (it != min_below.end()) return it->second;
    std::string best = t.is_leaf(node) ? t.label(node) : std::string();
    bool have = t.is_leaf(node);
    for (auto [nb, e] : t.neighbors(node)) {
      if (nb == from) continue;
      const std::string& m = min_label(nb, node);
      if (!have || m < best) best = m, have = true;
    }
    return min_below.emplace(key, best).first->second;
  };
  std::function<void(std::size_t, std::size_t, std::string&)> emit = [&](std::size_t node, std::size_t from,
                                                                         std::string& out) {
    if (t.is_leaf(node) && from != static_cast<std::size_t>(-1)) {
      out += newick_label(t.label(node));
      return;
    }
    std::vector<std::pair<std::size_t, std::size_t>> kids;
    for (auto [nb, e] : t.neighbors(node))
      if (nb != from) kids.emplace_back(nb, e);
    std::sort(kids.begin(), kids.end(),
              [&](const auto& a, const auto& b) { return min_label(a.first, node) < min_label(b.first, node); });
    out += '(';
    for (std::size_t c = 0; c < kids.size(); ++c) {
      if (c) out += ',';
      emit(kids[c].first, node, out);
      out += ':' + format_number(t.edges()[kids[c].second].length, precision);
    }
    out += ')';
  };

  std::string out;
  const auto& adj = t.neighbors(smallest);
  std::size_t root = adj.front().first;
  if (t.is_leaf(root)) {
    // Two leaves joined directly: "(A:0,B:d);".
    double len = t.edges()[adj.front().second].length;
    std::string a = newick_label(t.label(smallest)), b = newick_label(t.label(root));
    return "(" + a + ":0," + b + ":" + format_number(len, precision) + ");\n";
  }
  emit(root, static_cast<std::size_t>(-1), out);
  return out + ";\n";
}

namespace {

struct Row {
  std::string u, v, weight;
};

std::vector<Row> sorted_rows(const std::vector<std::string>& labels,
                             const std::vector<std::tuple<std::size_t, std::size_t, std::string>>& edges) {
  std::vector<Row> rows;
  for (const auto& [a, b, w] : edges) {
    const std::string& la = labels[a];
    const std::string& lb = labels[b];
    if (lb < la)
      rows.push_back({lb, la, w});
    else
      rows.push_back({la, lb, w});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.u, x.v, x.weight) < std::tie(y.u, y.v, y.weight);
  });
  return rows;
}

std::string dot_id(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string render(const std::vector<std::string>& labels, const std::vector<Row>& rows, EdgeFormat format,
                   const std::vector<std::string>* node_text) {
  std::ostringstream os;
  if (format == EdgeFormat::tsv) {
    for (const auto& r : rows) os << r.u << '\t' << r.v << '\t' << r.weight << '\n';
    return os.str();
  }
  os << "graph G {\n";
  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  for (std::size_t i : order) {
    os << "  " << dot_id(labels[i]);
    if (node_text) os << " [label=" << dot_id(labels[i] + "\\n" + (*node_text)[i]) << "]";
    os << ";\n";
  }
  for (const auto& r : rows)
    os << "  " << dot_id(r.u) << " -- " << dot_id(r.v) << " [label=" << dot_id(r.weight) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace

std::string write_edges(const Forest& f, EdgeFormat format) {
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> edges;
  for (const auto& e : f.edges) edges.emplace_back(e.u, e.v, format_number(e.weight, 10));
  return render(f.labels, sorted_rows(f.labels, edges), format, nullptr);
}

std::string write_edges(const SteinerTree& t, EdgeFormat format) {
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> edges;
  for (const auto& e : t.edges) edges.emplace_back(e.u, e.v, std::to_string(e.weight));
  return render(t.labels, sorted_rows(t.labels, edges), format, &t.sequences);
}

std::string write_steiner_nodes(const SteinerTree& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.labels.size(); ++i)
    os << t.labels[i] << '\t' << t.sequences[i] << '\t' << (t.is_steiner(i) ? "steiner" : "original") << '\n';
  return os.str();
}

}  // namespace distphylo

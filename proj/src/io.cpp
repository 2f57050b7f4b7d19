#include "nodeclass/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "nodeclass/errors.hpp"

namespace nodeclass {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view token, std::int64_t& out) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

// Splits a line on whitespace and/or commas.
std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != ',' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::optional<std::size_t> parse_node_header(std::string_view line) {
  line = trim(line);
  constexpr std::string_view kPrefix = "# nodes ";
  if (!line.starts_with(kPrefix)) return std::nullopt;
  auto rest = trim(line.substr(kPrefix.size()));
  rest = rest.substr(0, rest.find_first_of(" \t"));
  std::int64_t n = 0;
  if (!parse_int(rest, n) || n < 0) return std::nullopt;
  return static_cast<std::size_t>(n);
}

// One integer per non-empty line.
std::vector<std::int64_t> read_int_column(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::int64_t> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    std::int64_t v = 0;
    if (!parse_int(t, v)) throw ParseError(path.string(), lineno, "expected one integer");
    values.push_back(v);
  }
  return values;
}

}  // namespace

LoadedGraph load_edge_list(const std::filesystem::path& path, bool one_indexed) {
  auto in = open_input(path);
  const std::string where = path.string();
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> literal_n;
  std::unordered_map<std::int64_t, NodeId> dense;
  LoadedGraph out;
  std::vector<Edge> edges;
  bool any_record = false;

  auto intern = [&](std::int64_t raw) -> NodeId {
    const std::int64_t id = one_indexed ? raw - 1 : raw;
    if (literal_n) {
      if (id < 0 || static_cast<std::size_t>(id) >= *literal_n)
        throw ParseError(where, lineno, "node id outside declared range");
      return static_cast<NodeId>(id);
    }
    auto [it, inserted] = dense.try_emplace(id, static_cast<NodeId>(out.original_ids.size()));
    if (inserted) out.original_ids.push_back(id);
    return it->second;
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (!any_record && !literal_n) literal_n = parse_node_header(t);
      continue;
    }
    const auto tokens = tokenize(t);
    std::int64_t a = 0, b = 0;
    if (tokens.size() != 2 || !parse_int(tokens[0], a) || !parse_int(tokens[1], b))
      throw ParseError(where, lineno, "expected two integer node ids");
    any_record = true;
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    edges.emplace_back(u, v);
  }
  if (!any_record && !(literal_n && *literal_n > 0)) throw DataError(where + ": empty edge list");

  std::size_t n = out.original_ids.size();
  if (literal_n) {
    n = *literal_n;
    out.original_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.original_ids[i] = static_cast<std::int64_t>(i);
  }
  out.graph = Graph::from_edges(n, edges, &out.summary);
  return out;
}

GraphCollection load_tu_dataset(const std::filesystem::path& dir, const std::string& name) {
  const auto a_path = dir / (name + "_A.txt");
  const auto ind_path = dir / (name + "_graph_indicator.txt");
  const auto lab_path = dir / (name + "_graph_labels.txt");

  const auto indicator = read_int_column(ind_path);
  const auto raw_labels = read_int_column(lab_path);
  const std::size_t num_graphs = raw_labels.size();
  if (num_graphs == 0) throw FormatError(lab_path.string() + ": no graphs");

  // Local ids follow increasing global node id within each graph.
  std::vector<std::size_t> graph_size(num_graphs, 0);
  std::vector<NodeId> local(indicator.size());
  for (std::size_t i = 0; i < indicator.size(); ++i) {
    const std::int64_t gid = indicator[i];
    if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs)
      throw ParseError(ind_path.string(), i + 1, "graph id outside 1.." + std::to_string(num_graphs));
    local[i] = static_cast<NodeId>(graph_size[static_cast<std::size_t>(gid - 1)]++);
  }

  std::vector<std::vector<Edge>> per_graph(num_graphs);
  {
    auto in = open_input(a_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto t = trim(line);
      if (t.empty()) continue;
      const auto tokens = tokenize(t);
      std::int64_t u = 0, v = 0;
      if (tokens.size() != 2 || !parse_int(tokens[0], u) || !parse_int(tokens[1], v))
        throw ParseError(a_path.string(), lineno, "expected \"u, v\"");
      const auto in_range = [&](std::int64_t x) { return x >= 1 && static_cast<std::size_t>(x) <= indicator.size(); };
      if (!in_range(u) || !in_range(v)) throw ParseError(a_path.string(), lineno, "node id outside indicator range");
      const auto gu = indicator[static_cast<std::size_t>(u - 1)];
      const auto gv = indicator[static_cast<std::size_t>(v - 1)];
      if (gu != gv)
        throw FormatError(a_path.string() + ":" + std::to_string(lineno) + ": edge joins graphs " +
                          std::to_string(gu) + " and " + std::to_string(gv));
      per_graph[static_cast<std::size_t>(gu - 1)].emplace_back(local[static_cast<std::size_t>(u - 1)],
                                                               local[static_cast<std::size_t>(v - 1)]);
    }
  }

  std::vector<std::int64_t> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  GraphCollection out;
  for (auto label : distinct) out.class_names.push_back(std::to_string(label));
  out.graphs.reserve(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    out.graphs.push_back(Graph::from_edges(graph_size[g], per_graph[g]));
    out.labels.push_back(static_cast<int>(
        std::lower_bound(distinct.begin(), distinct.end(), raw_labels[g]) - distinct.begin()));
    out.origin_ids.push_back(name + ":" + std::to_string(g + 1));
  }
  return out;
}

std::filesystem::path score_csv_path(const std::filesystem::path& edge_path) {
  auto p = edge_path;
  p += ".scores.csv";
  return p;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed for " + path.string());
}

void export_graph(const Graph& g, std::span<const double> scores, const std::filesystem::path& path) {
  if (!scores.empty() && scores.size() != g.num_nodes())
    throw std::invalid_argument("export_graph: score count does not match node count");
  std::ostringstream edges;
  edges << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << "\n";
  for (auto [u, v] : g.edges()) edges << u << ' ' << v << '\n';
  write_text_file(path, edges.str());
  if (scores.empty()) return;
  std::ostringstream csv;
  csv << "node_id,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i) csv << i << ',' << format_double(scores[i]) << '\n';
  write_text_file(score_csv_path(path), csv.str());
}

}  // namespace nodeclass

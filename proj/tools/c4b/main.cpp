#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "bimgraph/bench/bench.hpp"
#include "bimgraph/bim/queries.hpp"
#include "bimgraph/exec/executor.hpp"
#include "bimgraph/graph/ifc_builder.hpp"
#include "bimgraph/io/io.hpp"
#include "bimgraph/query/parser.hpp"
#include "bimgraph/step/file.hpp"
#include "bimgraph/step/parser.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bimgraph;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kQuery = 3, kIo = 4 };

struct Common {
  std::string schema_file;
  bool no_hierarchy = false;
  bool json = false;

  std::optional<fs::path> schema_path() const {
    return schema_file.empty() ? std::nullopt : std::optional<fs::path>(schema_file);
  }
  exec::ExecOptions exec_options() const { return exec::ExecOptions{!no_hierarchy}; }
};

bool is_step_path(const fs::path& p) {
  auto ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".ifc" || ext == ".ifcspf" || ext == ".stp" || ext == ".step";
}

struct Model {
  graph::PropertyGraph graph;
  /// Set when the input was a STEP file.
  std::optional<std::size_t> instances;
  std::optional<std::size_t> entities;
  std::size_t warnings = 0;
};

Model load_model(const std::string& path, const Common& c) {
  if (!fs::exists(path)) throw IoError("no such file: " + path);
  Model m;
  if (is_step_path(path)) {
    auto file = step::read_file(path);
    auto result = graph::build_graph(file, schema::schema_for(step::effective_version(file), c.schema_path()));
    std::set<std::string> entities;
    for (const auto& [id, inst] : file.instances) entities.insert(inst.entity);
    m.instances = file.instances.size();
    m.entities = entities.size();
    m.warnings = result.report.warnings.size();
    m.graph = std::move(result.graph);
  } else {
    m.graph = io::load_graph(path, c.schema_path());
  }
  return m;
}

std::optional<io::Format> format_for(const std::string& name, const fs::path& out) {
  if (!name.empty()) return io::parse_format(name);
  auto ext = out.extension().string();
  if (ext == ".graphml") return io::Format::GraphML;
  if (ext == ".json") return io::Format::Json;
  if (ext == ".cypher" || ext == ".cql") return io::Format::CypherScript;
  return io::Format::Archive;
}

bool has_path_column(const exec::ResultSet& r) {
  if (r.rows.empty()) return false;
  for (const auto& v : r.rows.front())
    if (std::holds_alternative<exec::PathValue>(v)) return true;
  return false;
}

void print_result(const graph::PropertyGraph& g, const exec::ResultSet& r, bool as_json) {
  std::optional<exec::Subgraph> sub;
  if (has_path_column(r)) sub = exec::result_subgraph(r);
  if (as_json) {
    auto j = json::parse(io::result_to_json(g, r));
    if (sub) j["subgraph"] = {{"nodes", sub->nodes.size()}, {"edges", sub->edges.size()}};
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << exec::format_table(g, r);
  std::cout << "(" << r.rows.size() << (r.rows.size() == 1 ? " row" : " rows") << ")\n";
  if (sub) std::cout << "subgraph: " << sub->nodes.size() << " nodes, " << sub->edges.size() << " edges\n";
}

std::string human_size(std::uintmax_t bytes) {
  char buf[32];
  if (bytes >= 1024 * 1024)
    std::snprintf(buf, sizeof buf, "%.1f MB", static_cast<double>(bytes) / (1024.0 * 1024.0));
  else
    std::snprintf(buf, sizeof buf, "%.1f KB", static_cast<double>(bytes) / 1024.0);
  return buf;
}

/// `121` -> integer, `0.9` -> real, `true` -> bool, `'x'` or anything else -> text.
query::Literal parse_param_value(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.size() >= 2 && text.front() == '\'' && text.back() == '\'') return text.substr(1, text.size() - 2);
  std::int64_t i = 0;
  auto end = text.data() + text.size();
  if (auto r = std::from_chars(text.data(), end, i); r.ec == std::errc{} && r.ptr == end && !text.empty()) return i;
  double d = 0;
  if (auto r = std::from_chars(text.data(), end, d); r.ec == std::errc{} && r.ptr == end && !text.empty()) return d;
  return text;
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& format, const Common& c) {
  auto f = format_for(format, out);
  if (!f) {
    std::cerr << "unknown format '" << format << "'\n";
    return kUsage;
  }
  auto m = load_model(in, c);
  io::save_graph(m.graph, *f, out);
  std::cout << "wrote " << out << " (" << io::to_string(*f) << "): " << m.graph.node_count() << " nodes, "
            << m.graph.edge_count() << " edges\n";
  if (m.warnings) std::cerr << m.warnings << " build warnings\n";
  return kOk;
}

int cmd_stats(const std::string& in, bool labels, const Common& c) {
  auto m = load_model(in, c);
  auto stats = m.graph.stats();
  auto size = fs::file_size(in);
  std::size_t entities = m.entities.value_or(stats.per_label.size());
  std::size_t instances = m.instances.value_or(stats.nodes);
  std::string version(schema::to_string(m.graph.schema().version()));
  if (c.json) {
    json j{{"model", fs::path(in).filename().string()},
           {"file_size", size},
           {"entities", entities},
           {"instances", instances},
           {"version", version},
           {"nodes", stats.nodes},
           {"edges", stats.edges}};
    if (labels) j["per_label"] = stats.per_label;
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << "Model\tFile Size\tEntities/Instances\tVersion\tNodes\tEdges\n"
            << fs::path(in).filename().string() << '\t' << human_size(size) << '\t' << entities << '/' << instances
            << '\t' << version << '\t' << stats.nodes << '\t' << stats.edges << '\n';
  if (labels) {
    std::cout << "\nLabel\tNodes\n";
    for (const auto& [label, n] : stats.per_label) std::cout << label << '\t' << n << '\n';
  }
  return kOk;
}

int cmd_query(const std::string& in, const std::string& text, bool explain, const Common& c) {
  auto m = load_model(in, c);
  auto ast = query::parse_query(text);
  if (explain) {
    std::cout << exec::explain(m.graph, ast, c.exec_options()).to_string();
    return kOk;
  }
  print_result(m.graph, exec::execute(m.graph, ast, c.exec_options()), c.json);
  return kOk;
}

int cmd_repl(const std::string& in, const Common& c) {
  auto m = load_model(in, c);
  const bool tty = isatty(STDIN_FILENO);
  std::string line;
  while (true) {
    if (tty) std::cout << "c4b> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line == ":quit" || line == ":q") break;
    try {
      if (line == ":stats") {
        auto s = m.graph.stats();
        std::cout << s.nodes << " nodes, " << s.edges << " edges, " << s.per_label.size() << " labels\n";
      } else if (line == ":help") {
        std::cout << ":quit  :stats  :explain <query>  <query>\n";
      } else if (line.rfind(":explain", 0) == 0) {
        std::cout << exec::explain(m.graph, query::parse_query(line.substr(8)), c.exec_options()).to_string();
      } else if (line[0] == ':') {
        std::cout << "unknown command " << line << " (:help)\n";
      } else {
        print_result(m.graph, exec::execute(m.graph, line, c.exec_options()), c.json);
      }
    } catch (const query::QueryError& e) {
      std::cout << "error: " << e.what() << '\n';
    }
  }
  return kOk;
}

int cmd_run(const std::string& in, const std::string& name, const std::vector<std::string>& raw_params,
            const Common& c) {
  bim::Params params;
  for (const auto& p : raw_params) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "parameter '" << p << "' is not key=value\n";
      return kUsage;
    }
    params[p.substr(0, eq)] = parse_param_value(p.substr(eq + 1));
  }
  auto text = bim::instantiate(name, params);
  auto m = load_model(in, c);
  if (!c.json) std::cout << "// " << text << '\n';
  print_result(m.graph, bim::run_functional(m.graph, name, params, c.exec_options()), c.json);
  return kOk;
}

int cmd_list(const Common& c) {
  if (c.json) {
    json arr = json::array();
    for (const auto& q : bim::functional_queries()) {
      json params = json::array();
      for (const auto& p : q.params) params.push_back(p.name);
      arr.push_back({{"name", q.name}, {"description", q.description}, {"template", q.template_text}, {"params", params}});
    }
    std::cout << arr.dump(2) << '\n';
    return kOk;
  }
  for (const auto& q : bim::functional_queries()) {
    std::cout << q.name;
    for (const auto& p : q.params) std::cout << " " << p.name << "=...";
    std::cout << "\n    " << q.template_text << '\n';
  }
  return kOk;
}

int cmd_check(const std::string& in, const std::vector<std::string>& rules_on, std::size_t min_duplicates,
              std::size_t max_door_spaces, const Common& c) {
  bim::QualityRules rules;
  rules.min_duplicates = min_duplicates;
  rules.max_door_spaces = max_door_spaces;
  if (!rules_on.empty()) {
    rules.duplicate_boundary = rules.door_over_connection = false;
    for (const auto& r : rules_on) {
      if (r == "duplicate-boundary")
        rules.duplicate_boundary = true;
      else if (r == "door-over-connection")
        rules.door_over_connection = true;
      else {
        std::cerr << "unknown rule '" << r << "'\n";
        return kUsage;
      }
    }
  }
  auto m = load_model(in, c);
  auto findings = bim::quality_check(m.graph, rules);
  if (c.json) {
    json arr = json::array();
    for (const auto& f : findings) {
      json subjects = json::array();
      for (auto id : f.subjects) subjects.push_back(id.value);
      arr.push_back({{"rule", f.rule},
                     {"severity", bim::to_string(f.severity)},
                     {"subjects", subjects},
                     {"multiplicity", f.multiplicity}});
    }
    std::cout << arr.dump(2) << '\n';
    return kOk;
  }
  for (const auto& f : findings) {
    std::cout << bim::to_string(f.severity) << '\t' << f.rule << '\t';
    if (f.rule == "door-over-connection") {
      std::cout << "door #" << f.subjects[0].value << " bounds " << f.multiplicity << " spaces:";
      for (std::size_t i = 1; i < f.subjects.size(); ++i) std::cout << " #" << f.subjects[i].value;
    } else {
      std::cout << "element #" << f.subjects[0].value << " space #" << f.subjects[1].value << " x"
                << f.multiplicity;
    }
    std::cout << '\n';
  }
  std::cout << findings.size() << " findings\n";
  return kOk;
}

struct BenchQuery {
  std::string name;  // empty for ad-hoc queries
  std::string text;
};

int cmd_bench(const std::vector<std::string>& inputs, const std::vector<std::string>& queries, std::size_t iterations,
              const Common& c) {
  std::vector<BenchQuery> plan;
  for (const auto& q : queries) plan.push_back({"", q});
  if (plan.empty())
    for (const auto& q : bim::functional_queries())
      if (q.params.empty()) plan.push_back({q.name, q.template_text});

  json models = json::array();
  std::map<std::string, std::vector<bench::SizeSample>> families;
  for (const auto& in : inputs) {
    auto m = load_model(in, c);
    json results = json::array();
    if (!c.json)
      std::cout << "# " << in << ": " << m.graph.node_count() << " nodes, " << m.graph.edge_count() << " edges\n"
                << "query\trows\tsubgraph_nodes\tsubgraph_edges\tmax_ms\tmean_ms\tmin_ms\n";
    for (const auto& q : plan) {
      auto r = bench::bench_query(m.graph, q.text, iterations, c.exec_options());
      auto rows = exec::execute(m.graph, q.text, c.exec_options());
      json entry{{"name", q.name.empty() ? json(nullptr) : json(q.name)},
                 {"query", q.text},
                 {"iterations", r.iterations},
                 {"rows", r.rows},
                 {"parse_ms", r.parse_ms},
                 {"max_ms", r.max_ms},
                 {"mean_ms", r.mean_ms},
                 {"min_ms", r.min_ms},
                 {"durations_ms", r.durations_ms},
                 {"subgraph", nullptr}};
      std::string sub_nodes = "-", sub_edges = "-";
      if (has_path_column(rows)) {
        auto sub = exec::result_subgraph(rows);
        entry["subgraph"] = {{"nodes", sub.nodes.size()}, {"edges", sub.edges.size()}};
        sub_nodes = std::to_string(sub.nodes.size());
        sub_edges = std::to_string(sub.edges.size());
        families[q.name.empty() ? q.text : q.name].push_back(
            {in, static_cast<double>(sub.nodes.size()), static_cast<double>(sub.edges.size()), r.min_ms});
      }
      if (!c.json) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "\t%.4f\t%.4f\t%.4f", r.max_ms, r.mean_ms, r.min_ms);
        std::cout << (q.name.empty() ? q.text : q.name) << '\t' << r.rows << '\t' << sub_nodes << '\t' << sub_edges
                  << buf << '\n';
      }
      results.push_back(std::move(entry));
    }
    models.push_back({{"path", in},
                      {"nodes", m.graph.node_count()},
                      {"edges", m.graph.edge_count()},
                      {"results", std::move(results)}});
  }

  json correlation = json::object();
  if (inputs.size() >= 3) {
    if (!c.json) std::cout << "\nfamily\tr_nodes\tr_edges\n";
    for (const auto& [family, samples] : families) {
      if (samples.size() < 3) continue;
      auto r = bench::correlate(samples);
      correlation[family] = {{"nodes", r.nodes},
                             {"edges", r.edges},
                             {"nodes_degenerate", r.nodes_degenerate},
                             {"edges_degenerate", r.edges_degenerate},
                             {"samples", r.samples}};
      if (!c.json) std::printf("%s\t%.3f\t%.3f\n", family.c_str(), r.nodes, r.edges);
    }
  }
  if (c.json) {
    json report{{"iterations", iterations},
                {"hierarchy_aware", !c.no_hierarchy},
                {"models", std::move(models)},
                {"correlation", std::move(correlation)}};
    std::cout << report.dump(2) << '\n';
  }
  return kOk;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const query::QueryError& e) {
    std::cerr << "query error: " << e.what() << '\n';
    return kQuery;
  } catch (const io::FormatError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph queries over IFC building models"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool json_flag) {
    sub->add_option("--schema-file", common.schema_file, "Schema extension file (default: $C4B_SCHEMA_PATH)");
    sub->add_flag("--no-hierarchy", common.no_hierarchy, "Exact-label matching");
    if (json_flag) sub->add_flag("--json", common.json, "Machine-readable output");
  };

  std::string input, output, format, text, name;
  std::vector<std::string> inputs, params, queries, rules;
  bool labels = false, explain = false, list = false;
  std::size_t iterations = 100, min_duplicates = 2, max_door_spaces = 2;

  auto* convert = app.add_subcommand("convert", "Parse an IFC file and write a graph");
  convert->add_option("input", input, "IFC file")->required();
  convert->add_option("-o,--output", output, "Output path")->required();
  convert->add_option("--format", format, "archive|graphml|json|cypher-script (default: from extension)");
  add_common(convert, false);

  auto* stats = app.add_subcommand("stats", "Node and edge counts");
  stats->add_option("input", input, "IFC file or graph")->required();
  stats->add_flag("--labels", labels, "Per-label node counts");
  add_common(stats, true);

  auto* query = app.add_subcommand("query", "Run one query");
  query->add_option("input", input, "IFC file or graph")->required();
  query->add_option("query", text, "Query text")->required();
  query->add_flag("--explain", explain, "Print the plan instead of running");
  add_common(query, true);

  auto* repl = app.add_subcommand("repl", "Read queries from stdin, one per line");
  repl->add_option("input", input, "IFC file or graph")->required();
  add_common(repl, true);

  auto* run = app.add_subcommand("run", "Run a named functional query");
  run->add_option("input", input, "IFC file or graph");
  run->add_option("name", name, "Query name");
  run->add_option("-p,--param", params, "key=value");
  run->add_flag("--list", list, "List the named queries");
  add_common(run, true);

  auto* check = app.add_subcommand("check", "Model quality rules");
  check->add_option("input", input, "IFC file or graph")->required();
  check->add_option("--rule", rules, "duplicate-boundary, door-over-connection (default: all)");
  check->add_option("--min-duplicates", min_duplicates, "Boundaries per element/space pair to report")
      ->check(CLI::Range(2, 1 << 30));
  check->add_option("--max-door-spaces", max_door_spaces, "Spaces a door may bound before it is reported")
      ->check(CLI::Range(1, 1 << 30));
  add_common(check, true);

  auto* benchmark = app.add_subcommand("bench", "Time queries; correlates size and time across 3+ models");
  benchmark->add_option("inputs", inputs, "IFC files or graphs")->required();
  benchmark->add_option("-q,--query", queries, "Query text (default: the parameterless named queries)");
  benchmark->add_option("--iterations", iterations, "Runs per query")->check(CLI::Range(1, 1 << 30));
  add_common(benchmark, true);

  auto* exporter = app.add_subcommand("export", "Write a loaded graph in another format");
  exporter->add_option("input", input, "IFC file or graph")->required();
  exporter->add_option("-o,--output", output, "Output path")->required();
  exporter->add_option("--format", format, "archive|graphml|json|cypher-script (default: from extension)");
  add_common(exporter, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (convert->parsed() || exporter->parsed()) return guarded([&] { return cmd_convert(input, output, format, common); });
  if (stats->parsed()) return guarded([&] { return cmd_stats(input, labels, common); });
  if (query->parsed()) return guarded([&] { return cmd_query(input, text, explain, common); });
  if (repl->parsed()) return guarded([&] { return cmd_repl(input, common); });
  if (run->parsed()) {
    if (list) return cmd_list(common);
    if (input.empty() || name.empty()) {
      std::cerr << "run needs a graph and a query name (or --list)\n";
      return kUsage;
    }
    return guarded([&] { return cmd_run(input, name, params, common); });
  }
  if (check->parsed())
    return guarded([&] { return cmd_check(input, rules, min_duplicates, max_door_spaces, common); });
  if (benchmark->parsed()) return guarded([&] { return cmd_bench(inputs, queries, iterations, common); });
  return kUsage;
}

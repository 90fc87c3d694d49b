#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "bimgraph/graph/ifc_builder.hpp"
#include "bimgraph/step/parser.hpp"

namespace bimgraph::testkit {

inline std::string fixture_path(const std::string& name) { return std::string(BIMGRAPH_FIXTURE_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline graph::BuildResult load_fixture(const std::string& name) {
  return graph::build_graph(step::read_file(fixture_path(name)));
}

}  // namespace bimgraph::testkit

#include "bimgraph/step/file.hpp"

namespace bimgraph::step {

std::vector<DanglingRef> validate_refs(const StepFile& file) {
  std::vector<DanglingRef> out;
  for (const auto& [id, inst] : file.instances) {
    for (std::size_t arg = 0; arg < inst.args.size(); ++arg) {
      for_each_ref(inst.args[arg], [&](EntityRef r) {
        if (!file.instances.contains(r.target)) out.push_back({id, arg, r.target});
      });
    }
  }
  return out;
}

schema::Version effective_version(const StepFile& file) {
  return file.schema_version.known.value_or(schema::Version::Ifc4);
}

}  // namespace bimgraph::step

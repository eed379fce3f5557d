#pragma once

#include <string>
#include <vector>

#include "sievelab/homogenize.hpp"
#include "sievelab/mesh.hpp"

namespace sievelab {

// Nodal values attached to a persisted mesh. Inactive slots are stored as
// written; producers decide what an inactive node carries (usually 0).
struct NamedField {
  std::string name;
  std::vector<double> values;  // one per mesh node
};

// Mesh bundle on disk: one mesh block followed by any number of field
// blocks, all plain text. Layout:
//   nodes N triangles T edges E h <value>
//   <N lines>  id x y
//   <T lines>  id n1 n2 n3
//   <E lines>  id p1 p2 m1 m2 s0 s1 len state
//   field <name> N
//   <N lines>  id value
// state is `tied`, `free`, or `pen:<theta>`. Numbers use 17 significant
// digits, so parse(text(...)) reproduces every double bit-exactly and
// text(parse(...)) reproduces the bytes. Removed-triangle sets are not part
// of the format; a loaded pattern has an empty removal mask.
struct MeshBundle {
  InterfaceMesh mesh;
  CouplingPattern pattern;
  std::vector<NamedField> fields;
};

std::string mesh_text(const InterfaceMesh& mesh, const CouplingPattern* pattern = nullptr);
std::string field_text(const NamedField& field);
std::string bundle_text(const MeshBundle& bundle);

// Throws IoError with a line number on malformed input. tri_side,
// n_base_nodes and max_diameter are rebuilt from the parsed data.
MeshBundle parse_bundle(const std::string& text);

// CSV artifacts. All numbers go through the same 17-digit formatter so a
// rerun of the same experiment produces byte-identical files.
std::string cell_table_csv(const std::vector<CellTable>& tables);
std::string report_csv(const ConvergenceReport& report);
std::string theta_csv(const ReconstructedDensity& density);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace sievelab

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dcube/affine.hpp"
#include "dcube/finite_system.hpp"
#include "oracle.hpp"

namespace testing_support {

inline std::string fixture_path(const std::string& name) { return std::string(DCUBE_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline dcube::FiniteZdSystem load(const std::string& name) { return dcube::load_system(read_fixture(name)); }
inline dcube::AffineZdSystem load_affine(const std::string& name) { return dcube::parse_affine(read_fixture(name)); }

inline oracle::Perms perms(const dcube::FiniteZdSystem& sys) {
  oracle::Perms out;
  for (unsigned i = 1; i <= sys.dim(); ++i) out.emplace_back(sys.perm(i).begin(), sys.perm(i).end());
  return out;
}

// Minimal fixtures, all with the closing property except the d = 1 rotation.
inline const std::vector<std::string>& minimal_fixtures() {
  static const std::vector<std::string> names = {"rot6.fsys",     "torus3x4.fsys",  "rot12_d3.fsys",
                                                 "cube2_d3.fsys", "torus4_d3.fsys", "point_d2.fsys",
                                                 "rot5_d1.fsys",  "rot6_same.fsys", "example83_q5.fsys"};
  return names;
}

inline const std::vector<std::string>& nonminimal_fixtures() {
  static const std::vector<std::string> names = {"split_4_2.fsys", "two_rot3.fsys", "identity_d2.fsys"};
  return names;
}

inline const std::vector<std::string>& affine_fixtures() {
  static const std::vector<std::string> names = {"example83.affine", "jordan.affine", "rot6.affine", "skew3.affine",
                                                 "heis2.affine"};
  return names;
}

}  // namespace testing_support

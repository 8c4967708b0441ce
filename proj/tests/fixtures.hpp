#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "polybound/parse.hpp"
#include "polybound/reform.hpp"

namespace fixtures {

inline std::string read_file(const std::string& name) {
  std::ifstream in(std::string(POLYBOUND_TEST_DATA_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing test data file: " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline polybound::PolynomialProgram load(const std::string& name) {
  const auto dot = name.find('.');
  return polybound::parse_program(read_file(name), name.substr(0, dot));
}

inline polybound::ReformParams sigmas(std::initializer_list<int> values) {
  polybound::ReformParams params;
  int i = 0;
  for (int s : values) params.per_variable[i++].sigma = s;
  return params;
}

inline polybound::PolynomialProgram pp1() { return load("pp1.pp"); }
inline polybound::PolynomialProgram pp2() { return load("pp2.pp"); }
inline polybound::PolynomialProgram pp3() { return load("pp3.pp"); }

// Paper settings for the three worked examples.
inline polybound::ReformParams pp1_params() { return sigmas({3, 2, 2}); }
inline polybound::ReformParams pp3_params() { return sigmas({7, 7, 7}); }
inline polybound::ReformParams pp2_params() {
  // x1, x2 are discrete (sigma follows from the step); x3, x4 are set
  // to the printed expansions.
  polybound::ReformParams params;
  params.per_variable[2].sigma = 9;
  params.per_variable[3].sigma = 5;
  return params;
}

}  // namespace fixtures

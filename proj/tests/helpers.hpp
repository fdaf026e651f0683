#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "pcot/kernel_io.hpp"

#ifndef PCOT_KERNELS_DIR
#define PCOT_KERNELS_DIR "kernels"
#endif

namespace pcot_test {

inline pcot::Prdg load_corpus(const std::string& name) {
  return pcot::parse_kernel_file(std::string(PCOT_KERNELS_DIR) + "/" + name + ".kernel");
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pcot_test

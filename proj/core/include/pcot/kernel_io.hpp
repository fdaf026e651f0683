#pragma once

#include <string>

#include "pcot/prdg.hpp"

namespace pcot {

/// Parse the JSON kernel-spec format (see docs/formats.md) and validate the
/// structural invariants, sampling-based checks included.
Prdg parse_kernel(const std::string& text);

Prdg parse_kernel_file(const std::string& path);

/// Serialize back to the kernel-spec format; parse_kernel(print_kernel(p))
/// reproduces p structurally.
std::string print_kernel(const Prdg& p);

/// Resolve a kernel argument: an existing path is used as-is, otherwise the
/// name (with or without the .kernel suffix) is searched in PCOT_KERNEL_PATH
/// and in ./kernels. Returns the empty string when nothing matches.
std::string find_kernel_file(const std::string& name_or_path);

}  // namespace pcot

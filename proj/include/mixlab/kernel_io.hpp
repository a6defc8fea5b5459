#pragma once

// Kernel import/export:
//   {"n_states": N, "triplets": [[row, col, prob], ...], "state_labels": [...]}
// state_labels is optional. Probabilities are written with 17 significant
// digits; duplicate (row, col) entries are summed on import.

#include <iosfwd>
#include <string>

#include "mixlab/kernel.hpp"

namespace mixlab {

Kernel read_kernel_json(std::istream& is);
Kernel read_kernel_file(const std::string& path);
void write_kernel_json(std::ostream& os, const Kernel& k);

}  // namespace mixlab

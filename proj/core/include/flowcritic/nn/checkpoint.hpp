#pragma once

#include <string>
#include <vector>

#include "flowcritic/nn/mlp.hpp"

namespace flowcritic::nn {

// Little-endian binary checkpoint: magic "FCKP", version u32, layer spec
// (u32 count, u32 sizes, u32 activation count, u8 activation ids), u64
// parameter count, then the parameter vector as 8-byte floats. A spec with
// a single size denotes a raw vector (used for the policy log-std).
void save_checkpoint(const std::string& path, const Mlp& net);
Mlp load_checkpoint(const std::string& path);

void save_raw_vector(const std::string& path, const std::vector<double>& v);
std::vector<double> load_raw_vector(const std::string& path);

}  // namespace flowcritic::nn

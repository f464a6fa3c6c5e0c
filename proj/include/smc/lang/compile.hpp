#pragma once

#include <map>
#include <string>
#include <vector>

#include "smc/graph.hpp"
#include "smc/lang/ast.hpp"

namespace smc::lang {

struct CompileInputs {
  std::map<std::string, double> constants;
  // Observed values by variable; element t-1 belongs to node name[t].
  std::map<std::string, std::vector<double>> data;
  // Keys are node names ("phi", "x[3]") or whole variable names.
  std::map<std::string, double> inits;
  // Variables whose unobserved nodes form the latent chain.
  std::vector<std::string> latent;
};

// Unrolls loops and builds the scalar node graph. Throws CompileError.
ModelGraph compile(const ModelSource& source, const CompileInputs& inputs);

}  // namespace smc::lang

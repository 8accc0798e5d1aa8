#pragma once

// Reference matrices for marked item 10 on the alanine system, and the
// self-checks run by `nmrsearch fixtures`.

#include <string>
#include <vector>

#include "nmrsearch/operator_matrix.hpp"

namespace nmrsearch::fixtures {

// 8x8, marked item 10: swaps basis states 2 and 6 (0-based).
OperatorMatrix reference_uf();

// Acquisition-frame states of the two queries, before and after U_f.
OperatorMatrix rho01_in();
OperatorMatrix rho01_out();
OperatorMatrix rho02_in();
OperatorMatrix rho02_out();

enum class Fault { None, UfBitOrder };

struct Result {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<std::string> names();
std::vector<Result> run_all(Fault fault = Fault::None);

}  // namespace nmrsearch::fixtures

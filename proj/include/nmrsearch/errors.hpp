#pragma once

#include <stdexcept>
#include <string>

namespace nmrsearch {

// Invalid arguments, dimension mismatches, out-of-range spin indices.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A spectral readout in which a populated line could not be classified.
class AmbiguousReadout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nmrsearch

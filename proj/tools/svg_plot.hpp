#pragma once

#include <ostream>
#include <string_view>

#include "nmrsearch/spectrometer.hpp"

namespace nmrsearch {

// Static line plot of Re(spectrum), frequency decreasing left to right.
void write_spectrum_svg(std::ostream& out, const Spectrum& spectrum, std::string_view title);

}  // namespace nmrsearch

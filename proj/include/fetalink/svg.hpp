#pragma once

// Minimal SVG rendering of the phase box plots: one panel per metric
// (mean/std/cv), three grouped boxes per panel (pre/during/post).

#include <string>

#include "fetalink/phase.hpp"

namespace fetalink {

std::string render_phase_svg(const PhaseReport& report);

}  // namespace fetalink

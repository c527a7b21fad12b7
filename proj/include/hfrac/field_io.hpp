#pragma once

#include "hfrac/grid.hpp"

#include <string>

namespace hfrac {

/// HFLD1 field file: ASCII magic "HFLD1\n", one ASCII header line
/// "n N_1 .. N_{2n+1} a_1 b_1 .. a_{2n+1} b_{2n+1} mode\n" (mode P or Z),
/// then raw little-endian IEEE-754 doubles as (re, im) pairs, vertical
/// axis fastest. Round trips are bit-exact.
void save_field(const GridField& f, const std::string& path);
GridField load_field(const std::string& path);

}  // namespace hfrac

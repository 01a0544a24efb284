#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwmod/binary.hpp"

namespace fwmod {

struct DwarfFunction {
    std::string name;
    std::uint64_t low_pc = 0;
};

// DW_TAG_subprogram name/low_pc pairs from .debug_info (DWARF v4/v5,
// 32-bit format). Entries without a name or address are skipped; malformed
// data yields a partial result rather than an error.
std::vector<DwarfFunction> read_dwarf_functions(const BinaryImage& image);

}  // namespace fwmod

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fwmod {

class BinaryImage;

enum class InstrKind {
    call,              // bl / blx with immediate target
    branch,            // b (conditional or not); unconditional b can be a tail call
    ret,               // bx lr / pop {...pc}
    pc_relative_load,  // ldr rt, [pc, #imm]
    mov_immediate,     // movw / movt halves
    pc_relative_addr,  // adr / add rd, pc, #imm
    other,
};

struct Instruction {
    std::uint64_t addr = 0;
    int size = 0;  // 2 or 4
    InstrKind kind = InstrKind::other;
    std::optional<std::uint64_t> target;    // call/branch destination or literal address
    std::optional<std::uint32_t> immediate; // movw/movt imm16
    int reg = -1;                            // destination register where relevant
    bool is_movt = false;                    // distinguishes the movt half
    bool conditional = false;
    bool writes_link = false;                // bl/blx
    bool pushes_link = false;                // push {... lr}
};

struct FunctionRecord {
    std::uint64_t entry = 0;
    std::uint64_t end = 0;  // exclusive
    std::string name;       // empty when unknown
    bool thumb = true;
    std::uint64_t section_vaddr = 0;  // containing executable section
};

struct CallSite {
    std::uint64_t caller = 0;  // function entry
    std::uint64_t callee = 0;  // function entry
    std::uint64_t site = 0;    // instruction address
};

struct DataRef {
    std::uint64_t function = 0;   // function entry
    std::uint64_t data_addr = 0;  // address inside .data/.bss/.rodata
};

struct AnalysisStats {
    std::size_t indirect_calls = 0;       // blx/bx through a register
    std::size_t unresolved_branches = 0;  // direct targets outside known entries
};

// Decode one instruction in the given mode; nullopt when the bytes are not
// a recognized encoding (unknown Thumb bytes are skipped at 2-byte steps).
std::optional<Instruction> decode_thumb(const BinaryImage& image, std::uint64_t addr);
std::optional<Instruction> decode_arm(const BinaryImage& image, std::uint64_t addr);

// Function discovery. Symbol-bearing images use their function symbols
// verbatim; stripped images fall back to seeds, the entry point, transitive
// call targets and a linear prologue scan. Records are address-sorted and
// non-overlapping.
std::vector<FunctionRecord> recover_functions(const BinaryImage& image,
                                              const std::vector<std::uint64_t>& seeds = {});

// One CallSite per static bl/blx (and unconditional tail branch) whose target
// is a known function entry. Multiplicity is preserved.
std::vector<CallSite> extract_calls(const BinaryImage& image,
                                    const std::vector<FunctionRecord>& functions,
                                    AnalysisStats* stats = nullptr);

// DataRefs from literal-pool loads, movw/movt pairs and pc-relative address
// arithmetic that land in .data/.bss/.rodata; de-duplicated per
// (function, address).
std::vector<DataRef> extract_data_refs(const BinaryImage& image,
                                       const std::vector<FunctionRecord>& functions);

}  // namespace fwmod

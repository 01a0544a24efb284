#include "fwmod/arm.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "fwmod/binary.hpp"
#include "fwmod/errors.hpp"

namespace fwmod {

namespace {

std::int64_t sign_extend(std::uint64_t value, int bits) {
    const std::uint64_t mask = 1ull << (bits - 1);
    return static_cast<std::int64_t>((value ^ mask) - mask);
}

std::uint64_t align4(std::uint64_t addr) { return addr & ~3ull; }

bool is_thumb32(std::uint16_t hw) { return (hw & 0xF800) >= 0xE800; }

// 25-bit branch offset shared by BL/BLX/B.W (T1/T2/T4 encodings).
std::int64_t thumb_branch_offset(std::uint16_t hw1, std::uint16_t hw2) {
    const std::uint64_t s = (hw1 >> 10) & 1;
    const std::uint64_t imm10 = hw1 & 0x3FF;
    const std::uint64_t j1 = (hw2 >> 13) & 1;
    const std::uint64_t j2 = (hw2 >> 11) & 1;
    const std::uint64_t i1 = (~(j1 ^ s)) & 1;
    const std::uint64_t i2 = (~(j2 ^ s)) & 1;
    const std::uint64_t imm11 = hw2 & 0x7FF;
    const std::uint64_t raw =
        (s << 24) | (i1 << 23) | (i2 << 22) | (imm10 << 12) | (imm11 << 1);
    return sign_extend(raw, 25);
}

}  // namespace

std::optional<Instruction> decode_thumb(const BinaryImage& image, std::uint64_t addr) {
    std::uint16_t hw1 = 0;
    if (!image.read_u16(addr, hw1)) return std::nullopt;

    Instruction ins;
    ins.addr = addr;

    if (!is_thumb32(hw1)) {
        ins.size = 2;
        const std::uint64_t pc = addr + 4;
        if ((hw1 & 0xFE00) == 0xB400) {  // push
            ins.pushes_link = ((hw1 >> 8) & 1) != 0;
            return ins;
        }
        if ((hw1 & 0xFE00) == 0xBC00) {  // pop
            if ((hw1 >> 8) & 1) ins.kind = InstrKind::ret;  // pops pc
            return ins;
        }
        if ((hw1 & 0xFF87) == 0x4700) {  // bx rm
            ins.reg = (hw1 >> 3) & 0xF;
            ins.kind = ins.reg == 14 ? InstrKind::ret : InstrKind::branch;
            return ins;
        }
        if ((hw1 & 0xFF87) == 0x4780) {  // blx rm (indirect call)
            ins.reg = (hw1 >> 3) & 0xF;
            ins.kind = InstrKind::call;
            ins.writes_link = true;
            return ins;
        }
        if ((hw1 & 0xF800) == 0x4800) {  // ldr rt, [pc, #imm8*4]
            ins.kind = InstrKind::pc_relative_load;
            ins.reg = (hw1 >> 8) & 0x7;
            ins.target = align4(pc) + ((hw1 & 0xFF) << 2);
            return ins;
        }
        if ((hw1 & 0xF800) == 0xA000) {  // adr rd, label
            ins.kind = InstrKind::pc_relative_addr;
            ins.reg = (hw1 >> 8) & 0x7;
            ins.target = align4(pc) + ((hw1 & 0xFF) << 2);
            return ins;
        }
        if ((hw1 & 0xF800) == 0xE000) {  // b (unconditional, T2)
            ins.kind = InstrKind::branch;
            ins.target = pc + sign_extend((hw1 & 0x7FF) << 1, 12);
            return ins;
        }
        if ((hw1 & 0xF000) == 0xD000 && ((hw1 >> 8) & 0xF) < 0xE) {  // b<cond> (T1)
            ins.kind = InstrKind::branch;
            ins.conditional = true;
            ins.target = pc + sign_extend((hw1 & 0xFF) << 1, 9);
            return ins;
        }
        return ins;  // other 16-bit
    }

    std::uint16_t hw2 = 0;
    if (!image.read_u16(addr + 2, hw2)) return std::nullopt;
    ins.size = 4;
    const std::uint64_t pc = addr + 4;

    if ((hw1 & 0xF800) == 0xF000 && (hw2 & 0xD000) == 0xD000) {  // bl
        ins.kind = InstrKind::call;
        ins.writes_link = true;
        ins.target = pc + thumb_branch_offset(hw1, hw2);
        return ins;
    }
    if ((hw1 & 0xF800) == 0xF000 && (hw2 & 0xD001) == 0xC000) {  // blx (to arm)
        ins.kind = InstrKind::call;
        ins.writes_link = true;
        ins.target = align4(pc) + thumb_branch_offset(hw1, hw2);
        return ins;
    }
    if ((hw1 & 0xF800) == 0xF000 && (hw2 & 0xD000) == 0x9000) {  // b.w (T4)
        ins.kind = InstrKind::branch;
        ins.target = pc + thumb_branch_offset(hw1, hw2);
        return ins;
    }
    if ((hw1 & 0xF800) == 0xF000 && (hw2 & 0xD000) == 0x8000 &&
        ((hw1 >> 6) & 0xF) < 0xE) {  // b<cond>.w (T3)
        const std::uint64_t s = (hw1 >> 10) & 1;
        const std::uint64_t imm6 = hw1 & 0x3F;
        const std::uint64_t j1 = (hw2 >> 13) & 1;
        const std::uint64_t j2 = (hw2 >> 11) & 1;
        const std::uint64_t imm11 = hw2 & 0x7FF;
        const std::uint64_t raw = (s << 20) | (j2 << 19) | (j1 << 18) | (imm6 << 12) | (imm11 << 1);
        ins.kind = InstrKind::branch;
        ins.conditional = true;
        ins.target = pc + sign_extend(raw, 21);
        return ins;
    }
    if ((hw1 & 0xFF7F) == 0xF85F) {  // ldr.w rt, [pc, #+/-imm12]
        ins.kind = InstrKind::pc_relative_load;
        ins.reg = (hw2 >> 12) & 0xF;
        const std::uint64_t imm12 = hw2 & 0xFFF;
        const bool up = (hw1 >> 7) & 1;
        ins.target = up ? align4(pc) + imm12 : align4(pc) - imm12;
        return ins;
    }
    if ((hw1 & 0xFBF0) == 0xF240 && (hw2 & 0x8000) == 0) {  // movw
        ins.kind = InstrKind::mov_immediate;
        ins.reg = (hw2 >> 8) & 0xF;
        ins.immediate = static_cast<std::uint32_t>(((hw1 & 0xF) << 12) | (((hw1 >> 10) & 1) << 11) |
                                                   (((hw2 >> 12) & 0x7) << 8) | (hw2 & 0xFF));
        return ins;
    }
    if ((hw1 & 0xFBF0) == 0xF2C0 && (hw2 & 0x8000) == 0) {  // movt
        ins.kind = InstrKind::mov_immediate;
        ins.is_movt = true;
        ins.reg = (hw2 >> 8) & 0xF;
        ins.immediate = static_cast<std::uint32_t>(((hw1 & 0xF) << 12) | (((hw1 >> 10) & 1) << 11) |
                                                   (((hw2 >> 12) & 0x7) << 8) | (hw2 & 0xFF));
        return ins;
    }
    if (((hw1 & 0xFBFF) == 0xF20F || (hw1 & 0xFBFF) == 0xF2AF) && (hw2 & 0x8000) == 0) {
        // adr.w rd, label (add/sub from aligned pc)
        const bool sub = (hw1 & 0xFBFF) == 0xF2AF;
        const std::uint64_t imm12 =
            ((((hw1 >> 10) & 1) << 11) | (((hw2 >> 12) & 0x7) << 8) | (hw2 & 0xFF));
        ins.kind = InstrKind::pc_relative_addr;
        ins.reg = (hw2 >> 8) & 0xF;
        ins.target = sub ? align4(pc) - imm12 : align4(pc) + imm12;
        return ins;
    }
    if (hw1 == 0xE92D) {  // push.w (stmdb sp!)
        ins.pushes_link = ((hw2 >> 14) & 1) != 0;
        return ins;
    }
    if (hw1 == 0xE8BD) {  // pop.w (ldmia sp!)
        if ((hw2 >> 15) & 1) ins.kind = InstrKind::ret;
        return ins;
    }
    return ins;  // other 32-bit
}

std::optional<Instruction> decode_arm(const BinaryImage& image, std::uint64_t addr) {
    std::uint32_t w = 0;
    if (!image.read_u32(addr, w)) return std::nullopt;

    Instruction ins;
    ins.addr = addr;
    ins.size = 4;
    const std::uint64_t pc = addr + 8;
    const std::uint32_t cond = w >> 28;

    if (cond == 0xF) {
        if ((w & 0xFE000000) == 0xFA000000) {  // blx immediate (to thumb)
            const std::uint64_t h = (w >> 24) & 1;
            ins.kind = InstrKind::call;
            ins.writes_link = true;
            ins.target = pc + sign_extend((w & 0xFFFFFF) << 2, 26) + (h << 1);
        }
        return ins;
    }
    ins.conditional = cond != 0xE;

    if ((w & 0x0F000000) == 0x0B000000) {  // bl
        ins.kind = InstrKind::call;
        ins.writes_link = true;
        ins.target = pc + sign_extend((w & 0xFFFFFF) << 2, 26);
        return ins;
    }
    if ((w & 0x0F000000) == 0x0A000000) {  // b
        ins.kind = InstrKind::branch;
        ins.target = pc + sign_extend((w & 0xFFFFFF) << 2, 26);
        return ins;
    }
    if ((w & 0x0FFFFFF0) == 0x012FFF10) {  // bx rm
        ins.reg = w & 0xF;
        ins.kind = ins.reg == 14 ? InstrKind::ret : InstrKind::branch;
        return ins;
    }
    if ((w & 0x0FFFFFF0) == 0x012FFF30) {  // blx rm
        ins.reg = w & 0xF;
        ins.kind = InstrKind::call;
        ins.writes_link = true;
        return ins;
    }
    if ((w & 0x0F7F0000) == 0x051F0000) {  // ldr rt, [pc, #+/-imm12]
        ins.kind = InstrKind::pc_relative_load;
        ins.reg = (w >> 12) & 0xF;
        const std::uint64_t imm12 = w & 0xFFF;
        ins.target = ((w >> 23) & 1) ? align4(pc) + imm12 : align4(pc) - imm12;
        return ins;
    }
    if ((w & 0x0FF00000) == 0x03000000) {  // movw
        ins.kind = InstrKind::mov_immediate;
        ins.reg = (w >> 12) & 0xF;
        ins.immediate = ((w >> 16) & 0xF) << 12 | (w & 0xFFF);
        return ins;
    }
    if ((w & 0x0FF00000) == 0x03400000) {  // movt
        ins.kind = InstrKind::mov_immediate;
        ins.is_movt = true;
        ins.reg = (w >> 12) & 0xF;
        ins.immediate = ((w >> 16) & 0xF) << 12 | (w & 0xFFF);
        return ins;
    }
    if ((w & 0x0FFF0000) == 0x028F0000 || (w & 0x0FFF0000) == 0x024F0000) {  // adr (add/sub pc)
        const std::uint32_t rot = ((w >> 8) & 0xF) * 2;
        const std::uint32_t imm8 = w & 0xFF;
        const std::uint32_t value = rot == 0 ? imm8 : (imm8 >> rot) | (imm8 << (32 - rot));
        ins.kind = InstrKind::pc_relative_addr;
        ins.reg = (w >> 12) & 0xF;
        ins.target = (w & 0x0FFF0000) == 0x028F0000 ? align4(pc) + value : align4(pc) - value;
        return ins;
    }
    if ((w & 0x0FFF0000) == 0x092D0000) {  // stmdb sp! (push)
        ins.pushes_link = ((w >> 14) & 1) != 0;
        return ins;
    }
    if ((w & 0x0FFF0000) == 0x08BD0000) {  // ldmia sp! (pop)
        if ((w >> 15) & 1) ins.kind = InstrKind::ret;
        return ins;
    }
    if ((w & 0x0FFFFFFF) == 0x01A0F00E) {  // mov pc, lr
        ins.kind = InstrKind::ret;
        return ins;
    }
    return ins;
}

namespace {

// Decodes one function extent. Two passes: the first finds literal-pool
// slots referenced by pc-relative loads, the second emits instructions while
// skipping those slots (pool words otherwise decode as garbage).
std::vector<Instruction> decode_function(const BinaryImage& image, const FunctionRecord& fn) {
    std::set<std::uint64_t> pool_words;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<Instruction> instructions;
        std::uint64_t addr = fn.entry;
        while (addr < fn.end) {
            if (pool_words.count(align4(addr))) {
                addr = align4(addr) + 4;
                continue;
            }
            auto ins = fn.thumb ? decode_thumb(image, addr) : decode_arm(image, addr);
            if (!ins) break;  // unreadable bytes
            if (pass == 0 && ins->kind == InstrKind::pc_relative_load && ins->target) {
                pool_words.insert(align4(*ins->target));
            }
            if (pass == 1) instructions.push_back(*ins);
            addr += ins->size;
        }
        if (pass == 1) return instructions;
    }
    return {};
}

std::vector<const Section*> executable_sections(const BinaryImage& image) {
    std::vector<const Section*> out;
    for (const auto& s : image.sections()) {
        if (s.flags.executable && s.size > 0) out.push_back(&s);
    }
    return out;
}

// Address-sorted records with extents clamped to the next entry / section
// end (and the symbol size when one is known).
std::vector<FunctionRecord> finalize_records(
    const BinaryImage& image, const std::map<std::uint64_t, FunctionRecord>& by_entry) {
    std::vector<FunctionRecord> records;
    records.reserve(by_entry.size());
    for (const auto& [entry, record] : by_entry) records.push_back(record);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const Section* section = image.section_containing(records[i].entry);
        const std::uint64_t section_end = section->vaddr + section->size;
        std::uint64_t end = records[i].end != 0 ? records[i].end : section_end;
        end = std::min(end, section_end);
        if (i + 1 < records.size() && records[i + 1].section_vaddr == records[i].section_vaddr) {
            end = std::min(end, records[i + 1].entry);
        }
        records[i].end = std::max(end, records[i].entry);
    }
    return records;
}

}  // namespace

std::vector<FunctionRecord> recover_functions(const BinaryImage& image,
                                              const std::vector<std::uint64_t>& seeds) {
    auto exec = executable_sections(image);
    if (exec.empty()) raise(errc::no_executable_section, image.path().string());

    auto exec_section_of = [&](std::uint64_t addr) -> const Section* {
        for (const auto* s : exec) {
            if (s->contains(addr)) return s;
        }
        return nullptr;
    };

    std::map<std::uint64_t, FunctionRecord> by_entry;

    if (image.has_function_symbols()) {
        for (const auto& sym : image.symbols()) {
            if (sym.kind != SymbolKind::function) continue;
            const Section* s = exec_section_of(sym.addr);
            if (!s) continue;
            FunctionRecord record;
            record.entry = sym.addr;
            record.end = sym.size > 0 ? sym.addr + sym.size : 0;
            record.name = sym.name;
            record.thumb = sym.thumb;
            record.section_vaddr = s->vaddr;
            by_entry.emplace(record.entry, std::move(record));
        }
        return finalize_records(image, by_entry);
    }

    // Stripped path. Cortex-M firmware is Thumb-only, so discovery assumes
    // Thumb-2 throughout.
    auto add_entry = [&](std::uint64_t addr) -> bool {
        addr &= ~1ull;
        const Section* s = exec_section_of(addr);
        if (!s) return false;
        FunctionRecord record;
        record.entry = addr;
        record.name = "";
        record.thumb = true;
        record.section_vaddr = s->vaddr;
        return by_entry.emplace(addr, std::move(record)).second;
    };

    for (auto seed : seeds) add_entry(seed);
    add_entry(image.entry_point());

    // linear prologue scan: push instructions that save the link register
    for (const auto* s : exec) {
        for (std::uint64_t addr = s->vaddr; addr + 2 <= s->vaddr + s->size; addr += 2) {
            auto ins = decode_thumb(image, addr);
            if (ins && ins->pushes_link) add_entry(addr);
        }
    }

    // transitive call targets from pool-aware decoding of known functions
    for (bool changed = true; changed;) {
        changed = false;
        auto records = finalize_records(image, by_entry);
        for (const auto& record : records) {
            for (const auto& ins : decode_function(image, record)) {
                if (ins.kind == InstrKind::call && ins.target) {
                    if (add_entry(*ins.target)) changed = true;
                }
            }
        }
    }
    return finalize_records(image, by_entry);
}

std::vector<CallSite> extract_calls(const BinaryImage& image,
                                    const std::vector<FunctionRecord>& functions,
                                    AnalysisStats* stats) {
    std::set<std::uint64_t> entries;
    for (const auto& fn : functions) entries.insert(fn.entry);

    std::vector<CallSite> sites;
    for (const auto& fn : functions) {
        for (const auto& ins : decode_function(image, fn)) {
            if (ins.kind == InstrKind::call) {
                if (!ins.target) {
                    if (stats) stats->indirect_calls += 1;
                    continue;
                }
                const std::uint64_t target = *ins.target & ~1ull;
                if (entries.count(target)) {
                    sites.push_back({fn.entry, target, ins.addr});
                } else if (stats) {
                    stats->unresolved_branches += 1;
                }
                continue;
            }
            // unconditional branch to another function's entry: tail call
            if (ins.kind == InstrKind::branch && !ins.conditional && ins.target) {
                const std::uint64_t target = *ins.target & ~1ull;
                if (target != fn.entry && entries.count(target)) {
                    sites.push_back({fn.entry, target, ins.addr});
                }
            }
        }
    }
    return sites;
}

std::vector<DataRef> extract_data_refs(const BinaryImage& image,
                                       const std::vector<FunctionRecord>& functions) {
    const auto data = data_sections(image);
    auto in_data = [&data](std::uint64_t addr) {
        return std::any_of(data.begin(), data.end(),
                           [addr](const Section* s) { return s->contains(addr); });
    };

    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    std::vector<DataRef> refs;
    auto add_ref = [&](std::uint64_t function, std::uint64_t addr) {
        if (in_data(addr) && seen.insert({function, addr}).second) {
            refs.push_back({function, addr});
        }
    };

    for (const auto& fn : functions) {
        std::map<int, std::uint32_t> movw_low;  // register -> low half
        for (const auto& ins : decode_function(image, fn)) {
            switch (ins.kind) {
                case InstrKind::pc_relative_load: {
                    std::uint32_t pool_word = 0;
                    if (ins.target && image.read_u32(*ins.target, pool_word)) {
                        add_ref(fn.entry, pool_word);
                    }
                    break;
                }
                case InstrKind::mov_immediate: {
                    if (!ins.immediate) break;
                    if (!ins.is_movt) {
                        movw_low[ins.reg] = *ins.immediate;
                    } else if (auto it = movw_low.find(ins.reg); it != movw_low.end()) {
                        add_ref(fn.entry,
                                (static_cast<std::uint64_t>(*ins.immediate) << 16) | it->second);
                        movw_low.erase(it);
                    }
                    break;
                }
                case InstrKind::pc_relative_addr:
                    if (ins.target) add_ref(fn.entry, *ins.target);
                    break;
                default:
                    break;
            }
        }
    }
    std::sort(refs.begin(), refs.end(), [](const DataRef& a, const DataRef& b) {
        return a.function != b.function ? a.function < b.function : a.data_addr < b.data_addr;
    });
    return refs;
}

}  // namespace fwmod

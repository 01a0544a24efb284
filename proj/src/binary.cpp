#include "fwmod/binary.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "fwmod/errors.hpp"
#include "src/dwarf.hpp"

namespace fwmod {

namespace {

constexpr std::uint16_t kMachineArm = 40;

struct FileReader {
    std::vector<std::uint8_t> bytes;
    bool big_endian = false;

    std::uint8_t u8(std::size_t off) const {
        if (off >= bytes.size()) raise(errc::truncated_file, "read past end of file");
        return bytes[off];
    }
    std::uint16_t u16(std::size_t off) const {
        std::uint16_t a = u8(off), b = u8(off + 1);
        return big_endian ? static_cast<std::uint16_t>(a << 8 | b)
                          : static_cast<std::uint16_t>(b << 8 | a);
    }
    std::uint32_t u32(std::size_t off) const {
        std::uint32_t a = u8(off), b = u8(off + 1), c = u8(off + 2), d = u8(off + 3);
        return big_endian ? (a << 24 | b << 16 | c << 8 | d) : (d << 24 | c << 16 | b << 8 | a);
    }
    std::vector<std::uint8_t> slice(std::size_t off, std::size_t len) const {
        if (off + len > bytes.size() || off + len < off) {
            raise(errc::truncated_file, "section extends past end of file");
        }
        return {bytes.begin() + static_cast<std::ptrdiff_t>(off),
                bytes.begin() + static_cast<std::ptrdiff_t>(off + len)};
    }
};

std::string string_at(const std::vector<std::uint8_t>& table, std::size_t off) {
    std::string s;
    while (off < table.size() && table[off] != 0) s.push_back(static_cast<char>(table[off++]));
    return s;
}

}  // namespace

BinaryImage load_elf(const std::filesystem::path& path) {
    FileReader file;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(errc::missing_file, "cannot open " + path.string());
        file.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    if (file.bytes.size() < 4 || file.bytes[0] != 0x7f || file.bytes[1] != 'E' ||
        file.bytes[2] != 'L' || file.bytes[3] != 'F') {
        raise(errc::not_elf, path.string() + " does not start with the ELF magic");
    }
    if (file.bytes.size() < 52) raise(errc::truncated_file, "ELF header incomplete");

    const std::uint8_t ei_class = file.bytes[4];
    const std::uint8_t ei_data = file.bytes[5];
    if (ei_data != 1 && ei_data != 2) raise(errc::unsupported_machine, "unknown ELF byte order");
    file.big_endian = ei_data == 2;

    const std::uint16_t machine = file.u16(0x12);
    if (machine != kMachineArm) {
        raise(errc::unsupported_machine,
              "e_machine " + std::to_string(machine) + " is not ARM (40)");
    }
    if (ei_class != 1) raise(errc::unsupported_machine, "only 32-bit ARM ELF is supported");

    BinaryImage image;
    image.path_ = path;
    image.machine_ = "ARM";
    image.endianness_ = file.big_endian ? Endianness::big : Endianness::little;
    image.entry_point_ = file.u32(0x18);

    const std::uint32_t shoff = file.u32(0x20);
    const std::uint16_t shentsize = file.u16(0x2E);
    const std::uint16_t shnum = file.u16(0x30);
    const std::uint16_t shstrndx = file.u16(0x32);

    struct RawSection {
        std::string name;
        std::uint32_t type = 0, flags = 0, addr = 0, offset = 0, size = 0, link = 0, entsize = 0;
    };
    std::vector<RawSection> raw(shnum);
    if (shoff != 0) {
        for (std::uint16_t i = 0; i < shnum; ++i) {
            std::size_t base = shoff + static_cast<std::size_t>(i) * shentsize;
            raw[i].type = file.u32(base + 0x4);
            raw[i].flags = file.u32(base + 0x8);
            raw[i].addr = file.u32(base + 0xC);
            raw[i].offset = file.u32(base + 0x10);
            raw[i].size = file.u32(base + 0x14);
            raw[i].link = file.u32(base + 0x18);
            raw[i].entsize = file.u32(base + 0x24);
        }
        if (shstrndx < shnum) {
            auto strtab = raw[shstrndx].type == 8 /*NOBITS*/
                              ? std::vector<std::uint8_t>{}
                              : file.slice(raw[shstrndx].offset, raw[shstrndx].size);
            for (std::uint16_t i = 0; i < shnum; ++i) {
                raw[i].name = string_at(strtab, file.u32(shoff + static_cast<std::size_t>(i) * shentsize));
            }
        }
    }

    constexpr std::uint32_t kShtNobits = 8, kShtSymtab = 2;
    constexpr std::uint32_t kShfWrite = 1, kShfAlloc = 2, kShfExec = 4;

    for (const auto& rs : raw) {
        if (rs.type == 0) continue;
        const bool alloc = (rs.flags & kShfAlloc) != 0;
        if (alloc) {
            Section section;
            section.name = rs.name;
            section.vaddr = rs.addr;
            section.size = rs.size;
            section.flags.allocated = true;
            section.flags.executable = (rs.flags & kShfExec) != 0;
            section.flags.writable = (rs.flags & kShfWrite) != 0;
            section.flags.has_file_bytes = rs.type != kShtNobits;
            if (section.flags.has_file_bytes) section.bytes = file.slice(rs.offset, rs.size);
            image.sections_.push_back(std::move(section));
        } else if (rs.name.rfind(".debug", 0) == 0 && rs.type != kShtNobits) {
            image.debug_sections_[rs.name] = file.slice(rs.offset, rs.size);
        }
    }

    std::sort(image.sections_.begin(), image.sections_.end(),
              [](const Section& a, const Section& b) { return a.vaddr < b.vaddr; });
    for (std::size_t i = 1; i < image.sections_.size(); ++i) {
        const auto& prev = image.sections_[i - 1];
        const auto& cur = image.sections_[i];
        if (prev.size > 0 && cur.size > 0 && prev.vaddr + prev.size > cur.vaddr) {
            raise(errc::overlapping_sections, prev.name + " overlaps " + cur.name);
        }
    }

    // symbol table
    for (const auto& rs : raw) {
        if (rs.type != kShtSymtab) continue;
        const std::size_t entsize = rs.entsize != 0 ? rs.entsize : 16;
        const std::vector<std::uint8_t> strtab =
            rs.link < raw.size() ? file.slice(raw[rs.link].offset, raw[rs.link].size)
                                 : std::vector<std::uint8_t>{};
        for (std::size_t off = entsize; off + entsize <= rs.size; off += entsize) {
            const std::size_t base = rs.offset + off;
            SymbolEntry sym;
            sym.name = string_at(strtab, file.u32(base));
            sym.addr = file.u32(base + 4);
            sym.size = file.u32(base + 8);
            const std::uint8_t info = file.u8(base + 12);
            const std::uint16_t shndx = file.u16(base + 14);
            if (shndx == 0) continue;  // undefined
            switch (info & 0xF) {
                case 2: sym.kind = SymbolKind::function; break;
                case 1: sym.kind = SymbolKind::object; break;
                default: sym.kind = SymbolKind::other; break;
            }
            if (sym.kind == SymbolKind::function && (sym.addr & 1) != 0) {
                sym.addr &= ~1ull;  // ARM/Thumb low-bit convention
                sym.thumb = true;
            }
            if (!sym.name.empty()) image.symbols_.push_back(std::move(sym));
        }
        break;
    }
    return image;
}

bool BinaryImage::has_function_symbols() const {
    return std::any_of(symbols_.begin(), symbols_.end(),
                       [](const SymbolEntry& s) { return s.kind == SymbolKind::function; });
}

const Section* BinaryImage::section_containing(std::uint64_t addr) const {
    for (const auto& s : sections_) {
        if (s.contains(addr)) return &s;
    }
    return nullptr;
}

const Section* BinaryImage::section_named(const std::string& name) const {
    for (const auto& s : sections_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

bool BinaryImage::read_u16(std::uint64_t vaddr, std::uint16_t& out) const {
    const Section* s = section_containing(vaddr);
    if (!s || !s->flags.has_file_bytes || vaddr + 2 > s->vaddr + s->size) return false;
    const std::size_t off = vaddr - s->vaddr;
    const std::uint16_t a = s->bytes[off], b = s->bytes[off + 1];
    out = endianness_ == Endianness::big ? static_cast<std::uint16_t>(a << 8 | b)
                                         : static_cast<std::uint16_t>(b << 8 | a);
    return true;
}

bool BinaryImage::read_u32(std::uint64_t vaddr, std::uint32_t& out) const {
    std::uint16_t lo = 0, hi = 0;
    if (!read_u16(vaddr, lo) || !read_u16(vaddr + 2, hi)) return false;
    out = endianness_ == Endianness::big ? (static_cast<std::uint32_t>(lo) << 16 | hi)
                                         : (static_cast<std::uint32_t>(hi) << 16 | lo);
    return true;
}

std::vector<const Section*> data_sections(const BinaryImage& image) {
    std::vector<const Section*> out;
    for (const auto& s : image.sections()) {
        if (s.name == ".data" || s.name == ".bss" || s.name == ".rodata") out.push_back(&s);
    }
    return out;  // sections() is already ascending by vaddr
}

const NameAddressEntry* NameAddressMap::find_address(std::uint64_t addr) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), addr,
                               [](const NameAddressEntry& e, std::uint64_t a) { return e.addr < a; });
    if (it == entries.end() || it->addr != addr) return nullptr;
    return &*it;
}

std::optional<std::uint64_t> NameAddressMap::address_of(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.name == name) return e.addr;
    }
    return std::nullopt;
}

std::vector<std::string> NameAddressMap::names() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.name);
    return out;
}

NameAddressMap build_name_address_map(const BinaryImage& image) {
    std::map<std::uint64_t, NameAddressEntry> by_addr;
    for (const auto& sym : image.symbols()) {
        if (sym.kind != SymbolKind::function) continue;
        by_addr.emplace(sym.addr, NameAddressEntry{sym.name, sym.addr, sym.thumb});
    }

    for (const auto& fn : read_dwarf_functions(image)) {
        std::uint64_t addr = fn.low_pc;
        bool thumb = false;
        if (addr & 1) {
            addr &= ~1ull;
            thumb = true;
        }
        auto it = by_addr.find(addr);
        if (it != by_addr.end()) {
            it->second.name = fn.name;  // DWARF takes precedence
            it->second.thumb = it->second.thumb || thumb;
        } else {
            by_addr.emplace(addr, NameAddressEntry{fn.name, addr, thumb});
        }
    }

    if (by_addr.empty()) {
        raise(errc::no_symbol_information,
              image.path().string() + " has neither function symbols nor DWARF subprograms");
    }
    NameAddressMap map;
    map.entries.reserve(by_addr.size());
    for (auto& [addr, entry] : by_addr) map.entries.push_back(std::move(entry));
    return map;
}

}  // namespace fwmod

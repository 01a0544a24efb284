#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fwmod {

enum class Endianness { little, big };

struct SectionFlags {
    bool executable = false;
    bool writable = false;
    bool allocated = false;
    bool has_file_bytes = false;
};

struct Section {
    std::string name;
    std::uint64_t vaddr = 0;
    std::uint64_t size = 0;
    SectionFlags flags;
    std::vector<std::uint8_t> bytes;  // empty for .bss

    bool contains(std::uint64_t addr) const { return addr >= vaddr && addr < vaddr + size; }
};

enum class SymbolKind { function, object, other };

struct SymbolEntry {
    std::string name;
    std::uint64_t addr = 0;  // thumb bit removed for functions
    std::uint64_t size = 0;
    SymbolKind kind = SymbolKind::other;
    bool thumb = false;
};

// Immutable view of a loaded ELF firmware image. Safe to share read-only.
class BinaryImage {
public:
    const std::filesystem::path& path() const { return path_; }
    const std::string& machine() const { return machine_; }
    Endianness endianness() const { return endianness_; }
    std::uint64_t entry_point() const { return entry_point_; }

    // Allocated sections in ascending vaddr order.
    const std::vector<Section>& sections() const { return sections_; }
    const std::vector<SymbolEntry>& symbols() const { return symbols_; }
    bool has_function_symbols() const;

    const Section* section_containing(std::uint64_t addr) const;
    const Section* section_named(const std::string& name) const;

    // Endianness-aware reads from section file bytes; false when the address
    // is unmapped or has no backing bytes.
    bool read_u16(std::uint64_t vaddr, std::uint16_t& out) const;
    bool read_u32(std::uint64_t vaddr, std::uint32_t& out) const;

    // Raw non-allocated debug/symbol section contents (.debug_*), kept for
    // DWARF name/address extraction.
    const std::map<std::string, std::vector<std::uint8_t>>& debug_sections() const {
        return debug_sections_;
    }

private:
    friend BinaryImage load_elf(const std::filesystem::path& path);

    std::filesystem::path path_;
    std::string machine_;
    Endianness endianness_ = Endianness::little;
    std::uint64_t entry_point_ = 0;
    std::vector<Section> sections_;
    std::vector<SymbolEntry> symbols_;
    std::map<std::string, std::vector<std::uint8_t>> debug_sections_;
};

// Loads a 32-bit ARM ELF. Throws not_elf, unsupported_machine,
// truncated_file, overlapping_sections.
BinaryImage load_elf(const std::filesystem::path& path);

// Exactly the .data, .bss and .rodata sections present, ascending vaddr.
std::vector<const Section*> data_sections(const BinaryImage& image);

struct NameAddressEntry {
    std::string name;
    std::uint64_t addr = 0;
    bool thumb = false;
};

// Function name <-> entry address mapping for evaluation alignment.
// Addresses are unique; duplicate names may appear at distinct addresses.
struct NameAddressMap {
    std::vector<NameAddressEntry> entries;  // sorted by address

    const NameAddressEntry* find_address(std::uint64_t addr) const;
    std::optional<std::uint64_t> address_of(const std::string& name) const;
    std::vector<std::string> names() const;
};

// From function symbols and DWARF subprograms; DWARF wins on conflict.
// Throws no_symbol_information when neither source has entries.
NameAddressMap build_name_address_map(const BinaryImage& image);

}  // namespace fwmod

#include "src/dwarf.hpp"

#include <map>
#include <optional>
#include <stdexcept>

namespace fwmod {

namespace {

// DWARF constants (subset)
constexpr std::uint32_t DW_TAG_compile_unit = 0x11;
constexpr std::uint32_t DW_TAG_subprogram = 0x2e;
constexpr std::uint32_t DW_AT_name = 0x03;
constexpr std::uint32_t DW_AT_low_pc = 0x11;
constexpr std::uint32_t DW_AT_linkage_name = 0x6e;
constexpr std::uint32_t DW_AT_str_offsets_base = 0x72;
constexpr std::uint32_t DW_AT_addr_base = 0x73;

enum Form : std::uint32_t {
    DW_FORM_addr = 0x01,
    DW_FORM_block2 = 0x03,
    DW_FORM_block4 = 0x04,
    DW_FORM_data2 = 0x05,
    DW_FORM_data4 = 0x06,
    DW_FORM_data8 = 0x07,
    DW_FORM_string = 0x08,
    DW_FORM_block = 0x09,
    DW_FORM_block1 = 0x0a,
    DW_FORM_data1 = 0x0b,
    DW_FORM_flag = 0x0c,
    DW_FORM_sdata = 0x0d,
    DW_FORM_strp = 0x0e,
    DW_FORM_udata = 0x0f,
    DW_FORM_ref_addr = 0x10,
    DW_FORM_ref1 = 0x11,
    DW_FORM_ref2 = 0x12,
    DW_FORM_ref4 = 0x13,
    DW_FORM_ref8 = 0x14,
    DW_FORM_ref_udata = 0x15,
    DW_FORM_indirect = 0x16,
    DW_FORM_sec_offset = 0x17,
    DW_FORM_exprloc = 0x18,
    DW_FORM_flag_present = 0x19,
    DW_FORM_strx = 0x1a,
    DW_FORM_addrx = 0x1b,
    DW_FORM_ref_sup4 = 0x1c,
    DW_FORM_strp_sup = 0x1d,
    DW_FORM_data16 = 0x1e,
    DW_FORM_line_strp = 0x1f,
    DW_FORM_ref_sig8 = 0x20,
    DW_FORM_implicit_const = 0x21,
    DW_FORM_loclistx = 0x22,
    DW_FORM_rnglistx = 0x23,
    DW_FORM_ref_sup8 = 0x24,
    DW_FORM_strx1 = 0x25,
    DW_FORM_strx2 = 0x26,
    DW_FORM_strx3 = 0x27,
    DW_FORM_strx4 = 0x28,
    DW_FORM_addrx1 = 0x29,
    DW_FORM_addrx2 = 0x2a,
    DW_FORM_addrx3 = 0x2b,
    DW_FORM_addrx4 = 0x2c,
};

struct Cursor {
    const std::vector<std::uint8_t>* data = nullptr;
    std::size_t pos = 0;
    bool big_endian = false;

    bool eof() const { return !data || pos >= data->size(); }
    std::size_t remaining() const { return data ? data->size() - pos : 0; }

    std::uint8_t u8() {
        if (eof()) throw std::out_of_range("dwarf: past end");
        return (*data)[pos++];
    }
    std::uint16_t u16() {
        std::uint16_t a = u8(), b = u8();
        return big_endian ? static_cast<std::uint16_t>(a << 8 | b)
                          : static_cast<std::uint16_t>(b << 8 | a);
    }
    std::uint32_t u32() {
        std::uint32_t a = u16(), b = u16();
        return big_endian ? (a << 16 | b) : (b << 16 | a);
    }
    std::uint64_t u64() {
        std::uint64_t a = u32(), b = u32();
        return big_endian ? (a << 32 | b) : (b << 32 | a);
    }
    std::uint64_t uleb() {
        std::uint64_t value = 0;
        int shift = 0;
        for (;;) {
            std::uint8_t byte = u8();
            value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
            if ((byte & 0x80) == 0) return value;
            shift += 7;
        }
    }
    std::int64_t sleb() {
        std::int64_t value = 0;
        int shift = 0;
        std::uint8_t byte;
        do {
            byte = u8();
            value |= static_cast<std::int64_t>(byte & 0x7f) << shift;
            shift += 7;
        } while (byte & 0x80);
        if (shift < 64 && (byte & 0x40)) value |= -(std::int64_t{1} << shift);
        return value;
    }
    std::string cstring() {
        std::string s;
        while (!eof() && (*data)[pos] != 0) s.push_back(static_cast<char>((*data)[pos++]));
        if (!eof()) ++pos;
        return s;
    }
    void skip(std::size_t n) {
        if (remaining() < n) throw std::out_of_range("dwarf: past end");
        pos += n;
    }
};

struct AbbrevAttr {
    std::uint32_t attr = 0;
    std::uint32_t form = 0;
    std::int64_t implicit_const = 0;
};

struct AbbrevDecl {
    std::uint32_t tag = 0;
    bool has_children = false;
    std::vector<AbbrevAttr> attrs;
};

std::map<std::uint64_t, AbbrevDecl> parse_abbrev(const std::vector<std::uint8_t>& section,
                                                 std::size_t offset, bool big_endian) {
    std::map<std::uint64_t, AbbrevDecl> table;
    Cursor cur{&section, offset, big_endian};
    while (!cur.eof()) {
        std::uint64_t code = cur.uleb();
        if (code == 0) break;
        AbbrevDecl decl;
        decl.tag = static_cast<std::uint32_t>(cur.uleb());
        decl.has_children = cur.u8() != 0;
        for (;;) {
            std::uint32_t attr = static_cast<std::uint32_t>(cur.uleb());
            std::uint32_t form = static_cast<std::uint32_t>(cur.uleb());
            if (attr == 0 && form == 0) break;
            AbbrevAttr a{attr, form, 0};
            if (form == DW_FORM_implicit_const) a.implicit_const = cur.sleb();
            decl.attrs.push_back(a);
        }
        table.emplace(code, std::move(decl));
    }
    return table;
}

struct UnitContext {
    const std::map<std::string, std::vector<std::uint8_t>>* debug;
    bool big_endian = false;
    std::uint8_t address_size = 4;
    std::uint64_t str_offsets_base = 8;  // past the v5 header by default
    std::uint64_t addr_base = 8;

    const std::vector<std::uint8_t>* section(const char* name) const {
        auto it = debug->find(name);
        return it == debug->end() ? nullptr : &it->second;
    }

    std::string str_at(const char* section_name, std::uint64_t offset) const {
        const auto* sec = section(section_name);
        if (!sec || offset >= sec->size()) return {};
        Cursor cur{sec, static_cast<std::size_t>(offset), big_endian};
        return cur.cstring();
    }

    std::string strx(std::uint64_t index) const {
        const auto* sec = section(".debug_str_offsets");
        if (!sec) return {};
        Cursor cur{sec, static_cast<std::size_t>(str_offsets_base + 4 * index), big_endian};
        try {
            return str_at(".debug_str", cur.u32());
        } catch (const std::out_of_range&) {
            return {};
        }
    }

    std::uint64_t addrx(std::uint64_t index) const {
        const auto* sec = section(".debug_addr");
        if (!sec) return 0;
        Cursor cur{sec, static_cast<std::size_t>(addr_base + address_size * index), big_endian};
        try {
            return address_size == 8 ? cur.u64() : cur.u32();
        } catch (const std::out_of_range&) {
            return 0;
        }
    }
};

struct AttrValue {
    std::optional<std::uint64_t> number;
    std::optional<std::string> text;
};

// Reads one attribute value, resolving string/address indices.
AttrValue read_form(Cursor& cur, const UnitContext& ctx, const AbbrevAttr& attr) {
    AttrValue v;
    switch (attr.form) {
        case DW_FORM_addr:
            v.number = ctx.address_size == 8 ? cur.u64() : cur.u32();
            break;
        case DW_FORM_data1: v.number = cur.u8(); break;
        case DW_FORM_data2: v.number = cur.u16(); break;
        case DW_FORM_data4: v.number = cur.u32(); break;
        case DW_FORM_data8: v.number = cur.u64(); break;
        case DW_FORM_data16: cur.skip(16); break;
        case DW_FORM_sdata: v.number = static_cast<std::uint64_t>(cur.sleb()); break;
        case DW_FORM_udata: v.number = cur.uleb(); break;
        case DW_FORM_string: v.text = cur.cstring(); break;
        case DW_FORM_strp: v.text = ctx.str_at(".debug_str", cur.u32()); break;
        case DW_FORM_line_strp: v.text = ctx.str_at(".debug_line_str", cur.u32()); break;
        case DW_FORM_strp_sup: cur.skip(4); break;
        case DW_FORM_strx: v.text = ctx.strx(cur.uleb()); break;
        case DW_FORM_strx1: v.text = ctx.strx(cur.u8()); break;
        case DW_FORM_strx2: v.text = ctx.strx(cur.u16()); break;
        case DW_FORM_strx3: {
            std::uint64_t x = cur.u8();
            std::uint64_t y = cur.u8();
            std::uint64_t z = cur.u8();
            v.text = ctx.strx(ctx.big_endian ? (x << 16 | y << 8 | z) : (z << 16 | y << 8 | x));
            break;
        }
        case DW_FORM_strx4: v.text = ctx.strx(cur.u32()); break;
        case DW_FORM_addrx: v.number = ctx.addrx(cur.uleb()); break;
        case DW_FORM_addrx1: v.number = ctx.addrx(cur.u8()); break;
        case DW_FORM_addrx2: v.number = ctx.addrx(cur.u16()); break;
        case DW_FORM_addrx3: {
            std::uint64_t x = cur.u8();
            std::uint64_t y = cur.u8();
            std::uint64_t z = cur.u8();
            v.number = ctx.addrx(ctx.big_endian ? (x << 16 | y << 8 | z) : (z << 16 | y << 8 | x));
            break;
        }
        case DW_FORM_addrx4: v.number = ctx.addrx(cur.u32()); break;
        case DW_FORM_sec_offset: v.number = cur.u32(); break;
        case DW_FORM_flag: v.number = cur.u8(); break;
        case DW_FORM_flag_present: v.number = 1; break;
        case DW_FORM_implicit_const:
            v.number = static_cast<std::uint64_t>(attr.implicit_const);
            break;
        case DW_FORM_ref1: cur.skip(1); break;
        case DW_FORM_ref2: cur.skip(2); break;
        case DW_FORM_ref4: cur.skip(4); break;
        case DW_FORM_ref8: case DW_FORM_ref_sig8: case DW_FORM_ref_sup8: cur.skip(8); break;
        case DW_FORM_ref_addr: case DW_FORM_ref_sup4: cur.skip(4); break;
        case DW_FORM_ref_udata: case DW_FORM_loclistx: case DW_FORM_rnglistx: cur.uleb(); break;
        case DW_FORM_block1: cur.skip(cur.u8()); break;
        case DW_FORM_block2: cur.skip(cur.u16()); break;
        case DW_FORM_block4: cur.skip(cur.u32()); break;
        case DW_FORM_block: case DW_FORM_exprloc: cur.skip(cur.uleb()); break;
        case DW_FORM_indirect: {
            AbbrevAttr inner{attr.attr, static_cast<std::uint32_t>(cur.uleb()), 0};
            return read_form(cur, ctx, inner);
        }
        default:
            throw std::out_of_range("dwarf: unhandled form " + std::to_string(attr.form));
    }
    return v;
}

void parse_unit(Cursor& cur, const UnitContext& base_ctx,
                const std::vector<std::uint8_t>& abbrev_section,
                std::vector<DwarfFunction>& out) {
    const std::uint32_t unit_length = cur.u32();
    if (unit_length == 0xffffffffu) throw std::out_of_range("dwarf: 64-bit format unsupported");
    const std::size_t unit_end = cur.pos + unit_length;
    const std::uint16_t version = cur.u16();
    if (version < 2 || version > 5) throw std::out_of_range("dwarf: unsupported version");

    UnitContext ctx = base_ctx;
    std::uint32_t abbrev_offset;
    if (version >= 5) {
        cur.u8();  // unit type
        ctx.address_size = cur.u8();
        abbrev_offset = cur.u32();
    } else {
        abbrev_offset = cur.u32();
        ctx.address_size = cur.u8();
    }
    auto abbrevs = parse_abbrev(abbrev_section, abbrev_offset, ctx.big_endian);

    while (cur.pos < unit_end) {
        std::uint64_t code = cur.uleb();
        if (code == 0) continue;  // null entry closing a sibling chain
        auto decl_it = abbrevs.find(code);
        if (decl_it == abbrevs.end()) throw std::out_of_range("dwarf: unknown abbrev code");
        const AbbrevDecl& decl = decl_it->second;

        std::optional<std::string> name, linkage;
        std::optional<std::uint64_t> low_pc;
        for (const auto& attr : decl.attrs) {
            AttrValue v = read_form(cur, ctx, attr);
            if (decl.tag == DW_TAG_compile_unit) {
                if (attr.attr == DW_AT_str_offsets_base && v.number) {
                    ctx.str_offsets_base = *v.number;
                }
                if (attr.attr == DW_AT_addr_base && v.number) ctx.addr_base = *v.number;
            }
            if (decl.tag == DW_TAG_subprogram) {
                if (attr.attr == DW_AT_name && v.text) name = v.text;
                if (attr.attr == DW_AT_linkage_name && v.text) linkage = v.text;
                if (attr.attr == DW_AT_low_pc && v.number) low_pc = v.number;
            }
        }
        if (decl.tag == DW_TAG_subprogram && low_pc && (name || linkage)) {
            out.push_back({name ? *name : *linkage, *low_pc});
        }
    }
    cur.pos = unit_end;
}

}  // namespace

std::vector<DwarfFunction> read_dwarf_functions(const BinaryImage& image) {
    std::vector<DwarfFunction> out;
    const auto& debug = image.debug_sections();
    auto info_it = debug.find(".debug_info");
    auto abbrev_it = debug.find(".debug_abbrev");
    if (info_it == debug.end() || abbrev_it == debug.end()) return out;

    UnitContext ctx;
    ctx.debug = &debug;
    ctx.big_endian = image.endianness() == Endianness::big;

    Cursor cur{&info_it->second, 0, ctx.big_endian};
    try {
        while (!cur.eof()) parse_unit(cur, ctx, abbrev_it->second, out);
    } catch (const std::out_of_range&) {
        // malformed or unsupported tail: keep what parsed cleanly
    }
    return out;
}

}  // namespace fwmod
